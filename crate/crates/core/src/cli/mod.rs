//! Command-line front end. Every command writes one JSON report carrying a
//! `certificate` field; the exit code is 0 for `certified`, 2 for
//! `unverified` (including numerical non-convergence) and 1 for `failed` or
//! any input error.

mod commands;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::envelope::{Certificate, EnvelopeMode};
use crate::error::{Error, Result};
use crate::tolerance;

pub const THREADS_ENV: &str = "ELLIS_ENVELOPE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "ellis-envelope", version, about = "Idempotents of finite semigroups and injective envelopes of matrix operator systems")]
pub struct Cli {
    /// Spaces per indentation level in JSON output; 0 prints compact JSON.
    #[arg(long, global = true, default_value_t = 2)]
    pub json_indent: usize,
    /// Worker threads for independent probes; overridden by ELLIS_ENVELOPE_THREADS.
    #[arg(long, global = true, default_value_t = 1)]
    pub parallel: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite semigroups given by Cayley tables.
    #[command(subcommand)]
    Semigroup(SemigroupCmd),
    /// Linear maps on matrix algebras.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Injective envelopes of operator systems and spaces.
    #[command(subcommand)]
    Envelope(EnvelopeCmd),
    /// Fixed points and minimal idempotents absorbing a channel.
    #[command(subcommand)]
    Boundary(BoundaryCmd),
}

#[derive(Subcommand, Debug)]
pub enum SemigroupCmd {
    /// Idempotents, their order, similarity classes and minimal left ideals.
    Analyze {
        table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run property checks over every associative table of an order ≤ 3.
    Enumerate {
        #[arg(long)]
        order: usize,
        /// Comma-separated list of checks.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
        check: Vec<SemigroupCheck>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SemigroupCheck {
    /// An idempotent exists.
    Lemma1,
    /// Minimal idempotents below every idempotent.
    Lemma2,
    /// Similarity of pairs below a minimal idempotent.
    #[value(alias = "remark3")]
    Remark,
    /// Idempotents of minimal left ideals form a left-zero semigroup.
    Ideals,
    All,
}

impl SemigroupCheck {
    /// Key of the check in reports.
    pub fn key(self) -> &'static str {
        match self {
            Self::Lemma1 => "lemma1",
            Self::Lemma2 => "lemma2",
            Self::Remark => "remark",
            Self::Ideals => "ideals",
            Self::All => "all",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum ChannelCmd {
    /// Structural flags (CP, unital, trace preserving, idempotent, cb-contractive).
    Info {
        channel: PathBuf,
        /// Also bound the cb-norm of non-CP maps.
        #[arg(long)]
        cb: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ergodic projection onto the fixed points of a unital CP map.
    Cesaro {
        channel: PathBuf,
        #[arg(long, default_value = "spectral")]
        mode: String,
        /// Check ‖eφᵏe − e‖ for k up to this power.
        #[arg(long, default_value_t = 20)]
        absorb: usize,
        #[arg(long, default_value_t = tolerance::LIMIT)]
        tol: f64,
        #[arg(long, default_value_t = tolerance::REPORT)]
        report_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum EnvelopeCmd {
    Compute {
        space: PathBuf,
        #[arg(long, default_value = "auto")]
        mode: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum BoundaryCmd {
    Compute {
        channel: PathBuf,
        /// Operator space that must stay fixed.
        #[arg(long)]
        fix: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probe tolerance for the minimality certificate.
    #[arg(long, default_value_t = tolerance::LIMIT)]
    pub tol: f64,
    /// Tolerance for reported agreements; must exceed --tol.
    #[arg(long, default_value_t = tolerance::REPORT)]
    pub report_tol: f64,
    /// Starts per linear ascent.
    #[arg(long, default_value_t = crate::feasible_set::DEFAULT_STARTS)]
    pub starts: usize,
    /// Random members probed per round.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    /// Total descent probes.
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    /// Dykstra iterations per projection.
    #[arg(long, default_value_t = crate::feasible_set::PROJECTION_BUDGET)]
    pub projection_budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Validated settings of one envelope or boundary run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub report_tol: f64,
    pub starts: usize,
    pub samples: usize,
    pub budget: usize,
    pub projection_budget: usize,
    pub mode: EnvelopeMode,
    #[serde(skip)]
    pub threads: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(args: &RunArgs, mode: EnvelopeMode, threads: usize) -> Result<Self> {
        if !(args.tol > 0.0 && args.tol < args.report_tol) {
            return Err(Error::parse("--tol", format!("need 0 < tol < report_tol, found {} and {}", args.tol, args.report_tol)));
        }
        for (name, v) in [
            ("--starts", args.starts),
            ("--samples", args.samples),
            ("--budget", args.budget),
            ("--projection-budget", args.projection_budget),
        ] {
            if v == 0 {
                return Err(Error::parse(name, "must be positive"));
            }
        }
        Ok(Self {
            seed: args.seed,
            tol: args.tol,
            report_tol: args.report_tol,
            starts: args.starts,
            samples: args.samples,
            budget: args.budget,
            projection_budget: args.projection_budget,
            mode,
            threads,
            out: args.out.clone(),
        })
    }
}

/// `--parallel`, unless the environment variable is set.
fn resolve_threads(flag: usize) -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(Error::parse(THREADS_ENV, format!("expected a positive integer, found {v:?}"))),
        },
        Err(_) if flag > 0 => Ok(flag),
        Err(_) => Err(Error::parse("--parallel", "must be positive")),
    }
}

pub(crate) fn exit_code(c: Certificate) -> i32 {
    match c {
        Certificate::Certified => 0,
        Certificate::Unverified => 2,
        Certificate::Failed => 1,
    }
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), format!("cannot read file: {e}")))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        Error::parse(format!("{}:{}", path.display(), if at == "." { "/".into() } else { at }), e.into_inner().to_string())
    })
}

pub(crate) fn render<T: Serialize>(value: &T, indent: usize) -> String {
    let mut buf = Vec::new();
    if indent == 0 {
        serde_json::to_writer(&mut buf, value).expect("report serializes");
    } else {
        let pad = vec![b' '; indent];
        let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
        value.serialize(&mut ser).expect("report serializes");
    }
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub(crate) fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::parse(p.display().to_string(), format!("cannot write report: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::parse("<stdout>", e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct FailureReport<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    certificate: Certificate,
    error: String,
    diagnostics: Diagnostics<'a>,
}

#[derive(Serialize)]
struct Diagnostics<'a> {
    method: &'a str,
    iterations: usize,
    residual: f64,
    history: &'a [f64],
}

/// Parse `argv`, run the command and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let indent = cli.json_indent;
    let name = commands::name(&cli.command);
    let out = commands::out_path(&cli.command).map(Path::to_path_buf);
    let result = resolve_threads(cli.parallel).and_then(|threads| commands::dispatch(&cli.command, threads, indent));
    match result {
        Ok(code) => code,
        Err(Error::NonConvergence {
            method,
            iterations,
            residual,
            history,
        }) => {
            let report = FailureReport {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: name,
                certificate: Certificate::Unverified,
                error: format!("{method} did not converge"),
                diagnostics: Diagnostics {
                    method,
                    iterations,
                    residual,
                    history: &history,
                },
            };
            if let Err(e) = emit(&render(&report, indent), out.as_deref()) {
                eprintln!("error: {e}");
                return 1;
            }
            eprintln!("warning: {method} did not converge (residual {residual:.3e} after {iterations} iterations)");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
