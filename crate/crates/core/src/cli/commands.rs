use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::{emit, exit_code, read_json, render, BoundaryCmd, ChannelCmd, Command, EnvelopeCmd, RunConfig, SemigroupCheck, SemigroupCmd};
use crate::boundary::{compute_boundary, BoundaryConfig, BoundaryResiduals};
use crate::channel::{cesaro_idempotent, check_absorption, check_structure, CesaroMode, ChannelJson, ChannelMap, ErgodicResult, StructureFlags};
use crate::envelope::{compute_envelope, Certificate, ChoiEffros, DescentConfig, DescentStep, EnvelopeConfig, EnvelopeMode};
use crate::error::{Error, Result};
use crate::feasible_set::{OperatorSpaceJson, OperatorSubspace, SpaceMode};
use crate::matrix::{hermitian_eig, MatrixJson, SubspaceBasis};
use crate::semigroup::{
    check_idempotent_exists, check_left_zero_in_minimal_ideals, check_minimal_below, check_similarity_below_minimal,
    enumerate_semigroups, idempotent_poset, minimal_idempotent_below, minimal_left_ideals, CayleyJson, CayleyTable,
    CheckOutcome,
};

pub(super) fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Semigroup(SemigroupCmd::Analyze { .. }) => "semigroup analyze",
        Command::Semigroup(SemigroupCmd::Enumerate { .. }) => "semigroup enumerate",
        Command::Channel(ChannelCmd::Info { .. }) => "channel info",
        Command::Channel(ChannelCmd::Cesaro { .. }) => "channel cesaro",
        Command::Envelope(EnvelopeCmd::Compute { .. }) => "envelope compute",
        Command::Boundary(BoundaryCmd::Compute { .. }) => "boundary compute",
    }
}

pub(super) fn out_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Semigroup(SemigroupCmd::Analyze { out, .. })
        | Command::Semigroup(SemigroupCmd::Enumerate { out, .. })
        | Command::Channel(ChannelCmd::Info { out, .. })
        | Command::Channel(ChannelCmd::Cesaro { out, .. }) => out.as_deref(),
        Command::Envelope(EnvelopeCmd::Compute { run, .. }) | Command::Boundary(BoundaryCmd::Compute { run, .. }) => {
            run.out.as_deref()
        }
    }
}

/// Fields shared by every report.
#[derive(Serialize)]
struct Header {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    certificate: Certificate,
}

fn header(command: &'static str, certificate: Certificate) -> Header {
    Header {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        certificate,
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    #[serde(flatten)]
    header: Header,
    #[serde(flatten)]
    body: T,
}

fn finish<T: Serialize>(cmd: &Command, certificate: Certificate, body: T, indent: usize) -> Result<i32> {
    let report = Report {
        header: header(name(cmd), certificate),
        body,
    };
    emit(&render(&report, indent), out_path(cmd))?;
    Ok(exit_code(certificate))
}

pub(super) fn dispatch(cmd: &Command, threads: usize, indent: usize) -> Result<i32> {
    match cmd {
        Command::Semigroup(SemigroupCmd::Analyze { table, .. }) => {
            let json: CayleyJson = read_json(table)?;
            let t = json.to_table().map_err(|e| at_file(table, e))?;
            let (cert, body) = analyze(&t)?;
            finish(cmd, cert, body, indent)
        }
        Command::Semigroup(SemigroupCmd::Enumerate { order, check, .. }) => {
            let (cert, body) = enumerate(*order, check)?;
            finish(cmd, cert, body, indent)
        }
        Command::Channel(ChannelCmd::Info { channel, cb, .. }) => {
            let phi = load_channel(channel)?;
            let flags = check_structure(&phi, *cb);
            let body = ChannelInfo {
                dim_in: phi.dim_in(),
                dim_out: phi.dim_out(),
                choi_eigenvalues: hermitian_eig(&phi.choi().hermitian_part())?.eigenvalues,
                flags,
            };
            finish(cmd, Certificate::Certified, body, indent)
        }
        Command::Channel(ChannelCmd::Cesaro {
            channel,
            mode,
            absorb,
            tol,
            report_tol,
            ..
        }) => {
            let mode: CesaroMode = mode.parse().map_err(|_| Error::parse("--mode", format!("expected spectral|iterative|both, found {mode:?}")))?;
            let phi = load_channel(channel)?;
            let r = cesaro_idempotent(&phi, mode)?;
            let absorption = if *absorb > 0 { Some(check_absorption(&r.idempotent, &phi, *absorb)?) } else { None };
            let ok = r.within(*tol) && absorption.is_none_or(|a| a <= *report_tol);
            let body = CesaroReport {
                config: CesaroConfig {
                    mode,
                    absorb: *absorb,
                    tol: *tol,
                    report_tol: *report_tol,
                },
                idempotent_choi: MatrixJson::from(r.idempotent.choi()),
                fixed_space_basis: basis_json(&r.fixed_space),
                absorption,
                result: r,
            };
            finish(cmd, if ok { Certificate::Certified } else { Certificate::Unverified }, body, indent)
        }
        Command::Envelope(EnvelopeCmd::Compute { space, mode, run }) => {
            let mode: EnvelopeMode = mode.parse()?;
            let cfg = RunConfig::new(run, mode, threads)?;
            let (e, declared) = load_space(space)?;
            let (cert, body) = envelope_report(&e, declared, &cfg)?;
            finish(cmd, cert, body, indent)
        }
        Command::Boundary(BoundaryCmd::Compute { channel, fix, run }) => {
            let cfg = RunConfig::new(run, EnvelopeMode::Auto, threads)?;
            let phi = load_channel(channel)?;
            let (e, _) = load_space(fix)?;
            let (cert, body) = boundary_report(&e, &phi, &cfg)?;
            finish(cmd, cert, body, indent)
        }
    }
}

fn at_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { path: p, message } => Error::parse(format!("{}:{p}", path.display()), message),
        other => Error::parse(path.display().to_string(), other.to_string()),
    }
}

fn load_channel(path: &Path) -> Result<ChannelMap> {
    let json: ChannelJson = read_json(path)?;
    json.to_channel("").map_err(|e| at_file(path, e))
}

fn load_space(path: &Path) -> Result<(OperatorSubspace, SpaceMode)> {
    let json: OperatorSpaceJson = read_json(path)?;
    let space = json.to_space("").map_err(|e| at_file(path, e))?;
    Ok((space, json.mode))
}

fn basis_json(b: &SubspaceBasis) -> Vec<MatrixJson> {
    b.basis().iter().map(MatrixJson::from).collect()
}

// ---- semigroup ----

#[derive(Serialize)]
struct MinimalBelow {
    idempotent: usize,
    minimal: usize,
}

#[derive(Serialize)]
struct Analysis {
    order: usize,
    idempotents: Vec<usize>,
    /// Pairs `[e, f]` with `e ⪯ f`, `e ≠ f`.
    strictly_below: Vec<[usize; 2]>,
    minimal_idempotents: Vec<usize>,
    similarity_classes: Vec<Vec<usize>>,
    minimal_left_ideals: Vec<Vec<usize>>,
    minimal_below: Vec<MinimalBelow>,
    checks: BTreeMap<&'static str, CheckOutcome>,
}

fn all_checks(t: &CayleyTable) -> BTreeMap<&'static str, CheckOutcome> {
    BTreeMap::from([
        ("lemma1", check_idempotent_exists(t)),
        ("lemma2", check_minimal_below(t)),
        ("remark", check_similarity_below_minimal(t)),
        ("ideals", check_left_zero_in_minimal_ideals(t)),
    ])
}

fn analyze(t: &CayleyTable) -> Result<(Certificate, Analysis)> {
    let poset = idempotent_poset(t);
    let mut strictly_below = Vec::new();
    for &e in &poset.idempotents {
        for &f in &poset.idempotents {
            if e != f && poset.is_below(e, f) {
                strictly_below.push([e, f]);
            }
        }
    }
    let minimal_below = poset
        .idempotents
        .iter()
        .map(|&e| Ok(MinimalBelow { idempotent: e, minimal: minimal_idempotent_below(t, e)? }))
        .collect::<Result<_>>()?;
    let checks = all_checks(t);
    let cert = if checks.values().all(CheckOutcome::passed) { Certificate::Certified } else { Certificate::Failed };
    Ok((
        cert,
        Analysis {
            order: t.order(),
            minimal_idempotents: poset.minimal(),
            similarity_classes: poset.similarity_classes(),
            idempotents: poset.idempotents,
            strictly_below,
            minimal_left_ideals: minimal_left_ideals(t),
            minimal_below,
            checks,
        },
    ))
}

#[derive(Serialize, Default)]
struct CheckTally {
    tables: usize,
    instances: usize,
    failures: usize,
    first_failure: Option<String>,
}

#[derive(Serialize)]
struct Enumeration {
    order: usize,
    tables: usize,
    checks: BTreeMap<&'static str, CheckTally>,
}

fn enumerate(order: usize, which: &[SemigroupCheck]) -> Result<(Certificate, Enumeration)> {
    let selected = |name: &str| which.iter().any(|c| *c == SemigroupCheck::All || c.key() == name);
    let mut tallies: BTreeMap<&'static str, CheckTally> = BTreeMap::new();
    let mut tables = 0;
    for t in enumerate_semigroups(order)? {
        tables += 1;
        for (name, outcome) in all_checks(&t) {
            if !selected(name) {
                continue;
            }
            let tally = tallies.entry(name).or_default();
            tally.tables += 1;
            tally.instances += outcome.checked;
            if let Some(f) = outcome.failure {
                tally.failures += 1;
                tally.first_failure.get_or_insert_with(|| format!("table {:?}: {f}", t.rows()));
            }
        }
    }
    let cert = if tallies.values().all(|t| t.failures == 0) { Certificate::Certified } else { Certificate::Failed };
    Ok((cert, Enumeration { order, tables, checks: tallies }))
}

// ---- channel ----

#[derive(Serialize)]
struct ChannelInfo {
    dim_in: usize,
    dim_out: usize,
    choi_eigenvalues: Vec<f64>,
    flags: StructureFlags,
}

#[derive(Serialize)]
struct CesaroConfig {
    mode: CesaroMode,
    absorb: usize,
    tol: f64,
    report_tol: f64,
}

#[derive(Serialize)]
struct CesaroReport {
    config: CesaroConfig,
    result: ErgodicResult,
    /// `max_{k ≤ absorb} ‖eφᵏe − e‖`
    absorption: Option<f64>,
    idempotent_choi: MatrixJson,
    fixed_space_basis: Vec<MatrixJson>,
}

// ---- envelope ----

#[derive(Serialize)]
struct SpaceInfo {
    ambient: usize,
    dim: usize,
    declared_mode: SpaceMode,
    unital: bool,
    selfadjoint: bool,
}

fn space_info(e: &OperatorSubspace, declared: SpaceMode) -> SpaceInfo {
    SpaceInfo {
        ambient: e.ambient(),
        dim: e.dim(),
        declared_mode: declared,
        unital: e.is_unital(),
        selfadjoint: e.is_selfadjoint(),
    }
}

#[derive(Serialize)]
struct EnvelopeResiduals {
    inclusion: f64,
    fix: f64,
    idempotence: f64,
    choi_effros_associativity: f64,
    choi_effros_unit: f64,
}

#[derive(Serialize)]
struct LiftedReport {
    system_dim: usize,
    rank: usize,
    idempotent_choi: MatrixJson,
    corner_cb_norm: f64,
}

#[derive(Serialize)]
struct EnvelopeReport {
    config: RunConfig,
    input: SpaceInfo,
    mode_used: EnvelopeMode,
    rank: usize,
    rigidity_violation: f64,
    residuals: EnvelopeResiduals,
    probes: usize,
    failed_probes: usize,
    descent_trace: Vec<DescentStep>,
    idempotent_choi: MatrixJson,
    envelope_basis: Vec<MatrixJson>,
    choi_effros: ChoiEffros,
    #[serde(skip_serializing_if = "Option::is_none")]
    lifted: Option<LiftedReport>,
}

fn descent_config(cfg: &RunConfig) -> DescentConfig {
    DescentConfig {
        seed: cfg.seed,
        tol: cfg.tol,
        samples: cfg.samples,
        starts: cfg.starts,
        budget: cfg.budget,
        threads: cfg.threads,
    }
}

fn envelope_report(e: &OperatorSubspace, declared: SpaceMode, cfg: &RunConfig) -> Result<(Certificate, EnvelopeReport)> {
    let ecfg = EnvelopeConfig {
        mode: cfg.mode,
        descent: descent_config(cfg),
        projection_budget: cfg.projection_budget,
    };
    let r = compute_envelope(e, &ecfg)?;
    let body = EnvelopeReport {
        config: cfg.clone(),
        input: space_info(e, declared),
        mode_used: r.mode,
        rank: r.rank,
        rigidity_violation: r.rigidity_violation,
        residuals: EnvelopeResiduals {
            inclusion: r.inclusion_residual,
            fix: r.fix_residual,
            idempotence: r.idempotence_residual,
            choi_effros_associativity: r.choi_effros.associativity_residual,
            choi_effros_unit: r.choi_effros.unit_residual,
        },
        probes: r.probes,
        failed_probes: r.failed_probes,
        descent_trace: r.descent_trace,
        idempotent_choi: MatrixJson::from(r.idempotent.choi()),
        envelope_basis: basis_json(&r.envelope_space),
        choi_effros: r.choi_effros,
        lifted: r.lifted.map(|l| LiftedReport {
            system_dim: l.system.dim(),
            rank: l.rank,
            idempotent_choi: MatrixJson::from(l.idempotent.choi()),
            corner_cb_norm: l.corner_cb_norm,
        }),
    };
    Ok((r.certificate, body))
}

// ---- boundary ----

#[derive(Serialize)]
struct BoundaryReport {
    config: RunConfig,
    input: SpaceInfo,
    fixed_space_dim: usize,
    boundary_dim: usize,
    rigidity_violation: f64,
    residuals: BoundaryResiduals,
    choi_effros_associativity: f64,
    choi_effros_unit: f64,
    probes: usize,
    failed_probes: usize,
    descent_trace: Vec<DescentStep>,
    idempotent_choi: MatrixJson,
    fixed_space_basis: Vec<MatrixJson>,
    boundary_basis: Vec<MatrixJson>,
    choi_effros: ChoiEffros,
}

fn boundary_report(e: &OperatorSubspace, phi: &ChannelMap, cfg: &RunConfig) -> Result<(Certificate, BoundaryReport)> {
    let bcfg = BoundaryConfig {
        descent: descent_config(cfg),
        projection_budget: cfg.projection_budget,
        report_tol: cfg.report_tol,
    };
    let r = compute_boundary(e, phi, &bcfg)?;
    let declared = if e.is_system() { SpaceMode::System } else { SpaceMode::Space };
    let body = BoundaryReport {
        config: cfg.clone(),
        input: space_info(e, declared),
        fixed_space_dim: r.fixed_space.dim(),
        boundary_dim: r.boundary_space.dim(),
        rigidity_violation: r.rigidity_violation,
        choi_effros_associativity: r.choi_effros.associativity_residual,
        choi_effros_unit: r.choi_effros.unit_residual,
        residuals: r.residuals,
        probes: r.probes,
        failed_probes: r.failed_probes,
        descent_trace: r.descent_trace,
        idempotent_choi: MatrixJson::from(r.idempotent.choi()),
        fixed_space_basis: basis_json(&r.fixed_space),
        boundary_basis: basis_json(&r.boundary_space),
        choi_effros: r.choi_effros,
    };
    Ok((r.certificate, body))
}
