use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{cesaro_idempotent, compose, idempotent_rank, range_space, CesaroMode, ChannelMap};
use crate::error::{Error, Result};
use crate::feasible_set::{choi_functional, FeasibleSet, DEFAULT_STARTS};
use crate::matrix::{orthonormalize, MatrixC};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    /// Every probe satisfied `‖eθe − e‖ ≤ tol`.
    Certified,
    /// The probe budget ran out, or some probes could not be evaluated.
    Unverified,
    /// The returned map is not an idempotent member within tolerance.
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentConfig {
    pub seed: u64,
    pub tol: f64,
    /// Random members probed per round.
    pub samples: usize,
    /// Starts per linear ascent.
    pub starts: usize,
    /// Total probes (samples plus ascents) across all rounds.
    pub budget: usize,
    /// Worker threads for the probes of one round; results do not depend on it.
    pub threads: usize,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: tolerance::LIMIT,
            samples: 32,
            starts: DEFAULT_STARTS,
            budget: 200,
            threads: 1,
        }
    }
}

/// One probe round on the current idempotent of rank `rank`. `accepted` is
/// set when the Cesàro idempotent of `eθe` had strictly smaller rank
/// `candidate_rank` and replaced `e`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentStep {
    pub iteration: usize,
    pub rank: usize,
    pub violation: f64,
    pub candidate_rank: Option<usize>,
    pub accepted: bool,
    pub idempotence_residual: f64,
}

#[derive(Clone, Debug)]
pub struct Descent {
    pub idempotent: ChannelMap,
    pub rank: usize,
    pub certificate: Certificate,
    /// Largest `‖eθe − e‖` seen in the last round.
    pub violation: f64,
    pub trace: Vec<DescentStep>,
    pub probes: usize,
    pub failed_probes: usize,
}

/// Outcome of probing `sup_θ ‖L θ e − e‖` over members `θ`.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub violation: f64,
    pub witness: Option<ChannelMap>,
    pub probes: usize,
    pub failures: usize,
    /// Seeds consumed; the next round starts after them.
    pub seeds_used: u64,
}

enum Task {
    Sample(u64),
    Ascent(MatrixC, u64),
}

fn run_tasks<T: Send>(threads: usize, tasks: &[Task], f: impl Fn(&Task) -> T + Sync + Send) -> Vec<T> {
    if threads <= 1 {
        return tasks.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| tasks.par_iter().map(&f).collect()),
        Err(_) => tasks.iter().map(f).collect(),
    }
}

/// Probes `θ ↦ ‖L∘θ∘e − e‖` with random members, then with linear ascents
/// that push `⟨f, Lθf⟩` down along a Hermitian orthonormal basis `f` of
/// `range(e)`. Stops after the samples if they already exceed `tol`.
/// Probes are pure in their seed and merged in order, so the result does
/// not depend on the thread count; ties go to the earliest probe.
pub fn probe(
    set: &FeasibleSet,
    e: &ChannelMap,
    left: &ChannelMap,
    cfg: &DescentConfig,
    seed_base: u64,
) -> Result<ProbeReport> {
    let evaluate = |theta: &ChannelMap| -> Result<f64> {
        let lte = compose(left, &compose(theta, e)?)?;
        Ok(lte.distance(e))
    };
    let mut report = ProbeReport {
        violation: 0.0,
        witness: None,
        probes: 0,
        failures: 0,
        seeds_used: 0,
    };
    let absorb = |results: Vec<Result<(f64, ChannelMap)>>, report: &mut ProbeReport| {
        for r in results {
            report.probes += 1;
            match r {
                Ok((v, theta)) if v > report.violation || report.witness.is_none() => {
                    report.violation = v;
                    report.witness = Some(theta);
                }
                Ok(_) => {}
                Err(_) => report.failures += 1,
            }
        }
    };

    let samples: Vec<Task> = (0..cfg.samples as u64).map(|k| Task::Sample(seed_base.wrapping_add(k))).collect();
    report.seeds_used += cfg.samples as u64;
    let results = run_tasks(cfg.threads, &samples, |t| match t {
        Task::Sample(s) => {
            let theta = set.sample(*s)?;
            Ok((evaluate(&theta)?, theta))
        }
        Task::Ascent(..) => unreachable!(),
    });
    absorb(results, &mut report);
    if report.violation > cfg.tol {
        return Ok(report);
    }

    let range = range_space(e)?;
    let herm = orthonormalize(&range.hermitian_generators(), range.n())?;
    let adjoint = left.hs_adjoint();
    let mut ascents = Vec::with_capacity(herm.dim());
    for f in herm.basis() {
        let y = adjoint.apply(f)?;
        let c = choi_functional(f, &y).scale_real(-1.0);
        ascents.push(Task::Ascent(c, seed_base.wrapping_add(report.seeds_used)));
        report.seeds_used += cfg.starts as u64;
    }
    let results = run_tasks(cfg.threads, &ascents, |t| match t {
        Task::Ascent(c, s) => {
            let theta = set.maximize_linear(c, cfg.starts, *s)?.point;
            Ok((evaluate(&theta)?, theta))
        }
        Task::Sample(_) => unreachable!(),
    });
    absorb(results, &mut report);
    Ok(report)
}

fn seed_base(cfg: &DescentConfig) -> u64 {
    cfg.seed.wrapping_mul(1 << 32)
}

/// `sup ‖eθe − e‖` over a full probe round of members of `set`.
pub fn rigidity_check(e: &ChannelMap, set: &FeasibleSet, cfg: &DescentConfig) -> Result<f64> {
    let full = DescentConfig {
        tol: f64::INFINITY,
        ..cfg.clone()
    };
    Ok(probe(set, e, e, &full, seed_base(cfg))?.violation)
}

/// Rank descent from an idempotent member `e0`. A probe witness `θ` with
/// `eθe ≠ e` yields `f`, the Cesàro idempotent of `eθe`; then `f ⪯ e`, and
/// `f` replaces `e` only when its rank is strictly smaller.
pub fn descend_to_minimal(set: &FeasibleSet, e0: &ChannelMap, cfg: &DescentConfig) -> Result<Descent> {
    let start = set.membership(e0);
    let idem = e0.idempotence_residual();
    if !start.is_member(tolerance::LIMIT) || idem > tolerance::LIMIT {
        return Err(Error::domain(format!(
            "starting map must be an idempotent member (affine {:.3e}, λ_min {:.3e}, idempotence {idem:.3e})",
            start.max_affine(),
            start.lambda_min
        )));
    }
    let mut e = e0.clone();
    let mut rank = idempotent_rank(&e);
    let mut trace = Vec::new();
    let mut probes = 0;
    let mut failed = 0;
    let mut counter: u64 = 0;
    let base = seed_base(cfg);
    let mut iteration = 0;
    let (certificate, violation) = loop {
        if probes >= cfg.budget.max(1) {
            break (Certificate::Unverified, trace.last().map_or(f64::NAN, |s: &DescentStep| s.violation));
        }
        iteration += 1;
        let report = probe(set, &e, &e, cfg, base.wrapping_add(counter))?;
        counter += report.seeds_used;
        probes += report.probes;
        failed += report.failures;
        let mut step = DescentStep {
            iteration,
            rank,
            violation: report.violation,
            candidate_rank: None,
            accepted: false,
            idempotence_residual: e.idempotence_residual(),
        };
        let witness = match report.witness {
            Some(w) if report.violation > cfg.tol => w,
            _ => {
                trace.push(step);
                let cert = if report.failures == 0 && report.probes > 0 {
                    Certificate::Certified
                } else {
                    Certificate::Unverified
                };
                break (cert, report.violation);
            }
        };
        let ete = compose(&e, &compose(&witness, &e)?)?;
        let f = cesaro_idempotent(&ete, CesaroMode::Spectral)?.idempotent;
        let f_rank = idempotent_rank(&f);
        step.candidate_rank = Some(f_rank);
        if f_rank < rank && set.membership(&f).is_member(tolerance::LIMIT) {
            e = f;
            rank = f_rank;
            step.accepted = true;
        }
        trace.push(step);
    };
    let end = set.membership(&e);
    let certificate = if e.idempotence_residual() > tolerance::LIMIT || !end.is_member(tolerance::LIMIT) {
        Certificate::Failed
    } else {
        certificate
    };
    Ok(Descent {
        idempotent: e,
        rank,
        certificate,
        violation,
        trace,
        probes,
        failed_probes: failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::named;
    use crate::feasible_set::{build_system_set, OperatorSubspace};
    use crate::matrix::named::{sigma_x, sigma_z};
    use crate::matrix::subspace_equal;

    fn quick() -> DescentConfig {
        DescentConfig {
            samples: 8,
            starts: 2,
            budget: 60,
            ..DescentConfig::default()
        }
    }

    #[test]
    fn full_algebra_stops_at_identity() {
        let s = build_system_set(&OperatorSubspace::full(2)).unwrap();
        let d = descend_to_minimal(&s, &named::identity(2), &quick()).unwrap();
        assert_eq!(d.certificate, Certificate::Certified);
        assert!(d.violation < 1e-9);
        assert_eq!(d.rank, 4);
    }

    #[test]
    fn diagonal_descends_to_rank_two() {
        let s = build_system_set(&OperatorSubspace::diagonal(2)).unwrap();
        let d = descend_to_minimal(&s, &named::identity(2), &quick()).unwrap();
        assert_eq!(d.certificate, Certificate::Certified);
        assert_eq!(d.rank, 2);
        let (same, _) = subspace_equal(&range_space(&d.idempotent).unwrap(), OperatorSubspace::diagonal(2).basis(), 1e-8).unwrap();
        assert!(same);
        assert!(d.trace.iter().any(|s| s.accepted));
    }

    #[test]
    fn pinching_is_rigid_over_diagonal_set() {
        let s = build_system_set(&OperatorSubspace::diagonal(2)).unwrap();
        assert!(rigidity_check(&named::pinching(2), &s, &quick()).unwrap() < 1e-7);
        // the identity is not minimal there
        assert!(rigidity_check(&named::identity(2), &s, &quick()).unwrap() > 1e-3);
    }

    #[test]
    fn pauli_system_is_rigid() {
        let e = OperatorSubspace::from_matrices(2, &[MatrixC::identity(2), sigma_x(), sigma_z()]).unwrap();
        let s = build_system_set(&e).unwrap();
        let d = descend_to_minimal(&s, &named::identity(2), &quick()).unwrap();
        assert_eq!(d.certificate, Certificate::Certified);
        assert!(d.idempotent.distance(&named::identity(2)) < 1e-7);
    }

    #[test]
    fn thread_count_does_not_change_the_result() {
        let s = build_system_set(&OperatorSubspace::diagonal(2)).unwrap();
        let one = descend_to_minimal(&s, &named::identity(2), &quick()).unwrap();
        let cfg = DescentConfig { threads: 3, ..quick() };
        let three = descend_to_minimal(&s, &named::identity(2), &cfg).unwrap();
        assert_eq!(one.trace, three.trace);
        assert_eq!(one.idempotent, three.idempotent);
    }

    #[test]
    fn non_member_start_is_rejected() {
        let s = build_system_set(&OperatorSubspace::diagonal(2)).unwrap();
        let swap = named::conjugation(&sigma_x());
        assert!(descend_to_minimal(&s, &swap, &quick()).is_err());
    }

    #[test]
    fn exhausted_budget_is_unverified() {
        let s = build_system_set(&OperatorSubspace::diagonal(2)).unwrap();
        let cfg = DescentConfig { budget: 1, samples: 1, ..quick() };
        // one round happens, finds the identity non-minimal, then stops
        let d = descend_to_minimal(&s, &named::identity(2), &cfg).unwrap();
        assert_eq!(d.certificate, Certificate::Unverified);
        assert_eq!(d.trace.len(), 1);
    }
}
