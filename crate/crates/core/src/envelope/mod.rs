//! Injective envelopes as ranges of minimal idempotents.
//!
//! For an operator system `E ⊆ M_n` the search runs over
//! `𝒮 = {UCP θ : θ|_E = id}`: a Cesàro idempotent of a random member is
//! pushed down by rank descent until no probe finds `eθe ≠ e`. Operator
//! spaces go through the Paulsen system in `M_{2n}` and the envelope is read
//! off the upper corner. The inclusion `E → range(e)` is a set inclusion.

mod choi_effros;
mod descent;
mod paulsen;

pub use choi_effros::{choi_effros_table, ChoiEffros, CONSISTENCY_LIMIT};
pub use descent::{descend_to_minimal, probe, rigidity_check, Certificate, Descent, DescentConfig, DescentStep, ProbeReport};
pub use paulsen::{corner_extract, diagonal_corners, embed_corner, lift_map, paulsen_lift};

use serde::{Deserialize, Serialize};

use crate::channel::{cesaro_idempotent, range_space, CesaroMode, ChannelMap};
use crate::error::{Error, Result};
use crate::feasible_set::{build_system_set, cb_norm, OperatorSubspace, PROJECTION_BUDGET};
use crate::matrix::SubspaceBasis;
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeMode {
    /// System when unital and self-adjoint, space otherwise.
    Auto,
    System,
    Space,
}

impl std::str::FromStr for EnvelopeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "system" => Ok(Self::System),
            "space" => Ok(Self::Space),
            other => Err(Error::parse("--mode", format!("expected auto|system|space, found {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    pub mode: EnvelopeMode,
    pub descent: DescentConfig,
    /// Dykstra iteration cap per projection.
    pub projection_budget: usize,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        Self {
            mode: EnvelopeMode::Auto,
            descent: DescentConfig::default(),
            projection_budget: PROJECTION_BUDGET,
        }
    }
}

/// Data of the Paulsen system search behind an operator-space envelope.
#[derive(Clone, Debug)]
pub struct LiftedEnvelope {
    pub system: OperatorSubspace,
    pub idempotent: ChannelMap,
    pub rank: usize,
    /// Upper bound on `‖corner map‖_cb`.
    pub corner_cb_norm: f64,
}

#[derive(Clone, Debug)]
pub struct EnvelopeResult {
    /// Mode actually used (never `Auto`).
    pub mode: EnvelopeMode,
    pub space: OperatorSubspace,
    /// Minimal idempotent on `M_n`; in space mode, the corner of the lifted one.
    pub idempotent: ChannelMap,
    pub envelope_space: SubspaceBasis,
    pub rank: usize,
    /// `max_x dist(x, F)` over the basis of `E`.
    pub inclusion_residual: f64,
    /// `max_x ‖e(x) − x‖` over the basis of `E`.
    pub fix_residual: f64,
    pub idempotence_residual: f64,
    pub rigidity_violation: f64,
    pub certificate: Certificate,
    pub descent_trace: Vec<DescentStep>,
    pub probes: usize,
    pub failed_probes: usize,
    /// Product on the range of the UCP idempotent that was searched for.
    pub choi_effros: ChoiEffros,
    pub lifted: Option<LiftedEnvelope>,
}

struct SystemRun {
    descent: Descent,
    range: SubspaceBasis,
    choi_effros: ChoiEffros,
}

fn run_system(e: &OperatorSubspace, cfg: &EnvelopeConfig) -> Result<SystemRun> {
    let set = build_system_set(e)?.with_projection_budget(cfg.projection_budget);
    let start = set.sample(cfg.descent.seed)?;
    let e0 = cesaro_idempotent(&start, CesaroMode::Spectral)?.idempotent;
    let descent = descend_to_minimal(&set, &e0, &cfg.descent)?;
    let range = range_space(&descent.idempotent)?;
    let choi_effros = choi_effros_table(&descent.idempotent, &range)?;
    Ok(SystemRun {
        descent,
        range,
        choi_effros,
    })
}

fn fix_residual(e: &ChannelMap, space: &OperatorSubspace) -> Result<f64> {
    space
        .basis()
        .basis()
        .iter()
        .map(|x| Ok(e.apply(x)?.distance(x)))
        .try_fold(0.0f64, |acc, r: Result<f64>| Ok(acc.max(r?)))
}

pub fn compute_envelope(space: &OperatorSubspace, cfg: &EnvelopeConfig) -> Result<EnvelopeResult> {
    let mode = match cfg.mode {
        EnvelopeMode::Auto if space.is_system() => EnvelopeMode::System,
        EnvelopeMode::Auto => EnvelopeMode::Space,
        m => m,
    };
    let (idempotent, run, lifted) = if mode == EnvelopeMode::System {
        let run = run_system(space, cfg)?;
        (run.descent.idempotent.clone(), run, None)
    } else {
        let system = paulsen_lift(space);
        let run = run_system(&system, cfg)?;
        let corner = corner_extract(&run.descent.idempotent, tolerance::LIMIT)?;
        let cb = cb_norm(&corner, 1e-4).upper;
        let lifted = LiftedEnvelope {
            system,
            idempotent: run.descent.idempotent.clone(),
            rank: run.descent.rank,
            corner_cb_norm: cb,
        };
        (corner, run, Some(lifted))
    };
    let envelope_space = match &lifted {
        None => run.range.clone(),
        Some(_) => range_space(&idempotent)?,
    };
    let inclusion_residual = space
        .basis()
        .basis()
        .iter()
        .map(|x| envelope_space.distance_to(x))
        .fold(0.0, f64::max);
    let fix = fix_residual(&idempotent, space)?;
    let idem = idempotent.idempotence_residual();
    let mut certificate = run.descent.certificate;
    if idem > tolerance::LIMIT || fix > tolerance::LIMIT || !run.choi_effros.consistent {
        certificate = Certificate::Failed;
    }
    Ok(EnvelopeResult {
        mode,
        space: space.clone(),
        rank: envelope_space.dim(),
        envelope_space,
        inclusion_residual,
        fix_residual: fix,
        idempotence_residual: idem,
        rigidity_violation: run.descent.violation,
        certificate,
        descent_trace: run.descent.trace,
        probes: run.descent.probes,
        failed_probes: run.descent.failed_probes,
        choi_effros: run.choi_effros,
        idempotent,
        lifted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::named;
    use crate::matrix::{subspace_equal, MatrixC};

    fn quick(seed: u64) -> EnvelopeConfig {
        EnvelopeConfig {
            descent: DescentConfig {
                seed,
                samples: 8,
                starts: 2,
                budget: 80,
                ..DescentConfig::default()
            },
            ..EnvelopeConfig::default()
        }
    }

    #[test]
    fn full_algebra_is_its_own_envelope() {
        let r = compute_envelope(&OperatorSubspace::full(2), &quick(0)).unwrap();
        assert_eq!(r.rank, 4);
        assert!(r.idempotent.distance(&named::identity(2)) < 1e-8);
        assert_eq!(r.certificate, Certificate::Certified);
    }

    #[test]
    fn diagonal_envelope() {
        let d3 = OperatorSubspace::diagonal(3);
        let r = compute_envelope(&d3, &quick(1)).unwrap();
        assert_eq!(r.rank, 3);
        assert!(subspace_equal(&r.envelope_space, d3.basis(), 1e-6).unwrap().0);
        assert_eq!(r.certificate, Certificate::Certified);
        assert!(r.choi_effros.associativity_residual < 1e-8);
    }

    #[test]
    fn corner_envelope_of_a_matrix_unit() {
        let e = OperatorSubspace::from_matrices(2, &[MatrixC::unit(2, 0, 1)]).unwrap();
        let r = compute_envelope(&e, &quick(2)).unwrap();
        assert_eq!(r.mode, EnvelopeMode::Space);
        assert_eq!(r.rank, 1);
        let lifted = r.lifted.as_ref().unwrap();
        assert_eq!(lifted.system.dim(), 4);
        assert!(lifted.corner_cb_norm <= 1.0 + 1e-3);
        assert!(r.inclusion_residual < 1e-8);
    }

    #[test]
    fn system_mode_rejects_non_system() {
        let e = OperatorSubspace::from_matrices(2, &[MatrixC::unit(2, 0, 1)]).unwrap();
        let cfg = EnvelopeConfig {
            mode: EnvelopeMode::System,
            ..quick(0)
        };
        assert!(compute_envelope(&e, &cfg).unwrap_err().to_string().contains("Paulsen"));
    }
}
