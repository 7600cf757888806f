//! Fixed points of a unital channel `φ` and minimal idempotents of
//! `𝒯_{E,φ} = {UCP θ : φ∘θ = θ, θ|_E = id}`.
//!
//! In finite dimensions every channel is normal, so no hypothesis on `φ`
//! beyond unital complete positivity is imposed. No bidual construction is
//! attempted: everything lives in `M_n`.

use serde::Serialize;

use crate::channel::{
    cesaro_idempotent, check_absorption, compose, fixed_space, range_space, require_ucp, CesaroMode, ChannelMap,
};
use crate::envelope::{
    choi_effros_table, descend_to_minimal, probe, Certificate, ChoiEffros, DescentConfig, DescentStep,
};
use crate::error::{Error, Result};
use crate::feasible_set::{Constraint, FeasibleSet, Membership, OperatorSubspace, PROJECTION_BUDGET};
use crate::matrix::SubspaceBasis;
use crate::tolerance;

/// Powers of `φ` checked in `e∘φᵏ∘e = e`.
pub const ABSORPTION_POWERS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConfig {
    pub descent: DescentConfig,
    pub projection_budget: usize,
    /// Largest rigidity violation still reported as certified.
    pub report_tol: f64,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            descent: DescentConfig::default(),
            projection_budget: PROJECTION_BUDGET,
            report_tol: tolerance::REPORT,
        }
    }
}

fn fixing_constraints(e: &OperatorSubspace) -> Vec<Constraint> {
    let mut c: Vec<Constraint> = e.basis().hermitian_generators().into_iter().map(Constraint::FixPoint).collect();
    c.push(Constraint::Unital);
    c
}

fn check_inputs(e: &OperatorSubspace, phi: &ChannelMap) -> Result<()> {
    require_ucp(phi, "the boundary channel")?;
    if phi.dim_in() != e.ambient() {
        return Err(Error::dim(format!(
            "channel acts on M_{} but E lives in M_{}",
            phi.dim_in(),
            e.ambient()
        )));
    }
    for (k, x) in e.basis().basis().iter().enumerate() {
        let r = phi.apply(x)?.distance(x);
        if r > tolerance::LIMIT {
            return Err(Error::domain(format!(
                "E is not inside the fixed points of φ: basis element {k} moves by {r:.3e}"
            )));
        }
    }
    Ok(())
}

/// `𝒯_{E,φ}`, witnessed nonempty by the Cesàro idempotent of `φ`.
pub fn build_t_set(e: &OperatorSubspace, phi: &ChannelMap) -> Result<FeasibleSet> {
    check_inputs(e, phi)?;
    let p = cesaro_idempotent(phi, CesaroMode::Spectral)?.idempotent;
    let mut constraints = fixing_constraints(e);
    constraints.push(Constraint::AbsorbLeft(phi.clone()));
    FeasibleSet::new(e.ambient(), constraints, p)
}

/// `θ'' = P_φ∘θ'` with `P_φ` the Cesàro idempotent of `φ`; then `φ∘θ'' = θ''`.
pub fn tau_absorb(theta: &ChannelMap, phi: &ChannelMap) -> Result<ChannelMap> {
    let p = cesaro_idempotent(phi, CesaroMode::Spectral)?.idempotent;
    compose(&p, theta)
}

#[derive(Clone, Debug)]
pub struct BoundaryResult {
    pub channel: ChannelMap,
    pub space: OperatorSubspace,
    pub fixed_space: SubspaceBasis,
    pub idempotent: ChannelMap,
    pub boundary_space: SubspaceBasis,
    pub choi_effros: ChoiEffros,
    /// `sup ‖e∘P_φ∘θ'∘e − e‖` over probes `θ'` that only fix `E`.
    pub rigidity_violation: f64,
    pub certificate: Certificate,
    pub residuals: BoundaryResiduals,
    pub descent_trace: Vec<DescentStep>,
    pub probes: usize,
    pub failed_probes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryResiduals {
    pub membership: Membership,
    /// `max dist(f, F_φ)` over a basis `f` of `range(e)`.
    pub range_excess: f64,
    /// `‖φ∘e − e‖`
    pub absorb: f64,
    /// `max_{k ≤ 20} ‖e∘φᵏ∘e − e‖`
    pub powers: f64,
    /// `max dist(x, F_φ)` over the basis of `E`.
    pub space_excess: f64,
    pub idempotence: f64,
}

pub fn compute_boundary(e: &OperatorSubspace, phi: &ChannelMap, cfg: &BoundaryConfig) -> Result<BoundaryResult> {
    let set = build_t_set(e, phi)?.with_projection_budget(cfg.projection_budget);
    let fixed = fixed_space(phi)?;
    let p = set.reference().clone();
    let descent = descend_to_minimal(&set, &p, &cfg.descent)?;
    let idem = descent.idempotent.clone();
    let boundary_space = range_space(&idem)?;
    let choi_effros = choi_effros_table(&idem, &boundary_space)?;

    // raw probes only fix E; each is absorbed through P_φ before testing
    let raw = FeasibleSet::new(e.ambient(), fixing_constraints(e), ChannelMap::identity(e.ambient()))?
        .with_projection_budget(cfg.projection_budget);
    let left = compose(&idem, &p)?;
    let full = DescentConfig {
        tol: f64::INFINITY,
        ..cfg.descent.clone()
    };
    let rigidity_base = cfg.descent.seed.wrapping_mul(1 << 32).wrapping_add(1 << 31);
    let rigidity = probe(&raw, &idem, &left, &full, rigidity_base)?;

    let residuals = BoundaryResiduals {
        membership: set.membership(&idem),
        range_excess: boundary_space.excess_over(&fixed),
        absorb: compose(phi, &idem)?.distance(&idem),
        powers: check_absorption(&idem, phi, ABSORPTION_POWERS)?,
        space_excess: e.basis().excess_over(&fixed),
        idempotence: idem.idempotence_residual(),
    };
    let mut certificate = descent.certificate;
    if certificate == Certificate::Certified && (rigidity.failures > 0 || rigidity.violation > cfg.report_tol) {
        certificate = Certificate::Unverified;
    }
    if !residuals.membership.is_member(tolerance::LIMIT) || residuals.idempotence > tolerance::LIMIT || !choi_effros.consistent {
        certificate = Certificate::Failed;
    }
    Ok(BoundaryResult {
        channel: phi.clone(),
        space: e.clone(),
        fixed_space: fixed,
        idempotent: idem,
        boundary_space,
        choi_effros,
        rigidity_violation: rigidity.violation,
        certificate,
        residuals,
        descent_trace: descent.trace,
        probes: descent.probes + rigidity.probes,
        failed_probes: descent.failed_probes + rigidity.failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::named;
    use crate::matrix::named::{cyclic_shift, sigma_z};
    use crate::matrix::{subspace_equal, MatrixC};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quick() -> BoundaryConfig {
        BoundaryConfig {
            descent: DescentConfig {
                samples: 8,
                starts: 2,
                budget: 80,
                ..DescentConfig::default()
            },
            ..BoundaryConfig::default()
        }
    }

    /// Solve `[x, u] = 0` directly.
    fn commutant(u: &MatrixC) -> SubspaceBasis {
        let n = u.rows();
        let comm = ChannelMap::from_fn(n, n, |x| &(x * u) - &(u * x)).unwrap();
        let null = crate::matrix::svd(comm.superop()).null_space(1e-9);
        SubspaceBasis::from_vectors(n, &null).unwrap()
    }

    #[test]
    fn identity_channel_on_full_algebra() {
        let r = compute_boundary(&OperatorSubspace::full(2), &named::identity(2), &quick()).unwrap();
        assert_eq!(r.boundary_space.dim(), 4);
        assert!(r.idempotent.distance(&named::identity(2)) < 1e-8);
    }

    #[test]
    fn sign_conjugation() {
        let u = MatrixC::diag_real(&[1.0, -1.0]);
        let phi = named::conjugation(&u);
        let r = compute_boundary(&OperatorSubspace::scalars(2), &phi, &quick()).unwrap();
        assert!(subspace_equal(&r.fixed_space, &commutant(&u), 1e-8).unwrap().0);
        assert_eq!(r.fixed_space.dim(), 2);
        // pinching is not minimal: x ↦ ω(x)·I lies below it
        assert_eq!(r.boundary_space.dim(), 1);
        assert!(r.residuals.range_excess < 1e-8);
        assert!(r.residuals.membership.is_member(1e-8));
        assert!(r.rigidity_violation <= 1e-6, "{}", r.rigidity_violation);
        assert_eq!(r.certificate, Certificate::Certified);
        assert!(r.choi_effros.associativity_residual < 1e-8);
    }

    #[test]
    fn lazy_shift_fixes_circulants() {
        let s = cyclic_shift(3);
        let phi = named::lazy_conjugation(&s);
        let r = compute_boundary(&OperatorSubspace::scalars(3), &phi, &quick()).unwrap();
        assert!(subspace_equal(&r.fixed_space, &commutant(&s), 1e-8).unwrap().0);
        assert_eq!(r.fixed_space.dim(), 3);
        assert_eq!(r.boundary_space.dim(), 1);
        assert!(r.residuals.powers < 1e-7);
        assert!(r.rigidity_violation <= 1e-6);
    }

    #[test]
    fn t_set_contents() {
        let pinch = named::pinching(2);
        let t = build_t_set(&OperatorSubspace::scalars(2), &pinch).unwrap();
        assert!(t.membership(&pinch).is_member(1e-10));
        let phi = named::lazy_conjugation(&sigma_z());
        let t = build_t_set(&OperatorSubspace::scalars(2), &phi).unwrap();
        assert!(t.membership(&pinch).is_member(1e-8));
        assert!(!t.membership(&named::identity(2)).is_member(1e-6));
    }

    #[test]
    fn space_outside_fixed_points_is_rejected() {
        let phi = named::conjugation(&sigma_z());
        let err = build_t_set(&OperatorSubspace::full(2), &phi).unwrap_err();
        assert!(err.to_string().contains("basis element"));
    }

    #[test]
    fn absorption_of_probes() {
        let phi = named::lazy_conjugation(&sigma_z());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let theta = crate::channel::random_unital_channel(2, 3, &mut rng);
        let absorbed = tau_absorb(&theta, &phi).unwrap();
        assert!(compose(&phi, &absorbed).unwrap().distance(&absorbed) <= 1e-8);
        assert!(tau_absorb(&theta, &named::identity(2)).unwrap().distance(&theta) < 1e-10);
        let p = cesaro_idempotent(&phi, CesaroMode::Spectral).unwrap().idempotent;
        assert!(tau_absorb(&named::identity(2), &phi).unwrap().distance(&p) < 1e-12);
    }
}
