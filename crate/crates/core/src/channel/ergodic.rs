//! Fixed-point spaces and the ergodic projection `lim τ_N`, `τ_N = (1/N) Σ_{k=1}^N φᵏ`.

use serde::Serialize;

use super::{compose, ChannelMap};
use crate::error::{Error, Result};
use crate::matrix::{inverse, svd, MatrixC, SubspaceBasis};
use crate::tolerance;

const MAX_DOUBLINGS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CesaroMode {
    Spectral,
    Iterative,
    Both,
}

impl std::str::FromStr for CesaroMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Self::Spectral),
            "iterative" => Ok(Self::Iterative),
            "both" => Ok(Self::Both),
            _ => Err(Error::domain(format!("unknown Cesàro mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgodicResiduals {
    /// `‖e∘e − e‖`
    pub idempotence: f64,
    /// `‖e∘φ − e‖`
    pub right_absorption: f64,
    /// `‖φ∘e − e‖`
    pub left_absorption: f64,
}

impl ErgodicResiduals {
    pub fn max(&self) -> f64 {
        self.idempotence.max(self.right_absorption).max(self.left_absorption)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgodicResult {
    #[serde(skip)]
    pub idempotent: ChannelMap,
    #[serde(skip)]
    pub fixed_space: SubspaceBasis,
    pub fixed_space_dim: usize,
    pub residuals: ErgodicResiduals,
    /// `subspace_equal` distance between `range(e)` and `F_φ`.
    pub range_distance: f64,
    pub method: CesaroMode,
    /// Squarings performed by the iterative mode (`N = 2^iterations`).
    pub iterations: Option<usize>,
    pub history: Vec<f64>,
    /// `‖e_spectral − e_iterative‖` when both modes ran.
    pub cross_check: Option<f64>,
    /// `‖τ_N − e‖` at the final `N` of the iterative mode.
    pub cesaro_mean_gap: Option<f64>,
}

impl ErgodicResult {
    pub fn within(&self, tol: f64) -> bool {
        self.residuals.max() <= tol && self.range_distance <= tol
    }
}

pub(crate) fn require_ucp(phi: &ChannelMap, what: &str) -> Result<()> {
    if !phi.is_square() {
        return Err(Error::domain(format!("{what} needs a map M_n → M_n")));
    }
    let u = phi.unital_residual();
    if u > tolerance::REPORT {
        return Err(Error::domain(format!("{what} needs a unital map: ‖φ(I) − I‖_F = {u:.3e}")));
    }
    let scale = phi.choi().frobenius_norm().max(1.0);
    let l = phi.choi_lambda_min();
    if !(l >= -tolerance::REPORT * scale) || phi.choi().hermiticity_defect() > tolerance::REPORT * scale {
        return Err(Error::domain(format!("{what} needs a CP map: λ_min(Choi) = {l:.3e}")));
    }
    Ok(())
}

fn columns(vectors: &[Vec<crate::matrix::C64>], rows: usize) -> MatrixC {
    MatrixC::from_columns(rows, vectors)
}

/// `F_φ = ker(Φ̂ − I)`; singular values below `1e-9·‖Φ̂‖` count as zero.
pub fn fixed_space(phi: &ChannelMap) -> Result<SubspaceBasis> {
    require_ucp(phi, "fixed_space")?;
    let n = phi.dim_in();
    let d = n * n;
    let a = phi.superop() - &MatrixC::identity(d);
    let threshold = tolerance::KERNEL * phi.superop().op_norm().max(1.0);
    let kernel = svd(&a).null_space(threshold);
    SubspaceBasis::from_vectors(n, &kernel)
}

/// Number of superoperator singular values above `1e-7`.
pub fn idempotent_rank(e: &ChannelMap) -> usize {
    svd(e.superop()).rank(tolerance::RANK)
}

/// `range(e)` from the left singular vectors above `1e-7`.
pub fn range_space(e: &ChannelMap) -> Result<SubspaceBasis> {
    SubspaceBasis::from_vectors(e.dim_out(), &svd(e.superop()).range(tolerance::RANK))
}

/// Projection onto `ker(T − I)` along `ran(T − I)`: `P = K (L*K)⁻¹ L*` with
/// `K`, `L` orthonormal bases of `ker(T − I)` and `ker((T − I)*)`.
fn spectral_projection(phi: &ChannelMap) -> Result<MatrixC> {
    let d = phi.dim_in() * phi.dim_in();
    let a = phi.superop() - &MatrixC::identity(d);
    let threshold = tolerance::KERNEL * phi.superop().op_norm().max(1.0);
    let right = svd(&a).null_space(threshold);
    let left = svd(&a.adjoint()).null_space(threshold);
    if right.len() != left.len() {
        return Err(Error::domain(format!(
            "eigenvalue 1 has unequal left/right kernel dimensions ({} vs {})",
            right.len(),
            left.len()
        )));
    }
    if right.is_empty() {
        return Ok(MatrixC::zeros(d, d));
    }
    let k = columns(&right, d);
    let l = columns(&left, d);
    let m = &l.adjoint() * &k;
    let m_inv = inverse(&m).map_err(|_| Error::domain("eigenvalue 1 is not semisimple (L*K singular)"))?;
    Ok(&(&k * &m_inv) * &l.adjoint())
}

/// Limit of powers of the lazy map `L = ½(id + φ)` by repeated squaring.
///
/// `L` has the same fixed space as `φ` and `ran(L − id) = ran(φ − id)`, so
/// its limit is the same ergodic projection; every other eigenvalue of `L`
/// lies strictly inside the unit disc, peripheral ones of `φ` included.
/// The Cesàro means `τ_{2N} = ½(τ_N + φᴺ τ_N)` are carried along for the
/// `cesaro_mean_gap` diagnostic.
fn iterative_projection(phi: &ChannelMap) -> Result<(MatrixC, usize, Vec<f64>, f64)> {
    let d = phi.dim_in() * phi.dim_in();
    let t = phi.superop();
    let mut lazy = MatrixC::identity(d);
    lazy.axpy(crate::matrix::ONE, t);
    let mut lazy = lazy.scale_real(0.5);
    let mut tau = t.clone();
    let mut t_pow = t.clone();
    let mut history = Vec::new();
    for k in 1..=MAX_DOUBLINGS {
        let next = &lazy * &lazy;
        let diff = next.distance(&lazy);
        history.push(diff);
        lazy = next;
        tau = (&tau + &(&t_pow * &tau)).scale_real(0.5);
        t_pow = &t_pow * &t_pow;
        if diff <= tolerance::ALGEBRAIC {
            let gap = tau.distance(&lazy);
            return Ok((lazy, k, history, gap));
        }
    }
    Err(Error::NonConvergence {
        method: "cesaro (iterative)",
        iterations: MAX_DOUBLINGS,
        residual: *history.last().unwrap_or(&f64::INFINITY),
        history,
    })
}

pub fn cesaro_idempotent(phi: &ChannelMap, mode: CesaroMode) -> Result<ErgodicResult> {
    require_ucp(phi, "cesaro_idempotent")?;
    let n = phi.dim_in();
    let (superop, iterations, history, cross_check, gap) = match mode {
        CesaroMode::Spectral => (spectral_projection(phi)?, None, Vec::new(), None, None),
        CesaroMode::Iterative => {
            let (p, k, h, gap) = iterative_projection(phi)?;
            (p, Some(k), h, None, Some(gap))
        }
        CesaroMode::Both => {
            let s = spectral_projection(phi)?;
            let (p, k, h, gap) = iterative_projection(phi)?;
            let cross = s.distance(&p);
            if cross > tolerance::RANK {
                return Err(Error::NonConvergence {
                    method: "cesaro (spectral vs iterative)",
                    iterations: k,
                    residual: cross,
                    history: h,
                });
            }
            (s, Some(k), h, Some(cross), Some(gap))
        }
    };
    let e = ChannelMap::from_superop(n, n, superop)?;
    let residuals = ErgodicResiduals {
        idempotence: e.idempotence_residual(),
        right_absorption: compose(&e, phi)?.distance(&e),
        left_absorption: compose(phi, &e)?.distance(&e),
    };
    let fixed = fixed_space(phi)?;
    let (_, range_distance) = crate::matrix::subspace_equal(&range_space(&e)?, &fixed, tolerance::LIMIT)?;
    Ok(ErgodicResult {
        idempotent: e,
        fixed_space_dim: fixed.dim(),
        fixed_space: fixed,
        residuals,
        range_distance,
        method: mode,
        iterations,
        history,
        cross_check,
        cesaro_mean_gap: gap,
    })
}

/// `max_{1≤k≤k_max} ‖e∘φᵏ∘e − e‖`.
pub fn check_absorption(e: &ChannelMap, phi: &ChannelMap, k_max: usize) -> Result<f64> {
    let pre = [
        ("‖e∘e − e‖", e.idempotence_residual()),
        ("‖e∘φ − e‖", compose(e, phi)?.distance(e)),
        ("‖φ∘e − e‖", compose(phi, e)?.distance(e)),
    ];
    for (name, r) in pre {
        if !(r <= tolerance::RANK) {
            return Err(Error::domain(format!("e is not the ergodic projection of φ: {name} = {r:.3e}")));
        }
    }
    let e_hat = e.superop();
    let mut phi_k = phi.superop().clone();
    let mut worst: f64 = 0.0;
    for k in 1..=k_max {
        if k > 1 {
            phi_k = phi.superop() * &phi_k;
        }
        let r = (&(e_hat * &phi_k) * e_hat).distance(e_hat);
        worst = worst.max(r);
    }
    Ok(worst)
}
