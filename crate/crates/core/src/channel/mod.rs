//! Linear maps `φ: M_n → M_m` held in two synchronized forms.
//!
//! Conventions (row-major throughout):
//! * `vec(X)[i·n + j] = X_ij`
//! * superoperator `Φ̂[a·m + b, i·n + j] = φ(E_ij)_ab`, so `vec(φ(X)) = Φ̂ vec(X)`
//! * Choi matrix `J = Σ_ij E_ij ⊗ φ(E_ij)`, so `J[i·m + a, j·m + b] = φ(E_ij)_ab`
//! * `compose(f, g)` is `f ∘ g` and has superoperator `F̂ Ĝ`.

mod ergodic;
mod json;
pub mod named;
mod structure;

pub use ergodic::{
    cesaro_idempotent, check_absorption, fixed_space, idempotent_rank, range_space, CesaroMode, ErgodicResult,
    ErgodicResiduals,
};
pub(crate) use ergodic::require_ucp;
pub use json::ChannelJson;
pub use structure::{check_structure, StructureFlags};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, MatrixC, C64};
use crate::tolerance;

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMap {
    dim_in: usize,
    dim_out: usize,
    choi: MatrixC,
    superop: MatrixC,
}

/// `J ↔ Φ̂` reshuffle; `J[i·m + a, j·m + b] = Φ̂[a·m + b, i·n + j]`.
pub(crate) fn choi_to_superop(n: usize, m: usize, choi: &MatrixC) -> MatrixC {
    MatrixC::from_fn(m * m, n * n, |r, c| {
        let (a, b) = (r / m, r % m);
        let (i, j) = (c / n, c % n);
        choi[(i * m + a, j * m + b)]
    })
}

pub(crate) fn superop_to_choi(n: usize, m: usize, superop: &MatrixC) -> MatrixC {
    MatrixC::from_fn(n * m, n * m, |r, c| {
        let (i, a) = (r / m, r % m);
        let (j, b) = (c / m, c % m);
        superop[(a * m + b, i * n + j)]
    })
}

impl ChannelMap {
    pub fn from_choi(dim_in: usize, dim_out: usize, choi: MatrixC) -> Result<Self> {
        let side = dim_in * dim_out;
        if choi.shape() != (side, side) {
            return Err(Error::dim(format!(
                "Choi matrix of a map M_{dim_in} → M_{dim_out} must be {side}x{side}, found {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        let superop = choi_to_superop(dim_in, dim_out, &choi);
        Ok(Self {
            dim_in,
            dim_out,
            choi,
            superop,
        })
    }

    pub fn from_superop(dim_in: usize, dim_out: usize, superop: MatrixC) -> Result<Self> {
        if superop.shape() != (dim_out * dim_out, dim_in * dim_in) {
            return Err(Error::dim(format!(
                "superoperator of a map M_{dim_in} → M_{dim_out} must be {}x{}, found {}x{}",
                dim_out * dim_out,
                dim_in * dim_in,
                superop.rows(),
                superop.cols()
            )));
        }
        let choi = superop_to_choi(dim_in, dim_out, &superop);
        Ok(Self {
            dim_in,
            dim_out,
            choi,
            superop,
        })
    }

    /// `x ↦ Σ K x K*`. All operators must share one `m x n` shape.
    pub fn from_kraus(kraus: &[MatrixC]) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::domain("at least one Kraus operator is required"))?;
        let (m, n) = first.shape();
        let mut superop = MatrixC::zeros(m * m, n * n);
        for (k, op) in kraus.iter().enumerate() {
            if op.shape() != (m, n) {
                return Err(Error::dim(format!(
                    "Kraus operator {k} is {}x{}, expected {m}x{n}",
                    op.rows(),
                    op.cols()
                )));
            }
            superop.axpy(C64::new(1.0, 0.0), &op.kron(&op.conj()));
        }
        Self::from_superop(n, m, superop)
    }

    /// `x ↦ f(x)` sampled on matrix units.
    pub fn from_fn(dim_in: usize, dim_out: usize, f: impl Fn(&MatrixC) -> MatrixC) -> Result<Self> {
        let mut superop = MatrixC::zeros(dim_out * dim_out, dim_in * dim_in);
        for c in 0..dim_in * dim_in {
            let image = f(&MatrixC::unit(dim_in, c / dim_in, c % dim_in));
            if image.shape() != (dim_out, dim_out) {
                return Err(Error::dim(format!("image is not {dim_out}x{dim_out}")));
            }
            superop.set_col(c, image.data());
        }
        Self::from_superop(dim_in, dim_out, superop)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_superop(n, n, MatrixC::identity(n * n)).expect("square identity")
    }

    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        Self::from_superop(dim_in, dim_out, MatrixC::zeros(dim_out * dim_out, dim_in * dim_in)).expect("shape")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    pub fn choi(&self) -> &MatrixC {
        &self.choi
    }

    pub fn superop(&self) -> &MatrixC {
        &self.superop
    }

    pub fn apply(&self, x: &MatrixC) -> Result<MatrixC> {
        self.check_input(x)?;
        let v = &self.superop * &x.vectorize();
        Ok(MatrixC::unvectorize(v.data(), self.dim_out, self.dim_out))
    }

    /// `φ(X)_ab = Σ_ij X_ij J[i·m + a, j·m + b]`, independent of `Φ̂`.
    pub fn apply_via_choi(&self, x: &MatrixC) -> Result<MatrixC> {
        self.check_input(x)?;
        let (n, m) = (self.dim_in, self.dim_out);
        Ok(MatrixC::from_fn(m, m, |a, b| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += x[(i, j)] * self.choi[(i * m + a, j * m + b)];
                }
            }
            acc
        }))
    }

    fn check_input(&self, x: &MatrixC) -> Result<()> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::dim(format!(
                "map acts on {0}x{0} matrices, got {1}x{2}",
                self.dim_in,
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ChannelMap) -> Result<ChannelMap> {
        compose(self, other)
    }

    /// `φᵏ`, with `φ⁰ = id`.
    pub fn power(&self, k: usize) -> Result<ChannelMap> {
        if !self.is_square() {
            return Err(Error::dim("powers need a map M_n → M_n"));
        }
        let mut acc = MatrixC::identity(self.dim_in * self.dim_in);
        for _ in 0..k {
            acc = &self.superop * &acc;
        }
        Self::from_superop(self.dim_in, self.dim_in, acc)
    }

    /// `Σ w_k φ_k`, all maps of one shape.
    pub fn linear_combination(terms: &[(f64, &ChannelMap)]) -> Result<ChannelMap> {
        let (_, first) = terms.first().ok_or_else(|| Error::domain("empty combination"))?;
        let mut superop = MatrixC::zeros(first.superop.rows(), first.superop.cols());
        for (w, f) in terms {
            if (f.dim_in, f.dim_out) != (first.dim_in, first.dim_out) {
                return Err(Error::dim("combined maps must share input and output dimensions"));
            }
            superop.axpy(C64::new(*w, 0.0), &f.superop);
        }
        Self::from_superop(first.dim_in, first.dim_out, superop)
    }

    /// Hilbert–Schmidt adjoint `φ†` with `Tr(φ(X)* Y) = Tr(X* φ†(Y))`.
    pub fn hs_adjoint(&self) -> ChannelMap {
        Self::from_superop(self.dim_out, self.dim_in, self.superop.adjoint()).expect("shape")
    }

    /// Frobenius distance between superoperators.
    pub fn distance(&self, other: &ChannelMap) -> f64 {
        self.superop.distance(&other.superop)
    }

    pub fn choi_lambda_min(&self) -> f64 {
        match hermitian_eig(&self.choi.hermitian_part()) {
            Ok(e) => e.eigenvalues.first().copied().unwrap_or(0.0),
            Err(_) => f64::NAN,
        }
    }

    /// `λ_min(J) ≥ −1e-9 · ‖J‖_F` and `J` Hermitian to the same scale.
    pub fn is_cp(&self) -> bool {
        let scale = self.choi.frobenius_norm().max(1.0);
        self.choi.hermiticity_defect() <= tolerance::KERNEL * scale
            && self.choi_lambda_min() >= -tolerance::KERNEL * scale
    }

    /// `‖φ(I_n) − I_m‖_F`; infinite when `n ≠ m`.
    pub fn unital_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let image = self.apply(&MatrixC::identity(self.dim_in)).expect("shape");
        image.distance(&MatrixC::identity(self.dim_out))
    }

    pub fn is_unital(&self) -> bool {
        self.unital_residual() <= tolerance::KERNEL
    }

    /// `‖φ†(I_m) − I_n‖_F`.
    pub fn trace_preserving_residual(&self) -> f64 {
        let image = self.hs_adjoint().apply(&MatrixC::identity(self.dim_out)).expect("shape");
        image.distance(&MatrixC::identity(self.dim_in))
    }

    /// `‖φ∘φ − φ‖_F` on superoperators; infinite when not square.
    pub fn idempotence_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.superop * &self.superop).distance(&self.superop)
    }
}

/// `f ∘ g`.
pub fn compose(f: &ChannelMap, g: &ChannelMap) -> Result<ChannelMap> {
    if g.dim_out != f.dim_in {
        return Err(Error::dim(format!(
            "cannot compose M_{} → M_{} after M_{} → M_{}",
            f.dim_in, f.dim_out, g.dim_in, g.dim_out
        )));
    }
    ChannelMap::from_superop(g.dim_in, f.dim_out, &f.superop * &g.superop)
}

/// Random unital CP map on `M_n`: Gaussian Kraus operators `G_k`, then
/// `K_k = S^{-1/2} G_k` with `S = Σ G_k G_k*`, so `Σ K_k K_k* = I`.
pub fn random_unital_channel(n: usize, kraus_count: usize, rng: &mut impl Rng) -> ChannelMap {
    let gauss: Vec<MatrixC> = (0..kraus_count.max(1))
        .map(|_| {
            MatrixC::from_fn(n, n, |_, _| {
                C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
            })
        })
        .collect();
    let mut s = MatrixC::zeros(n, n);
    for g in &gauss {
        s = &s + &(g * &g.adjoint());
    }
    let eig = hermitian_eig(&s.hermitian_part()).expect("Hermitian");
    let inv_sqrt = eig.reconstruct_with(|l| 1.0 / l.max(1e-300).sqrt());
    let kraus: Vec<MatrixC> = gauss.iter().map(|g| &inv_sqrt * g).collect();
    ChannelMap::from_kraus(&kraus).expect("consistent shapes")
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;
    use crate::matrix::named::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(r: usize, c: usize, rng: &mut impl Rng) -> MatrixC {
        MatrixC::from_fn(r, c, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn identity_choi_is_rank_one_trace_two() {
        let id = ChannelMap::from_kraus(&[MatrixC::identity(2)]).unwrap();
        let mut oracle = MatrixC::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                oracle = &oracle + &MatrixC::unit(2, i, j).kron(&MatrixC::unit(2, i, j));
            }
        }
        assert!(id.choi().distance(&oracle) < 1e-15);
        assert!((id.choi().trace().re - 2.0).abs() < 1e-15);
        assert_eq!(crate::matrix::svd(id.choi()).rank(1e-9), 1);
        assert_eq!(id, ChannelMap::identity(2));
    }

    #[test]
    fn diagonal_kraus_is_pinching() {
        let p = ChannelMap::from_kraus(&[MatrixC::unit(2, 0, 0), MatrixC::unit(2, 1, 1)]).unwrap();
        let x = MatrixC::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.apply(&x).unwrap(), MatrixC::diag_real(&[1.0, 4.0]));
        assert!(p.distance(&pinching(2)) < 1e-15);
    }

    #[test]
    fn half_average_with_conjugation_expands_by_hand() {
        // ½(x + u x u*), u = diag(1, −1): diagonal kept, off-diagonal killed
        let u = sigma_z();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ChannelMap::from_kraus(&[u.scale_real(s), MatrixC::identity(2).scale_real(s)]).unwrap();
        let mut oracle = MatrixC::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1)] {
            oracle = &oracle + &MatrixC::unit(2, i, i).kron(&MatrixC::unit(2, j, j));
        }
        assert!(phi.choi().distance(&oracle) < 1e-15, "{:?}", phi.choi());
        assert!(phi.distance(&pinching(2)) < 1e-15);
    }

    #[test]
    fn compose_examples() {
        let phi = random_unital_channel(2, 3, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(compose(&ChannelMap::identity(2), &phi).unwrap().distance(&phi) < 1e-15);
        let p = pinching(2);
        assert!(compose(&p, &p).unwrap().distance(&p) < 1e-15);
        let t = transpose(2);
        assert!(compose(&t, &t).unwrap().distance(&ChannelMap::identity(2)) < 1e-15);
        // oracle: transpose twice on an arbitrary matrix
        let x = random_matrix(2, 2, &mut ChaCha8Rng::seed_from_u64(2));
        let tt = compose(&t, &t).unwrap().apply(&x).unwrap();
        assert_eq!(tt, x.transpose().transpose());
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = ChannelMap::zero(2, 3);
        assert!(matches!(compose(&a, &a), Err(Error::Dimension(_))));
    }

    #[test]
    fn kraus_shape_mismatch_errors() {
        let err = ChannelMap::from_kraus(&[MatrixC::identity(2), MatrixC::identity(3)]).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn random_unital_is_unital_and_cp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3] {
            let phi = random_unital_channel(n, 3, &mut rng);
            assert!(phi.unital_residual() < 1e-12);
            assert!(phi.is_cp());
        }
    }

    #[test]
    fn choi_and_superop_agree_on_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..100 {
            let (n, m) = (1 + trial % 3, 1 + (trial / 3) % 3);
            let phi = ChannelMap::from_choi(n, m, random_matrix(n * m, n * m, &mut rng)).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let e = MatrixC::unit(n, i, j);
                    let d = phi.apply(&e).unwrap().distance(&phi.apply_via_choi(&e).unwrap());
                    assert!(d <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn hs_adjoint_satisfies_defining_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = ChannelMap::from_choi(2, 3, random_matrix(6, 6, &mut rng)).unwrap();
        let x = random_matrix(2, 2, &mut rng);
        let y = random_matrix(3, 3, &mut rng);
        let lhs = phi.apply(&x).unwrap().inner(&y);
        let rhs = x.inner(&phi.hs_adjoint().apply(&y).unwrap());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn cp_closed_under_composition_and_mixing(seed in any::<u64>(), w in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_unital_channel(2, 2, &mut rng);
            let b = random_unital_channel(2, 3, &mut rng);
            prop_assert!(compose(&a, &b).unwrap().is_cp());
            prop_assert!(ChannelMap::linear_combination(&[(w, &a), (1.0 - w, &b)]).unwrap().is_cp());
        }

        #[test]
        fn choi_superop_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let j = random_matrix(6, 6, &mut rng);
            let phi = ChannelMap::from_choi(3, 2, j.clone()).unwrap();
            let back = ChannelMap::from_superop(3, 2, phi.superop().clone()).unwrap();
            prop_assert_eq!(back.choi(), &j);
        }
    }
}
