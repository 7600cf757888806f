use super::{MatrixC, C64};
use crate::error::{Error, Result};
use crate::tolerance;

/// Orthonormal basis (Frobenius inner product) of a subspace of `M_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    n: usize,
    basis: Vec<MatrixC>,
}

impl SubspaceBasis {
    pub fn zero(n: usize) -> Self {
        Self { n, basis: Vec::new() }
    }

    /// Whole of `M_n` with the matrix-unit basis.
    pub fn full(n: usize) -> Self {
        let basis = (0..n * n).map(|k| MatrixC::unit(n, k / n, k % n)).collect();
        Self { n, basis }
    }

    /// Basis from column vectors of length `n²` (row-major vectorized
    /// matrices). The vectors are re-orthonormalized.
    pub fn from_vectors(n: usize, vectors: &[Vec<C64>]) -> Result<Self> {
        let mats: Vec<MatrixC> = vectors
            .iter()
            .map(|v| {
                if v.len() != n * n {
                    Err(Error::dim(format!("vector of length {} is not in M_{n}", v.len())))
                } else {
                    Ok(MatrixC::unvectorize(v, n, n))
                }
            })
            .collect::<Result<_>>()?;
        orthonormalize(&mats, n)
    }

    /// Side length `n` of the ambient `M_n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the ambient space, `n²`.
    pub fn ambient_dim(&self) -> usize {
        self.n * self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MatrixC] {
        &self.basis
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &MatrixC) -> MatrixC {
        let mut out = MatrixC::zeros(self.n, self.n);
        for b in &self.basis {
            out.axpy(b.inner(x), b);
        }
        out
    }

    /// Frobenius distance from `x` to the span.
    pub fn distance_to(&self, x: &MatrixC) -> f64 {
        x.distance(&self.project(x))
    }

    pub fn contains(&self, x: &MatrixC, tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    /// Largest distance from a basis vector of `self` to `other`; zero iff
    /// `self ⊆ other`.
    pub fn excess_over(&self, other: &SubspaceBasis) -> f64 {
        self.basis.iter().map(|b| other.distance_to(b)).fold(0.0, f64::max)
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis, tol: f64) -> bool {
        self.n == other.n && self.excess_over(other) <= tol
    }

    /// `Σ vec(b) vec(b)^*`, an `n² x n²` orthogonal projector.
    pub fn projector(&self) -> MatrixC {
        let d = self.ambient_dim();
        let mut p = MatrixC::zeros(d, d);
        for b in &self.basis {
            let v = b.data();
            for i in 0..d {
                if v[i] == super::ZERO {
                    continue;
                }
                for j in 0..d {
                    p[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        p
    }

    /// `‖G − I‖_F` for the Gram matrix `G`.
    pub fn gram_defect(&self) -> f64 {
        let k = self.dim();
        let mut acc = 0.0;
        for i in 0..k {
            for j in 0..k {
                let g = self.basis[i].inner(&self.basis[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                acc += (g - C64::new(want, 0.0)).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Closed under `x ↦ x^*` within `tol`.
    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        self.basis.iter().all(|b| self.distance_to(&b.adjoint()) <= tol)
    }

    pub fn contains_identity(&self, tol: f64) -> bool {
        self.contains(&MatrixC::identity(self.n), tol)
    }

    /// Basis of the Hermitian elements, as a real subspace. Only meaningful
    /// for self-adjoint subspaces.
    pub fn hermitian_generators(&self) -> Vec<MatrixC> {
        let mut gens = Vec::with_capacity(2 * self.dim());
        for b in &self.basis {
            let re = b.hermitian_part();
            let im = MatrixC::from_fn(self.n, self.n, |i, j| {
                (b[(i, j)] - b[(j, i)].conj()) * C64::new(0.0, -0.5)
            });
            for h in [re, im] {
                if h.frobenius_norm() > tolerance::ALGEBRAIC {
                    gens.push(h);
                }
            }
        }
        gens
    }
}

/// Modified Gram–Schmidt under the Frobenius inner product, with one round
/// of reorthogonalization. Vectors whose residual falls below
/// `1e-10 · max input norm` are dropped, so the output dimension is the rank
/// of the input span.
pub fn orthonormalize(vectors: &[MatrixC], n: usize) -> Result<SubspaceBasis> {
    for (k, v) in vectors.iter().enumerate() {
        if v.shape() != (n, n) {
            return Err(Error::dim(format!(
                "vector {k} is {}x{}, expected {n}x{n}",
                v.rows(),
                v.cols()
            )));
        }
    }
    let max_norm = vectors.iter().map(MatrixC::frobenius_norm).fold(0.0, f64::max);
    let cutoff = tolerance::ALGEBRAIC * max_norm;
    let mut basis: Vec<MatrixC> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.inner(&r);
                r.axpy(-c, b);
            }
        }
        let norm = r.frobenius_norm();
        if norm > cutoff && norm > 0.0 {
            basis.push(r.scale_real(1.0 / norm));
        }
    }
    Ok(SubspaceBasis { n, basis })
}

/// Compare spans through their orthogonal projectors. Returns whether
/// `‖P_a − P_b‖_F ≤ tol`, and that distance.
pub fn subspace_equal(a: &SubspaceBasis, b: &SubspaceBasis, tol: f64) -> Result<(bool, f64)> {
    if a.n != b.n {
        return Err(Error::dim(format!(
            "subspaces of M_{} and M_{} are not comparable",
            a.n, b.n
        )));
    }
    // P_a − P_b = P_a(I − P_b) − (I − P_a)P_b, and the two terms are
    // Frobenius-orthogonal, so the squared norm is a sum of residuals.
    let sq: f64 = a.basis.iter().map(|x| b.distance_to(x).powi(2)).sum::<f64>()
        + b.basis.iter().map(|y| a.distance_to(y).powi(2)).sum::<f64>();
    let dist = sq.sqrt();
    Ok((dist <= tol, dist))
}
