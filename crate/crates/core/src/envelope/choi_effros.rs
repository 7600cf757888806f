use serde::Serialize;

use crate::channel::ChannelMap;
use crate::error::{Error, Result};
use crate::matrix::{MatrixC, SubspaceBasis, C64};

/// Residual above which the product is flagged as not coming from a UCP
/// idempotent.
pub const CONSISTENCY_LIMIT: f64 = 1e-6;

/// Structure constants of `x ∘ y = e(xy)` on `F = range(e)` in an
/// orthonormal basis `f_k`: `f_i ∘ f_j = Σ_k c_ijk f_k`.
#[derive(Clone, Debug, Serialize)]
pub struct ChoiEffros {
    pub dim: usize,
    /// `constants[i][j][k] = [Re c_ijk, Im c_ijk]`
    pub constants: Vec<Vec<Vec<[f64; 2]>>>,
    /// Coordinates of `e(I)`.
    pub unit: Vec<[f64; 2]>,
    /// `max ‖e(f_i f_j) − Σ_k c_ijk f_k‖`
    pub closure_residual: f64,
    /// `max |((f_i∘f_j)∘f_l − f_i∘(f_j∘f_l))_m|` over all index tuples
    pub associativity_residual: f64,
    /// `max ‖e(I)∘f_j − f_j‖, ‖f_j∘e(I) − f_j‖`
    pub unit_residual: f64,
    pub consistent: bool,
}

#[allow(clippy::needless_range_loop)]
pub fn choi_effros_table(e: &ChannelMap, f: &SubspaceBasis) -> Result<ChoiEffros> {
    if !e.is_square() || f.n() != e.dim_in() {
        return Err(Error::dim("range basis must live in the domain of e"));
    }
    let n = e.dim_in();
    let basis = f.basis();
    let r = basis.len();
    let coords = |m: &MatrixC| -> Vec<C64> { basis.iter().map(|b| b.inner(m)).collect() };

    let mut c = vec![vec![vec![C64::new(0.0, 0.0); r]; r]; r];
    let mut closure: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let prod = e.apply(&(&basis[i] * &basis[j]))?;
            let cij = coords(&prod);
            let mut back = MatrixC::zeros(n, n);
            for (k, z) in cij.iter().enumerate() {
                back.axpy(*z, &basis[k]);
            }
            closure = closure.max(back.distance(&prod));
            c[i][j] = cij;
        }
    }

    let mut assoc: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            for l in 0..r {
                for m in 0..r {
                    let left: C64 = (0..r).map(|k| c[i][j][k] * c[k][l][m]).sum();
                    let right: C64 = (0..r).map(|k| c[j][l][k] * c[i][k][m]).sum();
                    assoc = assoc.max((left - right).norm());
                }
            }
        }
    }

    let u = coords(&e.apply(&MatrixC::identity(n))?);
    let mut unit: f64 = 0.0;
    for j in 0..r {
        let mut lsq = 0.0;
        let mut rsq = 0.0;
        for m in 0..r {
            let delta = if j == m { 1.0 } else { 0.0 };
            let l: C64 = (0..r).map(|k| u[k] * c[k][j][m]).sum();
            let rr: C64 = (0..r).map(|k| u[k] * c[j][k][m]).sum();
            lsq += (l - delta).norm_sqr();
            rsq += (rr - delta).norm_sqr();
        }
        unit = unit.max(lsq.sqrt()).max(rsq.sqrt());
    }

    let pair = |z: &C64| [z.re, z.im];
    Ok(ChoiEffros {
        dim: r,
        constants: c.iter().map(|ci| ci.iter().map(|cij| cij.iter().map(pair).collect()).collect()).collect(),
        unit: u.iter().map(pair).collect(),
        closure_residual: closure,
        associativity_residual: assoc,
        unit_residual: unit,
        consistent: closure.max(assoc).max(unit) <= CONSISTENCY_LIMIT,
    })
}
