//! Completely bounded norm.
//!
//! Every factorization `φ(x) = Σ A_k x B_k*` gives
//! `‖φ‖_cb ≤ ‖Σ A_k A_k*‖^½ ‖Σ B_k B_k*‖^½`, with equality at the optimum.
//! In Choi terms `J = Ã B̃*` and the bound is
//! `√(λ_max(Tr_in ÃÃ*) · λ_max(Tr_in B̃B̃*))`, the value of the block problem
//! `[[P, J], [J*, Q]] ⪰ 0` at `P = ÃÃ*`, `Q = B̃B̃*`. Starting from the SVD
//! `J = UΣV*`, the factorizations `Ã = UΣ^½ C`, `B̃ = VΣ^½ C^{-*}` are searched
//! by descent on a smoothed objective; every iterate is a certified upper
//! bound. Unitary witnesses give the matching lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::ChannelMap;
use crate::matrix::{hermitian_eig, inverse, svd, MatrixC, C64};

const SMOOTHING: [f64; 7] = [10.0, 30.0, 100.0, 300.0, 1e3, 1e4, 1e5];
const DESCENT_STEPS: usize = 400;
const WITNESS_STARTS: usize = 6;
const WITNESS_STEPS: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CbNorm {
    /// Certified upper bound from an explicit factorization.
    pub upper: f64,
    /// Certified lower bound: `‖(id ⊗ φ)(X)‖` for a unitary witness `X`.
    pub lower: f64,
    /// `upper − lower ≤ tol`.
    pub converged: bool,
    pub method: &'static str,
}

impl CbNorm {
    pub fn value(&self) -> f64 {
        self.upper
    }
}

/// CP maps return `‖φ(I)‖` on both ends of the bracket.
pub fn cb_norm(phi: &ChannelMap, tol: f64) -> CbNorm {
    if phi.is_cp() {
        let v = phi.apply(&MatrixC::identity(phi.dim_in())).expect("shape").op_norm();
        return CbNorm {
            upper: v,
            lower: v,
            converged: true,
            method: "cp",
        };
    }
    let lower = witness_lower_bound(phi);
    let upper = factorization_upper_bound(phi, lower, tol);
    CbNorm {
        upper,
        lower,
        converged: upper - lower <= tol,
        method: "factorization",
    }
}

/// `Tr_in` of an `(n·m)`-square matrix, input leg first.
fn trace_in(y: &MatrixC, n: usize, m: usize) -> MatrixC {
    MatrixC::from_fn(m, m, |a, b| (0..n).map(|i| y[(i * m + a, i * m + b)]).sum())
}

/// `I_n ⊗ ω`, the adjoint of `Tr_in`.
fn lift_in(w: &MatrixC, n: usize) -> MatrixC {
    MatrixC::identity(n).kron(w)
}

/// Exact `λ_max` and the smoothed maximum `λ_max + β⁻¹ log Σ e^{β(λ_i − λ_max)}`
/// with `β = κ / λ_max`, together with its gradient `ω`. The smoothing is
/// positively homogeneous, so the gradient carries a `∂β/∂λ_max` term.
fn soft_max(s: &MatrixC, kappa: f64) -> Option<(f64, f64, MatrixC)> {
    let eig = hermitian_eig(&s.hermitian_part()).ok()?;
    let top = *eig.eigenvalues.last()?;
    if !(top > 0.0) {
        return None;
    }
    let beta = kappa / top;
    let k = eig.eigenvalues.len();
    let weights: Vec<f64> = eig.eigenvalues.iter().map(|l| (beta * (l - top)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let smooth = top + z.ln() / beta;
    let mut coeff: Vec<f64> = weights.iter().map(|w| w / z).collect();
    let tail: f64 = (0..k - 1).map(|j| coeff[j] * eig.eigenvalues[j] / top).sum();
    coeff[k - 1] = 1.0 + z.ln() / kappa - tail;
    Some((top, smooth, eig.reconstruct_with_values(&coeff)))
}

struct Factorization {
    a: MatrixC,
    b: MatrixC,
    n: usize,
    m: usize,
}

struct Evaluation {
    certified: f64,
    smoothed: f64,
    gradient: MatrixC,
}

impl Factorization {
    fn evaluate(&self, c: &MatrixC, kappa: f64) -> Option<Evaluation> {
        let r = inverse(c).ok()?;
        let ac = &self.a * c;
        let br = &self.b * &r.adjoint();
        let s1 = trace_in(&(&ac * &ac.adjoint()), self.n, self.m);
        let s2 = trace_in(&(&br * &br.adjoint()), self.n, self.m);
        let (t1, m1, w1) = soft_max(&s1, kappa)?;
        let (t2, m2, w2) = soft_max(&s2, kappa)?;
        let k1 = lift_in(&w1, self.n);
        let k2 = lift_in(&w2, self.n);
        // ∇ log m1 = A* K₁ A C / m1 ; ∇ log m2 = −R* R B* K₂ B R* / m2
        let g1 = &(&(&self.a.adjoint() * &k1) * &self.a) * c;
        let g2 = &(&(&(&r.adjoint() * &r) * &self.b.adjoint()) * &k2) * &br;
        let mut gradient = g1.scale_real(1.0 / m1);
        gradient.axpy(C64::new(-1.0 / m2, 0.0), &g2);
        Some(Evaluation {
            certified: (t1 * t2).sqrt(),
            smoothed: m1.ln() + m2.ln(),
            gradient,
        })
    }
}

fn factorization_upper_bound(phi: &ChannelMap, lower: f64, tol: f64) -> f64 {
    let (n, m) = (phi.dim_in(), phi.dim_out());
    let j = phi.choi();
    let d = svd(j);
    let top = d.singular_values.first().copied().unwrap_or(0.0);
    let r = d.rank(1e-13 * top.max(f64::MIN_POSITIVE));
    if r == 0 {
        return 0.0;
    }
    let side = n * m;
    let a = MatrixC::from_fn(side, r, |i, k| d.u[(i, k)] * d.singular_values[k].sqrt());
    let b = MatrixC::from_fn(side, r, |i, k| d.v[(i, k)] * d.singular_values[k].sqrt());
    let f = Factorization { a, b, n, m };
    let mut c = MatrixC::identity(r);
    let mut best = f64::INFINITY;
    for kappa in SMOOTHING {
        let Some(mut cur) = f.evaluate(&c, kappa) else { break };
        let mut step = 0.1;
        best = best.min(cur.certified);
        for _ in 0..DESCENT_STEPS {
            if best - lower <= 0.5 * tol {
                return best;
            }
            let g2 = cur.gradient.frobenius_norm().powi(2);
            if g2 < 1e-30 {
                break;
            }
            let mut accepted = false;
            step *= 2.0;
            while step > 1e-16 {
                let mut trial = c.clone();
                trial.axpy(C64::new(-step, 0.0), &cur.gradient);
                // objective is invariant under C → sC; keep ‖C‖_F = √r
                let trial = trial.scale_real((r as f64).sqrt() / trial.frobenius_norm());
                if let Some(next) = f.evaluate(&trial, kappa) {
                    if next.smoothed <= cur.smoothed - 1e-4 * step * g2 {
                        best = best.min(next.certified);
                        c = trial;
                        cur = next;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }
    best
}

/// Monotone ascent of `‖(id_n ⊗ φ)(U)‖` over unitaries `U ∈ M_n ⊗ M_n`,
/// started from the swap and from seeded random unitaries.
fn witness_lower_bound(phi: &ChannelMap) -> f64 {
    let n = phi.dim_in();
    let m = phi.dim_out();
    let ampliate = |x: &MatrixC| -> MatrixC {
        let mut out = MatrixC::zeros(n * m, n * m);
        for i in 0..n {
            for k in 0..n {
                let blk = x.block(i * n, k * n, n, n);
                out.set_block(i * m, k * m, &phi.apply(&blk).expect("shape"));
            }
        }
        out
    };
    let adjoint = phi.hs_adjoint();
    let ampliate_adj = |y: &MatrixC| -> MatrixC {
        let mut out = MatrixC::zeros(n * n, n * n);
        for i in 0..n {
            for k in 0..n {
                let blk = y.block(i * m, k * m, m, m);
                out.set_block(i * n, k * n, &adjoint.apply(&blk).expect("shape"));
            }
        }
        out
    };
    let swap = MatrixC::from_fn(n * n, n * n, |r, c| {
        if r / n == c % n && r % n == c / n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best: f64 = 0.0;
    for start in 0..WITNESS_STARTS {
        let mut u = match start {
            0 => swap.clone(),
            1 => MatrixC::identity(n * n),
            _ => polar(&MatrixC::from_fn(n * n, n * n, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })),
        };
        for _ in 0..WITNESS_STEPS {
            let y = ampliate(&u);
            let d = svd(&y);
            let value = d.singular_values.first().copied().unwrap_or(0.0);
            best = best.max(value);
            if value == 0.0 {
                break;
            }
            // ‖Y‖ = ⟨p, Y q⟩ = Re Tr((id⊗φ)†(p q*)* U); maximise over unitaries by polar
            let p = MatrixC::column(&d.u.col(0));
            let q = MatrixC::column(&d.v.col(0));
            let g = ampliate_adj(&(&p * &q.adjoint()));
            u = polar(&g);
        }
    }
    best
}

/// Unitary polar factor `U V*` of `A = U Σ V*`. Columns of `U` for zero
/// singular values are completed to an orthonormal basis.
fn polar(a: &MatrixC) -> MatrixC {
    let d = svd(a);
    let k = a.rows();
    let mut basis: Vec<Vec<C64>> = (0..k).filter(|&c| d.singular_values[c] > 1e-12).map(|c| d.u.col(c)).collect();
    let kept = basis.len();
    for e in 0..k {
        if basis.len() == k {
            break;
        }
        let mut v = vec![C64::new(0.0, 0.0); k];
        v[e] = C64::new(1.0, 0.0);
        for b in &basis {
            let dot: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.iter().map(|z| z / norm).collect());
        }
    }
    // singular values are sorted, so the kept columns are the leading ones
    debug_assert!(kept <= k);
    &MatrixC::from_columns(k, &basis) * &d.v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::named::*;
    use crate::channel::random_unital_channel;

    #[test]
    fn cp_examples_are_exact() {
        assert_eq!(cb_norm(&identity(2), 1e-6).upper, 1.0);
        assert_eq!(cb_norm(&scaled_identity(2, 0.5), 1e-6).upper, 0.5);
    }

    #[test]
    fn transpose_on_m2_is_two() {
        let r = cb_norm(&transpose(2), 1e-4);
        assert!((r.upper - 2.0).abs() < 1e-3, "{r:?}");
        assert!((r.lower - 2.0).abs() < 1e-3, "{r:?}");
        assert!(r.converged);
    }

    #[test]
    fn transpose_on_m3_is_three() {
        let r = cb_norm(&transpose(3), 1e-3);
        assert!((r.lower - 3.0).abs() < 1e-6, "{r:?}");
        assert!((r.upper - 3.0).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn difference_of_channels_is_bracketed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_unital_channel(2, 2, &mut rng);
        let b = random_unital_channel(2, 2, &mut rng);
        let phi = ChannelMap::linear_combination(&[(1.0, &a), (-0.5, &b)]).unwrap();
        let r = cb_norm(&phi, 1e-4);
        assert!(r.lower <= r.upper + 1e-9, "{r:?}");
        // triangle inequality on CP parts
        assert!(r.upper <= 1.5 + 1e-6, "{r:?}");
        // ‖φ‖ on a random unitary is a lower bound as well
        assert!(r.lower >= phi.apply(&MatrixC::identity(2)).unwrap().op_norm() - 1e-12);
        assert!(r.upper - r.lower <= 1e-3, "{r:?}");
    }

    #[test]
    fn random_non_cp_maps_close_the_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..20 {
            let n = 2 + trial % 2;
            let j = MatrixC::from_fn(n * n, n * n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let phi = ChannelMap::from_choi(n, n, j).unwrap();
            let r = cb_norm(&phi, 1e-4);
            assert!(r.lower <= r.upper + 1e-9, "{r:?}");
            assert!(r.converged, "trial {trial}: {r:?}");
        }
    }
}
