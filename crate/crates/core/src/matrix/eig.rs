use super::{MatrixC, C64, ZERO};
use crate::error::{Error, Result};

/// Eigendecomposition `A = V diag(λ) V^*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: MatrixC,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> MatrixC {
        self.reconstruct_with(|l| l)
    }

    /// `V f(D) V^*`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> MatrixC {
        let d: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.reconstruct_with_values(&d)
    }

    /// `V diag(d) V^*`, `d` paired with the ascending eigenvalues.
    pub fn reconstruct_with_values(&self, d: &[f64]) -> MatrixC {
        let v = &self.eigenvectors;
        let n = v.rows();
        assert_eq!(d.len(), n);
        let mut out = MatrixC::zeros(n, n);
        for k in 0..n {
            if d[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * d[k];
                if vik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(a: &MatrixC) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::domain(format!(
            "hermitian_eig: matrix is {}x{}, not square",
            a.rows(),
            a.cols()
        )));
    }
    let scale = a.frobenius_norm().max(1.0);
    let defect = a.hermiticity_defect();
    if defect > 1e-9 * scale {
        return Err(Error::domain(format!(
            "hermitian_eig: ‖A − A*‖_F = {defect:.3e} exceeds 1e-9·max(1, ‖A‖_F)"
        )));
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = MatrixC::identity(n);

    let off = |m: &MatrixC| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let target = f64::EPSILON * scale;
    for _ in 0..MAX_SWEEPS {
        if off(&m) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                if mag < 1e-3 * f64::EPSILON * (app.abs() + aqq.abs()) {
                    m[(p, q)] = ZERO;
                    m[(q, p)] = ZERO;
                    continue;
                }
                // Phase-rotate to a real symmetric 2x2 problem, then a real rotation.
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on columns (p, q).
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                rotate(&mut m, &mut v, p, q, c, s, g_qp, g_qq);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(app - t * mag, 0.0);
                m[(q, q)] = C64::new(aqq + t * mag, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = MatrixC::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

#[allow(clippy::too_many_arguments)]
fn rotate(m: &mut MatrixC, v: &mut MatrixC, p: usize, q: usize, c: f64, s: f64, g_qp: C64, g_qq: C64) {
    let n = m.rows();
    // m <- m G
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c + mkq * g_qp;
        m[(k, q)] = mkp * s + mkq * g_qq;
    }
    // m <- G^* m
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c + mqk * g_qp.conj();
        m[(q, k)] = mpk * s + mqk * g_qq.conj();
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * s + vkq * g_qq;
    }
}

/// Frobenius-nearest positive semidefinite matrix: clip negative eigenvalues.
pub fn psd_project(a: &MatrixC) -> Result<MatrixC> {
    let eig = hermitian_eig(a)?;
    if eig.eigenvalues.first().is_none_or(|&l| l >= 0.0) {
        return Ok(a.hermitian_part());
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::super::named::*;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> MatrixC {
        let g = MatrixC::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        g.hermitian_part().scale_real(2.0)
    }

    fn assert_valid(a: &MatrixC, e: &HermitianEig) {
        let n = a.rows();
        let scale = a.frobenius_norm().max(1.0);
        assert!(e.reconstruct().distance(a) <= 1e-10 * scale);
        let vv = &e.eigenvectors.adjoint() * &e.eigenvectors;
        assert!(vv.distance(&MatrixC::identity(n)) <= 1e-10);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let e = hermitian_eig(&MatrixC::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted() {
        let a = MatrixC::diag_real(&[3.0, -1.0]);
        let e = hermitian_eig(&a).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 3.0]);
        assert_valid(&a, &e);
    }

    #[test]
    fn sigma_x_eigenvalues() {
        // characteristic polynomial λ² − 1
        let e = hermitian_eig(&sigma_x()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert_valid(&sigma_x(), &e);
    }

    #[test]
    fn complex_off_diagonal() {
        let a = sigma_y();
        let e = hermitian_eig(&a).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert_valid(&a, &e);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        let err = hermitian_eig(&MatrixC::zeros(2, 3)).unwrap_err();
        assert!(err.to_string().contains("not square"));
        let err = hermitian_eig(&MatrixC::unit(2, 0, 1)).unwrap_err();
        assert!(err.to_string().contains("A − A*"));
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let n = 1 + trial % 8;
            let a = random_hermitian(n, &mut rng);
            let e = hermitian_eig(&a).unwrap();
            assert!(e.reconstruct().distance(&a) <= 1e-9 * a.frobenius_norm());
            assert_valid(&a, &e);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // A projector of rank 2 in M_4 conjugated by a non-trivial unitary.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(4, &mut rng);
        let u = hermitian_eig(&h).unwrap().eigenvectors;
        let d = MatrixC::diag_real(&[1.0, 1.0, 0.0, 0.0]);
        let p = &(&u * &d) * &u.adjoint();
        let e = hermitian_eig(&p).unwrap();
        assert_valid(&p, &e);
        for (l, want) in e.eigenvalues.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((l - want).abs() < 1e-13);
        }
    }

    #[test]
    fn psd_project_examples() {
        let p = MatrixC::diag_real(&[2.0, 0.5]);
        assert!(psd_project(&p).unwrap().distance(&p) < 1e-10);
        let q = psd_project(&MatrixC::diag_real(&[2.0, -3.0])).unwrap();
        assert!(q.distance(&MatrixC::diag_real(&[2.0, 0.0])) < 1e-14);
        // clip the −1 eigenvalue of σx: ½[[1,1],[1,1]]
        let r = psd_project(&sigma_x()).unwrap();
        assert!(r.distance(&MatrixC::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5])) < 1e-14);
    }

    #[test]
    fn psd_project_is_idempotent_and_nearest() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_hermitian(4, &mut rng);
            let p = psd_project(&a).unwrap();
            let pp = psd_project(&p).unwrap();
            assert!(pp.distance(&p) < 1e-10);
            let d = a.distance(&p);
            for _ in 0..20 {
                let g = random_hermitian(4, &mut rng);
                let b = &g * &g.adjoint();
                assert!(d <= a.distance(&b) + 1e-9);
            }
        }
    }
}
