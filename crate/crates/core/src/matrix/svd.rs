use super::{MatrixC, C64, ZERO};

/// Thin singular value decomposition `A = U diag(σ) V^*`, σ descending.
///
/// `u` is `m x k` and `v` is `n x k` with `k = n` (one-sided Jacobi keeps a
/// column per input column; trailing columns of `u` for zero singular values
/// are zero, not completed to an orthonormal set).
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: MatrixC,
    pub singular_values: Vec<f64>,
    pub v: MatrixC,
}

impl Svd {
    /// Right singular vectors whose singular value is `<= threshold`.
    pub fn null_space(&self, threshold: f64) -> Vec<Vec<C64>> {
        self.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= threshold)
            .map(|(k, _)| self.v.col(k))
            .collect()
    }

    /// Left singular vectors whose singular value is `> threshold`.
    pub fn range(&self, threshold: f64) -> Vec<Vec<C64>> {
        self.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > threshold)
            .map(|(k, _)| self.u.col(k))
            .collect()
    }

    pub fn rank(&self, threshold: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > threshold).count()
    }
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD. Small singular values come out with
/// absolute accuracy near `ε·‖A‖`, which the kernel extraction relies on.
pub fn svd(a: &MatrixC) -> Svd {
    let (m, n) = a.shape();
    // Work on columns: store column-major copies.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    let mut vcols: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { super::ONE } else { ZERO }).collect())
        .collect();

    let tol = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() || g < 1e-300 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                apply(&mut cols, p, q, c, s, g_qp, g_qq);
                apply(&mut vcols, p, q, c, s, g_qp, g_qq);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = MatrixC::zeros(m, n);
    let mut v = MatrixC::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        singular_values.push(s);
        if s > 1e-300 {
            let ucol: Vec<C64> = cols[j].iter().map(|z| z / s).collect();
            u.set_col(k, &ucol);
        }
        v.set_col(k, &vcols[j]);
    }
    Svd {
        u,
        singular_values,
        v,
    }
}

fn apply(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, g_qp: C64, g_qq: C64) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = a * c + b * g_qp;
        *y = a * s + b * g_qq;
    }
}

/// Orthonormal basis of the kernel of `a` (relative threshold on σ).
pub fn kernel(a: &MatrixC, rel_threshold: f64) -> Vec<Vec<C64>> {
    let d = svd(a);
    let scale = d.singular_values.first().copied().unwrap_or(0.0).max(1.0);
    d.null_space(rel_threshold * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, rng: &mut impl Rng) -> MatrixC {
        MatrixC::from_fn(m, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn reconstruct(d: &Svd) -> MatrixC {
        let n = d.v.rows();
        let mut us = d.u.clone();
        for k in 0..n {
            for i in 0..us.rows() {
                us[(i, k)] *= d.singular_values[k];
            }
        }
        &us * &d.v.adjoint()
    }

    #[test]
    fn reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(3, 3), (5, 3), (3, 5), (9, 9), (16, 16)] {
            let a = random(m, n, &mut rng);
            let d = svd(&a);
            assert!(reconstruct(&d).distance(&a) < 1e-12 * a.frobenius_norm().max(1.0));
            let vv = &d.v.adjoint() * &d.v;
            assert!(vv.distance(&MatrixC::identity(n)) < 1e-12);
            assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn kernel_of_rank_deficient_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = &random(6, 2, &mut rng) * &random(2, 6, &mut rng);
        let ker = kernel(&a, 1e-12);
        assert_eq!(ker.len(), 4);
        for v in ker {
            let av = &a * &MatrixC::column(&v);
            assert!(av.frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn small_singular_values_are_accurate() {
        let a = MatrixC::diag_real(&[1.0, 1e-11, 0.0]);
        let d = svd(&a);
        assert!((d.singular_values[1] - 1e-11).abs() < 1e-20);
        assert_eq!(d.singular_values[2], 0.0);
        assert_eq!(d.rank(1e-12), 2);
    }
}
