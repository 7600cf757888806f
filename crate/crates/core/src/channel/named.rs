//! Standard maps used as fixtures and presets.

use super::ChannelMap;
use crate::matrix::MatrixC;

pub fn identity(n: usize) -> ChannelMap {
    ChannelMap::identity(n)
}

pub fn transpose(n: usize) -> ChannelMap {
    ChannelMap::from_fn(n, n, MatrixC::transpose).expect("square")
}

/// Conditional expectation onto the diagonal `D_n`.
pub fn pinching(n: usize) -> ChannelMap {
    ChannelMap::from_fn(n, n, |x| MatrixC::from_fn(n, n, |i, j| if i == j { x[(i, j)] } else { crate::matrix::ZERO }))
        .expect("square")
}

/// Compression onto the block diagonal with blocks of the given sizes.
pub fn block_pinching(blocks: &[usize]) -> ChannelMap {
    let n: usize = blocks.iter().sum();
    let label: Vec<usize> = blocks.iter().enumerate().flat_map(|(b, &size)| std::iter::repeat_n(b, size)).collect();
    ChannelMap::from_fn(n, n, |x| {
        MatrixC::from_fn(n, n, |i, j| if label[i] == label[j] { x[(i, j)] } else { crate::matrix::ZERO })
    })
    .expect("square")
}

/// `x ↦ u x u*`.
pub fn conjugation(u: &MatrixC) -> ChannelMap {
    ChannelMap::from_kraus(std::slice::from_ref(u)).expect("single operator")
}

/// Schur multiplier `x ↦ c ∘ x` (entrywise product).
pub fn schur(c: &MatrixC) -> ChannelMap {
    let n = c.rows();
    ChannelMap::from_fn(n, n, |x| MatrixC::from_fn(n, n, |i, j| c[(i, j)] * x[(i, j)])).expect("square")
}

/// `x ↦ s·x`.
pub fn scaled_identity(n: usize, s: f64) -> ChannelMap {
    ChannelMap::from_superop(n, n, MatrixC::identity(n * n).scale_real(s)).expect("square")
}

/// `½(id + Ad u)`.
pub fn lazy_conjugation(u: &MatrixC) -> ChannelMap {
    let n = u.rows();
    ChannelMap::linear_combination(&[(0.5, &identity(n)), (0.5, &conjugation(u))]).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::named::*;

    #[test]
    fn transpose_choi_is_swap_with_eigenvalues_pm_one() {
        let t = transpose(2);
        let swap = MatrixC::from_fn(4, 4, |r, c| {
            let (i, a) = (r / 2, r % 2);
            let (j, b) = (c / 2, c % 2);
            if i == b && a == j { crate::matrix::ONE } else { crate::matrix::ZERO }
        });
        assert_eq!(t.choi(), &swap);
        let eig = crate::matrix::hermitian_eig(t.choi()).unwrap();
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (l, e) in eig.eigenvalues.iter().zip(expected) {
            assert!((l - e).abs() < 1e-12);
        }
    }

    #[test]
    fn block_pinching_keeps_diagonal_blocks() {
        let p = block_pinching(&[2, 2]);
        let x = MatrixC::from_fn(4, 4, |i, j| crate::matrix::C64::new((i * 4 + j) as f64, 0.0));
        let y = p.apply(&x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let keep = (i < 2) == (j < 2);
                assert_eq!(y[(i, j)], if keep { x[(i, j)] } else { crate::matrix::ZERO });
            }
        }
    }

    #[test]
    fn shift_conjugation_moves_basis() {
        let s = cyclic_shift(3);
        let phi = conjugation(&s);
        let e00 = MatrixC::unit(3, 0, 0);
        assert_eq!(phi.apply(&e00).unwrap(), MatrixC::unit(3, 1, 1));
    }
}
