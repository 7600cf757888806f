use super::{MatrixC, ZERO};
use crate::error::{Error, Result};

/// Solve `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve(a: &MatrixC, b: &MatrixC) -> Result<MatrixC> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::dim(format!(
            "solve: A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let n = a.rows();
    let p = b.cols();
    let mut m = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let (piv, mag) = (k..n)
            .map(|i| (i, m[(i, k)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if mag <= 1e-14 * scale {
            return Err(Error::domain(format!("solve: matrix is singular at column {k}")));
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            for j in 0..p {
                let t = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let pivot = m[(k, k)];
        for i in (k + 1)..n {
            let f = m[(i, k)] / pivot;
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= f * mkj;
            }
            for j in 0..p {
                let xkj = x[(k, j)];
                x[(i, j)] -= f * xkj;
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..p {
            let mut acc = x[(k, j)];
            for l in (k + 1)..n {
                acc -= m[(k, l)] * x[(l, j)];
            }
            x[(k, j)] = acc / m[(k, k)];
        }
    }
    Ok(x)
}

pub fn inverse(a: &MatrixC) -> Result<MatrixC> {
    solve(a, &MatrixC::identity(a.rows()))
}

#[cfg(test)]
mod tests {
    use super::super::C64;
    use super::*;

    #[test]
    fn inverse_of_complex_matrix() {
        let a = MatrixC::from_fn(4, 4, |i, j| C64::new((i + 2 * j) as f64 % 3.0 + (i == j) as u8 as f64 * 4.0, i as f64 - j as f64));
        let inv = inverse(&a).unwrap();
        assert!((&a * &inv).distance(&MatrixC::identity(4)) < 1e-12);
    }

    #[test]
    fn singular_is_reported() {
        let a = MatrixC::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(inverse(&a), Err(Error::Domain(_))));
    }
}
