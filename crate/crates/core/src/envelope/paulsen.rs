use crate::channel::ChannelMap;
use crate::error::{Error, Result};
use crate::feasible_set::OperatorSubspace;
use crate::matrix::MatrixC;

/// `[[0, x], [0, 0]] ∈ M_{2n}`.
pub fn embed_corner(x: &MatrixC) -> MatrixC {
    let n = x.rows();
    let mut m = MatrixC::zeros(2 * n, 2 * n);
    m.set_block(0, n, x);
    m
}

/// `I_n ⊕ 0` and `0 ⊕ I_n`.
pub fn diagonal_corners(n: usize) -> (MatrixC, MatrixC) {
    let mut p1 = MatrixC::zeros(2 * n, 2 * n);
    let mut p2 = MatrixC::zeros(2 * n, 2 * n);
    p1.set_block(0, 0, &MatrixC::identity(n));
    p2.set_block(n, n, &MatrixC::identity(n));
    (p1, p2)
}

/// `span{[[λI, x], [y*, μI]] : x, y ∈ E}`, an operator system in `M_{2n}`.
pub fn paulsen_lift(e: &OperatorSubspace) -> OperatorSubspace {
    let n = e.ambient();
    let (p1, p2) = diagonal_corners(n);
    let mut spanning = vec![p1, p2];
    for x in e.basis().basis() {
        let upper = embed_corner(x);
        spanning.push(upper.adjoint());
        spanning.push(upper);
    }
    OperatorSubspace::from_matrices(2 * n, &spanning).expect("lifted generators are 2n x 2n")
}

/// `[[a, b], [c, d]] ↦ [[a, φ(b)], [φ(c*)*, d]]`; inverse of
/// [`corner_extract`] on maps of `M_n`.
pub fn lift_map(phi: &ChannelMap) -> Result<ChannelMap> {
    if !phi.is_square() {
        return Err(Error::dim("lift_map needs a map M_n → M_n"));
    }
    let n = phi.dim_in();
    ChannelMap::from_fn(2 * n, 2 * n, |x| {
        let mut out = x.clone();
        let b = phi.apply(&x.block(0, n, n, n)).expect("square");
        let c = phi.apply(&x.block(n, 0, n, n).adjoint()).expect("square").adjoint();
        out.set_block(0, n, &b);
        out.set_block(n, 0, &c);
        out
    })
}

/// The map `x ↦ (1,2)-block of Φ([[0, x], [0, 0]])` on `M_n`.
///
/// `Φ` must fix both diagonal corners and must send the upper corner into
/// itself; either failure beyond `tol` is a domain error.
pub fn corner_extract(big: &ChannelMap, tol: f64) -> Result<ChannelMap> {
    if !big.is_square() || !big.dim_in().is_multiple_of(2) {
        return Err(Error::dim("corner_extract needs a map on M_{2n}"));
    }
    let n = big.dim_in() / 2;
    let (p1, p2) = diagonal_corners(n);
    for (name, p) in [("I ⊕ 0", &p1), ("0 ⊕ I", &p2)] {
        let r = big.apply(p)?.distance(p);
        if r > tol {
            return Err(Error::domain(format!("map does not fix the corner {name} (residual {r:.3e})")));
        }
    }
    let mut leakage: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let image = big.apply(&embed_corner(&MatrixC::unit(n, i, j)))?;
            let kept = embed_corner(&image.block(0, n, n, n));
            leakage = leakage.max(image.distance(&kept));
        }
    }
    if leakage > tol {
        return Err(Error::domain(format!(
            "map does not respect the corners: off-corner mass {leakage:.3e}"
        )));
    }
    ChannelMap::from_fn(n, n, |x| big.apply(&embed_corner(x)).expect("square").block(0, n, n, n))
}
