use serde::Serialize;

use super::ChannelMap;
use crate::feasible_set::cb_norm;
use crate::matrix::MatrixC;
use crate::tolerance;

/// Structural flags with the residuals that decided them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureFlags {
    pub cp: bool,
    /// `None` when `n ≠ m`.
    pub unital: Option<bool>,
    pub trace_preserving: bool,
    /// `None` when `n ≠ m`.
    pub idempotent: Option<bool>,
    /// `None` when the cb-norm was not requested for a non-CP map.
    pub cb_contractive: Option<bool>,
    pub choi_lambda_min: f64,
    pub unital_residual: Option<f64>,
    pub trace_preserving_residual: f64,
    pub idempotence_residual: Option<f64>,
    pub cb_norm: Option<f64>,
}

/// CP maps get `‖φ‖_cb = ‖φ(I)‖` for free; other maps only when `with_cb`.
pub fn check_structure(phi: &ChannelMap, with_cb: bool) -> StructureFlags {
    let cp = phi.is_cp();
    let square = phi.is_square();
    let unital_residual = square.then(|| phi.unital_residual());
    let idempotence_residual = square.then(|| phi.idempotence_residual());
    let tp = phi.trace_preserving_residual();
    let cb = if cp {
        Some(phi.apply(&MatrixC::identity(phi.dim_in())).expect("shape").op_norm())
    } else if with_cb {
        Some(cb_norm(phi, tolerance::RANK * 1e3).upper)
    } else {
        None
    };
    let scale = phi.superop().frobenius_norm().max(1.0);
    StructureFlags {
        cp,
        unital: unital_residual.map(|r| r <= tolerance::KERNEL),
        trace_preserving: tp <= tolerance::KERNEL,
        idempotent: idempotence_residual.map(|r| r <= tolerance::KERNEL * scale),
        cb_contractive: cb.map(|c| c <= 1.0 + tolerance::RANK * 1e3),
        choi_lambda_min: phi.choi_lambda_min(),
        unital_residual,
        trace_preserving_residual: tp,
        idempotence_residual,
        cb_norm: cb,
    }
}

#[cfg(test)]
mod tests {
    use super::super::named::*;
    use super::*;

    #[test]
    fn identity_all_true() {
        let f = check_structure(&identity(3), false);
        assert!(f.cp && f.trace_preserving);
        assert_eq!(f.unital, Some(true));
        assert_eq!(f.idempotent, Some(true));
        assert_eq!(f.cb_contractive, Some(true));
        assert_eq!(f.cb_norm, Some(1.0));
    }

    #[test]
    fn transpose_is_not_cp() {
        let f = check_structure(&transpose(2), false);
        assert!(!f.cp);
        assert!((f.choi_lambda_min + 1.0).abs() < 1e-12);
        assert_eq!(f.cb_contractive, None);
        let g = check_structure(&transpose(2), true);
        assert_eq!(g.cb_contractive, Some(false));
    }

    #[test]
    fn pinching_flags() {
        let f = check_structure(&pinching(3), false);
        assert!(f.cp && f.trace_preserving);
        assert_eq!(f.unital, Some(true));
        assert_eq!(f.idempotent, Some(true));
    }

    #[test]
    fn rectangular_maps_have_no_square_flags() {
        let f = check_structure(&ChannelMap::zero(2, 3), false);
        assert_eq!(f.unital, None);
        assert_eq!(f.idempotent, None);
    }
}
