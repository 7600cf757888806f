use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{orthonormalize, MatrixC, MatrixJson, SubspaceBasis};
use crate::tolerance;

/// Largest ambient side accepted from input files.
pub const MAX_AMBIENT: usize = 64;

/// A subspace `E ⊆ M_n` with its operator-system flags.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSubspace {
    basis: SubspaceBasis,
    unital: bool,
    selfadjoint: bool,
}

impl OperatorSubspace {
    /// Flags are decided at distance `1e-9` from the span.
    pub fn new(basis: SubspaceBasis) -> Self {
        let unital = basis.contains_identity(tolerance::KERNEL);
        let selfadjoint = basis.is_selfadjoint(tolerance::KERNEL);
        Self {
            basis,
            unital,
            selfadjoint,
        }
    }

    pub fn from_matrices(n: usize, spanning: &[MatrixC]) -> Result<Self> {
        Ok(Self::new(orthonormalize(spanning, n)?))
    }

    pub fn ambient(&self) -> usize {
        self.basis.n()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.selfadjoint
    }

    /// Unital and self-adjoint.
    pub fn is_system(&self) -> bool {
        self.unital && self.selfadjoint
    }

    /// `M_n`.
    pub fn full(n: usize) -> Self {
        Self::new(SubspaceBasis::full(n))
    }

    /// Diagonal matrices `D_n`.
    pub fn diagonal(n: usize) -> Self {
        let units: Vec<MatrixC> = (0..n).map(|k| MatrixC::unit(n, k, k)).collect();
        Self::from_matrices(n, &units).expect("square units")
    }

    /// `span{I_n}`.
    pub fn scalars(n: usize) -> Self {
        Self::from_matrices(n, &[MatrixC::identity(n)]).expect("square")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceMode {
    System,
    Space,
}

/// `{"ambient": n, "basis": [matrix, ...], "mode": "system"|"space"}`
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OperatorSpaceJson {
    pub ambient: usize,
    pub basis: Vec<MatrixJson>,
    pub mode: SpaceMode,
}

impl OperatorSpaceJson {
    pub fn new(space: &OperatorSubspace, mode: SpaceMode) -> Self {
        Self {
            ambient: space.ambient(),
            basis: space.basis().basis().iter().map(MatrixJson::from).collect(),
            mode,
        }
    }

    pub fn to_space(&self, path: &str) -> Result<OperatorSubspace> {
        let n = self.ambient;
        if n == 0 || n > MAX_AMBIENT {
            return Err(Error::parse(
                format!("{path}/ambient"),
                format!("ambient dimension must be in 1..={MAX_AMBIENT}, found {n}"),
            ));
        }
        if self.basis.is_empty() {
            return Err(Error::parse(format!("{path}/basis"), "at least one basis matrix is required"));
        }
        let mats: Vec<MatrixC> = self
            .basis
            .iter()
            .enumerate()
            .map(|(k, mj)| {
                let at = format!("{path}/basis/{k}");
                let m = mj.to_matrix(&at)?;
                if m.shape() != (n, n) {
                    return Err(Error::parse(at, format!("expected {n}x{n}, found {}x{}", m.rows(), m.cols())));
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        let space = OperatorSubspace::from_matrices(n, &mats)?;
        if self.mode == SpaceMode::System && !space.is_system() {
            return Err(Error::parse(
                format!("{path}/mode"),
                format!(
                    "\"system\" requires a unital self-adjoint span (unital: {}, self-adjoint: {}); use \"space\"",
                    space.is_unital(),
                    space.is_selfadjoint()
                ),
            ));
        }
        Ok(space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::named::*;

    #[test]
    fn flags() {
        assert!(OperatorSubspace::full(2).is_system());
        assert!(OperatorSubspace::diagonal(3).is_system());
        let pauli = OperatorSubspace::from_matrices(2, &[MatrixC::identity(2), sigma_x(), sigma_z()]).unwrap();
        assert!(pauli.is_system());
        assert_eq!(pauli.dim(), 3);
        let corner = OperatorSubspace::from_matrices(2, &[MatrixC::unit(2, 0, 1)]).unwrap();
        assert!(!corner.is_unital() && !corner.is_selfadjoint());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let d2 = OperatorSubspace::diagonal(2);
        let text = serde_json::to_string(&OperatorSpaceJson::new(&d2, SpaceMode::System)).unwrap();
        let back: OperatorSpaceJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_space("").unwrap().basis(), d2.basis());

        let bad = r#"{"ambient":2,"basis":[{"rows":2,"cols":2,"data":[[0,0],[1,0],[0,0],[0,0]]}],"mode":"system"}"#;
        let j: OperatorSpaceJson = serde_json::from_str(bad).unwrap();
        assert!(j.to_space("").unwrap_err().to_string().contains("/mode"));

        let wrong = r#"{"ambient":2,"basis":[{"rows":3,"cols":3,"data":[]}],"mode":"space"}"#;
        let j: OperatorSpaceJson = serde_json::from_str(wrong).unwrap();
        assert!(j.to_space("").unwrap_err().to_string().contains("/basis/0"));

        let huge = r#"{"ambient":65,"basis":[],"mode":"space"}"#;
        let j: OperatorSpaceJson = serde_json::from_str(huge).unwrap();
        assert!(j.to_space("").unwrap_err().to_string().contains("/ambient"));
    }
}
