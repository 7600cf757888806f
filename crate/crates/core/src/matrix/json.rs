//! `{"rows": n, "cols": m, "data": [[re, im], ...]}`, row-major.

use serde::{Deserialize, Serialize};

use super::{MatrixC, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&MatrixC> for MatrixJson {
    fn from(m: &MatrixC) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [clean(z.re), clean(z.im)]).collect(),
        }
    }
}

// -0.0 would otherwise serialize as "-0.0" on some paths and break
// byte-identical reports between runs that differ only in signed zeros.
fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl MatrixJson {
    /// Convert to a matrix; `path` locates this value for error messages.
    pub fn to_matrix(&self, path: &str) -> Result<MatrixC> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::parse(
                format!("{path}/data"),
                format!(
                    "expected {} entries for a {}x{} matrix, found {}",
                    self.rows * self.cols,
                    self.rows,
                    self.cols,
                    self.data.len()
                ),
            ));
        }
        let data = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        MatrixC::new(self.rows, self.cols, data).map_err(|e| Error::parse(path, e.to_string()))
    }
}

impl Serialize for MatrixC {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixC {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        j.to_matrix("").map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_is_rows_cols_data() {
        let m = MatrixC::from_rows(&[&[C64::new(1.0, 2.0), C64::new(0.0, -1.0)]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[[1.0,2.0],[0.0,-1.0]]}"#);
        let back: MatrixC = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn wrong_length_names_the_field() {
        let j: MatrixJson = serde_json::from_str(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).unwrap();
        let err = j.to_matrix("/basis/0").unwrap_err();
        assert!(err.to_string().contains("/basis/0/data"));
    }
}
