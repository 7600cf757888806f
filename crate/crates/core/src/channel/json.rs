//! `{"dim_in": n, "dim_out": m, "repr": "choi"|"kraus", "choi": matrix | "kraus": [matrix, ...]}`

use serde::{Deserialize, Serialize};

use super::ChannelMap;
use crate::error::{Error, Result};
use crate::matrix::{MatrixC, MatrixJson};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub repr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
}

impl From<&ChannelMap> for ChannelJson {
    fn from(phi: &ChannelMap) -> Self {
        ChannelJson {
            dim_in: phi.dim_in(),
            dim_out: phi.dim_out(),
            repr: "choi".into(),
            choi: Some(MatrixJson::from(phi.choi())),
            kraus: None,
        }
    }
}

impl ChannelJson {
    /// `path` locates this value for error messages (e.g. `""` for a file root).
    pub fn to_channel(&self, path: &str) -> Result<ChannelMap> {
        let (n, m) = (self.dim_in, self.dim_out);
        if n == 0 || m == 0 {
            return Err(Error::parse(format!("{path}/dim_in"), "dimensions must be positive"));
        }
        match self.repr.as_str() {
            "choi" => {
                let at = format!("{path}/choi");
                let j = self
                    .choi
                    .as_ref()
                    .ok_or_else(|| Error::parse(&at, "missing for repr \"choi\""))?
                    .to_matrix(&at)?;
                ChannelMap::from_choi(n, m, j).map_err(|e| Error::parse(&at, e.to_string()))
            }
            "kraus" => {
                let at = format!("{path}/kraus");
                let list = self.kraus.as_ref().ok_or_else(|| Error::parse(&at, "missing for repr \"kraus\""))?;
                let ops: Vec<MatrixC> = list
                    .iter()
                    .enumerate()
                    .map(|(k, mj)| {
                        let op = mj.to_matrix(&format!("{at}/{k}"))?;
                        if op.shape() != (m, n) {
                            return Err(Error::parse(
                                format!("{at}/{k}"),
                                format!("Kraus operator must be {m}x{n}, found {}x{}", op.rows(), op.cols()),
                            ));
                        }
                        Ok(op)
                    })
                    .collect::<Result<_>>()?;
                ChannelMap::from_kraus(&ops).map_err(|e| Error::parse(&at, e.to_string()))
            }
            other => Err(Error::parse(
                format!("{path}/repr"),
                format!("expected \"choi\" or \"kraus\", found {other:?}"),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::named::transpose;
    use super::*;

    #[test]
    fn round_trip_through_choi() {
        let t = transpose(2);
        let text = serde_json::to_string(&ChannelJson::from(&t)).unwrap();
        let back: ChannelJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_channel("").unwrap(), t);
    }

    #[test]
    fn kraus_input() {
        let text = r#"{"dim_in":2,"dim_out":2,"repr":"kraus","kraus":[
            {"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[0,0]]},
            {"rows":2,"cols":2,"data":[[0,0],[0,0],[0,0],[1,0]]}]}"#;
        let c: ChannelJson = serde_json::from_str(text).unwrap();
        let phi = c.to_channel("").unwrap();
        assert!(phi.distance(&super::super::named::pinching(2)) < 1e-15);
    }

    #[test]
    fn errors_name_the_path() {
        let text = r#"{"dim_in":2,"dim_out":2,"repr":"kraus","kraus":[{"rows":3,"cols":3,"data":[]}]}"#;
        let c: ChannelJson = serde_json::from_str(text).unwrap();
        let err = c.to_channel("").unwrap_err();
        assert!(err.to_string().contains("/kraus/0/data"), "{err}");
        let bad = ChannelJson { repr: "superop".into(), ..c };
        assert!(bad.to_channel("").unwrap_err().to_string().contains("/repr"));
    }
}
