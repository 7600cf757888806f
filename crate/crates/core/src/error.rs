use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the mathematical input does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("table is not associative: ({s}*{t})*{u} != {s}*({t}*{u})")]
    NonAssociative { s: usize, t: usize, u: usize },

    /// An iterative method ran out of budget. `history` holds the residual
    /// trace so callers can judge whether a larger budget would help.
    #[error("{method} did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed input; `path` is a JSON-pointer-like location.
    #[error("invalid input at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
