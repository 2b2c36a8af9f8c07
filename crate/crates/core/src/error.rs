use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// The variants are grouped by how the command-line front end reports them:
/// configuration problems, violated numerical invariants, and convergence
/// failures each map to their own exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("singular time t = {t}: {reason}")]
    SingularTime { t: f64, reason: &'static str },

    #[error("Fock space dimension {dimension} exceeds the cap of {cap}")]
    DimensionCap { dimension: u128, cap: usize },

    #[error("series truncation order {n_max} is too small for branch n = {n}; raise n_max")]
    Truncation { n: usize, n_max: usize },

    #[error(
        "branch sum did not converge by order {max_order}: partial sum {partial}, tail estimate {tail:e}"
    )]
    Convergence {
        max_order: usize,
        partial: num_complex::Complex64,
        tail: f64,
    },

    #[error("insufficient front data: {0}")]
    InsufficientFront(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant { .. } => 2,
            Error::Convergence { .. } | Error::Truncation { .. } => 3,
            _ => 1,
        }
    }
}
