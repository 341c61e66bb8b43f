use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shell norm must be even and at least 2, got {0}")]
    BadShellNorm(i64),
    #[error("the zero vector is never in Phi(L)")]
    ZeroVector,
    #[error("unknown lattice name {0:?}")]
    UnknownLattice(String),
    #[error("operand is not homogeneous")]
    NotHomogeneous,
    #[error("vector does not lie in the graded piece of weight {0}")]
    OutsidePiece(u64),
    #[error("complement mismatch at weight {weight}: {detail}")]
    ComplementMismatch { weight: u64, detail: String },
    #[error("bracket of weight {weight} does not reduce into the generating space")]
    Reduction { weight: u64 },
    #[error("Lie table disagrees with the closed form: {0}")]
    LieMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag for structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGram(_) => "invalid_gram",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::BadShellNorm(_) => "bad_shell_norm",
            Error::ZeroVector => "zero_vector",
            Error::UnknownLattice(_) => "unknown_lattice",
            Error::NotHomogeneous => "not_homogeneous",
            Error::OutsidePiece(_) => "outside_piece",
            Error::ComplementMismatch { .. } => "complement_mismatch",
            Error::Reduction { .. } => "reduction_failure",
            Error::LieMismatch(_) => "lie_mismatch",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Whether the error means a computed structure contradicted a claim,
    /// as opposed to bad input.
    pub fn is_claim_failure(&self) -> bool {
        matches!(
            self,
            Error::ComplementMismatch { .. } | Error::Reduction { .. } | Error::LieMismatch(_)
        )
    }
}
