use thiserror::Error;

/// Errors raised by the engine. Validation problems that are part of a
/// normal answer (an invalid curve, a failed relation) are returned as
/// reports instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("not a group homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("unsupported induction: {0}")]
    UnsupportedInduction(String),
    #[error("group mismatch")]
    GroupMismatch,
    #[error("unsupported coefficient mode: {0}")]
    UnsupportedMode(String),
    #[error("local profile does not match representation: {0}")]
    ProfileMismatch(String),
    #[error("missing branch data for {0}")]
    MissingBranchData(String),
    #[error("complex is not in the heart: {0}")]
    NotInHeart(String),
    #[error("complex is unbounded")]
    Unbounded,
    #[error("objects live on different curves")]
    CurveMismatch,
    #[error("weight data required: {0}")]
    WeightDataRequired(String),
    #[error("degree {0} exceeds the factorization cap")]
    DegreeCap(usize),
    #[error("weight undetermined for factor {0}")]
    WeightUndetermined(String),
    #[error("randomized search inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("{code}: {message}")]
    Parse { code: &'static str, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidCoefficient(_) => "E_COEFFICIENT",
            Error::ShapeError(_) => "E_SHAPE",
            Error::NotMonic => "E_NOT_MONIC",
            Error::NotAHomomorphism(_) => "E_NOT_HOMOMORPHISM",
            Error::UnsupportedInduction(_) => "E_INDUCTION",
            Error::GroupMismatch => "E_GROUP",
            Error::UnsupportedMode(_) => "E_MODE",
            Error::ProfileMismatch(_) => "E_PROFILE",
            Error::MissingBranchData(_) => "E_BRANCH_DATA",
            Error::NotInHeart(_) => "E_NOT_IN_HEART",
            Error::Unbounded => "E_UNBOUNDED",
            Error::CurveMismatch => "E_CURVE",
            Error::WeightDataRequired(_) => "E_WEIGHT_DATA",
            Error::DegreeCap(_) => "E_DEGREE_CAP",
            Error::WeightUndetermined(_) => "E_WEIGHT_UNDETERMINED",
            Error::Inconclusive(_) => "E_INCONCLUSIVE",
            Error::InvalidObject(_) => "E_INVALID",
            Error::Parse { code, .. } => code,
        }
    }
}
