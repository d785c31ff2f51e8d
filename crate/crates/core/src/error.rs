use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("variable z{index} at position {pos} is out of range for d = {d}")]
    VariableOutOfRange { index: usize, d: usize, pos: usize },

    #[error("literal overflow at position {pos}")]
    LiteralOverflow { pos: usize },

    #[error("expression is not a polynomial")]
    NotAPolynomial,

    #[error("point is not in the domain: {0}")]
    NotInDomain(String),

    #[error("expression is not regular at 0")]
    NotRegularAtZero,

    #[error("value at zero is zero")]
    ZeroAtOrigin,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("joint spectral radius {spr} is not below 1")]
    SpectralRadiusTooLarge { spr: f64 },

    #[error("function is not in Fock space (spr = {spr})")]
    NotInFock { spr: f64 },

    #[error("function is not a bounded multiplier (spr = {spr})")]
    NotBoundedMultiplier { spr: f64 },

    #[error("tuple is jointly nilpotent")]
    JointlyNilpotent,

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier, one per variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax_error",
            Error::VariableOutOfRange { .. } => "variable_out_of_range",
            Error::LiteralOverflow { .. } => "literal_overflow",
            Error::NotAPolynomial => "not_a_polynomial",
            Error::NotInDomain(_) => "not_in_domain",
            Error::NotRegularAtZero => "not_regular_at_zero",
            Error::ZeroAtOrigin => "value_at_zero_is_zero",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::SpectralRadiusTooLarge { .. } => "spectral_radius_not_below_one",
            Error::NotInFock { .. } => "not_in_fock_space",
            Error::NotBoundedMultiplier { .. } => "not_a_bounded_multiplier",
            Error::JointlyNilpotent => "jointly_nilpotent",
            Error::CertificationFailed(_) => "certification_failed",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io_error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
