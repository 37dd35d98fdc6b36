use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Each variant has a stable
/// machine-readable code (see [`Error::code`]) that the CLI prints.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series is indistinguishable from zero up to order {0}")]
    IndistinguishableFromZero(i64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("t-action is not nilpotent")]
    NotNilpotent,

    #[error("scalar form is not Hermitian")]
    NotHermitian,

    #[error("scalar form is not skew-Hermitian")]
    NotSkew,

    #[error("scalar form is degenerate")]
    Degenerate,

    #[error("t-action is not self-adjoint for the scalar form (GJ != J^dagger G)")]
    NotSelfAdjoint,

    #[error("skew-Hermitian form must be converted with skew_to_hermitian first")]
    SkewInput,

    #[error("form is already Hermitian")]
    AlreadyHermitian,

    #[error("parity mismatch in direct sum")]
    ParityMismatch,

    #[error("V-route and W-route signature profiles disagree: {0}")]
    RouteDisagreement(String),

    #[error("change of basis is not invertible over O: {0}")]
    NotOInvertible(String),

    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("eigenvalue branch with non-real leading coefficient (edge of order {0})")]
    NonRealLeadingCoefficient(i64),

    #[error("eigenvalue branch of non-integer order {0}/{1}")]
    NonIntegerBranchOrder(i64, i64),

    #[error("signature oracle did not stabilise on the epsilon schedule")]
    OracleUnstable,

    #[error("coboundaries do not compose to zero at degree {0}")]
    NotAComplex(usize),

    #[error("no solution of the Bockstein equation: {0}")]
    NoSolution(String),

    #[error("homological linking form is degenerate: {0}")]
    DegenerateForm(String),

    #[error("not a Seifert matrix: {0}")]
    NotSeifert(String),

    #[error("pairing witness is incompatible with the presentation: {0}")]
    BadPairing(String),

    #[error("operation not supported by this coefficient backend: {0}")]
    Unsupported(String),

    #[error("cannot decide the sign of a real algebraic number")]
    SignUndecided,

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Stable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IndistinguishableFromZero(_) => "IndistinguishableFromZero",
            Error::Dimension(_) => "Dimension",
            Error::NotNilpotent => "NotNilpotent",
            Error::NotHermitian => "NotHermitian",
            Error::NotSkew => "NotSkew",
            Error::Degenerate => "Degenerate",
            Error::NotSelfAdjoint => "NotSelfAdjoint",
            Error::SkewInput => "SkewInput",
            Error::AlreadyHermitian => "AlreadyHermitian",
            Error::ParityMismatch => "ParityMismatch",
            Error::RouteDisagreement(_) => "RouteDisagreement",
            Error::NotOInvertible(_) => "NotOInvertible",
            Error::TruncationInsufficient(_) => "TruncationInsufficient",
            Error::NonRealLeadingCoefficient(_) => "NonRealLeadingCoefficient",
            Error::NonIntegerBranchOrder(..) => "NonIntegerBranchOrder",
            Error::OracleUnstable => "OracleUnstable",
            Error::NotAComplex(_) => "NotAComplex",
            Error::NoSolution(_) => "NoSolution",
            Error::DegenerateForm(_) => "DegenerateForm",
            Error::NotSeifert(_) => "NotSeifert",
            Error::BadPairing(_) => "BadPairing",
            Error::Unsupported(_) => "Unsupported",
            Error::SignUndecided => "SignUndecided",
            Error::Parse { .. } => "Parse",
            Error::Input(_) => "Input",
        }
    }

    /// True for errors caused by malformed or invalid input, as opposed to
    /// failed internal consistency checks.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::RouteDisagreement(_)
                | Error::OracleUnstable
                | Error::NonRealLeadingCoefficient(_)
                | Error::NonIntegerBranchOrder(..)
                | Error::SignUndecided
        )
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
