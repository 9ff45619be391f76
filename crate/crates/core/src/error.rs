use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid beta spec: {0}")]
    InvalidBetaSpec(String),

    #[error("budget exceeded: {what} (budget {budget})")]
    BudgetExceeded { what: String, budget: usize },

    /// An order or ceiling decision could not be made; `ambiguous` is the
    /// integer (or comparison point) the enclosure kept straddling.
    #[error("precision exhausted while deciding {context} (ambiguous at {ambiguous})")]
    PrecisionExhausted { context: String, ambiguous: String },

    #[error("sequence is not self-admissible: shift by {shift} exceeds it at position {position}")]
    NotSelfAdmissible { shift: usize, position: usize },

    #[error("word {word} is not admissible")]
    NotAdmissible { word: String },

    #[error("digit {digit} at position {position} is outside the alphabet 0..{alphabet}")]
    DigitOutOfRange { digit: u32, position: usize, alphabet: u32 },

    #[error("value is outside the domain (0,1]: {0}")]
    OutOfDomain(String),

    #[error("schedule infeasible at block {k}: r*h = {needed} exceeds search cap {cap}")]
    ScheduleInfeasible { k: usize, needed: usize, cap: usize },

    #[error("empty tail: no records at or after n = {tail_start}")]
    EmptyTail { tail_start: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("assertion failure at k = {k}: {detail}")]
    AssertionFailure { k: usize, detail: String },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("digit sequence file: {0}")]
    DigitFile(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidBetaSpec(_) => "InvalidBetaSpec",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::NotSelfAdmissible { .. } => "NotSelfAdmissible",
            Error::NotAdmissible { .. } => "NotAdmissible",
            Error::DigitOutOfRange { .. } => "DigitOutOfRange",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::ScheduleInfeasible { .. } => "ScheduleInfeasible",
            Error::EmptyTail { .. } => "EmptyTail",
            Error::DomainError(_) => "DomainError",
            Error::AssertionFailure { .. } => "AssertionFailure",
            Error::ConfigParse { .. } => "ConfigParseError",
            Error::DigitFile(_) => "DigitFileError",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
