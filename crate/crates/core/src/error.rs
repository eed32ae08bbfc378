use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid base {a}/{b}: {reason}")]
    InvalidBase { a: u64, b: u64, reason: &'static str },

    #[error("digit {digit} is outside the alphabet 0..{a}")]
    DigitOutOfRange { digit: u64, a: u32 },

    #[error("digit word has a leading zero")]
    LeadingZero,

    #[error("pattern must contain at least one digit")]
    EmptyPattern,

    #[error("word {word} does not represent an integer (value {value})")]
    NotInLanguage { word: String, value: String },

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("point lies in a boundary-tube box at level {level}; raise the level")]
    BoundaryAmbiguous { level: u32 },

    #[error("enumeration of {requested} boxes exceeds the cap of {cap}")]
    ScaleExceeded { requested: u128, cap: u64 },

    #[error("{value} is not integral at p = {p}")]
    NotIntegral { p: u64, value: String },

    #[error("{value} is not a level-{level} box corner")]
    NotBoxCorner { value: String, level: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse { input: input.to_string(), reason: reason.into() }
    }
}
