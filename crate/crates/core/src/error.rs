use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every fault the simulator can raise.
///
/// Each variant maps to a stable short code (see [`Error::code`]) so the CLI
/// can print a single greppable line per failure.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("row {row} out of range (subarray has {rows} rows)")]
    AddressFault { row: usize, rows: usize },

    #[error("protocol fault: {0}")]
    ProtocolFault(String),

    #[error("undefined timing: ACT gap {act_gap} ps, PRE gap {pre_gap} ps fall between detection thresholds")]
    UndefinedTiming { act_gap: u64, pre_gap: u64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("address constraint violated: {0}")]
    AddressConstraint(String),

    #[error("no open row: row buffer read while bitlines are precharged")]
    NoOpenRow,

    #[error("copy source and target are the same row ({0})")]
    SelfCopy(usize),

    #[error("layout fault: {0}")]
    Layout(String),

    #[error("encoding fault: {0}")]
    Encoding(String),

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("empty trace")]
    EmptyTrace,

    #[error("empty database")]
    EmptyDatabase,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("zero latency: cannot derive throughput")]
    ZeroLatency,

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::AddressFault { .. } => "E_ADDRESS",
            Error::ProtocolFault(_) => "E_PROTOCOL",
            Error::UndefinedTiming { .. } => "E_TIMING",
            Error::LengthMismatch { .. } => "E_LENGTH",
            Error::AddressConstraint(_) => "E_CONSTRAINT",
            Error::NoOpenRow => "E_NO_OPEN_ROW",
            Error::SelfCopy(_) => "E_SELF_COPY",
            Error::Layout(_) => "E_LAYOUT",
            Error::Encoding(_) => "E_ENCODING",
            Error::ModeMismatch(_) => "E_MODE",
            Error::EmptyTrace => "E_EMPTY_TRACE",
            Error::EmptyDatabase => "E_EMPTY_DB",
            Error::Parse { .. } => "E_PARSE",
            Error::Config(_) => "E_CONFIG",
            Error::ZeroLatency => "E_ZERO_LATENCY",
            Error::Io(_) => "E_IO",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
