use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped loosely by the stage that produces them. The CLI maps
/// [`Error::is_validation`] errors to exit code 2 and everything else to 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet must contain at least 2 symbols, got {0}")]
    AlphabetTooSmall(usize),
    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(char),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(char),
    #[error("symbol index {0} out of range")]
    SymbolOutOfRange(u32),
    #[error("forbidden block {0:?} must have length 2")]
    ForbiddenLength(String),
    #[error("matrix must be {expected}x{expected} with 0/1 entries: {reason}")]
    BadMatrix { expected: usize, reason: String },
    #[error("shift not irreducible")]
    NotIrreducible,
    #[error("shift not aperiodic")]
    NotAperiodic,
    #[error("enumeration of {requested} words exceeds cap {cap}")]
    CapExceeded { requested: u128, cap: u128 },
    #[error("count overflow while computing {0}")]
    Overflow(&'static str),
    #[error("shift by {k} exceeds word length {len}")]
    ShiftTooLarge { k: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power iteration did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("offset {r} out of range 1..={len}")]
    OffsetOutOfRange { r: usize, len: usize },
    #[error("length {len} is not a multiple of block length {block}")]
    NotMultiple { len: usize, block: usize },
    #[error("prefix of length {len} too short, need at least {min}")]
    PrefixTooShort { len: usize, min: usize },

    #[error("invalid transducer: {0}")]
    InvalidTransducer(String),
    #[error("transducer is empty after trimming")]
    EmptyAfterTrim,
    #[error("no run consumes the input (stuck at position {position})")]
    Rejected { position: usize },
    #[error("ambiguous output after {position} symbols: {outputs} distinct outputs")]
    Ambiguous { position: usize, outputs: usize },
    #[error("run width {width} exceeds cap {cap}")]
    WidthExceeded { width: usize, cap: usize },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("no finite run with the given input label")]
    NoRun,

    #[error("kraft code assignment failed at length {0}")]
    KraftAssignment(u64),
    #[error("recoder search failed: {0}")]
    RecoderSearch(String),
    #[error("decode error: {0}")]
    Decode(String),

    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from bad user input rather than an internal failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. } | Error::KraftAssignment(_) | Error::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
