use std::io;

/// Errors raised by codecs, list stores, and index builders.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    /// A list was not strictly increasing, or contained a zero.
    #[error("invalid list at index {index}: {reason}")]
    InvalidList { index: usize, reason: &'static str },

    /// A gap sequence contained a zero gap or overflowed when summed.
    #[error("invalid gap sequence at index {index}: {reason}")]
    InvalidGaps { index: usize, reason: &'static str },

    /// A value does not fit the fixed-width slots of the requested codec.
    #[error("value {value} too large for {codec}")]
    ValueTooLarge { value: u64, codec: &'static str },

    /// An encoded stream ended early or holds an impossible value.
    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    /// Lists passed to one intersection were built over different universes.
    #[error("universe mismatch: {0} vs {1}")]
    UniverseMismatch(u64, u64),

    /// The intersection algorithm needs sample structures the list lacks.
    #[error("list {0} has no sample directory of the required kind")]
    MissingSamples(usize),

    /// Re-Pair input contained the reserved separator symbol.
    #[error("gap value 0 is reserved as the list separator (list {list}, index {index})")]
    ReservedSymbol { list: usize, index: usize },

    /// A grammar symbol with no definition was requested.
    #[error("unknown grammar symbol {0}")]
    UnknownSymbol(u32),

    /// An index (list id, byte range, text range) was out of bounds.
    #[error("{what} {index} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: u64,
        limit: u64,
    },

    /// The general-purpose LZ backend failed.
    #[error("LZ backend error: {0}")]
    Backend(String),

    /// A configuration was rejected before any work was done.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The corpus handed to an index builder had no documents.
    #[error("corpus has no documents")]
    EmptyCorpus,

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::CorruptStream(msg.into())
    }
}
