use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("letter '{0}' is missing")]
    MissingLetter(char),

    #[error("letter '{0}' appears more than once")]
    DuplicateLetter(char),

    #[error("letter '{0}' is not in the alphabet")]
    InvalidLetter(char),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("score matrix violates s(a,a) > 0 at '{0}'")]
    NonPositiveSelfScore(char),

    #[error("score matrix violates s(a,a) >= s(a,b) at ('{0}', '{1}')")]
    SelfScoreNotMaximal(char, char),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("bad index file: {0}")]
    Format(String),

    #[error("unsupported index format version {0}")]
    Version(u32),

    #[error("index checksum mismatch (stored {stored:08x}, computed {computed:08x})")]
    Checksum { stored: u32, computed: u32 },

    #[error("index built for fragment length {index}, store has length {store}")]
    FragmentLengthMismatch { index: usize, store: usize },

    #[error("index content hash does not match the sequence store")]
    ContentMismatch,

    #[error("letter '{0}' has zero background frequency but positive posterior")]
    ZeroBackground(char),

    #[error("not enough data: {0}")]
    InsufficientData(String),
}
