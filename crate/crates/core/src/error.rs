use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported message count K={0}")]
    UnsupportedK(u8),
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("skeletons overlap on message {0}")]
    SkeletonOverlap(u8),
    #[error("unpaired byproduct combination {0}")]
    UnpairedCombination(String),
    #[error("bit reference {msg}:{index} out of bounds")]
    OutOfBounds { msg: u8, index: u32 },
    #[error("no cancellation plan for demand bit {0}")]
    Undecodable(u32),
    #[error("transform failed: {0}")]
    Transform(String),
    #[error("no synthesis case matches demand {demand} with side information {si:?}")]
    NoCase { demand: u8, si: [u8; 2] },
    #[error("synthesis failed: {0}")]
    Synthesis(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("server replied with error reason {0}")]
    Remote(u8),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
