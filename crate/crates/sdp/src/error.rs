use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("SDPA parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid solver option: {0}")]
    InvalidOption(String),
}
