use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: &'static str, reason: String },

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("adaptedness violation: asked for index {requested} while at step {current}")]
    Adaptedness { requested: usize, current: usize },

    #[error("no sign given for interval (level {level}, index {index}) with nonzero coefficient")]
    MissingSign { level: u32, index: u64 },

    #[error("test function `{name}` failed concavity certification at {witness}")]
    NotCertified { name: String, witness: String },

    #[error("bad field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Param { name, reason: reason.into() }
}
