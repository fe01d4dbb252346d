use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{name} must be in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),

    #[error("slot {0} is already in use")]
    DuplicateSlot(usize),

    #[error("slot {0} has no retained qubit")]
    UnknownSlot(usize),

    #[error("returned qubit belongs to slot {returned}, expected slot {expected}")]
    SlotMismatch { expected: usize, returned: usize },

    #[error("Z measurement of an entangled partner requires a Bell state")]
    NotEntangled,

    #[error("invalid bit string: {0}")]
    BitParse(String),

    #[error("wire decode error: {0}")]
    Decode(String),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("timed out waiting for peer")]
    Timeout,

    #[error("peer closed the connection")]
    Closed,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            range: "[0, 1]",
            value,
        })
    }
}

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            range: "(0, 1)",
            value,
        })
    }
}
