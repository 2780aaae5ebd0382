use thiserror::Error;

use crate::weight::WeightClass;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("invalid weight specification: {0}")]
    Spec(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("weight class {0} is not supported: rearrangements exist only for W0 and Winf")]
    UnsupportedClass(WeightClass),

    #[error("level {0:e} lies in the image of a plateau of the envelope")]
    PlateauImage(f64),

    #[error("support error: {0}")]
    Support(String),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("unsupported dimension n = {0}: angular profiles are implemented on S^1 only")]
    UnsupportedDimension(usize),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("no valid window: every localized window overlaps a plateau")]
    NoValidWindow,

    #[error("table error: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, domain: impl Into<String>) -> Error {
    Error::Domain {
        what,
        value,
        domain: domain.into(),
    }
}
