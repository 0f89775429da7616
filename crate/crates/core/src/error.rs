use thiserror::Error;

/// Errors raised by distribution construction, evaluation and fitting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error at line {line}, column {column}: unparseable token {token:?}")]
    Parse {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("unknown {what}: {name:?}")]
    Unknown { what: &'static str, name: String },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("series truncation did not converge: |sum(w) - 1| = {tail:e}")]
    SeriesTail { tail: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
