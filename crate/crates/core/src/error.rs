use thiserror::Error;

use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("{what} = {value} is not above the threshold {threshold}")]
    BelowThreshold {
        what: &'static str,
        value: f64,
        threshold: f64,
    },
    #[error("consistency check `{check}` failed: relative deviation {deviation:e}")]
    Consistency { check: &'static str, deviation: f64 },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed table: {0}")]
    Table(String),
}
