use thiserror::Error;

use crate::charts::{Ambient, ChartId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point for chart {chart:?}: {reason}")]
    InvalidPoint { chart: ChartId, reason: String },

    #[error("cannot convert between {from:?} and {to:?}: different ambient spaces")]
    ChartMismatch { from: ChartId, to: ChartId },

    #[error("field lives on {field:?} space but point is in {point:?} space")]
    AmbientMismatch { field: Ambient, point: Ambient },

    #[error("point outside domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("no convergence: {reason} (max residual {max_residual:e})")]
    NoConvergence { reason: String, max_residual: f64 },

    #[error("sign scan inconsistent: {0}")]
    ScanInconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
