//! Crate-wide error type.

use crate::delineate::TraceReport;
use crate::graph::NetworkGraph;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the tracing pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid PGM: {0}")]
    Pgm(String),

    #[error("invalid graph JSON: {0}")]
    GraphFormat(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{what} ({row},{col}) out of bounds for {width}x{height} grid")]
    OutOfBounds {
        what: &'static str,
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },

    #[error("edge {edge}: point ({row},{col}) out of bounds for {width}x{height} grid")]
    EdgeOutOfBounds {
        edge: usize,
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("patch center ({row},{col}) is not on the structure (no foreground within Chebyshev distance 2)")]
    CenterOffStructure { row: usize, col: usize },

    #[error("point ({row},{col}) is not on any graph polyline")]
    NotOnGraph { row: usize, col: usize },

    #[error("endpoint ({row},{col}) lies outside the link window")]
    OutsideWindow { row: usize, col: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step budget of {max_steps} exhausted before the exploration bag emptied")]
    MaxSteps {
        max_steps: usize,
        /// Network traced so far plus the report at the moment of failure,
        /// so callers can persist partial progress.
        partial: Box<(NetworkGraph, TraceReport)>,
    },

    #[error("could not place component {component} with the required separation after {attempts} attempts")]
    Separation { component: usize, attempts: usize },
}
