use thiserror::Error;

/// Errors produced by the solvers, analysis passes and pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation (non-positive
    /// density, subsonic point, out-of-range angle, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration values or inconsistent parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// A conserved state failed its admissibility check.
    #[error("state error: {0}")]
    State(String),

    /// The finite-volume solver could not keep the density positive.
    #[error("solver error at cell (i={i}, j={j}): {msg}")]
    Solver { i: usize, j: usize, msg: String },

    /// Characteristic mesh construction failed at a node.
    #[error("mesh error at node (i={i}, j={j}): {msg}")]
    Mesh { i: usize, j: usize, msg: String },

    /// Post-processing found nothing to report (e.g. no shock/sonic transition).
    #[error("analysis error: {0}")]
    Analysis(String),

    /// Tracing a curve through an interpolated field left the grid.
    #[error("extraction error: {0}")]
    Extraction(String),

    /// A pipeline stage ran before the stage that produces its inputs.
    #[error("missing artifact `{artifact}`: run `{stage}` first")]
    MissingArtifact { artifact: String, stage: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
