use crate::grid::DyadicPoint;

/// Errors shared across the library and the CLI harness.
#[derive(Debug, thiserror::Error)]
pub enum SlmError {
    /// Malformed search domain: empty, NaN bounds, or lower >= upper on some axis.
    #[error("invalid domain: {0}")]
    Domain(String),

    /// A subdivision would exceed the exact-arithmetic refinement limit.
    #[error("refinement level {level} exceeds the maximum of {max}")]
    RefinementLimit { level: u32, max: u32 },

    /// The objective returned NaN or an infinity.
    #[error("objective returned a non-finite value at {point}")]
    Evaluation { point: DyadicPoint },

    /// Bad run configuration (flags, config file, budgets, start points).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The engine reached an unrecoverable state.
    #[error("engine error: {0}")]
    Engine(String),

    /// Name not present in the benchmark function registry.
    #[error("unknown function {0:?}")]
    UnknownFunction(String),

    /// Cluster id never registered.
    #[error("unknown cluster id {0}")]
    UnknownCluster(u64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SlmError>;
