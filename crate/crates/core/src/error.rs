use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate {0}")]
    Degenerate(&'static str),

    #[error("rogers shape must satisfy 1 <= a <= b <= c, got ({a}, {b}, {c})")]
    RogersOrdering { a: f64, b: f64, c: f64 },

    #[error("centers {i} and {j} are {distance} apart, closer than 2")]
    Overlap { i: usize, j: usize, distance: f64 },

    #[error("packing is not saturated: point ({x}, {y}, {z}) is farther than 2 from every center")]
    NotSaturated { x: f64, y: f64, z: f64 },

    #[error("vertex {vertex} lies {distance} from the domain boundary; at least {required} is needed")]
    Locality { vertex: usize, distance: f64, required: f64 },

    #[error("cube does not fit inside the usable domain: {0}")]
    InsufficientMargin(String),

    #[error("geometric anomaly: {0}")]
    Anomaly(String),

    #[error("region kind mismatch: {0}")]
    KindMismatch(String),

    #[error("region has no scoring rule: {0}")]
    Classification(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("monte carlo estimate {estimate} (stderr {stderr}) disagrees with {expected}")]
    ToleranceNotMet { estimate: f64, stderr: f64, expected: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
