use thiserror::Error;

/// Errors raised by the geometric routines.
///
/// Contract violations (mismatched dimensions, non-finite matrix entries)
/// panic instead; these variants cover inputs that are well-formed but lie
/// outside the region where a construction makes sense.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("degenerate jet: {0}")]
    Degenerate(String),

    #[error("minimal point (h = {h:.6})")]
    MinimalPoint { h: f64 },

    #[error("singular state: {0}")]
    Singular(String),

    #[error("matrix is not in the group (residual {0:.3e})")]
    NotInGroup(f64),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("at {location}: {source}")]
    At {
        location: String,
        #[source]
        source: Box<GeomError>,
    },
}

impl GeomError {
    pub fn at(self, location: impl Into<String>) -> Self {
        GeomError::At {
            location: location.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with location wrappers removed.
    pub fn root(&self) -> &GeomError {
        match self {
            GeomError::At { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
