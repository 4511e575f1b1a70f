use thiserror::Error;

/// Errors raised by the curvature kernels, cone constructions and samplers.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation point left the domain of a warping function or chart.
    #[error("point {point} outside domain [{lo}, {hi}] ({what})")]
    OutOfDomain { what: String, point: f64, lo: f64, hi: f64 },

    /// Radius outside the admissible range of the triple-log construction.
    #[error("radius inadmissible: {0}")]
    InadmissibleRadius(String),

    /// A metric matrix failed a symmetry or positive-definiteness check.
    #[error("metric not positive definite at {context}")]
    NotPositiveDefinite { context: String },

    /// Finite-difference stencil would leave the chart box.
    #[error("finite-difference stencil exits chart near axis {axis}")]
    StencilExitsChart { axis: usize },

    /// Bracketed root finding failed to locate a root.
    #[error("no root of {what} in [{lo}, {hi}]")]
    NoRoot { what: String, lo: f64, hi: f64 },

    /// A construction received parameters violating its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two pieces cannot be glued (non-isometric boundaries, no scale).
    #[error("glue rejected: {0}")]
    GlueRejected(String),

    /// Parameter sweep exhausted without a feasible tuple.
    #[error("feasibility sweep exhausted; worst violation {violation} at {context}")]
    SweepExhausted { violation: f64, context: String },

    /// Sampled graph is disconnected (cannot form a metric space).
    #[error("sample graph disconnected: component of size {component} of {total}")]
    DisconnectedGraph { component: usize, total: usize },

    /// Malformed configuration or serialized record.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
