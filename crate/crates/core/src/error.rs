use thiserror::Error;

/// Errors raised by field construction, the scheme and its diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("field is not free-space-like: boundary shell sup {boundary:.3e} exceeds {threshold:.1e} x global sup {global:.3e}")]
    NotFreeSpace {
        boundary: f64,
        global: f64,
        threshold: f64,
    },
    #[error("insufficient fit range: {shells} radial shells, at least 4 required")]
    InsufficientRange { shells: usize },
    #[error("insufficient quadrature nodes: {0} given, at least 2 required")]
    InsufficientNodes(usize),
    #[error("non-finite value at local node {node}")]
    BlowUp { node: usize },
    #[error("Picard iteration diverges: ratios {prev:.4} and {curr:.4} at k = {k} both exceed 1")]
    Divergence { k: usize, prev: f64, curr: f64 },
    #[error("no contraction after {halvings} halvings of rho (last ratio {ratio:.4})")]
    NoContraction { halvings: usize, ratio: f64 },
    #[error("inner fixed point of the non-star scheme did not converge (sub-iteration {k}, residual {residual:.3e})")]
    NonstarInnerDivergence { k: usize, residual: f64 },
    #[error("time step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("checkpoint format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Strips `AtStep` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
