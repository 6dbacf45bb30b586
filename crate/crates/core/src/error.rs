use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis size {n_basis} is too small (need at least {min})")]
    BasisTooSmall { n_basis: usize, min: usize },

    #[error("perturbation strength {lambda} is outside the allowed range ({reason})")]
    LambdaOutOfRange { lambda: f64, reason: &'static str },

    #[error("state {label} is not in the retained basis (labels {first}..={last})")]
    StateOutOfRange {
        label: usize,
        first: usize,
        last: usize,
    },

    #[error("order {order} is not supported (allowed {min}..={max})")]
    InvalidOrder {
        order: usize,
        min: usize,
        max: usize,
    },

    #[error("small energy denominator between states {n} and {m}: |gap| = {gap:e}")]
    SmallDenominator { n: usize, m: usize, gap: f64 },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("quadrature did not converge with {panels} panels (last change {last_change:e})")]
    QuadratureNonConvergence { panels: usize, last_change: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },

    #[error(
        "target state {target} is ambiguous: two correct zeroth-order states weigh it equally"
    )]
    TargetAmbiguous { target: usize },

    #[error("target state {target} is not a member of the model space")]
    TargetNotInModelSpace { target: usize },

    #[error("model space is invalid: {0}")]
    InvalidModelSpace(String),

    #[error("the quasi-degenerate recursion requires Epstein-Nesbet partitioning")]
    UnsupportedScheme,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("I/O or CSV failure: {0}")]
    Io(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
