use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Newton iteration for collocation node {node} did not converge in {iterations} steps")]
    NodeNotConverged { node: usize, iterations: usize },

    #[error("collocation nodes {left} and {right} are not separated (gap {gap:e})")]
    NodesCoincide { left: usize, right: usize, gap: f64 },

    #[error(
        "second-derivative matrix asymmetry {defect:e} exceeds {limit:e} on the interior block"
    )]
    Asymmetric { defect: f64, limit: f64 },

    #[error("potential is not finite at r = {r:e} (value {value})")]
    NonFinitePotential { r: f64, value: f64 },

    #[error("potential evaluated at non-positive radius r = {0}")]
    NonPositiveRadius(f64),

    #[error("eigenvalue {index} did not converge within {iterations} QL iterations")]
    EigenNotConverged { index: usize, iterations: usize },

    #[error("state {state} has vanishing quadrature norm {norm:e}")]
    Normalization { state: usize, norm: f64 },

    #[error("energy bracket [{lo}, {hi}] gives node counts {nodes_lo}..{nodes_hi}, which do not straddle {target}")]
    Bracket {
        lo: f64,
        hi: f64,
        nodes_lo: usize,
        nodes_hi: usize,
        target: usize,
    },

    #[error("golden data, line {line}: {message}")]
    GoldenData { line: usize, message: String },
}
