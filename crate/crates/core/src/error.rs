use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("lambda must be nonnegative, got {0}")]
    NegativeLambda(f64),

    #[error("non-finite parameter {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("zero distance between {xi} and {xj} with a nonpositive exponent")]
    DegenerateDistance { xi: f64, xj: f64 },

    #[error("triple ({xi}, {xj}, {xk}) is not ordered xi >= xj >= xk >= 0")]
    UnorderedTriple { xi: f64, xj: f64, xk: f64 },

    #[error("dimension mismatch: expected {expected} nodes, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid flow entry ({i}, {j}): {reason}")]
    InvalidFlow {
        i: usize,
        j: usize,
        reason: &'static str,
    },

    #[error("index {index} out of range [{min}, {max}]")]
    IndexOutOfRange { index: usize, min: usize, max: usize },

    #[error("invalid routing tree: {0}")]
    InvalidTree(String),

    #[error("no sign change found for root a_{k} after {steps} doubling steps")]
    NoBracket { k: usize, steps: usize },

    #[error("root a_{k} residual {residual:e} exceeds tolerance {tol:e}")]
    RootNotConverged { k: usize, residual: f64, tol: f64 },

    #[error("graphs {g1} and {g2} have equal second-term energy; no lambda crossover")]
    ParallelCosts { g1: String, g2: String },

    #[error("exhaustive search limited to N <= {cap}, got N = {n}")]
    TooLarge { n: usize, cap: usize },

    #[error("degenerate gain: coincident transmitter/receiver at {0}")]
    DegenerateGain(f64),

    #[error("invalid radio parameters: {0}")]
    InvalidRadio(String),

    #[error("interferer set {0}")]
    InvalidInterferers(&'static str),

    #[error("flow is infeasible (max residual {residual:e} at node {node})")]
    InfeasibleFlow { node: usize, residual: f64 },

    #[error("flow contains a cycle through node {0}; no causal schedule exists")]
    CyclicFlow(usize),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}
