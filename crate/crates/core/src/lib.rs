//! Minimum-energy data routing on one-dimensional sensor networks.
//!
//! Sensors sit on a line at `0 < x_1 < ... < x_N` and send their data to a
//! collector at the origin, possibly through other sensors. Sending one unit
//! of data over distance `d` costs `E(d)`; the goal is the routing that
//! minimizes total energy.

pub mod error;
pub mod family;
pub mod format;
pub mod model;
pub mod oracle;
pub mod routing;
pub mod sinr;
pub mod solver;
pub mod thresholds;

pub use error::{Error, Result};
pub use family::{enumerate_canonical, enumerate_extended, n_prime, realize, TransmissionGraph};
pub use model::{
    check_feasible, total_energy, CostMatrix, CostModel, Feasibility, FlowMatrix, GainFn, NetworkInstance, Term,
};
pub use oracle::{enumerate_trees, oracle_min, oracle_min_with, OracleOptions, OracleOutcome, DEFAULT_ORACLE_CAP};
pub use routing::RoutingTree;
pub use solver::{solve, solve_monomial, solve_multiterm, solve_twoterm, Basis, Rule, Solution, SolveOptions};
pub use thresholds::{find_a_root, lambda_crossover, lambda_table, ThresholdTable};
pub use sinr::{capacity, make_schedule, reduce_to_flow, sinr_value, Gain, RadioParams, Schedule, Slot};
