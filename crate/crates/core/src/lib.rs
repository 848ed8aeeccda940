//! Generalized mutual information on finite channels.
//!
//! An entropy pair `H = (eta, F)` with a concave core `F` and an increasing
//! outer function `eta` defines `H(X) = eta(F(p_X))`, a conditional entropy
//! that averages `F` over posteriors, and the H-mutual information
//! `I_H(X;Y) = H(X) - H(X|Y)`. Shannon, Arimoto, Hayashi and Fehr–Berens
//! information are the built-in pairs; expected value of sample information
//! and g-leakage come from [`leakage`].
//!
//! Every H-MI can be written as `max_q F_H(p_X, q)` over families of
//! conditional pmfs `q(x|y)` ([`variational`]), which turns the H-capacity
//! `max_p I_H` into a double maximization solved by alternating updates
//! ([`capacity`]). A brute-force grid search over the input simplex
//! serves as an independent oracle.
//!
//! The `parallel` feature (on by default) lets the grid oracle and batch
//! evaluations fan out over rayon; results are bit-identical either way.

/// Version of this library, echoed in command-line run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod capacity;
pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod leakage;
pub mod par;
pub mod scoring;
pub mod simplex;
pub mod variational;

pub use capacity::{
    brute_force_capacity, convergence_trace, grid_oracle, solve, OracleResult, PStep, SolveResult, SolverConfig, Stopping,
    TraceRow,
};
pub use entropy::{
    arimoto_mi, arimoto_pair, fb_mi, fehr_berens_pair, h_mi, hayashi_mi, hayashi_pair, shannon_mi, shannon_pair,
    EntropyPair, MiReport,
};
pub use error::{Error, Result};
pub use leakage::{bayes_value, evsi, evsi_scoring, mevsi, mevsi_scoring, LeakageReport};
pub use par::Execution;
pub use scoring::{GainMatrix, Orientation, ScoringRule};
pub use simplex::{alpha_tilt, joint, make_pmf, p_norm, posterior, Channel, Joint, Pmf, Posterior};
pub use variational::{eval_functional, p_step_closed, p_step_numeric, q_step, FunctionalSpec, QFamily};

