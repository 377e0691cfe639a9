//! Drift estimation for X_t = θt + B^{H₁}_t + B^{H₂}_t.
//!
//! The maximum-likelihood estimator is θ̂_T = ∫h_T dX / ∫h_T ds where h_T
//! solves a Fredholm equation of the second kind with a weakly singular
//! kernel. The crate evaluates that kernel ([`kernel`]) from Gauss
//! hypergeometric building blocks ([`specfun`]), discretises and solves the
//! equation ([`fredholm`]), simulates the model ([`fbm`]) and runs the
//! estimator over simulated paths ([`estimator`]).

pub mod error;
pub mod estimator;
pub mod fbm;
pub mod fredholm;
pub mod kernel;
pub mod quad;
pub mod specfun;

pub use error::{Error, ErrorCategory, Result};
pub use estimator::{
    estimate_theta, run_montecarlo, EstimationResult, HCache, MonteCarloConfig, MonteCarloSummary,
};
pub use fbm::{fbm_sample, mixed_path, MixedPath, RngSpec, SimulationMethod};
pub use fredholm::{
    manufactured_rhs, solve_mle_h, DiscreteSolution, Formulation, Grid, Solver, SolverConfig,
};
pub use kernel::{
    make_constants, HurstMode, HurstPair, KernelConstants, KernelModel, KernelOptions,
};
