//! Solvers and benchmarks for the bus sensor deployment problem: which bus
//! routes should carry air-quality sensors so that a city grid is covered
//! with as few sensors as possible?
//!
//! The crate models the problem as grid coverage ([`problem`]), solves it
//! with a chemical-reaction metaheuristic ([`cro`]), provides a random
//! sampler, a simple genetic algorithm, and an exhaustive oracle to compare
//! against ([`baselines`]), and ships the file formats and trial harness
//! the `bsdp` command-line tool is built on ([`io`], [`experiments`]).
//!
//! ```
//! use bsdp::problem::{Deployment, ProblemInstance};
//! use bsdp::cro::{run, ReactorParams};
//!
//! // Three routes over a 2x2 grid; the third one alone covers everything
//! // the other two cover together.
//! let instance = ProblemInstance::new(2, 2, vec![vec![0], vec![1], vec![0, 1]], 1, 0.5).unwrap();
//! let result = run(&instance, &ReactorParams::default(), 0);
//! assert_eq!(result.best_deployment, Deployment::from_bits(vec![false, false, true]));
//! ```

pub mod baselines;
pub mod cro;
pub mod experiments;
pub mod io;
pub mod problem;
pub mod rng;

pub use baselines::{exhaustive_optimum, sga_run, srm_run, SgaParams};
pub use cro::{run, Reactor, ReactorParams, RunResult};
pub use experiments::{run_trials, trial_stats, Solver, TrialStats};
pub use problem::{CoverageSummary, Deployment, InstanceError, ProblemInstance};
pub use rng::{RandomSource, SeededRng};

// Every code block in the guide compiles and runs as a doctest, so the
// book cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/coverage-model.md")]
    mod coverage_model {}
    #[doc = include_str!("../../../book/src/reaction-engine.md")]
    mod reaction_engine {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
