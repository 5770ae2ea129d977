//! Trial harness: repeated seeded runs, summary statistics, and the CSV
//! rows the command-line tools emit.
//!
//! Trials are seeded `seed_base + k`, so any single trial can be re-run in
//! isolation. Records are produced in trial order, and their floating
//! fields are rounded to the CSV's six significant digits up front, so
//! statistics over records equal statistics recomputed from the file.

use crate::baselines::{sga_run, srm_run, SgaParams};
use crate::cro::{self, ReactorParams, RunResult};
use crate::io::{round_sig6, TrialRecord};
use crate::problem::ProblemInstance;

/// A solver with its configuration, ready to run on any instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Solver {
    Cro(ReactorParams),
    Srm { fe_limit: u64 },
    Sga(SgaParams),
}

impl Solver {
    /// The algorithm label used in reports and CSV rows.
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Cro(_) => "cro",
            Solver::Srm { .. } => "srm",
            Solver::Sga(_) => "sga",
        }
    }

    /// One seeded run. Deterministic per seed.
    pub fn run(&self, instance: &ProblemInstance, seed: u64) -> RunResult {
        match self {
            Solver::Cro(params) => cro::run(instance, params, seed),
            Solver::Srm { fe_limit } => srm_run(instance, *fe_limit, seed),
            Solver::Sga(params) => sga_run(instance, params, seed),
        }
    }
}

/// Mean, sample standard deviation, and best over a set of trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialStats {
    pub mean: f64,
    /// Sample standard deviation (divisor `trials - 1`); 0 by convention
    /// for a single trial.
    pub std: f64,
    pub best: f64,
    pub trials: usize,
}

/// Statistics over per-trial objective values. Panics on an empty slice.
pub fn trial_stats(values: &[f64]) -> TrialStats {
    assert!(!values.is_empty(), "statistics need at least one trial");
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n == 1 {
        0.0
    } else {
        let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        (ss / (n as f64 - 1.0)).sqrt()
    };
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    TrialStats {
        mean,
        std,
        best,
        trials: n,
    }
}

/// One CSV record for a finished run.
pub fn record_for(
    instance: &ProblemInstance,
    algorithm: &str,
    trial: u64,
    seed: u64,
    result: &RunResult,
) -> TrialRecord {
    let summary = instance.coverage_summary(&result.best_deployment);
    TrialRecord {
        trial,
        algorithm: algorithm.to_string(),
        c: instance.coverage_threshold(),
        alpha: instance.alpha(),
        seed,
        best_objective: round_sig6(result.best_objective),
        coverage_pct: round_sig6(summary.coverage_percent()),
        routes_selected: summary.sensor_count,
        evaluations: result.evaluations_used,
    }
}

/// Runs `trials` seeded trials of one solver and returns their records in
/// trial order.
pub fn run_trials(
    instance: &ProblemInstance,
    solver: &Solver,
    trials: usize,
    seed_base: u64,
) -> Vec<TrialRecord> {
    (0..trials)
        .map(|k| {
            let seed = seed_base + k as u64;
            let result = solver.run(instance, seed);
            record_for(instance, solver.name(), k as u64, seed, &result)
        })
        .collect()
}

/// Statistics over the objective column of a record block.
pub fn stats_of(records: &[TrialRecord]) -> TrialStats {
    let objectives: Vec<f64> = records.iter().map(|r| r.best_objective).collect();
    trial_stats(&objectives)
}
