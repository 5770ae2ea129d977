//! The `bsdp` command line: generate instances, run single solves, and
//! reproduce the comparison and sweep experiment protocols.
//!
//! Every command validates its inputs before spending any evaluation
//! budget, and every command is byte-deterministic for a fixed seed: two
//! invocations with the same arguments produce identical stdout and
//! identical CSV files.

use anyhow::{anyhow, bail, Context, Result};
use bsdp::baselines::SgaParams;
use bsdp::cro::ReactorParams;
use bsdp::experiments::{run_trials, stats_of, Solver, TrialStats};
use bsdp::io::{
    format_sig6, generate_synthetic, parse_instance, write_results_csv, SyntheticParams,
    TrialRecord,
};
use bsdp::problem::ProblemInstance;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "bsdp",
    about = "Solvers and benchmarks for the bus sensor deployment problem",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic instance file from self-avoiding random walks.
    Gen(GenArgs),
    /// Run one solver once and print its result.
    Solve(SolveArgs),
    /// Run cro, srm, and sga over repeated seeded trials and summarize.
    Compare(CompareArgs),
    /// Sweep the coverage threshold and summarize cro per value.
    SweepC(SweepCArgs),
    /// Sweep one reactor parameter and summarize cro per value.
    SweepParams(SweepParamsArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 16)]
    pub cols: usize,
    #[arg(long, default_value_t = 11)]
    pub rows: usize,
    #[arg(long, default_value_t = 91)]
    pub routes: usize,
    /// Cells per route.
    #[arg(long, default_value_t = 20)]
    pub walk_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Destination instance file.
    #[arg(long)]
    pub out: PathBuf,
}

/// Flags shared by every command that consumes an instance file.
#[derive(Args, Debug)]
pub struct InstanceArgs {
    /// Instance file in `bsdp v1` format.
    #[arg(long)]
    pub instance: PathBuf,
    /// Override the file's coverage threshold.
    #[arg(long)]
    pub c: Option<usize>,
    /// Override the file's objective weight.
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl InstanceArgs {
    fn load(&self) -> Result<ProblemInstance> {
        let text = fs::read_to_string(&self.instance)
            .with_context(|| format!("cannot read {}", self.instance.display()))?;
        let mut instance = parse_instance(&text)
            .map_err(|e| anyhow!("{}: {e}", self.instance.display()))?;
        if let Some(c) = self.c {
            instance = instance
                .with_coverage_threshold(c)
                .map_err(|e| anyhow!("--c {c}: {e}"))?;
        }
        if let Some(alpha) = self.alpha {
            instance = instance
                .with_alpha(alpha)
                .map_err(|e| anyhow!("--alpha {alpha}: {e}"))?;
        }
        Ok(instance)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Cro,
    Srm,
    Sga,
}

/// Reactor parameter overrides accepted by `solve`.
#[derive(Args, Debug)]
pub struct CroOverrides {
    #[arg(long)]
    pub pop_size: Option<usize>,
    #[arg(long)]
    pub en_buff: Option<f64>,
    #[arg(long)]
    pub ini_ke: Option<f64>,
    #[arg(long)]
    pub coll_rate: Option<f64>,
    #[arg(long)]
    pub loss_rate: Option<f64>,
    #[arg(long)]
    pub dec_thres: Option<u64>,
    #[arg(long)]
    pub syn_thres: Option<f64>,
}

impl CroOverrides {
    fn apply(&self, fe_limit: u64) -> Result<ReactorParams> {
        let mut params = ReactorParams {
            fe_limit,
            ..ReactorParams::default()
        };
        if let Some(v) = self.pop_size {
            params.pop_size = v;
        }
        if let Some(v) = self.en_buff {
            params.initial_buffer = v;
        }
        if let Some(v) = self.ini_ke {
            params.initial_ke = v;
        }
        if let Some(v) = self.coll_rate {
            params.collision_rate = v;
        }
        if let Some(v) = self.loss_rate {
            params.loss_rate = v;
        }
        if let Some(v) = self.dec_thres {
            params.decomposition_threshold = v;
        }
        if let Some(v) = self.syn_thres {
            params.synthesis_threshold = v;
        }
        params.validate()?;
        Ok(params)
    }
}

/// Genetic-algorithm overrides accepted by `solve`.
#[derive(Args, Debug)]
pub struct SgaOverrides {
    #[arg(long)]
    pub crossover_rate: Option<f64>,
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    #[arg(long)]
    pub elitism: Option<usize>,
}

impl SgaOverrides {
    fn apply(&self, fe_limit: u64) -> Result<SgaParams> {
        let mut params = SgaParams {
            fe_limit,
            ..SgaParams::default()
        };
        if let Some(v) = self.crossover_rate {
            params.crossover_rate = v;
        }
        if let Some(v) = self.mutation_rate {
            params.mutation_rate = v;
        }
        if let Some(v) = self.elitism {
            params.elitism = v;
        }
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub fe_limit: u64,
    /// Write the run as a one-row results CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub cro: CroOverrides,
    #[command(flatten)]
    pub sga: SgaOverrides,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 10_000)]
    pub fe_limit: u64,
    /// Base seed; trial k runs with seed base + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write per-trial rows as a results CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepCArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Comma-separated coverage thresholds to test.
    #[arg(long, default_value = "1,2,3,4,5,6")]
    pub c_values: String,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 10_000)]
    pub fe_limit: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "EnBuff")]
    EnBuff,
    #[value(name = "IniKE")]
    IniKe,
    #[value(name = "CollRate")]
    CollRate,
    #[value(name = "LossRate")]
    LossRate,
    #[value(name = "DecThres")]
    DecThres,
    #[value(name = "SynThres")]
    SynThres,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::EnBuff => "EnBuff",
            SweepParam::IniKe => "IniKE",
            SweepParam::CollRate => "CollRate",
            SweepParam::LossRate => "LossRate",
            SweepParam::DecThres => "DecThres",
            SweepParam::SynThres => "SynThres",
        }
    }

    /// The value grid each parameter is swept over by default.
    fn default_values(self) -> &'static str {
        match self {
            SweepParam::EnBuff | SweepParam::IniKe => "0,10,100,1000,5000,10000",
            SweepParam::CollRate | SweepParam::LossRate => "0.1,0.2,0.4,0.6,0.8,0.9",
            SweepParam::DecThres => "100,300,500,1000,3000,5000",
            SweepParam::SynThres => "10,50,100,300,500,1000",
        }
    }

    /// Parses one swept value and installs it, rejecting anything outside
    /// the parameter's range.
    fn apply(self, params: &mut ReactorParams, token: &str) -> Result<()> {
        let bad = |reason: &str| anyhow!("{} value `{token}`: {reason}", self.name());
        match self {
            SweepParam::DecThres => {
                let v: u64 = token.parse().map_err(|_| bad("expected a positive integer"))?;
                params.decomposition_threshold = v;
            }
            _ => {
                let v: f64 = token.parse().map_err(|_| bad("expected a number"))?;
                match self {
                    SweepParam::EnBuff => params.initial_buffer = v,
                    SweepParam::IniKe => params.initial_ke = v,
                    SweepParam::CollRate => params.collision_rate = v,
                    SweepParam::LossRate => params.loss_rate = v,
                    SweepParam::SynThres => params.synthesis_threshold = v,
                    SweepParam::DecThres => unreachable!(),
                }
            }
        }
        params.validate()?;
        Ok(())
    }
}

#[derive(Args, Debug)]
pub struct SweepParamsArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Which reactor parameter to sweep.
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Comma-separated values; defaults to the parameter's standard grid.
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 10_000)]
    pub fe_limit: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Executes one parsed command, printing its report to `out`.
pub fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args, out),
        Command::Solve(args) => cmd_solve(args, out),
        Command::Compare(args) => cmd_compare(args, out),
        Command::SweepC(args) => cmd_sweep_c(args, out),
        Command::SweepParams(args) => cmd_sweep_params(args, out),
    }
}

fn describe(instance: &ProblemInstance) -> String {
    format!(
        "{}x{} grid, {} routes, c={}, alpha={}",
        instance.cols(),
        instance.rows(),
        instance.route_count(),
        instance.coverage_threshold(),
        format_sig6(instance.alpha())
    )
}

fn cmd_gen(args: GenArgs, out: &mut impl Write) -> Result<()> {
    let params = SyntheticParams {
        cols: args.cols,
        rows: args.rows,
        routes: args.routes,
        walk_len: args.walk_len,
    };
    let generated = generate_synthetic(&params, args.seed)?;
    fs::write(&args.out, &generated.text)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    writeln!(
        out,
        "wrote {} ({}x{} grid, {} routes, walk length {}, seed {})",
        args.out.display(),
        args.cols,
        args.rows,
        args.routes,
        args.walk_len,
        args.seed
    )?;
    writeln!(out, "coverable grids by threshold:")?;
    let cells = generated.instance.cell_count();
    for c in 1..=6 {
        match generated.instance.with_coverage_threshold(c) {
            Ok(inst) => {
                let coverable = inst.full_coverage_count();
                writeln!(
                    out,
                    "  c={c}: {coverable} ({}% of cells)",
                    format_sig6(100.0 * coverable as f64 / cells as f64)
                )?;
            }
            Err(_) => writeln!(out, "  c={c}: 0 (uncoverable)")?,
        }
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs, out: &mut impl Write) -> Result<()> {
    let instance = args.instance.load()?;
    if args.fe_limit == 0 {
        bail!("--fe-limit must be positive");
    }
    let solver = match args.algo {
        Algo::Cro => Solver::Cro(args.cro.apply(args.fe_limit)?),
        Algo::Srm => Solver::Srm {
            fe_limit: args.fe_limit,
        },
        Algo::Sga => Solver::Sga(args.sga.apply(args.fe_limit)?),
    };
    let result = solver.run(&instance, args.seed);
    let summary = instance.coverage_summary(&result.best_deployment);
    writeln!(out, "algorithm: {}", solver.name())?;
    writeln!(out, "instance: {}", describe(&instance))?;
    writeln!(out, "seed: {}", args.seed)?;
    writeln!(out, "fe limit: {}", args.fe_limit)?;
    writeln!(out, "best objective: {}", format_sig6(result.best_objective))?;
    writeln!(
        out,
        "coverage: {}% ({}/{} cells)",
        format_sig6(summary.coverage_percent()),
        summary.covered_count,
        summary.full_cover_count
    )?;
    writeln!(
        out,
        "routes selected: {}/{}",
        summary.sensor_count,
        instance.route_count()
    )?;
    writeln!(out, "evaluations used: {}", result.evaluations_used)?;
    if let Some(path) = &args.out {
        let record = bsdp::experiments::record_for(&instance, solver.name(), 0, args.seed, &result);
        write_results_csv(&[record], path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn write_stats_row(out: &mut impl Write, label: &str, stats: &TrialStats) -> Result<()> {
    writeln!(
        out,
        "{label:<12}{:>12}{:>12}{:>12}",
        format_sig6(stats.mean),
        format_sig6(stats.std),
        format_sig6(stats.best)
    )?;
    Ok(())
}

fn cmd_compare(args: CompareArgs, out: &mut impl Write) -> Result<()> {
    let instance = args.instance.load()?;
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    if args.fe_limit == 0 {
        bail!("--fe-limit must be positive");
    }
    let solvers = [
        Solver::Cro(ReactorParams {
            fe_limit: args.fe_limit,
            ..ReactorParams::default()
        }),
        Solver::Srm {
            fe_limit: args.fe_limit,
        },
        Solver::Sga(SgaParams {
            fe_limit: args.fe_limit,
            ..SgaParams::default()
        }),
    ];
    writeln!(out, "instance: {}", describe(&instance))?;
    writeln!(
        out,
        "trials: {}, fe limit: {}, seeds: {}..{}",
        args.trials,
        args.fe_limit,
        args.seed,
        args.seed + args.trials as u64 - 1
    )?;
    writeln!(out)?;
    writeln!(out, "{:<12}{:>12}{:>12}{:>12}", "algorithm", "mean", "std", "best")?;
    let mut records: Vec<TrialRecord> = Vec::new();
    for solver in &solvers {
        let block = run_trials(&instance, solver, args.trials, args.seed);
        write_stats_row(out, solver.name(), &stats_of(&block))?;
        records.extend(block);
    }
    if let Some(path) = &args.out {
        write_results_csv(&records, path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn parse_value_list(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn cmd_sweep_c(args: SweepCArgs, out: &mut impl Write) -> Result<()> {
    let base = args.instance.load()?;
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    if args.fe_limit == 0 {
        bail!("--fe-limit must be positive");
    }
    let mut thresholds = Vec::new();
    for token in parse_value_list(&args.c_values) {
        let c: usize = token
            .parse()
            .map_err(|_| anyhow!("--c-values entry `{token}`: expected a positive integer"))?;
        if c == 0 {
            bail!("--c-values entry `0`: the coverage threshold must be positive");
        }
        thresholds.push(c);
    }
    if thresholds.is_empty() {
        bail!("--c-values must name at least one threshold");
    }
    writeln!(
        out,
        "instance: {}x{} grid, {} routes, alpha={}",
        base.cols(),
        base.rows(),
        base.route_count(),
        format_sig6(base.alpha())
    )?;
    writeln!(
        out,
        "trials: {}, fe limit: {}, seeds: {}..{}",
        args.trials,
        args.fe_limit,
        args.seed,
        args.seed + args.trials as u64 - 1
    )?;
    writeln!(out)?;
    writeln!(
        out,
        "{:>3}{:>11}{:>11}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}",
        "c",
        "coverable",
        "pct_cells",
        "mean",
        "std",
        "best",
        "avg_cov%",
        "avg_routes",
        "best_cov%",
        "best_routes"
    )?;
    let params = ReactorParams {
        fe_limit: args.fe_limit,
        ..ReactorParams::default()
    };
    let mut records: Vec<TrialRecord> = Vec::new();
    for &c in &thresholds {
        let instance = match base.with_coverage_threshold(c) {
            Ok(instance) => instance,
            Err(e) => {
                writeln!(out, "{c:>3}  skipped: {e}")?;
                continue;
            }
        };
        let block = run_trials(&instance, &Solver::Cro(params.clone()), args.trials, args.seed);
        let stats = stats_of(&block);
        let coverable = instance.full_coverage_count();
        let pct_cells = 100.0 * coverable as f64 / instance.cell_count() as f64;
        let avg_cov = block.iter().map(|r| r.coverage_pct).sum::<f64>() / block.len() as f64;
        let avg_routes =
            block.iter().map(|r| r.routes_selected as f64).sum::<f64>() / block.len() as f64;
        let winner = block
            .iter()
            .min_by(|a, b| a.best_objective.total_cmp(&b.best_objective).then(a.trial.cmp(&b.trial)))
            .expect("at least one trial");
        writeln!(
            out,
            "{c:>3}{coverable:>11}{:>11}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}",
            format_sig6(pct_cells),
            format_sig6(stats.mean),
            format_sig6(stats.std),
            format_sig6(stats.best),
            format_sig6(avg_cov),
            format_sig6(avg_routes),
            format_sig6(winner.coverage_pct),
            winner.routes_selected
        )?;
        records.extend(block);
    }
    if let Some(path) = &args.out {
        write_results_csv(&records, path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn cmd_sweep_params(args: SweepParamsArgs, out: &mut impl Write) -> Result<()> {
    let instance = args.instance.load()?;
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    if args.fe_limit == 0 {
        bail!("--fe-limit must be positive");
    }
    let value_list = args
        .values
        .clone()
        .unwrap_or_else(|| args.param.default_values().to_string());
    let tokens = parse_value_list(&value_list);
    if tokens.is_empty() {
        bail!("--values must name at least one value");
    }
    // Validate every value before any run.
    let mut configured: Vec<(String, ReactorParams)> = Vec::new();
    for token in tokens {
        let mut params = ReactorParams {
            fe_limit: args.fe_limit,
            ..ReactorParams::default()
        };
        args.param.apply(&mut params, &token)?;
        configured.push((token, params));
    }
    writeln!(out, "instance: {}", describe(&instance))?;
    writeln!(out, "parameter: {} (others at defaults)", args.param.name())?;
    writeln!(
        out,
        "trials: {}, fe limit: {}, seeds: {}..{}",
        args.trials,
        args.fe_limit,
        args.seed,
        args.seed + args.trials as u64 - 1
    )?;
    writeln!(out)?;
    writeln!(out, "{:>10}{:>12}{:>12}{:>12}", "value", "mean", "std", "best")?;
    let mut records: Vec<TrialRecord> = Vec::new();
    for (token, params) in &configured {
        let block = run_trials(&instance, &Solver::Cro(params.clone()), args.trials, args.seed);
        let stats = stats_of(&block);
        writeln!(
            out,
            "{token:>10}{:>12}{:>12}{:>12}",
            format_sig6(stats.mean),
            format_sig6(stats.std),
            format_sig6(stats.best)
        )?;
        records.extend(block);
    }
    if let Some(path) = &args.out {
        write_results_csv(&records, path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
