//! `ncrs`: run, sweep, validate and size comparison-oracle random search.
//!
//! Exit codes: 0 success, 1 runtime or check failure, 2 usage or
//! configuration error. Only machine-readable output goes to stdout.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncrs_core::algorithms::{vote_params, VoteRecipeInput};
use ncrs_core::diagnostics::{run_suite, CheckReport, SuiteOptions};
use ncrs_core::harness::{cell_id, run_one, run_sweep, to_json, write_json, write_trajectory_csv, RunConfig, SweepPlan};
use ncrs_core::oracles::{ConfidenceKind, LinkFunction, LinkKind};
use ncrs_core::Error;

#[derive(Parser, Debug)]
#[command(name = "ncrs", version, about = "Comparison-oracle random search on synthetic ridge objectives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one configuration under one seed and print its summary as JSON.
    Run(RunArgs),
    /// Run every cell of a sweep plan and print the aggregate as JSON.
    Sweep(SweepArgs),
    /// Run the diagnostic suite and print a pass/fail table.
    Validate(ValidateArgs),
    /// Print the vote-NCRS step size, iteration count and vote count for a target.
    Params(ParamsArgs),
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set oracle.p=0.25`. Repeatable; later wins.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for `<cell>/<seed>.csv` and `<cell>/<seed>.json`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory; overrides `sweep.output`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (default: available CPUs); results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Multiplier on every default sample size.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available CPUs).
    #[arg(long)]
    workers: Option<usize>,
    /// Also run the ranking-penalty checks.
    #[arg(long)]
    slow: bool,
    /// Print reports as JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Run only checks whose name contains this text.
    #[arg(long, value_name = "TEXT")]
    filter: Option<String>,
    /// Also write the reports as JSON to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ParamsArgs {
    /// Target averaged gradient norm, in (0, 1).
    #[arg(long)]
    epsilon: f64,
    /// Smoothness constant L_f.
    #[arg(long)]
    smoothness: f64,
    /// Intrinsic dimension.
    #[arg(long)]
    k: usize,
    /// Initial suboptimality f(θ¹) - f★.
    #[arg(long)]
    delta_f: f64,
    /// Oracle kind used to derive c, C and ρ(r) when they are not given.
    #[arg(long, default_value = "engage_abstain")]
    oracle: String,
    /// Link family: logistic, probit or arctan.
    #[arg(long, default_value = "logistic")]
    link: String,
    /// Link scale (τ or σ₀).
    #[arg(long, default_value_t = 1.0)]
    link_scale: f64,
    /// Linearity constant c.
    #[arg(long)]
    c: Option<f64>,
    /// Second-moment constant C.
    #[arg(long)]
    big_c: Option<f64>,
    /// Signal at the linearity radius, ρ(r).
    #[arg(long)]
    rho_r: Option<f64>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_config_error() { 2 } else { 1 }, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn runtime(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| runtime(format!("stdout: {e}")))
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig, Failure> {
    Ok(match &args.config {
        Some(path) => RunConfig::load(path, &args.overrides)?,
        None => RunConfig::from_toml_with_overrides("", &args.overrides)?,
    })
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let (trajectory, summary) = run_one(&config, args.seed)?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(dir) = &args.out {
        let base = dir.join(cell_id(&config));
        write_trajectory_csv(&base.join(format!("{}.csv", args.seed)), &trajectory)?;
        write_json(&base.join(format!("{}.json", args.seed)), &summary)?;
    }
    emit(&to_json(&summary)?)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let plan = match &args.config.config {
        Some(path) => SweepPlan::load(path, &args.config.overrides)?,
        None => SweepPlan::from_toml_str("", &args.config.overrides)?,
    };
    let out = args.out.as_deref().or(plan.axes.output.as_deref());
    let result = run_sweep(&plan, args.workers.unwrap_or_else(default_workers), out)?;
    for r in &result.runs {
        if let Err(e) = &r.result {
            eprintln!("run failed: cell {} seed {}: {e}", r.cell, r.seed);
        }
    }
    emit(&to_json(&result.aggregate)?)?;
    if result.aggregate.failures > 0 {
        return Err(runtime(format!("{} of {} runs failed", result.aggregate.failures, result.aggregate.runs)));
    }
    Ok(())
}

fn format_values(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(" ")
}

fn report_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<6} {:<width$} {:>9}  {}\n", "status", "name", "n", "estimate | theory | se");
    for r in reports {
        out.push_str(&format!(
            "{:<6} {:<width$} {:>9}  {} | {} | {}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.n_samples,
            format_values(&r.estimates),
            format_values(&r.theory),
            format_values(&r.std_errors),
        ));
    }
    out
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    if !(args.scale > 0.0 && args.scale.is_finite()) {
        return Err(usage(format!("--scale must be > 0, got {}", args.scale)));
    }
    let options = SuiteOptions {
        seed: args.seed,
        scale: args.scale,
        include_slow: args.slow,
        workers: args.workers.unwrap_or_else(default_workers),
        filter: args.filter.clone(),
    };
    let reports = run_suite(&options)?;
    if let Some(path) = &args.out {
        write_json(path, &reports)?;
    }
    if args.json {
        emit(&to_json(&reports)?)?;
    } else {
        emit(&report_table(&reports))?;
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("{} checks, {} failed", reports.len(), failed);
    if failed > 0 {
        return Err(runtime(format!("{failed} diagnostic checks failed")));
    }
    Ok(())
}

fn parse_enum<T: serde::de::DeserializeOwned>(what: &str, value: &str) -> Result<T, Failure> {
    serde_json::from_value(serde_json::Value::String(value.to_string()))
        .map_err(|_| usage(format!("unknown {what} `{value}`")))
}

fn cmd_params(args: &ParamsArgs) -> Result<(), Failure> {
    let kind: ConfidenceKind = parse_enum("oracle kind", &args.oracle)?;
    let link_kind: LinkKind = parse_enum("link", &args.link)?;
    let link = LinkFunction::new(link_kind, args.link_scale)?;
    let consts = kind.constants(&link);
    let input = VoteRecipeInput {
        epsilon: args.epsilon,
        smoothness: args.smoothness,
        k: args.k,
        delta_f: args.delta_f,
        c: args.c.unwrap_or(consts.c),
        big_c: args.big_c.unwrap_or(consts.second_moment),
        rho_r: args.rho_r.unwrap_or_else(|| kind.signal(&link, consts.r)),
    };
    let params = vote_params(&input)?;
    let doc = serde_json::json!({ "input": input, "params": params });
    emit(&to_json(&doc)?)
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Params(a) => cmd_params(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
