//! Command-line front end for freshness-aware contract design.
//!
//! One invocation loads a scenario (JSON file, defaults, overrides),
//! echoes the effective config into the output directory, runs one
//! command, and writes its artifacts:
//!
//! * `solve` — the configured mechanism, `solve_result.json`;
//! * `verify` — solve plus constraint and menu-structure certificates,
//!   `verification_report.json`;
//! * `choice-matrix` — every type's utility for every screening item,
//!   `choice_matrix.{csv,json}`;
//! * `sweep-a` — all mechanisms across idle durations 1..=15,
//!   `sweep_a.{csv,json}`;
//! * `sweep-alpha` — the screening contract across preference weights
//!   0.1..=0.9, `sweep_alpha.{csv,json}`;
//! * `compare` — one summary row per mechanism, `compare.{csv,json}`;
//! * `simulate-timing` — workflow round-timing statistics,
//!   `timing_summary.json` and `trace.jsonl`.
//!
//! Exit codes: 0 success (including verification that certifies an
//! infeasible menu), 1 configuration/usage/IO errors, 2 infeasible
//! scenarios, 3 internal numeric failures. Diagnostics go to stderr;
//! stdout carries a single deterministic summary line per run.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aoi_contract::economics::{self, Lemma1Report, Population, Violation};
use aoi_contract::experiments::{
    self, write_choice_matrix_csv, write_compare_csv, write_sweep_a_csv, write_sweep_alpha_csv,
    ScenarioConfig,
};
use aoi_contract::flsim;
use aoi_contract::freshness::FreshnessVariant;
use aoi_contract::solver::{Mechanism, SolveResult};
use aoi_contract::{Error, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "aoi-contract",
    version,
    about = "Freshness-aware contract design for blockchain-coordinated federated learning"
)]
struct Cli {
    /// Scenario config file (JSON); omitted means the reference defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory the artifacts are written into.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Override one config field, e.g. `--set provider.alpha=0.9`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Seed override for sampled populations and the timing simulator.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Freshness closed-form variant override.
    #[arg(long, global = true, value_enum, value_name = "VARIANT")]
    variant: Option<VariantArg>,

    #[command(subcommand)]
    command: Command,
}

/// CLI-facing names for the freshness closed-form variants.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    /// Closed forms exactly as printed in the study.
    Paper,
    /// Enumeration-consistent closed forms.
    Oracle,
}

impl From<VariantArg> for FreshnessVariant {
    fn from(arg: VariantArg) -> Self {
        match arg {
            VariantArg::Paper => FreshnessVariant::PaperForm,
            VariantArg::Oracle => FreshnessVariant::OracleForm,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured mechanism.
    Solve,
    /// Solve, then certify the menu against the selection and structure
    /// conditions.
    Verify,
    /// Tabulate every type's utility for every screening item.
    ChoiceMatrix,
    /// Sweep idle duration a = 1..=15 across all three mechanisms.
    SweepA,
    /// Sweep the shared preference weight across 0.1..=0.9.
    SweepAlpha,
    /// Compare all three mechanisms on one scenario.
    Compare,
    /// Simulate workflow round timing.
    SimulateTiming,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Maps the error taxonomy onto process exit codes.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Domain { .. } => 1,
        Error::Infeasible(_) | Error::NonpositivePerformance { .. } => 2,
        Error::Numeric(_) => 3,
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = config::load(
        cli.config.as_deref(),
        &cli.set,
        cli.seed,
        cli.variant.map(FreshnessVariant::from),
    )?;
    fs::create_dir_all(&cli.out).map_err(|e| {
        Error::config(cli.out.display().to_string(), format!("cannot create: {e}"))
    })?;
    write_json(&cli.out.join("effective_config.json"), &cfg)?;
    match cli.command {
        Command::Solve => cmd_solve(&cli.out, &cfg),
        Command::Verify => cmd_verify(&cli.out, &cfg),
        Command::ChoiceMatrix => cmd_choice_matrix(&cli.out, &cfg),
        Command::SweepA => cmd_sweep_a(&cli.out, &cfg),
        Command::SweepAlpha => cmd_sweep_alpha(&cli.out, &cfg),
        Command::Compare => cmd_compare(&cli.out, &cfg),
        Command::SimulateTiming => cmd_simulate_timing(&cli.out, &cfg),
    }
}

/// Pretty JSON plus a trailing newline, so artifacts diff cleanly.
fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numeric(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| Error::config(path.display().to_string(), format!("cannot write: {e}")))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes)
        .map_err(|e| Error::config(path.display().to_string(), format!("cannot write: {e}")))
}

fn cmd_solve(out: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let result = experiments::solve_scenario(cfg)?;
    write_json(&out.join("solve_result.json"), &result)?;
    println!(
        "solve mechanism={} feasible={} provider_utility={:.11e} ironed_groups={}",
        result.mechanism,
        result.menu.feasible,
        result.provider_utility,
        result.ironed_groups.len()
    );
    Ok(())
}

/// Everything `verify` certifies about one solved menu.
#[derive(Serialize)]
struct VerificationReport {
    mechanism: Mechanism,
    feasible: bool,
    violations: Vec<Violation>,
    structure: Lemma1Report,
    result: SolveResult,
}

fn cmd_verify(out: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let result = experiments::solve_scenario(cfg)?;
    let pop: Population = experiments::build_population(cfg)?;
    let structure = economics::check_lemma1(&result.menu.items, &pop);
    let report = VerificationReport {
        mechanism: result.mechanism,
        feasible: result.menu.feasible,
        violations: result.menu.violations.clone(),
        structure,
        result,
    };
    write_json(&out.join("verification_report.json"), &report)?;
    println!(
        "verify mechanism={} feasible={} violations={} structure={}",
        report.mechanism,
        report.feasible,
        report.violations.len(),
        report.structure.all_hold()
    );
    Ok(())
}

fn cmd_choice_matrix(out: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let matrix = experiments::choice_matrix(cfg)?;
    let mut csv = Vec::new();
    write_choice_matrix_csv(&mut csv, &matrix)
        .map_err(|e| Error::Numeric(format!("choice matrix CSV: {e}")))?;
    write_bytes(&out.join("choice_matrix.csv"), &csv)?;
    write_json(&out.join("choice_matrix.json"), &matrix)?;
    println!(
        "choice-matrix types={} feasible={}",
        matrix.utilities.len(),
        matrix.result.menu.feasible
    );
    Ok(())
}

fn cmd_sweep_a(out: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let a_values: Vec<u32> = (1..=15).collect();
    let sweep = experiments::sweep_duration(cfg, &a_values)?;
    let mut csv = Vec::new();
    write_sweep_a_csv(&mut csv, &sweep)
        .map_err(|e| Error::Numeric(format!("duration sweep CSV: {e}")))?;
    write_bytes(&out.join("sweep_a.csv"), &csv)?;
    write_json(&out.join("sweep_a.json"), &sweep)?;
    let feasible = sweep.points.iter().filter(|p| p.ca.is_some()).count();
    println!("sweep-a points={} feasible_ca_points={}", sweep.points.len(), feasible);
    Ok(())
}

fn cmd_sweep_alpha(out: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let alpha_values: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let sweep = experiments::sweep_alpha(cfg, &alpha_values)?;
    let mut csv = Vec::new();
    write_sweep_alpha_csv(&mut csv, &sweep)
        .map_err(|e| Error::Numeric(format!("preference sweep CSV: {e}")))?;
    write_bytes(&out.join("sweep_alpha.csv"), &csv)?;
    write_json(&out.join("sweep_alpha.json"), &sweep)?;
    let feasible = sweep.points.iter().filter(|p| p.result.is_some()).count();
    println!("sweep-alpha points={} feasible_points={}", sweep.points.len(), feasible);
    Ok(())
}

fn cmd_compare(out: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let cmp = experiments::compare_mechanisms(cfg)?;
    let mut csv = Vec::new();
    write_compare_csv(&mut csv, &cmp)
        .map_err(|e| Error::Numeric(format!("comparison CSV: {e}")))?;
    write_bytes(&out.join("compare.csv"), &csv)?;
    write_json(&out.join("compare.json"), &cmp)?;
    let mut line = String::from("compare");
    for row in &cmp.rows {
        let cell = row
            .provider_utility
            .map(|u| format!("{u:.11e}"))
            .unwrap_or_else(|| "infeasible".to_string());
        line.push_str(&format!(" {}={}", row.mechanism, cell));
    }
    println!("{line}");
    Ok(())
}

fn cmd_simulate_timing(out: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let summary = flsim::summarize(&cfg.workflow);
    write_json(&out.join("timing_summary.json"), &summary)?;
    let mut trace = Vec::new();
    for event in flsim::emit_trace(&cfg.workflow) {
        let line = serde_json::to_string(&event)
            .map_err(|e| Error::Numeric(format!("trace event: {e}")))?;
        trace.extend_from_slice(line.as_bytes());
        trace.push(b'\n');
    }
    write_bytes(&out.join("trace.jsonl"), &trace)?;
    println!(
        "simulate-timing epochs={} mean_round_time={:.11e}",
        summary.epochs, summary.t
    );
    Ok(())
}
