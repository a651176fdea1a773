//! Scenario configuration, population construction, parameter sweeps, and
//! mechanism comparison, plus the CSV emitters the CLI writes.
//!
//! A [`ScenarioConfig`] captures one full experiment: timing structure,
//! worker population, provider economics, solver grid, mechanism, and the
//! seed for anything sampled. Every field has a default, and the defaults
//! reproduce the reference scenario the numerical study is built around:
//! `t = 2`, `a = 2`, `c ∈ [1, 15]`, `β = 20`, `K = 200`, `H = 50`,
//! `M = 20`, ten types with `γ` equally spaced across `[0.001, 0.01]`,
//! `α = 0.5`, and a `φ = 1e−6` grid from `f_min = 1e−5` up to the physical
//! cap `1/((c_min + a)·t)`.
//!
//! The harness functions mirror the study's figures:
//!
//! * [`choice_matrix`] — the N×N table of type-i utility for item j, the
//!   self-selection evidence;
//! * [`sweep_duration`] — all three mechanisms across idle durations `a`;
//! * [`sweep_alpha`] — the screening contract across preference weights,
//!   with implied update-cycle counts per type;
//! * [`compare_mechanisms`] — one summary row per mechanism.
//!
//! All sweep outputs are deterministic given the config (wall-clock timings
//! in [`MechanismComparison`] excepted) and serialize to both JSON and CSV;
//! CSV cells for infeasible points are left empty rather than dropped.

use std::io;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::economics::{self, Population, ProviderEconomics, WorkerType};
use crate::error::{Error, Result};
use crate::flsim::WorkflowConfig;
use crate::freshness::{FreshnessVariant, TimingParams};
use crate::solver::{self, Mechanism, SolveResult, SolverParams};

/// How the γ grid of the population is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    /// Equally spaced across `[gamma_min, gamma_max]`, endpoints included.
    #[default]
    Grid,
    /// Uniform draws across the range, sorted; reproducible from the seed.
    Sampled,
}

/// Timing section of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingConfig {
    /// Period length `t` in seconds.
    pub t: f64,
    /// Idle periods `a` per update cycle.
    pub a: u32,
    /// Smallest admissible collection-period count.
    pub c_min: u32,
    /// Largest admissible collection-period count.
    pub c_max: u32,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig { t: 2.0, a: 2, c_min: 1, c_max: 15 }
    }
}

/// Population section of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopulationConfig {
    /// Workers recruited per type draw, `M`.
    pub m: u32,
    /// Number of types `N`.
    pub n: usize,
    /// Lower end of the γ range.
    pub gamma_min: f64,
    /// Upper end of the γ range.
    pub gamma_max: f64,
    /// How γ values are placed in the range.
    pub distribution: DistributionKind,
}

impl Default for PopulationConfig {
    fn default() -> Self {
        PopulationConfig {
            m: 20,
            n: 10,
            gamma_min: 0.001,
            gamma_max: 0.01,
            distribution: DistributionKind::Grid,
        }
    }
}

/// Provider section of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    /// Unit satisfaction profit `β`.
    pub beta: f64,
    /// Maximum tolerable average AoI `K`, seconds.
    pub k: f64,
    /// Maximum tolerable average latency `H`, seconds.
    pub h: f64,
    /// Shared AoI preference weight `α` applied to every type.
    pub alpha: f64,
    /// Optional per-type preference weights (length must equal `n`);
    /// overrides `alpha` when present.
    pub alphas: Option<Vec<f64>>,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig { beta: 20.0, k: 200.0, h: 50.0, alpha: 0.5, alphas: None }
    }
}

/// Solver section of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Smallest candidate frequency.
    pub f_min: f64,
    /// Largest candidate frequency; `null` resolves to the physical cap
    /// `1/((c_min + a)·t)`.
    pub f_max: Option<f64>,
    /// Grid step `φ`.
    pub phi: f64,
    /// Freshness closed forms to evaluate.
    pub variant: FreshnessVariant,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { f_min: 1e-5, f_max: None, phi: 1e-6, variant: FreshnessVariant::PaperForm }
    }
}

/// One complete experiment description; every field has a default and the
/// defaults are the reference scenario.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Timing structure of the update cycle.
    pub timing: TimingConfig,
    /// Worker population.
    pub population: PopulationConfig,
    /// Provider economics and preference weights.
    pub provider: ProviderConfig,
    /// Grid-search knobs.
    pub solver: SolverConfig,
    /// Which mechanism `solve`-style commands compute.
    pub mechanism: Mechanism,
    /// Seed for anything sampled (population draws).
    pub seed: u64,
    /// Workflow timing simulation parameters.
    pub workflow: WorkflowConfig,
}

impl ScenarioConfig {
    /// Validated timing parameters.
    pub fn timing_params(&self) -> Result<TimingParams> {
        TimingParams::new(self.timing.t, self.timing.a, self.timing.c_min, self.timing.c_max)
    }

    /// Validated provider economics (`M` comes from the population section).
    pub fn provider_economics(&self) -> Result<ProviderEconomics> {
        ProviderEconomics::new(self.provider.beta, self.provider.k, self.provider.h, self.population.m)
    }

    /// Validated solver parameters with `f_max` resolved against this
    /// scenario's timing (a configured `f_max` is taken as given; `null`
    /// resolves to the physical cap).
    pub fn solver_params(&self) -> Result<SolverParams> {
        let timing = self.timing_params()?;
        self.solver_params_for(&timing)
    }

    /// Solver parameters resolved against an explicit timing (used by
    /// sweeps that vary `a`): the effective `f_max` is capped at that
    /// timing's `1/((c_min + a)·t)` so every sweep point stays inside its
    /// own physical frequency range.
    pub fn solver_params_for(&self, timing: &TimingParams) -> Result<SolverParams> {
        let auto = timing.auto_f_max();
        let f_max = match self.solver.f_max {
            Some(v) => v.min(auto),
            None => auto,
        };
        let params = SolverParams {
            f_min: self.solver.f_min,
            f_max,
            phi: self.solver.phi,
            variant: self.solver.variant,
        };
        params.validate(timing)?;
        Ok(params)
    }

    /// Checks every section, including population construction.
    pub fn validate(&self) -> Result<()> {
        self.timing_params()?;
        self.provider_economics()?;
        self.solver_params()?;
        build_population(self)?;
        self.workflow.validate()?;
        Ok(())
    }
}

/// Builds the worker population a scenario describes.
///
/// `grid` places `γ` equally spaced across `[gamma_min, gamma_max]`
/// (endpoints included; a single type sits at `gamma_min`); `sampled`
/// draws uniformly and sorts, reproducibly from the scenario seed. Weights
/// are uniform, `Q_n = 1/N`; preference weights come from
/// `provider.alphas` when present (one per type) and `provider.alpha`
/// otherwise.
pub fn build_population(cfg: &ScenarioConfig) -> Result<Population> {
    let p = &cfg.population;
    if p.n < 1 {
        return Err(Error::config("population.n", "need at least one type"));
    }
    if !(p.gamma_min.is_finite() && p.gamma_min > 0.0) {
        return Err(Error::config(
            "population.gamma_min",
            format!("must be positive and finite, got {}", p.gamma_min),
        ));
    }
    if !(p.gamma_max.is_finite() && p.gamma_max >= p.gamma_min) {
        return Err(Error::config(
            "population.gamma_max",
            format!("must be finite and at least gamma_min, got {}", p.gamma_max),
        ));
    }
    let gammas: Vec<f64> = match p.distribution {
        DistributionKind::Grid => {
            if p.n == 1 {
                vec![p.gamma_min]
            } else {
                let step = (p.gamma_max - p.gamma_min) / (p.n - 1) as f64;
                (0..p.n).map(|i| p.gamma_min + i as f64 * step).collect()
            }
        }
        DistributionKind::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut draws: Vec<f64> = (0..p.n)
                .map(|_| rng.random_range(p.gamma_min..=p.gamma_max))
                .collect();
            draws.sort_by(|x, y| x.partial_cmp(y).expect("gamma draws are finite"));
            draws
        }
    };
    let alphas: Vec<f64> = match &cfg.provider.alphas {
        Some(list) => {
            if list.len() != p.n {
                return Err(Error::config(
                    "provider.alphas",
                    format!("holds {} entries for {} types", list.len(), p.n),
                ));
            }
            list.clone()
        }
        None => vec![cfg.provider.alpha; p.n],
    };
    let q = 1.0 / p.n as f64;
    let types = gammas
        .into_iter()
        .zip(alphas)
        .enumerate()
        .map(|(pos, (gamma, alpha))| WorkerType { index: pos + 1, gamma, q, alpha })
        .collect();
    Population::new(types)
}

fn scenario_parts(
    cfg: &ScenarioConfig,
) -> Result<(Population, ProviderEconomics, TimingParams, SolverParams)> {
    let timing = cfg.timing_params()?;
    let econ = cfg.provider_economics()?;
    let params = cfg.solver_params_for(&timing)?;
    let pop = build_population(cfg)?;
    Ok((pop, econ, timing, params))
}

/// Solves the scenario's configured mechanism.
pub fn solve_scenario(cfg: &ScenarioConfig) -> Result<SolveResult> {
    let (pop, econ, timing, params) = scenario_parts(cfg)?;
    solver::solve(cfg.mechanism, &pop, &econ, &timing, &params)
}

/// The self-selection evidence: entry `(i, j)` is the utility type `i`
/// derives from item `j` of the screening menu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceMatrix {
    /// The underlying screening solve.
    pub result: SolveResult,
    /// Row `i`, column `j`: utility of type `i+1` taking item `j+1`.
    pub utilities: Vec<Vec<f64>>,
}

/// Solves the screening contract and tabulates every type's utility for
/// every item. A feasible menu shows its maxima on the diagonal.
pub fn choice_matrix(cfg: &ScenarioConfig) -> Result<ChoiceMatrix> {
    let (pop, econ, timing, params) = scenario_parts(cfg)?;
    let result = solver::solve_ca(&pop, &econ, &timing, &params)?;
    let utilities = pop
        .types()
        .iter()
        .map(|ty| {
            result
                .menu
                .items
                .iter()
                .map(|item| economics::worker_utility(item, ty))
                .collect()
        })
        .collect();
    Ok(ChoiceMatrix { result, utilities })
}

/// One idle-duration sweep point; a mechanism is `None` when the scenario
/// is infeasible at that duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationPoint {
    /// Idle periods per cycle at this point.
    pub a: u32,
    /// Screening contract, if feasible.
    pub ca: Option<SolveResult>,
    /// Complete-information baseline, if feasible.
    pub cc: Option<SolveResult>,
    /// Welfare contract, if feasible.
    pub cs: Option<SolveResult>,
}

/// Result of [`sweep_duration`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationSweep {
    /// One point per requested `a`, in request order.
    pub points: Vec<DurationPoint>,
}

fn solve_or_mark(
    mech: Mechanism,
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    params: &SolverParams,
) -> Result<Option<SolveResult>> {
    match solver::solve(mech, pop, econ, timing, params) {
        Ok(result) => Ok(Some(result)),
        Err(Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Solves all three mechanisms at each idle duration.
///
/// The frequency cap is recomputed per point (`f_max` follows the physics
/// of each `a`); points where a mechanism is infeasible carry `None` for
/// it rather than failing the sweep.
pub fn sweep_duration(cfg: &ScenarioConfig, a_values: &[u32]) -> Result<DurationSweep> {
    let econ = cfg.provider_economics()?;
    let pop = build_population(cfg)?;
    let mut points = Vec::with_capacity(a_values.len());
    for &a in a_values {
        let timing = TimingParams::new(cfg.timing.t, a, cfg.timing.c_min, cfg.timing.c_max)?;
        let params = cfg.solver_params_for(&timing)?;
        points.push(DurationPoint {
            a,
            ca: solve_or_mark(Mechanism::Ca, &pop, &econ, &timing, &params)?,
            cc: solve_or_mark(Mechanism::Cc, &pop, &econ, &timing, &params)?,
            cs: solve_or_mark(Mechanism::Cs, &pop, &econ, &timing, &params)?,
        });
    }
    Ok(DurationSweep { points })
}

/// One preference-weight sweep point (screening contract only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    /// Shared preference weight applied to every type at this point.
    pub alpha: f64,
    /// The screening solve, if feasible.
    pub result: Option<SolveResult>,
    /// Implied collection-period counts `1/(f·t) − a` per type
    /// (continuous).
    pub cycles_raw: Vec<f64>,
    /// The same counts rounded to the nearest integer.
    pub cycles_rounded: Vec<i64>,
}

/// Result of [`sweep_alpha`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweep {
    /// One point per requested weight, in request order.
    pub points: Vec<AlphaSweepPoint>,
}

/// Alias kept local to the sweep container.
pub type AlphaSweepPoint = AlphaPoint;

/// Solves the screening contract at each shared preference weight.
///
/// Each point overrides every type's `α` with the swept value (any
/// configured per-type weights are ignored here); weights must lie in
/// `[0, 1]`. Infeasible points carry `None`.
pub fn sweep_alpha(cfg: &ScenarioConfig, alpha_values: &[f64]) -> Result<AlphaSweep> {
    let timing = cfg.timing_params()?;
    let econ = cfg.provider_economics()?;
    let params = cfg.solver_params_for(&timing)?;
    let base = build_population(cfg)?;
    let mut points = Vec::with_capacity(alpha_values.len());
    for &alpha in alpha_values {
        if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
            return Err(Error::domain(
                "preference sweep",
                format!("alpha must lie in [0, 1], got {alpha}"),
            ));
        }
        let types: Vec<WorkerType> = base
            .types()
            .iter()
            .map(|ty| WorkerType { alpha, ..*ty })
            .collect();
        let pop = Population::new(types)?;
        let result = solve_or_mark(Mechanism::Ca, &pop, &econ, &timing, &params)?;
        let (cycles_raw, cycles_rounded) = match &result {
            Some(res) => {
                let raw: Vec<f64> = res
                    .f_star
                    .iter()
                    .map(|f| 1.0 / (f * timing.t) - timing.a as f64)
                    .collect();
                let rounded = raw.iter().map(|c| c.round() as i64).collect();
                (raw, rounded)
            }
            None => (Vec::new(), Vec::new()),
        };
        points.push(AlphaPoint { alpha, result, cycles_raw, cycles_rounded });
    }
    Ok(AlphaSweep { points })
}

/// One row of the mechanism comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    /// Which mechanism the row describes.
    pub mechanism: Mechanism,
    /// Whether the menu passed verification; `None` if infeasible to solve.
    pub feasible: Option<bool>,
    /// Provider utility, if solved.
    pub provider_utility: Option<f64>,
    /// Mean worker utility across types, if solved.
    pub mean_worker_utility: Option<f64>,
    /// Smallest worker utility, if solved.
    pub min_worker_utility: Option<f64>,
    /// Largest worker utility, if solved.
    pub max_worker_utility: Option<f64>,
    /// Wall-clock solve time in milliseconds (not deterministic).
    pub wall_time_ms: f64,
}

/// Result of [`compare_mechanisms`]: one row per mechanism, in CA/CC/CS
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismComparison {
    /// The comparison rows.
    pub rows: Vec<ComparisonRow>,
}

/// Solves all three mechanisms on the scenario and summarizes each.
pub fn compare_mechanisms(cfg: &ScenarioConfig) -> Result<MechanismComparison> {
    let (pop, econ, timing, params) = scenario_parts(cfg)?;
    let mut rows = Vec::with_capacity(3);
    for mech in [Mechanism::Ca, Mechanism::Cc, Mechanism::Cs] {
        let started = Instant::now();
        let solved = solve_or_mark(mech, &pop, &econ, &timing, &params)?;
        let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        let row = match solved {
            Some(res) => {
                let n = res.worker_utilities.len() as f64;
                let mean = res.worker_utilities.iter().sum::<f64>() / n;
                let min = res.worker_utilities.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = res.worker_utilities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                ComparisonRow {
                    mechanism: mech,
                    feasible: Some(res.menu.feasible),
                    provider_utility: Some(res.provider_utility),
                    mean_worker_utility: Some(mean),
                    min_worker_utility: Some(min),
                    max_worker_utility: Some(max),
                    wall_time_ms,
                }
            }
            None => ComparisonRow {
                mechanism: mech,
                feasible: None,
                provider_utility: None,
                mean_worker_utility: None,
                min_worker_utility: None,
                max_worker_utility: None,
                wall_time_ms,
            },
        };
        rows.push(row);
    }
    Ok(MechanismComparison { rows })
}

/// Formats a float at 12 significant digits in scientific notation — the
/// fixed CSV number format.
fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Writes `choice_matrix.csv`: `worker_type,item_index,utility` with
/// 1-based indices, row-major.
pub fn write_choice_matrix_csv<W: io::Write>(w: &mut W, matrix: &ChoiceMatrix) -> io::Result<()> {
    writeln!(w, "worker_type,item_index,utility")?;
    for (i, row) in matrix.utilities.iter().enumerate() {
        for (j, utility) in row.iter().enumerate() {
            writeln!(w, "{},{},{}", i + 1, j + 1, fmt_f64(*utility))?;
        }
    }
    Ok(())
}

/// Writes `sweep_a.csv`: per-duration provider utilities and mean worker
/// utilities for all three mechanisms; infeasible cells stay empty.
pub fn write_sweep_a_csv<W: io::Write>(w: &mut W, sweep: &DurationSweep) -> io::Result<()> {
    writeln!(w, "a,us_ca,us_cc,us_cs,mean_uw_ca,mean_uw_cc,mean_uw_cs")?;
    let mean_uw = |res: &Option<SolveResult>| -> Option<f64> {
        res.as_ref().map(|r| {
            r.worker_utilities.iter().sum::<f64>() / r.worker_utilities.len() as f64
        })
    };
    for point in &sweep.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            point.a,
            fmt_opt(point.ca.as_ref().map(|r| r.provider_utility)),
            fmt_opt(point.cc.as_ref().map(|r| r.provider_utility)),
            fmt_opt(point.cs.as_ref().map(|r| r.provider_utility)),
            fmt_opt(mean_uw(&point.ca)),
            fmt_opt(mean_uw(&point.cc)),
            fmt_opt(mean_uw(&point.cs)),
        )?;
    }
    Ok(())
}

/// Writes `sweep_alpha.csv`: one row per `(alpha, type)` with the item,
/// implied cycle counts, and utilities; an infeasible weight emits a
/// single row with empty value cells.
pub fn write_sweep_alpha_csv<W: io::Write>(w: &mut W, sweep: &AlphaSweep) -> io::Result<()> {
    writeln!(
        w,
        "alpha,type,f_star,cycles_raw,cycles_rounded,reward,worker_utility,provider_utility"
    )?;
    for point in &sweep.points {
        match &point.result {
            Some(res) => {
                for (pos, &f) in res.f_star.iter().enumerate() {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{}",
                        fmt_f64(point.alpha),
                        pos + 1,
                        fmt_f64(f),
                        fmt_f64(point.cycles_raw[pos]),
                        point.cycles_rounded[pos],
                        fmt_f64(res.r_star[pos]),
                        fmt_f64(res.worker_utilities[pos]),
                        fmt_f64(res.provider_utility),
                    )?;
                }
            }
            None => writeln!(w, "{},,,,,,,", fmt_f64(point.alpha))?,
        }
    }
    Ok(())
}

/// Writes `compare.csv`: one row per mechanism. The `wall_time_ms` column
/// is measured, not deterministic.
pub fn write_compare_csv<W: io::Write>(w: &mut W, cmp: &MechanismComparison) -> io::Result<()> {
    writeln!(
        w,
        "mechanism,provider_utility,mean_worker_utility,min_worker_utility,max_worker_utility,feasible,wall_time_ms"
    )?;
    for row in &cmp.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.mechanism,
            fmt_opt(row.provider_utility),
            fmt_opt(row.mean_worker_utility),
            fmt_opt(row.min_worker_utility),
            fmt_opt(row.max_worker_utility),
            row.feasible.map(|b| b.to_string()).unwrap_or_default(),
            fmt_f64(row.wall_time_ms),
        )?;
    }
    Ok(())
}

/// Parses a mechanism name (`ca`, `cc`, `cs`) — conversion helper for
/// config front ends.
pub fn parse_mechanism(s: &str) -> Result<Mechanism> {
    Mechanism::from_str(s)
}
