//! Optimal contract computation: grid search, bunching-and-ironing, and
//! closed-form rewards, plus the two baseline mechanisms.
//!
//! # The screening problem
//!
//! The provider maximizes `U_s = Σ_n M·Q_n·(G_n(f_n) − R_n)` subject to the
//! full IC/IR constraint set. On sorted types the constraints collapse to
//! monotone `f` plus binding local-downward IC, which pins the rewards in
//! closed form and reduces the search to the frequency vector alone:
//! maximize `Σ_n M·(Q_n·G_n(f_n) − b_n·f_n)` over nondecreasing `f`, with
//! the cost coefficients `b_n` from
//! [`economics::reduced_coefficients`].
//!
//! The per-type objective is scanned over the uniform frequency grid
//! `{f_min, f_min + φ, …} ∩ [f_min, f_max]`; candidates whose performance
//! argument `g` is nonpositive are skipped (satisfaction is `−∞` there).
//! If the unconstrained per-type argmaxes already come out nondecreasing
//! they are optimal; otherwise [`iron_monotone`] pools adjacent violators
//! and re-optimizes each pooled group on the same grid until the allocation
//! is monotone. Rewards then follow the binding recursion
//! `R*_1 = f_1/γ_1`, `R*_n = R*_{n−1} + f_n/γ_n − f_{n−1}/γ_n`
//! ([`optimal_rewards`]).
//!
//! # Mechanisms
//!
//! * [`solve_ca`] — the contract under **a**symmetric information described
//!   above; menus always pass [`economics::verify_ic_ir`].
//! * [`solve_cc`] — **c**omplete information baseline: the provider
//!   observes types, pays each worker exactly its cost (`R_n = f_n/γ_n`,
//!   zero worker utility), and optimizes each type's frequency
//!   independently with cost `Q_n/γ_n`; no monotonicity repair is applied,
//!   so the menu is generally *not* incentive compatible — it is an upper
//!   bound on provider utility, not a screening menu.
//! * [`solve_cs`] — **s**ocial-welfare baseline under asymmetry: optimizes
//!   the welfare objective (same per-type cost `Q_n/γ_n`, transfers
//!   cancel), irons it monotone, and prices the result with the binding
//!   rewards so IC/IR hold.

use serde::{Deserialize, Serialize};

use crate::economics::{
    self, ContractItem, ContractMenu, Population, ProviderEconomics,
};
use crate::error::{Error, Result};
use crate::freshness::{FreshnessVariant, TimingParams};

/// Grid-search knobs for the contract solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Smallest candidate frequency (inclusive).
    pub f_min: f64,
    /// Largest candidate frequency (inclusive; the last grid node at or
    /// below it is the top candidate).
    pub f_max: f64,
    /// Grid step `φ`.
    pub phi: f64,
    /// Which freshness closed forms the objective evaluates.
    pub variant: FreshnessVariant,
}

impl SolverParams {
    /// Validates the grid against the scenario timing.
    ///
    /// Requires `0 < f_min ≤ f_max`, `φ > 0`, and `f_max < 1/(a·t)` so
    /// every candidate cycle satisfies `θ > a·t`. A single-point grid
    /// (`f_min = f_max`) is admitted.
    pub fn validate(&self, timing: &TimingParams) -> Result<()> {
        if !(self.f_min.is_finite() && self.f_min > 0.0) {
            return Err(Error::domain(
                "solver parameters",
                format!("f_min must be positive and finite, got {}", self.f_min),
            ));
        }
        if !(self.f_max.is_finite() && self.f_max >= self.f_min) {
            return Err(Error::domain(
                "solver parameters",
                format!("f_max ({}) must be finite and at least f_min ({})", self.f_max, self.f_min),
            ));
        }
        if !(self.phi.is_finite() && self.phi > 0.0) {
            return Err(Error::domain(
                "solver parameters",
                format!("phi must be positive and finite, got {}", self.phi),
            ));
        }
        let cap = 1.0 / timing.min_theta();
        if self.f_max >= cap {
            return Err(Error::domain(
                "solver parameters",
                format!(
                    "f_max ({}) must stay strictly below 1/(a·t) = {cap} so that θ > a·t",
                    self.f_max
                ),
            ));
        }
        Ok(())
    }
}

/// The three contract mechanisms the crate computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Mechanism {
    /// Contract under asymmetric information (the screening optimum).
    #[default]
    #[serde(rename = "ca")]
    Ca,
    /// Complete-information baseline (first-best provider utility).
    #[serde(rename = "cc")]
    Cc,
    /// Social-welfare-maximizing contract under asymmetric information.
    #[serde(rename = "cs")]
    Cs,
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mechanism::Ca => f.write_str("ca"),
            Mechanism::Cc => f.write_str("cc"),
            Mechanism::Cs => f.write_str("cs"),
        }
    }
}

impl std::str::FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ca" => Ok(Mechanism::Ca),
            "cc" => Ok(Mechanism::Cc),
            "cs" => Ok(Mechanism::Cs),
            other => Err(Error::domain(
                "mechanism",
                format!("unknown mechanism `{other}` (expected `ca`, `cc`, or `cs`)"),
            )),
        }
    }
}

/// A solved contract with its certificate and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Which mechanism produced this result.
    pub mechanism: Mechanism,
    /// The menu with its brute-force IC/IR certificate.
    pub menu: ContractMenu,
    /// Optimal frequencies, nondecreasing for CA/CS.
    pub f_star: Vec<f64>,
    /// Rewards aligned with `f_star`.
    pub r_star: Vec<f64>,
    /// Provider utility `Σ M·Q_n·(G_n − R_n)` of the menu.
    pub provider_utility: f64,
    /// Each type's utility from its own item.
    pub worker_utilities: Vec<f64>,
    /// 1-based inclusive index ranges that were pooled by ironing.
    pub ironed_groups: Vec<(usize, usize)>,
}

/// The uniform candidate grid `{f_min + z·φ} ∩ [f_min, f_max]`.
#[derive(Debug, Clone, Copy)]
struct Grid {
    f_min: f64,
    phi: f64,
    count: u64,
}

impl Grid {
    fn new(params: &SolverParams) -> Grid {
        let span = params.f_max - params.f_min;
        // Absorb one-ulp shortfalls so an exactly-representable span keeps
        // its endpoint: floor(span/φ + 1e−9) + 1 points.
        let count = if span <= 0.0 {
            1
        } else {
            (span / params.phi + 1e-9).floor() as u64 + 1
        };
        Grid { f_min: params.f_min, phi: params.phi, count }
    }

    fn point(&self, z: u64) -> f64 {
        self.f_min + z as f64 * self.phi
    }
}

/// Per-type term of the reduced objective at one candidate frequency:
/// `M·(Q_n·G_n(f) − cost·f)`, or `None` when performance is nonpositive.
fn per_type_value(
    f: f64,
    pos: usize,
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    variant: FreshnessVariant,
    cost: f64,
) -> Result<Option<f64>> {
    let ty = &pop[pos];
    match economics::satisfaction(f, ty, econ, timing, variant) {
        Ok(g_n) => {
            let value = econ.m as f64 * (ty.q * g_n - cost * f);
            if value.is_finite() {
                Ok(Some(value))
            } else {
                Err(Error::Numeric(format!(
                    "objective not finite at f = {f} for type {}",
                    ty.index
                )))
            }
        }
        Err(Error::NonpositivePerformance { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Scans the grid for the maximizer of a candidate-wise objective; ties
/// break toward the smaller frequency. `None` if no candidate is
/// admissible.
fn grid_argmax<F>(grid: &Grid, mut value_at: F) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<Option<f64>>,
{
    let mut best: Option<(f64, f64)> = None; // (value, f)
    for z in 0..grid.count {
        let f = grid.point(z);
        if let Some(value) = value_at(f)? {
            let improves = match best {
                None => true,
                Some((best_value, _)) => value > best_value,
            };
            if improves {
                best = Some((value, f));
            }
        }
    }
    Ok(best.map(|(_, f)| f))
}

/// Grid argmax of one type's reduced objective `M·(Q_n·G_n(f) − b_n·f)`.
///
/// `pos` is the 0-based position in the type list; `b_n` the type's cost
/// coefficient ([`economics::reduced_coefficients`] for the screening
/// mechanism, `Q_n/γ_n` for the baselines). Candidates with nonpositive
/// performance are skipped; ties break toward the smaller frequency.
///
/// Fails with [`Error::Infeasible`] when every grid point has `g ≤ 0`.
pub fn per_type_grid_argmax(
    pos: usize,
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    params: &SolverParams,
    b_n: f64,
) -> Result<f64> {
    params.validate(timing)?;
    let grid = Grid::new(params);
    let best = grid_argmax(&grid, |f| {
        per_type_value(f, pos, pop, econ, timing, params.variant, b_n)
    })?;
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "every grid frequency drives performance nonpositive for type {}",
            pop[pos].index
        ))
    })
}

/// Monotonicity repair by bunching-and-ironing.
///
/// Walks the raw per-type argmaxes left to right with a stack of bunches;
/// whenever a bunch's frequency drops below its predecessor's, the two are
/// pooled and the pooled objective `Σ_{n ∈ bunch} M·(Q_n·G_n(f) − cost_n·f)`
/// is re-optimized over the same grid (a candidate is admissible only if
/// every member's performance is positive there). The result is
/// nondecreasing; `ironed_groups` lists the pooled ranges as 1-based
/// inclusive `(start, end)` pairs.
///
/// `costs` carries one coefficient per type — the same ones the raw
/// argmaxes were computed with.
pub fn iron_monotone(
    f_raw: &[f64],
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    params: &SolverParams,
    costs: &[f64],
) -> Result<(Vec<f64>, Vec<(usize, usize)>)> {
    params.validate(timing)?;
    assert_eq!(f_raw.len(), pop.len(), "one raw frequency per type");
    assert_eq!(costs.len(), pop.len(), "one cost coefficient per type");
    let grid = Grid::new(params);

    #[derive(Clone, Copy)]
    struct Bunch {
        start: usize, // 0-based inclusive
        end: usize,   // 0-based inclusive
        f: f64,
    }

    let pooled_argmax = |start: usize, end: usize| -> Result<f64> {
        let best = grid_argmax(&grid, |f| {
            let mut sum = 0.0;
            for pos in start..=end {
                match per_type_value(f, pos, pop, econ, timing, params.variant, costs[pos])? {
                    Some(v) => sum += v,
                    None => return Ok(None),
                }
            }
            Ok(Some(sum))
        })?;
        best.ok_or_else(|| {
            Error::Infeasible(format!(
                "every grid frequency drives performance nonpositive for pooled types {}..={}",
                start + 1,
                end + 1
            ))
        })
    };

    let mut stack: Vec<Bunch> = Vec::with_capacity(f_raw.len());
    for (pos, &f) in f_raw.iter().enumerate() {
        stack.push(Bunch { start: pos, end: pos, f });
        while stack.len() >= 2 && stack[stack.len() - 1].f < stack[stack.len() - 2].f {
            let top = stack.pop().expect("stack holds two bunches");
            let prev = stack.pop().expect("stack holds two bunches");
            let merged_f = pooled_argmax(prev.start, top.end)?;
            stack.push(Bunch { start: prev.start, end: top.end, f: merged_f });
        }
    }

    let mut ironed = vec![0.0; f_raw.len()];
    let mut groups = Vec::new();
    for bunch in &stack {
        for pos in bunch.start..=bunch.end {
            ironed[pos] = bunch.f;
        }
        if bunch.end > bunch.start {
            groups.push((bunch.start + 1, bunch.end + 1));
        }
    }
    Ok((ironed, groups))
}

/// Binding rewards for a nondecreasing allocation:
/// `R*_1 = f_1/γ_1`, `R*_n = R*_{n−1} + f_n/γ_n − f_{n−1}/γ_n`.
///
/// The lowest type is held exactly at its participation constraint and
/// every higher type receives just enough information rent to make local
/// downward IC bind.
pub fn optimal_rewards(f: &[f64], pop: &Population) -> Vec<f64> {
    assert_eq!(f.len(), pop.len(), "one frequency per type");
    let mut rewards = Vec::with_capacity(f.len());
    for (pos, ty) in pop.types().iter().enumerate() {
        if pos == 0 {
            rewards.push(f[0] / ty.gamma);
        } else {
            rewards.push(rewards[pos - 1] + f[pos] / ty.gamma - f[pos - 1] / ty.gamma);
        }
    }
    rewards
}

fn finish(
    mechanism: Mechanism,
    f_star: Vec<f64>,
    r_star: Vec<f64>,
    ironed_groups: Vec<(usize, usize)>,
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    variant: FreshnessVariant,
) -> Result<SolveResult> {
    let items: Vec<ContractItem> = f_star
        .iter()
        .zip(&r_star)
        .map(|(&f, &r)| ContractItem { f, r })
        .collect();
    let menu = economics::verify_ic_ir(&items, pop);
    let provider_utility = economics::provider_utility(&items, pop, econ, timing, variant)?;
    let worker_utilities = items
        .iter()
        .zip(pop.types())
        .map(|(item, ty)| economics::worker_utility(item, ty))
        .collect();
    Ok(SolveResult {
        mechanism,
        menu,
        f_star,
        r_star,
        provider_utility,
        worker_utilities,
        ironed_groups,
    })
}

fn screened_allocation(
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    params: &SolverParams,
    costs: &[f64],
) -> Result<(Vec<f64>, Vec<(usize, usize)>)> {
    let mut f_raw = Vec::with_capacity(pop.len());
    for pos in 0..pop.len() {
        f_raw.push(per_type_grid_argmax(pos, pop, econ, timing, params, costs[pos])?);
    }
    iron_monotone(&f_raw, pop, econ, timing, params, costs)
}

/// Optimal contract under asymmetric information.
///
/// Per-type grid search on the reduced objective with coefficients `b_n`,
/// ironing to restore monotonicity, binding rewards. The returned menu
/// passes [`economics::verify_ic_ir`].
pub fn solve_ca(
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    params: &SolverParams,
) -> Result<SolveResult> {
    params.validate(timing)?;
    let costs = economics::reduced_coefficients(pop);
    let (f_star, groups) = screened_allocation(pop, econ, timing, params, &costs)?;
    let r_star = optimal_rewards(&f_star, pop);
    finish(Mechanism::Ca, f_star, r_star, groups, pop, econ, timing, params.variant)
}

/// Complete-information baseline.
///
/// Each type's frequency maximizes `M·Q_n·(G_n(f) − f/γ_n)` independently
/// and the reward pays exactly the cost, `R_n = f_n/γ_n`, so every worker
/// utility is zero. No monotonicity repair is applied and the menu carries
/// whatever IC violations fall out — with observable types self-selection
/// is not required.
pub fn solve_cc(
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    params: &SolverParams,
) -> Result<SolveResult> {
    params.validate(timing)?;
    let mut f_star = Vec::with_capacity(pop.len());
    let mut r_star = Vec::with_capacity(pop.len());
    for (pos, ty) in pop.types().iter().enumerate() {
        let cost = ty.q / ty.gamma;
        let f = per_type_grid_argmax(pos, pop, econ, timing, params, cost)?;
        f_star.push(f);
        r_star.push(f / ty.gamma);
    }
    finish(Mechanism::Cc, f_star, r_star, Vec::new(), pop, econ, timing, params.variant)
}

/// Social-welfare-maximizing contract under asymmetric information.
///
/// Rewards are transfers and cancel in welfare, so the frequency vector
/// maximizes `Σ M·Q_n·(G_n(f_n) − f_n/γ_n)` subject to monotonicity
/// (per-type argmax with cost `Q_n/γ_n`, then ironing on the welfare
/// objective). The allocation is then priced with the binding rewards so
/// the menu is implementable: it passes [`economics::verify_ic_ir`].
pub fn solve_cs(
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    params: &SolverParams,
) -> Result<SolveResult> {
    params.validate(timing)?;
    let costs: Vec<f64> = pop.types().iter().map(|ty| ty.q / ty.gamma).collect();
    let (f_star, groups) = screened_allocation(pop, econ, timing, params, &costs)?;
    let r_star = optimal_rewards(&f_star, pop);
    finish(Mechanism::Cs, f_star, r_star, groups, pop, econ, timing, params.variant)
}

/// Dispatches to [`solve_ca`], [`solve_cc`], or [`solve_cs`].
pub fn solve(
    mechanism: Mechanism,
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    params: &SolverParams,
) -> Result<SolveResult> {
    match mechanism {
        Mechanism::Ca => solve_ca(pop, econ, timing, params),
        Mechanism::Cc => solve_cc(pop, econ, timing, params),
        Mechanism::Cs => solve_cs(pop, econ, timing, params),
    }
}

/// Social welfare of a solved contract: provider utility plus the
/// probability-weighted worker utilities, `U_s + Σ_n M·Q_n·U_n`.
pub fn social_welfare(result: &SolveResult, pop: &Population, econ: &ProviderEconomics) -> f64 {
    let worker_mass: f64 = result
        .worker_utilities
        .iter()
        .zip(pop.types())
        .map(|(u, ty)| econ.m as f64 * ty.q * u)
        .sum();
    result.provider_utility + worker_mass
}

/// Size of the search: `(grid points per type, total evaluations)` with the
/// point count taken as `⌈(f_max − f_min)/φ⌉ + 1` and the total as `N`
/// times that.
///
/// This is the worst-case evaluation count of the linear scan each solve
/// performs per type (the materialized grid may hold one point fewer when
/// the span is not an exact multiple of `φ`); the scan is linear in the
/// point count, not logarithmic.
pub fn complexity_report(params: &SolverParams, n_types: usize) -> (u64, u64) {
    let span = params.f_max - params.f_min;
    let points = if span <= 0.0 {
        1
    } else {
        (span / params.phi - 1e-9).ceil() as u64 + 1
    };
    (points, points * n_types as u64)
}
