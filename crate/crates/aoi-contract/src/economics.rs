//! Worker types, contract menus, utilities, and constraint verification.
//!
//! # Setting
//!
//! A provider faces `N` worker types sorted by their inverse unit update
//! cost `γ_1 ≤ γ_2 ≤ … ≤ γ_N` (higher type ⇒ cheaper updates), with prior
//! probabilities `Q_n` summing to one. A menu offers one
//! [`ContractItem`] `(f_n, R_n)` per type:
//!
//! * worker utility — `U_n = R_n − f_n/γ_n`;
//! * provider satisfaction per type — `G_n = β·ln(g)` with
//!   `g = α(K − Ā(1/f)) + (1 − α)(H − D̄(1/f))`, where `Ā`/`D̄` are the
//!   average AoI/latency of the chosen freshness variant and `K`/`H` the
//!   tolerable maxima;
//! * provider utility — `U_s = Σ_n M·Q_n·(G_n − R_n)`.
//!
//! Because types are private, a usable menu must be *incentive compatible*
//! (no type gains by taking another type's item) and *individually
//! rational* (every type's own item is worth at least zero).
//! [`verify_ic_ir`] checks all `N(N−1) + N` inequalities by brute force and
//! returns the full violation list as data; [`check_lemma1`] evaluates the
//! four standard screening conditions (type-1 IR, monotonicity, local
//! downward IC, local upward IC) that are jointly equivalent to the full
//! constraint set on sorted types.
//!
//! # Reduced objective
//!
//! Substituting the binding rewards into `U_s` eliminates `R` and yields
//! `U_s = Σ_n M·(Q_n·G_n(f_n) − b_n·f_n)` with
//! `b_n = Q_n/γ_n + (1/γ_n − 1/γ_{n+1})·Σ_{j>n} Q_j` (and
//! `b_N = Q_N/γ_N`): each type's effective marginal cost plus the
//! information rent its frequency concedes to all higher types.
//! [`reduced_coefficients`] and [`reduced_provider_utility`] implement this
//! form; the identity with the direct `U_s` is pinned by tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freshness::{self, FreshnessVariant, TimingParams};

/// Absolute tolerance used by every constraint check in the crate.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// One screening type: a cost class of workers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkerType {
    /// 1-based position in the sorted type list.
    pub index: usize,
    /// Inverse unit update cost `γ_n`; higher means cheaper updates.
    pub gamma: f64,
    /// Prior probability `Q_n ∈ (0, 1]`.
    pub q: f64,
    /// AoI preference weight `α_n ∈ [0, 1]` (1 = cares only about AoI,
    /// 0 = only about latency).
    pub alpha: f64,
}

/// A validated, sorted list of worker types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    types: Vec<WorkerType>,
}

impl Population {
    /// Validates and wraps a type list.
    ///
    /// Requires a nonempty list with `γ` positive, finite, and
    /// nondecreasing; `Q_n ∈ (0, 1]` summing to 1 within `1e−12`;
    /// `α_n ∈ [0, 1]`; and `index` equal to the 1-based position.
    pub fn new(types: Vec<WorkerType>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::domain("population", "type list must be nonempty"));
        }
        let mut q_sum = 0.0;
        for (pos, ty) in types.iter().enumerate() {
            if ty.index != pos + 1 {
                return Err(Error::domain(
                    "population",
                    format!("type at position {} carries index {}", pos + 1, ty.index),
                ));
            }
            if !(ty.gamma.is_finite() && ty.gamma > 0.0) {
                return Err(Error::domain(
                    "population",
                    format!("gamma must be positive and finite, got {} at type {}", ty.gamma, ty.index),
                ));
            }
            if pos > 0 && types[pos - 1].gamma > ty.gamma {
                return Err(Error::domain(
                    "population",
                    format!(
                        "gamma must be nondecreasing: type {} has {} after {}",
                        ty.index,
                        ty.gamma,
                        types[pos - 1].gamma
                    ),
                ));
            }
            if !(ty.q.is_finite() && ty.q > 0.0 && ty.q <= 1.0) {
                return Err(Error::domain(
                    "population",
                    format!("probability must lie in (0, 1], got {} at type {}", ty.q, ty.index),
                ));
            }
            if !(ty.alpha.is_finite() && (0.0..=1.0).contains(&ty.alpha)) {
                return Err(Error::domain(
                    "population",
                    format!("alpha must lie in [0, 1], got {} at type {}", ty.alpha, ty.index),
                ));
            }
            q_sum += ty.q;
        }
        if (q_sum - 1.0).abs() > 1e-12 {
            return Err(Error::domain(
                "population",
                format!("type probabilities must sum to 1, got {q_sum}"),
            ));
        }
        Ok(Population { types })
    }

    /// Builds a population with uniform weights `Q_n = 1/N` and one shared
    /// preference weight from a nondecreasing `γ` list.
    pub fn with_uniform_weights(gammas: Vec<f64>, alpha: f64) -> Result<Self> {
        let n = gammas.len();
        if n == 0 {
            return Err(Error::domain("population", "gamma list must be nonempty"));
        }
        let q = 1.0 / n as f64;
        let types = gammas
            .into_iter()
            .enumerate()
            .map(|(pos, gamma)| WorkerType { index: pos + 1, gamma, q, alpha })
            .collect();
        Population::new(types)
    }

    /// The sorted type list.
    pub fn types(&self) -> &[WorkerType] {
        &self.types
    }

    /// Number of types `N`.
    pub fn len(&self) -> usize {
        self.types.len()
    }

    /// True iff the population holds no types (never, post-construction).
    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

impl std::ops::Index<usize> for Population {
    type Output = WorkerType;

    fn index(&self, pos: usize) -> &WorkerType {
        &self.types[pos]
    }
}

/// One menu entry: the frequency asked of a type and the reward paid for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractItem {
    /// Update frequency `f = 1/θ`, in 1/seconds.
    pub f: f64,
    /// Reward `R`, in currency units.
    pub r: f64,
}

/// Which constraint family a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    /// Incentive compatibility: type `n` weakly prefers its own item.
    Ic,
    /// Individual rationality: type `n`'s own item is worth at least zero.
    Ir,
}

/// One violated constraint, recorded as data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Constraint family.
    pub kind: ConstraintKind,
    /// 1-based index of the constrained type.
    pub n: usize,
    /// For IC: the 1-based index of the item type `n` would rather take.
    pub other: Option<usize>,
    /// Signed slack of the inequality (negative = violated amount).
    pub slack: f64,
}

/// A menu together with its brute-force feasibility certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractMenu {
    /// One item per type, aligned with the sorted type list.
    pub items: Vec<ContractItem>,
    /// True iff no IC or IR constraint is violated beyond [`CONSTRAINT_TOL`].
    pub feasible: bool,
    /// Every violated constraint with its slack; empty iff `feasible`.
    pub violations: Vec<Violation>,
}

/// Provider-side economic parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProviderEconomics {
    /// Unit satisfaction profit `β > 0`.
    pub beta: f64,
    /// Maximum tolerable average AoI `K`, seconds.
    pub k: f64,
    /// Maximum tolerable average latency `H`, seconds.
    pub h: f64,
    /// Number of workers `M ≥ 1` recruited per type draw.
    pub m: u32,
}

impl ProviderEconomics {
    /// Validates and constructs provider economics.
    ///
    /// Requires `β > 0`, `K ≥ 0`, `H ≥ 0` (all finite), and `M ≥ 1`.
    /// Zero tolerances are admitted — they make every operating point
    /// infeasible downstream rather than being rejected up front.
    pub fn new(beta: f64, k: f64, h: f64, m: u32) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::domain(
                "provider economics",
                format!("beta must be positive and finite, got {beta}"),
            ));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::domain(
                "provider economics",
                format!("K must be nonnegative and finite, got {k}"),
            ));
        }
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::domain(
                "provider economics",
                format!("H must be nonnegative and finite, got {h}"),
            ));
        }
        if m < 1 {
            return Err(Error::domain("provider economics", "M must be at least 1"));
        }
        Ok(ProviderEconomics { beta, k, h, m })
    }
}

/// Outcome of the four screening conditions on a sorted menu.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    /// (a.1) The lowest type's own item is individually rational.
    pub ir_type1: bool,
    /// (a.2) Rewards and frequencies are nondecreasing in type.
    pub monotone: bool,
    /// (a.3) Local downward IC: each type weakly prefers its item to the
    /// next lower type's item.
    pub ldic: bool,
    /// (a.4) Local upward IC: each type weakly prefers its item to the next
    /// higher type's item.
    pub luic: bool,
}

impl Lemma1Report {
    /// True iff all four conditions hold.
    pub fn all_hold(&self) -> bool {
        self.ir_type1 && self.monotone && self.ldic && self.luic
    }
}

/// Worker utility `U = R − f/γ` of a type taking a (not necessarily its
/// own) item.
pub fn worker_utility(item: &ContractItem, ty: &WorkerType) -> f64 {
    item.r - item.f / ty.gamma
}

/// Provider satisfaction `G = β·ln(g)` earned from one worker updating at
/// frequency `f`, where `g = α(K − Ā(1/f)) + (1 − α)(H − D̄(1/f))`.
///
/// Uses the natural logarithm. Fails with
/// [`Error::NonpositivePerformance`] when `g ≤ 0`, so callers can treat the
/// operating point as utility `−∞` rather than clamping.
pub fn satisfaction(
    f: f64,
    ty: &WorkerType,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    variant: FreshnessVariant,
) -> Result<f64> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::domain(
            "satisfaction",
            format!("frequency must be positive and finite, got {f}"),
        ));
    }
    let theta = 1.0 / f;
    let aoi = freshness::avg_aoi_theta(theta, timing.a, timing.t, variant)?;
    let latency = freshness::avg_latency_theta(theta, timing.a, timing.t, variant)?;
    let g = ty.alpha * (econ.k - aoi) + (1.0 - ty.alpha) * (econ.h - latency);
    if !g.is_finite() {
        return Err(Error::Numeric(format!(
            "performance is not finite at f = {f} (g = {g})"
        )));
    }
    if g <= 0.0 {
        return Err(Error::NonpositivePerformance { g });
    }
    Ok(econ.beta * g.ln())
}

/// Provider utility `U_s = Σ_n M·Q_n·(G_n − R_n)` of a full menu.
///
/// Propagates [`Error::NonpositivePerformance`] if any item's frequency
/// drives performance nonpositive for its own type.
pub fn provider_utility(
    items: &[ContractItem],
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    variant: FreshnessVariant,
) -> Result<f64> {
    if items.len() != pop.len() {
        return Err(Error::domain(
            "provider utility",
            format!("menu holds {} items for {} types", items.len(), pop.len()),
        ));
    }
    let mut total = 0.0;
    for (item, ty) in items.iter().zip(pop.types()) {
        let g_n = satisfaction(item.f, ty, econ, timing, variant)?;
        total += econ.m as f64 * ty.q * (g_n - item.r);
    }
    Ok(total)
}

/// Brute-force verification of all `N(N−1)` IC and `N` IR constraints.
///
/// Every inequality is checked with absolute tolerance [`CONSTRAINT_TOL`];
/// violations are returned as data in the certificate, never as errors.
pub fn verify_ic_ir(items: &[ContractItem], pop: &Population) -> ContractMenu {
    let mut violations = Vec::new();
    for (pos, ty) in pop.types().iter().enumerate() {
        let own = worker_utility(&items[pos], ty);
        if own < -CONSTRAINT_TOL {
            violations.push(Violation {
                kind: ConstraintKind::Ir,
                n: ty.index,
                other: None,
                slack: own,
            });
        }
        for (other_pos, other_item) in items.iter().enumerate() {
            if other_pos == pos {
                continue;
            }
            let mimic = worker_utility(other_item, ty);
            if own < mimic - CONSTRAINT_TOL {
                violations.push(Violation {
                    kind: ConstraintKind::Ic,
                    n: ty.index,
                    other: Some(other_pos + 1),
                    slack: own - mimic,
                });
            }
        }
    }
    ContractMenu {
        items: items.to_vec(),
        feasible: violations.is_empty(),
        violations,
    }
}

/// Evaluates the four screening conditions on a sorted menu: type-1 IR,
/// monotone `R` and `f`, local downward IC, and local upward IC.
///
/// On sorted types these four are sufficient for the full IC/IR set, which
/// [`verify_ic_ir`] can confirm independently.
pub fn check_lemma1(items: &[ContractItem], pop: &Population) -> Lemma1Report {
    let n = pop.len();
    debug_assert_eq!(items.len(), n);

    let ir_type1 = worker_utility(&items[0], &pop[0]) >= -CONSTRAINT_TOL;

    let monotone = items.windows(2).all(|w| {
        w[1].r >= w[0].r - CONSTRAINT_TOL && w[1].f >= w[0].f - CONSTRAINT_TOL
    });

    let mut ldic = true;
    let mut luic = true;
    for pos in 0..n {
        let ty = &pop[pos];
        let own = worker_utility(&items[pos], ty);
        if pos > 0 && own < worker_utility(&items[pos - 1], ty) - CONSTRAINT_TOL {
            ldic = false;
        }
        if pos + 1 < n && own < worker_utility(&items[pos + 1], ty) - CONSTRAINT_TOL {
            luic = false;
        }
    }

    Lemma1Report { ir_type1, monotone, ldic, luic }
}

/// Reduced-objective cost coefficients
/// `b_n = Q_n/γ_n + (1/γ_n − 1/γ_{n+1})·Σ_{j>n} Q_j`, with
/// `b_N = Q_N/γ_N`.
///
/// `b_n` is type `n`'s probability-weighted marginal cost plus the
/// information rent its frequency concedes to every higher type; all
/// coefficients are strictly positive on a valid population.
pub fn reduced_coefficients(pop: &Population) -> Vec<f64> {
    let n = pop.len();
    let mut b = vec![0.0; n];
    let mut tail_q = 0.0; // Σ_{j>pos} Q_j, built from the back
    for pos in (0..n).rev() {
        let ty = &pop[pos];
        b[pos] = ty.q / ty.gamma;
        if pos + 1 < n {
            b[pos] += (1.0 / ty.gamma - 1.0 / pop[pos + 1].gamma) * tail_q;
        }
        tail_q += ty.q;
    }
    b
}

/// Reduced provider utility `Σ_n M·(Q_n·G_n(f_n) − b_n·f_n)`.
///
/// Expects `f` nondecreasing with one entry per type (the frequency
/// allocation the binding-reward argument was derived for). Propagates
/// [`Error::NonpositivePerformance`] from any type's satisfaction.
pub fn reduced_provider_utility(
    f: &[f64],
    pop: &Population,
    econ: &ProviderEconomics,
    timing: &TimingParams,
    variant: FreshnessVariant,
) -> Result<f64> {
    if f.len() != pop.len() {
        return Err(Error::domain(
            "reduced provider utility",
            format!("allocation holds {} entries for {} types", f.len(), pop.len()),
        ));
    }
    let b = reduced_coefficients(pop);
    let mut total = 0.0;
    for (pos, ty) in pop.types().iter().enumerate() {
        let g_n = satisfaction(f[pos], ty, econ, timing, variant)?;
        total += econ.m as f64 * (ty.q * g_n - b[pos] * f[pos]);
    }
    Ok(total)
}
