//! Acceptance gate: nine system-level checks, one test per check, each
//! printing a single `[aN] PASS/FAIL` verdict line (plus labelled clause
//! lines where a check has several parts) with its measured values and
//! pinned tolerances. Runtime budgets are asserted inside the tests.
//!
//! Two clauses fail by design and are documented in the README: the
//! interior-peak clause of [a4] (provider utility keeps rising across the
//! whole idle-duration range at the reference parameters) and the
//! nondecreasing-rewards clause of [a5] (optimal rewards track optimal
//! frequencies downward as the freshness preference rises). The verdict
//! lines state the measured behavior.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use aoi_contract::economics::{
    self, ContractItem, Population, ProviderEconomics, WorkerType,
};
use aoi_contract::experiments::{self, ScenarioConfig};
use aoi_contract::flsim::{self, DelaySpec, WorkflowConfig};
use aoi_contract::freshness::FreshnessVariant::{OracleForm, PaperForm};
use aoi_contract::freshness::{self, TimingParams};
use aoi_contract::solver::{self, SolveResult, SolverParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

/// Prints the verdict line for one clause; panics on failure so the test
/// goes red after the line is visible.
fn verdict(id: &str, ok: bool, detail: &str) {
    if ok {
        println!("[{id}] PASS — {detail}");
    } else {
        println!("[{id}] FAIL — {detail}");
        panic!("[{id}] {detail}");
    }
}

/// Asserts the runtime budget and prints it as part of the record.
fn budget(id: &str, started: Instant, limit_s: f64) {
    let took = started.elapsed().as_secs_f64();
    verdict(
        &format!("{id}·runtime"),
        took < limit_s,
        &format!("{took:.2}s within the {limit_s:.0}s budget"),
    );
}

// ---------------------------------------------------------------------
// Randomized-instance family shared by a2/a3/a6: ranges chosen so that
// the top of every frequency grid keeps the performance argument
// positive for every type, hence no instance is infeasible.
// ---------------------------------------------------------------------

struct RandomInstance {
    pop: Population,
    econ: ProviderEconomics,
    timing: TimingParams,
    params: SolverParams,
}

fn random_gammas(rng: &mut ChaCha8Rng, n: usize, equal_block_odds: f64) -> Vec<f64> {
    // One decade scale per instance keeps γ inside (0, 0.05].
    let scale = 10f64.powf(rng.random_range(-3.0..=-1.3));
    let mut gammas: Vec<f64> = (0..n)
        .map(|_| rng.random_range(0.2..=1.0) * scale)
        .collect();
    gammas.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    // Equal-γ neighbors raise the odds that raw allocations invert, which
    // exercises the monotonicity repair.
    if n >= 2 && rng.random_bool(equal_block_odds) {
        let i = rng.random_range(1..n);
        gammas[i] = gammas[i - 1];
    }
    gammas
}

fn random_population(rng: &mut ChaCha8Rng, n: usize, equal_block_odds: f64) -> Population {
    let gammas = random_gammas(rng, n, equal_block_odds);
    let raw_q: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=1.0)).collect();
    let total: f64 = raw_q.iter().sum();
    let types = gammas
        .into_iter()
        .zip(raw_q)
        .enumerate()
        .map(|(pos, (gamma, w))| WorkerType {
            index: pos + 1,
            gamma,
            q: w / total,
            alpha: rng.random_range(0.05..=0.95),
        })
        .collect();
    Population::new(types).expect("random population is valid")
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, grid_points: usize) -> RandomInstance {
    let pop = random_population(rng, n, 0.5);
    let a = rng.random_range(1..=4u32);
    let t = if rng.random_bool(0.5) { 1.0 } else { 2.0 };
    let timing = TimingParams::new(t, a, 1, 15).expect("valid timing");
    let econ = ProviderEconomics::new(
        rng.random_range(5.0..=40.0),
        rng.random_range(100.0..=300.0),
        rng.random_range(20.0..=100.0),
        20,
    )
    .expect("valid economics");
    let variant = if rng.random_bool(0.5) { PaperForm } else { OracleForm };
    let f_max = timing.auto_f_max();
    let f_min = f_max / 50.0;
    let phi = (f_max - f_min) / (grid_points - 1) as f64;
    let params = SolverParams { f_min, f_max, phi, variant };
    params.validate(&timing).expect("valid solver params");
    RandomInstance { pop, econ, timing, params }
}

// ---------------------------------------------------------------------
// a1 — closed freshness forms vs. the discrete enumeration
// ---------------------------------------------------------------------

#[test]
fn a1_oracle_equivalence() {
    let started = Instant::now();
    let mut max_exact = 0.0f64;
    let mut max_rewrite = 0.0f64;
    let mut max_gap = 0.0f64;
    for t in [1.0, 2.0] {
        for c in 1..=15u32 {
            for a in 1..=15u32 {
                let oracle = freshness::oracle_metrics(c, a, t).unwrap();
                let theta = oracle.theta;

                // Enumeration-consistent closed forms, both parameterizations.
                let diffs = [
                    freshness::avg_latency_ca(c, a, t, OracleForm).unwrap() - oracle.avg_latency,
                    freshness::avg_aoi_ca(c, a, t, OracleForm).unwrap() - oracle.avg_aoi,
                    freshness::avg_latency_theta(theta, a, t, OracleForm).unwrap()
                        - oracle.avg_latency,
                    freshness::avg_aoi_theta(theta, a, t, OracleForm).unwrap() - oracle.avg_aoi,
                ];
                for d in diffs {
                    max_exact = max_exact.max(d.abs());
                }

                // The printed latency form agrees with its own cycle-form
                // rewrite under θ = (c + a)·t…
                let lat_collection = freshness::avg_latency_ca(c, a, t, PaperForm).unwrap();
                let lat_cycle = freshness::avg_latency_theta(theta, a, t, PaperForm).unwrap();
                max_rewrite = max_rewrite.max((lat_cycle - lat_collection).abs());

                // …and its gap to the enumeration is exactly the extra
                // collection factor (c−1)·c·t·(c+3) / (2(c+a)).
                let (cf, af) = (f64::from(c), f64::from(a));
                let gap = (cf - 1.0) * cf * t * (cf + 3.0) / (2.0 * (cf + af));
                max_gap = max_gap.max((lat_collection - oracle.avg_latency - gap).abs());
            }
        }
    }
    assert!(max_exact <= 1e-12);
    assert!(max_rewrite <= 1e-9);
    assert!(max_gap <= 1e-9);
    budget("a1", started, 1.0);
    verdict(
        "a1",
        true,
        &format!(
            "over (c,a) ∈ [1,15]², t ∈ {{1,2}}: closed forms vs enumeration \
             max |Δ| = {max_exact:.2e} ≤ 1e-12; cycle-form rewrite max |Δ| = \
             {max_rewrite:.2e} ≤ 1e-9; printed-form gap identity max |Δ| = {max_gap:.2e} ≤ 1e-9"
        ),
    );
}

// ---------------------------------------------------------------------
// a2 — menu feasibility and self-selection
// ---------------------------------------------------------------------

/// All criterion-2 clauses on one solved screening menu.
fn check_menu(label: &str, result: &SolveResult, pop: &Population) {
    const TOL: f64 = 1e-9;
    assert!(
        result.menu.feasible && result.menu.violations.is_empty(),
        "{label}: menu failed selection constraints: {:?}",
        result.menu.violations
    );
    let items = &result.menu.items;
    for (pos, ty) in pop.types().iter().enumerate() {
        let own = economics::worker_utility(&items[pos], ty);
        // Nonnegative, nondecreasing in type.
        assert!(own >= -TOL, "{label}: type {} gets utility {own}", pos + 1);
        if pos > 0 {
            let prev = economics::worker_utility(&items[pos - 1], &pop[pos - 1]);
            assert!(
                own >= prev - TOL,
                "{label}: utilities decrease at type {}",
                pos + 1
            );
            // The local downward constraint binds: the item below yields
            // exactly the same utility.
            let down = economics::worker_utility(&items[pos - 1], ty);
            assert!(
                (own - down).abs() <= TOL,
                "{label}: local downward slack {} at type {}",
                own - down,
                pos + 1
            );
        }
        // Diagonal self-selection across the whole row.
        for (other, item) in items.iter().enumerate() {
            let u = economics::worker_utility(item, ty);
            assert!(
                own >= u - TOL,
                "{label}: type {} prefers item {} ({u}) over its own ({own})",
                pos + 1,
                other + 1
            );
        }
    }
}

#[test]
fn a2_menu_feasibility_and_self_selection() {
    let started = Instant::now();

    // The reference scenario at the production grid.
    let cfg = ScenarioConfig::default();
    let matrix = experiments::choice_matrix(&cfg).unwrap();
    let pop = experiments::build_population(&cfg).unwrap();
    check_menu("reference scenario", &matrix.result, &pop);

    // 1,000 randomized scenarios on coarse grids.
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    let mut repaired = 0usize;
    for k in 0..1000 {
        let n = rng.random_range(1..=8usize);
        let inst = random_instance(&mut rng, n, 301);
        let result = solver::solve_ca(&inst.pop, &inst.econ, &inst.timing, &inst.params)
            .unwrap_or_else(|e| panic!("scenario {k} unexpectedly failed: {e}"));
        check_menu(&format!("random scenario {k}"), &result, &inst.pop);
        if !result.ironed_groups.is_empty() {
            repaired += 1;
        }
    }
    assert!(
        repaired >= 100,
        "monotonicity repair exercised only {repaired}/1000 times"
    );
    budget("a2", started, 10.0);
    verdict(
        "a2",
        true,
        &format!(
            "reference menu (N=10, φ=1e-6) and 1000 random menus pass all \
             N(N−1)+N selection constraints (slack ≤ 1e-9), diagonal \
             self-selection, nonnegative nondecreasing utilities, and binding \
             local downward constraints; monotonicity repair exercised {repaired} times"
        ),
    );
}

// ---------------------------------------------------------------------
// a3 — binding rewards make the full objective equal the reduced one
// ---------------------------------------------------------------------

#[test]
fn a3_reward_reduction_identity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    let mut max_obj = 0.0f64;
    let mut max_mass = 0.0f64;
    for k in 0..1000 {
        let n = rng.random_range(1..=8usize);
        // Population over the mid-decade γ window; two feasible frequency
        // windows, one per variant.
        let mut gammas: Vec<f64> = (0..n).map(|_| rng.random_range(0.005..=0.05)).collect();
        gammas.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        let (variant, timing, econ, alpha_of, f_window) = if k % 2 == 0 {
            // Printed forms on the reference timing; the window keeps the
            // performance argument positive at α = 0.5.
            let timing = TimingParams::new(2.0, 2, 1, 15).unwrap();
            let econ = ProviderEconomics::new(20.0, 200.0, 50.0, 20).unwrap();
            (PaperForm, timing, econ, 0.5f64, (0.032f64, 0.16f64))
        } else {
            // Enumeration-consistent forms over broad cycles: positive for
            // every preference weight, so α may vary per type.
            let a = rng.random_range(1..=4u32);
            let t = if rng.random_bool(0.5) { 1.0 } else { 2.0 };
            let timing = TimingParams::new(t, a, 1, 15).unwrap();
            let econ =
                ProviderEconomics::new(rng.random_range(5.0..=40.0), 200.0, 50.0, 20).unwrap();
            let f_lo = 1.0 / 60.0;
            let f_hi = 1.0 / (f64::from(a) * t + t);
            (OracleForm, timing, econ, f64::NAN, (f_lo, f_hi))
        };
        let types: Vec<WorkerType> = gammas
            .iter()
            .enumerate()
            .map(|(pos, &gamma)| WorkerType {
                index: pos + 1,
                gamma,
                q: 1.0 / n as f64,
                alpha: if alpha_of.is_nan() {
                    rng.random_range(0.05..=0.95)
                } else {
                    alpha_of
                },
            })
            .collect();
        let pop = Population::new(types).unwrap();

        // A random monotone frequency allocation inside the window.
        let mut f: Vec<f64> = (0..n)
            .map(|_| rng.random_range(f_window.0..=f_window.1))
            .collect();
        f.sort_by(|x, y| x.partial_cmp(y).expect("finite"));

        // Binding rewards: full-form provider utility equals the reduced
        // objective…
        let rewards = solver::optimal_rewards(&f, &pop);
        let items: Vec<ContractItem> = f
            .iter()
            .zip(&rewards)
            .map(|(&f, &r)| ContractItem { f, r })
            .collect();
        let direct = economics::provider_utility(&items, &pop, &econ, &timing, variant).unwrap();
        let reduced =
            economics::reduced_provider_utility(&f, &pop, &econ, &timing, variant).unwrap();
        max_obj = max_obj.max((direct - reduced).abs());

        // …and the weighted reward mass equals the coefficient-weighted
        // frequency mass.
        let b = economics::reduced_coefficients(&pop);
        let reward_mass: f64 = pop
            .types()
            .iter()
            .zip(&rewards)
            .map(|(ty, &r)| ty.q * r)
            .sum();
        let frequency_mass: f64 = b.iter().zip(&f).map(|(&b, &f)| b * f).sum();
        max_mass = max_mass.max((reward_mass - frequency_mass).abs());
    }
    assert!(max_obj <= 1e-9);
    assert!(max_mass <= 1e-9);
    budget("a3", started, 1.0);
    verdict(
        "a3",
        true,
        &format!(
            "1000 random monotone allocations: |full − reduced| objective \
             max {max_obj:.2e} ≤ 1e-9; reward-mass identity max {max_mass:.2e} ≤ 1e-9"
        ),
    );
}

// ---------------------------------------------------------------------
// a4 — mechanism ordering across idle durations, and the curve shape
// ---------------------------------------------------------------------

#[test]
fn a4_mechanism_ordering_and_duration_shape() {
    let started = Instant::now();
    let cfg = ScenarioConfig::default();
    let a_values: Vec<u32> = (1..=15).collect();
    let sweep = experiments::sweep_duration(&cfg, &a_values).unwrap();

    let pop = experiments::build_population(&cfg).unwrap();
    let max_b = economics::reduced_coefficients(&pop)
        .into_iter()
        .fold(0.0, f64::max);
    let slack = 2.0 * cfg.solver.phi * f64::from(cfg.population.m) * max_b;

    let mut us_ca = Vec::with_capacity(15);
    for point in &sweep.points {
        let ca = point.ca.as_ref().expect("screening feasible at every a");
        let cc = point.cc.as_ref().expect("full-information feasible at every a");
        let cs = point.cs.as_ref().expect("welfare contract feasible at every a");
        assert!(
            cc.provider_utility >= ca.provider_utility - slack,
            "a={}: full-information provider utility below screening",
            point.a
        );
        assert!(
            ca.provider_utility >= cs.provider_utility - slack,
            "a={}: screening provider utility below welfare contract",
            point.a
        );
        for pos in 0..pop.len() {
            assert_eq!(
                cc.worker_utilities[pos], 0.0,
                "a={}: full information must leave zero surplus",
                point.a
            );
            assert!(
                cs.worker_utilities[pos] >= ca.worker_utilities[pos] - slack,
                "a={}: welfare contract pays type {} less than screening",
                point.a,
                pos + 1
            );
            assert!(
                ca.worker_utilities[pos] >= -1e-9,
                "a={}: screening leaves type {} below its outside option",
                point.a,
                pos + 1
            );
        }
        us_ca.push(ca.provider_utility);
    }
    verdict(
        "a4·ordering",
        true,
        &format!(
            "all 15 idle durations: provider utility CC ≥ CA ≥ CS and worker \
             utilities CS ≥ CA ≥ CC = 0 within grid slack {slack:.3e}"
        ),
    );
    budget("a4", started, 20.0);

    // The shape clause: the screening provider utility must peak strictly
    // inside {1..15}.
    let argmax = us_ca
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.partial_cmp(y.1).expect("finite"))
        .map(|(i, _)| i)
        .unwrap();
    let interior = argmax > 0 && argmax + 1 < us_ca.len();
    verdict(
        "a4",
        interior,
        &format!(
            "screening provider utility across idle durations 1..15 must rise \
             then fall with an interior peak; measured: monotone rise from \
             {:.6} (a=1) to {:.6} (a=15), argmax at a={} on the range boundary \
             — the peak lies beyond the sweep range at the reference parameters",
            us_ca[0],
            us_ca[14],
            argmax + 1
        ),
    );
}

// ---------------------------------------------------------------------
// a5 — preference-weight behavior
// ---------------------------------------------------------------------

#[test]
fn a5_preference_factor_behavior() {
    let started = Instant::now();
    let cfg = ScenarioConfig::default();
    let timing = cfg.timing_params().unwrap();
    let econ = cfg.provider_economics().unwrap();

    // Clause 1: at fixed frequency the performance argument is affine in
    // the preference weight with slope (K − Ā) − (H − D̄). Measured through
    // the public satisfaction surface: g = exp(G/β).
    // Sample points sit where the performance argument stays positive
    // across [α₀ − step, α₀ + step] (slow frequencies push the printed-form
    // latency past the tolerance, so low weights are infeasible there).
    let mut max_slope_err = 0.0f64;
    const H_STEP: f64 = 0.1;
    let samples = [
        (0.04, 0.5),
        (0.04, 0.8),
        (0.06, 0.2),
        (0.06, 0.5),
        (0.06, 0.8),
        (0.08, 0.2),
        (0.08, 0.5),
        (0.08, 0.8),
        (0.12, 0.2),
        (0.12, 0.5),
        (0.12, 0.8),
    ];
    for (f, alpha0) in samples {
        let g_at = |alpha: f64| -> f64 {
            let ty = WorkerType { index: 1, gamma: 0.01, q: 1.0, alpha };
            let g_log = economics::satisfaction(f, &ty, &econ, &timing, PaperForm).unwrap();
            (g_log / econ.beta).exp()
        };
        let numeric = (g_at(alpha0 + H_STEP) - g_at(alpha0 - H_STEP)) / (2.0 * H_STEP);
        let theta = 1.0 / f;
        let aoi = freshness::avg_aoi_theta(theta, timing.a, timing.t, PaperForm).unwrap();
        let latency = freshness::avg_latency_theta(theta, timing.a, timing.t, PaperForm).unwrap();
        let analytic = (econ.k - aoi) - (econ.h - latency);
        max_slope_err = max_slope_err.max((numeric - analytic).abs());
    }
    assert!(max_slope_err <= 1e-9);
    verdict(
        "a5·slope",
        true,
        &format!(
            "performance argument is affine in the preference weight: \
             |numeric − (K−Ā)+(H−D̄) slope| max {max_slope_err:.2e} ≤ 1e-9"
        ),
    );

    // Sweep the shared weight across the production grid.
    let alphas: Vec<f64> = (1..=9).map(|k| f64::from(k) / 10.0).collect();
    let sweep = experiments::sweep_alpha(&cfg, &alphas).unwrap();
    let points: Vec<_> = sweep
        .points
        .iter()
        .map(|p| (p, p.result.as_ref().expect("feasible at defaults")))
        .collect();

    // The monotonicity clauses apply wherever K − Ā > H − D̄ holds along
    // the solution path (it holds everywhere here — recorded below).
    let guard_holds = |f: f64| -> bool {
        let theta = 1.0 / f;
        let aoi = freshness::avg_aoi_theta(theta, timing.a, timing.t, PaperForm).unwrap();
        let latency =
            freshness::avg_latency_theta(theta, timing.a, timing.t, PaperForm).unwrap();
        econ.k - aoi > econ.h - latency
    };
    let n_types = points[0].1.f_star.len();
    let mut guarded_pairs = 0usize;
    let mut cycle_violations = 0usize;
    let mut reward_violations = 0usize;
    for pos in 0..n_types {
        for w in points.windows(2) {
            let (lo_point, lo) = &w[0];
            let (hi_point, hi) = &w[1];
            if !(guard_holds(lo.f_star[pos]) && guard_holds(hi.f_star[pos])) {
                continue;
            }
            guarded_pairs += 1;
            if hi_point.cycles_raw[pos] < lo_point.cycles_raw[pos] - 1e-9 {
                cycle_violations += 1;
            }
            if hi.r_star[pos] < lo.r_star[pos] - 1e-9 {
                reward_violations += 1;
            }
        }
    }
    assert_eq!(guarded_pairs, n_types * 8, "the slope guard must hold along the whole path");
    assert_eq!(cycle_violations, 0);
    verdict(
        "a5·cycles",
        true,
        &format!(
            "implied update-cycle counts nondecreasing in the preference \
             weight for all {n_types} types across 9 weights (guard held at \
             every point)"
        ),
    );
    budget("a5", started, 10.0);

    let r1_first = points[0].1.r_star[0];
    let r1_last = points[8].1.r_star[0];
    verdict(
        "a5",
        reward_violations == 0,
        &format!(
            "per-type rewards must be nondecreasing in the preference weight \
             while the slope guard holds; measured: {reward_violations}/{guarded_pairs} \
             guarded steps decrease (e.g. type 1 reward falls {r1_first:.4} → \
             {r1_last:.4}) — optimal frequencies fall as the weight rises and \
             rewards track their costs downward"
        ),
    );
}

// ---------------------------------------------------------------------
// a6 — monotonicity repair vs. exhaustive search
// ---------------------------------------------------------------------

/// Literal exhaustive search over nondecreasing grid-index vectors.
fn exhaustive_monotone_best(values: &[Vec<Option<f64>>]) -> f64 {
    let m = values[0].len();
    let mut best = f64::NEG_INFINITY;
    match values.len() {
        1 => {
            for z in 0..m {
                if let Some(v) = values[0][z] {
                    best = best.max(v);
                }
            }
        }
        2 => {
            for i in 0..m {
                let Some(v0) = values[0][i] else { continue };
                for j in i..m {
                    let Some(v1) = values[1][j] else { continue };
                    best = best.max(v0 + v1);
                }
            }
        }
        3 => {
            for i in 0..m {
                let Some(v0) = values[0][i] else { continue };
                for j in i..m {
                    let Some(v1) = values[1][j] else { continue };
                    for k in j..m {
                        let Some(v2) = values[2][k] else { continue };
                        best = best.max(v0 + v1 + v2);
                    }
                }
            }
        }
        _ => unreachable!("the exhaustive oracle covers N ≤ 3"),
    }
    best
}

#[test]
fn a6_ironing_matches_exhaustive() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA6);
    let mut repaired = 0usize;
    let mut max_gap = 0.0f64;
    let instances = 300;
    for k in 0..instances {
        let n = 1 + k % 3;
        let inst = random_instance(&mut rng, n, 50);
        let result = solver::solve_ca(&inst.pop, &inst.econ, &inst.timing, &inst.params)
            .unwrap_or_else(|e| panic!("instance {k} unexpectedly failed: {e}"));
        for w in result.f_star.windows(2) {
            assert!(w[0] <= w[1], "instance {k}: allocation not monotone");
        }
        let attained =
            economics::reduced_provider_utility(&result.f_star, &inst.pop, &inst.econ, &inst.timing, inst.params.variant)
                .unwrap();

        // Per-type objective values over the exact scan grid.
        let b = economics::reduced_coefficients(&inst.pop);
        let m_weight = f64::from(inst.econ.m);
        let values: Vec<Vec<Option<f64>>> = inst
            .pop
            .types()
            .iter()
            .enumerate()
            .map(|(pos, ty)| {
                (0..50)
                    .map(|z| {
                        let f = inst.params.f_min + z as f64 * inst.params.phi;
                        match economics::satisfaction(f, ty, &inst.econ, &inst.timing, inst.params.variant) {
                            Ok(g) => Some(m_weight * (ty.q * g - b[pos] * f)),
                            Err(aoi_contract::Error::NonpositivePerformance { .. }) => None,
                            Err(e) => panic!("instance {k}: {e}"),
                        }
                    })
                    .collect()
            })
            .collect();
        let best = exhaustive_monotone_best(&values);
        max_gap = max_gap.max((best - attained).abs());
        assert!(
            (best - attained).abs() <= 1e-9,
            "instance {k} (N={n}): repair attained {attained}, exhaustive best {best}"
        );
        if !result.ironed_groups.is_empty() {
            repaired += 1;
        }
    }
    assert!(
        repaired >= 60,
        "monotonicity repair exercised only {repaired}/{instances} times"
    );
    budget("a6", started, 5.0);
    verdict(
        "a6",
        true,
        &format!(
            "{instances} random N ≤ 3 instances on 50-point grids: repaired \
             allocation attains the exhaustive nondecreasing-vector optimum \
             (max |Δ| = {max_gap:.2e} ≤ 1e-9; repair exercised {repaired} times)"
        ),
    );
}

// ---------------------------------------------------------------------
// a7 — convexity of the freshness curves in the cycle length
// ---------------------------------------------------------------------

#[test]
fn a7_convexity_claims() {
    let started = Instant::now();
    const TOL: f64 = -1e-9;
    let grid = |a: u32, t: f64| -> Vec<f64> {
        let floor = f64::from(a) * t;
        (1..=400)
            .map(|i| floor + f64::from(i) * (60.0 - floor) / 400.0)
            .collect()
    };
    let min_second_diff = |ys: &[f64]| -> f64 {
        ys.windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(f64::INFINITY, f64::min)
    };
    let mut worst = f64::INFINITY;

    for t in [1.0, 2.0] {
        // Latency is convex for both variants at every idle duration.
        for a in 1..=4u32 {
            for variant in [PaperForm, OracleForm] {
                let latency: Vec<f64> = grid(a, t)
                    .iter()
                    .map(|&theta| freshness::avg_latency_theta(theta, a, t, variant).unwrap())
                    .collect();
                let d2 = min_second_diff(&latency);
                worst = worst.min(d2);
                assert!(d2 >= TOL, "latency {variant} a={a} t={t}: {d2:.2e}");
            }
        }
        // AoI is convex for the enumeration-consistent form at every a and
        // for the printed form once a > 1; the joint probe covers both
        // curves at once.
        for a in 1..=4u32 {
            assert!(freshness::convexity_probe(a, t, OracleForm, &grid(a, t)).unwrap());
        }
        for a in 2..=4u32 {
            assert!(freshness::convexity_probe(a, t, PaperForm, &grid(a, t)).unwrap());
        }
    }
    budget("a7", started, 1.0);
    verdict(
        "a7",
        true,
        &format!(
            "second differences of latency (both forms, a ∈ 1..4) and AoI \
             (enumeration form a ∈ 1..4, printed form a ∈ 2..4) on 400-point \
             cycle grids up to 60s: min {worst:.2e} ≥ -1e-9"
        ),
    );
}

// ---------------------------------------------------------------------
// a8 — workflow timing simulator
// ---------------------------------------------------------------------

#[test]
fn a8_timing_simulator() {
    let started = Instant::now();

    // Calibrated defaults: the decomposition is exact in 64-bit floats.
    let calibrated = WorkflowConfig::default();
    let round = flsim::simulate_round(&calibrated, 0);
    assert_eq!(round.t_u, 1.2);
    assert_eq!(round.t_c, 0.8);
    assert_eq!(round.t, 2.0);
    verdict(
        "a8·calibration",
        true,
        "calibrated stage delays give t_u = 1.2, t_c = 0.8, t = 2.0 exactly",
    );

    // 1,000 seeded stochastic rounds: the event log is causally ordered.
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA8 ^ seed);
        let spec = |rng: &mut ChaCha8Rng| {
            let min = rng.random_range(0.01..=0.5);
            DelaySpec::Uniform { min, max: min + rng.random_range(0.0..=0.5) }
        };
        let workflow = WorkflowConfig {
            publish: spec(&mut rng),
            relay_verify: spec(&mut rng),
            dispatch: spec(&mut rng),
            train: spec(&mut rng),
            upload: spec(&mut rng),
            subchain_check: spec(&mut rng),
            relay_transfer: spec(&mut rng),
            aggregate: spec(&mut rng),
            distribute: spec(&mut rng),
            physical_workers: rng.random_range(1..=5),
            virtual_workers: rng.random_range(1..=5),
            epochs: 1,
            seed,
        };
        workflow.validate().unwrap();

        let round = flsim::simulate_round(&workflow, 0);
        assert_eq!(round.t, round.t_u + round.t_c, "seed {seed}: decomposition broke");

        let trace = flsim::emit_trace(&workflow);
        let at = |entity: &str, stage: &str| -> f64 {
            trace
                .iter()
                .find(|e| e.entity == entity && e.stage == stage)
                .unwrap_or_else(|| panic!("seed {seed}: no {stage} event for {entity}"))
                .timestamp
        };
        let publish = at("main_chain", "publish");
        let verify = at("relay_chain", "relay_verify");
        assert!(publish <= verify, "seed {seed}");
        for chain in ["physical", "virtual"] {
            let entity = format!("subchain_{chain}");
            let dispatch = at(&entity, "dispatch");
            assert!(verify <= dispatch, "seed {seed}");
            let mut last_upload = f64::NEG_INFINITY;
            let workers = trace
                .iter()
                .filter(|e| e.entity.starts_with(&format!("{chain}_worker")) && e.stage == "train");
            for event in workers {
                assert!(dispatch <= event.timestamp, "seed {seed}: {} trained early", event.entity);
                let upload = at(&event.entity, "upload");
                assert!(event.timestamp <= upload, "seed {seed}: {} uploaded early", event.entity);
                last_upload = last_upload.max(upload);
            }
            let check = at(&entity, "subchain_check");
            assert!(last_upload <= check, "seed {seed}: {entity} checked before its uploads");
            let transfer = at("relay_chain", "relay_transfer");
            assert!(check <= transfer, "seed {seed}: transfer before {entity} check");
        }
        let transfer = at("relay_chain", "relay_transfer");
        let aggregate = at("main_chain", "aggregate");
        let distribute = at("main_chain", "distribute");
        assert!(transfer <= aggregate && aggregate <= distribute, "seed {seed}");
    }
    budget("a8", started, 2.0);
    verdict(
        "a8",
        true,
        "calibrated round is exactly 2.0s; workflow event order \
         (publish → verify → dispatch → train → upload → subchain check → \
         transfer → aggregate → distribute) held on 1000 seeded rounds",
    );
}

// ---------------------------------------------------------------------
// a9 — byte-level determinism through the CLI
// ---------------------------------------------------------------------

/// Drops the wall-time column, the one legitimately nondeterministic value.
fn mask_wall_time_csv(text: &str) -> String {
    text.lines()
        .map(|line| match line.rsplit_once(',') {
            Some((rest, _)) => rest.to_string(),
            None => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn mask_wall_time_json(value: &mut Value) {
    match value {
        Value::Object(map) => {
            for (key, entry) in map.iter_mut() {
                if key == "wall_time_ms" {
                    *entry = Value::Null;
                } else {
                    mask_wall_time_json(entry);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(mask_wall_time_json),
        _ => {}
    }
}

fn run_command(dir: &Path, command: &str) -> Vec<u8> {
    let output = Command::new(env!("CARGO_BIN_EXE_aoi-contract"))
        .args([
            command,
            "--seed",
            "7",
            "--set",
            "solver.phi=1e-5",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .expect("binary runs");
    assert_eq!(
        output.status.code(),
        Some(0),
        "{command}: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output.stdout
}

#[test]
fn a9_determinism() {
    let started = Instant::now();
    let commands = [
        "solve",
        "verify",
        "choice-matrix",
        "sweep-a",
        "sweep-alpha",
        "compare",
        "simulate-timing",
    ];
    let mut files_checked = 0usize;
    for command in commands {
        let first = TempDir::new().unwrap();
        let second = TempDir::new().unwrap();
        let stdout_a = run_command(first.path(), command);
        let stdout_b = run_command(second.path(), command);
        assert_eq!(
            stdout_a, stdout_b,
            "{command}: stdout differs between identical runs"
        );

        let mut names: Vec<String> = fs::read_dir(first.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        let mut names_b: Vec<String> = fs::read_dir(second.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names_b.sort();
        assert_eq!(names, names_b, "{command}: emitted different file sets");

        for name in &names {
            let bytes_a = fs::read(first.path().join(name)).unwrap();
            let bytes_b = fs::read(second.path().join(name)).unwrap();
            match name.as_str() {
                "compare.csv" => {
                    let a = mask_wall_time_csv(&String::from_utf8(bytes_a).unwrap());
                    let b = mask_wall_time_csv(&String::from_utf8(bytes_b).unwrap());
                    assert_eq!(a, b, "{command}/{name} differs beyond wall time");
                }
                "compare.json" => {
                    let mut a: Value = serde_json::from_slice(&bytes_a).unwrap();
                    let mut b: Value = serde_json::from_slice(&bytes_b).unwrap();
                    mask_wall_time_json(&mut a);
                    mask_wall_time_json(&mut b);
                    assert_eq!(a, b, "{command}/{name} differs beyond wall time");
                }
                _ => assert_eq!(bytes_a, bytes_b, "{command}/{name} differs"),
            }
            files_checked += 1;
        }
    }
    verdict(
        "a9",
        true,
        &format!(
            "all 7 commands re-run byte-identically with identical config+seed \
             ({files_checked} artifact comparisons; wall-time column of the \
             mechanism comparison masked as documented)"
        ),
    );
    println!("[a9] runtime {:.2}s (no pinned budget)", started.elapsed().as_secs_f64());
}
