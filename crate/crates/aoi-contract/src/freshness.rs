//! Average service latency and average Age of Information over one update
//! cycle.
//!
//! # Model
//!
//! A worker alternates between `c ≥ 1` collection periods and `a ≥ 1` idle
//! periods, each lasting `t` seconds, so one update cycle spans
//! `θ = (c + a)·t`. A consumer request is equally likely to arrive in any of
//! the `c + a` periods of a cycle:
//!
//! * **Service latency** — a request arriving in collection period
//!   `z ∈ {1..c}` waits until the end of collection plus one delivery
//!   period, `c·t + t − (z − 1)·t`; a request arriving in an idle period is
//!   served from cache in `t`.
//! * **Age of Information (AoI)** — data served during collection or in the
//!   first idle period is one period old (`t`); in later idle period
//!   `l ∈ {c+2 .. c+a}` the cached copy has aged to `(l − c)·t`.
//!
//! Averaging over the `c + a` equiprobable arrival periods gives closed
//! forms in `(c, a)` and — after substituting `c = θ/t − a` — in `θ`, the
//! form the contract solver optimizes over (it treats `θ` as continuous).
//!
//! # Variants
//!
//! The closed forms as originally published disagree with the verbal model
//! they were derived from: the latency form carries an extra factor `c` in
//! the collection-phase term (visible for `c ≥ 2`), and the θ-form of the
//! AoI ends up with denominator `θ − a·t` where the exact substitution gives
//! `θ`. Both readings are implemented and selectable via
//! [`FreshnessVariant`]:
//!
//! * [`FreshnessVariant::PaperForm`] — the published formulas exactly as
//!   printed (the default, for faithful reproduction of the original
//!   numerical study);
//! * [`FreshnessVariant::OracleForm`] — the enumeration-consistent forms,
//!   which agree with [`oracle_metrics`] to machine precision.
//!
//! The difference between the two latency forms is exactly
//! `(c − 1)·c·t·(c + 3) / (2(c + a))`, which vanishes at `c = 1`. The
//! `(c, a)`-form of the AoI is identical under both variants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which reading of the freshness closed forms to evaluate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FreshnessVariant {
    /// The closed forms exactly as originally published. Default.
    #[default]
    #[serde(rename = "paper")]
    PaperForm,
    /// The enumeration-consistent closed forms, matching [`oracle_metrics`].
    #[serde(rename = "oracle")]
    OracleForm,
}

impl std::fmt::Display for FreshnessVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FreshnessVariant::PaperForm => f.write_str("paper"),
            FreshnessVariant::OracleForm => f.write_str("oracle"),
        }
    }
}

impl std::str::FromStr for FreshnessVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(FreshnessVariant::PaperForm),
            "oracle" => Ok(FreshnessVariant::OracleForm),
            other => Err(Error::domain(
                "freshness variant",
                format!("unknown variant `{other}` (expected `paper` or `oracle`)"),
            )),
        }
    }
}

/// Timing structure of the update cycle shared by a whole scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingParams {
    /// Length of one period in seconds (one global iteration plus
    /// consensus, `t = t_u + t_c`).
    pub t: f64,
    /// Number of idle periods per update cycle.
    pub a: u32,
    /// Smallest admissible number of collection periods.
    pub c_min: u32,
    /// Largest admissible number of collection periods.
    pub c_max: u32,
}

impl TimingParams {
    /// Validates and constructs timing parameters.
    ///
    /// Requires `t > 0` (finite), `a ≥ 1`, and `1 ≤ c_min ≤ c_max`.
    pub fn new(t: f64, a: u32, c_min: u32, c_max: u32) -> Result<Self> {
        check_t(t)?;
        check_a(a)?;
        if c_min < 1 {
            return Err(Error::domain(
                "timing parameters",
                format!("c_min must be at least 1, got {c_min}"),
            ));
        }
        if c_min > c_max {
            return Err(Error::domain(
                "timing parameters",
                format!("c_min ({c_min}) must not exceed c_max ({c_max})"),
            ));
        }
        Ok(TimingParams { t, a, c_min, c_max })
    }

    /// Smallest update cycle the model admits, `a·t`; every `θ` must be
    /// strictly larger.
    pub fn min_theta(&self) -> f64 {
        self.a as f64 * self.t
    }

    /// Largest update frequency consistent with at least `c_min` collection
    /// periods: `1 / ((c_min + a)·t)`.
    pub fn auto_f_max(&self) -> f64 {
        1.0 / ((self.c_min + self.a) as f64 * self.t)
    }
}

/// Exact per-cycle averages produced by the enumeration oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleMetrics {
    /// Average service latency over the cycle, seconds.
    pub avg_latency: f64,
    /// Average Age of Information over the cycle, seconds.
    pub avg_aoi: f64,
    /// Update cycle length `θ = (c + a)·t`, seconds.
    pub theta: f64,
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain(
            "period length",
            format!("t must be a positive finite duration, got {t}"),
        ));
    }
    Ok(())
}

fn check_a(a: u32) -> Result<()> {
    if a < 1 {
        return Err(Error::domain(
            "idle periods",
            format!("a must be at least 1, got {a}"),
        ));
    }
    Ok(())
}

fn check_c(c: u32) -> Result<()> {
    if c < 1 {
        return Err(Error::domain(
            "collection periods",
            format!("c must be at least 1, got {c}"),
        ));
    }
    Ok(())
}

fn check_theta(theta: f64, a: u32, t: f64) -> Result<()> {
    check_a(a)?;
    check_t(t)?;
    let floor = a as f64 * t;
    if !(theta.is_finite() && theta > floor) {
        return Err(Error::domain(
            "update cycle",
            format!("theta must exceed a·t = {floor}, got {theta}"),
        ));
    }
    Ok(())
}

/// Update cycle length `θ = (c + a)·t`.
pub fn update_cycle(c: u32, a: u32, t: f64) -> Result<f64> {
    check_c(c)?;
    check_a(a)?;
    check_t(t)?;
    Ok((c + a) as f64 * t)
}

/// Average service latency in the `(c, a)` parameterization.
///
/// `PaperForm` evaluates `(c/(c+a))·(c·t/2)·(c+3) + a·t/(c+a)`;
/// `OracleForm` evaluates `(c·t·(c+3)/2 + a·t)/(c+a)`, which equals the
/// enumeration average exactly. The two coincide at `c = 1`.
pub fn avg_latency_ca(c: u32, a: u32, t: f64, variant: FreshnessVariant) -> Result<f64> {
    check_c(c)?;
    check_a(a)?;
    check_t(t)?;
    let (cf, af) = (c as f64, a as f64);
    let total = cf + af;
    Ok(match variant {
        FreshnessVariant::PaperForm => (cf / total) * (cf * t / 2.0) * (cf + 3.0) + af * t / total,
        FreshnessVariant::OracleForm => (cf * t * (cf + 3.0) / 2.0 + af * t) / total,
    })
}

/// Average Age of Information in the `(c, a)` parameterization.
///
/// Both variants evaluate `(t/(c+a))·[c + 1 + (a−1)(a+2)/2]`; the published
/// `(c, a)`-form already matches the enumeration.
pub fn avg_aoi_ca(c: u32, a: u32, t: f64, variant: FreshnessVariant) -> Result<f64> {
    check_c(c)?;
    check_a(a)?;
    check_t(t)?;
    let _ = variant; // the (c, a)-form is variant-independent
    let (cf, af) = (c as f64, a as f64);
    Ok(t / (cf + af) * (cf + 1.0 + (af - 1.0) * (af + 2.0) / 2.0))
}

/// Average service latency as a function of the (continuous) update cycle
/// `θ > a·t`.
///
/// `PaperForm` evaluates `(θ−at)³/(2tθ) + 3(θ−at)²/(2θ) + at²/θ` as
/// printed; `OracleForm` evaluates `((θ−at)(θ−at+3t)/2 + at²)/θ`, the exact
/// substitution `c = θ/t − a` into the enumeration-consistent `(c, a)`-form.
pub fn avg_latency_theta(theta: f64, a: u32, t: f64, variant: FreshnessVariant) -> Result<f64> {
    check_theta(theta, a, t)?;
    let at = a as f64 * t;
    let s = theta - at; // c·t, strictly positive on the valid domain
    Ok(match variant {
        FreshnessVariant::PaperForm => {
            s * s * s / (2.0 * t * theta) + 3.0 * s * s / (2.0 * theta) + at * t / theta
        }
        FreshnessVariant::OracleForm => (s * (s + 3.0 * t) / 2.0 + at * t) / theta,
    })
}

/// Average Age of Information as a function of the (continuous) update
/// cycle `θ > a·t`.
///
/// `PaperForm` evaluates `tθ/(θ−at) + (t²/(θ−at))·(a²−a)/2` as printed;
/// `OracleForm` evaluates `t + t²(a²−a)/(2θ)`, the exact substitution
/// `c = θ/t − a` into the `(c, a)`-form.
pub fn avg_aoi_theta(theta: f64, a: u32, t: f64, variant: FreshnessVariant) -> Result<f64> {
    check_theta(theta, a, t)?;
    let af = a as f64;
    let idle_pairs = af * af - af; // a(a−1), the aged-cache weight
    Ok(match variant {
        FreshnessVariant::PaperForm => {
            let s = theta - af * t;
            t * theta / s + t * t / s * idle_pairs / 2.0
        }
        FreshnessVariant::OracleForm => t + t * t * idle_pairs / (2.0 * theta),
    })
}

/// Exact enumeration over the `c + a` equiprobable arrival periods of one
/// update cycle.
///
/// Latency and AoI are accumulated as exact integer counts of periods (each
/// value is an integer multiple of `t`) and divided once at the end, so the
/// returned averages are exact up to the final rounding.
pub fn oracle_metrics(c: u32, a: u32, t: f64) -> Result<CycleMetrics> {
    check_c(c)?;
    check_a(a)?;
    check_t(t)?;

    // Latency, in units of t: a request in collection period z waits
    // (c + 2 − z) periods; a request in an idle period is served in 1.
    let mut latency_periods: u64 = 0;
    for z in 1..=c {
        latency_periods += u64::from(c + 2 - z);
    }
    latency_periods += u64::from(a);

    // AoI, in units of t: periods 1..c+1 serve one-period-old data; idle
    // period l ∈ {c+2 .. c+a} serves data aged (l − c) periods.
    let mut aoi_periods: u64 = u64::from(c + 1);
    for l in (c + 2)..=(c + a) {
        aoi_periods += u64::from(l - c);
    }

    let total = f64::from(c + a);
    Ok(CycleMetrics {
        avg_latency: t * latency_periods as f64 / total,
        avg_aoi: t * aoi_periods as f64 / total,
        theta: (c + a) as f64 * t,
    })
}

/// Checks discrete convexity of both freshness curves along a θ grid.
///
/// Returns `true` iff every second-order finite difference of
/// [`avg_latency_theta`] and of [`avg_aoi_theta`] along the grid is at
/// least `−1e−9`. The raw (unscaled) second difference
/// `y_{i+1} − 2y_i + y_{i−1}` is used, so the probe is meaningful on
/// uniformly spaced grids; the grid must be strictly increasing, hold at
/// least three points, and lie strictly above `a·t`.
pub fn convexity_probe(a: u32, t: f64, variant: FreshnessVariant, theta_grid: &[f64]) -> Result<bool> {
    check_a(a)?;
    check_t(t)?;
    if theta_grid.len() < 3 {
        return Err(Error::domain(
            "convexity probe",
            format!("grid must hold at least 3 points, got {}", theta_grid.len()),
        ));
    }
    let floor = a as f64 * t;
    for pair in theta_grid.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::domain(
                "convexity probe",
                format!("grid must be strictly increasing, saw {} then {}", pair[0], pair[1]),
            ));
        }
    }
    for &theta in theta_grid {
        if !(theta.is_finite() && theta > floor) {
            return Err(Error::domain(
                "convexity probe",
                format!("grid point {theta} does not exceed a·t = {floor}"),
            ));
        }
    }

    const TOL: f64 = -1e-9;
    let latency: Vec<f64> = theta_grid
        .iter()
        .map(|&theta| avg_latency_theta(theta, a, t, variant))
        .collect::<Result<_>>()?;
    let aoi: Vec<f64> = theta_grid
        .iter()
        .map(|&theta| avg_aoi_theta(theta, a, t, variant))
        .collect::<Result<_>>()?;
    let convex = |ys: &[f64]| {
        ys.windows(3)
            .all(|w| w[2] - 2.0 * w[1] + w[0] >= TOL)
    };
    Ok(convex(&latency) && convex(&aoi))
}
