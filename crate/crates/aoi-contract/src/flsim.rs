//! Desk-scale discrete-event stand-in for the cross-chain federated
//! learning round, producing the period length `t = t_u + t_c` the
//! freshness model is parameterized by.
//!
//! One round walks the workflow: a task is published on the main chain,
//! verified and forwarded by the relay chain, dispatched to the physical
//! and virtual subchains, trained on and uploaded by every worker,
//! committed by each subchain, transferred back through the relay, and
//! finally aggregated and redistributed by the main chain. Training is
//! synchronous, so the learning phase lasts
//! `t_u = max over workers (train + upload)`; the seven chain-side stages
//! sum to the consensus time `t_c`, and the round lasts exactly
//! `t = t_u + t_c`.
//!
//! Every stage delay is a [`DelaySpec`] — a constant or a uniform range —
//! and all sampling is deterministic in `(seed, epoch)`: epoch `e` draws
//! from stream `e` of a counter-based generator seeded once per
//! configuration, so any round can be replayed independently.
//!
//! The default configuration is calibrated so a round takes exactly
//! `t_u = 1.2`, `t_c = 0.8`, `t = 2.0` seconds, the period the contract
//! scenarios assume. Workers are homogeneous: each draws its training and
//! upload times from the same specs (heterogeneity within a round comes
//! from the draws themselves).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One stage's delay model: a constant, or a uniform draw per use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelaySpec {
    /// Always exactly this many seconds.
    Fixed(f64),
    /// Uniform on `[min, max]` seconds, drawn independently per use.
    Uniform {
        /// Inclusive lower bound, seconds.
        min: f64,
        /// Inclusive upper bound, seconds.
        max: f64,
    },
}

impl DelaySpec {
    /// Validates the delay model: finite, nonnegative, ordered bounds.
    pub fn validate(&self, stage: &'static str) -> Result<()> {
        match *self {
            DelaySpec::Fixed(v) => {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::domain(
                        "workflow delay",
                        format!("{stage}: fixed delay must be nonnegative and finite, got {v}"),
                    ));
                }
            }
            DelaySpec::Uniform { min, max } => {
                if !(min.is_finite() && max.is_finite() && min >= 0.0 && min <= max) {
                    return Err(Error::domain(
                        "workflow delay",
                        format!("{stage}: uniform bounds must satisfy 0 ≤ min ≤ max, got [{min}, {max}]"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            DelaySpec::Fixed(v) => v,
            DelaySpec::Uniform { min, max } => {
                if min == max {
                    min
                } else {
                    rng.random_range(min..=max)
                }
            }
        }
    }

    /// Expected value of the delay.
    pub fn mean(&self) -> f64 {
        match *self {
            DelaySpec::Fixed(v) => v,
            DelaySpec::Uniform { min, max } => 0.5 * (min + max),
        }
    }
}

/// Full description of one simulated workflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkflowConfig {
    /// Task publication onto the main chain.
    pub publish: DelaySpec,
    /// Relay-chain verification of the published task.
    pub relay_verify: DelaySpec,
    /// Dispatch from the relay to the subchains.
    pub dispatch: DelaySpec,
    /// One worker's local training pass.
    pub train: DelaySpec,
    /// One worker's model upload and in-subchain verification.
    pub upload: DelaySpec,
    /// Subchain commit check after its workers upload.
    pub subchain_check: DelaySpec,
    /// Transfer from the relay back to the main chain.
    pub relay_transfer: DelaySpec,
    /// Main-chain aggregation into the new global model.
    pub aggregate: DelaySpec,
    /// Distribution of the global model to participants.
    pub distribute: DelaySpec,
    /// Worker count on the physical subchain.
    pub physical_workers: u32,
    /// Worker count on the virtual subchain.
    pub virtual_workers: u32,
    /// Number of rounds to simulate.
    pub epochs: u32,
    /// Base seed; epoch `e` draws from stream `e` of this seed.
    pub seed: u64,
}

impl Default for WorkflowConfig {
    /// Calibrated so every round lasts exactly `t_u = 1.2`, `t_c = 0.8`,
    /// `t = 2.0` seconds.
    fn default() -> Self {
        WorkflowConfig {
            publish: DelaySpec::Fixed(0.1),
            relay_verify: DelaySpec::Fixed(0.1),
            dispatch: DelaySpec::Fixed(0.1),
            train: DelaySpec::Fixed(1.0),
            upload: DelaySpec::Fixed(0.2),
            subchain_check: DelaySpec::Fixed(0.1),
            relay_transfer: DelaySpec::Fixed(0.1),
            aggregate: DelaySpec::Fixed(0.15),
            distribute: DelaySpec::Fixed(0.15),
            physical_workers: 10,
            virtual_workers: 10,
            epochs: 100,
            seed: 0,
        }
    }
}

impl WorkflowConfig {
    /// Validates every delay spec and the counts.
    pub fn validate(&self) -> Result<()> {
        self.publish.validate("publish")?;
        self.relay_verify.validate("relay_verify")?;
        self.dispatch.validate("dispatch")?;
        self.train.validate("train")?;
        self.upload.validate("upload")?;
        self.subchain_check.validate("subchain_check")?;
        self.relay_transfer.validate("relay_transfer")?;
        self.aggregate.validate("aggregate")?;
        self.distribute.validate("distribute")?;
        if self.physical_workers < 1 || self.virtual_workers < 1 {
            return Err(Error::domain(
                "workflow config",
                "both subchains need at least one worker",
            ));
        }
        if self.epochs < 1 {
            return Err(Error::domain("workflow config", "epochs must be at least 1"));
        }
        Ok(())
    }
}

/// The seven chain-side stage durations of one round, in draw order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageDurations {
    pub publish: f64,
    pub relay_verify: f64,
    pub dispatch: f64,
    pub subchain_check: f64,
    pub relay_transfer: f64,
    pub aggregate: f64,
    pub distribute: f64,
}

/// Timing decomposition of one simulated round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTiming {
    /// Synchronous learning time: `max` over workers of train + upload.
    pub t_u: f64,
    /// Consensus time: sum of the seven chain-side stages.
    pub t_c: f64,
    /// Round time, exactly `t_u + t_c`.
    pub t: f64,
    /// The chain-side stage breakdown.
    pub consensus: StageDurations,
    /// Per-worker train + upload totals, physical subchain first.
    pub worker_times: Vec<f64>,
}

/// Aggregate of a whole simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    /// Rounds simulated.
    pub epochs: u32,
    /// Mean learning time per round.
    pub t_u: f64,
    /// Mean consensus time per round.
    pub t_c: f64,
    /// Mean round time (equals `t_u + t_c` of the means).
    pub t: f64,
    /// Fastest round observed.
    pub min_t: f64,
    /// Slowest round observed.
    pub max_t: f64,
}

/// One entry of the event log: when `entity` finished `stage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    /// Completion time within the round, seconds from round start.
    pub timestamp: f64,
    /// Which chain or worker acted.
    pub entity: String,
    /// Which workflow stage completed.
    pub stage: String,
}

/// All random draws of one round, in canonical order.
struct RoundDraws {
    publish: f64,
    relay_verify: f64,
    dispatch: f64,
    physical: Vec<(f64, f64)>, // (train, upload) per physical worker
    virtual_pool: Vec<(f64, f64)>,
    subchain_check: f64,
    relay_transfer: f64,
    aggregate: f64,
    distribute: f64,
}

fn draw_round(config: &WorkflowConfig, epoch: u32) -> RoundDraws {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::from(epoch));
    let publish = config.publish.sample(&mut rng);
    let relay_verify = config.relay_verify.sample(&mut rng);
    let dispatch = config.dispatch.sample(&mut rng);
    let mut draw_workers = |count: u32| -> Vec<(f64, f64)> {
        (0..count)
            .map(|_| (config.train.sample(&mut rng), config.upload.sample(&mut rng)))
            .collect()
    };
    let physical = draw_workers(config.physical_workers);
    let virtual_pool = draw_workers(config.virtual_workers);
    RoundDraws {
        publish,
        relay_verify,
        dispatch,
        physical,
        virtual_pool,
        subchain_check: config.subchain_check.sample(&mut rng),
        relay_transfer: config.relay_transfer.sample(&mut rng),
        aggregate: config.aggregate.sample(&mut rng),
        distribute: config.distribute.sample(&mut rng),
    }
}

/// Simulates one round. Deterministic in `(config.seed, epoch)`.
pub fn simulate_round(config: &WorkflowConfig, epoch: u32) -> RoundTiming {
    let draws = draw_round(config, epoch);
    let worker_times: Vec<f64> = draws
        .physical
        .iter()
        .chain(&draws.virtual_pool)
        .map(|&(train, upload)| train + upload)
        .collect();
    let t_u = worker_times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let consensus = StageDurations {
        publish: draws.publish,
        relay_verify: draws.relay_verify,
        dispatch: draws.dispatch,
        subchain_check: draws.subchain_check,
        relay_transfer: draws.relay_transfer,
        aggregate: draws.aggregate,
        distribute: draws.distribute,
    };
    let t_c = consensus.publish
        + consensus.relay_verify
        + consensus.dispatch
        + consensus.subchain_check
        + consensus.relay_transfer
        + consensus.aggregate
        + consensus.distribute;
    RoundTiming { t_u, t_c, t: t_u + t_c, consensus, worker_times }
}

/// Mean round time over `config.epochs` rounds — the value to feed the
/// contract timing as `t`.
pub fn average_round_time(config: &WorkflowConfig) -> f64 {
    let mut sum = 0.0;
    for epoch in 0..config.epochs {
        sum += simulate_round(config, epoch).t;
    }
    sum / f64::from(config.epochs)
}

/// Simulates all epochs and aggregates their timings.
pub fn summarize(config: &WorkflowConfig) -> TimingSummary {
    let mut sum_u = 0.0;
    let mut sum_c = 0.0;
    let mut sum_t = 0.0;
    let mut min_t = f64::INFINITY;
    let mut max_t = f64::NEG_INFINITY;
    for epoch in 0..config.epochs {
        let round = simulate_round(config, epoch);
        sum_u += round.t_u;
        sum_c += round.t_c;
        sum_t += round.t;
        min_t = min_t.min(round.t);
        max_t = max_t.max(round.t);
    }
    let n = f64::from(config.epochs);
    TimingSummary {
        epochs: config.epochs,
        t_u: sum_u / n,
        t_c: sum_c / n,
        t: sum_t / n,
        min_t,
        max_t,
    }
}

/// Event log of the first round (epoch 0): completion timestamps in causal
/// workflow order.
///
/// The log is the event-level view — each subchain waits for its own
/// workers before its commit check — while [`RoundTiming`] is the
/// aggregate `t = t_u + t_c` decomposition; the final timestamp therefore
/// need not equal `t` bit for bit.
pub fn emit_trace(config: &WorkflowConfig) -> Vec<TraceEvent> {
    let draws = draw_round(config, 0);
    let mut events = Vec::new();
    let mut push = |timestamp: f64, entity: &str, stage: &str| {
        events.push(TraceEvent {
            timestamp,
            entity: entity.to_string(),
            stage: stage.to_string(),
        });
    };

    let publish_end = draws.publish;
    push(publish_end, "main_chain", "publish");
    let verify_end = publish_end + draws.relay_verify;
    push(verify_end, "relay_chain", "relay_verify");
    let dispatch_end = verify_end + draws.dispatch;
    push(dispatch_end, "subchain_physical", "dispatch");
    push(dispatch_end, "subchain_virtual", "dispatch");

    let mut subchain_upload_end = [f64::NEG_INFINITY; 2];
    for (chain_idx, (prefix, workers)) in [
        ("physical_worker", &draws.physical),
        ("virtual_worker", &draws.virtual_pool),
    ]
    .into_iter()
    .enumerate()
    {
        for (i, &(train, upload)) in workers.iter().enumerate() {
            let entity = format!("{prefix}_{}", i + 1);
            let train_end = dispatch_end + train;
            push(train_end, &entity, "train");
            let upload_end = train_end + upload;
            push(upload_end, &entity, "upload");
            subchain_upload_end[chain_idx] = subchain_upload_end[chain_idx].max(upload_end);
        }
    }

    let check_p_end = subchain_upload_end[0] + draws.subchain_check;
    push(check_p_end, "subchain_physical", "subchain_check");
    let check_v_end = subchain_upload_end[1] + draws.subchain_check;
    push(check_v_end, "subchain_virtual", "subchain_check");

    let transfer_end = check_p_end.max(check_v_end) + draws.relay_transfer;
    push(transfer_end, "relay_chain", "relay_transfer");
    let aggregate_end = transfer_end + draws.aggregate;
    push(aggregate_end, "main_chain", "aggregate");
    push(aggregate_end + draws.distribute, "main_chain", "distribute");

    events
}
