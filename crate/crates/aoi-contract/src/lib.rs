//! Freshness-aware contract design for blockchain-coordinated federated
//! learning.
//!
//! A service provider rents model updates from a population of workers whose
//! unit update costs are private information. Each worker periodically
//! collects data for `c` periods and idles for `a` periods, so one update
//! cycle lasts `θ = (c + a)·t` seconds and the contracted *update frequency*
//! is `f = 1/θ`. Fresher updates (larger `f`) raise the provider's
//! satisfaction — a logarithmic function of how far average Age of
//! Information and average service latency sit below the tolerable maxima —
//! but cost workers more, and the provider cannot observe any worker's cost
//! type. The crate computes screening menus of `(frequency, reward)` items
//! that are incentive-compatible and individually rational, along with two
//! baselines (complete information, social-welfare maximization), parameter
//! sweeps, and a small discrete-event simulator for the blockchain round
//! time `t = t_u + t_c` that anchors the timing model.
//!
//! Module map:
//!
//! * [`freshness`] — closed-form average latency / average AoI models in
//!   both `(c, a)`- and `θ`-parameterizations, plus an exact enumeration
//!   oracle over arrival periods.
//! * [`economics`] — worker types, contract items, utilities, the
//!   satisfaction function, IC/IR verification, and the reduced objective
//!   coefficients `b_n`.
//! * [`solver`] — grid-search contract optimization with
//!   bunching-and-ironing monotonicity repair and closed-form rewards;
//!   complete-information and social-welfare baselines.
//! * [`experiments`] — scenario configuration, population construction,
//!   sweeps, mechanism comparison, and CSV/JSON emitters.
//! * [`flsim`] — discrete-event stand-in for the cross-chain federated
//!   learning workflow producing the round time consumed by the timing
//!   model.

#![forbid(unsafe_code)]

pub mod economics;
pub mod error;
pub mod experiments;
pub mod flsim;
pub mod freshness;
pub mod solver;

pub use error::{Error, Result};
