//! Stable-throughput regions of a cooperative cognitive radio link in which
//! both the primary user (PU) and the secondary user (SU) run on harvested
//! energy.
//!
//! The crate has two independent routes to the same regions:
//!
//! * [`analytic`] evaluates the closed-form dominant-system service rates
//!   and tests region membership pointwise;
//! * [`sim`] runs the five interacting queues slot by slot and decides
//!   stability from the measured queue drift.
//!
//! [`sweep`] runs both over a grid of PU arrival rates and compares the
//! resulting boundaries; [`config`], [`csv`] and [`cli`] handle input and
//! output for the `ehcrn` binary.

pub mod analytic;
pub mod boundary;
pub mod cli;
pub mod config;
pub mod csv;
pub mod error;
pub mod model;
pub mod rng;
pub mod sim;
pub mod sweep;

pub use analytic::{
    crossover_lambda_p, es_busy_probability, idle_probability,
    noncoop_contains, pu_service_rate, region1_contains, region2_contains, relay_arrival_rate,
    union_contains, AnalyticPoint, Region,
};
pub use boundary::{extract_boundary, RegionBoundary, RegionLabel, Source};
pub use sweep::{builtin_experiments, run_experiment, ComparisonReport, ExperimentSpec, Mode};
pub use error::{Error, Result};
pub use model::{validate_params, PolicyKind, PolicySpec, QueueState, RatePoint, SystemParams};
pub use sim::{is_stable_point, measure_service_rates, run_replication, step_slot, SimConfig, SimOutcome};
