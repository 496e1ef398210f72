//! Slotted Monte Carlo of the five interacting queues.
//!
//! A replication starts from empty queues and runs [`SlotModel::step`] for
//! `horizon_slots`. Stability of each data queue is judged from its drift:
//! the mean length over the last quarter of the horizon minus the mean
//! over the second quarter, divided by a quarter of the horizon.

mod step;

pub use step::{step_slot, Arrivals, PuOutcome, SlotEvents, SlotModel, SuQueue, SuTransmission};

use crate::analytic::AnalyticPoint;
use crate::error::{Error, Result};
use crate::model::{PolicySpec, QueueState, RatePoint, SystemParams};
use crate::rng::StreamKey;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub horizon_slots: u64,
    /// Slots discarded before any window statistic is collected.
    pub burn_in_slots: u64,
    pub replications: u32,
    pub seed: u64,
    /// Treat the PU queue as never empty.
    pub saturate_pu: bool,
    /// Drift above which a data queue is called unstable [packets/slot].
    pub drift_epsilon: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            horizon_slots: 200_000,
            burn_in_slots: 20_000,
            replications: 5,
            seed: 42,
            saturate_pu: false,
            drift_epsilon: 0.01,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon_slots < 4 {
            return Err(Error::Config("horizon_slots must be at least 4".into()));
        }
        if self.burn_in_slots >= self.horizon_slots {
            return Err(Error::Config("burn_in_slots must be below horizon_slots".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be positive".into()));
        }
        if self.drift_epsilon.is_nan() || self.drift_epsilon <= 0.0 {
            return Err(Error::Config("drift_epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// One value per data queue.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DataQueues<T> {
    pub p: T,
    pub s: T,
    pub ps: T,
}

impl<T> DataQueues<T> {
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> DataQueues<U> {
        DataQueues {
            p: f(&self.p),
            s: f(&self.s),
            ps: f(&self.ps),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &T)> {
        [("q_p", &self.p), ("q_s", &self.s), ("q_ps", &self.ps)].into_iter()
    }
}

/// Per-queue event counts; for the batteries these are energy units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueueCounts {
    pub p: u64,
    pub s: u64,
    pub ps: u64,
    pub ep: u64,
    pub es: u64,
}

/// Counters collected after burn-in. Occupancy counts look at the state at
/// the start of each slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WindowStats {
    pub slots: u64,
    pub p_arrivals: u64,
    pub s_arrivals: u64,
    /// Slots with `Q_p` non-empty (every slot when the PU is saturated).
    pub pu_backlogged: u64,
    /// Slots with `Q_p` and `Q_ep` both non-empty.
    pub pu_joint_busy: u64,
    pub pu_transmissions: u64,
    pub pu_departures: u64,
    pub relay_admissions: u64,
    pub es_nonempty: u64,
    pub su_transmissions: u64,
    pub s_backlogged: u64,
    pub s_departures: u64,
    pub ps_backlogged: u64,
    pub ps_departures: u64,
}

impl WindowStats {
    fn add(&mut self, other: &WindowStats) {
        self.slots += other.slots;
        self.p_arrivals += other.p_arrivals;
        self.s_arrivals += other.s_arrivals;
        self.pu_backlogged += other.pu_backlogged;
        self.pu_joint_busy += other.pu_joint_busy;
        self.pu_transmissions += other.pu_transmissions;
        self.pu_departures += other.pu_departures;
        self.relay_admissions += other.relay_admissions;
        self.es_nonempty += other.es_nonempty;
        self.su_transmissions += other.su_transmissions;
        self.s_backlogged += other.s_backlogged;
        self.s_departures += other.s_departures;
        self.ps_backlogged += other.ps_backlogged;
        self.ps_departures += other.ps_departures;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    /// Arrivals over the whole run, including relay admissions into `Q_ps`
    /// and harvested energy. PU arrivals are not admitted when saturated.
    pub admissions: QueueCounts,
    /// Departures over the whole run; energy units spent for the batteries.
    pub departures: QueueCounts,
    pub final_state: QueueState,
    /// Time-average queue lengths after burn-in, `[p, s, ps, ep, es]`.
    pub mean_queue: [f64; 5],
    pub drift: DataQueues<f64>,
    pub stable: DataQueues<bool>,
    /// Fraction of post-burn-in slots with `Q_p != 0` and `Q_ep != 0`.
    pub joint_busy_pu: f64,
    pub window: WindowStats,
    /// Cumulative energy spent never exceeded energy harvested, at any slot.
    pub energy_causal: bool,
}

impl SimOutcome {
    pub fn is_stable(&self) -> bool {
        self.stable.p && self.stable.s && self.stable.ps
    }
}

/// Running sums for the drift estimate.
#[derive(Default)]
struct QuarterSums {
    second: [f64; 3],
    last: [f64; 3],
}

pub fn run_replication(
    config: &SimConfig,
    params: &SystemParams,
    rates: RatePoint,
    policy: PolicySpec,
) -> SimOutcome {
    run_replication_keyed(config, StreamKey::default(), params, rates, policy)
}

/// Runs one replication on the stream `key` under `config.seed`.
pub fn run_replication_keyed(
    config: &SimConfig,
    key: StreamKey,
    params: &SystemParams,
    rates: RatePoint,
    policy: PolicySpec,
) -> SimOutcome {
    let model = SlotModel::new(params, rates, policy, config.saturate_pu);
    let mut rng = key.rng(config.seed);

    let horizon = config.horizon_slots;
    let quarter = horizon / 4;
    let (second_q, last_q) = (quarter..2 * quarter, horizon - quarter..horizon);

    let mut state = QueueState::default();
    let mut admissions = QueueCounts::default();
    let mut departures = QueueCounts::default();
    let mut window = WindowStats::default();
    let mut sums = QuarterSums::default();
    let mut queue_sum = [0.0f64; 5];
    let mut energy_causal = true;

    for t in 0..horizon {
        let measured = t >= config.burn_in_slots;
        if measured {
            window.slots += 1;
            let backlogged = config.saturate_pu || state.q_p > 0;
            window.pu_backlogged += u64::from(backlogged);
            window.pu_joint_busy += u64::from(backlogged && state.q_ep > 0);
            window.es_nonempty += u64::from(state.q_es > 0);
            window.s_backlogged += u64::from(state.q_s > 0);
            window.ps_backlogged += u64::from(state.q_ps > 0);
        }

        let (next, ev) = model.step(state, &mut rng);
        state = next;

        if let Some(outcome) = ev.pu {
            departures.ep += 1;
            let left = outcome != PuOutcome::Failed;
            departures.p += u64::from(left);
            admissions.ps += u64::from(outcome == PuOutcome::Relayed);
            if measured {
                window.pu_transmissions += 1;
                window.pu_departures += u64::from(left);
                window.relay_admissions += u64::from(outcome == PuOutcome::Relayed);
            }
        }
        if let Some(tx) = ev.su {
            departures.es += 1;
            let (s_left, ps_left) = match tx.queue {
                SuQueue::Own => (tx.delivered, false),
                SuQueue::Relay => (false, tx.delivered),
            };
            departures.s += u64::from(s_left);
            departures.ps += u64::from(ps_left);
            if measured {
                window.su_transmissions += 1;
                window.s_departures += u64::from(s_left);
                window.ps_departures += u64::from(ps_left);
            }
        }
        if measured {
            window.p_arrivals += u64::from(ev.arrivals.p);
            window.s_arrivals += u64::from(ev.arrivals.s);
        }
        admissions.p += u64::from(ev.arrivals.p);
        admissions.s += u64::from(ev.arrivals.s);
        admissions.ep += u64::from(ev.arrivals.ep);
        admissions.es += u64::from(ev.arrivals.es);
        energy_causal &= departures.ep <= admissions.ep && departures.es <= admissions.es;

        let lengths = [
            state.q_p as f64,
            state.q_s as f64,
            state.q_ps as f64,
            state.q_ep as f64,
            state.q_es as f64,
        ];
        if measured {
            for (acc, l) in queue_sum.iter_mut().zip(lengths) {
                *acc += l;
            }
        }
        if second_q.contains(&t) {
            for (acc, l) in sums.second.iter_mut().zip(lengths) {
                *acc += l;
            }
        } else if last_q.contains(&t) {
            for (acc, l) in sums.last.iter_mut().zip(lengths) {
                *acc += l;
            }
        }
    }

    let q = quarter as f64;
    let drift_of = |i: usize| (sums.last[i] / q - sums.second[i] / q) / q;
    let drift = DataQueues {
        // A saturated PU queue is not tracked.
        p: if config.saturate_pu { 0.0 } else { drift_of(0) },
        s: drift_of(1),
        ps: drift_of(2),
    };
    let eps = config.drift_epsilon;
    let n = window.slots.max(1) as f64;
    SimOutcome {
        admissions,
        departures,
        final_state: state,
        mean_queue: queue_sum.map(|s| s / n),
        stable: drift.map(|&d| d <= eps),
        drift,
        joint_busy_pu: window.pu_joint_busy as f64 / n,
        window,
        energy_causal,
    }
}

/// Replication votes for one data queue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueVerdict {
    pub stable: bool,
    pub unstable_votes: u32,
    pub replications: u32,
    pub drift_min: f64,
    pub drift_median: f64,
    pub drift_max: f64,
    /// Pooled service rate while backlogged minus arrival rate
    /// [packets/slot]; infinite for a queue that never held a packet.
    pub slack: f64,
}

impl QueueVerdict {
    pub fn unanimous(&self) -> bool {
        self.unstable_votes == 0 || self.unstable_votes == self.replications
    }

    fn from_drifts(mut drifts: Vec<f64>, slack: f64, eps: f64) -> Self {
        let replications = drifts.len() as u32;
        let unstable_votes = drifts.iter().filter(|&&d| d > eps).count() as u32;
        drifts.sort_by(f64::total_cmp);
        let n = drifts.len();
        let drift_median = if n % 2 == 1 {
            drifts[n / 2]
        } else {
            0.5 * (drifts[n / 2 - 1] + drifts[n / 2])
        };
        QueueVerdict {
            stable: 2 * unstable_votes <= replications,
            unstable_votes,
            replications,
            drift_min: drifts[0],
            drift_median,
            drift_max: drifts[n - 1],
            slack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub queues: DataQueues<QueueVerdict>,
    /// Every data queue stable by majority vote.
    pub stable: bool,
}

impl StabilityVerdict {
    pub fn unanimous(&self) -> bool {
        self.queues.iter().all(|(_, q)| q.unanimous())
    }

    /// The detector cannot resolve this point: a vote was split, or some
    /// queue's arrival and service rates are closer than `resolution`.
    pub fn marginal(&self, resolution: f64) -> bool {
        !self.unanimous() || self.queues.iter().any(|(_, q)| q.slack.abs() < resolution)
    }

    pub fn from_outcomes(outcomes: &[SimOutcome], eps: f64) -> Self {
        let collect = |f: fn(&SimOutcome) -> f64| outcomes.iter().map(f).collect::<Vec<_>>();
        let mut w = WindowStats::default();
        for o in outcomes {
            w.add(&o.window);
        }
        let slack = |arrivals: u64, departures: u64, backlogged: u64| {
            if backlogged == 0 {
                f64::INFINITY
            } else {
                departures as f64 / backlogged as f64 - arrivals as f64 / w.slots as f64
            }
        };
        let queues = DataQueues {
            p: QueueVerdict::from_drifts(
                collect(|o| o.drift.p),
                slack(w.p_arrivals, w.pu_departures, w.pu_backlogged),
                eps,
            ),
            s: QueueVerdict::from_drifts(
                collect(|o| o.drift.s),
                slack(w.s_arrivals, w.s_departures, w.s_backlogged),
                eps,
            ),
            ps: QueueVerdict::from_drifts(
                collect(|o| o.drift.ps),
                slack(w.relay_admissions, w.ps_departures, w.ps_backlogged),
                eps,
            ),
        };
        StabilityVerdict {
            stable: queues.p.stable && queues.s.stable && queues.ps.stable,
            queues,
        }
    }
}

/// Which experiment and grid point a run belongs to; replications are
/// numbered within it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PointKey {
    pub experiment: u64,
    pub point: u64,
}

impl PointKey {
    pub fn stream(&self, replication: u32) -> StreamKey {
        StreamKey::new(self.experiment, u64::from(replication), self.point)
    }
}

pub fn run_replications(
    config: &SimConfig,
    key: PointKey,
    params: &SystemParams,
    rates: RatePoint,
    policy: PolicySpec,
) -> Vec<SimOutcome> {
    (0..config.replications)
        .map(|r| run_replication_keyed(config, key.stream(r), params, rates, policy))
        .collect()
}

pub fn is_stable_point(
    config: &SimConfig,
    params: &SystemParams,
    rates: RatePoint,
    policy: PolicySpec,
) -> Result<StabilityVerdict> {
    is_stable_point_at(config, PointKey::default(), params, rates, policy)
}

/// Majority vote over `config.replications` independent runs.
pub fn is_stable_point_at(
    config: &SimConfig,
    key: PointKey,
    params: &SystemParams,
    rates: RatePoint,
    policy: PolicySpec,
) -> Result<StabilityVerdict> {
    config.validate()?;
    if config.replications < 3 {
        return Err(Error::Config(
            "stability verdicts need at least 3 replications".into(),
        ));
    }
    let outcomes = run_replications(config, key, params, rates, policy);
    Ok(StabilityVerdict::from_outcomes(&outcomes, config.drift_epsilon))
}

/// Empirical counterparts of the analytic operating point, pooled over
/// replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredRates {
    /// `mu_p`: PU departures per backlogged slot; `mu_s`, `mu_ps` likewise.
    /// `idle_prob`: slots without a PU transmission. `lambda_ps`: relay
    /// admissions per slot. `es_busy_prob`: slots starting with `Q_es != 0`.
    pub point: AnalyticPoint,
    pub joint_busy_pu: f64,
    /// `|joint_busy_pu - lambda_ep * lambda_p / mu_p|` with the measured
    /// `mu_p`; how far the product form for the PU activity is off.
    pub independence_gap: f64,
    /// Some data queue was unstable, so the measured rates are censored.
    pub censored: bool,
}

pub fn measure_service_rates(
    config: &SimConfig,
    params: &SystemParams,
    rates: RatePoint,
    policy: PolicySpec,
) -> Result<MeasuredRates> {
    config.validate()?;
    let outcomes = run_replications(config, PointKey::default(), params, rates, policy);
    let verdict = StabilityVerdict::from_outcomes(&outcomes, config.drift_epsilon);
    let mut w = WindowStats::default();
    for o in &outcomes {
        w.add(&o.window);
    }
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let mu_p = ratio(w.pu_departures, w.pu_backlogged);
    let joint_busy_pu = ratio(w.pu_joint_busy, w.slots);
    let point = AnalyticPoint {
        mu_p,
        lambda_ps: ratio(w.relay_admissions, w.slots),
        idle_prob: 1.0 - ratio(w.pu_transmissions, w.slots),
        es_busy_prob: ratio(w.es_nonempty, w.slots),
        mu_s: ratio(w.s_departures, w.s_backlogged),
        mu_ps: ratio(w.ps_departures, w.ps_backlogged),
    };
    let product = if mu_p > 0.0 {
        params.lambda_ep * rates.lambda_p / mu_p
    } else {
        0.0
    };
    Ok(MeasuredRates {
        point,
        joint_busy_pu,
        independence_gap: (joint_busy_pu - product).abs(),
        censored: !verdict.stable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        let bad = SimConfig {
            burn_in_slots: 200_000,
            ..SimConfig::default()
        };
        assert!(bad.validate().is_err());
        let few = SimConfig {
            replications: 2,
            horizon_slots: 1000,
            burn_in_slots: 10,
            ..SimConfig::default()
        };
        let p = SystemParams::baseline(0.6, 0.6).unwrap();
        assert!(is_stable_point(&few, &p, RatePoint::at(0.0, 0.0), PolicySpec::non_cooperative()).is_err());
    }

    #[test]
    fn zero_rates_are_stable() {
        let p = SystemParams::baseline(0.6, 0.6).unwrap();
        let cfg = SimConfig {
            horizon_slots: 20_000,
            burn_in_slots: 2_000,
            ..SimConfig::default()
        };
        let out = run_replication(&cfg, &p, RatePoint::at(0.0, 0.0), PolicySpec::cooperative(0.5).unwrap());
        assert_eq!(out.drift, DataQueues { p: 0.0, s: 0.0, ps: 0.0 });
        assert!(out.is_stable());
        let v = is_stable_point(&cfg, &p, RatePoint::at(0.0, 0.0), PolicySpec::cooperative(0.5).unwrap()).unwrap();
        assert!(v.stable && v.unanimous());
    }

    #[test]
    fn verdict_majority() {
        let v = QueueVerdict::from_drifts(vec![0.02, 0.0, 0.03, 0.001, 0.5], 0.1, 0.01);
        assert_eq!(v.unstable_votes, 3);
        assert!(!v.stable);
        assert!(!v.unanimous());
        assert_eq!(v.drift_median, 0.02);
        assert_eq!((v.drift_min, v.drift_max), (0.0, 0.5));
    }
}
