//! Closed-form service rates and stable-throughput regions.
//!
//! All region predicates are evaluated pointwise at a concrete
//! `(lambda_p, lambda_s)`. The SU battery occupancy `lambda_es / I` is
//! clamped to 1 wherever it appears, so the predicates stay correct once the
//! PU is busy enough that the SU battery never drains.

use crate::error::{Error, Result};
use crate::model::{RatePoint, SystemParams};

/// Default access-probability grid for the union region: 0, 0.05, ..., 1.
pub fn default_a_grid() -> Vec<f64> {
    (0..=20).map(|i| f64::from(i) / 20.0).collect()
}

/// PU data-queue service rate with a saturated PU queue: every slot with
/// energy is a transmission attempt, which succeeds directly or through
/// the SU.
pub fn pu_service_rate(params: &SystemParams) -> f64 {
    (params.p_pd_success + params.p_pd_outage() * params.p_ss_success) * params.lambda_ep
}

/// Non-cooperative PU service rate: only direct deliveries count.
pub fn noncoop_pu_service_rate(params: &SystemParams) -> f64 {
    params.p_pd_success * params.lambda_ep
}

/// `lambda_p / mu_p`, the PU data-queue utilisation.
fn utilisation(lambda_p: f64, mu_p: f64) -> Result<f64> {
    if lambda_p < mu_p {
        Ok(lambda_p / mu_p)
    } else {
        Err(Error::UnstablePu { lambda_p, mu_p })
    }
}

/// Rate at which PU packets enter the SU relay queue.
pub fn relay_arrival_rate(params: &SystemParams, lambda_p: f64) -> Result<f64> {
    let rho = utilisation(lambda_p, pu_service_rate(params))?;
    Ok(params.p_pd_outage() * params.p_ss_success * params.lambda_ep * rho)
}

/// Probability that the PU leaves a slot idle.
pub fn idle_probability(params: &SystemParams, lambda_p: f64) -> Result<f64> {
    let rho = utilisation(lambda_p, pu_service_rate(params))?;
    Ok(1.0 - params.lambda_ep * rho)
}

/// Probability that the SU battery is non-empty, `min(1, lambda_es / I)`.
pub fn es_busy_probability(params: &SystemParams, lambda_p: f64) -> Result<f64> {
    let idle = idle_probability(params, lambda_p)?;
    Ok(es_busy(params.lambda_es, idle, Clamp::On))
}

/// Whether `lambda_es / I` saturates at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clamp {
    On,
    /// Raw ratio; only meaningful while `lambda_es <= I`.
    Off,
}

pub(crate) fn es_busy(lambda_es: f64, idle: f64, clamp: Clamp) -> f64 {
    if lambda_es == 0.0 {
        return 0.0;
    }
    if idle <= 0.0 {
        return match clamp {
            Clamp::On => 1.0,
            Clamp::Off => f64::INFINITY,
        };
    }
    let ratio = lambda_es / idle;
    match clamp {
        Clamp::On => ratio.min(1.0),
        Clamp::Off => ratio,
    }
}

/// Analytic operating point of one dominant (or the non-cooperative)
/// system at a rate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPoint {
    pub mu_p: f64,
    pub lambda_ps: f64,
    pub idle_prob: f64,
    pub es_busy_prob: f64,
    pub mu_s: f64,
    pub mu_ps: f64,
}

impl AnalyticPoint {
    /// SU transmission opportunities per slot, `Pr(Q_es != 0) * I`.
    pub fn su_opportunity(&self) -> f64 {
        self.es_busy_prob * self.idle_prob
    }
}

/// The systems with closed-form service rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoupledSystem {
    /// Dummy packets from the SU own queue.
    DominantI { a: f64 },
    /// Dummy packets from the relay queue.
    DominantII { a: f64 },
    NonCooperative,
}

/// Fraction `1 - load / capacity` of opportunities left over, with an
/// unloaded queue leaving everything.
fn leftover(load: f64, capacity: f64) -> f64 {
    if load == 0.0 {
        1.0
    } else {
        1.0 - load / capacity
    }
}

pub fn analytic_point(
    params: &SystemParams,
    system: DecoupledSystem,
    pt: RatePoint,
) -> Result<AnalyticPoint> {
    analytic_point_with(params, system, pt, Clamp::On)
}

pub fn analytic_point_with(
    params: &SystemParams,
    system: DecoupledSystem,
    pt: RatePoint,
    clamp: Clamp,
) -> Result<AnalyticPoint> {
    let p = params;
    if let DecoupledSystem::NonCooperative = system {
        let mu_p = noncoop_pu_service_rate(p);
        let idle = 1.0 - p.lambda_ep * utilisation(pt.lambda_p, mu_p)?;
        let es = es_busy(p.lambda_es, idle, clamp);
        return Ok(AnalyticPoint {
            mu_p,
            lambda_ps: 0.0,
            idle_prob: idle,
            es_busy_prob: es,
            mu_s: p.s_sd_success * es * idle,
            mu_ps: 0.0,
        });
    }

    let mu_p = pu_service_rate(p);
    let rho = utilisation(pt.lambda_p, mu_p)?;
    let idle = 1.0 - p.lambda_ep * rho;
    let lambda_ps = p.p_pd_outage() * p.p_ss_success * p.lambda_ep * rho;
    let es = es_busy(p.lambda_es, idle, clamp);
    let opportunity = es * idle;

    let (mu_s, mu_ps) = match system {
        DecoupledSystem::DominantI { a } => {
            let mu_ps = p.s_pd_success * opportunity * (1.0 - a);
            // Serving the relay queue with probability 1 - a cancels against
            // its emptiness probability, so `a` drops out of mu_s.
            let mu_s = p.s_sd_success
                * opportunity
                * leftover(lambda_ps, p.s_pd_success * opportunity);
            (mu_s, mu_ps)
        }
        DecoupledSystem::DominantII { a } => {
            let mu_s = p.s_sd_success * opportunity * a;
            let mu_ps = p.s_pd_success
                * opportunity
                * leftover(pt.lambda_s, p.s_sd_success * opportunity);
            (mu_s, mu_ps)
        }
        DecoupledSystem::NonCooperative => unreachable!(),
    };

    Ok(AnalyticPoint {
        mu_p,
        lambda_ps,
        idle_prob: idle,
        es_busy_prob: es,
        mu_s: mu_s.max(0.0),
        mu_ps: mu_ps.max(0.0),
    })
}

/// Loynes condition for the relay queue; a queue that never receives
/// packets is stable even with no service.
fn relay_stable(lambda_ps: f64, mu_ps: f64) -> bool {
    lambda_ps == 0.0 || lambda_ps < mu_ps
}

fn decoupled_contains(params: &SystemParams, system: DecoupledSystem, pt: RatePoint) -> bool {
    match analytic_point(params, system, pt) {
        // PU stability (lambda_p < mu_p) is already enforced by `analytic_point`.
        Ok(ap) => relay_stable(ap.lambda_ps, ap.mu_ps) && pt.lambda_s < ap.mu_s,
        Err(_) => false,
    }
}

/// Membership in the stable region of dominant system I.
pub fn region1_contains(params: &SystemParams, a: f64, pt: RatePoint) -> bool {
    decoupled_contains(params, DecoupledSystem::DominantI { a }, pt)
}

/// Membership in the stable region of dominant system II.
pub fn region2_contains(params: &SystemParams, a: f64, pt: RatePoint) -> bool {
    decoupled_contains(params, DecoupledSystem::DominantII { a }, pt)
}

/// Membership in the union of both dominant regions over `a_grid`.
pub fn union_contains(params: &SystemParams, pt: RatePoint, a_grid: &[f64]) -> bool {
    a_grid
        .iter()
        .any(|&a| region1_contains(params, a, pt) || region2_contains(params, a, pt))
}

/// Membership in the stable region without cooperation.
pub fn noncoop_contains(params: &SystemParams, pt: RatePoint) -> bool {
    decoupled_contains(params, DecoupledSystem::NonCooperative, pt)
}

/// A region whose membership can be tested pointwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    R1 { a: f64 },
    R2 { a: f64 },
    Union { a_grid: Vec<f64> },
    NonCooperative,
}

impl Region {
    pub fn contains(&self, params: &SystemParams, pt: RatePoint) -> bool {
        match self {
            Region::R1 { a } => region1_contains(params, *a, pt),
            Region::R2 { a } => region2_contains(params, *a, pt),
            Region::Union { a_grid } => union_contains(params, pt, a_grid),
            Region::NonCooperative => noncoop_contains(params, pt),
        }
    }
}

/// The cooperative/non-cooperative crossover constant `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    pub d: f64,
}

impl Crossover {
    /// PU arrival rate at which both systems give the SU the same maximum
    /// throughput, for SU harvesting rate `lambda_es`.
    pub fn lambda_p(&self, lambda_es: f64) -> f64 {
        (1.0 - lambda_es) / self.d
    }
}

pub fn crossover_lambda_p(params: &SystemParams) -> Result<Crossover> {
    if params.p_pd_success <= 0.0 {
        return Err(Error::UndefinedCrossover);
    }
    let relay = params.p_pd_outage() * params.p_ss_success;
    let d = 1.0 / params.p_pd_success
        - relay / (params.s_pd_success * (params.p_pd_success + relay));
    if !d.is_finite() {
        return Err(Error::UndefinedCrossover);
    }
    Ok(Crossover { d })
}

/// The PU rate above which the SU battery never drains (`I <= lambda_es`),
/// if that happens before the PU queue saturates.
pub fn clamp_onset(params: &SystemParams) -> Option<f64> {
    let mu_p = pu_service_rate(params);
    if params.lambda_ep <= 0.0 {
        return None;
    }
    let onset = mu_p * (1.0 - params.lambda_es) / params.lambda_ep;
    (onset < mu_p).then_some(onset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn base(lep: f64, les: f64) -> SystemParams {
        SystemParams::baseline(lep, les).unwrap()
    }

    fn pt(lp: f64, ls: f64) -> RatePoint {
        RatePoint::new(lp, ls).unwrap()
    }

    #[test]
    fn pu_service_rate_values() {
        assert_abs_diff_eq!(pu_service_rate(&base(0.6, 0.6)), 0.348, epsilon = 1e-12);
        assert_abs_diff_eq!(pu_service_rate(&base(1.0, 0.6)), 0.58, epsilon = 1e-12);
        assert_eq!(pu_service_rate(&base(0.0, 0.6)), 0.0);
    }

    #[test]
    fn relay_arrival_values() {
        let p = base(0.6, 0.6);
        assert_eq!(relay_arrival_rate(&p, 0.0).unwrap(), 0.0);
        let want = 0.7 * 0.4 * 0.6 * 0.2 / 0.348;
        assert_abs_diff_eq!(relay_arrival_rate(&p, 0.2).unwrap(), want, epsilon = 1e-12);
        assert_abs_diff_eq!(want, 0.0966, epsilon = 5e-5);
        let deaf = SystemParams::new(0.3, 0.0, 0.7, 0.7, 0.6, 0.6).unwrap();
        assert_eq!(relay_arrival_rate(&deaf, 0.15).unwrap(), 0.0);
        assert!(matches!(
            relay_arrival_rate(&p, 0.35),
            Err(Error::UnstablePu { .. })
        ));
    }

    #[test]
    fn idle_probability_values() {
        let p = base(0.6, 0.6);
        assert_eq!(idle_probability(&p, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(idle_probability(&base(1.0, 0.5), 0.29).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(idle_probability(&p, 0.232).unwrap(), 0.6, epsilon = 1e-12);
        assert!(idle_probability(&p, 0.348).is_err());
    }

    #[test]
    fn es_busy_values() {
        assert_eq!(es_busy_probability(&base(0.6, 0.0), 0.1).unwrap(), 0.0);
        assert_abs_diff_eq!(es_busy_probability(&base(0.6, 0.6), 0.0).unwrap(), 0.6, epsilon = 1e-15);
        for lp in [0.232, 0.25, 0.3, 0.347] {
            assert_abs_diff_eq!(es_busy_probability(&base(0.6, 0.6), lp).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(es_busy(0.3, 0.0, Clamp::On), 1.0);
    }

    #[test]
    fn region1_examples() {
        let p = base(0.6, 0.6);
        assert!(region1_contains(&p, 0.5, pt(0.0, 0.0)));
        assert!(!region1_contains(&p, 0.5, pt(0.35, 0.0)));
        // Bound at lambda_p = 0.1: opportunity = 0.6 (unclamped), relay load 0.0805/0.7.
        let lps = 0.28 * 0.6 * 0.1 / 0.348;
        let bound = 0.7 * (0.6 - lps / 0.7);
        assert!(region1_contains(&p, 0.5, pt(0.1, bound - 1e-9)));
        assert!(!region1_contains(&p, 0.5, pt(0.1, bound + 1e-9)));
    }

    #[test]
    fn region2_examples() {
        let p = base(0.6, 0.6);
        assert!(region2_contains(&p, 1.0, pt(0.0, 0.0)));
        for lp in [0.0, 0.1, 0.2] {
            assert!(!region2_contains(&p, 0.0, pt(lp, 0.01)));
        }
    }

    #[test]
    fn union_examples() {
        let p = base(0.6, 0.6);
        let grid = default_a_grid();
        assert!(union_contains(&p, pt(0.0, 0.41), &grid));
        assert!(!union_contains(&p, pt(0.0, 0.43), &grid));
        let x = pt(0.1, 0.2);
        assert_eq!(union_contains(&p, x, &[1.0]), region1_contains(&p, 1.0, x) || region2_contains(&p, 1.0, x));
    }

    #[test]
    fn noncoop_examples() {
        let p = base(0.5, 0.5);
        assert_abs_diff_eq!(noncoop_pu_service_rate(&p), 0.15, epsilon = 1e-15);
        assert!(noncoop_contains(&p, pt(0.1499, 0.0)));
        assert!(!noncoop_contains(&p, pt(0.15, 0.0)));
        assert!(noncoop_contains(&p, pt(0.0, 0.3499)));
        assert!(!noncoop_contains(&p, pt(0.0, 0.3501)));
        assert!(noncoop_contains(&p, pt(0.0, 0.0)));
        assert!(!noncoop_contains(&base(0.5, 0.0), pt(0.0, 0.0)));
    }

    #[test]
    fn crossover_values() {
        let c = crossover_lambda_p(&base(0.5, 0.8)).unwrap();
        assert_abs_diff_eq!(c.d, 2.6437, epsilon = 1e-4);
        assert_abs_diff_eq!(c.lambda_p(0.8), 0.0757, epsilon = 1e-4);
        assert_abs_diff_eq!(c.lambda_p(0.6), 0.1513, epsilon = 1e-4);
        assert_eq!(c.lambda_p(1.0), 0.0);
        let dead = SystemParams::new(0.0, 0.4, 0.7, 0.7, 0.5, 0.5).unwrap();
        assert!(matches!(crossover_lambda_p(&dead), Err(Error::UndefinedCrossover)));
    }

    #[test]
    fn clamp_onset_values() {
        assert_abs_diff_eq!(clamp_onset(&base(0.6, 0.6)).unwrap(), 0.232, epsilon = 1e-12);
        assert_abs_diff_eq!(clamp_onset(&base(1.0, 0.5)).unwrap(), 0.29, epsilon = 1e-12);
        assert_eq!(clamp_onset(&base(0.3, 0.3)), None);
    }

    #[test]
    fn region2_pu_limit_is_independent_of_a() {
        let p = base(0.6, 0.6);
        let max_lp = |a: f64| {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let ap = analytic_point(&p, DecoupledSystem::DominantII { a }, pt(mid, 0.0));
                if matches!(ap, Ok(x) if relay_stable(x.lambda_ps, x.mu_ps)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let m3 = max_lp(0.3);
        assert_eq!(m3, max_lp(0.5));
        assert_eq!(m3, max_lp(0.9));
    }
}
