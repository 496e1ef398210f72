//! Shared domain types: channel and harvesting parameters, arrival-rate
//! points, transmission policies and the five-queue state.

use std::fmt;

use crate::error::{Error, Result};

/// Channel success probabilities and energy-harvesting rates.
///
/// Every channel field is a per-slot *success* probability; the matching
/// outage probability is always derived as `1 - success`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// PU source to PU destination.
    pub p_pd_success: f64,
    /// PU source to SU (the relay link).
    pub p_ss_success: f64,
    /// SU source to PU destination.
    pub s_pd_success: f64,
    /// SU source to SU destination.
    pub s_sd_success: f64,
    /// Energy arrivals at the PU battery [energy packets/slot].
    pub lambda_ep: f64,
    /// Energy arrivals at the SU battery [energy packets/slot].
    pub lambda_es: f64,
}

impl SystemParams {
    /// Channel probabilities used throughout the reference scenarios.
    pub const BASELINE_CHANNELS: [f64; 4] = [0.3, 0.4, 0.7, 0.7];

    pub fn new(
        p_pd_success: f64,
        p_ss_success: f64,
        s_pd_success: f64,
        s_sd_success: f64,
        lambda_ep: f64,
        lambda_es: f64,
    ) -> Result<Self> {
        validate_params(SystemParams {
            p_pd_success,
            p_ss_success,
            s_pd_success,
            s_sd_success,
            lambda_ep,
            lambda_es,
        })
    }

    /// Baseline channels with the given harvesting rates.
    pub fn baseline(lambda_ep: f64, lambda_es: f64) -> Result<Self> {
        let [a, b, c, d] = Self::BASELINE_CHANNELS;
        Self::new(a, b, c, d, lambda_ep, lambda_es)
    }

    pub fn with_harvest(self, lambda_ep: f64, lambda_es: f64) -> Result<Self> {
        validate_params(SystemParams {
            lambda_ep,
            lambda_es,
            ..self
        })
    }

    pub fn p_pd_outage(&self) -> f64 {
        1.0 - self.p_pd_success
    }

    pub fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("p_pd_success", self.p_pd_success),
            ("p_ss_success", self.p_ss_success),
            ("s_pd_success", self.s_pd_success),
            ("s_sd_success", self.s_sd_success),
            ("lambda_ep", self.lambda_ep),
            ("lambda_es", self.lambda_es),
        ]
    }
}

pub(crate) fn check_unit(field: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange { field, value })
    }
}

/// Returns the parameters unchanged when every field lies in `[0, 1]`.
pub fn validate_params(params: SystemParams) -> Result<SystemParams> {
    for (field, value) in params.fields() {
        check_unit(field, value)?;
    }
    Ok(params)
}

/// A candidate pair of data arrival rates [packets/slot].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub lambda_p: f64,
    pub lambda_s: f64,
}

impl RatePoint {
    pub fn new(lambda_p: f64, lambda_s: f64) -> Result<Self> {
        Ok(RatePoint {
            lambda_p: check_unit("lambda_p", lambda_p)?,
            lambda_s: check_unit("lambda_s", lambda_s)?,
        })
    }

    /// Unchecked constructor for internal grid arithmetic.
    pub(crate) const fn at(lambda_p: f64, lambda_s: f64) -> Self {
        RatePoint { lambda_p, lambda_s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Randomized work-conserving cooperation: in an idle slot the SU serves
    /// its own queue with probability `a` and the relay queue otherwise.
    CooperativeRandomized,
    /// Like `CooperativeRandomized`, but an empty own queue sends dummy packets.
    DominantI,
    /// Like `CooperativeRandomized`, but an empty relay queue sends dummy packets.
    DominantII,
    /// No relaying; the SU serves only its own queue.
    NonCooperative,
}

impl PolicyKind {
    pub fn is_cooperative(self) -> bool {
        !matches!(self, PolicyKind::NonCooperative)
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::CooperativeRandomized => "cooperative",
            PolicyKind::DominantI => "dominant_i",
            PolicyKind::DominantII => "dominant_ii",
            PolicyKind::NonCooperative => "noncooperative",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cooperative" | "union" => Some(PolicyKind::CooperativeRandomized),
            "dominant_i" | "r1" => Some(PolicyKind::DominantI),
            "dominant_ii" | "r2" => Some(PolicyKind::DominantII),
            "noncooperative" | "noncoop" => Some(PolicyKind::NonCooperative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Probability that the SU serves its own queue in an idle slot.
    pub access_prob_a: f64,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind, access_prob_a: f64) -> Result<Self> {
        Ok(PolicySpec {
            kind,
            access_prob_a: check_unit("access_prob_a", access_prob_a)?,
        })
    }

    pub fn cooperative(a: f64) -> Result<Self> {
        Self::new(PolicyKind::CooperativeRandomized, a)
    }

    pub fn dominant_i(a: f64) -> Result<Self> {
        Self::new(PolicyKind::DominantI, a)
    }

    pub fn dominant_ii(a: f64) -> Result<Self> {
        Self::new(PolicyKind::DominantII, a)
    }

    pub fn non_cooperative() -> Self {
        PolicySpec {
            kind: PolicyKind::NonCooperative,
            access_prob_a: 1.0,
        }
    }

    /// `1 - a`: probability of choosing the relay queue.
    pub fn a_bar(&self) -> f64 {
        1.0 - self.access_prob_a
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PolicyKind::NonCooperative => f.write_str(self.kind.name()),
            kind => write!(f, "{}(a={})", kind.name(), self.access_prob_a),
        }
    }
}

/// Packet and energy counts of the five queues. Buffers and batteries are
/// unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct QueueState {
    /// PU data queue.
    pub q_p: u64,
    /// SU own-data queue.
    pub q_s: u64,
    /// SU relay queue holding PU packets.
    pub q_ps: u64,
    /// PU battery.
    pub q_ep: u64,
    /// SU battery.
    pub q_es: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_validates() {
        let p = SystemParams::new(0.3, 0.4, 0.7, 0.7, 0.6, 0.6).unwrap();
        assert_eq!(validate_params(p).unwrap(), p);
        assert!((p.p_pd_outage() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn all_zero_is_legal() {
        assert!(SystemParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn out_of_range_names_field() {
        let err = SystemParams::baseline(1.2, 0.6).unwrap_err();
        match err {
            Error::OutOfRange { field, value } => {
                assert_eq!(field, "lambda_ep");
                assert_eq!(value, 1.2);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err_to_string(SystemParams::baseline(0.5, f64::NAN)).contains("lambda_es"));
    }

    fn err_to_string<T: fmt::Debug>(r: Result<T>) -> String {
        r.unwrap_err().to_string()
    }

    #[test]
    fn rate_point_range() {
        assert!(RatePoint::new(0.0, 1.0).is_ok());
        assert!(RatePoint::new(-0.1, 0.0).is_err());
        assert!(PolicySpec::cooperative(1.5).is_err());
        assert_eq!(PolicySpec::dominant_i(0.25).unwrap().a_bar(), 0.75);
    }
}
