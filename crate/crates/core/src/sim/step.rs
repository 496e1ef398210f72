use rand::RngCore;

use crate::model::{PolicyKind, PolicySpec, QueueState, RatePoint, SystemParams};
use crate::rng::Bernoulli;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PuOutcome {
    /// Decoded by the PU destination.
    Delivered,
    /// Missed by the destination, decoded by the SU and moved to its relay queue.
    Relayed,
    /// Lost on both links; the packet stays at the head of the PU queue.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuQueue {
    Own,
    Relay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuTransmission {
    pub queue: SuQueue,
    /// Dominant systems transmit a dummy packet from an empty queue.
    pub dummy: bool,
    /// The packet left the queue (never true for a dummy).
    pub delivered: bool,
}

/// Arrivals admitted at the end of the slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Arrivals {
    pub p: bool,
    pub s: bool,
    pub ep: bool,
    pub es: bool,
}

/// What happened in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotEvents {
    /// `Some` when the PU transmitted (and spent one energy unit).
    pub pu: Option<PuOutcome>,
    /// `Some` when the SU transmitted (and spent one energy unit).
    pub su: Option<SuTransmission>,
    pub arrivals: Arrivals,
}

/// Per-slot dynamics with the Bernoulli thresholds precomputed.
///
/// Each slot consumes exactly nine draws in a fixed order, whatever the
/// queue state: PU direct link, PU relay link, SU queue choice, SU own
/// link, SU relay link, then arrivals at `Q_p`, `Q_s`, `Q_ep`, `Q_es`.
/// Two models with the same parameters fed the same stream therefore see
/// identical channel and arrival realisations slot by slot, whatever
/// policy they run.
#[derive(Debug, Clone)]
pub struct SlotModel {
    kind: PolicyKind,
    saturate_pu: bool,
    pu_direct: Bernoulli,
    pu_relay: Bernoulli,
    su_pick_own: Bernoulli,
    su_own_link: Bernoulli,
    su_relay_link: Bernoulli,
    arrive_p: Bernoulli,
    arrive_s: Bernoulli,
    harvest_p: Bernoulli,
    harvest_s: Bernoulli,
}

impl SlotModel {
    pub fn new(
        params: &SystemParams,
        rates: RatePoint,
        policy: PolicySpec,
        saturate_pu: bool,
    ) -> Self {
        SlotModel {
            kind: policy.kind,
            saturate_pu,
            pu_direct: Bernoulli::new(params.p_pd_success),
            pu_relay: Bernoulli::new(params.p_ss_success),
            su_pick_own: Bernoulli::new(policy.access_prob_a),
            su_own_link: Bernoulli::new(params.s_sd_success),
            su_relay_link: Bernoulli::new(params.s_pd_success),
            arrive_p: Bernoulli::new(rates.lambda_p),
            arrive_s: Bernoulli::new(rates.lambda_s),
            harvest_p: Bernoulli::new(params.lambda_ep),
            harvest_s: Bernoulli::new(params.lambda_es),
        }
    }

    pub fn saturate_pu(&self) -> bool {
        self.saturate_pu
    }

    /// Whether the PU transmits in a slot that starts in `state`.
    #[inline]
    pub fn pu_ready(&self, state: &QueueState) -> bool {
        (self.saturate_pu || state.q_p > 0) && state.q_ep > 0
    }

    /// Queue served by the SU given its queue-choice draw, or `None` if it
    /// stays silent. The flag marks a dummy transmission.
    #[inline]
    fn su_choice(&self, state: &QueueState, pick_own: bool) -> Option<(SuQueue, bool)> {
        use SuQueue::{Own, Relay};
        let own = state.q_s > 0;
        let relay = state.q_ps > 0;
        match self.kind {
            PolicyKind::NonCooperative => own.then_some((Own, false)),
            PolicyKind::CooperativeRandomized => match (pick_own, own, relay) {
                (true, true, _) | (false, true, false) => Some((Own, false)),
                (false, _, true) | (true, false, true) => Some((Relay, false)),
                (_, false, false) => None,
            },
            // The own queue never looks empty.
            PolicyKind::DominantI => {
                if !pick_own && relay {
                    Some((Relay, false))
                } else {
                    Some((Own, !own))
                }
            }
            // The relay queue never looks empty.
            PolicyKind::DominantII => {
                if pick_own && own {
                    Some((Own, false))
                } else {
                    Some((Relay, !relay))
                }
            }
        }
    }

    #[inline]
    pub fn step<R: RngCore + ?Sized>(
        &self,
        mut state: QueueState,
        rng: &mut R,
    ) -> (QueueState, SlotEvents) {
        let direct_ok = self.pu_direct.sample(rng);
        let relay_ok = self.pu_relay.sample(rng);
        let pick_own = self.su_pick_own.sample(rng);
        let own_link_ok = self.su_own_link.sample(rng);
        let relay_link_ok = self.su_relay_link.sample(rng);
        let arrivals = Arrivals {
            p: self.arrive_p.sample(rng) && !self.saturate_pu,
            s: self.arrive_s.sample(rng),
            ep: self.harvest_p.sample(rng),
            es: self.harvest_s.sample(rng),
        };

        let mut pu = None;
        let mut su = None;
        if self.pu_ready(&state) {
            state.q_ep -= 1;
            let outcome = if direct_ok {
                PuOutcome::Delivered
            } else if relay_ok && self.kind.is_cooperative() {
                state.q_ps += 1;
                PuOutcome::Relayed
            } else {
                PuOutcome::Failed
            };
            if outcome != PuOutcome::Failed && !self.saturate_pu {
                state.q_p -= 1;
            }
            pu = Some(outcome);
        } else if state.q_es > 0 {
            // Perfect sensing: the SU only uses slots the PU leaves idle.
            if let Some((queue, dummy)) = self.su_choice(&state, pick_own) {
                state.q_es -= 1;
                let link_ok = match queue {
                    SuQueue::Own => own_link_ok,
                    SuQueue::Relay => relay_link_ok,
                };
                let delivered = link_ok && !dummy;
                if delivered {
                    match queue {
                        SuQueue::Own => state.q_s -= 1,
                        SuQueue::Relay => state.q_ps -= 1,
                    }
                }
                su = Some(SuTransmission {
                    queue,
                    dummy,
                    delivered,
                });
            }
        }

        state.q_p += u64::from(arrivals.p);
        state.q_s += u64::from(arrivals.s);
        state.q_ep += u64::from(arrivals.ep);
        state.q_es += u64::from(arrivals.es);
        (state, SlotEvents { pu, su, arrivals })
    }
}

/// Runs one slot. Arrivals land at the end of the slot and cannot be
/// served before the next one.
pub fn step_slot<R: RngCore + ?Sized>(
    state: QueueState,
    params: &SystemParams,
    rates: RatePoint,
    policy: PolicySpec,
    saturate_pu: bool,
    rng: &mut R,
) -> (QueueState, SlotEvents) {
    SlotModel::new(params, rates, policy, saturate_pu).step(state, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    fn state(q_p: u64, q_s: u64, q_ps: u64, q_ep: u64, q_es: u64) -> QueueState {
        QueueState { q_p, q_s, q_ps, q_ep, q_es }
    }

    fn certain() -> SystemParams {
        SystemParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap()
    }

    fn run(params: SystemParams, policy: PolicySpec, s: QueueState) -> (QueueState, SlotEvents) {
        let mut rng = StreamKey::default().rng(5);
        step_slot(s, &params, RatePoint::at(0.0, 0.0), policy, false, &mut rng)
    }

    #[test]
    fn pu_has_priority_over_su() {
        let (next, ev) = run(certain(), PolicySpec::cooperative(0.5).unwrap(), state(1, 1, 0, 1, 1));
        assert_eq!(ev.pu, Some(PuOutcome::Delivered));
        assert_eq!(ev.su, None);
        assert_eq!(next, state(0, 1, 0, 0, 1));
    }

    #[test]
    fn pu_needs_energy() {
        let (next, ev) = run(certain(), PolicySpec::cooperative(0.5).unwrap(), state(3, 1, 0, 0, 1));
        assert_eq!(ev.pu, None);
        assert!(ev.su.is_some_and(|t| t.delivered && t.queue == SuQueue::Own));
        assert_eq!(next, state(3, 0, 0, 0, 0));
    }

    #[test]
    fn outage_hands_packet_to_relay() {
        let p = SystemParams::new(0.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let (next, ev) = run(p, PolicySpec::cooperative(0.5).unwrap(), state(2, 0, 0, 1, 0));
        assert_eq!(ev.pu, Some(PuOutcome::Relayed));
        assert_eq!(next, state(1, 0, 1, 0, 0));
        // Without cooperation the packet stays put.
        let (next, ev) = run(p, PolicySpec::non_cooperative(), state(2, 0, 0, 1, 0));
        assert_eq!(ev.pu, Some(PuOutcome::Failed));
        assert_eq!(next, state(2, 0, 0, 0, 0));
    }

    #[test]
    fn work_conserving_cooperation_is_silent_when_empty() {
        let (next, ev) = run(certain(), PolicySpec::cooperative(0.5).unwrap(), state(0, 0, 0, 0, 4));
        assert_eq!(ev.su, None);
        assert_eq!(next.q_es, 4);
    }

    #[test]
    fn dominant_systems_send_dummies() {
        // a = 1: always pick the own queue.
        let (next, ev) = run(certain(), PolicySpec::dominant_i(1.0).unwrap(), state(0, 0, 3, 0, 2));
        assert_eq!(ev.su, Some(SuTransmission { queue: SuQueue::Own, dummy: true, delivered: false }));
        assert_eq!(next, state(0, 0, 3, 0, 1));
        // a = 0: always pick the relay queue.
        let (next, ev) = run(certain(), PolicySpec::dominant_ii(0.0).unwrap(), state(0, 5, 0, 0, 2));
        assert_eq!(ev.su, Some(SuTransmission { queue: SuQueue::Relay, dummy: true, delivered: false }));
        assert_eq!(next, state(0, 5, 0, 0, 1));
        // Dominant I falls back to the own queue when the relay queue is empty.
        let (_, ev) = run(certain(), PolicySpec::dominant_i(0.0).unwrap(), state(0, 2, 0, 0, 1));
        assert_eq!(ev.su, Some(SuTransmission { queue: SuQueue::Own, dummy: false, delivered: true }));
    }

    #[test]
    fn failed_su_transmission_keeps_packet_and_spends_energy() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let (next, ev) = run(p, PolicySpec::non_cooperative(), state(0, 1, 0, 0, 1));
        assert_eq!(ev.su, Some(SuTransmission { queue: SuQueue::Own, dummy: false, delivered: false }));
        assert_eq!(next, state(0, 1, 0, 0, 0));
    }

    #[test]
    fn late_arrivals() {
        let p = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let mut rng = StreamKey::default().rng(5);
        let (next, ev) = step_slot(
            QueueState::default(),
            &p,
            RatePoint::at(1.0, 1.0),
            PolicySpec::cooperative(0.5).unwrap(),
            false,
            &mut rng,
        );
        assert_eq!(ev.pu, None);
        assert_eq!(ev.su, None);
        assert_eq!(next, state(1, 1, 0, 1, 1));
    }
}
