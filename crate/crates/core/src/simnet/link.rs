//! Point-to-point links: FIFO serialization, propagation delay, random loss.

use std::collections::VecDeque;
use std::time::Duration;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::time::{millis_f64, SimTime};

#[derive(Debug, Clone, PartialEq)]
pub struct LinkProfile {
    pub bandwidth_bps: u64,
    pub propagation_delay: Duration,
    /// Independent per-packet drop probability, applied in each direction.
    pub loss_prob: f64,
    /// Tail-drop limit on packets waiting or in serialization; `None` is
    /// an unbounded queue.
    pub queue_limit: Option<usize>,
}

impl LinkProfile {
    pub fn new(
        bandwidth_bps: u64,
        propagation_delay_ms: f64,
        loss_prob: f64,
    ) -> Result<LinkProfile, String> {
        if bandwidth_bps == 0 {
            return Err("bandwidth must be positive".into());
        }
        if !(propagation_delay_ms.is_finite() && propagation_delay_ms >= 0.0) {
            return Err(format!(
                "delay {propagation_delay_ms} ms is not a non-negative number"
            ));
        }
        if !(0.0..1.0).contains(&loss_prob) {
            return Err(format!("loss probability {loss_prob} outside [0, 1)"));
        }
        Ok(LinkProfile {
            bandwidth_bps,
            propagation_delay: millis_f64(propagation_delay_ms),
            loss_prob,
            queue_limit: None,
        })
    }

    pub fn mbps(mbps: f64, delay_ms: f64, loss_prob: f64) -> Result<LinkProfile, String> {
        if !(mbps.is_finite() && mbps > 0.0) {
            return Err(format!("bandwidth {mbps} Mbps must be positive"));
        }
        LinkProfile::new((mbps * 1e6).round() as u64, delay_ms, loss_prob)
    }

    pub fn propagation_delay_ms(&self) -> f64 {
        self.propagation_delay.as_secs_f64() * 1e3
    }

    /// Time to clock `size_bytes` onto the wire.
    pub fn serialization(&self, size_bytes: usize) -> Duration {
        let nanos = size_bytes as u128 * 8 * 1_000_000_000 / self.bandwidth_bps as u128;
        Duration::from_nanos(nanos as u64)
    }

    /// Sends one packet. Returns its arrival time at the far end, or `None`
    /// if it was lost or tail-dropped. A lost packet still occupies the link
    /// for its serialization time.
    pub fn transmit(
        &self,
        state: &mut LinkState,
        size_bytes: usize,
        now: SimTime,
        rng: &mut ChaCha8Rng,
    ) -> Option<SimTime> {
        while state.backlog.front().is_some_and(|&done| done <= now) {
            state.backlog.pop_front();
        }
        let lost = rng.random::<f64>() < self.loss_prob;
        if self
            .queue_limit
            .is_some_and(|limit| state.backlog.len() >= limit)
        {
            state.tail_drops += 1;
            return None;
        }
        let start = state.busy_until.max(now);
        let done = start + self.serialization(size_bytes);
        state.busy_until = done;
        state.backlog.push_back(done);
        state.packets += 1;
        state.bytes += size_bytes as u64;
        if lost {
            state.losses += 1;
            return None;
        }
        Some(done + self.propagation_delay)
    }
}

/// Mutable state of one link direction.
#[derive(Debug, Clone, Default)]
pub struct LinkState {
    pub busy_until: SimTime,
    backlog: VecDeque<SimTime>,
    pub packets: u64,
    pub bytes: u64,
    pub losses: u64,
    pub tail_drops: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    #[test]
    fn transfer_time_examples() {
        let fw = LinkProfile::mbps(10.0, 0.0, 0.0).unwrap();
        assert!(fw.serialization(12_000_000).as_secs_f64() >= 9.6);
        let cleburne = LinkProfile::mbps(50.0, 0.0, 0.0).unwrap();
        assert_eq!(cleburne.serialization(200_000), Duration::from_millis(32));

        let mut st = LinkState::default();
        let now = SimTime::from_millis(5);
        let at = cleburne.transmit(&mut st, 64, now, &mut rng()).unwrap();
        assert_eq!(
            at.since(now),
            Duration::from_nanos(64 * 8 * 1_000_000_000 / 50_000_000)
        );
    }

    #[test]
    fn fifo_back_to_back() {
        let link = LinkProfile::mbps(8.0, 10.0, 0.0).unwrap();
        let mut st = LinkState::default();
        let mut r = rng();
        let a = link.transmit(&mut st, 1000, SimTime::ZERO, &mut r).unwrap();
        let b = link.transmit(&mut st, 1000, SimTime::ZERO, &mut r).unwrap();
        assert_eq!(a, SimTime::from_millis(11));
        assert_eq!(b, SimTime::from_millis(12));
        // an idle link starts serializing immediately
        let c = link
            .transmit(&mut st, 1000, SimTime::from_millis(100), &mut r)
            .unwrap();
        assert_eq!(c, SimTime::from_millis(111));
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(LinkProfile::new(0, 1.0, 0.0).is_err());
        assert!(LinkProfile::new(1, -1.0, 0.0).is_err());
        assert!(LinkProfile::new(1, 1.0, 1.0).is_err());
        assert!(LinkProfile::new(1, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn loss_rate_close_to_configured() {
        let link = LinkProfile::mbps(1000.0, 0.0, 0.1).unwrap();
        let mut st = LinkState::default();
        let mut r = rng();
        let delivered = (0..20_000)
            .filter(|i| {
                link.transmit(&mut st, 100, SimTime::from_millis(*i), &mut r)
                    .is_some()
            })
            .count();
        assert!((17_700..18_300).contains(&delivered), "{delivered}");
        assert_eq!(st.losses, 20_000 - delivered as u64);
    }

    #[test]
    fn bounded_queue_tail_drops() {
        let mut link = LinkProfile::mbps(8.0, 0.0, 0.0).unwrap();
        link.queue_limit = Some(2);
        let mut st = LinkState::default();
        let mut r = rng();
        assert!(link
            .transmit(&mut st, 1000, SimTime::ZERO, &mut r)
            .is_some());
        assert!(link
            .transmit(&mut st, 1000, SimTime::ZERO, &mut r)
            .is_some());
        assert!(link
            .transmit(&mut st, 1000, SimTime::ZERO, &mut r)
            .is_none());
        assert_eq!(st.tail_drops, 1);
        assert!(link
            .transmit(&mut st, 1000, SimTime::from_millis(1), &mut r)
            .is_some());
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn arrivals_preserve_send_order(
            sends in prop::collection::vec((0u64..5_000, 40usize..9_000), 1..60),
            loss in 0.0f64..0.5,
        ) {
            let link = LinkProfile::mbps(10.0, 3.0, loss).unwrap();
            let mut st = LinkState::default();
            let mut r = rng();
            let mut now = SimTime::ZERO;
            let mut last = SimTime::ZERO;
            for (gap, size) in sends {
                now += Duration::from_micros(gap);
                if let Some(at) = link.transmit(&mut st, size, now, &mut r) {
                    prop_assert!(at >= last);
                    prop_assert!(at > now);
                    last = at;
                }
            }
        }
    }
}
