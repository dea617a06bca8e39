use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtoConfig {
    pub initial_srtt: Duration,
    /// EWMA gain for new samples.
    pub alpha: f64,
    /// RTO = multiplier × SRTT, clamped to `[min_rto, max_rto]`.
    pub multiplier: f64,
    pub min_rto: Duration,
    pub max_rto: Duration,
}

impl Default for RtoConfig {
    fn default() -> Self {
        RtoConfig {
            initial_srtt: Duration::from_millis(1000),
            alpha: 0.125,
            multiplier: 2.0,
            min_rto: Duration::from_millis(200),
            max_rto: Duration::from_secs(60),
        }
    }
}

/// Smoothed RTT estimator. The first sample replaces the initial guess;
/// later samples are folded in with an exponentially weighted average.
#[derive(Debug, Clone)]
pub struct RttEstimator {
    config: RtoConfig,
    srtt: Duration,
    samples: u64,
}

impl RttEstimator {
    pub fn new(config: RtoConfig) -> Self {
        RttEstimator {
            config,
            srtt: config.initial_srtt,
            samples: 0,
        }
    }

    pub fn add_sample(&mut self, rtt: Duration) {
        if self.samples == 0 {
            self.srtt = rtt;
        } else {
            let a = self.config.alpha;
            let srtt = (1.0 - a) * self.srtt.as_secs_f64() + a * rtt.as_secs_f64();
            self.srtt = Duration::from_secs_f64(srtt);
        }
        self.samples += 1;
    }

    pub fn srtt(&self) -> Duration {
        self.srtt
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn rto(&self) -> Duration {
        self.srtt
            .mul_f64(self.config.multiplier)
            .clamp(self.config.min_rto, self.config.max_rto)
    }
}
