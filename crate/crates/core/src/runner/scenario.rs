//! Scenario files.
//!
//! ```toml
//! name = "baseline"
//! topology = "casa_dfw.toml"
//! policy = "round_based"
//! repetitions = 20
//! base_seed = 1
//! duration_s = 90
//!
//! [synthetic]
//! start_s = 1.0
//! rounds = 1
//! ```
//!
//! Relative paths are resolved against the scenario file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use crate::protocol::trace::{load_request_log, load_trace, RequestLogEntry, TraceEntry};
use crate::protocol::{ConsumerConfig, FollowMode, RtoConfig};
use crate::simnet::{load_topology, ConfigError, SimConfig, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    RoundBased,
    TimeWindow,
    Both,
}

impl PolicyChoice {
    pub fn pulls(self) -> bool {
        self != PolicyChoice::TimeWindow
    }

    pub fn pushes(self) -> bool {
        self != PolicyChoice::RoundBased
    }
}

/// Parameters of the synthetic generation trace used when no trace file is
/// given. Every radar starts `start_s` plus a random phase, then produces
/// rounds of `seqs_per_round` evenly spaced files.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticTrace {
    pub start_s: f64,
    /// Per-radar start offset drawn uniformly from `[0, phase_jitter_s)`.
    pub phase_jitter_s: f64,
    /// Each round lasts the nominal duration times `1 ± round_jitter`.
    pub round_jitter: f64,
    /// Each file is the mean size times `1 ± size_jitter`.
    pub size_jitter: f64,
    /// Rounds per radar; unlimited (bounded by the scenario duration) when
    /// absent.
    pub rounds: Option<u64>,
}

impl Default for SyntheticTrace {
    fn default() -> Self {
        SyntheticTrace {
            start_s: 1.0,
            phase_jitter_s: 0.0,
            round_jitter: 0.0,
            size_jitter: 0.0,
            rounds: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweeps {
    pub extra_delay_ms: Option<Vec<f64>>,
    pub loss_prob: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsumerSettings {
    pub window: Option<usize>,
    pub max_retries: Option<u32>,
    pub init_retries: Option<u32>,
    pub follow: Option<FollowMode>,
    pub max_wait_s: Option<f64>,
    pub min_rto_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSettings {
    pub chunk_size: Option<usize>,
    pub cs_capacity: Option<usize>,
    pub piggyback: Option<bool>,
    /// Events allowed at one instant before a run is declared stuck.
    pub livelock_limit: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    topology: PathBuf,
    trace: Option<PathBuf>,
    requests: Option<PathBuf>,
    policy: PolicyChoice,
    #[serde(default)]
    windows_s: Vec<f64>,
    stride_s: Option<f64>,
    #[serde(default = "default_reps")]
    repetitions: u32,
    #[serde(default = "default_seed")]
    base_seed: u64,
    duration_s: f64,
    #[serde(default)]
    bootstrap_s: f64,
    #[serde(default = "default_settle")]
    settle_s: f64,
    time_origin_s: Option<f64>,
    #[serde(default)]
    synthetic: SyntheticTrace,
    sweep: Option<Sweeps>,
    #[serde(default)]
    consumer: ConsumerSettings,
    #[serde(default)]
    network: NetworkSettings,
}

fn default_reps() -> u32 {
    20
}

fn default_seed() -> u64 {
    1
}

fn default_settle() -> f64 {
    10.0
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub path: PathBuf,
    pub topology_path: PathBuf,
    pub topology: Topology,
    pub trace_path: Option<PathBuf>,
    /// Generations with times already shifted to simulated seconds.
    pub trace: Option<Vec<TraceEntry>>,
    pub requests: Option<Vec<RequestLogEntry>>,
    pub policy: PolicyChoice,
    pub windows_s: Vec<f64>,
    pub stride_s: Option<f64>,
    pub repetitions: u32,
    pub base_seed: u64,
    pub sweeps: Option<Sweeps>,
    pub duration_s: f64,
    pub bootstrap_s: f64,
    /// Rounds whose last file is generated later than `duration_s -
    /// settle_s` are not used as round-based mosaic targets.
    pub settle_s: f64,
    pub synthetic: SyntheticTrace,
    pub sim: SimConfig,
}

/// 1-based line of the first `key = ...` assignment in `src`.
fn key_line(src: &str, key: &str) -> Option<usize> {
    src.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ConfigError> {
        let shown = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: shown.clone(),
            source,
        })?;
        Scenario::parse(&src, path)
    }

    /// Parses scenario text; `path` locates referenced files.
    pub fn parse(src: &str, path: &Path) -> Result<Scenario, ConfigError> {
        let shown = path.display().to_string();
        let file: ScenarioFile = toml::from_str(src).map_err(|e| ConfigError::Parse {
            path: shown.clone(),
            message: e.to_string().trim_end().to_string(),
        })?;
        let invalid = |field: &str, message: String| {
            let key = field.rsplit('.').next().unwrap_or(field);
            ConfigError::invalid(&shown, key_line(src, key), field, message)
        };

        if file.repetitions < 1 {
            return Err(invalid("repetitions", "must be at least 1".into()));
        }
        if !(file.duration_s.is_finite() && file.duration_s > 0.0) {
            return Err(invalid("duration_s", "must be positive".into()));
        }
        for (field, v) in [
            ("bootstrap_s", file.bootstrap_s),
            ("settle_s", file.settle_s),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(field, "must be non-negative".into()));
            }
        }
        if file.policy.pushes() && file.windows_s.is_empty() {
            return Err(invalid(
                "windows_s",
                "time-window policy needs at least one window".into(),
            ));
        }
        if file.windows_s.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("windows_s", "windows must be positive".into()));
        }
        if file.stride_s.is_some_and(|s| !(s.is_finite() && s > 0.0)) {
            return Err(invalid("stride_s", "must be positive".into()));
        }
        if let Some(sw) = &file.sweep {
            if sw.extra_delay_ms.is_none() && sw.loss_prob.is_none() {
                return Err(invalid("sweep", "no sweep list given".into()));
            }
            if let Some(d) = &sw.extra_delay_ms {
                if d.is_empty() {
                    return Err(invalid("sweep.extra_delay_ms", "list is empty".into()));
                }
                if d.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(invalid(
                        "sweep.extra_delay_ms",
                        "delays must be non-negative".into(),
                    ));
                }
            }
            if let Some(l) = &sw.loss_prob {
                if l.is_empty() {
                    return Err(invalid("sweep.loss_prob", "list is empty".into()));
                }
                if l.iter().any(|v| !(0.0..1.0).contains(v)) {
                    return Err(invalid(
                        "sweep.loss_prob",
                        "probabilities must be in [0, 1)".into(),
                    ));
                }
            }
        }
        let syn = &file.synthetic;
        if !(syn.start_s >= 0.0 && syn.phase_jitter_s >= 0.0) {
            return Err(invalid(
                "synthetic.start_s",
                "times must be non-negative".into(),
            ));
        }
        if !(0.0..1.0).contains(&syn.round_jitter) {
            return Err(invalid(
                "synthetic.round_jitter",
                "must be in [0, 1)".into(),
            ));
        }
        if !(0.0..1.0).contains(&syn.size_jitter) {
            return Err(invalid("synthetic.size_jitter", "must be in [0, 1)".into()));
        }
        if file.consumer.window == Some(0) {
            return Err(invalid("consumer.window", "must be at least 1".into()));
        }

        let base = path.parent().unwrap_or(Path::new("."));
        let topology_path = base.join(&file.topology);
        let topology = load_topology(&topology_path)?;
        let spr: BTreeMap<String, u64> = topology.seqs_per_round();

        let trace_path = file.trace.as_ref().map(|t| base.join(t));
        let mut trace = match &trace_path {
            Some(p) => Some(load_trace(p, &spr).map_err(|e| {
                ConfigError::invalid(&shown, key_line(src, "trace"), "trace", e.to_string())
            })?),
            None => None,
        };
        let mut requests = match &file.requests {
            Some(p) => {
                let p = base.join(p);
                let log = load_request_log(&p).map_err(|e| {
                    ConfigError::invalid(
                        &shown,
                        key_line(src, "requests"),
                        "requests",
                        e.to_string(),
                    )
                })?;
                if let Some(bad) = log.iter().find(|r| !spr.contains_key(&r.radar_id)) {
                    return Err(invalid(
                        "requests",
                        format!("unknown radar {:?}", bad.radar_id),
                    ));
                }
                Some(log)
            }
            None => None,
        };
        // recorded epochs become simulated seconds counted from the origin
        let origin = file.time_origin_s.or_else(|| {
            let t = trace.iter().flatten().map(|e| e.epoch_seconds);
            let r = requests.iter().flatten().map(|e| e.epoch_seconds);
            t.chain(r).reduce(f64::min)
        });
        if let Some(origin) = origin {
            let shift = |t: f64| (t - origin + file.synthetic.start_s).max(0.0);
            for e in trace.iter_mut().flatten() {
                e.epoch_seconds = shift(e.epoch_seconds);
            }
            for e in requests.iter_mut().flatten() {
                e.epoch_seconds = shift(e.epoch_seconds);
            }
        }

        let mut consumer = ConsumerConfig {
            seqs_per_round: spr,
            ..ConsumerConfig::default()
        };
        let cs = &file.consumer;
        if let Some(w) = cs.window {
            consumer.window = w;
        }
        if let Some(r) = cs.max_retries {
            consumer.max_retries = r;
        }
        if let Some(r) = cs.init_retries {
            consumer.init_retries = r;
        }
        if let Some(f) = cs.follow {
            consumer.follow = f;
        }
        if requests.is_some() && cs.follow.is_none() {
            consumer.follow = FollowMode::Off;
        }
        if let Some(w) = cs.max_wait_s {
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid("consumer.max_wait_s", "must be positive".into()));
            }
            consumer.max_wait = Duration::from_secs_f64(w);
        }
        if let Some(m) = cs.min_rto_ms {
            if !(m.is_finite() && m > 0.0) {
                return Err(invalid("consumer.min_rto_ms", "must be positive".into()));
            }
            consumer.rto = RtoConfig {
                min_rto: crate::time::millis_f64(m),
                ..RtoConfig::default()
            };
        }

        let mut sim = SimConfig {
            consumer,
            ..SimConfig::default()
        };
        let net = &file.network;
        if let Some(c) = net.chunk_size {
            if c == 0 {
                return Err(invalid("network.chunk_size", "must be positive".into()));
            }
            sim.chunk_size = c;
        }
        if let Some(c) = net.cs_capacity {
            sim.cs_capacity = c;
        }
        if let Some(p) = net.piggyback {
            sim.piggyback = p;
        }
        if let Some(l) = net.livelock_limit {
            if l == 0 {
                return Err(invalid("network.livelock_limit", "must be positive".into()));
            }
            sim.livelock_limit = l;
        }

        Ok(Scenario {
            name: file.name,
            path: path.to_path_buf(),
            topology_path,
            topology,
            trace_path,
            trace,
            requests,
            policy: file.policy,
            windows_s: file.windows_s,
            stride_s: file.stride_s,
            repetitions: file.repetitions,
            base_seed: file.base_seed,
            sweeps: file.sweep,
            duration_s: file.duration_s,
            bootstrap_s: file.bootstrap_s,
            settle_s: file.settle_s,
            synthetic: file.synthetic,
            sim,
        })
    }

    /// Sweep points as (extra delay, loss override), in file order with
    /// delay varying slowest.
    pub fn sweep_points(&self) -> Vec<(f64, Option<f64>)> {
        let Some(sw) = &self.sweeps else {
            return vec![(0.0, None)];
        };
        let delays = sw.extra_delay_ms.clone().unwrap_or_else(|| vec![0.0]);
        let losses: Vec<Option<f64>> = match &sw.loss_prob {
            Some(l) => l.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        delays
            .iter()
            .flat_map(|&d| losses.iter().map(move |&l| (d, l)))
            .collect()
    }
}
