//! Shared helpers for the integration tests: topology builders, one-file
//! transfer runs and the closed-form pipeline oracle.
#![allow(dead_code)]

use std::path::PathBuf;
use std::time::Duration;

use ndn_radar::names::make_data_name;
use ndn_radar::packets::HEADER_BYTES;
use ndn_radar::protocol::{FollowMode, TraceEntry};
use ndn_radar::simnet::{FileMetric, FileStatus, Metrics, SimConfig, Simulation, Topology};
use ndn_radar::time::SimTime;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

/// Radar `r` and consumer `c` joined by one link.
pub fn single_link(mbps: f64, delay_ms: f64, loss: f64) -> Topology {
    Topology::parse(
        &format!(
            r#"
[[node]]
id = "r"
role = "radar"
seqs_per_round = 1
round_duration_s = 60
mean_file_mb = 1

[[node]]
id = "c"
role = "consumer"

[[link]]
a = "r"
b = "c"
bandwidth_mbps = {mbps}
delay_ms = {delay_ms}
loss = {loss}
"#
        ),
        "single_link",
    )
    .expect("valid topology")
}

/// Consumer `c`, forwarder `f`, radar `p` in a line, with separate link
/// parameters for each hop.
pub fn line(cf: (f64, f64, f64), fp: (f64, f64, f64)) -> Topology {
    Topology::parse(
        &format!(
            r#"
[[node]]
id = "p"
role = "radar"
seqs_per_round = 1
round_duration_s = 60
mean_file_mb = 1

[[node]]
id = "f"
role = "forwarder"

[[node]]
id = "c"
role = "consumer"

[[link]]
a = "c"
b = "f"
bandwidth_mbps = {}
delay_ms = {}
loss = {}

[[link]]
a = "f"
b = "p"
bandwidth_mbps = {}
delay_ms = {}
loss = {}
"#,
            cf.0, cf.1, cf.2, fp.0, fp.1, fp.2
        ),
        "line",
    )
    .expect("valid topology")
}

/// The radar `radar` generates one file of `size_bytes` at t = 0.5 s; the
/// consumer asks for it by name at t = 1 s, with following disabled.
pub fn one_file(
    topology: &Topology,
    radar: &str,
    size_bytes: u64,
    mut config: SimConfig,
    seed: u64,
    horizon_s: f64,
) -> (Metrics, Simulation) {
    config.consumer.follow = FollowMode::Off;
    let consumer = topology
        .nodes
        .iter()
        .find(|n| n.role == ndn_radar::simnet::Role::Consumer)
        .expect("consumer")
        .id
        .clone();
    let mut sim = Simulation::new(topology, config, seed);
    sim.load_generations(&[TraceEntry {
        epoch_seconds: 0.5,
        radar_id: radar.into(),
        round: 0,
        seq: 1,
        size_bytes,
    }]);
    sim.schedule_requests(
        &consumer,
        &[(
            SimTime::from_secs_f64(1.0),
            make_data_name(radar, 0, 1, None),
        )],
    );
    let m = sim
        .run_until(SimTime::from_secs_f64(horizon_s))
        .expect("no livelock");
    (m, sim)
}

pub fn only_file(m: &Metrics) -> &FileMetric {
    assert_eq!(m.files.len(), 1, "{:?}", m.files);
    &m.files[0]
}

pub fn done_secs(f: &FileMetric) -> f64 {
    assert_eq!(f.status, FileStatus::Done, "{f:?}");
    f.download_time().expect("completed").as_secs_f64()
}

/// Bytes on the wire of an Interest for segment `k` of `/data/r/_round=0/_seq=1`.
pub fn interest_bytes(radar: &str, k: u64) -> usize {
    HEADER_BYTES
        + make_data_name(radar, 0, 1, None)
            .with_segment(k)
            .to_name()
            .encoded_len()
}

/// Closed-form completion time of a lossless single-link pull.
///
/// With `k` segments of at most `chunk` bytes, per-packet serialization
/// times `tx_i` (Interest) and `tx_d` (full Data segment), one-way delay
/// `d` and window `w`:
///
/// ```text
/// T0   = tx_i + d + tx_d0 + d                 segment 0 alone, learns k
/// C    = tx_i + 2d + tx_d                     one window turn
/// g(n) = max(n * tx_d, q * C + r * tx_d)      q = (n - 1) / w, r = n - q w
/// done = T0 + tx_i + d + g(k - 1) + d - (tx_d - tx_last)
/// ```
///
/// The first term of `g` is the bandwidth bound, the second the window
/// bound. Segments 1..k-1 go out in windows once segment 0 has arrived.
pub fn pipeline_completion(
    size_bytes: usize,
    chunk: usize,
    bandwidth_bps: f64,
    delay: Duration,
    window: usize,
    interest_bytes: usize,
) -> f64 {
    let tx = |bytes: usize| bytes as f64 * 8.0 / bandwidth_bps;
    let d = delay.as_secs_f64();
    let k = size_bytes.div_ceil(chunk).max(1);
    let seg = |i: usize| (size_bytes - i * chunk).min(chunk);
    let tx_i = tx(interest_bytes);
    let t0 = tx_i + d + tx(HEADER_BYTES + seg(0)) + d;
    if k == 1 {
        return t0;
    }
    let n = k - 1;
    let tx_d = tx(HEADER_BYTES + chunk);
    let tx_last = tx(HEADER_BYTES + seg(k - 1));
    let c = tx_i + 2.0 * d + tx_d;
    let q = (n - 1) / window;
    let r = n - q * window;
    let g = (n as f64 * tx_d).max(q as f64 * c + r as f64 * tx_d);
    t0 + tx_i + d + g + d - (tx_d - tx_last)
}
