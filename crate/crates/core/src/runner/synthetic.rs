//! Synthetic generation traces, for when no recorded trace is available.

use rand::Rng;

use super::scenario::SyntheticTrace;
use crate::protocol::TraceEntry;
use crate::simnet::{rng_stream, Topology};

const TRACE_STREAM: u64 = 2;

/// Generation schedule for every radar of `topology` up to `until_s`
/// simulated seconds. Radars draw their randomness in topology order from
/// one stream of `seed`.
pub fn synthetic_trace(
    topology: &Topology,
    params: &SyntheticTrace,
    seed: u64,
    until_s: f64,
) -> Vec<TraceEntry> {
    let mut rng = rng_stream(seed, TRACE_STREAM);
    let mut uniform = |spread: f64| -> f64 {
        if spread > 0.0 {
            rng.random_range(-spread..spread)
        } else {
            0.0
        }
    };
    let mut out = Vec::new();
    for radar in topology.radars() {
        let phase = if params.phase_jitter_s > 0.0 {
            (uniform(params.phase_jitter_s / 2.0) + params.phase_jitter_s / 2.0).max(0.0)
        } else {
            0.0
        };
        let nominal = radar.round_duration.as_secs_f64();
        let spr = radar.seqs_per_round;
        let mut round_start = params.start_s + phase;
        let mut round = 0u64;
        while round_start <= until_s && params.rounds.is_none_or(|n| round < n) {
            let duration = nominal * (1.0 + uniform(params.round_jitter));
            for seq in 1..=spr {
                let t = round_start + duration * (seq - 1) as f64 / spr as f64;
                if t > until_s {
                    break;
                }
                let size = radar.mean_file_bytes as f64 * (1.0 + uniform(params.size_jitter));
                out.push(TraceEntry {
                    epoch_seconds: t,
                    radar_id: radar.radar_id.clone(),
                    round,
                    seq,
                    size_bytes: size.round() as u64,
                });
            }
            round_start += duration;
            round += 1;
        }
    }
    out.sort_by(|a, b| a.epoch_seconds.total_cmp(&b.epoch_seconds));
    out
}
