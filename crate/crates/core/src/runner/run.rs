use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::Scenario;
use super::synthetic::synthetic_trace;
use crate::mosaic::{
    round_based_collect, time_window_collect_span, ArrivalRecord, IncompleteRound, MosaicReport,
};
use crate::names::RadarDataName;
use crate::protocol::TraceEntry;
use crate::simnet::{FileStatus, Metrics, Role, SimConfig, Simulation, Topology, Transport};
use crate::time::{millis_f64, SimTime};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub reps: Option<u32>,
    pub record_packets: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub extra_delay_ms: f64,
    /// Loss override on radar access links, if swept.
    pub loss_prob: Option<f64>,
}

impl SweepPoint {
    pub fn label(&self) -> String {
        match self.loss_prob {
            Some(l) => format!("delay+{}ms_loss{}", self.extra_delay_ms, l),
            None => format!("delay+{}ms", self.extra_delay_ms),
        }
    }

    /// Applies the point to a topology: extra delay and loss on every link
    /// with a radar at one end.
    pub fn apply(&self, topology: &mut Topology) {
        let extra = millis_f64(self.extra_delay_ms);
        let loss = self.loss_prob;
        topology.map_radar_links(|p| {
            p.propagation_delay += extra;
            if let Some(l) = loss {
                p.loss_prob = l;
            }
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowMosaics {
    pub window_s: f64,
    pub reports: Vec<MosaicReport>,
}

#[derive(Debug, Clone)]
pub struct RepResult {
    pub point: usize,
    pub rep: u32,
    pub seed: u64,
    pub pull: Option<Metrics>,
    pub push: Option<Metrics>,
    pub time_window: Vec<WindowMosaics>,
    pub round_based: Vec<MosaicReport>,
    pub incomplete: Vec<IncompleteRound>,
    pub abort: Option<String>,
}

impl RepResult {
    /// Metrics used for download-time statistics: the pull run when there
    /// is one.
    pub fn primary(&self) -> Option<&Metrics> {
        self.pull.as_ref().or(self.push.as_ref())
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub scenario: String,
    pub base_seed: u64,
    pub repetitions: u32,
    pub points: Vec<SweepPoint>,
    pub reps: Vec<RepResult>,
    pub seqs_per_round: BTreeMap<String, u64>,
}

impl ScenarioResult {
    pub fn aborted(&self) -> Vec<&RepResult> {
        self.reps.iter().filter(|r| r.abort.is_some()).collect()
    }

    pub fn reps_at(&self, point: usize) -> impl Iterator<Item = &RepResult> {
        self.reps.iter().filter(move |r| r.point == point)
    }
}

/// Runs every repetition of every sweep point; repetition `i` uses seed
/// `base_seed + i`. Independent simulations run in parallel.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> ScenarioResult {
    let base_seed = options.seed.unwrap_or(scenario.base_seed);
    let reps = options.reps.unwrap_or(scenario.repetitions).max(1);
    let points: Vec<SweepPoint> = scenario
        .sweep_points()
        .into_iter()
        .enumerate()
        .map(|(index, (extra_delay_ms, loss_prob))| SweepPoint {
            index,
            extra_delay_ms,
            loss_prob,
        })
        .collect();
    let jobs: Vec<(usize, u32)> = (0..points.len())
        .flat_map(|p| (0..reps).map(move |r| (p, r)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(p, rep)| {
            let seed = base_seed.wrapping_add(rep as u64);
            run_rep(scenario, &points[p], rep, seed, options.record_packets)
        })
        .collect();
    ScenarioResult {
        scenario: scenario.name.clone(),
        base_seed,
        repetitions: reps,
        points,
        reps: results,
        seqs_per_round: scenario.topology.seqs_per_round(),
    }
}

/// Generations for one repetition: the scenario trace, or a synthetic one
/// drawn from `seed`.
pub fn rep_trace(scenario: &Scenario, seed: u64) -> Vec<TraceEntry> {
    match &scenario.trace {
        Some(t) => t.clone(),
        None => synthetic_trace(
            &scenario.topology,
            &scenario.synthetic,
            seed,
            scenario.duration_s,
        ),
    }
}

fn simulate(
    scenario: &Scenario,
    topology: &Topology,
    trace: &[TraceEntry],
    transport: Transport,
    seed: u64,
    record_packets: bool,
) -> Result<Metrics, String> {
    let config = SimConfig {
        transport,
        record_packets,
        ..scenario.sim.clone()
    };
    let mut sim = Simulation::new(topology, config, seed);
    sim.load_generations(trace);
    if transport == Transport::Pull {
        match &scenario.requests {
            Some(log) => {
                let consumer = topology
                    .nodes
                    .iter()
                    .find(|n| n.role == Role::Consumer)
                    .expect("validated topology has a consumer");
                let reqs: Vec<(SimTime, RadarDataName)> = log
                    .iter()
                    .map(|r| (SimTime::from_secs_f64(r.epoch_seconds), r.name.clone()))
                    .collect();
                sim.schedule_requests(&consumer.id, &reqs);
            }
            None => sim.schedule_bootstrap(SimTime::from_secs_f64(scenario.bootstrap_s)),
        }
    }
    sim.run_until(SimTime::from_secs_f64(scenario.duration_s))
        .map_err(|e| e.to_string())
}

pub fn run_rep(
    scenario: &Scenario,
    point: &SweepPoint,
    rep: u32,
    seed: u64,
    record_packets: bool,
) -> RepResult {
    let mut topology = scenario.topology.clone();
    point.apply(&mut topology);
    let trace = rep_trace(scenario, seed);
    let spr = topology.seqs_per_round();
    let mut result = RepResult {
        point: point.index,
        rep,
        seed,
        pull: None,
        push: None,
        time_window: Vec::new(),
        round_based: Vec::new(),
        incomplete: Vec::new(),
        abort: None,
    };

    if scenario.policy.pulls() {
        match simulate(
            scenario,
            &topology,
            &trace,
            Transport::Pull,
            seed,
            record_packets,
        ) {
            Ok(m) => {
                let completed: Vec<(RadarDataName, f64)> = m
                    .files
                    .iter()
                    .filter(|f| f.status == FileStatus::Done)
                    .filter_map(|f| Some((f.name.clone(), f.completion_time?.as_secs_f64())))
                    .collect();
                for round in target_rounds(scenario, &trace, &m, &spr) {
                    match round_based_collect(&completed, round, &spr) {
                        Ok(r) => result.round_based.push(r),
                        Err(e) => result.incomplete.push(e),
                    }
                }
                result.pull = Some(m);
            }
            Err(e) => result.abort = Some(e),
        }
    }
    if scenario.policy.pushes() && result.abort.is_none() {
        match simulate(
            scenario,
            &topology,
            &trace,
            Transport::Push,
            seed,
            record_packets,
        ) {
            Ok(m) => {
                let arrivals: Vec<ArrivalRecord> = m
                    .files
                    .iter()
                    .filter_map(|f| {
                        Some(ArrivalRecord {
                            name: f.name.clone(),
                            arrival_time_s: f.completion_time?.as_secs_f64(),
                            size_bytes: f.size_bytes,
                        })
                    })
                    .collect();
                for &w in &scenario.windows_s {
                    let stride = scenario.stride_s.unwrap_or(w);
                    result.time_window.push(WindowMosaics {
                        window_s: w,
                        reports: time_window_collect_span(
                            &arrivals,
                            w,
                            stride,
                            &spr,
                            0.0,
                            scenario.duration_s,
                        ),
                    });
                }
                result.push = Some(m);
            }
            Err(e) => result.abort = Some(e),
        }
    }
    if let Some(e) = &result.abort {
        log::error!("rep {rep} (seed {seed}) at {}: {e}", point.label());
    }
    result
}

/// Rounds that every radar finished generating before the settle cutoff,
/// from each radar's first requested round on.
fn target_rounds(
    scenario: &Scenario,
    trace: &[TraceEntry],
    pull: &Metrics,
    spr: &BTreeMap<String, u64>,
) -> Vec<u64> {
    let cutoff = scenario.duration_s - scenario.settle_s;
    let mut generated: BTreeMap<(&str, u64), u64> = BTreeMap::new();
    for e in trace.iter().filter(|e| e.epoch_seconds <= cutoff) {
        *generated.entry((&e.radar_id, e.round)).or_insert(0) += 1;
    }
    let mut first: BTreeMap<&str, u64> = BTreeMap::new();
    for f in &pull.files {
        let e = first.entry(&f.name.radar_id).or_insert(f.name.round);
        *e = (*e).min(f.name.round);
    }
    let max_round = generated.keys().map(|(_, r)| *r).max();
    let Some(max_round) = max_round else {
        return Vec::new();
    };
    (0..=max_round)
        .filter(|&r| {
            spr.iter().all(|(radar, &n)| {
                generated.get(&(radar.as_str(), r)).copied().unwrap_or(0) == n
                    && first.get(radar.as_str()).is_none_or(|&f| r >= f)
            })
        })
        .collect()
}
