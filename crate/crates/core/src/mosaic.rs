//! Mosaic assembly: legacy time-window collection against explicit
//! round-based collection, with structural quality metrics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::names::RadarDataName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    TimeWindow,
    RoundBased,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::TimeWindow => "time_window",
            Policy::RoundBased => "round_based",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalRecord {
    pub name: RadarDataName,
    pub arrival_time_s: f64,
    pub size_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MosaicReport {
    pub policy: Policy,
    pub mosaic_id: u64,
    /// Window start for time-window mosaics, target round for round-based.
    pub window_start_s: Option<f64>,
    pub target_round: Option<u64>,
    pub included: Vec<RadarDataName>,
    pub per_radar_count: BTreeMap<String, u64>,
    /// Largest number of distinct sequences from one round of the radar,
    /// as a percentage of its sequences per round.
    pub per_radar_inclusion_pct: BTreeMap<String, f64>,
    pub duplicates: u64,
    pub starved_radars: BTreeSet<String>,
    pub total_files: u64,
    pub ideal_files: u64,
    pub inclusion_pct: f64,
    /// Latest completion among included files (round-based only).
    pub completion_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("round {target_round} incomplete: missing {}", fmt_missing(.missing))]
pub struct IncompleteRound {
    pub target_round: u64,
    pub missing: Vec<(String, u64)>,
}

fn fmt_missing(missing: &[(String, u64)]) -> String {
    missing
        .iter()
        .map(|(r, s)| format!("{r}/seq {s}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Builds a report from the files a mosaic includes.
fn report(
    policy: Policy,
    mosaic_id: u64,
    included: Vec<RadarDataName>,
    radars: &BTreeMap<String, u64>,
) -> MosaicReport {
    let ideal_files = radars.values().sum();
    let mut per_radar_count: BTreeMap<String, u64> =
        radars.keys().map(|r| (r.clone(), 0)).collect();
    // radar -> round -> distinct seqs
    let mut rounds: BTreeMap<&str, BTreeMap<u64, BTreeSet<u64>>> = BTreeMap::new();
    let mut seen: BTreeMap<(&str, u64), BTreeSet<u64>> = BTreeMap::new();
    for n in &included {
        *per_radar_count.entry(n.radar_id.clone()).or_insert(0) += 1;
        rounds
            .entry(&n.radar_id)
            .or_default()
            .entry(n.round)
            .or_default()
            .insert(n.seq);
        seen.entry((&n.radar_id, n.seq))
            .or_default()
            .insert(n.round);
    }
    let duplicates = seen.values().map(|r| r.len() as u64 - 1).sum();
    let mut best_total = 0;
    let per_radar_inclusion_pct = radars
        .iter()
        .map(|(radar, &spr)| {
            let best = rounds
                .get(radar.as_str())
                .and_then(|r| r.values().map(|s| s.len() as u64).max())
                .unwrap_or(0)
                .min(spr);
            best_total += best;
            (radar.clone(), 100.0 * best as f64 / spr.max(1) as f64)
        })
        .collect();
    let starved_radars = per_radar_count
        .iter()
        .filter(|(_, &c)| c == 0)
        .map(|(r, _)| r.clone())
        .collect();
    let total_files = included.len() as u64;
    MosaicReport {
        policy,
        mosaic_id,
        window_start_s: None,
        target_round: None,
        included,
        per_radar_count,
        per_radar_inclusion_pct,
        duplicates,
        starved_radars,
        total_files,
        ideal_files,
        inclusion_pct: if ideal_files == 0 {
            0.0
        } else {
            100.0 * best_total as f64 / ideal_files as f64
        },
        completion_time_s: None,
    }
}

/// Tumbling (or, with `stride_s < window_s`, overlapping) windows from time
/// zero up to the last arrival. `radars` maps every radar to its sequences
/// per round.
pub fn time_window_collect(
    arrivals: &[ArrivalRecord],
    window_s: f64,
    stride_s: f64,
    radars: &BTreeMap<String, u64>,
) -> Vec<MosaicReport> {
    let end = arrivals
        .iter()
        .map(|a| a.arrival_time_s)
        .fold(0.0, f64::max);
    time_window_collect_span(arrivals, window_s, stride_s, radars, 0.0, end + window_s)
}

/// Windows `[start + k·stride, start + k·stride + window)` that lie entirely
/// inside `[start_s, end_s]`.
pub fn time_window_collect_span(
    arrivals: &[ArrivalRecord],
    window_s: f64,
    stride_s: f64,
    radars: &BTreeMap<String, u64>,
    start_s: f64,
    end_s: f64,
) -> Vec<MosaicReport> {
    assert!(
        window_s > 0.0 && stride_s > 0.0,
        "window and stride must be positive"
    );
    let mut sorted: Vec<&ArrivalRecord> = arrivals.iter().collect();
    sorted.sort_by(|a, b| a.arrival_time_s.total_cmp(&b.arrival_time_s));
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let lo = start_s + k as f64 * stride_s;
        let hi = lo + window_s;
        if hi > end_s + 1e-9 {
            break;
        }
        let first = sorted.partition_point(|a| a.arrival_time_s < lo);
        let included: Vec<RadarDataName> = sorted[first..]
            .iter()
            .take_while(|a| a.arrival_time_s < hi)
            .map(|a| a.name.file())
            .collect();
        let mut r = report(Policy::TimeWindow, k, included, radars);
        r.window_start_s = Some(lo);
        out.push(r);
        k += 1;
    }
    out
}

/// The mosaic for `target_round`: exactly that round's files from every
/// radar, or the list of what is missing.
pub fn round_based_collect(
    completed: &[(RadarDataName, f64)],
    target_round: u64,
    radars: &BTreeMap<String, u64>,
) -> Result<MosaicReport, IncompleteRound> {
    let mut have: BTreeMap<(String, u64), f64> = BTreeMap::new();
    for (n, t) in completed {
        if n.round == target_round && radars.contains_key(&n.radar_id) {
            let e = have.entry((n.radar_id.clone(), n.seq)).or_insert(*t);
            *e = e.min(*t);
        }
    }
    let missing: Vec<(String, u64)> = radars
        .iter()
        .flat_map(|(r, &spr)| (1..=spr).map(move |s| (r.clone(), s)))
        .filter(|k| !have.contains_key(k))
        .collect();
    if !missing.is_empty() {
        return Err(IncompleteRound {
            target_round,
            missing,
        });
    }
    let included = have
        .keys()
        .filter(|(r, s)| radars.get(r).is_some_and(|&spr| *s <= spr))
        .map(|(r, s)| crate::names::make_data_name(r, target_round, *s, None))
        .collect();
    let mut r = report(Policy::RoundBased, target_round, included, radars);
    r.target_round = Some(target_round);
    r.completion_time_s = have.values().copied().reduce(f64::max);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySummary {
    pub policy: Policy,
    pub mosaics: u64,
    pub min_total: u64,
    pub max_total: u64,
    pub mean_total: f64,
    pub mean_duplicates: f64,
    pub max_duplicates: u64,
    pub starvation_events: u64,
    pub mean_inclusion_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadarInclusion {
    pub policy: Policy,
    pub radar_id: String,
    pub mean_pct: f64,
    pub min_pct: f64,
    pub max_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub policies: Vec<PolicySummary>,
    pub radars: Vec<RadarInclusion>,
}

fn summarize(policy: Policy, reports: &[MosaicReport]) -> (PolicySummary, Vec<RadarInclusion>) {
    let n = reports.len().max(1) as f64;
    let totals = reports.iter().map(|r| r.total_files);
    let summary = PolicySummary {
        policy,
        mosaics: reports.len() as u64,
        min_total: totals.clone().min().unwrap_or(0),
        max_total: totals.clone().max().unwrap_or(0),
        mean_total: totals.sum::<u64>() as f64 / n,
        mean_duplicates: reports.iter().map(|r| r.duplicates).sum::<u64>() as f64 / n,
        max_duplicates: reports.iter().map(|r| r.duplicates).max().unwrap_or(0),
        starvation_events: reports.iter().map(|r| r.starved_radars.len() as u64).sum(),
        mean_inclusion_pct: reports.iter().map(|r| r.inclusion_pct).sum::<f64>() / n,
    };
    let mut per: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in reports {
        for (radar, pct) in &r.per_radar_inclusion_pct {
            per.entry(radar).or_default().push(*pct);
        }
    }
    let radars = per
        .into_iter()
        .map(|(radar, v)| RadarInclusion {
            policy,
            radar_id: radar.to_string(),
            mean_pct: v.iter().sum::<f64>() / v.len() as f64,
            min_pct: v.iter().copied().fold(f64::INFINITY, f64::min),
            max_pct: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    (summary, radars)
}

pub fn compare_policies(
    reports_tw: &[MosaicReport],
    reports_rb: &[MosaicReport],
) -> ComparisonTable {
    let (tw, mut tw_radars) = summarize(Policy::TimeWindow, reports_tw);
    let (rb, rb_radars) = summarize(Policy::RoundBased, reports_rb);
    tw_radars.extend(rb_radars);
    ComparisonTable {
        policies: vec![tw, rb],
        radars: tw_radars,
    }
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "policy,mosaics,min_total,max_total,mean_total,mean_duplicates,max_duplicates,starvation_events,mean_inclusion_pct\n",
        );
        for p in &self.policies {
            let _ = writeln!(
                s,
                "{},{},{},{},{:.3},{:.3},{},{},{:.3}",
                p.policy.as_str(),
                p.mosaics,
                p.min_total,
                p.max_total,
                p.mean_total,
                p.mean_duplicates,
                p.max_duplicates,
                p.starvation_events,
                p.mean_inclusion_pct
            );
        }
        s.push_str("\npolicy,radar_id,mean_inclusion_pct,min_inclusion_pct,max_inclusion_pct\n");
        for r in &self.radars {
            let _ = writeln!(
                s,
                "{},{},{:.3},{:.3},{:.3}",
                r.policy.as_str(),
                r.radar_id,
                r.mean_pct,
                r.min_pct,
                r.max_pct
            );
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>7} {:>6} {:>6} {:>8} {:>9} {:>8} {:>8} {:>10}",
            "policy", "mosaics", "min", "max", "mean", "mean_dup", "max_dup", "starved", "incl_pct"
        );
        for p in &self.policies {
            let _ = writeln!(
                s,
                "{:<12} {:>7} {:>6} {:>6} {:>8.2} {:>9.2} {:>8} {:>8} {:>10.1}",
                p.policy.as_str(),
                p.mosaics,
                p.min_total,
                p.max_total,
                p.mean_total,
                p.mean_duplicates,
                p.max_duplicates,
                p.starvation_events,
                p.mean_inclusion_pct
            );
        }
        s.push('\n');
        let _ = writeln!(
            s,
            "{:<12} {:<12} {:>9} {:>9} {:>9}",
            "policy", "radar", "mean_pct", "min_pct", "max_pct"
        );
        for r in &self.radars {
            let _ = writeln!(
                s,
                "{:<12} {:<12} {:>9.1} {:>9.1} {:>9.1}",
                r.policy.as_str(),
                r.radar_id,
                r.mean_pct,
                r.min_pct,
                r.max_pct
            );
        }
        s
    }
}
