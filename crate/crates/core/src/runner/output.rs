//! Result files and summaries.
//!
//! Floats are printed with fixed precision so that identical runs produce
//! byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::{ScenarioResult, SweepPoint};
use super::RunError;
use crate::mosaic::{compare_policies, ComparisonTable, MosaicReport};
use crate::simnet::FileStatus;

pub const FAILED_MARKER: &str = "FAILED";

fn opt_secs(t: Option<crate::time::SimTime>) -> String {
    t.map_or_else(String::new, |t| format!("{:.6}", t.as_secs_f64()))
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v}"))
}

/// Per-radar download-time statistics at one sweep point. Every number
/// names the repetition and seed it came from, or the seed range it
/// aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub point: String,
    pub extra_delay_ms: f64,
    pub loss_prob: String,
    pub radar_id: String,
    pub reps: u32,
    pub first_seed: u64,
    pub last_seed: u64,
    pub files_done: u64,
    pub files_failed: u64,
    pub mean_download_s: f64,
    pub stddev_download_s: f64,
    pub min_download_s: f64,
    pub min_rep: u32,
    pub min_seed: u64,
    pub max_download_s: f64,
    pub max_rep: u32,
    pub max_seed: u64,
}

/// Mean and sample standard deviation.
pub fn mean_stddev(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

pub fn summarize(result: &ScenarioResult) -> Result<Vec<SummaryRow>, RunError> {
    let completed = result.reps.iter().filter(|r| r.abort.is_none()).count();
    if completed == 0 {
        return Err(RunError::NoCompletedReps);
    }
    let mut rows = Vec::new();
    for point in &result.points {
        let reps: Vec<_> = result
            .reps_at(point.index)
            .filter(|r| r.abort.is_none())
            .collect();
        if reps.is_empty() {
            continue;
        }
        let first_seed = reps.iter().map(|r| r.seed).min().unwrap();
        let last_seed = reps.iter().map(|r| r.seed).max().unwrap();
        for radar in result.seqs_per_round.keys() {
            // (download time, rep, seed)
            let mut samples: Vec<(f64, u32, u64)> = Vec::new();
            let mut failed = 0;
            for r in &reps {
                let Some(m) = r.primary() else { continue };
                for f in m.files.iter().filter(|f| &f.name.radar_id == radar) {
                    match (f.status, f.download_time()) {
                        (FileStatus::Done, Some(d)) => {
                            samples.push((d.as_secs_f64(), r.rep, r.seed))
                        }
                        (FileStatus::Failed, _) => failed += 1,
                        _ => {}
                    }
                }
            }
            let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let (mean, sd) = mean_stddev(&values);
            let min = samples.iter().copied().min_by(|a, b| a.0.total_cmp(&b.0));
            let max = samples.iter().copied().max_by(|a, b| a.0.total_cmp(&b.0));
            rows.push(SummaryRow {
                point: point.label(),
                extra_delay_ms: point.extra_delay_ms,
                loss_prob: opt_f64(point.loss_prob),
                radar_id: radar.clone(),
                reps: reps.len() as u32,
                first_seed,
                last_seed,
                files_done: samples.len() as u64,
                files_failed: failed,
                mean_download_s: round6(mean),
                stddev_download_s: round6(sd),
                min_download_s: min.map_or(f64::NAN, |m| round6(m.0)),
                min_rep: min.map_or(0, |m| m.1),
                min_seed: min.map_or(0, |m| m.2),
                max_download_s: max.map_or(f64::NAN, |m| round6(m.0)),
                max_rep: max.map_or(0, |m| m.1),
                max_seed: max.map_or(0, |m| m.2),
            });
        }
    }
    Ok(rows)
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
}

pub fn summary_text(scenario: &str, rows: &[SummaryRow]) -> String {
    let mut s = format!("scenario {scenario}: download time per radar (seconds)\n\n");
    let _ = writeln!(
        s,
        "{:<26} {:<12} {:>5} {:>6} {:>10} {:>10} {:>10} {:>10}  seeds",
        "point", "radar", "done", "failed", "mean", "stddev", "min", "max"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<26} {:<12} {:>5} {:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}  {}-{}",
            r.point,
            r.radar_id,
            r.files_done,
            r.files_failed,
            r.mean_download_s,
            r.stddev_download_s,
            r.min_download_s,
            r.max_download_s,
            r.first_seed,
            r.last_seed
        );
    }
    s
}

fn files_csv(result: &ScenarioResult) -> String {
    let mut s = String::from(
        "point,rep,seed,transport,radar_id,round,seq,size_bytes,generated_s,request_time_s,completion_time_s,download_time_s,retransmissions,status\n",
    );
    for r in &result.reps {
        let point = &result.points[r.point].label();
        for (transport, m) in [("pull", &r.pull), ("push", &r.push)] {
            let Some(m) = m else { continue };
            for f in &m.files {
                let _ = writeln!(
                    s,
                    "{point},{},{},{transport},{},{},{},{},{:.6},{},{},{},{},{}",
                    r.rep,
                    r.seed,
                    f.name.radar_id,
                    f.name.round,
                    f.name.seq,
                    f.size_bytes,
                    f.generated_at.as_secs_f64(),
                    opt_secs(f.request_time),
                    opt_secs(f.completion_time),
                    f.download_time()
                        .map_or_else(String::new, |d| format!("{:.6}", d.as_secs_f64())),
                    f.retransmissions,
                    f.status.as_str()
                );
            }
        }
    }
    s
}

fn nodes_csv(result: &ScenarioResult) -> String {
    let mut s = String::from("point,rep,seed,transport,node_id,role,counter,value\n");
    for r in &result.reps {
        let point = &result.points[r.point].label();
        for (transport, m) in [("pull", &r.pull), ("push", &r.push)] {
            let Some(m) = m else { continue };
            for n in &m.nodes {
                for (k, v) in &n.counters {
                    let _ = writeln!(
                        s,
                        "{point},{},{},{transport},{},{},{k},{v}",
                        r.rep, r.seed, n.node_id, n.role
                    );
                }
            }
        }
    }
    s
}

#[derive(Serialize)]
struct MosaicRecord<'a> {
    point: String,
    rep: u32,
    seed: u64,
    window_s: Option<f64>,
    #[serde(flatten)]
    report: &'a MosaicReport,
}

fn mosaics_json(result: &ScenarioResult) -> String {
    let mut records = Vec::new();
    for r in &result.reps {
        let point = result.points[r.point].label();
        for w in &r.time_window {
            for m in &w.reports {
                records.push(MosaicRecord {
                    point: point.clone(),
                    rep: r.rep,
                    seed: r.seed,
                    window_s: Some(w.window_s),
                    report: m,
                });
            }
        }
        for m in &r.round_based {
            records.push(MosaicRecord {
                point: point.clone(),
                rep: r.rep,
                seed: r.seed,
                window_s: None,
                report: m,
            });
        }
    }
    serde_json::to_string_pretty(&records).expect("serializable") + "\n"
}

/// Policy comparison per (sweep point, window length), over all reps.
pub fn comparisons(result: &ScenarioResult) -> Vec<(SweepPoint, f64, ComparisonTable)> {
    let mut out = Vec::new();
    for point in &result.points {
        let reps: Vec<_> = result
            .reps_at(point.index)
            .filter(|r| r.abort.is_none())
            .collect();
        let rb: Vec<MosaicReport> = reps
            .iter()
            .flat_map(|r| r.round_based.iter().cloned())
            .collect();
        let mut windows: BTreeMap<u64, (f64, Vec<MosaicReport>)> = BTreeMap::new();
        for r in &reps {
            for w in &r.time_window {
                windows
                    .entry(w.window_s.to_bits())
                    .or_insert_with(|| (w.window_s, Vec::new()))
                    .1
                    .extend(w.reports.iter().cloned());
            }
        }
        let mut ws: Vec<(f64, Vec<MosaicReport>)> = windows.into_values().collect();
        ws.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (w, tw) in ws {
            out.push((point.clone(), w, compare_policies(&tw, &rb)));
        }
    }
    out
}

fn comparison_files(result: &ScenarioResult) -> (String, String, String) {
    let mut csv = String::from(
        "point,window_s,policy,mosaics,min_total,max_total,mean_total,mean_duplicates,max_duplicates,starvation_events,mean_inclusion_pct\n",
    );
    let mut incl = String::from(
        "point,window_s,policy,radar_id,mean_inclusion_pct,min_inclusion_pct,max_inclusion_pct\n",
    );
    let mut text = String::new();
    for (point, w, table) in comparisons(result) {
        let label = point.label();
        for p in &table.policies {
            let _ = writeln!(
                csv,
                "{label},{w},{},{},{},{},{:.3},{:.3},{},{},{:.3}",
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
        for r in &table.radars {
            let _ = writeln!(
                incl,
                "{label},{w},{},{},{:.3},{:.3},{:.3}",
                r.policy.as_str(),
                r.radar_id,
                r.mean_pct,
                r.min_pct,
                r.max_pct
            );
        }
        let _ = writeln!(text, "== {label}, window {w} s ==");
        text.push_str(&table.to_text());
        text.push('\n');
    }
    let incomplete: usize = result.reps.iter().map(|r| r.incomplete.len()).sum();
    let _ = writeln!(text, "incomplete round-based mosaics: {incomplete}");
    for r in &result.reps {
        for i in &r.incomplete {
            let label = result.points[r.point].label();
            let _ = writeln!(text, "  {label} rep {} seed {}: {i}", r.rep, r.seed);
        }
    }
    (csv, incl, text)
}

/// Writes every result file into `dir`. When some repetitions aborted, the
/// remaining output is still written, next to a failure marker.
pub fn write_outputs(result: &ScenarioResult, dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| RunError::io(&p, e))
    };
    let marker = dir.join(FAILED_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| RunError::io(&marker, e))?;
    }
    write("files.csv", &files_csv(result))?;
    write("nodes.csv", &nodes_csv(result))?;
    let has_mosaics = result.reps.iter().any(|r| {
        !r.time_window.is_empty() || !r.round_based.is_empty() || !r.incomplete.is_empty()
    });
    if has_mosaics {
        write("mosaics.json", &mosaics_json(result))?;
        let (csv, incl, text) = comparison_files(result);
        write("comparison.csv", &csv)?;
        write("inclusion.csv", &incl)?;
        write("comparison.txt", &text)?;
    }
    let aborted = result.aborted();
    if !aborted.is_empty() {
        let mut body = String::new();
        for r in &aborted {
            let _ = writeln!(
                body,
                "{} rep {} seed {}: {}",
                result.points[r.point].label(),
                r.rep,
                r.seed,
                r.abort.as_deref().unwrap_or("")
            );
        }
        write(FAILED_MARKER, &body)?;
    }
    let rows = summarize(result)?;
    write("summary.csv", &summary_csv(&rows))?;
    write("summary.txt", &summary_text(&result.scenario, &rows))?;
    Ok(())
}

fn read_summary(dir: &Path) -> Result<Vec<SummaryRow>, RunError> {
    let p = dir.join("summary.csv");
    let mut reader = csv::Reader::from_path(&p).map_err(|e| RunError::Summary {
        path: p.display().to_string(),
        message: e.to_string(),
    })?;
    reader
        .deserialize()
        .collect::<Result<Vec<SummaryRow>, _>>()
        .map_err(|e| RunError::Summary {
            path: p.display().to_string(),
            message: e.to_string(),
        })
}

/// Side-by-side mean download times of two output directories, matched by
/// sweep point and radar.
pub fn compare_dirs(a: &Path, b: &Path) -> Result<String, RunError> {
    let ra = read_summary(a)?;
    let rb = read_summary(b)?;
    let index: BTreeMap<(&str, &str), &SummaryRow> = rb
        .iter()
        .map(|r| ((r.point.as_str(), r.radar_id.as_str()), r))
        .collect();
    let mut s = String::new();
    let _ = writeln!(s, "a: {}\nb: {}\n", a.display(), b.display());
    let _ = writeln!(
        s,
        "{:<26} {:<12} {:>10} {:>10} {:>10} {:>8}",
        "point", "radar", "mean_a", "mean_b", "delta", "pct"
    );
    let mut matched = 0;
    for r in &ra {
        let Some(o) = index.get(&(r.point.as_str(), r.radar_id.as_str())) else {
            let _ = writeln!(
                s,
                "{:<26} {:<12} {:>10.4} {:>10}",
                r.point, r.radar_id, r.mean_download_s, "-"
            );
            continue;
        };
        matched += 1;
        let delta = o.mean_download_s - r.mean_download_s;
        let pct = if r.mean_download_s != 0.0 {
            100.0 * delta / r.mean_download_s
        } else {
            0.0
        };
        let _ = writeln!(
            s,
            "{:<26} {:<12} {:>10.4} {:>10.4} {:>+10.4} {:>+7.1}%",
            r.point, r.radar_id, r.mean_download_s, o.mean_download_s, delta, pct
        );
    }
    let _ = writeln!(s, "\n{matched} of {} rows matched", ra.len());
    Ok(s)
}
