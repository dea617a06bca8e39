//! Added access-link delay and loss against per-radar download time.
//!
//! cargo run --release --example sweeps -- [rtt|loss] [reps]

use std::collections::BTreeMap;

use ndn_radar::runner::{run_scenario, summarize, RunOptions, Scenario};

fn main() {
    let mut args = std::env::args().skip(1);
    let which = args.next().unwrap_or_else(|| "rtt".into());
    let reps = args
        .next()
        .map(|r| r.parse().expect("repetition count"))
        .or(Some(5));
    let file = match which.as_str() {
        "rtt" => "rtt_sweep.toml",
        "loss" => "loss_sweep.toml",
        other => panic!("unknown sweep {other}; use rtt or loss"),
    };
    let path = format!("{}/scenarios/{file}", env!("CARGO_MANIFEST_DIR"));
    let scenario = Scenario::load(path.as_ref()).expect("bundled scenario loads");
    let result = run_scenario(
        &scenario,
        &RunOptions {
            reps,
            ..RunOptions::default()
        },
    );
    let rows = summarize(&result).expect("repetitions completed");

    let points: Vec<String> = result.points.iter().map(|p| p.label()).collect();
    let mut table: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &rows {
        table
            .entry(&r.radar_id)
            .or_default()
            .push((r.mean_download_s, r.stddev_download_s));
    }
    println!(
        "mean (stddev) download seconds over {} reps",
        result.repetitions
    );
    print!("{:<12}", "radar");
    for p in &points {
        print!("{p:>24}");
    }
    println!();
    for (radar, cells) in table {
        print!("{radar:<12}");
        for (m, s) in cells {
            print!("{:>24}", format!("{m:.3} ({s:.3})"));
        }
        println!();
    }
}
