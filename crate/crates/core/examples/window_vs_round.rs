//! Ten minutes of unsynchronized radars. Files pushed as they are made feed
//! time-window mosaics of several lengths; files pulled by name feed
//! round-based mosaics.
//!
//! cargo run --release --example window_vs_round -- [reps]

use ndn_radar::mosaic::Policy;
use ndn_radar::runner::{comparisons, run_scenario, RunOptions, Scenario};

fn main() {
    let reps = std::env::args()
        .nth(1)
        .map(|r| r.parse().expect("repetition count"))
        .or(Some(5));
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/window_vs_round.toml"
    );
    let scenario = Scenario::load(path.as_ref()).expect("bundled scenario loads");
    let result = run_scenario(
        &scenario,
        &RunOptions {
            reps,
            ..RunOptions::default()
        },
    );

    println!(
        "{:>8} {:>10} {:>8} {:>8} {:>11} {:>9}  lowest radar",
        "window", "policy", "min", "max", "mean", "dups"
    );
    for (_, window, table) in comparisons(&result) {
        for p in &table.policies {
            let low = table
                .radars
                .iter()
                .filter(|r| r.policy == p.policy)
                .min_by(|a, b| a.mean_pct.total_cmp(&b.mean_pct))
                .map(|r| format!("{} {:.0}%", r.radar_id, r.mean_pct))
                .unwrap_or_default();
            let label = match p.policy {
                Policy::TimeWindow => "window",
                Policy::RoundBased => "round",
            };
            println!(
                "{window:>7}s {label:>10} {:>8} {:>8} {:>11.2} {:>9.2}  {low}",
                p.min_total, p.max_total, p.mean_total, p.mean_duplicates
            );
        }
    }
}
