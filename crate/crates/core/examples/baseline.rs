//! The six-radar baseline: one round from every radar on lossless links,
//! repeated with different seeds. Prints per-radar download times.
//!
//! cargo run --release --example baseline -- [reps]

use ndn_radar::runner::{run_scenario, summarize, summary_text, RunOptions, Scenario};

fn main() {
    let reps = std::env::args()
        .nth(1)
        .map(|r| r.parse().expect("repetition count"));
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/baseline.toml");
    let scenario = Scenario::load(path.as_ref()).expect("bundled scenario loads");
    let result = run_scenario(
        &scenario,
        &RunOptions {
            reps,
            ..RunOptions::default()
        },
    );
    let rows = summarize(&result).expect("repetitions completed");
    print!("{}", summary_text(&scenario.name, &rows));

    let rb = result.reps.iter().flat_map(|r| &r.round_based);
    let totals: Vec<u64> = rb.map(|m| m.total_files).collect();
    println!("round-based mosaic sizes: {totals:?}");
}
