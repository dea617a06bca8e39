//! Assembling mosaics from file arrivals: fixed time windows smear rounds
//! together and starve slow radars, while collecting by round number gets
//! exactly one round from every radar.
//!
//! cargo run --example mosaics

use std::collections::BTreeMap;

use ndn_radar::mosaic::{
    compare_policies, round_based_collect, time_window_collect, ArrivalRecord,
};
use ndn_radar::names::make_data_name;

fn main() {
    let radars: BTreeMap<String, u64> = [("fast".to_string(), 3), ("slow".to_string(), 1)].into();

    // "fast" files land 20 s apart; "slow" files take 70 s to arrive
    let mut arrivals = Vec::new();
    for round in 0..4u64 {
        for seq in 1..=3 {
            let t = 60.0 * round as f64 + 20.0 * (seq - 1) as f64 + 1.0;
            arrivals.push(ArrivalRecord {
                name: make_data_name("fast", round, seq, None),
                arrival_time_s: t,
                size_bytes: 2_000_000,
            });
        }
        arrivals.push(ArrivalRecord {
            name: make_data_name("slow", round, 1, None),
            arrival_time_s: 60.0 * round as f64 + 70.0,
            size_bytes: 12_000_000,
        });
    }

    let tw = time_window_collect(&arrivals, 45.0, 45.0, &radars);
    println!("45 s windows:");
    for r in &tw {
        println!(
            "  [{:>5.1}, {:>5.1}) {} files, {} duplicates, starved {:?}",
            r.window_start_s.unwrap(),
            r.window_start_s.unwrap() + 45.0,
            r.total_files,
            r.duplicates,
            r.starved_radars
        );
    }

    let completed: Vec<_> = arrivals
        .iter()
        .map(|a| (a.name.clone(), a.arrival_time_s))
        .collect();
    let rb: Vec<_> = (0..4)
        .filter_map(|round| round_based_collect(&completed, round, &radars).ok())
        .collect();
    println!("by round:");
    for r in &rb {
        println!(
            "  round {} {} files, complete at {:.0} s",
            r.target_round.unwrap(),
            r.total_files,
            r.completion_time_s.unwrap()
        );
    }
    let partial: Vec<_> = completed
        .iter()
        .filter(|(n, _)| !(n.radar_id == "slow" && n.round == 3))
        .cloned()
        .collect();
    println!(
        "  {}",
        round_based_collect(&partial, 3, &radars).unwrap_err()
    );

    println!("\n{}", compare_policies(&tw, &rb).to_text());
}
