//! One file over one simulated link, compared against the bandwidth floor.
//!
//! cargo run --example single_transfer -- [size_bytes] [mbps] [delay_ms] [loss]

use ndn_radar::names::make_data_name;
use ndn_radar::protocol::{FollowMode, TraceEntry};
use ndn_radar::simnet::{SimConfig, Simulation, Topology};
use ndn_radar::time::SimTime;

fn main() {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let size = args.first().copied().unwrap_or(12_000_000.0) as u64;
    let mbps = args.get(1).copied().unwrap_or(10.0);
    let delay_ms = args.get(2).copied().unwrap_or(6.0);
    let loss = args.get(3).copied().unwrap_or(0.0);

    let topo = Topology::parse(
        &format!(
            "[[node]]\nid = \"fortworth\"\nrole = \"radar\"\nseqs_per_round = 1\nround_duration_s = 70\nmean_file_mb = 12\n\n\
             [[node]]\nid = \"noaa\"\nrole = \"consumer\"\n\n\
             [[link]]\na = \"fortworth\"\nb = \"noaa\"\nbandwidth_mbps = {mbps}\ndelay_ms = {delay_ms}\nloss = {loss}\n"
        ),
        "inline",
    )
    .expect("valid topology");

    let mut config = SimConfig::default();
    config.consumer.follow = FollowMode::Off;
    let mut sim = Simulation::new(&topo, config, 1);
    sim.load_generations(&[TraceEntry {
        epoch_seconds: 0.0,
        radar_id: "fortworth".into(),
        round: 0,
        seq: 1,
        size_bytes: size,
    }]);
    sim.schedule_requests(
        "noaa",
        &[(SimTime::ZERO, make_data_name("fortworth", 0, 1, None))],
    );
    let m = sim
        .run_until(SimTime::from_secs_f64(600.0))
        .expect("no livelock");

    let f = &m.files[0];
    let floor = size as f64 * 8.0 / (mbps * 1e6);
    match f.download_time() {
        Some(t) => println!(
            "{size} bytes at {mbps} Mbps, {delay_ms} ms, loss {loss}: {:.4} s ({:.1}% over the {floor:.4} s floor), {} retransmissions",
            t.as_secs_f64(),
            100.0 * (t.as_secs_f64() / floor - 1.0),
            f.retransmissions
        ),
        None => println!("transfer {}", f.status.as_str()),
    }
    println!("{} events simulated", m.events);
}
