//! One forwarder driven by hand: longest-prefix routing, Interest
//! aggregation in the PIT, fan-out of the returning Data and a cache hit
//! for the next request.
//!
//! cargo run --example forwarder_cache

use std::time::Duration;

use bytes::Bytes;
use ndn_radar::forwarder::{Action, FaceId, Forwarder};
use ndn_radar::names::{make_data_name, Name};
use ndn_radar::packets::{DataPacket, InterestPacket};
use ndn_radar::time::SimTime;

fn show(step: &str, actions: &[Action]) {
    let list: Vec<String> = actions
        .iter()
        .map(|a| match a {
            Action::SendInterest { face, interest } => {
                format!("Interest {} -> {face}", interest.name)
            }
            Action::SendData { face, data } => format!("Data {} -> {face}", data.name),
        })
        .collect();
    println!(
        "{step:<28} {}",
        if list.is_empty() {
            "(nothing sent)".into()
        } else {
            list.join(", ")
        }
    );
}

fn main() {
    let upstream = FaceId(9);
    let mut fwd = Forwarder::new(4096);
    fwd.fib
        .add_route(&Name::parse("/data/denton").unwrap(), upstream, 1);

    let name = make_data_name("denton", 2, 1, None)
        .with_segment(0)
        .to_name();
    let interest = |nonce| InterestPacket::new(name.clone(), nonce, Duration::from_secs(4));
    let t = SimTime::from_millis;

    show(
        "consumer on face1 asks",
        &fwd.on_interest(t(0), interest(1), FaceId(1)).unwrap(),
    );
    show(
        "consumer on face2 asks",
        &fwd.on_interest(t(5), interest(2), FaceId(2)).unwrap(),
    );
    let data = DataPacket::new(
        name.clone(),
        Bytes::from_static(b"reflectivity"),
        Some(0),
        None,
    );
    show("Data arrives upstream", &fwd.on_data(t(40), data, upstream));
    show(
        "consumer on face3 asks",
        &fwd.on_interest(t(90), interest(3), FaceId(3)).unwrap(),
    );

    let other = InterestPacket::new(
        Name::parse("/data/unknown/x").unwrap(),
        4,
        Duration::from_secs(4),
    );
    println!(
        "{:<28} {}",
        "unrouted Interest",
        fwd.on_interest(t(95), other, FaceId(1)).unwrap_err()
    );

    for (k, v) in fwd.counters.rows() {
        if v > 0 {
            println!("  {k} = {v}");
        }
    }
}
