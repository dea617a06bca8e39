//! The producer and consumer state machines without a network: the
//! consumer asks a radar for its state, fetches the announced file, follows
//! the piggybacked name to a file that does not exist yet, and gets it as
//! soon as the radar produces it.
//!
//! cargo run --example handshake

use std::collections::VecDeque;
use std::time::Duration;

use ndn_radar::packets::InterestKind;
use ndn_radar::protocol::{AppEffect, Consumer, ConsumerConfig, RadarConfig, RadarProducer};
use ndn_radar::simnet::rng_stream;
use ndn_radar::time::SimTime;

/// Delivers effects with zero latency until nothing is left to send.
fn exchange(
    now: SimTime,
    radar: &mut RadarProducer,
    consumer: &mut Consumer,
    effects: Vec<AppEffect>,
) {
    let mut pending: VecDeque<AppEffect> = effects.into();
    while let Some(effect) = pending.pop_front() {
        let AppEffect::Interest(i) = effect else {
            continue;
        };
        let reply = match i.kind {
            InterestKind::Init => Some(radar.on_init_interest(&i)),
            InterestKind::Data => radar.on_data_interest(&i, now),
        };
        match reply {
            Some(d) => {
                if let Some(next) = &d.piggyback_next {
                    if d.name.to_string().ends_with("_segment=0") {
                        println!("  {} announces {next}", d.name);
                    }
                }
                pending.extend(consumer.on_data(now, d));
            }
            None => println!("  {} held by the radar", i.name),
        }
    }
}

fn main() {
    let mut radar = RadarProducer::new(
        RadarConfig {
            radar_id: "midlothian".into(),
            round_duration: Duration::from_secs(50),
            seqs_per_round: 2,
            store_capacity_files: 8,
            mean_file_bytes: 40_000,
        },
        8192,
        true,
    );
    radar.set_position(3, 1);
    for t in [0.0, 25.0, 50.0] {
        radar.generate(SimTime::from_secs_f64(t), None);
    }
    radar.set_next_generation(Some(SimTime::from_secs_f64(62.0)));

    let mut consumer = Consumer::new(ConsumerConfig::default(), rng_stream(1, 10));
    let t = SimTime::from_secs_f64(60.0);
    println!("t=60 s, consumer bootstraps");
    let effects = consumer.bootstrap(t, &["midlothian".to_string()]);
    exchange(t, &mut radar, &mut consumer, effects);

    let t = SimTime::from_secs_f64(62.0);
    println!("t=62 s, radar generates {}", radar.upcoming_name());
    radar.generate(t, None);
    radar.set_next_generation(Some(SimTime::from_secs_f64(87.0)));
    for d in radar.answer_held(t) {
        let effects = consumer.on_data(t, d);
        exchange(t, &mut radar, &mut consumer, effects);
    }

    for r in consumer.records() {
        println!(
            "{} {:?}, {} bytes, finished at {}",
            r.name,
            r.state,
            r.size_bytes,
            r.finished_at
                .map_or("-".into(), |t| format!("{:.0} s", t.as_secs_f64()))
        );
    }
}
