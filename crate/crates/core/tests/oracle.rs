//! Single-link transfers against the closed-form pipeline oracle.

mod support;

use std::time::Duration;

use ndn_radar::simnet::SimConfig;
use support::*;

fn measured(size: u64, mbps: f64, delay_ms: f64, window: usize) -> f64 {
    let mut config = SimConfig {
        piggyback: false,
        ..SimConfig::default()
    };
    config.consumer.window = window;
    let (m, _) = one_file(
        &single_link(mbps, delay_ms, 0.0),
        "r",
        size,
        config,
        1,
        120.0,
    );
    done_secs(only_file(&m))
}

fn predicted(size: u64, mbps: f64, delay_ms: f64, window: usize) -> f64 {
    pipeline_completion(
        size as usize,
        8192,
        mbps * 1e6,
        Duration::from_secs_f64(delay_ms / 1e3),
        window,
        interest_bytes("r", 0),
    )
}

#[test]
fn grid_matches_closed_form() {
    for size in [8_000u64, 200_000, 12_000_000] {
        for mbps in [10.0, 50.0] {
            for window in [1usize, 10] {
                for delay in [2.0, 20.0] {
                    let m = measured(size, mbps, delay, window);
                    let p = predicted(size, mbps, delay, window);
                    let err = (m - p).abs() / p;
                    println!("{size} B {mbps} Mbps w={window} d={delay} ms: sim {m:.6} s, oracle {p:.6} s, err {:.3}%", err * 100.0);
                    assert!(err <= 0.05, "{size} {mbps} {window} {delay}: {m} vs {p}");
                }
            }
        }
    }
}

#[test]
fn single_segment_is_one_round_trip() {
    // 1000 B payload: 64 + 1000 bytes of Data, one Interest, 10 ms each way
    let m = measured(1000, 10.0, 10.0, 10);
    let i = interest_bytes("r", 0) as f64;
    let exact = 0.020 + (i + 1064.0) * 8.0 / 10e6;
    assert!((m - exact).abs() < 1e-6, "{m} vs {exact}");
}

#[test]
fn window_one_is_stop_and_wait() {
    // every segment costs a full turn: k * (tx_i + 2d + tx_d)
    let k = 5u64;
    let m = measured(k * 8192, 50.0, 5.0, 1);
    let tx_i = interest_bytes("r", 0) as f64 * 8.0 / 50e6;
    let tx_d = (64.0 + 8192.0) * 8.0 / 50e6;
    let exact = k as f64 * (tx_i + 0.010 + tx_d);
    assert!((m - exact).abs() / exact < 0.001, "{m} vs {exact}");
}
