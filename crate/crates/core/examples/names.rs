//! Radar file names: building, parsing, the round/sequence successor, the
//! initialization name and the legacy file names they replace.
//!
//! cargo run --example names

use ndn_radar::names::{
    current_round, make_data_name, next_data_name, InitInterestName, LegacyFileName, Name,
    RadarDataName, SeqStyle, Timestamp,
};

fn main() {
    let ts = Timestamp::new(2020, 9, 9, 0, 0, 56).expect("valid time");
    let n = make_data_name("addison", 15, 3, Some(ts));
    println!("data name      {n}");
    println!("alpha sequence {}", n.to_name_with(SeqStyle::Alpha));
    println!("segment 4      {}", n.with_segment(4));

    let parsed = RadarDataName::from_name(
        &Name::parse("/data/cleburne/_round=7/_seq=2/_segment=0").unwrap(),
    )
    .unwrap();
    println!(
        "parsed         radar {} round {} seq {} segment {:?}",
        parsed.radar_id, parsed.round, parsed.seq, parsed.segment
    );

    // three files per round: seq 3 wraps into the next round
    let mut f = make_data_name("addison", 15, 1, None);
    print!("successors    ");
    for _ in 0..5 {
        f = next_data_name(&f, 3);
        print!(" ({},{})", f.round, f.seq);
    }
    println!();

    println!(
        "round at t=140 s with 70 s rounds: {}",
        current_round(140, 70, None)
    );
    println!(
        "init name      {}",
        InitInterestName::new("fortworth").to_name()
    );

    let legacy = LegacyFileName::parse("addison.tx-20200909-000056.netcdf.gz").unwrap();
    println!(
        "legacy         {legacy} -> {}/{}",
        legacy.timestamp().date_string(),
        legacy.timestamp().time_string()
    );
}
