//! Splitting a file into Data segments, reassembling it, and the integrity
//! digest that covers payload and piggybacked next-file name.
//!
//! cargo run --example segments

use bytes::Bytes;
use ndn_radar::names::make_data_name;
use ndn_radar::packets::{
    attach_piggyback, segment_count, segment_file, verify_digest, DEFAULT_CHUNK_SIZE,
};

fn main() {
    let content: Bytes = (0..200_000u32)
        .map(|i| (i % 251) as u8)
        .collect::<Vec<u8>>()
        .into();
    let file = make_data_name("cleburne", 4, 2, None);
    let segs = segment_file(&file, &content, DEFAULT_CHUNK_SIZE);
    println!(
        "{} bytes in {} segments of {} (final block {:?}), {} bytes on the wire",
        content.len(),
        segment_count(content.len(), DEFAULT_CHUNK_SIZE),
        DEFAULT_CHUNK_SIZE,
        segs[0].final_block,
        segs.iter().map(|s| s.wire_size()).sum::<usize>()
    );

    let joined: Vec<u8> = segs
        .iter()
        .flat_map(|s| s.payload.iter().copied())
        .collect();
    println!("reassembled intact: {}", joined == content);

    let next = make_data_name("cleburne", 4, 3, None).to_name();
    let mut seg = attach_piggyback(segs[0].clone(), next);
    println!(
        "piggyback {} verifies: {}",
        seg.piggyback_next.as_ref().unwrap(),
        verify_digest(&seg)
    );

    let mut payload = seg.payload.to_vec();
    payload[10] ^= 0xff;
    seg.payload = payload.into();
    println!("after flipping one byte: {}", verify_digest(&seg));
}
