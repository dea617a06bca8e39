//! Sender-driven baseline: radars push every file to the merge site the
//! moment it is generated, without any request.

use std::collections::BTreeMap;

use super::producer::GeneratedFile;
use crate::names::RadarDataName;
use crate::packets::{segment_count, PushSegment};
use crate::time::SimTime;

/// Splits a freshly generated file into push segments.
pub fn push_segments(file: &GeneratedFile, chunk_size: usize) -> Vec<PushSegment> {
    let size = file.size_bytes as usize;
    let count = segment_count(size, chunk_size);
    (0..count)
        .map(|i| {
            let start = i as usize * chunk_size;
            PushSegment {
                file: file.name.clone(),
                index: i,
                final_block: count - 1,
                payload_len: size.saturating_sub(start).min(chunk_size),
                file_size: file.size_bytes,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushArrival {
    pub name: RadarDataName,
    pub arrival: SimTime,
    pub size_bytes: u64,
}

/// Collects pushed segments; a file arrives when its last missing segment
/// does.
#[derive(Debug, Default)]
pub struct PushSink {
    partial: BTreeMap<RadarDataName, (u64, u64)>,
    arrivals: Vec<PushArrival>,
}

impl PushSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn on_segment(&mut self, now: SimTime, seg: &PushSegment) -> Option<&PushArrival> {
        let entry = self
            .partial
            .entry(seg.file.clone())
            .or_insert((0, seg.final_block + 1));
        entry.0 += 1;
        if entry.0 < entry.1 {
            return None;
        }
        self.partial.remove(&seg.file);
        self.arrivals.push(PushArrival {
            name: seg.file.clone(),
            arrival: now,
            size_bytes: seg.file_size,
        });
        self.arrivals.last()
    }

    pub fn arrivals(&self) -> &[PushArrival] {
        &self.arrivals
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::make_data_name;

    #[test]
    fn file_arrives_with_last_segment() {
        let g = GeneratedFile {
            name: make_data_name("r", 0, 1, None),
            size_bytes: 20_000,
        };
        let segs = push_segments(&g, 8192);
        assert_eq!(
            segs.iter().map(|s| s.payload_len).collect::<Vec<_>>(),
            [8192, 8192, 3616]
        );
        let mut sink = PushSink::new();
        assert!(sink.on_segment(SimTime::from_millis(1), &segs[0]).is_none());
        assert!(sink.on_segment(SimTime::from_millis(2), &segs[2]).is_none());
        let a = sink.on_segment(SimTime::from_millis(3), &segs[1]).unwrap();
        assert_eq!(a.arrival, SimTime::from_millis(3));
        assert_eq!(a.size_bytes, 20_000);
    }

    #[test]
    fn empty_file_is_one_segment() {
        let g = GeneratedFile {
            name: make_data_name("r", 0, 1, None),
            size_bytes: 0,
        };
        let segs = push_segments(&g, 8192);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].payload_len, 0);
    }
}
