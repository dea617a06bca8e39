//! Radar producer and merge-site consumer state machines.
//!
//! Both are sans-IO: they consume packets and timer firings and return
//! [`AppEffect`]s for whatever owns them (the simulator, or a test) to carry
//! out.

pub mod consumer;
pub mod producer;
pub mod push;
pub mod rto;
pub mod trace;

use std::time::Duration;

pub use consumer::{
    Consumer, ConsumerConfig, ConsumerCounters, FetchJob, FileRecord, FollowMode, JobState,
    RadarStatus,
};
pub use producer::{GeneratedFile, RadarProducer, StoredFile};
pub use push::{push_segments, PushArrival, PushSink};
pub use rto::{RtoConfig, RttEstimator};
pub use trace::{load_request_log, load_trace, RequestLogEntry, TraceEntry};

use crate::packets::{DataPacket, InterestPacket};
use crate::time::SimTime;

/// Per-radar generation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarConfig {
    pub radar_id: String,
    pub round_duration: Duration,
    pub seqs_per_round: u64,
    pub store_capacity_files: usize,
    /// File size used when no trace supplies one.
    pub mean_file_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AppEffect {
    Interest(InterestPacket),
    Data(DataPacket),
    Timer { at: SimTime, token: u64 },
}
