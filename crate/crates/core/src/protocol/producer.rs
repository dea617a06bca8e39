//! Radar-side state machine: file generation in rounds, the initialization
//! handshake, and segment service with next-file announcements.

use std::collections::{BTreeMap, VecDeque};
use std::time::Duration;

use bytes::Bytes;

use super::trace::TraceEntry;
use super::RadarConfig;
use crate::names::{make_data_name, next_data_name, Name, RadarDataName};
use crate::packets::{make_segment, DataPacket, InitResponse, InterestKind, InterestPacket};
use crate::time::SimTime;

#[derive(Debug, Clone)]
pub struct StoredFile {
    pub name: RadarDataName,
    pub content: Bytes,
    pub generated_at: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFile {
    pub name: RadarDataName,
    pub size_bytes: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProducerCounters {
    pub files_generated: u64,
    pub files_evicted: u64,
    pub init_replies: u64,
    pub segments_served: u64,
    pub held_interests: u64,
    pub unanswered_interests: u64,
}

#[derive(Debug)]
pub struct RadarProducer {
    config: RadarConfig,
    chunk_size: usize,
    piggyback: bool,
    current_round: u64,
    current_seq: u64,
    store: VecDeque<StoredFile>,
    last_generation: Option<SimTime>,
    next_generation: Option<SimTime>,
    trace_cursor: usize,
    /// Interests for the file about to be generated, held until it exists
    /// or the Interest expires.
    held: BTreeMap<Name, SimTime>,
    pattern: Bytes,
    pub counters: ProducerCounters,
}

impl RadarProducer {
    pub fn new(config: RadarConfig, chunk_size: usize, piggyback: bool) -> Self {
        assert!(
            config.seqs_per_round >= 1,
            "seqs_per_round must be at least 1"
        );
        RadarProducer {
            config,
            chunk_size,
            piggyback,
            current_round: 0,
            current_seq: 1,
            store: VecDeque::new(),
            last_generation: None,
            next_generation: None,
            trace_cursor: 0,
            held: BTreeMap::new(),
            pattern: Bytes::new(),
            counters: ProducerCounters::default(),
        }
    }

    pub fn config(&self) -> &RadarConfig {
        &self.config
    }

    pub fn radar_id(&self) -> &str {
        &self.config.radar_id
    }

    /// Round and sequence of the next file to be generated.
    pub fn position(&self) -> (u64, u64) {
        (self.current_round, self.current_seq)
    }

    pub fn upcoming_name(&self) -> RadarDataName {
        make_data_name(
            &self.config.radar_id,
            self.current_round,
            self.current_seq,
            None,
        )
    }

    pub fn store(&self) -> impl Iterator<Item = &StoredFile> {
        self.store.iter()
    }

    pub fn trace_cursor(&self) -> usize {
        self.trace_cursor
    }

    /// Records when the next generation is scheduled; `None` means no further
    /// file is planned.
    pub fn set_next_generation(&mut self, at: Option<SimTime>) {
        self.next_generation = at;
    }

    pub fn next_generation(&self) -> Option<SimTime> {
        self.next_generation
    }

    /// Starting point for the round counter, e.g. from [`crate::names::current_round`].
    pub fn set_position(&mut self, round: u64, seq: u64) {
        assert!(seq >= 1 && seq <= self.config.seqs_per_round);
        self.current_round = round;
        self.current_seq = seq;
    }

    /// Produces the next file. Size comes from the trace entry when given,
    /// otherwise from the configured mean. A trace entry may skip ahead in
    /// round/sequence but never backwards; entries that would are ignored,
    /// as are calls with a clock earlier than the previous generation.
    pub fn generate(&mut self, now: SimTime, trace: Option<&TraceEntry>) -> Option<GeneratedFile> {
        if self.last_generation.is_some_and(|t| now < t) {
            return None;
        }
        let (round, seq, size) = match trace {
            Some(e) => {
                if e.radar_id != self.config.radar_id
                    || (e.round, e.seq) < (self.current_round, self.current_seq)
                    || e.seq < 1
                    || e.seq > self.config.seqs_per_round
                {
                    return None;
                }
                self.trace_cursor += 1;
                (e.round, e.seq, e.size_bytes)
            }
            None => (
                self.current_round,
                self.current_seq,
                self.config.mean_file_bytes,
            ),
        };
        let name = make_data_name(&self.config.radar_id, round, seq, None);
        let offset = (round.wrapping_mul(31).wrapping_add(seq) % 251) as usize;
        let content = self.content(offset, size as usize);
        self.store.push_back(StoredFile {
            name: name.clone(),
            content,
            generated_at: now,
        });
        while self.store.len() > self.config.store_capacity_files.max(1) {
            self.store.pop_front();
            self.counters.files_evicted += 1;
        }
        let next = next_data_name(&name, self.config.seqs_per_round);
        self.current_round = next.round;
        self.current_seq = next.seq;
        self.last_generation = Some(now);
        self.counters.files_generated += 1;
        Some(GeneratedFile {
            name,
            size_bytes: size,
        })
    }

    /// Files are slices of one shared byte pattern; `offset` makes files
    /// differ from each other.
    fn content(&mut self, offset: usize, size: usize) -> Bytes {
        if self.pattern.len() < offset + size {
            let len = (offset + size).next_power_of_two();
            self.pattern = (0..len)
                .map(|i| (i % 251) as u8)
                .collect::<Vec<u8>>()
                .into();
        }
        self.pattern.slice(offset..offset + size)
    }

    /// Replies with the most recent file, or the upcoming one when nothing
    /// has been generated yet.
    pub fn on_init_interest(&mut self, interest: &InterestPacket) -> DataPacket {
        debug_assert_eq!(interest.kind, InterestKind::Init);
        self.counters.init_replies += 1;
        let current = self
            .store
            .back()
            .map_or_else(|| self.upcoming_name(), |f| f.name.clone());
        let response = InitResponse {
            radar_id: self.config.radar_id.clone(),
            current_round: current.round,
            current_seq: current.seq,
            number_of_files: self.store.len() as u64,
        };
        DataPacket::new(interest.name.clone(), response.encode(), None, None)
    }

    fn stored(&self, file: &RadarDataName) -> Option<&StoredFile> {
        self.store.iter().find(|f| &f.name == file)
    }

    /// The successor of `file`, if it is already stored or is the file the
    /// next scheduled generation will produce.
    pub fn known_next(&self, file: &RadarDataName) -> Option<RadarDataName> {
        let next = next_data_name(&file.file(), self.config.seqs_per_round);
        let scheduled = self.next_generation.is_some() && next == self.upcoming_name();
        (self.stored(&next).is_some() || scheduled).then_some(next)
    }

    fn serve(&mut self, requested: &RadarDataName) -> Option<DataPacket> {
        let file = requested.file();
        let stored = self.stored(&file)?;
        let piggyback = if self.piggyback {
            self.known_next(&file).map(|n| n.to_name())
        } else {
            None
        };
        let data = make_segment(
            &stored.name,
            &stored.content,
            self.chunk_size,
            requested.segment.unwrap_or(0),
            piggyback,
        )?;
        self.counters.segments_served += 1;
        Some(data)
    }

    /// Answers a data Interest from the store. An Interest for the file the
    /// next scheduled generation will produce is held instead and answered
    /// by [`RadarProducer::answer_held`]; anything else gets no reply.
    pub fn on_data_interest(
        &mut self,
        interest: &InterestPacket,
        now: SimTime,
    ) -> Option<DataPacket> {
        let Ok(requested) = RadarDataName::from_name(&interest.name) else {
            self.counters.unanswered_interests += 1;
            return None;
        };
        if requested.radar_id != self.config.radar_id {
            self.counters.unanswered_interests += 1;
            return None;
        }
        if let Some(data) = self.serve(&requested) {
            return Some(data);
        }
        if self.next_generation.is_some() && requested.file() == self.upcoming_name() {
            self.held
                .insert(interest.name.clone(), now + interest.lifetime);
            self.counters.held_interests += 1;
        } else {
            self.counters.unanswered_interests += 1;
        }
        None
    }

    /// Replies to held Interests that can now be served; drops expired ones.
    pub fn answer_held(&mut self, now: SimTime) -> Vec<DataPacket> {
        let held = std::mem::take(&mut self.held);
        let mut out = Vec::new();
        for (name, expiry) in held {
            if expiry <= now {
                continue;
            }
            let requested = RadarDataName::from_name(&name).expect("validated when held");
            match self.serve(&requested) {
                Some(d) => out.push(d),
                None => {
                    self.held.insert(name, expiry);
                }
            }
        }
        out
    }

    /// Spacing between files when no trace drives generation.
    pub fn uniform_spacing(&self) -> Duration {
        self.config.round_duration / self.config.seqs_per_round as u32
    }
}
