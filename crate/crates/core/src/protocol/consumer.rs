//! Merge-site consumer: bootstraps against each radar, then fetches files as
//! windowed segment pipelines, following piggybacked next-file
//! announcements (or predicted names) to keep retrieval continuous.
//!
//! Several [`FetchJob`]s may run at once; they are interleaved by the event
//! loop that owns the consumer, not run on threads.

use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use bytes::{Bytes, BytesMut};
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::rto::{RtoConfig, RttEstimator};
use super::AppEffect;
use crate::names::{make_data_name, next_data_name, InitInterestName, Name, RadarDataName};
use crate::packets::{DataPacket, InitResponse, InterestPacket, DEFAULT_INTEREST_LIFETIME};
use crate::time::SimTime;

pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_MAX_RETRIES: u32 = 5;
pub const DEFAULT_INIT_RETRIES: u32 = 3;

/// How the consumer learns which file to fetch after the current one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FollowMode {
    /// Open a job as soon as a Data packet announces the next file.
    Piggyback,
    /// Open a job for the predicted next name once the current job ends.
    Predict,
    /// Fetch only what is explicitly requested.
    Off,
}

#[derive(Debug, Clone)]
pub struct ConsumerConfig {
    pub window: usize,
    pub max_retries: u32,
    pub init_retries: u32,
    pub interest_lifetime: Duration,
    /// How long a job may wait for its first segment (the file may not
    /// exist yet) before it is declared failed.
    pub max_wait: Duration,
    pub follow: FollowMode,
    pub rto: RtoConfig,
    /// Needed for name prediction.
    pub seqs_per_round: BTreeMap<String, u64>,
    /// Keep segment payloads of finished jobs so content can be reassembled.
    pub keep_payloads: bool,
}

impl Default for ConsumerConfig {
    fn default() -> Self {
        ConsumerConfig {
            window: DEFAULT_WINDOW,
            max_retries: DEFAULT_MAX_RETRIES,
            init_retries: DEFAULT_INIT_RETRIES,
            interest_lifetime: DEFAULT_INTEREST_LIFETIME,
            max_wait: Duration::from_secs(150),
            follow: FollowMode::Piggyback,
            rto: RtoConfig::default(),
            seqs_per_round: BTreeMap::new(),
            keep_payloads: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Copy)]
struct Outstanding {
    sent_at: SimTime,
    attempt: u32,
    retransmitted: bool,
}

/// Windowed retrieval of one file.
#[derive(Debug, Clone)]
pub struct FetchJob {
    pub file_name: RadarDataName,
    pub window: usize,
    pub received: BTreeMap<u64, Bytes>,
    pub final_block: Option<u64>,
    /// Timeout used for the most recent Interest of this job.
    pub rto: Duration,
    pub retries_per_segment: BTreeMap<u64, u32>,
    pub state: JobState,
    pub opened_at: SimTime,
    pub first_interest_at: Option<SimTime>,
    pub first_data_at: Option<SimTime>,
    pub finished_at: Option<SimTime>,
    /// Re-expressions after a segment timed out following the first Data.
    pub retransmissions: u32,
    /// Re-expressions while waiting for the file to appear.
    pub reexpressions: u32,
    pub bytes_received: u64,
    pub highest_requested: Option<u64>,
    outstanding: BTreeMap<u64, Outstanding>,
    next_segment: u64,
}

impl FetchJob {
    pub fn new(file_name: RadarDataName, window: usize, now: SimTime) -> FetchJob {
        assert!(window >= 1, "window must be at least 1");
        FetchJob {
            file_name: file_name.file(),
            window,
            received: BTreeMap::new(),
            final_block: None,
            rto: Duration::ZERO,
            retries_per_segment: BTreeMap::new(),
            state: JobState::Running,
            opened_at: now,
            first_interest_at: None,
            first_data_at: None,
            finished_at: None,
            retransmissions: 0,
            reexpressions: 0,
            bytes_received: 0,
            highest_requested: None,
            outstanding: BTreeMap::new(),
            next_segment: 0,
        }
    }

    pub fn in_flight(&self) -> usize {
        self.outstanding.len()
    }

    fn has(&self, seg: u64) -> bool {
        self.received.contains_key(&seg)
    }

    pub fn segments_received(&self) -> usize {
        self.received.len()
    }

    pub fn is_complete(&self) -> bool {
        self.final_block
            .is_some_and(|fb| self.received.len() as u64 == fb + 1)
    }

    /// Segments to request now. Until the final block is known only segment
    /// 0 is requested; afterwards the window is filled in index order.
    fn segments_to_request(&mut self) -> Vec<u64> {
        let mut out = Vec::new();
        match self.final_block {
            None => {
                if !self.has(0) && !self.outstanding.contains_key(&0) {
                    out.push(0);
                }
                self.next_segment = self.next_segment.max(1);
            }
            Some(fb) => {
                while self.outstanding.len() + out.len() < self.window && self.next_segment <= fb {
                    let s = self.next_segment;
                    self.next_segment += 1;
                    if !self.has(s) && !self.outstanding.contains_key(&s) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    /// Reassembled content, if the job finished and payloads were kept.
    pub fn content(&self) -> Option<Bytes> {
        if !self.is_complete() {
            return None;
        }
        let mut buf = BytesMut::with_capacity(self.bytes_received as usize);
        for p in self.received.values() {
            buf.extend_from_slice(p);
        }
        (buf.len() as u64 == self.bytes_received).then(|| buf.freeze())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadarStatus {
    Initializing { attempt: u32 },
    Active,
    Offline,
}

#[derive(Debug, Clone)]
struct RadarSession {
    status: RadarStatus,
    init_sent_at: SimTime,
    rtt: RttEstimator,
}

#[derive(Debug, Clone)]
enum TimerTarget {
    Segment {
        file: RadarDataName,
        segment: u64,
        attempt: u32,
    },
    Init {
        radar: String,
        attempt: u32,
    },
    Open(RadarDataName),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConsumerCounters {
    pub interests_sent: u64,
    pub data_accepted: u64,
    pub duplicate_data: u64,
    pub digest_failures: u64,
    pub init_timeouts: u64,
    pub reinits: u64,
    pub jobs_done: u64,
    pub jobs_failed: u64,
}

/// Outcome record for one fetched (or abandoned) file.
#[derive(Debug, Clone, PartialEq)]
pub struct FileRecord {
    pub name: RadarDataName,
    pub size_bytes: u64,
    pub opened_at: SimTime,
    pub first_interest_at: Option<SimTime>,
    pub finished_at: Option<SimTime>,
    pub retransmissions: u32,
    pub state: JobState,
}

#[derive(Debug)]
pub struct Consumer {
    config: ConsumerConfig,
    radars: BTreeMap<String, RadarSession>,
    jobs: BTreeMap<RadarDataName, FetchJob>,
    timers: HashMap<u64, TimerTarget>,
    next_token: u64,
    rng: ChaCha8Rng,
    pub counters: ConsumerCounters,
}

impl Consumer {
    pub fn new(config: ConsumerConfig, rng: ChaCha8Rng) -> Consumer {
        Consumer {
            config,
            radars: BTreeMap::new(),
            jobs: BTreeMap::new(),
            timers: HashMap::new(),
            next_token: 1,
            rng,
            counters: ConsumerCounters::default(),
        }
    }

    pub fn config(&self) -> &ConsumerConfig {
        &self.config
    }

    pub fn jobs(&self) -> impl Iterator<Item = &FetchJob> {
        self.jobs.values()
    }

    pub fn job(&self, file: &RadarDataName) -> Option<&FetchJob> {
        self.jobs.get(&file.file())
    }

    pub fn radar_status(&self, radar: &str) -> Option<RadarStatus> {
        self.radars.get(radar).map(|s| s.status)
    }

    pub fn offline_radars(&self) -> Vec<String> {
        self.radars
            .iter()
            .filter(|(_, s)| s.status == RadarStatus::Offline)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn srtt(&self, radar: &str) -> Option<Duration> {
        self.radars.get(radar).map(|s| s.rtt.srtt())
    }

    pub fn rto(&self, radar: &str) -> Duration {
        self.radars
            .get(radar)
            .map_or_else(|| RttEstimator::new(self.config.rto).rto(), |s| s.rtt.rto())
    }

    pub fn records(&self) -> Vec<FileRecord> {
        self.jobs
            .values()
            .map(|j| FileRecord {
                name: j.file_name.clone(),
                size_bytes: j.bytes_received,
                opened_at: j.opened_at,
                first_interest_at: j.first_interest_at,
                finished_at: j.finished_at,
                retransmissions: j.retransmissions,
                state: j.state,
            })
            .collect()
    }

    fn timer(&mut self, at: SimTime, target: TimerTarget, out: &mut Vec<AppEffect>) {
        let token = self.next_token;
        self.next_token += 1;
        self.timers.insert(token, target);
        out.push(AppEffect::Timer { at, token });
    }

    fn session(&mut self, radar: &str) -> &mut RadarSession {
        let rto = self.config.rto;
        self.radars
            .entry(radar.to_string())
            .or_insert_with(|| RadarSession {
                status: RadarStatus::Active,
                init_sent_at: SimTime::ZERO,
                rtt: RttEstimator::new(rto),
            })
    }

    /// Sends one initialization Interest per radar not already known.
    pub fn bootstrap(&mut self, now: SimTime, radars: &[String]) -> Vec<AppEffect> {
        let mut out = Vec::new();
        for radar in radars {
            if self.radars.contains_key(radar) {
                continue;
            }
            self.send_init(now, radar, 0, &mut out);
        }
        out
    }

    fn send_init(&mut self, now: SimTime, radar: &str, attempt: u32, out: &mut Vec<AppEffect>) {
        let session = self.session(radar);
        session.status = RadarStatus::Initializing { attempt };
        session.init_sent_at = now;
        let timeout = session.rtt.rto();
        let name = InitInterestName::new(radar).to_name();
        let interest =
            InterestPacket::new(name, self.rng.next_u64(), self.config.interest_lifetime);
        self.counters.interests_sent += 1;
        out.push(AppEffect::Interest(interest));
        self.timer(
            now + timeout,
            TimerTarget::Init {
                radar: radar.to_string(),
                attempt,
            },
            out,
        );
    }

    /// Schedules explicit requests, e.g. replayed from an access log.
    pub fn schedule_requests(&mut self, requests: &[(SimTime, RadarDataName)]) -> Vec<AppEffect> {
        let mut out = Vec::new();
        for (at, name) in requests {
            self.timer(*at, TimerTarget::Open(name.file()), &mut out);
        }
        out
    }

    /// Opens a job for `file` unless one already exists for it.
    pub fn open_job(&mut self, now: SimTime, file: &RadarDataName) -> Vec<AppEffect> {
        let mut out = Vec::new();
        self.open_job_into(now, file, &mut out);
        out
    }

    fn open_job_into(&mut self, now: SimTime, file: &RadarDataName, out: &mut Vec<AppEffect>) {
        let file = file.file();
        if self.jobs.contains_key(&file) {
            return;
        }
        self.session(&file.radar_id);
        self.jobs.insert(
            file.clone(),
            FetchJob::new(file.clone(), self.config.window, now),
        );
        self.pump(now, &file, out);
    }

    /// Reacts to an announced next file: a new concurrent job, unless the
    /// file is already known.
    pub fn on_piggyback(&mut self, now: SimTime, next: &Name) -> Vec<AppEffect> {
        let mut out = Vec::new();
        if let Ok(file) = RadarDataName::from_name(next) {
            self.open_job_into(now, &file, &mut out);
        }
        out
    }

    fn pump(&mut self, now: SimTime, file: &RadarDataName, out: &mut Vec<AppEffect>) {
        let Some(job) = self.jobs.get_mut(file) else {
            return;
        };
        if job.state != JobState::Running {
            return;
        }
        for seg in job.segments_to_request() {
            self.send_segment(now, file, seg, 0, out);
        }
    }

    fn send_segment(
        &mut self,
        now: SimTime,
        file: &RadarDataName,
        segment: u64,
        attempt: u32,
        out: &mut Vec<AppEffect>,
    ) {
        let rto = self.rto(&file.radar_id);
        let lifetime = self.config.interest_lifetime;
        let job = self.jobs.get_mut(file).expect("job exists");
        // a file that has not produced any Data yet may simply not exist yet
        let timeout = if job.first_data_at.is_none() {
            lifetime
        } else {
            rto
        };
        job.rto = timeout;
        job.first_interest_at.get_or_insert(now);
        job.highest_requested = job.highest_requested.max(Some(segment));
        job.outstanding.insert(
            segment,
            Outstanding {
                sent_at: now,
                attempt,
                retransmitted: attempt > 0,
            },
        );
        let name = file.with_segment(segment).to_name();
        let interest = InterestPacket::new(name, self.rng.next_u64(), lifetime);
        self.counters.interests_sent += 1;
        out.push(AppEffect::Interest(interest));
        self.timer(
            now + timeout,
            TimerTarget::Segment {
                file: file.clone(),
                segment,
                attempt,
            },
            out,
        );
    }

    pub fn on_timer(&mut self, now: SimTime, token: u64) -> Vec<AppEffect> {
        let mut out = Vec::new();
        let Some(target) = self.timers.remove(&token) else {
            return out;
        };
        match target {
            TimerTarget::Open(file) => self.open_job_into(now, &file, &mut out),
            TimerTarget::Init { radar, attempt } => {
                let Some(session) = self.radars.get_mut(&radar) else {
                    return out;
                };
                if session.status != (RadarStatus::Initializing { attempt }) {
                    return out;
                }
                if attempt >= self.config.init_retries {
                    session.status = RadarStatus::Offline;
                    self.counters.init_timeouts += 1;
                    log::debug!("radar {radar} offline after {attempt} init retransmissions");
                } else {
                    self.send_init(now, &radar, attempt + 1, &mut out);
                }
            }
            TimerTarget::Segment {
                file,
                segment,
                attempt,
            } => {
                let max_wait = self.config.max_wait;
                let max_retries = self.config.max_retries;
                let Some(job) = self.jobs.get_mut(&file) else {
                    return out;
                };
                let current = job.outstanding.get(&segment).map(|o| o.attempt);
                if job.state != JobState::Running || current != Some(attempt) {
                    return out;
                }
                if job.first_data_at.is_none() {
                    if now >= job.opened_at + max_wait {
                        self.finish(now, &file, JobState::Failed, &mut out);
                        return out;
                    }
                    job.reexpressions += 1;
                } else {
                    let retries = job.retries_per_segment.entry(segment).or_insert(0);
                    *retries += 1;
                    if *retries > max_retries {
                        self.finish(now, &file, JobState::Failed, &mut out);
                        return out;
                    }
                    job.retransmissions += 1;
                }
                self.send_segment(now, &file, segment, attempt + 1, &mut out);
            }
        }
        out
    }

    pub fn on_data(&mut self, now: SimTime, data: DataPacket) -> Vec<AppEffect> {
        let mut out = Vec::new();
        if !data.verify_digest() {
            self.counters.digest_failures += 1;
            return out;
        }
        if let Some(init) = InitInterestName::from_name(&data.name) {
            self.on_init_reply(now, &init.radar_id, &data, &mut out);
            return out;
        }
        let Ok(name) = RadarDataName::from_name(&data.name) else {
            return out;
        };
        let (file, segment) = (name.file(), name.segment.unwrap_or(0));
        let Some(job) = self.jobs.get_mut(&file) else {
            self.counters.duplicate_data += 1;
            return out;
        };
        if job.state != JobState::Running || job.has(segment) {
            self.counters.duplicate_data += 1;
            return out;
        }
        if job.final_block.is_some_and(|fb| segment > fb) {
            return out;
        }
        let sample = job
            .outstanding
            .remove(&segment)
            .filter(|o| !o.retransmitted)
            .map(|o| now - o.sent_at);
        job.first_data_at.get_or_insert(now);
        if job.final_block.is_none() {
            job.final_block = data.final_block;
        }
        job.bytes_received += data.payload.len() as u64;
        job.received.insert(segment, data.payload.clone());
        let complete = job.is_complete();
        self.counters.data_accepted += 1;
        if let Some(rtt) = sample {
            self.session(&file.radar_id).rtt.add_sample(rtt);
        }

        if self.config.follow == FollowMode::Piggyback {
            if let Some(next) = &data.piggyback_next {
                if let Ok(next) = RadarDataName::from_name(next) {
                    self.open_job_into(now, &next, &mut out);
                }
            }
        }
        if complete {
            self.finish(now, &file, JobState::Done, &mut out);
        } else {
            self.pump(now, &file, &mut out);
        }
        out
    }

    fn on_init_reply(
        &mut self,
        now: SimTime,
        radar: &str,
        data: &DataPacket,
        out: &mut Vec<AppEffect>,
    ) {
        let Some(session) = self.radars.get_mut(radar) else {
            return;
        };
        let RadarStatus::Initializing { attempt } = session.status else {
            return;
        };
        let Ok(reply) = InitResponse::decode(radar, &data.payload) else {
            return;
        };
        if attempt == 0 {
            session.rtt.add_sample(now - session.init_sent_at);
        }
        session.status = RadarStatus::Active;
        let file = make_data_name(radar, reply.current_round, reply.current_seq.max(1), None);
        // already fetched: continue with its successor
        let target = match self.jobs.get(&file).map(|j| j.state) {
            Some(JobState::Done) => match self.config.seqs_per_round.get(radar) {
                Some(&spr) => next_data_name(&file, spr),
                None => return,
            },
            _ => file,
        };
        if self
            .jobs
            .get(&target)
            .is_some_and(|j| j.state == JobState::Failed)
        {
            let old = self.jobs.remove(&target).expect("checked");
            self.open_job_into(now, &target, out);
            if let Some(job) = self.jobs.get_mut(&target) {
                job.retransmissions += old.retransmissions;
                job.first_interest_at = old.first_interest_at.or(job.first_interest_at);
            }
        } else {
            self.open_job_into(now, &target, out);
        }
    }

    fn finish(
        &mut self,
        now: SimTime,
        file: &RadarDataName,
        state: JobState,
        out: &mut Vec<AppEffect>,
    ) {
        let keep = self.config.keep_payloads;
        let job = self.jobs.get_mut(file).expect("job exists");
        job.state = state;
        job.finished_at = Some(now);
        job.outstanding.clear();
        if !keep || state == JobState::Failed {
            job.received.values_mut().for_each(|p| *p = Bytes::new());
        }
        match state {
            JobState::Done => self.counters.jobs_done += 1,
            JobState::Failed => {
                self.counters.jobs_failed += 1;
                log::debug!("fetch of {file} failed");
            }
            JobState::Running => unreachable!(),
        }

        let radar = &file.radar_id;
        let radar_busy = self
            .jobs
            .values()
            .any(|j| j.state == JobState::Running && &j.file_name.radar_id == radar);
        match self.config.follow {
            FollowMode::Piggyback if !radar_busy => {
                self.counters.reinits += 1;
                self.send_init(now, radar, 0, out);
            }
            FollowMode::Predict => {
                if let Some(&spr) = self.config.seqs_per_round.get(radar) {
                    let next = next_data_name(file, spr);
                    self.open_job_into(now, &next, out);
                }
            }
            _ => {}
        }
    }
}
