use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::Duration;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::link::{LinkProfile, LinkState};
use super::queue::EventQueue;
use super::rng_stream;
use super::topology::{Role, Topology};
use crate::forwarder::{Action, FaceId, Forwarder, DEFAULT_CS_CAPACITY};
use crate::names::{InitInterestName, Name, RadarDataName, DATA_PREFIX, INIT_PREFIX};
use crate::packets::{
    DataPacket, InterestKind, InterestPacket, Packet, PushSegment, DEFAULT_CHUNK_SIZE,
};
use crate::protocol::{
    push_segments, AppEffect, Consumer, ConsumerConfig, JobState, PushSink, RadarProducer,
    TraceEntry,
};
use crate::time::SimTime;

pub const DEFAULT_LIVELOCK_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transport {
    /// Consumers request named data.
    Pull,
    /// Radars push every file to the consumer as soon as it is generated.
    Push,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub transport: Transport,
    pub chunk_size: usize,
    pub cs_capacity: usize,
    pub piggyback: bool,
    pub consumer: ConsumerConfig,
    /// Keep a record of every packet put on a link.
    pub record_packets: bool,
    pub livelock_limit: u64,
    /// Per-hop resend delay for lost pushed segments, on top of twice the
    /// link's propagation delay.
    pub push_retry: Duration,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            transport: Transport::Pull,
            chunk_size: DEFAULT_CHUNK_SIZE,
            cs_capacity: DEFAULT_CS_CAPACITY,
            piggyback: true,
            consumer: ConsumerConfig::default(),
            record_packets: false,
            livelock_limit: DEFAULT_LIVELOCK_LIMIT,
            push_retry: Duration::from_millis(200),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedRecord {
    pub name: RadarDataName,
    pub at: SimTime,
    pub size_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileStatus {
    Done,
    Failed,
    Pending,
}

impl FileStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FileStatus::Done => "done",
            FileStatus::Failed => "failed",
            FileStatus::Pending => "pending",
        }
    }
}

/// Retrieval outcome of one generated file at a consumer.
#[derive(Debug, Clone, PartialEq)]
pub struct FileMetric {
    pub name: RadarDataName,
    pub size_bytes: u64,
    pub generated_at: SimTime,
    /// When retrieval could start: the later of the first request and the
    /// file's generation. For pushed files, the generation time.
    pub request_time: Option<SimTime>,
    pub completion_time: Option<SimTime>,
    pub retransmissions: u32,
    pub status: FileStatus,
}

impl FileMetric {
    pub fn download_time(&self) -> Option<Duration> {
        Some(self.completion_time? - self.request_time?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeCounters {
    pub node_id: String,
    pub role: Role,
    pub counters: Vec<(&'static str, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketRecord {
    pub at: SimTime,
    pub from: String,
    pub to: String,
    pub packet: Packet,
    pub dropped: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    pub end_time: SimTime,
    pub events: u64,
    pub files: Vec<FileMetric>,
    pub nodes: Vec<NodeCounters>,
    pub generated: Vec<GeneratedRecord>,
    pub packets: Vec<PacketRecord>,
}

impl Metrics {
    pub fn counter(&self, node: &str, name: &str) -> Option<u64> {
        let n = self.nodes.iter().find(|n| n.node_id == node)?;
        n.counters.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }
}

#[derive(Debug, Error)]
#[error("simulation stalled at {at}: {events} events without time advancing")]
pub struct SimAbort {
    pub at: SimTime,
    pub events: u64,
    pub partial: Box<Metrics>,
}

#[derive(Debug)]
enum Event {
    Deliver {
        node: usize,
        face: FaceId,
        packet: Packet,
    },
    Timer {
        node: usize,
        token: u64,
    },
    Generate {
        node: usize,
    },
    Bootstrap {
        node: usize,
    },
    PushRetry {
        node: usize,
        face: FaceId,
        segment: PushSegment,
    },
}

enum Work {
    Interest {
        node: usize,
        face: FaceId,
        interest: InterestPacket,
    },
    Data {
        node: usize,
        face: FaceId,
        data: DataPacket,
    },
    ToApp {
        node: usize,
        packet: Packet,
    },
    Out {
        node: usize,
        face: FaceId,
        packet: Packet,
    },
}

#[derive(Debug, Clone, Copy)]
struct FaceRef {
    link: usize,
    dir: usize,
}

struct LinkRt {
    profile: LinkProfile,
    /// (node, face) at end a and end b.
    ends: [(usize, FaceId); 2],
    state: [LinkState; 2],
    rng: [ChaCha8Rng; 2],
}

enum App {
    Idle,
    Radar {
        producer: Box<RadarProducer>,
        schedule: VecDeque<TraceEntry>,
    },
    Consumer(Box<Consumer>),
    Sink(PushSink),
}

struct NodeRt {
    id: String,
    role: Role,
    fwd: Forwarder,
    faces: Vec<FaceRef>,
    app: App,
    toward_consumer: Option<FaceId>,
    push_resends: u64,
}

pub struct Simulation {
    config: SimConfig,
    now: SimTime,
    queue: EventQueue<Event>,
    nodes: Vec<NodeRt>,
    links: Vec<LinkRt>,
    radar_ids: Vec<String>,
    generated: Vec<GeneratedRecord>,
    packets: Vec<PacketRecord>,
    events: u64,
    same_instant: u64,
}

fn prefix(root: &str, radar: &str) -> Name {
    Name::from_components([root, radar]).expect("valid components")
}

impl Simulation {
    pub fn new(topology: &Topology, config: SimConfig, seed: u64) -> Simulation {
        let mut nodes: Vec<NodeRt> = topology
            .nodes
            .iter()
            .map(|n| NodeRt {
                id: n.id.clone(),
                role: n.role,
                fwd: Forwarder::new(config.cs_capacity),
                faces: Vec::new(),
                app: App::Idle,
                toward_consumer: None,
                push_resends: 0,
            })
            .collect();
        let index: HashMap<&str, usize> = topology
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();

        let mut links = Vec::new();
        for (li, l) in topology.links.iter().enumerate() {
            let (a, b) = (index[l.a.as_str()], index[l.b.as_str()]);
            let mut end = |node: usize, dir: usize| {
                nodes[node].faces.push(FaceRef { link: li, dir });
                (node, FaceId(nodes[node].faces.len() as u32))
            };
            let ends = [end(a, 0), end(b, 1)];
            links.push(LinkRt {
                profile: l.profile.clone(),
                ends,
                state: Default::default(),
                rng: [
                    rng_stream(seed, 1000 + 2 * li as u64),
                    rng_stream(seed, 1001 + 2 * li as u64),
                ],
            });
        }

        let mut sim = Simulation {
            config,
            now: SimTime::ZERO,
            queue: EventQueue::new(),
            nodes,
            links,
            radar_ids: topology.radars().map(|r| r.radar_id.clone()).collect(),
            generated: Vec::new(),
            packets: Vec::new(),
            events: 0,
            same_instant: 0,
        };

        // routes: every radar prefix points along the shortest path to it
        for (ri, n) in topology.nodes.iter().enumerate() {
            let Some(radar) = &n.radar else { continue };
            let toward = sim.faces_toward(ri);
            for (node, face) in toward.into_iter().enumerate() {
                let face = if node == ri {
                    FaceId::APP
                } else {
                    face.expect("connected")
                };
                for root in [DATA_PREFIX, INIT_PREFIX] {
                    sim.nodes[node]
                        .fwd
                        .fib
                        .add_route(&prefix(root, &radar.radar_id), face, 1);
                }
            }
        }
        if let Some(ci) = sim.nodes.iter().position(|n| n.role == Role::Consumer) {
            for (node, face) in sim.faces_toward(ci).into_iter().enumerate() {
                sim.nodes[node].toward_consumer = face;
            }
        }

        for (i, n) in topology.nodes.iter().enumerate() {
            sim.nodes[i].app = match (n.role, sim.config.transport) {
                (Role::Radar, _) => App::Radar {
                    producer: Box::new(RadarProducer::new(
                        n.radar.clone().expect("radar node has parameters"),
                        sim.config.chunk_size,
                        sim.config.piggyback,
                    )),
                    schedule: VecDeque::new(),
                },
                (Role::Consumer, Transport::Pull) => {
                    let mut cc = sim.config.consumer.clone();
                    if cc.seqs_per_round.is_empty() {
                        cc.seqs_per_round = topology.seqs_per_round();
                    }
                    App::Consumer(Box::new(Consumer::new(cc, rng_stream(seed, 10 + i as u64))))
                }
                (Role::Consumer, Transport::Push) => App::Sink(PushSink::new()),
                (Role::Forwarder, _) => App::Idle,
            };
        }
        sim
    }

    /// For every node, the face on its first hop toward `target` (BFS,
    /// ties broken by link order).
    fn faces_toward(&self, target: usize) -> Vec<Option<FaceId>> {
        let mut out = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        seen[target] = true;
        let mut queue = VecDeque::from([target]);
        while let Some(n) = queue.pop_front() {
            for f in &self.nodes[n].faces {
                let link = &self.links[f.link];
                let (m, m_face) = link.ends[1 - f.dir];
                if !seen[m] {
                    seen[m] = true;
                    out[m] = Some(m_face);
                    queue.push_back(m);
                }
            }
        }
        out
    }

    fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Loads file generations. `epoch_seconds` is read as simulated seconds;
    /// entries for unknown radars are ignored.
    pub fn load_generations(&mut self, entries: &[TraceEntry]) {
        let mut per_radar: BTreeMap<&str, Vec<&TraceEntry>> = BTreeMap::new();
        for e in entries {
            per_radar.entry(&e.radar_id).or_default().push(e);
        }
        for (radar, list) in per_radar {
            let Some(node) = self.node_index(radar) else {
                continue;
            };
            let App::Radar { producer, schedule } = &mut self.nodes[node].app else {
                continue;
            };
            let was_empty = schedule.is_empty();
            schedule.extend(list.into_iter().cloned());
            if was_empty {
                if let Some(first) = schedule.front() {
                    let at = SimTime::from_secs_f64(first.epoch_seconds).max(self.now);
                    producer.set_position(first.round, first.seq);
                    producer.set_next_generation(Some(at));
                    self.queue.push(at, Event::Generate { node });
                }
            }
        }
    }

    /// Makes every consumer query every radar at `at`.
    pub fn schedule_bootstrap(&mut self, at: SimTime) {
        for node in 0..self.nodes.len() {
            if matches!(self.nodes[node].app, App::Consumer(_)) {
                self.queue.push(at.max(self.now), Event::Bootstrap { node });
            }
        }
    }

    /// Schedules explicit file requests at the named consumer.
    pub fn schedule_requests(&mut self, consumer: &str, requests: &[(SimTime, RadarDataName)]) {
        let Some(node) = self.node_index(consumer) else {
            return;
        };
        let effects = match &mut self.nodes[node].app {
            App::Consumer(c) => c.schedule_requests(requests),
            _ => return,
        };
        let mut work = VecDeque::new();
        self.apply_effects(node, effects, &mut work);
        self.drain(work);
    }

    pub fn consumer(&self, id: &str) -> Option<&Consumer> {
        match &self.nodes[self.node_index(id)?].app {
            App::Consumer(c) => Some(c),
            _ => None,
        }
    }

    pub fn producer(&self, id: &str) -> Option<&RadarProducer> {
        match &self.nodes[self.node_index(id)?].app {
            App::Radar { producer, .. } => Some(producer),
            _ => None,
        }
    }

    pub fn forwarder(&self, id: &str) -> Option<&Forwarder> {
        Some(&self.nodes[self.node_index(id)?].fwd)
    }

    /// Dispatches every event up to and including `t_end`.
    pub fn run_until(&mut self, t_end: SimTime) -> Result<Metrics, SimAbort> {
        while self.queue.peek_time().is_some_and(|t| t <= t_end) {
            let (at, event) = self.queue.pop().expect("peeked");
            if at == self.now {
                self.same_instant += 1;
                if self.same_instant > self.config.livelock_limit {
                    return Err(SimAbort {
                        at,
                        events: self.same_instant,
                        partial: Box::new(self.metrics()),
                    });
                }
            } else {
                self.same_instant = 1;
            }
            self.now = at;
            self.events += 1;
            self.dispatch(event);
        }
        self.now = self.now.max(t_end);
        Ok(self.metrics())
    }

    fn dispatch(&mut self, event: Event) {
        let mut work = VecDeque::new();
        match event {
            Event::Deliver { node, face, packet } => match packet {
                Packet::Interest(interest) => work.push_back(Work::Interest {
                    node,
                    face,
                    interest,
                }),
                Packet::Data(data) => work.push_back(Work::Data { node, face, data }),
                Packet::Push(segment) => self.on_push(node, segment, &mut work),
            },
            Event::Timer { node, token } => {
                if let App::Consumer(c) = &mut self.nodes[node].app {
                    let effects = c.on_timer(self.now, token);
                    self.apply_effects(node, effects, &mut work);
                }
            }
            Event::Bootstrap { node } => {
                let radars = self.radar_ids.clone();
                if let App::Consumer(c) = &mut self.nodes[node].app {
                    let effects = c.bootstrap(self.now, &radars);
                    self.apply_effects(node, effects, &mut work);
                }
            }
            Event::Generate { node } => self.on_generate(node, &mut work),
            Event::PushRetry {
                node,
                face,
                segment,
            } => {
                self.nodes[node].push_resends += 1;
                work.push_back(Work::Out {
                    node,
                    face,
                    packet: Packet::Push(segment),
                });
            }
        }
        self.drain(work);
    }

    fn on_generate(&mut self, node: usize, work: &mut VecDeque<Work>) {
        let now = self.now;
        let transport = self.config.transport;
        let chunk = self.config.chunk_size;
        let App::Radar { producer, schedule } = &mut self.nodes[node].app else {
            return;
        };
        let Some(entry) = schedule.pop_front() else {
            return;
        };
        let next_at = schedule
            .front()
            .map(|e| SimTime::from_secs_f64(e.epoch_seconds).max(now));
        producer.set_next_generation(next_at);
        let generated = producer.generate(now, Some(&entry));
        let held = producer.answer_held(now);
        if let Some(at) = next_at {
            self.queue.push(at, Event::Generate { node });
        }
        let Some(file) = generated else {
            log::warn!("ignored out-of-order generation {:?}", entry);
            return;
        };
        self.generated.push(GeneratedRecord {
            name: file.name.clone(),
            at: now,
            size_bytes: file.size_bytes,
        });
        match transport {
            Transport::Pull => {
                for data in held {
                    work.push_back(Work::Data {
                        node,
                        face: FaceId::APP,
                        data,
                    });
                }
            }
            Transport::Push => {
                let Some(face) = self.nodes[node].toward_consumer else {
                    return;
                };
                for seg in push_segments(&file, chunk) {
                    work.push_back(Work::Out {
                        node,
                        face,
                        packet: Packet::Push(seg),
                    });
                }
            }
        }
    }

    fn on_push(&mut self, node: usize, segment: PushSegment, work: &mut VecDeque<Work>) {
        let now = self.now;
        let n = &mut self.nodes[node];
        if let App::Sink(sink) = &mut n.app {
            sink.on_segment(now, &segment);
        } else if let Some(face) = n.toward_consumer {
            work.push_back(Work::Out {
                node,
                face,
                packet: Packet::Push(segment),
            });
        }
    }

    fn apply_effects(&mut self, node: usize, effects: Vec<AppEffect>, work: &mut VecDeque<Work>) {
        for e in effects {
            match e {
                AppEffect::Interest(interest) => work.push_back(Work::Interest {
                    node,
                    face: FaceId::APP,
                    interest,
                }),
                AppEffect::Data(data) => work.push_back(Work::Data {
                    node,
                    face: FaceId::APP,
                    data,
                }),
                AppEffect::Timer { at, token } => self
                    .queue
                    .push(at.max(self.now), Event::Timer { node, token }),
            }
        }
    }

    fn push_actions(node: usize, actions: Vec<Action>, work: &mut VecDeque<Work>) {
        for a in actions {
            let (face, packet) = match a {
                Action::SendInterest { face, interest } => (face, Packet::Interest(interest)),
                Action::SendData { face, data } => (face, Packet::Data(data)),
            };
            if face == FaceId::APP {
                work.push_back(Work::ToApp { node, packet });
            } else {
                work.push_back(Work::Out { node, face, packet });
            }
        }
    }

    fn drain(&mut self, mut work: VecDeque<Work>) {
        let now = self.now;
        while let Some(w) = work.pop_front() {
            match w {
                Work::Interest {
                    node,
                    face,
                    interest,
                } => match self.nodes[node].fwd.on_interest(now, interest, face) {
                    Ok(actions) => Self::push_actions(node, actions, &mut work),
                    Err(e) => log::trace!("{}: {e}", self.nodes[node].id),
                },
                Work::Data { node, face, data } => {
                    let actions = self.nodes[node].fwd.on_data(now, data, face);
                    Self::push_actions(node, actions, &mut work);
                }
                Work::ToApp { node, packet } => match (&mut self.nodes[node].app, packet) {
                    (App::Radar { producer, .. }, Packet::Interest(i)) => {
                        let reply = if i.kind == InterestKind::Init {
                            InitInterestName::from_name(&i.name)
                                .filter(|n| n.radar_id == producer.radar_id())
                                .map(|_| producer.on_init_interest(&i))
                        } else {
                            producer.on_data_interest(&i, now)
                        };
                        if let Some(data) = reply {
                            work.push_back(Work::Data {
                                node,
                                face: FaceId::APP,
                                data,
                            });
                        }
                    }
                    (App::Consumer(c), Packet::Data(d)) => {
                        let effects = c.on_data(now, d);
                        self.apply_effects(node, effects, &mut work);
                    }
                    _ => {}
                },
                Work::Out { node, face, packet } => self.transmit(node, face, packet),
            }
        }
    }

    fn transmit(&mut self, node: usize, face: FaceId, packet: Packet) {
        let FaceRef { link: li, dir } = self.nodes[node].faces[face.0 as usize - 1];
        let link = &mut self.links[li];
        let arrival = link.profile.transmit(
            &mut link.state[dir],
            packet.wire_size(),
            self.now,
            &mut link.rng[dir],
        );
        let (peer, peer_face) = link.ends[1 - dir];
        let retry = self.config.push_retry + 2 * link.profile.propagation_delay;
        if self.config.record_packets {
            self.packets.push(PacketRecord {
                at: self.now,
                from: self.nodes[node].id.clone(),
                to: self.nodes[peer].id.clone(),
                packet: packet.clone(),
                dropped: arrival.is_none(),
            });
        }
        match (arrival, packet) {
            (Some(at), packet) => self.queue.push(
                at,
                Event::Deliver {
                    node: peer,
                    face: peer_face,
                    packet,
                },
            ),
            (None, Packet::Push(segment)) => self.queue.push(
                self.now + retry,
                Event::PushRetry {
                    node,
                    face,
                    segment,
                },
            ),
            (None, _) => {}
        }
    }

    pub fn metrics(&self) -> Metrics {
        let generated: HashMap<&RadarDataName, &GeneratedRecord> =
            self.generated.iter().map(|g| (&g.name, g)).collect();
        let mut files = Vec::new();
        for n in &self.nodes {
            match &n.app {
                App::Consumer(c) => {
                    for r in c.records() {
                        // requests for files that were never produced are not file outcomes
                        let Some(g) = generated.get(&r.name) else {
                            continue;
                        };
                        let status = match r.state {
                            JobState::Done => FileStatus::Done,
                            JobState::Failed => FileStatus::Failed,
                            JobState::Running => FileStatus::Pending,
                        };
                        files.push(FileMetric {
                            name: r.name.clone(),
                            size_bytes: g.size_bytes,
                            generated_at: g.at,
                            request_time: r.first_interest_at.map(|t| t.max(g.at)),
                            completion_time: (status == FileStatus::Done)
                                .then_some(r.finished_at)
                                .flatten(),
                            retransmissions: r.retransmissions,
                            status,
                        });
                    }
                }
                App::Sink(sink) => {
                    let arrived: HashMap<&RadarDataName, SimTime> = sink
                        .arrivals()
                        .iter()
                        .map(|a| (&a.name, a.arrival))
                        .collect();
                    for g in &self.generated {
                        let done = arrived.get(&g.name).copied();
                        files.push(FileMetric {
                            name: g.name.clone(),
                            size_bytes: g.size_bytes,
                            generated_at: g.at,
                            request_time: Some(g.at),
                            completion_time: done,
                            retransmissions: 0,
                            status: if done.is_some() {
                                FileStatus::Done
                            } else {
                                FileStatus::Pending
                            },
                        });
                    }
                }
                _ => {}
            }
        }
        files.sort_by(|a, b| {
            (&a.name.radar_id, a.name.round, a.name.seq).cmp(&(
                &b.name.radar_id,
                b.name.round,
                b.name.seq,
            ))
        });

        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let mut counters: Vec<(&'static str, u64)> = n.fwd.counters.rows().to_vec();
                let mut link = LinkState::default();
                for f in &n.faces {
                    let s = &self.links[f.link].state[f.dir];
                    link.packets += s.packets;
                    link.bytes += s.bytes;
                    link.losses += s.losses;
                    link.tail_drops += s.tail_drops;
                }
                counters.extend([
                    ("packets_sent", link.packets),
                    ("bytes_sent", link.bytes),
                    ("packets_lost", link.losses),
                    ("tail_drops", link.tail_drops),
                ]);
                match &n.app {
                    App::Radar { producer, .. } => {
                        let p = producer.counters;
                        counters.extend([
                            ("files_generated", p.files_generated),
                            ("files_evicted", p.files_evicted),
                            ("init_replies", p.init_replies),
                            ("segments_served", p.segments_served),
                            ("held_interests", p.held_interests),
                            ("unanswered_interests", p.unanswered_interests),
                            ("push_resends", n.push_resends),
                        ]);
                    }
                    App::Consumer(c) => {
                        let k = c.counters;
                        counters.extend([
                            ("interests_sent", k.interests_sent),
                            ("data_accepted", k.data_accepted),
                            ("duplicate_data", k.duplicate_data),
                            ("digest_failures", k.digest_failures),
                            ("init_timeouts", k.init_timeouts),
                            ("reinits", k.reinits),
                            ("jobs_done", k.jobs_done),
                            ("jobs_failed", k.jobs_failed),
                        ]);
                    }
                    App::Sink(s) => counters.push(("files_arrived", s.arrivals().len() as u64)),
                    App::Idle => counters.push(("push_resends", n.push_resends)),
                }
                NodeCounters {
                    node_id: n.id.clone(),
                    role: n.role,
                    counters,
                }
            })
            .collect();

        Metrics {
            end_time: self.now,
            events: self.events,
            files,
            nodes,
            generated: self.generated.clone(),
            packets: self.packets.clone(),
        }
    }
}
