//! Per-node NDN forwarding plane.
//!
//! Each node owns a [`Forwarder`]: a content store answering repeat
//! Interests locally, a pending Interest table that aggregates concurrent
//! requests and fans Data back out, and a FIB consulted on a miss. Face 0 is
//! reserved for the local application.

mod cs;
mod fib;
mod pit;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use cs::ContentStore;
pub use fib::{fib_lookup, FibTable, NextHop};
pub use pit::{PendingInterestTable, PitEntry};

use crate::names::{InitInterestName, Name};
use crate::packets::{DataPacket, InterestPacket};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FaceId(pub u32);

impl FaceId {
    pub const APP: FaceId = FaceId(0);
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "face{}", self.0)
    }
}

pub const DEFAULT_CS_CAPACITY: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    SendInterest {
        face: FaceId,
        interest: InterestPacket,
    },
    SendData {
        face: FaceId,
        data: DataPacket,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForwardError {
    #[error("no route for {0}")]
    NoRoute(Name),
    #[error("duplicate nonce {nonce:016x} for {name}")]
    DuplicateNonce { name: Name, nonce: u64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ForwarderCounters {
    pub interests_received: u64,
    pub interests_forwarded: u64,
    pub interests_retransmitted: u64,
    pub interests_aggregated: u64,
    pub duplicate_nonce_drops: u64,
    pub no_route_drops: u64,
    pub cs_hits: u64,
    pub cs_evictions: u64,
    pub data_received: u64,
    pub data_forwarded: u64,
    pub unsolicited_data_drops: u64,
    pub pit_expired: u64,
}

impl ForwarderCounters {
    pub fn rows(&self) -> [(&'static str, u64); 12] {
        [
            ("interests_received", self.interests_received),
            ("interests_forwarded", self.interests_forwarded),
            ("interests_retransmitted", self.interests_retransmitted),
            ("interests_aggregated", self.interests_aggregated),
            ("duplicate_nonce_drops", self.duplicate_nonce_drops),
            ("no_route_drops", self.no_route_drops),
            ("cs_hits", self.cs_hits),
            ("cs_evictions", self.cs_evictions),
            ("data_received", self.data_received),
            ("data_forwarded", self.data_forwarded),
            ("unsolicited_data_drops", self.unsolicited_data_drops),
            ("pit_expired", self.pit_expired),
        ]
    }
}

#[derive(Debug)]
pub struct Forwarder {
    pub cs: ContentStore,
    pub pit: PendingInterestTable,
    pub fib: FibTable,
    pub counters: ForwarderCounters,
}

impl Forwarder {
    pub fn new(cs_capacity: usize) -> Self {
        Forwarder {
            cs: ContentStore::new(cs_capacity),
            pit: PendingInterestTable::new(),
            fib: FibTable::new(),
            counters: ForwarderCounters::default(),
        }
    }

    fn upstream_face(&self, name: &Name, ingress: FaceId) -> Option<FaceId> {
        self.fib.lookup(name).into_iter().find(|&f| f != ingress)
    }

    /// Handles an Interest arriving on `ingress`.
    ///
    /// A retransmission (new nonce from a face already recorded in the live
    /// PIT entry) is forwarded upstream again; a request from a new face is
    /// aggregated into the entry.
    pub fn on_interest(
        &mut self,
        now: SimTime,
        interest: InterestPacket,
        ingress: FaceId,
    ) -> Result<Vec<Action>, ForwardError> {
        self.expire_pit(now);
        self.counters.interests_received += 1;

        if let Some(data) = self.cs.lookup(&interest.name) {
            self.counters.cs_hits += 1;
            return Ok(vec![Action::SendData {
                face: ingress,
                data,
            }]);
        }

        let expiry = now + interest.lifetime;
        if let Some(entry) = self.pit.get(&interest.name) {
            if entry.nonces.contains(&interest.nonce) {
                self.counters.duplicate_nonce_drops += 1;
                return Err(ForwardError::DuplicateNonce {
                    name: interest.name,
                    nonce: interest.nonce,
                });
            }
            let is_retransmission = entry.downstream_faces.contains(&ingress);
            if !is_retransmission {
                let entry = self.pit.get_mut(&interest.name).expect("checked above");
                entry.downstream_faces.insert(ingress);
                entry.nonces.insert(interest.nonce);
                entry.expiry = entry.expiry.max(expiry);
                self.counters.interests_aggregated += 1;
                return Ok(Vec::new());
            }
            let Some(face) = self.upstream_face(&interest.name, ingress) else {
                self.counters.no_route_drops += 1;
                return Err(ForwardError::NoRoute(interest.name));
            };
            let entry = self.pit.get_mut(&interest.name).expect("checked above");
            entry.nonces.insert(interest.nonce);
            entry.expiry = entry.expiry.max(expiry);
            self.counters.interests_retransmitted += 1;
            self.counters.interests_forwarded += 1;
            return Ok(vec![Action::SendInterest { face, interest }]);
        }

        let Some(face) = self.upstream_face(&interest.name, ingress) else {
            self.counters.no_route_drops += 1;
            return Err(ForwardError::NoRoute(interest.name));
        };
        self.pit
            .insert(interest.name.clone(), ingress, interest.nonce, expiry);
        self.counters.interests_forwarded += 1;
        Ok(vec![Action::SendInterest { face, interest }])
    }

    /// Satisfies the matching PIT entry, fanning `data` out to every
    /// downstream face and caching it. Unsolicited Data is dropped.
    pub fn on_data(&mut self, now: SimTime, data: DataPacket, ingress: FaceId) -> Vec<Action> {
        self.expire_pit(now);
        self.counters.data_received += 1;
        let Some(entry) = self.pit.remove(&data.name) else {
            self.counters.unsolicited_data_drops += 1;
            return Vec::new();
        };
        let actions: Vec<Action> = entry
            .downstream_faces
            .iter()
            .filter(|&&f| f != ingress)
            .map(|&face| Action::SendData {
                face,
                data: data.clone(),
            })
            .collect();
        self.counters.data_forwarded += actions.len() as u64;
        // radar state replies go stale, so they are never cached
        if InitInterestName::from_name(&data.name).is_none() && self.cs.insert(data).is_some() {
            self.counters.cs_evictions += 1;
        }
        actions
    }

    pub fn expire_pit(&mut self, now: SimTime) -> usize {
        let n = self.pit.expire(now);
        self.counters.pit_expired += n as u64;
        n
    }
}
