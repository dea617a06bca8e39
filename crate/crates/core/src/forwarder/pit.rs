use std::collections::{BTreeSet, HashMap, HashSet};

use super::FaceId;
use crate::names::Name;
use crate::time::SimTime;

#[derive(Debug, Clone)]
pub struct PitEntry {
    pub name: Name,
    pub downstream_faces: BTreeSet<FaceId>,
    pub nonces: HashSet<u64>,
    pub expiry: SimTime,
}

#[derive(Debug, Default)]
pub struct PendingInterestTable {
    entries: HashMap<Name, PitEntry>,
}

impl PendingInterestTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &Name) -> Option<&PitEntry> {
        self.entries.get(name)
    }

    pub fn get_mut(&mut self, name: &Name) -> Option<&mut PitEntry> {
        self.entries.get_mut(name)
    }

    pub fn insert(&mut self, name: Name, face: FaceId, nonce: u64, expiry: SimTime) {
        let entry = PitEntry {
            name: name.clone(),
            downstream_faces: BTreeSet::from([face]),
            nonces: HashSet::from([nonce]),
            expiry,
        };
        self.entries.insert(name, entry);
    }

    pub fn remove(&mut self, name: &Name) -> Option<PitEntry> {
        self.entries.remove(name)
    }

    /// Drops every entry whose expiry is at or before `now`.
    pub fn expire(&mut self, now: SimTime) -> usize {
        let before = self.entries.len();
        self.entries.retain(|_, e| e.expiry > now);
        before - self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PitEntry> {
        self.entries.values()
    }
}
