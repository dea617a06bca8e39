use std::collections::HashMap;

use super::FaceId;
use crate::names::Name;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NextHop {
    pub face: FaceId,
    pub cost: u32,
}

/// Name-prefix routing table.
#[derive(Debug, Default, Clone)]
pub struct FibTable {
    routes: HashMap<Vec<String>, Vec<NextHop>>,
}

impl FibTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `face` for `prefix`. Re-registering a face updates its cost.
    /// Next hops stay sorted by cost; equal costs keep registration order.
    pub fn add_route(&mut self, prefix: &Name, face: FaceId, cost: u32) {
        let hops = self.routes.entry(prefix.components().to_vec()).or_default();
        if let Some(hop) = hops.iter_mut().find(|h| h.face == face) {
            hop.cost = cost;
        } else {
            hops.push(NextHop { face, cost });
        }
        hops.sort_by_key(|h| h.cost);
    }

    pub fn remove_route(&mut self, prefix: &Name, face: FaceId) {
        if let Some(hops) = self.routes.get_mut(prefix.components()) {
            hops.retain(|h| h.face != face);
            if hops.is_empty() {
                self.routes.remove(prefix.components());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    /// Faces of the longest registered prefix of `name`, cheapest first.
    pub fn lookup(&self, name: &Name) -> Vec<FaceId> {
        let c = name.components();
        (1..=c.len())
            .rev()
            .find_map(|n| self.routes.get(&c[..n]))
            .map(|hops| hops.iter().map(|h| h.face).collect())
            .unwrap_or_default()
    }
}

pub fn fib_lookup(table: &FibTable, name: &Name) -> Vec<FaceId> {
    table.lookup(name)
}
