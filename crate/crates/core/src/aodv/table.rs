use std::collections::BTreeMap;

use super::messages::{Rreq, SeqNo};
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoutingEntry {
    pub destination: NodeId,
    pub next_hop: NodeId,
    pub hop_count: u32,
    pub dest_seq: SeqNo,
    pub seq_known: bool,
    pub expiry: f64,
    pub valid: bool,
}

impl RoutingEntry {
    pub fn is_usable(&self, now: f64) -> bool {
        self.valid && now <= self.expiry
    }
}

/// A route may answer a request iff it is valid, carries a known sequence
/// number, and that number is at least the one the request asks for.
pub fn fresh_enough(entry: &RoutingEntry, rreq: &Rreq) -> bool {
    entry.valid && entry.seq_known && (rreq.dest_seq_unknown || entry.dest_seq >= rreq.dest_seq)
}

#[derive(Debug, Clone, Default)]
pub struct RoutingTable {
    entries: BTreeMap<NodeId, RoutingEntry>,
}

impl RoutingTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, destination: NodeId) -> Option<&RoutingEntry> {
        self.entries.get(&destination)
    }

    pub fn get_mut(&mut self, destination: NodeId) -> Option<&mut RoutingEntry> {
        self.entries.get_mut(&destination)
    }

    /// The entry if it is valid and unexpired. Expired entries are marked invalid.
    pub fn lookup(&mut self, destination: NodeId, now: f64) -> Option<&mut RoutingEntry> {
        let entry = self.entries.get_mut(&destination)?;
        if entry.valid && now > entry.expiry {
            entry.valid = false;
        }
        entry.valid.then_some(entry)
    }

    pub fn iter(&self) -> impl Iterator<Item = &RoutingEntry> {
        self.entries.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut RoutingEntry> {
        self.entries.values_mut()
    }

    /// Installs `candidate` when there is no usable incumbent, or when it is
    /// strictly fresher, or equally fresh and strictly shorter. On acceptance
    /// the entry becomes valid with `expiry = now + active_route_timeout`.
    pub fn update_route(
        &mut self,
        candidate: RoutingEntry,
        now: f64,
        active_route_timeout: f64,
    ) -> bool {
        let accept = match self.entries.get(&candidate.destination) {
            None => true,
            Some(existing) if !existing.is_usable(now) => true,
            Some(existing) => {
                candidate.dest_seq > existing.dest_seq
                    || (candidate.dest_seq == existing.dest_seq
                        && candidate.hop_count < existing.hop_count)
            }
        };
        if accept {
            self.entries.insert(
                candidate.destination,
                RoutingEntry {
                    valid: true,
                    expiry: now + active_route_timeout,
                    ..candidate
                },
            );
        }
        accept
    }
}
