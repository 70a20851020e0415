//! Per-node AODV state machine.
//!
//! A node never touches the radio or the clock directly. Each handler takes
//! the current time and appends [`Action`]s to an output buffer; the
//! simulation executes them and feeds link failures back through
//! [`AodvNode::on_link_failure`].

mod messages;
mod table;

use std::collections::{BTreeMap, HashMap, VecDeque};

pub use messages::{ControlMessage, FramePayload, Rerr, Rrep, Rreq, SeqNo};
pub use table::{fresh_enough, RoutingEntry, RoutingTable};

use crate::blackhole::{self, AttackMode, AttackerConfig};
use crate::traffic::DataPacket;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AodvParams {
    pub active_route_timeout: f64,
    pub rreq_cache_lifetime: f64,
    pub net_diameter: u32,
    pub rreq_retries: u32,
    pub retry_wait: f64,
    pub buffer_cap: usize,
}

impl Default for AodvParams {
    fn default() -> Self {
        Self {
            active_route_timeout: 3.0,
            rreq_cache_lifetime: 3.0,
            net_diameter: 35,
            rreq_retries: 2,
            retry_wait: 1.0,
            buffer_cap: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    NoRoute,
    Attacker,
    BufferOverflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timer {
    /// `attempt` identifies which request of the discovery armed the timer.
    DiscoveryRetry { destination: NodeId, attempt: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Broadcast(ControlMessage),
    Unicast {
        to: NodeId,
        payload: FramePayload,
    },
    StartTimer {
        at: f64,
        timer: Timer,
    },
    Deliver(DataPacket),
    Drop {
        packet: DataPacket,
        reason: DropReason,
    },
}

#[derive(Debug, Clone, Default)]
pub struct PendingDiscovery {
    pub retries_left: u32,
    pub attempt: u32,
    pub buffer: VecDeque<DataPacket>,
}

#[derive(Debug, Clone)]
pub struct AodvNode {
    id: NodeId,
    params: AodvParams,
    attack: Option<AttackerConfig>,
    own_seq: SeqNo,
    rreq_counter: u32,
    seen_rreqs: HashMap<(NodeId, u32), f64>,
    table: RoutingTable,
    pending: BTreeMap<NodeId, PendingDiscovery>,
}

impl AodvNode {
    pub fn new(id: NodeId, params: AodvParams) -> Self {
        Self {
            id,
            params,
            attack: None,
            own_seq: 0,
            rreq_counter: 0,
            seen_rreqs: HashMap::new(),
            table: RoutingTable::new(),
            pending: BTreeMap::new(),
        }
    }

    pub fn attacker(id: NodeId, params: AodvParams, attack: AttackerConfig) -> Self {
        Self {
            attack: Some(attack),
            ..Self::new(id, params)
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn params(&self) -> AodvParams {
        self.params
    }

    /// Marks a request id as already handled, so copies echoed back are ignored.
    pub fn note_rreq(&mut self, originator: NodeId, rreq_id: u32, now: f64) {
        self.remember_rreq(originator, rreq_id, now);
    }

    pub fn own_seq(&self) -> SeqNo {
        self.own_seq
    }

    pub fn attack(&self) -> Option<&AttackerConfig> {
        self.attack.as_ref()
    }

    pub fn is_attacker(&self) -> bool {
        self.attack.is_some()
    }

    pub fn table(&self) -> &RoutingTable {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut RoutingTable {
        &mut self.table
    }

    pub fn pending(&self, destination: NodeId) -> Option<&PendingDiscovery> {
        self.pending.get(&destination)
    }

    /// Every packet currently parked waiting for a route.
    pub fn buffered(&self) -> impl Iterator<Item = &DataPacket> {
        self.pending.values().flat_map(|p| p.buffer.iter())
    }

    pub fn update_route(&mut self, candidate: RoutingEntry, now: f64) -> bool {
        self.table
            .update_route(candidate, now, self.params.active_route_timeout)
    }

    /// Records `(originator, rreq_id)`; returns false if it was already seen
    /// within the cache lifetime.
    fn remember_rreq(&mut self, originator: NodeId, rreq_id: u32, now: f64) -> bool {
        let lifetime = self.params.rreq_cache_lifetime;
        self.seen_rreqs.retain(|_, exp| *exp >= now);
        if self.seen_rreqs.contains_key(&(originator, rreq_id)) {
            return false;
        }
        self.seen_rreqs
            .insert((originator, rreq_id), now + lifetime);
        true
    }

    pub fn has_seen(&self, originator: NodeId, rreq_id: u32, now: f64) -> bool {
        self.seen_rreqs
            .get(&(originator, rreq_id))
            .is_some_and(|exp| *exp >= now)
    }

    /// Data handed down by the local application.
    pub fn send_data(&mut self, now: f64, packet: DataPacket, out: &mut Vec<Action>) {
        if packet.destination == self.id {
            out.push(Action::Deliver(packet));
        } else {
            self.forward_data(now, packet, out);
        }
    }

    pub fn on_frame(
        &mut self,
        now: f64,
        from: NodeId,
        payload: FramePayload,
        out: &mut Vec<Action>,
    ) {
        match payload {
            FramePayload::Control(ControlMessage::Rreq(rreq)) => {
                self.handle_rreq(now, rreq, from, out)
            }
            FramePayload::Control(ControlMessage::Rrep(rrep)) => {
                self.handle_rrep(now, rrep, from, out)
            }
            FramePayload::Control(ControlMessage::Rerr(rerr)) => {
                self.handle_rerr(now, rerr, from, out)
            }
            FramePayload::Data(packet) => self.on_data(now, packet, out),
        }
    }

    fn on_data(&mut self, now: f64, packet: DataPacket, out: &mut Vec<Action>) {
        if packet.destination == self.id {
            out.push(Action::Deliver(packet));
        } else if self.attack.is_some() {
            out.push(blackhole::attacker_on_data(packet));
        } else {
            self.forward_data(now, packet, out);
        }
    }

    pub fn originate_discovery(&mut self, now: f64, destination: NodeId, out: &mut Vec<Action>) {
        let pending = self
            .pending
            .entry(destination)
            .or_insert_with(|| PendingDiscovery {
                retries_left: self.params.rreq_retries,
                attempt: 0,
                buffer: VecDeque::new(),
            });
        let attempt = pending.attempt;
        self.broadcast_rreq(now, destination, out);
        out.push(Action::StartTimer {
            at: now + self.params.retry_wait * f64::from(1u32 << attempt.min(30)),
            timer: Timer::DiscoveryRetry {
                destination,
                attempt,
            },
        });
    }

    fn broadcast_rreq(&mut self, now: f64, destination: NodeId, out: &mut Vec<Action>) {
        self.own_seq += 1;
        self.rreq_counter += 1;
        let known = self.table.get(destination).filter(|e| e.seq_known);
        let rreq = Rreq {
            originator: self.id,
            originator_seq: self.own_seq,
            rreq_id: self.rreq_counter,
            destination,
            dest_seq: known.map_or(0, |e| e.dest_seq),
            dest_seq_unknown: known.is_none(),
            hop_count: 0,
            ttl: self.params.net_diameter,
        };
        self.remember_rreq(self.id, rreq.rreq_id, now);
        out.push(Action::Broadcast(ControlMessage::Rreq(rreq)));
    }

    pub fn on_timer(&mut self, now: f64, timer: Timer, out: &mut Vec<Action>) {
        let Timer::DiscoveryRetry {
            destination,
            attempt,
        } = timer;
        let Some(pending) = self.pending.get_mut(&destination) else {
            return;
        };
        if pending.attempt != attempt {
            return;
        }
        if pending.retries_left > 0 {
            pending.retries_left -= 1;
            pending.attempt += 1;
            self.originate_discovery(now, destination, out);
        } else {
            let pending = self.pending.remove(&destination).unwrap_or_default();
            out.extend(pending.buffer.into_iter().map(|packet| Action::Drop {
                packet,
                reason: DropReason::NoRoute,
            }));
        }
    }

    pub fn handle_rreq(
        &mut self,
        now: f64,
        rreq: Rreq,
        previous_hop: NodeId,
        out: &mut Vec<Action>,
    ) {
        if !self.remember_rreq(rreq.originator, rreq.rreq_id, now) {
            return;
        }
        self.update_route(
            RoutingEntry {
                destination: rreq.originator,
                next_hop: previous_hop,
                hop_count: rreq.hop_count + 1,
                dest_seq: rreq.originator_seq,
                seq_known: true,
                expiry: 0.0,
                valid: true,
            },
            now,
        );

        if rreq.destination == self.id {
            let target = if rreq.dest_seq_unknown {
                0
            } else {
                rreq.dest_seq
            };
            self.own_seq = (self.own_seq + 1).max(target);
            let rrep = Rrep {
                originator: rreq.originator,
                destination: self.id,
                dest_seq: self.own_seq,
                hop_count: 0,
                lifetime: self.params.active_route_timeout,
            };
            self.send_rrep_toward_originator(now, rrep, out);
            return;
        }

        if let Some(cfg) = self.attack {
            if matches!(cfg.mode, AttackMode::FakeRrep | AttackMode::Both) {
                let forged =
                    blackhole::craft_fake_rrep(self.id, &rreq, previous_hop, &cfg, &self.params);
                out.push(Action::Unicast {
                    to: forged.unicast_to,
                    payload: FramePayload::Control(ControlMessage::Rrep(forged.rrep)),
                });
                return;
            }
        }

        if let Some(entry) = self.table.lookup(rreq.destination, now) {
            if fresh_enough(entry, &rreq) {
                let rrep = Rrep {
                    originator: rreq.originator,
                    destination: rreq.destination,
                    dest_seq: entry.dest_seq,
                    hop_count: entry.hop_count,
                    lifetime: entry.expiry - now,
                };
                self.send_rrep_toward_originator(now, rrep, out);
                return;
            }
        }

        if rreq.ttl <= 1 {
            return;
        }
        out.push(Action::Broadcast(ControlMessage::Rreq(Rreq {
            hop_count: rreq.hop_count + 1,
            ttl: rreq.ttl - 1,
            ..rreq
        })));
    }

    fn send_rrep_toward_originator(&mut self, now: f64, rrep: Rrep, out: &mut Vec<Action>) {
        let Some(reverse) = self.table.lookup(rrep.originator, now) else {
            return;
        };
        out.push(Action::Unicast {
            to: reverse.next_hop,
            payload: FramePayload::Control(ControlMessage::Rrep(rrep)),
        });
    }

    pub fn handle_rrep(
        &mut self,
        now: f64,
        rrep: Rrep,
        previous_hop: NodeId,
        out: &mut Vec<Action>,
    ) {
        self.update_route(
            RoutingEntry {
                destination: rrep.destination,
                next_hop: previous_hop,
                hop_count: rrep.hop_count + 1,
                dest_seq: rrep.dest_seq,
                seq_known: true,
                expiry: 0.0,
                valid: true,
            },
            now,
        );

        if rrep.originator == self.id {
            if self.table.lookup(rrep.destination, now).is_none() {
                return;
            }
            if let Some(pending) = self.pending.remove(&rrep.destination) {
                for packet in pending.buffer {
                    self.forward_data(now, packet, out);
                }
            }
            return;
        }

        self.send_rrep_toward_originator(
            now,
            Rrep {
                hop_count: rrep.hop_count + 1,
                ..rrep
            },
            out,
        );
    }

    pub fn handle_rerr(&mut self, now: f64, rerr: Rerr, from: NodeId, out: &mut Vec<Action>) {
        let mut lost = Vec::new();
        for (destination, seq) in rerr.unreachable {
            if let Some(entry) = self.table.lookup(destination, now) {
                if entry.next_hop == from && entry.dest_seq <= seq {
                    entry.valid = false;
                    entry.dest_seq = seq;
                    lost.push((destination, seq));
                }
            }
        }
        if !lost.is_empty() {
            out.push(Action::Broadcast(ControlMessage::Rerr(Rerr {
                unreachable: lost,
            })));
        }
    }

    pub fn forward_data(&mut self, now: f64, packet: DataPacket, out: &mut Vec<Action>) {
        let timeout = self.params.active_route_timeout;
        if let Some(entry) = self.table.lookup(packet.destination, now) {
            entry.expiry = entry.expiry.max(now + timeout);
            out.push(Action::Unicast {
                to: entry.next_hop,
                payload: FramePayload::Data(packet),
            });
        } else if packet.source == self.id {
            self.buffer_for_discovery(now, packet, out);
        } else {
            let seq = self.table.get(packet.destination).map_or(0, |e| e.dest_seq);
            out.push(Action::Broadcast(ControlMessage::Rerr(Rerr {
                unreachable: vec![(packet.destination, seq)],
            })));
            out.push(Action::Drop {
                packet,
                reason: DropReason::NoRoute,
            });
        }
    }

    fn buffer_for_discovery(&mut self, now: f64, packet: DataPacket, out: &mut Vec<Action>) {
        let destination = packet.destination;
        let start = !self.pending.contains_key(&destination);
        let pending = self
            .pending
            .entry(destination)
            .or_insert_with(|| PendingDiscovery {
                retries_left: self.params.rreq_retries,
                attempt: 0,
                buffer: VecDeque::new(),
            });
        pending.buffer.push_back(packet);
        while pending.buffer.len() > self.params.buffer_cap {
            if let Some(oldest) = pending.buffer.pop_front() {
                out.push(Action::Drop {
                    packet: oldest,
                    reason: DropReason::BufferOverflow,
                });
            }
        }
        if start {
            self.originate_discovery(now, destination, out);
        }
    }

    /// Invalidates every route through `lost_neighbor`, bumping each
    /// destination sequence number, and announces them in one RERR.
    pub fn handle_link_break(&mut self, lost_neighbor: NodeId, out: &mut Vec<Action>) {
        let mut lost = Vec::new();
        for entry in self.table.iter_mut() {
            if entry.valid && entry.next_hop == lost_neighbor {
                entry.valid = false;
                entry.dest_seq += 1;
                lost.push((entry.destination, entry.dest_seq));
            }
        }
        if !lost.is_empty() {
            out.push(Action::Broadcast(ControlMessage::Rerr(Rerr {
                unreachable: lost,
            })));
        }
    }

    /// A unicast of `payload` to `lost_neighbor` found it out of range.
    pub fn on_link_failure(
        &mut self,
        now: f64,
        lost_neighbor: NodeId,
        payload: FramePayload,
        out: &mut Vec<Action>,
    ) {
        self.handle_link_break(lost_neighbor, out);
        if let FramePayload::Data(packet) = payload {
            if packet.source == self.id {
                self.buffer_for_discovery(now, packet, out);
            } else {
                out.push(Action::Drop {
                    packet,
                    reason: DropReason::NoRoute,
                });
            }
        }
    }
}
