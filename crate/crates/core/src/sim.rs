//! One simulation run: nodes, channel, mobility and traffic driven by the
//! event queue.

use std::collections::VecDeque;

use crate::aodv::{
    Action, AodvNode, ControlMessage, DropReason, FramePayload, RoutingEntry, Timer,
};
use crate::blackhole::{craft_fake_rreq, forged_rreq_id};
use crate::config::{MobilitySettings, ScenarioConfig};
use crate::engine::{Event, EventKind, EventQueue, Payload};
use crate::error::{Result, SimError};
use crate::mobility::Mobility;
use crate::radio::{Channel, Frame, Recipient, TransmitOutcome};
use crate::rng::{RandomStream, StreamKind};
use crate::traffic::{DataPacket, Fate, FlowGenerator, PacketLedger, RunMetrics};
use crate::NodeId;

#[derive(Debug, Clone)]
pub enum SimEvent {
    Frame {
        receiver: NodeId,
        sender: NodeId,
        payload: FramePayload,
    },
    Timer {
        node: NodeId,
        timer: Timer,
    },
    ForgeRreq {
        attacker: NodeId,
        round: u32,
    },
    Traffic {
        flow: usize,
    },
    Waypoint {
        node: NodeId,
    },
    End,
}

impl Payload for SimEvent {
    fn kind(&self) -> EventKind {
        match self {
            SimEvent::Frame { .. } => EventKind::FrameDelivery,
            SimEvent::Timer { .. } | SimEvent::ForgeRreq { .. } => EventKind::TimerExpiry,
            SimEvent::Traffic { .. } => EventKind::TrafficGeneration,
            SimEvent::Waypoint { .. } => EventKind::WaypointArrival,
            SimEvent::End => EventKind::SimulationEnd,
        }
    }

    fn summary(&self) -> String {
        match self {
            SimEvent::Frame {
                receiver,
                sender,
                payload,
            } => format!("{sender}->{receiver} {payload}"),
            SimEvent::Timer {
                node,
                timer:
                    Timer::DiscoveryRetry {
                        destination,
                        attempt,
                    },
            } => format!("node={node} retry dst={destination} attempt={attempt}"),
            SimEvent::ForgeRreq { attacker, round } => {
                format!("node={attacker} forge-rreq round={round}")
            }
            SimEvent::Traffic { flow } => format!("flow={flow}"),
            SimEvent::Waypoint { node } => format!("node={node}"),
            SimEvent::End => String::new(),
        }
    }
}

/// One cell of an experiment for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub seed: u64,
    pub attacker_count: usize,
    pub mobility: MobilitySettings,
}

impl RunSpec {
    /// First seed, scalar attacker count and mobility.
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            seed: cfg.seeds.first().copied().unwrap_or(0),
            attacker_count: cfg.attackers.count,
            mobility: cfg.mobility,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub trace: bool,
    pub record_transmissions: bool,
}

/// A frame that left a node's radio.
#[derive(Debug, Clone, PartialEq)]
pub struct TxRecord {
    pub time: f64,
    pub sender: NodeId,
    pub recipient: Recipient,
    pub payload: FramePayload,
    pub receivers: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub metrics: RunMetrics,
    pub attackers: Vec<NodeId>,
    pub trace: Option<Vec<String>>,
    pub transmissions: Option<Vec<TxRecord>>,
    /// `(owner, entry)` for every routing entry at the end of the run.
    pub tables: Vec<(NodeId, RoutingEntry)>,
}

/// Picks attackers: the first `count` pinned ids, or a uniformly random set
/// of non-endpoint nodes. Counts share a prefix, so the attackers of a
/// smaller count are always among those of a larger one for the same seed.
pub fn choose_attackers(cfg: &ScenarioConfig, seed: u64, count: usize) -> Result<Vec<NodeId>> {
    if let Some(ids) = &cfg.attackers.node_ids {
        return ids.get(..count).map(<[_]>::to_vec).ok_or_else(|| {
            SimError::Invariant(format!("{count} attackers requested, {} pinned", ids.len()))
        });
    }
    let endpoints: Vec<NodeId> = cfg
        .flows
        .iter()
        .flat_map(|f| [f.source, f.destination])
        .collect();
    let mut eligible: Vec<NodeId> = (0..cfg.node_count as u32)
        .map(NodeId)
        .filter(|n| !endpoints.contains(n))
        .collect();
    if count > eligible.len() {
        return Err(SimError::Invariant(format!(
            "{count} attackers requested, {} eligible nodes",
            eligible.len()
        )));
    }
    let mut stream = RandomStream::new(seed, StreamKind::AttackerChoice, 0);
    // Fisher-Yates over the whole list so every count sees the same order
    for i in (1..eligible.len()).rev() {
        let j = stream.next_below(i as u64 + 1) as usize;
        eligible.swap(i, j);
    }
    eligible.truncate(count);
    Ok(eligible)
}

pub struct Simulation {
    duration: f64,
    fake_rreq_period: f64,
    queue: EventQueue<SimEvent>,
    mobility: Mobility,
    channel: Channel,
    nodes: Vec<AodvNode>,
    attackers: Vec<NodeId>,
    generators: Vec<FlowGenerator>,
    ledger: PacketLedger,
    forged: Vec<u32>,
    trace: Option<Vec<String>>,
    transmissions: Option<Vec<TxRecord>>,
    started: bool,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig, spec: &RunSpec, options: RunOptions) -> Result<Self> {
        cfg.validate()?;
        let mobility = Mobility::new(
            spec.seed,
            cfg.node_count,
            cfg.arena,
            spec.mobility.model(),
            &cfg.pins,
        )?;
        let attackers = choose_attackers(cfg, spec.seed, spec.attacker_count)?;
        let nodes = (0..cfg.node_count as u32)
            .map(NodeId)
            .map(|id| {
                if attackers.contains(&id) {
                    AodvNode::attacker(id, cfg.aodv, cfg.attackers.behavior)
                } else {
                    AodvNode::new(id, cfg.aodv)
                }
            })
            .collect();
        let generators = cfg
            .flows
            .iter()
            .enumerate()
            .map(|(i, f)| FlowGenerator::new(spec.seed, i as u32, *f, cfg.traffic))
            .collect();
        Ok(Self {
            duration: cfg.duration,
            fake_rreq_period: cfg.attackers.behavior.fake_rreq_period,
            queue: EventQueue::new(),
            mobility,
            channel: Channel::new(&cfg.radio),
            nodes,
            attackers,
            generators,
            ledger: PacketLedger::new(),
            forged: vec![0; cfg.node_count],
            trace: options.trace.then(Vec::new),
            transmissions: options.record_transmissions.then(Vec::new),
            started: false,
        })
    }

    pub fn now(&self) -> f64 {
        self.queue.now()
    }

    pub fn node(&self, id: NodeId) -> Option<&AodvNode> {
        self.nodes.get(id.index())
    }

    pub fn nodes(&self) -> &[AodvNode] {
        &self.nodes
    }

    pub fn attackers(&self) -> &[NodeId] {
        &self.attackers
    }

    pub fn mobility(&self) -> &Mobility {
        &self.mobility
    }

    pub fn mobility_mut(&mut self) -> &mut Mobility {
        &mut self.mobility
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    /// Counters as of now; packets not yet settled count as in flight.
    pub fn metrics(&self) -> RunMetrics {
        self.ledger.metrics(self.queue.now())
    }

    fn schedule(&mut self, time: f64, event: SimEvent) -> Result<()> {
        self.queue.schedule(time, event).map(|_| ())
    }

    fn start(&mut self) -> Result<()> {
        self.started = true;
        for i in 0..self.nodes.len() {
            let node = NodeId(i as u32);
            if self.mobility.is_mobile(node) {
                let leg = self.mobility.next_waypoint(node)?;
                self.schedule(leg.arrive, SimEvent::Waypoint { node })?;
            }
        }
        for flow in 0..self.generators.len() {
            let t = self.generators[flow].first_time()?;
            if t <= self.duration {
                self.schedule(t, SimEvent::Traffic { flow })?;
            }
        }
        if !self.generators.is_empty() {
            for attacker in self.attackers.clone() {
                let forges = self.nodes[attacker.index()]
                    .attack()
                    .is_some_and(|a| a.mode.forges_requests());
                if forges && self.fake_rreq_period <= self.duration {
                    self.schedule(
                        self.fake_rreq_period,
                        SimEvent::ForgeRreq { attacker, round: 1 },
                    )?;
                }
            }
        }
        if !self.queue.is_empty() {
            self.schedule(self.duration, SimEvent::End)?;
        }
        Ok(())
    }

    /// Processes every event up to and including `until` (capped at the
    /// configured duration).
    pub fn run_until(&mut self, until: f64) -> Result<()> {
        if !self.started {
            self.start()?;
        }
        let horizon = until.min(self.duration);
        while let Some(event) = self.queue.pop_until(horizon) {
            if let Some(trace) = &mut self.trace {
                trace.push(event.trace_line());
            }
            self.dispatch(event)?;
        }
        Ok(())
    }

    pub fn run(mut self) -> Result<RunOutput> {
        self.run_until(self.duration)?;
        let metrics = self.ledger.metrics(self.queue.now());
        metrics.check_conservation()?;
        let tables = self
            .nodes
            .iter()
            .flat_map(|n| n.table().iter().map(move |e| (n.id(), *e)))
            .collect();
        Ok(RunOutput {
            metrics,
            attackers: self.attackers,
            trace: self.trace,
            transmissions: self.transmissions,
            tables,
        })
    }

    fn dispatch(&mut self, event: Event<SimEvent>) -> Result<()> {
        let now = event.time;
        let mut out = Vec::new();
        match event.payload {
            SimEvent::Frame {
                receiver,
                sender,
                payload,
            } => {
                self.node_mut(receiver)?
                    .on_frame(now, sender, payload, &mut out);
                self.execute(receiver, out)
            }
            SimEvent::Timer { node, timer } => {
                self.node_mut(node)?.on_timer(now, timer, &mut out);
                self.execute(node, out)
            }
            SimEvent::ForgeRreq { attacker, round } => self.forge_rreqs(attacker, round),
            SimEvent::Traffic { flow } => self.generate(flow),
            SimEvent::Waypoint { node } => {
                let leg = self.mobility.next_waypoint(node)?;
                self.schedule(leg.arrive, SimEvent::Waypoint { node })
            }
            SimEvent::End => Ok(()),
        }
    }

    fn node_mut(&mut self, id: NodeId) -> Result<&mut AodvNode> {
        self.nodes
            .get_mut(id.index())
            .ok_or(SimError::UnknownNode(id))
    }

    fn generate(&mut self, flow: usize) -> Result<()> {
        let now = self.queue.now();
        let gen = &mut self.generators[flow];
        let f = gen.flow();
        let size_bits = gen.next_size()?;
        let next = now + gen.next_gap()?;
        let packet = DataPacket {
            id: self.ledger.issue(),
            source: f.source,
            destination: f.destination,
            size_bits,
            created_at: now,
        };
        let mut out = Vec::new();
        self.node_mut(f.source)?.send_data(now, packet, &mut out);
        self.execute(f.source, out)?;
        if next <= self.duration {
            self.schedule(next, SimEvent::Traffic { flow })?;
        }
        Ok(())
    }

    /// Each flow's destination is impersonated towards its source, so the
    /// poisoned reverse routes are exactly the ones the flow's data follows.
    fn forge_rreqs(&mut self, attacker: NodeId, round: u32) -> Result<()> {
        let now = self.queue.now();
        let behavior = *self.nodes[attacker.index()]
            .attack()
            .ok_or_else(|| SimError::Invariant(format!("node {attacker} is not an attacker")))?;
        let params = self.nodes[attacker.index()].params();
        let flows: Vec<_> = self.generators.iter().map(FlowGenerator::flow).collect();
        let mut out = Vec::new();
        for f in flows {
            let (victim_src, victim_dst) = (f.destination, f.source);
            if victim_src == attacker || victim_dst == attacker {
                continue;
            }
            let victim_seq = self.nodes[victim_src.index()].own_seq();
            let id = forged_rreq_id(self.forged[attacker.index()]);
            self.forged[attacker.index()] += 1;
            let forged = craft_fake_rreq(
                attacker, victim_src, victim_dst, victim_seq, id, &behavior, &params,
            );
            self.nodes[attacker.index()].note_rreq(
                forged.rreq.originator,
                forged.rreq.rreq_id,
                now,
            );
            out.push(Action::Broadcast(ControlMessage::Rreq(forged.rreq)));
        }
        self.execute(attacker, out)?;
        let next = f64::from(round + 1) * self.fake_rreq_period;
        if next <= self.duration {
            self.schedule(
                next,
                SimEvent::ForgeRreq {
                    attacker,
                    round: round + 1,
                },
            )?;
        }
        Ok(())
    }

    fn execute(&mut self, node: NodeId, actions: Vec<Action>) -> Result<()> {
        let now = self.queue.now();
        let mut work: VecDeque<Action> = actions.into();
        while let Some(action) = work.pop_front() {
            match action {
                Action::Broadcast(msg) => {
                    self.transmit(node, Recipient::Broadcast, FramePayload::Control(msg))?;
                }
                Action::Unicast { to, payload } => {
                    if let Some(payload) = self.transmit(node, Recipient::Node(to), payload)? {
                        let mut more = Vec::new();
                        self.node_mut(node)?
                            .on_link_failure(now, to, payload, &mut more);
                        work.extend(more);
                    }
                }
                Action::StartTimer { at, timer } => {
                    self.schedule(at, SimEvent::Timer { node, timer })?;
                }
                Action::Deliver(packet) => self.ledger.settle(packet.id, Fate::Delivered)?,
                Action::Drop { packet, reason } => {
                    let fate = match reason {
                        DropReason::NoRoute => Fate::DroppedNoRoute,
                        DropReason::Attacker => Fate::DroppedByAttacker,
                        DropReason::BufferOverflow => Fate::DroppedBuffer,
                    };
                    self.ledger.settle(packet.id, fate)?;
                }
            }
        }
        Ok(())
    }

    /// Sends a frame; on unicast link failure hands the payload back.
    fn transmit(
        &mut self,
        sender: NodeId,
        recipient: Recipient,
        payload: FramePayload,
    ) -> Result<Option<FramePayload>> {
        let now = self.queue.now();
        let frame = Frame {
            sender,
            recipient,
            size_bits: payload.size_bits(),
            payload,
        };
        let outcome = self.channel.transmit(&self.mobility, &frame, now)?;
        let deliveries = match outcome {
            TransmitOutcome::LinkFailure => {
                if let Some(log) = &mut self.transmissions {
                    log.push(TxRecord {
                        time: now,
                        sender,
                        recipient,
                        payload: frame.payload.clone(),
                        receivers: 0,
                    });
                }
                return Ok(Some(frame.payload));
            }
            TransmitOutcome::Delivered(d) => d,
        };
        if let Some(log) = &mut self.transmissions {
            log.push(TxRecord {
                time: now,
                sender,
                recipient,
                payload: frame.payload.clone(),
                receivers: deliveries.len(),
            });
        }
        for (receiver, at) in deliveries {
            self.schedule(
                at,
                SimEvent::Frame {
                    receiver,
                    sender,
                    payload: frame.payload.clone(),
                },
            )?;
        }
        Ok(None)
    }
}

/// Runs the scenario once with its first seed and scalar settings.
pub fn run(cfg: &ScenarioConfig) -> Result<RunMetrics> {
    let out = Simulation::new(cfg, &RunSpec::from_config(cfg), RunOptions::default())?.run()?;
    Ok(out.metrics)
}
