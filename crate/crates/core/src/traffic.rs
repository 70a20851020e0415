//! Workload generation and delivery-ratio bookkeeping.

use std::fmt::Write as _;

use crate::error::{Result, SimError};
use crate::rng::{RandomStream, StreamKind};
use crate::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub struct DataPacket {
    pub id: u64,
    pub source: NodeId,
    pub destination: NodeId,
    pub size_bits: u32,
    pub created_at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flow {
    pub source: NodeId,
    pub destination: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficParams {
    pub start: f64,
    pub interarrival_min: f64,
    pub interarrival_max: f64,
    pub size_mean_bits: f64,
}

impl Default for TrafficParams {
    fn default() -> Self {
        Self {
            start: 0.0,
            interarrival_min: 0.1,
            interarrival_max: 0.11,
            size_mean_bits: 1024.0,
        }
    }
}

/// Produces one flow's packets: gaps from the flow's Traffic stream, sizes
/// from its PacketSize stream, so the schedule for a seed never depends on
/// what the network does with the packets.
#[derive(Debug, Clone)]
pub struct FlowGenerator {
    flow: Flow,
    params: TrafficParams,
    gaps: RandomStream,
    sizes: RandomStream,
}

impl FlowGenerator {
    pub fn new(seed: u64, index: u32, flow: Flow, params: TrafficParams) -> Self {
        Self {
            flow,
            params,
            gaps: RandomStream::new(seed, StreamKind::Traffic, index),
            sizes: RandomStream::new(seed, StreamKind::PacketSize, index),
        }
    }

    pub fn flow(&self) -> Flow {
        self.flow
    }

    pub fn first_time(&mut self) -> Result<f64> {
        Ok(self.params.start + self.next_gap()?)
    }

    pub fn next_gap(&mut self) -> Result<f64> {
        self.gaps
            .draw_uniform(self.params.interarrival_min, self.params.interarrival_max)
    }

    /// Exponential size rounded to whole bits, never below one bit.
    pub fn next_size(&mut self) -> Result<u32> {
        let bits = self.sizes.draw_exponential(self.params.size_mean_bits)?;
        Ok(bits.round().clamp(1.0, f64::from(u32::MAX)) as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunMetrics {
    pub sent: u64,
    pub delivered: u64,
    pub dropped_no_route: u64,
    pub dropped_by_attacker: u64,
    pub dropped_buffer: u64,
    pub in_flight_at_end: u64,
    /// `delivered / sent`, absent when nothing was sent.
    pub pdr: Option<f64>,
    pub end_time: f64,
}

impl RunMetrics {
    pub fn terminal_total(&self) -> u64 {
        self.delivered
            + self.dropped_no_route
            + self.dropped_by_attacker
            + self.dropped_buffer
            + self.in_flight_at_end
    }

    pub fn is_conserved(&self) -> bool {
        self.sent == self.terminal_total()
    }

    pub fn check_conservation(&self) -> Result<()> {
        if self.is_conserved() {
            Ok(())
        } else {
            Err(SimError::Invariant(format!(
                "packet conservation: sent {} != delivered {} + no_route {} + attacker {} + buffer {} + in_flight {}",
                self.sent,
                self.delivered,
                self.dropped_no_route,
                self.dropped_by_attacker,
                self.dropped_buffer,
                self.in_flight_at_end
            )))
        }
    }
}

pub fn compute_pdr(metrics: &RunMetrics) -> Result<f64> {
    if metrics.sent == 0 {
        return Err(SimError::NothingSent);
    }
    Ok(metrics.delivered as f64 / metrics.sent as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdrSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub per_run: Vec<f64>,
}

pub fn aggregate(runs: &[RunMetrics]) -> Result<PdrSummary> {
    if runs.is_empty() {
        return Err(SimError::EmptyAggregate);
    }
    let per_run = runs.iter().map(compute_pdr).collect::<Result<Vec<_>>>()?;
    let mean = per_run.iter().sum::<f64>() / per_run.len() as f64;
    let min = per_run.iter().copied().fold(f64::INFINITY, f64::min);
    let max = per_run.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PdrSummary {
        mean,
        min,
        max,
        per_run,
    })
}

/// Where a packet ended up. Every packet gets exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    InFlight,
    Delivered,
    DroppedNoRoute,
    DroppedByAttacker,
    DroppedBuffer,
}

/// Tracks each packet's fate so double counting is caught, not silently summed.
#[derive(Debug, Clone, Default)]
pub struct PacketLedger {
    fates: Vec<Fate>,
}

impl PacketLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a freshly generated packet and returns its id.
    pub fn issue(&mut self) -> u64 {
        self.fates.push(Fate::InFlight);
        (self.fates.len() - 1) as u64
    }

    pub fn fate(&self, id: u64) -> Option<Fate> {
        self.fates.get(id as usize).copied()
    }

    pub fn settle(&mut self, id: u64, fate: Fate) -> Result<()> {
        let slot = self
            .fates
            .get_mut(id as usize)
            .ok_or_else(|| SimError::Invariant(format!("unknown packet id {id}")))?;
        if *slot != Fate::InFlight {
            return Err(SimError::Invariant(format!(
                "packet {id} already settled as {slot:?}, now {fate:?}"
            )));
        }
        *slot = fate;
        Ok(())
    }

    pub fn metrics(&self, end_time: f64) -> RunMetrics {
        let mut m = RunMetrics {
            sent: self.fates.len() as u64,
            end_time,
            ..RunMetrics::default()
        };
        for fate in &self.fates {
            match fate {
                Fate::InFlight => m.in_flight_at_end += 1,
                Fate::Delivered => m.delivered += 1,
                Fate::DroppedNoRoute => m.dropped_no_route += 1,
                Fate::DroppedByAttacker => m.dropped_by_attacker += 1,
                Fate::DroppedBuffer => m.dropped_buffer += 1,
            }
        }
        m.pdr = compute_pdr(&m).ok();
        m
    }
}

/// `pdr` cell for CSV output: shortest round-trip form, empty when undefined.
pub fn format_pdr(pdr: Option<f64>) -> String {
    let mut s = String::new();
    if let Some(p) = pdr {
        let _ = write!(s, "{p}");
    }
    s
}
