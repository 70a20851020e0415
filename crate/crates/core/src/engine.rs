//! Event queue and clock.
//!
//! Events are ordered by `(time, seq)`, where `seq` is a counter assigned at
//! insertion. Equal-time events therefore come out in the order they were
//! scheduled, which makes a run a pure function of its inputs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    FrameDelivery,
    TimerExpiry,
    TrafficGeneration,
    WaypointArrival,
    SimulationEnd,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::FrameDelivery => "FrameDelivery",
            EventKind::TimerExpiry => "TimerExpiry",
            EventKind::TrafficGeneration => "TrafficGeneration",
            EventKind::WaypointArrival => "WaypointArrival",
            EventKind::SimulationEnd => "SimulationEnd",
        })
    }
}

/// Implemented by event payloads so the trace can label them.
pub trait Payload {
    fn kind(&self) -> EventKind;
    fn summary(&self) -> String;
}

#[derive(Debug, Clone)]
pub struct Event<P> {
    pub time: f64,
    pub seq: u64,
    pub payload: P,
}

impl<P: Payload> Event<P> {
    pub fn kind(&self) -> EventKind {
        self.payload.kind()
    }

    /// `time<TAB>seq<TAB>kind<TAB>summary`
    pub fn trace_line(&self) -> String {
        format!(
            "{:.9}\t{}\t{}\t{}",
            self.time,
            self.seq,
            self.payload.kind(),
            self.payload.summary()
        )
    }
}

struct Entry<P>(Event<P>);

impl<P> PartialEq for Entry<P> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<P> Eq for Entry<P> {}

impl<P> PartialOrd for Entry<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Entry<P> {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .time
            .total_cmp(&self.0.time)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

pub struct EventQueue<P> {
    heap: BinaryHeap<Entry<P>>,
    next_seq: u64,
    now: f64,
}

impl<P> Default for EventQueue<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> EventQueue<P> {
    pub fn new() -> Self {
        Self {
            heap: BinaryHeap::new(),
            next_seq: 0,
            now: 0.0,
        }
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Enqueue `payload` at `time`, returning the assigned sequence number.
    pub fn schedule(&mut self, time: f64, payload: P) -> Result<u64> {
        if time.is_nan() || time < self.now {
            return Err(SimError::ScheduledInPast {
                time,
                now: self.now,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry(Event { time, seq, payload }));
        Ok(seq)
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.0.time)
    }

    /// Removes the earliest event and advances the clock to its time.
    pub fn pop(&mut self) -> Option<Event<P>> {
        let Entry(event) = self.heap.pop()?;
        debug_assert!(event.time >= self.now);
        self.now = event.time;
        Some(event)
    }

    /// Pops the next event only if it falls at or before `horizon`.
    pub fn pop_until(&mut self, horizon: f64) -> Option<Event<P>> {
        match self.peek_time() {
            Some(t) if t <= horizon => self.pop(),
            _ => None,
        }
    }
}
