//! Node placement and motion: static nodes and random waypoint.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Result, SimError};
use crate::rng::{RandomStream, StreamKind};
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arena {
    pub width: f64,
    pub height: f64,
}

impl Arena {
    pub fn contains(&self, p: &Position) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

impl Default for Arena {
    fn default() -> Self {
        Self {
            width: 600.0,
            height: 600.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MobilityModel {
    Static,
    RandomWaypoint { v_min: f64, v_max: f64, pause: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionKind {
    Static,
    RandomWaypoint,
}

/// One node's current leg. Between `depart` and `arrive` the node moves in a
/// straight line from `origin` to `waypoint` at `speed`; it then sits at the
/// waypoint until `pause_until`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityState {
    pub origin: Position,
    pub waypoint: Position,
    pub depart: f64,
    pub arrive: f64,
    pub speed: f64,
    pub pause_until: f64,
    pub model: MotionKind,
}

impl MobilityState {
    fn stationary(at: Position) -> Self {
        Self {
            origin: at,
            waypoint: at,
            depart: 0.0,
            arrive: 0.0,
            speed: 0.0,
            pause_until: f64::INFINITY,
            model: MotionKind::Static,
        }
    }

    pub fn position_at(&self, t: f64) -> Position {
        if self.model == MotionKind::Static || t <= self.depart {
            return self.origin;
        }
        if t >= self.arrive {
            return self.waypoint;
        }
        let frac = (t - self.depart) / (self.arrive - self.depart);
        Position::new(
            self.origin.x + (self.waypoint.x - self.origin.x) * frac,
            self.origin.y + (self.waypoint.y - self.origin.y) * frac,
        )
    }
}

/// The next leg chosen for a random-waypoint node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    pub waypoint: Position,
    pub speed: f64,
    pub pause: f64,
    pub arrive: f64,
}

#[derive(Debug, Clone)]
pub struct Mobility {
    arena: Arena,
    model: MobilityModel,
    states: Vec<MobilityState>,
    streams: Vec<RandomStream>,
}

impl Mobility {
    /// Places every node. Unpinned nodes land uniformly in the arena, drawn
    /// from their own Mobility stream; pinned nodes sit still at their pin.
    pub fn new(
        seed: u64,
        node_count: usize,
        arena: Arena,
        model: MobilityModel,
        pins: &BTreeMap<NodeId, Position>,
    ) -> Result<Self> {
        let mut states = Vec::with_capacity(node_count);
        let mut streams = Vec::with_capacity(node_count);
        for i in 0..node_count {
            let mut stream = RandomStream::new(seed, StreamKind::Mobility, i as u32);
            let drawn = Position::new(
                stream.draw_uniform(0.0, arena.width)?,
                stream.draw_uniform(0.0, arena.height)?,
            );
            let state = match pins.get(&NodeId(i as u32)) {
                Some(pin) => MobilityState::stationary(*pin),
                None => match model {
                    MobilityModel::Static => MobilityState::stationary(drawn),
                    MobilityModel::RandomWaypoint { .. } => MobilityState {
                        model: MotionKind::RandomWaypoint,
                        ..MobilityState::stationary(drawn)
                    },
                },
            };
            states.push(state);
            streams.push(stream);
        }
        Ok(Self {
            arena,
            model,
            states,
            streams,
        })
    }

    pub fn arena(&self) -> Arena {
        self.arena
    }

    pub fn node_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, node: NodeId) -> Result<&MobilityState> {
        self.states
            .get(node.index())
            .ok_or(SimError::UnknownNode(node))
    }

    pub fn is_mobile(&self, node: NodeId) -> bool {
        self.states
            .get(node.index())
            .is_some_and(|s| s.model == MotionKind::RandomWaypoint)
    }

    /// Teleports `node` to `to` and freezes it there. Used to script link
    /// breaks in otherwise static scenarios.
    pub fn relocate(&mut self, node: NodeId, to: Position) -> Result<()> {
        let state = self
            .states
            .get_mut(node.index())
            .ok_or(SimError::UnknownNode(node))?;
        *state = MobilityState::stationary(to);
        Ok(())
    }

    pub fn position_at(&self, node: NodeId, time: f64) -> Result<Position> {
        Ok(self.state(node)?.position_at(time))
    }

    /// Draws the next leg for a random-waypoint node whose current leg ends
    /// (including its pause) by the time the node departs again. The caller
    /// schedules the `WaypointArrival` event at [`Leg::arrive`].
    pub fn next_waypoint(&mut self, node: NodeId) -> Result<Leg> {
        let MobilityModel::RandomWaypoint {
            v_min,
            v_max,
            pause,
        } = self.model
        else {
            return Err(SimError::InvalidParameter(format!(
                "node {node} is not a random-waypoint node"
            )));
        };
        let idx = node.index();
        let state = *self.states.get(idx).ok_or(SimError::UnknownNode(node))?;
        if state.model != MotionKind::RandomWaypoint {
            return Err(SimError::InvalidParameter(format!(
                "node {node} is pinned or static"
            )));
        }
        let stream = &mut self.streams[idx];
        let waypoint = Position::new(
            stream.draw_uniform(0.0, self.arena.width)?,
            stream.draw_uniform(0.0, self.arena.height)?,
        );
        let speed = if v_min == v_max {
            v_min
        } else {
            stream.draw_uniform(v_min, v_max)?
        };
        // the first leg departs at t = 0 straight from the initial placement
        let depart = if state.speed == 0.0 && state.arrive == 0.0 {
            0.0
        } else {
            state.pause_until
        };
        let origin = state.waypoint;
        let arrive = depart + origin.distance(&waypoint) / speed;
        self.states[idx] = MobilityState {
            origin,
            waypoint,
            depart,
            arrive,
            speed,
            pause_until: arrive + pause,
            model: MotionKind::RandomWaypoint,
        };
        Ok(Leg {
            waypoint,
            speed,
            pause,
            arrive,
        })
    }
}
