//! Scenario configuration: a flat `dotted.key = value` text format.
//!
//! Absent keys take the defaults (46 nodes, 600 x 600 m arena, 600 s, one
//! flow from node 1 to node 4, Uniform(0.1, 0.11) s gaps, Exponential(1024)
//! bit packets). `#` starts a comment. Lists are comma separated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::aodv::AodvParams;
use crate::blackhole::AttackerConfig;
use crate::error::{ConfigErrors, ConfigIssue, Result};
use crate::mobility::{Arena, MobilityModel, MotionKind, Position};
use crate::radio::{compute_range, RadioConfig};
use crate::traffic::{Flow, TrafficParams};
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilitySettings {
    pub model: MotionKind,
    pub v_min: f64,
    pub v_max: f64,
    pub pause: f64,
}

impl Default for MobilitySettings {
    fn default() -> Self {
        Self {
            model: MotionKind::RandomWaypoint,
            v_min: 1.0,
            v_max: 5.0,
            pause: 2.0,
        }
    }
}

impl MobilitySettings {
    pub fn model(&self) -> MobilityModel {
        match self.model {
            MotionKind::Static => MobilityModel::Static,
            MotionKind::RandomWaypoint => MobilityModel::RandomWaypoint {
                v_min: self.v_min,
                v_max: self.v_max,
                pause: self.pause,
            },
        }
    }

    /// The settings used for one point of a speed sweep: 0 means static,
    /// anything else is random waypoint at exactly that speed.
    pub fn at_speed(&self, speed: f64) -> Self {
        if speed == 0.0 {
            Self {
                model: MotionKind::Static,
                ..*self
            }
        } else {
            Self {
                model: MotionKind::RandomWaypoint,
                v_min: speed,
                v_max: speed,
                ..*self
            }
        }
    }

    /// Nominal speed reported in result rows.
    pub fn nominal_speed(&self) -> f64 {
        match self.model {
            MotionKind::Static => 0.0,
            MotionKind::RandomWaypoint => 0.5 * (self.v_min + self.v_max),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttackerSettings {
    pub count: usize,
    /// Explicit attacker nodes; the first `count` are used.
    pub node_ids: Option<Vec<NodeId>>,
    pub behavior: AttackerConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub node_count: usize,
    pub arena: Arena,
    pub duration: f64,
    pub radio: RadioConfig,
    pub mobility: MobilitySettings,
    pub pins: BTreeMap<NodeId, Position>,
    pub aodv: AodvParams,
    pub attackers: AttackerSettings,
    pub traffic: TrafficParams,
    pub flows: Vec<Flow>,
    pub seeds: Vec<u64>,
    pub sweep_attackers: Vec<usize>,
    pub sweep_speeds: Vec<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            node_count: 46,
            arena: Arena::default(),
            duration: 600.0,
            radio: RadioConfig::default(),
            mobility: MobilitySettings::default(),
            pins: BTreeMap::new(),
            aodv: AodvParams::default(),
            attackers: AttackerSettings::default(),
            traffic: TrafficParams::default(),
            flows: vec![Flow {
                source: NodeId(1),
                destination: NodeId(4),
            }],
            seeds: vec![1],
            sweep_attackers: Vec::new(),
            sweep_speeds: Vec::new(),
        }
    }
}

const KEYS: &[&str] = &[
    "node_count",
    "arena.width",
    "arena.height",
    "duration",
    "seeds",
    "radio.tx_power_w",
    "radio.rx_threshold_dbm",
    "radio.frequency_hz",
    "radio.bitrate_bps",
    "radio.range_override_m",
    "mobility.model",
    "mobility.v_min",
    "mobility.v_max",
    "mobility.pause",
    "aodv.active_route_timeout",
    "aodv.rreq_cache_lifetime",
    "aodv.net_diameter",
    "aodv.rreq_retries",
    "aodv.retry_wait",
    "aodv.buffer_cap",
    "attackers.count",
    "attackers.mode",
    "attackers.seq_inflation",
    "attackers.hop_count",
    "attackers.fake_rreq_period",
    "attackers.node_ids",
    "traffic.flows",
    "traffic.start",
    "traffic.interarrival_min",
    "traffic.interarrival_max",
    "traffic.size_mean_bits",
    "sweep.attackers",
    "sweep.speeds",
];

fn parse_scalar<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("cannot parse `{value}`"))
}

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| parse_scalar(v.trim())).collect()
}

fn parse_flow(value: &str) -> std::result::Result<Flow, String> {
    let (src, dst) = value
        .split_once("->")
        .ok_or_else(|| format!("flow `{value}` must look like `1->4`"))?;
    Ok(Flow {
        source: NodeId(parse_scalar(src.trim())?),
        destination: NodeId(parse_scalar(dst.trim())?),
    })
}

fn parse_model(value: &str) -> std::result::Result<MotionKind, String> {
    match value {
        "static" => Ok(MotionKind::Static),
        "random_waypoint" => Ok(MotionKind::RandomWaypoint),
        other => Err(format!(
            "unknown mobility model `{other}` (expected static or random_waypoint)"
        )),
    }
}

fn model_name(kind: MotionKind) -> &'static str {
    match kind {
        MotionKind::Static => "static",
        MotionKind::RandomWaypoint => "random_waypoint",
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigErrors(vec![ConfigIssue {
                key: "config".into(),
                line: None,
                message: format!("cannot read {}: {e}", path.display()),
            }])
        })?;
        Ok(Self::parse(&text)?)
    }

    /// Parses and validates; every problem found is reported.
    pub fn parse(text: &str) -> std::result::Result<Self, ConfigErrors> {
        let mut cfg = Self::default();
        let mut issues = Vec::new();
        let mut seen = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                issues.push(ConfigIssue {
                    key: line.to_string(),
                    line: Some(line_no),
                    message: "expected `key = value`".into(),
                });
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                issues.push(ConfigIssue {
                    key: key.into(),
                    line: Some(line_no),
                    message: "duplicate key".into(),
                });
                continue;
            }
            if let Err(message) = cfg.set(key, value) {
                issues.push(ConfigIssue {
                    key: key.into(),
                    line: Some(line_no),
                    message,
                });
            }
        }
        if let Err(ConfigErrors(more)) = cfg.validate() {
            issues.extend(more);
        }
        if issues.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigErrors(issues))
        }
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        if let Some(rest) = key.strip_prefix("node.") {
            let Some(id) = rest.strip_suffix(".position") else {
                return Err("unknown key".into());
            };
            let id = NodeId(parse_scalar(id)?);
            let coords: Vec<f64> = parse_list(value)?;
            let [x, y] = coords[..] else {
                return Err(format!("position `{value}` must be `x, y`"));
            };
            self.pins.insert(id, Position::new(x, y));
            return Ok(());
        }
        match key {
            "node_count" => self.node_count = parse_scalar(value)?,
            "arena.width" => self.arena.width = parse_scalar(value)?,
            "arena.height" => self.arena.height = parse_scalar(value)?,
            "duration" => self.duration = parse_scalar(value)?,
            "seeds" => self.seeds = parse_list(value)?,
            "radio.tx_power_w" => self.radio.tx_power_w = parse_scalar(value)?,
            "radio.rx_threshold_dbm" => self.radio.rx_threshold_dbm = parse_scalar(value)?,
            "radio.frequency_hz" => self.radio.frequency_hz = parse_scalar(value)?,
            "radio.bitrate_bps" => self.radio.bitrate_bps = parse_scalar(value)?,
            "radio.range_override_m" => {
                self.radio.range_override_m = match value {
                    "" | "none" => None,
                    v => Some(parse_scalar(v)?),
                }
            }
            "mobility.model" => self.mobility.model = parse_model(value)?,
            "mobility.v_min" => self.mobility.v_min = parse_scalar(value)?,
            "mobility.v_max" => self.mobility.v_max = parse_scalar(value)?,
            "mobility.pause" => self.mobility.pause = parse_scalar(value)?,
            "aodv.active_route_timeout" => self.aodv.active_route_timeout = parse_scalar(value)?,
            "aodv.rreq_cache_lifetime" => self.aodv.rreq_cache_lifetime = parse_scalar(value)?,
            "aodv.net_diameter" => self.aodv.net_diameter = parse_scalar(value)?,
            "aodv.rreq_retries" => self.aodv.rreq_retries = parse_scalar(value)?,
            "aodv.retry_wait" => self.aodv.retry_wait = parse_scalar(value)?,
            "aodv.buffer_cap" => self.aodv.buffer_cap = parse_scalar(value)?,
            "attackers.count" => self.attackers.count = parse_scalar(value)?,
            "attackers.mode" => self.attackers.behavior.mode = value.parse()?,
            "attackers.seq_inflation" => {
                self.attackers.behavior.seq_inflation = parse_scalar(value)?
            }
            "attackers.hop_count" => {
                self.attackers.behavior.advertised_hop_count = parse_scalar(value)?
            }
            "attackers.fake_rreq_period" => {
                self.attackers.behavior.fake_rreq_period = parse_scalar(value)?
            }
            "attackers.node_ids" => {
                let ids: Vec<u32> = parse_list(value)?;
                self.attackers.node_ids = if ids.is_empty() {
                    None
                } else {
                    Some(ids.into_iter().map(NodeId).collect())
                };
            }
            "traffic.flows" => {
                self.flows = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|f| parse_flow(f.trim()))
                        .collect::<std::result::Result<_, _>>()?
                }
            }
            "traffic.start" => self.traffic.start = parse_scalar(value)?,
            "traffic.interarrival_min" => self.traffic.interarrival_min = parse_scalar(value)?,
            "traffic.interarrival_max" => self.traffic.interarrival_max = parse_scalar(value)?,
            "traffic.size_mean_bits" => self.traffic.size_mean_bits = parse_scalar(value)?,
            "sweep.attackers" => self.sweep_attackers = parse_list(value)?,
            "sweep.speeds" => self.sweep_speeds = parse_list(value)?,
            _ => {
                debug_assert!(!KEYS.contains(&key));
                return Err("unknown key".into());
            }
        }
        Ok(())
    }

    /// Checks every invariant and lists every violation.
    pub fn validate(&self) -> std::result::Result<(), ConfigErrors> {
        let mut issues = Vec::new();
        let mut bad = |key: &str, message: String| {
            issues.push(ConfigIssue {
                key: key.into(),
                line: None,
                message,
            })
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;

        if self.node_count < 2 {
            bad(
                "node_count",
                format!("must be at least 2, got {}", self.node_count),
            );
        }
        if !positive(self.arena.width) {
            bad(
                "arena.width",
                format!("must be positive, got {}", self.arena.width),
            );
        }
        if !positive(self.arena.height) {
            bad(
                "arena.height",
                format!("must be positive, got {}", self.arena.height),
            );
        }
        if !positive(self.duration) {
            bad(
                "duration",
                format!("must be positive, got {}", self.duration),
            );
        }
        if self.seeds.is_empty() {
            bad("seeds", "at least one seed is required".into());
        }

        if !positive(self.radio.tx_power_w) {
            bad("radio.tx_power_w", "must be positive".into());
        }
        if !self.radio.rx_threshold_dbm.is_finite() {
            bad("radio.rx_threshold_dbm", "must be finite".into());
        }
        if !positive(self.radio.frequency_hz) {
            bad("radio.frequency_hz", "must be positive".into());
        }
        if !positive(self.radio.bitrate_bps) {
            bad("radio.bitrate_bps", "must be positive".into());
        }
        match self.radio.range_override_m {
            Some(r) if !positive(r) => bad("radio.range_override_m", "must be positive".into()),
            None if !positive(compute_range(&self.radio)) => bad(
                "radio.tx_power_w",
                "derived radio range is not positive".into(),
            ),
            _ => {}
        }

        let m = &self.mobility;
        if (m.model == MotionKind::RandomWaypoint || !self.sweep_speeds.is_empty())
            && !(m.pause.is_finite() && m.pause >= 0.0)
        {
            bad("mobility.pause", "must be non-negative".into());
        }
        if m.model == MotionKind::RandomWaypoint {
            if !positive(m.v_min) {
                bad(
                    "mobility.v_min",
                    format!("must be positive, got {}", m.v_min),
                );
            }
            if !(m.v_max.is_finite() && m.v_min <= m.v_max) {
                bad(
                    "mobility.v_max",
                    format!("v_min {} exceeds v_max {}", m.v_min, m.v_max),
                );
            }
        }
        for s in &self.sweep_speeds {
            if !(s.is_finite() && *s >= 0.0) {
                bad("sweep.speeds", format!("speed {s} must be non-negative"));
            }
        }

        for (id, pos) in &self.pins {
            let key = format!("node.{id}.position");
            if id.index() >= self.node_count {
                bad(&key, format!("node {id} does not exist"));
            }
            if !self.arena.contains(pos) {
                bad(&key, format!("{pos} lies outside the arena"));
            }
        }

        let a = &self.aodv;
        if !positive(a.active_route_timeout) {
            bad("aodv.active_route_timeout", "must be positive".into());
        }
        if !positive(a.rreq_cache_lifetime) {
            bad("aodv.rreq_cache_lifetime", "must be positive".into());
        }
        if a.net_diameter == 0 {
            bad("aodv.net_diameter", "must be at least 1".into());
        }
        if !positive(a.retry_wait) {
            bad("aodv.retry_wait", "must be positive".into());
        }
        if a.buffer_cap == 0 {
            bad("aodv.buffer_cap", "must be at least 1".into());
        }

        let t = &self.traffic;
        if !(t.start.is_finite() && t.start >= 0.0) {
            bad("traffic.start", "must be non-negative".into());
        }
        if !(positive(t.interarrival_min) && t.interarrival_min < t.interarrival_max) {
            bad(
                "traffic.interarrival_max",
                format!(
                    "need 0 < min < max, got [{}, {})",
                    t.interarrival_min, t.interarrival_max
                ),
            );
        }
        if !positive(t.size_mean_bits) {
            bad("traffic.size_mean_bits", "must be positive".into());
        }
        let mut endpoints = BTreeSet::new();
        for f in &self.flows {
            if f.source == f.destination {
                bad(
                    "traffic.flows",
                    format!(
                        "flow {}->{} has identical endpoints",
                        f.source, f.destination
                    ),
                );
            }
            for n in [f.source, f.destination] {
                if n.index() >= self.node_count {
                    bad("traffic.flows", format!("node {n} does not exist"));
                }
                endpoints.insert(n);
            }
        }

        let at = &self.attackers;
        if at.behavior.seq_inflation < 1 {
            bad("attackers.seq_inflation", "must be at least 1".into());
        }
        if !positive(at.behavior.fake_rreq_period) {
            bad("attackers.fake_rreq_period", "must be positive".into());
        }
        let max_count = self.attacker_counts().into_iter().max().unwrap_or(0);
        match &at.node_ids {
            Some(ids) => {
                let mut distinct = BTreeSet::new();
                for id in ids {
                    if id.index() >= self.node_count {
                        bad("attackers.node_ids", format!("node {id} does not exist"));
                    }
                    if endpoints.contains(id) {
                        bad(
                            "attackers.node_ids",
                            format!("node {id} is a traffic endpoint"),
                        );
                    }
                    if !distinct.insert(*id) {
                        bad("attackers.node_ids", format!("node {id} listed twice"));
                    }
                }
                if max_count > ids.len() {
                    bad(
                        "attackers.count",
                        format!(
                            "{max_count} attackers requested but only {} ids pinned",
                            ids.len()
                        ),
                    );
                }
            }
            None => {
                let eligible = self.node_count.saturating_sub(endpoints.len());
                if max_count > eligible {
                    bad(
                        "attackers.count",
                        format!("{max_count} attackers requested but only {eligible} nodes are eligible"),
                    );
                }
            }
        }

        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(issues))
        }
    }

    /// Attacker counts to run: the sweep, or just the scalar count.
    pub fn attacker_counts(&self) -> Vec<usize> {
        if self.sweep_attackers.is_empty() {
            vec![self.attackers.count]
        } else {
            self.sweep_attackers.clone()
        }
    }

    /// Mobility settings to run: one per swept speed, or the scalar settings.
    pub fn mobility_points(&self) -> Vec<MobilitySettings> {
        if self.sweep_speeds.is_empty() {
            vec![self.mobility]
        } else {
            self.sweep_speeds
                .iter()
                .map(|&s| self.mobility.at_speed(s))
                .collect()
        }
    }

    /// Serializes every effective setting; `parse` of the result reproduces `self`.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("node_count", self.node_count.to_string());
        kv("arena.width", self.arena.width.to_string());
        kv("arena.height", self.arena.height.to_string());
        kv("duration", self.duration.to_string());
        kv("seeds", join(&self.seeds));
        kv("radio.tx_power_w", self.radio.tx_power_w.to_string());
        kv(
            "radio.rx_threshold_dbm",
            self.radio.rx_threshold_dbm.to_string(),
        );
        kv("radio.frequency_hz", self.radio.frequency_hz.to_string());
        kv("radio.bitrate_bps", self.radio.bitrate_bps.to_string());
        kv(
            "radio.range_override_m",
            self.radio
                .range_override_m
                .map_or_else(|| "none".into(), |r| r.to_string()),
        );
        kv("mobility.model", model_name(self.mobility.model).into());
        kv("mobility.v_min", self.mobility.v_min.to_string());
        kv("mobility.v_max", self.mobility.v_max.to_string());
        kv("mobility.pause", self.mobility.pause.to_string());
        for (id, p) in &self.pins {
            kv(&format!("node.{id}.position"), format!("{}, {}", p.x, p.y));
        }
        kv(
            "aodv.active_route_timeout",
            self.aodv.active_route_timeout.to_string(),
        );
        kv(
            "aodv.rreq_cache_lifetime",
            self.aodv.rreq_cache_lifetime.to_string(),
        );
        kv("aodv.net_diameter", self.aodv.net_diameter.to_string());
        kv("aodv.rreq_retries", self.aodv.rreq_retries.to_string());
        kv("aodv.retry_wait", self.aodv.retry_wait.to_string());
        kv("aodv.buffer_cap", self.aodv.buffer_cap.to_string());
        let b = &self.attackers.behavior;
        kv("attackers.count", self.attackers.count.to_string());
        kv("attackers.mode", b.mode.to_string());
        kv("attackers.seq_inflation", b.seq_inflation.to_string());
        kv("attackers.hop_count", b.advertised_hop_count.to_string());
        kv("attackers.fake_rreq_period", b.fake_rreq_period.to_string());
        kv(
            "attackers.node_ids",
            self.attackers
                .node_ids
                .as_deref()
                .map(join)
                .unwrap_or_default(),
        );
        kv(
            "traffic.flows",
            self.flows
                .iter()
                .map(|f| format!("{}->{}", f.source, f.destination))
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv("traffic.start", self.traffic.start.to_string());
        kv(
            "traffic.interarrival_min",
            self.traffic.interarrival_min.to_string(),
        );
        kv(
            "traffic.interarrival_max",
            self.traffic.interarrival_max.to_string(),
        );
        kv(
            "traffic.size_mean_bits",
            self.traffic.size_mean_bits.to_string(),
        );
        kv("sweep.attackers", join(&self.sweep_attackers));
        kv("sweep.speeds", join(&self.sweep_speeds));
        s
    }
}

/// Every key the parser accepts, besides `node.<id>.position`.
pub fn known_keys() -> &'static [&'static str] {
    KEYS
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackhole::AttackMode;
    use proptest::prelude::*;

    #[test]
    fn empty_text_gives_table_defaults() {
        let cfg = ScenarioConfig::parse("").unwrap();
        assert_eq!(cfg.node_count, 46);
        assert_eq!(
            cfg.arena,
            Arena {
                width: 600.0,
                height: 600.0
            }
        );
        assert_eq!(cfg.duration, 600.0);
        assert_eq!(
            (cfg.traffic.interarrival_min, cfg.traffic.interarrival_max),
            (0.1, 0.11)
        );
        assert_eq!(cfg.traffic.size_mean_bits, 1024.0);
        assert_eq!(cfg.radio.tx_power_w, 0.0001);
        assert_eq!(cfg.radio.rx_threshold_dbm, -95.0);
        assert_eq!(
            cfg.flows,
            vec![Flow {
                source: NodeId(1),
                destination: NodeId(4)
            }]
        );
        assert_eq!(cfg, ScenarioConfig::default());
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg =
            ScenarioConfig::parse("# header\n  aodv.rreq_retries = 5   # inline\n\n").unwrap();
        assert_eq!(cfg.aodv.rreq_retries, 5);
    }

    #[test]
    fn single_node_rejected() {
        let err = ScenarioConfig::parse("node_count = 1\ntraffic.flows =\n").unwrap_err();
        assert!(err.keys().any(|k| k == "node_count"), "{err}");
    }

    #[test]
    fn attacker_cannot_be_an_endpoint() {
        let err =
            ScenarioConfig::parse("attackers.count = 1\nattackers.node_ids = 1\n").unwrap_err();
        assert!(err.keys().any(|k| k == "attackers.node_ids"), "{err}");
    }

    #[test]
    fn reports_every_problem() {
        let text = "node_count = 1\nbogus.key = 3\nduration = -5\nmobility.v_min = 6\nmobility.v_max = 2\naodv.net_diameter = lots\n";
        let err = ScenarioConfig::parse(text).unwrap_err();
        let keys: Vec<_> = err.keys().collect();
        for k in [
            "bogus.key",
            "aodv.net_diameter",
            "node_count",
            "duration",
            "mobility.v_max",
        ] {
            assert!(keys.contains(&k), "{k} missing from {err}");
        }
        let bogus = err.0.iter().find(|i| i.key == "bogus.key").unwrap();
        assert_eq!(bogus.line, Some(2));
    }

    #[test]
    fn duplicate_and_malformed_lines() {
        let err = ScenarioConfig::parse("duration = 5\nduration = 6\njust words\n").unwrap_err();
        assert_eq!(err.0.len(), 2);
    }

    #[test]
    fn flows_pins_and_sweeps_parse() {
        let text = "traffic.flows = 1->4, 2 -> 7\nnode.3.position = 10.5, 20\nsweep.attackers = 0,1,2\nsweep.speeds = 0, 5\nattackers.mode = both\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        assert_eq!(cfg.flows.len(), 2);
        assert_eq!(cfg.pins[&NodeId(3)], Position::new(10.5, 20.0));
        assert_eq!(cfg.attacker_counts(), vec![0, 1, 2]);
        assert_eq!(cfg.mobility_points()[0].model, MotionKind::Static);
        assert_eq!(cfg.mobility_points()[1].v_max, 5.0);
        assert_eq!(cfg.attackers.behavior.mode, AttackMode::Both);
    }

    #[test]
    fn pin_outside_arena_rejected() {
        let err = ScenarioConfig::parse("node.2.position = 700, 3\n").unwrap_err();
        assert!(err.keys().any(|k| k == "node.2.position"));
    }

    #[test]
    fn too_many_attackers_rejected() {
        let err = ScenarioConfig::parse("node_count = 4\nsweep.attackers = 0, 3\n").unwrap_err();
        assert!(err.keys().any(|k| k == "attackers.count"));
    }

    #[test]
    fn every_key_appears_in_emitted_text() {
        let text = ScenarioConfig::default().to_config_text();
        for k in known_keys() {
            assert!(text.contains(&format!("{k} =")), "{k}");
        }
    }

    proptest! {
        #[test]
        fn config_round_trip(
            nodes in 6usize..80,
            duration in 1.0f64..1000.0,
            v_min in 0.1f64..5.0,
            dv in 0.0f64..10.0,
            range in prop::option::of(10.0f64..400.0),
            seeds in prop::collection::vec(any::<u64>(), 1..5),
            count in 0usize..3,
            pin in prop::option::of((0.0f64..600.0, 0.0f64..600.0)),
            speeds in prop::collection::vec(0.0f64..20.0, 0..4),
        ) {
            let mut cfg = ScenarioConfig {
                node_count: nodes,
                duration,
                seeds,
                sweep_speeds: speeds,
                ..ScenarioConfig::default()
            };
            cfg.mobility.v_min = v_min;
            cfg.mobility.v_max = v_min + dv;
            cfg.radio.range_override_m = range;
            cfg.attackers.count = count;
            if let Some((x, y)) = pin {
                cfg.pins.insert(NodeId(5), Position::new(x, y));
            }
            prop_assert!(cfg.validate().is_ok());
            let back = ScenarioConfig::parse(&cfg.to_config_text()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
