#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use manet_sim::blackhole::AttackMode;
use manet_sim::config::ScenarioConfig;
use manet_sim::mobility::{MotionKind, Position};
use manet_sim::sim::{RunOptions, RunOutput, RunSpec, Simulation};
use manet_sim::traffic::Flow;
use manet_sim::NodeId;

/// Static scenario with every node pinned, one flow, and an explicit range.
pub fn pinned(
    points: &[(f64, f64)],
    range: f64,
    src: u32,
    dst: u32,
    duration: f64,
) -> ScenarioConfig {
    let mut cfg = ScenarioConfig {
        node_count: points.len(),
        duration,
        flows: vec![Flow {
            source: NodeId(src),
            destination: NodeId(dst),
        }],
        ..ScenarioConfig::default()
    };
    cfg.mobility.model = MotionKind::Static;
    cfg.radio.range_override_m = Some(range);
    cfg.pins = points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| (NodeId(i as u32), Position::new(x, y)))
        .collect::<BTreeMap<_, _>>();
    cfg
}

/// Nodes evenly spaced 100 m apart on a line, range 150 m, flow first -> last.
pub fn line(n: usize, duration: f64) -> ScenarioConfig {
    let points: Vec<(f64, f64)> = (0..n).map(|i| (50.0 + 100.0 * i as f64, 300.0)).collect();
    pinned(&points, 150.0, 0, n as u32 - 1, duration)
}

pub fn with_attackers(mut cfg: ScenarioConfig, ids: &[u32], mode: AttackMode) -> ScenarioConfig {
    cfg.attackers.count = ids.len();
    cfg.attackers.node_ids = Some(ids.iter().copied().map(NodeId).collect());
    cfg.attackers.behavior.mode = mode;
    cfg
}

pub fn simulation(cfg: &ScenarioConfig, seed: u64, record: bool) -> Simulation {
    let spec = RunSpec {
        seed,
        ..RunSpec::from_config(cfg)
    };
    let opts = RunOptions {
        trace: record,
        record_transmissions: record,
    };
    Simulation::new(cfg, &spec, opts).expect("valid scenario")
}

pub fn run(cfg: &ScenarioConfig, seed: u64) -> RunOutput {
    simulation(cfg, seed, true).run().expect("run succeeds")
}

/// Hop distances from `src` in the disk graph (`None` if unreachable).
/// Brute force: all pairs checked directly, plain BFS.
pub fn bfs_hops(points: &[(f64, f64)], range: f64, src: usize) -> Vec<Option<u32>> {
    let n = points.len();
    let adjacent = |a: usize, b: usize| {
        let (dx, dy) = (points[a].0 - points[b].0, points[a].1 - points[b].1);
        a != b && (dx * dx + dy * dy).sqrt() <= range
    };
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if dist[v].is_none() && adjacent(u, v) {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn route(out: &RunOutput, owner: u32, dest: u32) -> Option<manet_sim::aodv::RoutingEntry> {
    out.tables
        .iter()
        .find(|(o, e)| *o == NodeId(owner) && e.destination == NodeId(dest))
        .map(|(_, e)| *e)
}
