mod common;

use std::collections::HashMap;

use common::*;
use manet_sim::aodv::{ControlMessage, FramePayload};
use manet_sim::blackhole::AttackMode;
use manet_sim::mobility::Position;
use manet_sim::radio::Recipient;
use manet_sim::NodeId;
use proptest::prelude::*;

#[test]
fn flood_installs_reverse_route_along_the_line() {
    // S=0, A=1, B=2, D=3
    let cfg = line(4, 2.0);
    let out = run(&cfg, 1);
    let rev = route(&out, 3, 0).expect("destination learns the source");
    assert_eq!((rev.hop_count, rev.next_hop), (3, NodeId(2)));
    let fwd = route(&out, 0, 3).expect("source learns the destination");
    assert_eq!((fwd.hop_count, fwd.next_hop), (3, NodeId(1)));
    assert_eq!(out.metrics.dropped_no_route, 0);
}

#[test]
fn forged_reply_captures_line() {
    // S=0, M=1 attacker, A=2, D=3
    let cfg = with_attackers(line(4, 5.0), &[1], AttackMode::FakeRrep);
    let out = run(&cfg, 1);
    let r = route(&out, 0, 3).unwrap();
    assert_eq!(r.next_hop, NodeId(1));
    assert_eq!(r.dest_seq, 100);
    assert_eq!(out.metrics.delivered, 0);
}

#[test]
fn forged_reply_beats_genuine_reply_on_two_paths() {
    // S=0 reaches D=4 via M=1 (two hops) and via A=2, B=3 (three hops).
    let pts = [
        (100.0, 300.0),
        (200.0, 380.0),
        (200.0, 220.0),
        (300.0, 220.0),
        (300.0, 380.0),
    ];
    let mut cfg = pinned(&pts, 130.0, 0, 4, 5.0);
    cfg = with_attackers(cfg, &[1], AttackMode::FakeRrep);
    let hops = bfs_hops(&pts, 130.0, 0);
    assert_eq!(hops[4], Some(2));

    let out = run(&cfg, 3);
    let tx = out.transmissions.as_ref().unwrap();
    let rreps: Vec<_> = tx
        .iter()
        .filter(|t| t.recipient == Recipient::Node(NodeId(0)))
        .filter_map(|t| match &t.payload {
            FramePayload::Control(ControlMessage::Rrep(r)) => Some((t.time, t.sender, r.dest_seq)),
            _ => None,
        })
        .collect();
    // the forged reply is the first one addressed to S
    assert_eq!(rreps.first().map(|r| r.1), Some(NodeId(1)));
    let r = route(&out, 0, 4).unwrap();
    assert_eq!(r.next_hop, NodeId(1));
    assert_eq!(out.metrics.delivered, 0);
    assert_eq!(
        out.metrics.dropped_by_attacker + out.metrics.in_flight_at_end,
        out.metrics.sent
    );
}

#[test]
fn link_break_without_alternative_drops_until_horizon() {
    // S=0, A=1, D=2
    let cfg = line(3, 30.0);
    let mut sim = simulation(&cfg, 1, false);
    sim.run_until(10.0).unwrap();
    let before = sim.metrics();
    assert!(before.delivered > 80);
    sim.mobility_mut()
        .relocate(NodeId(2), Position::new(590.0, 10.0))
        .unwrap();
    let out = sim.run().unwrap();
    let m = out.metrics;
    assert!(m.delivered <= before.delivered + 1, "{m:?}");
    assert!(m.dropped_no_route > 0);
    let src = route(&out, 0, 2).unwrap();
    assert!(!src.valid);
    // every post-break packet is lost or still waiting on discovery
    assert_eq!(
        m.sent - m.delivered,
        m.dropped_no_route + m.dropped_buffer + m.in_flight_at_end
    );
}

#[test]
fn forged_request_poisons_route_to_victim() {
    // node 0 sends to node 2 through relay 1; attacker 3 hangs off node 0.
    let pts = [
        (100.0, 300.0),
        (200.0, 300.0),
        (300.0, 300.0),
        (100.0, 400.0),
    ];
    let mut cfg = pinned(&pts, 120.0, 0, 2, 30.0);
    cfg = with_attackers(cfg, &[3], AttackMode::FakeRreq);
    cfg.attackers.behavior.fake_rreq_period = 10.0;
    let mut sim = simulation(&cfg, 1, false);
    sim.run_until(9.0).unwrap();
    let victim_seq = sim.node(NodeId(2)).unwrap().own_seq();
    assert!(sim.metrics().delivered > 50);
    let delivered_before = sim.metrics().delivered;

    sim.run_until(10.5).unwrap();
    let entry = *sim.node(NodeId(0)).unwrap().table().get(NodeId(2)).unwrap();
    assert_eq!(entry.next_hop, NodeId(3));
    assert_eq!(entry.dest_seq, victim_seq + 100);

    let out = sim.run().unwrap();
    assert!(out.metrics.delivered <= delivered_before + 10);
    assert!(out.metrics.dropped_by_attacker > 150);
}

#[test]
fn forged_requests_follow_the_period() {
    let mut cfg = with_attackers(line(4, 600.0), &[2], AttackMode::FakeRreq);
    cfg.attackers.behavior.fake_rreq_period = 10.0;
    cfg.traffic.interarrival_min = 5.0;
    cfg.traffic.interarrival_max = 6.0;
    let out = run(&cfg, 1);
    let forged = out
        .transmissions
        .unwrap()
        .iter()
        .filter(|t| {
            t.sender == NodeId(2)
                && matches!(&t.payload, FramePayload::Control(ControlMessage::Rreq(r)) if r.rreq_id & 0x8000_0000 != 0 && r.hop_count == 0)
        })
        .count();
    assert_eq!(forged, 60);
}

#[test]
fn attacker_swallows_transit_but_keeps_its_own_traffic() {
    let cfg = with_attackers(line(3, 11.0), &[1], AttackMode::FakeRrep);
    let out = run(&cfg, 2);
    assert!(out.metrics.sent >= 100);
    assert_eq!(out.metrics.delivered, 0);
    assert_eq!(
        out.metrics.dropped_by_attacker + out.metrics.in_flight_at_end,
        out.metrics.sent
    );
}

#[test]
fn attacker_node_drops_transit_and_accepts_its_own() {
    use manet_sim::aodv::{Action, AodvNode, AodvParams, DropReason};
    use manet_sim::blackhole::AttackerConfig;
    use manet_sim::traffic::DataPacket;

    let mut node = AodvNode::attacker(NodeId(1), AodvParams::default(), AttackerConfig::default());
    let packet = |id, destination| DataPacket {
        id,
        source: NodeId(0),
        destination,
        size_bits: 1024,
        created_at: 0.0,
    };
    let mut out = Vec::new();
    for id in 0..100 {
        node.on_frame(
            id as f64 * 0.1,
            NodeId(0),
            FramePayload::Data(packet(id, NodeId(2))),
            &mut out,
        );
    }
    assert_eq!(out.len(), 100);
    assert!(out.iter().all(|a| matches!(
        a,
        Action::Drop {
            reason: DropReason::Attacker,
            ..
        }
    )));

    out.clear();
    node.on_frame(
        11.0,
        NodeId(0),
        FramePayload::Data(packet(100, NodeId(1))),
        &mut out,
    );
    assert!(matches!(out.as_slice(), [Action::Deliver(p)] if p.id == 100));
}

#[test]
fn zero_attackers_static_connected_never_attributes_to_attacker() {
    let pts = [
        (50.0, 50.0),
        (150.0, 60.0),
        (250.0, 40.0),
        (260.0, 150.0),
        (350.0, 160.0),
    ];
    let out = run(&pinned(&pts, 120.0, 0, 4, 20.0), 4);
    assert_eq!(out.metrics.dropped_by_attacker, 0);
    assert!(out.metrics.pdr.unwrap() > 0.99);
}

#[test]
fn single_path_capture_after_first_discovery() {
    let cfg = with_attackers(line(5, 30.0), &[2], AttackMode::FakeRrep);
    let mut sim = simulation(&cfg, 9, false);
    sim.run_until(1.0).unwrap();
    let early = sim.metrics();
    let out = sim.run().unwrap();
    assert_eq!(out.metrics.delivered, early.delivered);
    assert_eq!(out.metrics.delivered, 0);
}

fn random_static_points(seed: u64, n: usize) -> Vec<(f64, f64)> {
    use manet_sim::rng::{RandomStream, StreamKind};
    let mut s = RandomStream::new(seed, StreamKind::Mobility, 999);
    (0..n)
        .map(|_| (s.next_unit() * 400.0, s.next_unit() * 400.0))
        .collect()
}

#[test]
fn honest_tables_are_loop_free_after_convergence() {
    let mut checked = 0;
    for seed in 0..30 {
        let pts = random_static_points(seed, 12);
        if bfs_hops(&pts, 150.0, 0).iter().any(Option::is_none) {
            continue;
        }
        let mut cfg = pinned(&pts, 150.0, 0, 11, 5.0);
        cfg.flows.push(manet_sim::traffic::Flow {
            source: NodeId(5),
            destination: NodeId(2),
        });
        let out = run(&cfg, seed);
        let next: HashMap<(u32, u32), u32> = out
            .tables
            .iter()
            .filter(|(_, e)| e.valid)
            .map(|(o, e)| ((o.0, e.destination.0), e.next_hop.0))
            .collect();
        for &(owner, dest) in next.keys() {
            let mut at = owner;
            let mut visited = vec![at];
            while at != dest {
                match next.get(&(at, dest)) {
                    Some(&hop) => {
                        assert!(
                            !visited.contains(&hop),
                            "loop toward {dest}: {visited:?} -> {hop}"
                        );
                        visited.push(hop);
                        at = hop;
                    }
                    None => break,
                }
            }
        }
        checked += 1;
    }
    assert!(checked >= 10);
}

#[test]
fn honest_runs_keep_sequence_numbers_monotone() {
    for seed in 1..4 {
        let mut cfg = manet_sim::ScenarioConfig {
            duration: 120.0,
            ..Default::default()
        };
        cfg.mobility.v_min = 5.0;
        cfg.mobility.v_max = 15.0;
        cfg.mobility.pause = 0.0;
        let mut sim = simulation(&cfg, seed, false);
        let mut last: HashMap<(u32, u32), u32> = HashMap::new();
        let mut own: Vec<u32> = vec![0; cfg.node_count];
        let mut t = 0.0;
        while t < cfg.duration {
            t += 0.02;
            sim.run_until(t).unwrap();
            for n in sim.nodes() {
                assert!(n.own_seq() >= own[n.id().index()]);
                own[n.id().index()] = n.own_seq();
                for e in n.table().iter() {
                    let key = (n.id().0, e.destination.0);
                    if let Some(prev) = last.insert(key, e.dest_seq) {
                        assert!(
                            e.dest_seq >= prev,
                            "seed {seed} t={t} node {} dest {}: {prev} -> {}",
                            key.0,
                            key.1,
                            e.dest_seq
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn each_request_is_rebroadcast_at_most_once_per_node() {
    for seed in 1..4 {
        let cfg = manet_sim::ScenarioConfig {
            duration: 60.0,
            ..manet_sim::ScenarioConfig::default()
        };
        let out = run(&cfg, seed);
        let mut seen: HashMap<(NodeId, NodeId, u32), u32> = HashMap::new();
        for t in out.transmissions.unwrap() {
            if let FramePayload::Control(ControlMessage::Rreq(r)) = &t.payload {
                *seen.entry((t.sender, r.originator, r.rreq_id)).or_default() += 1;
            }
        }
        assert!(!seen.is_empty());
        assert!(seen.values().all(|&c| c == 1));
    }
}

#[test]
fn attackers_never_forward_data() {
    let mut cfg = manet_sim::ScenarioConfig {
        duration: 120.0,
        ..manet_sim::ScenarioConfig::default()
    };
    cfg.attackers.count = 3;
    cfg.attackers.behavior.mode = AttackMode::Both;
    for seed in 1..3 {
        let out = run(&cfg, seed);
        for t in out.transmissions.as_ref().unwrap() {
            if let FramePayload::Data(p) = &t.payload {
                assert!(!out.attackers.contains(&t.sender) || p.source == t.sender);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neighbor_relation_is_symmetric(pts in prop::collection::vec((0.0f64..600.0, 0.0f64..600.0), 2..20), t in 0.0f64..100.0) {
        let cfg = pinned(&pts, 177.0, 0, 1, 100.0);
        let sim = simulation(&cfg, 0, false);
        let ch = sim.channel();
        for a in 0..pts.len() as u32 {
            for b in ch.neighbors(sim.mobility(), NodeId(a), t).unwrap() {
                prop_assert!(ch.neighbors(sim.mobility(), b, t).unwrap().contains(&NodeId(a)));
            }
        }
    }

    #[test]
    fn mobile_neighbors_are_symmetric(seed in 0u64..1000, t in 0.0f64..50.0) {
        let cfg = manet_sim::ScenarioConfig { node_count: 15, ..manet_sim::ScenarioConfig::default() };
        let mut sim = simulation(&cfg, seed, false);
        sim.run_until(t).unwrap();
        let ch = *sim.channel();
        for a in 0..15u32 {
            let pa = sim.mobility().position_at(NodeId(a), t).unwrap();
            prop_assert!(sim.mobility().arena().contains(&pa));
            for b in ch.neighbors(sim.mobility(), NodeId(a), t).unwrap() {
                prop_assert!(ch.neighbors(sim.mobility(), b, t).unwrap().contains(&NodeId(a)));
            }
        }
    }
}
