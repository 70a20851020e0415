//! Disk-model radio channel.
//!
//! Range comes from inverting free-space path loss for the configured
//! transmit power and reception threshold. Inside range every frame arrives
//! after serialization plus propagation delay; outside range nothing does.

use std::f64::consts::PI;

use crate::error::Result;
use crate::mobility::Mobility;
use crate::NodeId;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub tx_power_w: f64,
    pub rx_threshold_dbm: f64,
    pub frequency_hz: f64,
    pub bitrate_bps: f64,
    pub range_override_m: Option<f64>,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            tx_power_w: 0.0001,
            rx_threshold_dbm: -95.0,
            frequency_hz: 2.4e9,
            bitrate_bps: 1.0e6,
            range_override_m: None,
        }
    }
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1000.0).log10()
}

/// Free-space path loss in dB at distance `d` metres.
pub fn free_space_loss_db(d: f64, frequency_hz: f64) -> f64 {
    let wavelength = SPEED_OF_LIGHT / frequency_hz;
    20.0 * (4.0 * PI * d / wavelength).log10()
}

/// Largest distance at which the received power still meets the threshold,
/// or the override when one is set.
pub fn compute_range(cfg: &RadioConfig) -> f64 {
    if let Some(r) = cfg.range_override_m {
        return r;
    }
    let allowed_loss = watts_to_dbm(cfg.tx_power_w) - cfg.rx_threshold_dbm;
    let wavelength = SPEED_OF_LIGHT / cfg.frequency_hz;
    wavelength / (4.0 * PI) * 10f64.powf(allowed_loss / 20.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recipient {
    Node(NodeId),
    Broadcast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame<P> {
    pub sender: NodeId,
    pub recipient: Recipient,
    pub size_bits: u32,
    pub payload: P,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransmitOutcome {
    /// `(receiver, arrival time)` for every node that will get the frame.
    Delivered(Vec<(NodeId, f64)>),
    /// Unicast recipient out of range; the sender's routing layer must react.
    LinkFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    range: f64,
    bitrate: f64,
}

impl Channel {
    pub fn new(cfg: &RadioConfig) -> Self {
        Self {
            range: compute_range(cfg),
            bitrate: cfg.bitrate_bps,
        }
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn in_range(&self, distance: f64) -> bool {
        distance <= self.range
    }

    pub fn latency(&self, size_bits: u32, distance: f64) -> f64 {
        f64::from(size_bits) / self.bitrate + distance / SPEED_OF_LIGHT
    }

    /// Nodes within range of `node` at `time`, in id order.
    pub fn neighbors(&self, mobility: &Mobility, node: NodeId, time: f64) -> Result<Vec<NodeId>> {
        let here = mobility.position_at(node, time)?;
        let mut out = Vec::new();
        for i in 0..mobility.node_count() {
            let other = NodeId(i as u32);
            if other == node {
                continue;
            }
            if self.in_range(here.distance(&mobility.position_at(other, time)?)) {
                out.push(other);
            }
        }
        Ok(out)
    }

    /// Reachability is sampled once, at `time`, and holds for the whole flight.
    pub fn transmit<P>(
        &self,
        mobility: &Mobility,
        frame: &Frame<P>,
        time: f64,
    ) -> Result<TransmitOutcome> {
        let here = mobility.position_at(frame.sender, time)?;
        match frame.recipient {
            Recipient::Broadcast => {
                let mut out = Vec::new();
                for n in self.neighbors(mobility, frame.sender, time)? {
                    let d = here.distance(&mobility.position_at(n, time)?);
                    out.push((n, time + self.latency(frame.size_bits, d)));
                }
                Ok(TransmitOutcome::Delivered(out))
            }
            Recipient::Node(to) => {
                let d = here.distance(&mobility.position_at(to, time)?);
                if to != frame.sender && self.in_range(d) {
                    Ok(TransmitOutcome::Delivered(vec![(
                        to,
                        time + self.latency(frame.size_bits, d),
                    )]))
                } else {
                    Ok(TransmitOutcome::LinkFailure)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::mobility::{Arena, MobilityModel, Position};

    fn placed(points: &[(f64, f64)]) -> Mobility {
        let pins: BTreeMap<_, _> = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| (NodeId(i as u32), Position::new(x, y)))
            .collect();
        Mobility::new(
            0,
            points.len(),
            Arena::default(),
            MobilityModel::Static,
            &pins,
        )
        .unwrap()
    }

    /// Bisection on the loss curve, independent of the closed form.
    fn range_by_bisection(cfg: &RadioConfig) -> f64 {
        let budget = watts_to_dbm(cfg.tx_power_w) - cfg.rx_threshold_dbm;
        let (mut lo, mut hi) = (1e-6, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if free_space_loss_db(mid, cfg.frequency_hz) <= budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn default_radio_range_near_177_m() {
        let cfg = RadioConfig::default();
        assert!((watts_to_dbm(cfg.tx_power_w) - -10.0).abs() < 1e-12);
        let r = compute_range(&cfg);
        assert!((r - range_by_bisection(&cfg)).abs() < 1e-6);
        // 176.9 m with c rounded to 3e8; 176.77 m with the exact constant
        assert!((r - 176.9).abs() < 0.2, "{r}");
        assert!((free_space_loss_db(r, cfg.frequency_hz) - 85.0).abs() < 1e-9);
    }

    #[test]
    fn zero_loss_budget_gives_lambda_over_four_pi() {
        let cfg = RadioConfig {
            rx_threshold_dbm: -10.0,
            ..RadioConfig::default()
        };
        let lambda = SPEED_OF_LIGHT / cfg.frequency_hz;
        assert!((compute_range(&cfg) - lambda / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn override_ignores_power_and_threshold() {
        let cfg = RadioConfig {
            tx_power_w: 5.0,
            rx_threshold_dbm: 10.0,
            range_override_m: Some(250.0),
            ..RadioConfig::default()
        };
        assert_eq!(compute_range(&cfg), 250.0);
    }

    #[test]
    fn neighbor_membership_and_boundary() {
        let ch = Channel {
            range: 176.9,
            bitrate: 1e6,
        };
        let m = placed(&[(0.0, 0.0), (100.0, 0.0), (300.0, 0.0), (476.9, 0.0)]);
        assert_eq!(ch.neighbors(&m, NodeId(0), 0.0).unwrap(), vec![NodeId(1)]);
        assert_eq!(ch.neighbors(&m, NodeId(1), 0.0).unwrap(), vec![NodeId(0)]);
        // 200 m apart: out of range; 176.9 exactly: in range
        assert_eq!(ch.neighbors(&m, NodeId(2), 0.0).unwrap(), vec![NodeId(3)]);
        assert!(!ch
            .neighbors(&m, NodeId(2), 0.0)
            .unwrap()
            .contains(&NodeId(2)));
    }

    #[test]
    fn broadcast_reaches_every_neighbor() {
        let ch = Channel {
            range: 150.0,
            bitrate: 1e6,
        };
        let m = placed(&[
            (300.0, 300.0),
            (400.0, 300.0),
            (300.0, 400.0),
            (200.0, 300.0),
            (0.0, 0.0),
        ]);
        let frame = Frame {
            sender: NodeId(0),
            recipient: Recipient::Broadcast,
            size_bits: 192,
            payload: (),
        };
        let TransmitOutcome::Delivered(d) = ch.transmit(&m, &frame, 1.0).unwrap() else {
            panic!()
        };
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn unicast_out_of_range_is_link_failure() {
        let ch = Channel {
            range: 150.0,
            bitrate: 1e6,
        };
        let m = placed(&[(0.0, 0.0), (200.0, 0.0)]);
        let frame = Frame {
            sender: NodeId(0),
            recipient: Recipient::Node(NodeId(1)),
            size_bits: 1024,
            payload: (),
        };
        assert_eq!(
            ch.transmit(&m, &frame, 0.0).unwrap(),
            TransmitOutcome::LinkFailure
        );
    }

    #[test]
    fn unicast_delay_is_serialization_plus_propagation() {
        let ch = Channel {
            range: 176.9,
            bitrate: 1e6,
        };
        let m = placed(&[(0.0, 0.0), (150.0, 0.0)]);
        let frame = Frame {
            sender: NodeId(0),
            recipient: Recipient::Node(NodeId(1)),
            size_bits: 1024,
            payload: (),
        };
        let TransmitOutcome::Delivered(d) = ch.transmit(&m, &frame, 2.0).unwrap() else {
            panic!()
        };
        let expected = 2.0 + 0.001024 + 150.0 / 299_792_458.0;
        assert_eq!(d.len(), 1);
        assert!((d[0].1 - expected).abs() < 1e-12);
        assert!((150.0_f64 / 299_792_458.0 - 5.0e-7).abs() < 1e-9);
    }
}
