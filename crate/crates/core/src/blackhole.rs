//! Black-hole adversaries.
//!
//! An attacker advertises a route it does not have, with an inflated
//! sequence number and a tiny hop count, so that honest nodes pick it as the
//! next hop. Every transit data packet it then receives is discarded.
//!
//! Two constructions are supported. With [`AttackMode::FakeRrep`] the
//! attacker answers each overheard RREQ itself. With [`AttackMode::FakeRreq`]
//! it periodically floods requests that impersonate a victim originator,
//! which poisons everyone's reverse route to that victim.

use std::fmt;
use std::str::FromStr;

use crate::aodv::{Action, AodvParams, DropReason, Rrep, Rreq, SeqNo};
use crate::radio::Recipient;
use crate::traffic::DataPacket;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackMode {
    FakeRrep,
    FakeRreq,
    Both,
}

impl AttackMode {
    pub fn forges_replies(self) -> bool {
        matches!(self, AttackMode::FakeRrep | AttackMode::Both)
    }

    pub fn forges_requests(self) -> bool {
        matches!(self, AttackMode::FakeRreq | AttackMode::Both)
    }
}

impl fmt::Display for AttackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackMode::FakeRrep => "fake_rrep",
            AttackMode::FakeRreq => "fake_rreq",
            AttackMode::Both => "both",
        })
    }
}

impl FromStr for AttackMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fake_rrep" => Ok(AttackMode::FakeRrep),
            "fake_rreq" => Ok(AttackMode::FakeRreq),
            "both" => Ok(AttackMode::Both),
            other => Err(format!(
                "unknown attack mode `{other}` (expected fake_rrep, fake_rreq or both)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackerConfig {
    pub mode: AttackMode,
    /// Added to the victim's sequence number in every forgery. At least 1.
    pub seq_inflation: SeqNo,
    pub advertised_hop_count: u32,
    pub fake_rreq_period: f64,
}

impl Default for AttackerConfig {
    fn default() -> Self {
        Self {
            mode: AttackMode::FakeRrep,
            seq_inflation: 100,
            advertised_hop_count: 0,
            fake_rreq_period: 10.0,
        }
    }
}

/// A forged reply together with how it goes on the air.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForgedReply {
    pub rrep: Rrep,
    pub sender: NodeId,
    pub unicast_to: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForgedRequest {
    pub rreq: Rreq,
    pub sender: NodeId,
    pub recipient: Recipient,
}

/// Answers `rreq` as if the attacker had a fresh route to its destination.
///
/// Originator and destination are copied from the request, the reply leaves
/// from the attacker itself and goes straight back to `received_from`. The
/// forged sequence number is the requested one (0 when unknown) plus the
/// inflation margin.
pub fn craft_fake_rrep(
    attacker: NodeId,
    rreq: &Rreq,
    received_from: NodeId,
    cfg: &AttackerConfig,
    params: &AodvParams,
) -> ForgedReply {
    let base = if rreq.dest_seq_unknown {
        0
    } else {
        rreq.dest_seq
    };
    ForgedReply {
        rrep: Rrep {
            originator: rreq.originator,
            destination: rreq.destination,
            dest_seq: base.saturating_add(cfg.seq_inflation),
            hop_count: cfg.advertised_hop_count,
            lifetime: params.active_route_timeout,
        },
        sender: attacker,
        unicast_to: received_from,
    }
}

/// Builds a broadcast RREQ that claims to come from `victim_src`.
///
/// `victim_seq` is the victim's current sequence number; the forgery carries
/// it plus the inflation margin so that receivers replace any genuine
/// reverse route to the victim with one through the attacker. `forged_id` must
/// not collide with the victim's own request ids.
pub fn craft_fake_rreq(
    attacker: NodeId,
    victim_src: NodeId,
    victim_dst: NodeId,
    victim_seq: SeqNo,
    forged_id: u32,
    cfg: &AttackerConfig,
    params: &AodvParams,
) -> ForgedRequest {
    ForgedRequest {
        rreq: Rreq {
            originator: victim_src,
            originator_seq: victim_seq.saturating_add(cfg.seq_inflation),
            rreq_id: forged_id,
            destination: victim_dst,
            dest_seq: 0,
            dest_seq_unknown: true,
            hop_count: cfg.advertised_hop_count,
            ttl: params.net_diameter,
        },
        sender: attacker,
        recipient: Recipient::Broadcast,
    }
}

/// Request ids used by forged RREQs live in the upper half of the id space.
pub fn forged_rreq_id(counter: u32) -> u32 {
    0x8000_0000 | counter
}

/// A transit data packet reaching an attacker is silently swallowed.
pub fn attacker_on_data(packet: DataPacket) -> Action {
    Action::Drop {
        packet,
        reason: DropReason::Attacker,
    }
}
