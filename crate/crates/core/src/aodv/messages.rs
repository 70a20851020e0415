use std::fmt;

use crate::traffic::DataPacket;
use crate::NodeId;

pub type SeqNo = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rreq {
    pub originator: NodeId,
    pub originator_seq: SeqNo,
    pub rreq_id: u32,
    pub destination: NodeId,
    pub dest_seq: SeqNo,
    pub dest_seq_unknown: bool,
    pub hop_count: u32,
    pub ttl: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rrep {
    /// The node that started the discovery; the reply travels back to it.
    pub originator: NodeId,
    pub destination: NodeId,
    pub dest_seq: SeqNo,
    pub hop_count: u32,
    pub lifetime: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rerr {
    pub unreachable: Vec<(NodeId, SeqNo)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControlMessage {
    Rreq(Rreq),
    Rrep(Rrep),
    Rerr(Rerr),
}

impl ControlMessage {
    /// On-air size in bits, using the fixed AODV message layouts
    /// (24-byte RREQ, 20-byte RREP, 4 + 8n byte RERR).
    pub fn size_bits(&self) -> u32 {
        match self {
            ControlMessage::Rreq(_) => 24 * 8,
            ControlMessage::Rrep(_) => 20 * 8,
            ControlMessage::Rerr(e) => (4 + 8 * e.unreachable.len() as u32) * 8,
        }
    }
}

impl fmt::Display for ControlMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlMessage::Rreq(r) => write!(
                f,
                "RREQ orig={} oseq={} id={} dst={} dseq={}{} hops={} ttl={}",
                r.originator,
                r.originator_seq,
                r.rreq_id,
                r.destination,
                r.dest_seq,
                if r.dest_seq_unknown { "?" } else { "" },
                r.hop_count,
                r.ttl
            ),
            ControlMessage::Rrep(r) => write!(
                f,
                "RREP orig={} dst={} dseq={} hops={}",
                r.originator, r.destination, r.dest_seq, r.hop_count
            ),
            ControlMessage::Rerr(e) => {
                f.write_str("RERR")?;
                for (d, s) in &e.unreachable {
                    write!(f, " {d}:{s}")?;
                }
                Ok(())
            }
        }
    }
}

/// What a frame carries.
#[derive(Debug, Clone, PartialEq)]
pub enum FramePayload {
    Control(ControlMessage),
    Data(DataPacket),
}

impl FramePayload {
    pub fn size_bits(&self) -> u32 {
        match self {
            FramePayload::Control(c) => c.size_bits(),
            FramePayload::Data(p) => p.size_bits,
        }
    }
}

impl fmt::Display for FramePayload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FramePayload::Control(c) => c.fmt(f),
            FramePayload::Data(p) => write!(
                f,
                "DATA id={} {}->{} bits={}",
                p.id, p.source, p.destination, p.size_bits
            ),
        }
    }
}
