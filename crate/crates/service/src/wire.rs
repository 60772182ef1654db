//! Session protocol: JSON control frames from the client, JSON acks and
//! errors plus binary result frames from the server.
//!
//! Binary frame layout, all little-endian:
//!
//! | bytes        | field                          |
//! |--------------|--------------------------------|
//! | 8            | frame id, `u64`                |
//! | 1            | operator tag (0 union, 1 intersect, 2 subtract) |
//! | 4            | vertex count `V`, `u32`        |
//! | 4            | triangle count `T`, `u32`      |
//! | 12 V         | positions, `f32` x y z         |
//! | 12 T         | indices, `u32` a b c           |
//! | T            | origin label bits per triangle |
//! | 4            | compute time in microseconds, `u32` |

use exactcsg::{BooleanOp, BooleanResult};
use serde::{Deserialize, Serialize};

pub const HEADER_LEN: usize = 8 + 1 + 4 + 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WireError {
    #[error("frame shorter than its header ({0} bytes)")]
    ShortHeader(usize),
    #[error("unknown operator tag {0}")]
    BadOp(u8),
    #[error("payload is {got} bytes but the header implies {want}")]
    Length { got: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameMessage {
    pub frame: u64,
    pub op: BooleanOp,
    pub positions: Vec<[f32; 3]>,
    pub triangles: Vec<[u32; 3]>,
    pub labels: Vec<u8>,
    pub compute_micros: u32,
}

impl FrameMessage {
    pub fn from_result(frame: u64, op: BooleanOp, r: &BooleanResult, compute_micros: u32) -> FrameMessage {
        FrameMessage {
            frame,
            op,
            positions: r
                .vertices
                .iter()
                .map(|p| p.to_array().map(|c| c as f32))
                .collect(),
            triangles: r.triangles.clone(),
            labels: r.labels.iter().map(|l| l.low_byte()).collect(),
            compute_micros,
        }
    }

    pub fn encoded_len(vertices: usize, triangles: usize) -> usize {
        HEADER_LEN + 12 * vertices + 13 * triangles + 4
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(Self::encoded_len(self.positions.len(), self.triangles.len()));
        b.extend_from_slice(&self.frame.to_le_bytes());
        b.push(self.op.tag());
        b.extend_from_slice(&(self.positions.len() as u32).to_le_bytes());
        b.extend_from_slice(&(self.triangles.len() as u32).to_le_bytes());
        for p in &self.positions {
            for c in p {
                b.extend_from_slice(&c.to_le_bytes());
            }
        }
        for t in &self.triangles {
            for v in t {
                b.extend_from_slice(&v.to_le_bytes());
            }
        }
        b.extend_from_slice(&self.labels);
        b.extend_from_slice(&self.compute_micros.to_le_bytes());
        b
    }

    pub fn decode(b: &[u8]) -> Result<FrameMessage, WireError> {
        if b.len() < HEADER_LEN {
            return Err(WireError::ShortHeader(b.len()));
        }
        let u32_at = |o: usize| u32::from_le_bytes([b[o], b[o + 1], b[o + 2], b[o + 3]]);
        let frame = u64::from_le_bytes(b[0..8].try_into().expect("8 bytes"));
        let op = BooleanOp::from_tag(b[8]).ok_or(WireError::BadOp(b[8]))?;
        let nv = u32_at(9) as usize;
        let nt = u32_at(13) as usize;
        let want = Self::encoded_len(nv, nt);
        if b.len() != want {
            return Err(WireError::Length { got: b.len(), want });
        }
        let mut o = HEADER_LEN;
        let positions = (0..nv)
            .map(|i| {
                let base = o + 12 * i;
                [0, 1, 2].map(|k| f32::from_bits(u32_at(base + 4 * k)))
            })
            .collect();
        o += 12 * nv;
        let triangles = (0..nt)
            .map(|i| {
                let base = o + 12 * i;
                [0, 1, 2].map(|k| u32_at(base + 4 * k))
            })
            .collect();
        o += 12 * nt;
        let labels = b[o..o + nt].to_vec();
        o += nt;
        Ok(FrameMessage {
            frame,
            op,
            positions,
            triangles,
            labels,
            compute_micros: u32_at(o),
        })
    }
}

/// Client to server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum Control {
    Load { a: String, b: String },
    Op { v: String },
    Xform { mesh: usize, m: Vec<f64> },
    Pause,
    Resume,
}

impl Control {
    pub fn name(&self) -> &'static str {
        match self {
            Control::Load { .. } => "load",
            Control::Op { .. } => "op",
            Control::Xform { .. } => "xform",
            Control::Pause => "pause",
            Control::Resume => "resume",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub loaded: bool,
    /// Input triangle counts.
    pub triangles: [usize; 2],
    pub op: BooleanOp,
    pub paused: bool,
    /// Id the next frame will carry.
    pub next_frame: u64,
    /// Id of the newest finished frame.
    pub latest_frame: Option<u64>,
    pub transforms: [[f64; 16]; 2],
}

/// Server to client, as text frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum Reply {
    Ack {
        #[serde(rename = "for")]
        request: String,
        state: StateSnapshot,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Error {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frame: Option<u64>,
        message: String,
    },
}

impl Reply {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reply serializes")
    }
}
