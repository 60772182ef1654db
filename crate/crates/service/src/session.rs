//! State of one interactive session and the per-frame computation.
//!
//! Control messages only edit the state; the compute side takes a
//! snapshot when it is idle, so any number of transform updates that
//! arrive during one frame collapse into the single snapshot taken next.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use exactcsg::{boolean, BooleanOp, BooleanOptions, Mesh, RigidTransform};

use crate::wire::{Control, FrameMessage, StateSnapshot};

/// Larger deviations from a rigid motion are reported back to the client.
pub const RIGIDITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("cannot load `{path}`: {message}")]
    Load { path: String, message: String },
    #[error("{0}")]
    BadRequest(String),
}

/// Inputs of one frame.
#[derive(Debug, Clone)]
pub struct Job {
    pub frame: u64,
    pub meshes: [Arc<Mesh>; 2],
    pub transforms: [RigidTransform; 2],
    pub op: BooleanOp,
}

impl Job {
    pub fn inputs(&self) -> [Mesh; 2] {
        [0, 1].map(|i| self.meshes[i].transformed(&self.transforms[i]))
    }

    /// Runs the Boolean from scratch on freshly transformed copies.
    pub fn run(&self, options: &BooleanOptions) -> Result<FrameMessage, exactcsg::Error> {
        let t = Instant::now();
        let r = boolean(&self.inputs(), self.op, options)?;
        let micros = t.elapsed().as_micros().min(u32::MAX as u128) as u32;
        Ok(FrameMessage::from_result(self.frame, self.op, &r, micros))
    }
}

#[derive(Debug)]
pub struct Session {
    meshes: Option<[Arc<Mesh>; 2]>,
    transforms: [RigidTransform; 2],
    op: BooleanOp,
    paused: bool,
    next_frame: u64,
    in_flight: bool,
    /// Front buffer: the newest finished frame.
    latest: Option<Arc<FrameMessage>>,
    /// Frames started so far.
    started: u64,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            meshes: None,
            transforms: [RigidTransform::identity(); 2],
            op: BooleanOp::Union,
            paused: false,
            next_frame: 0,
            in_flight: false,
            latest: None,
            started: 0,
        }
    }
}

impl Session {
    pub fn new() -> Session {
        Session::default()
    }

    pub fn set_meshes(&mut self, a: Mesh, b: Mesh) {
        self.meshes = Some([Arc::new(a), Arc::new(b)]);
    }

    /// Applies a control message. Returns an optional note for the ack.
    pub fn handle(&mut self, c: Control) -> Result<Option<String>, SessionError> {
        match c {
            Control::Load { a, b } => {
                let (ma, mb) = load_pair(&a, &b)?;
                self.set_meshes(ma, mb);
                Ok(None)
            }
            Control::Op { v } => {
                self.op = v
                    .parse()
                    .map_err(|_| SessionError::BadRequest(format!("unknown operator `{v}`")))?;
                Ok(None)
            }
            Control::Xform { mesh, m } => {
                if mesh > 1 {
                    return Err(SessionError::BadRequest(format!("mesh index {mesh} is not 0 or 1")));
                }
                let m: [f64; 16] = m.try_into().map_err(|v: Vec<f64>| {
                    SessionError::BadRequest(format!("transform has {} entries, expected 16", v.len()))
                })?;
                let raw = RigidTransform { m };
                let err = raw.rigidity_error();
                let fixed = raw.orthonormalized();
                self.transforms[mesh] = fixed;
                Ok((!(err <= RIGIDITY_TOLERANCE))
                    .then(|| format!("transform re-orthonormalized (deviation {err:.3e})")))
            }
            Control::Pause => {
                self.paused = true;
                Ok(None)
            }
            Control::Resume => {
                self.paused = false;
                Ok(None)
            }
        }
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            loaded: self.meshes.is_some(),
            triangles: self
                .meshes
                .as_ref()
                .map(|m| [m[0].triangles.len(), m[1].triangles.len()])
                .unwrap_or_default(),
            op: self.op,
            paused: self.paused,
            next_frame: self.next_frame,
            latest_frame: self.latest.as_ref().map(|f| f.frame),
            transforms: self.transforms.map(|t| t.m),
        }
    }

    /// Starts a frame from the current state, unless one is already
    /// running, the session is paused or nothing is loaded.
    pub fn begin_frame(&mut self) -> Option<Job> {
        if self.in_flight || self.paused {
            return None;
        }
        let meshes = self.meshes.clone()?;
        let job = Job {
            frame: self.next_frame,
            meshes,
            transforms: self.transforms,
            op: self.op,
        };
        self.next_frame += 1;
        self.in_flight = true;
        self.started += 1;
        Some(job)
    }

    /// Swaps the finished frame in, or just clears the in-flight slot.
    pub fn end_frame(&mut self, frame: Option<Arc<FrameMessage>>) {
        self.in_flight = false;
        if let Some(f) = frame {
            self.latest = Some(f);
        }
    }

    pub fn in_flight(&self) -> bool {
        self.in_flight
    }

    pub fn frames_started(&self) -> u64 {
        self.started
    }

    pub fn latest(&self) -> Option<Arc<FrameMessage>> {
        self.latest.clone()
    }
}

pub fn load_pair(a: &str, b: &str) -> Result<(Mesh, Mesh), SessionError> {
    Ok((load(a)?, load(b)?))
}

fn load(path: &str) -> Result<Mesh, SessionError> {
    exactcsg::io::load(Path::new(path)).map_err(|e| SessionError::Load {
        path: path.to_string(),
        message: e.to_string(),
    })
}
