//! Reference implementation of mesh Booleans in plain rational arithmetic.
//!
//! Slow on purpose: every candidate triangle pair is intersected with
//! rational coordinates, every cut triangle is split into explicit
//! polygonal faces and every face region is classified by crossing parity
//! along a random ray. Only topology (components, Euler characteristic)
//! and exact volumes are meant to be compared against.

mod boolean;
pub mod pslg;
pub mod rat;
pub mod tritri;

pub use boolean::{point_inside, topology, OracleResult, OutFace};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InputMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Union,
    Intersection,
    /// First mesh minus all others.
    Subtraction,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

pub fn boolean(meshes: &[InputMesh], op: Op) -> Result<OracleResult, OracleError> {
    boolean::run(meshes, op)
}

/// Results for several operators from a single cut, in the order given.
pub fn boolean_many(meshes: &[InputMesh], ops: &[Op]) -> Result<Vec<OracleResult>, OracleError> {
    boolean::run_many(meshes, ops)
}

/// Exact signed volume (times six) of a closed triangle mesh.
pub fn mesh_volume6(m: &InputMesh) -> rat::Q {
    use num_traits::Zero;
    let mut v = rat::Q::zero();
    for t in &m.triangles {
        let [a, b, c] = t.map(|i| rat::q3(m.vertices[i as usize]));
        v += rat::dot(&a, &rat::cross(&b, &c));
    }
    v
}
