//! Indexed triangle meshes and rigid transforms.

use crate::error::Error;
use crate::kernel::Point3;
use crate::spatial::Aabb;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[u32; 3]>) -> Mesh {
        Mesh { vertices, triangles }
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.triangles.iter().flatten().map(|&v| &self.vertices[v as usize]))
    }

    /// Rejects out-of-range indices and non-finite coordinates.
    pub fn check_indices(&self) -> Result<(), Error> {
        let n = self.vertices.len();
        if let Some(t) = self.triangles.iter().position(|t| t.iter().any(|&v| v as usize >= n)) {
            return Err(Error::InvalidInput(format!("triangle {t} references a missing vertex")));
        }
        if let Some(v) = self.vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("vertex {v} has a non-finite coordinate")));
        }
        Ok(())
    }

    pub fn transformed(&self, t: &RigidTransform) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|p| t.apply(p)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn translated(&self, d: [f64; 3]) -> Mesh {
        self.transformed(&RigidTransform::translation(d))
    }

    /// Same surface with every triangle's winding reversed.
    pub fn flipped(&self) -> Mesh {
        Mesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
        }
    }

    /// Concatenates meshes into one vertex/triangle list.
    pub fn merged(parts: &[Mesh]) -> Mesh {
        let mut out = Mesh::default();
        for m in parts {
            let off = out.vertices.len() as u32;
            out.vertices.extend_from_slice(&m.vertices);
            out.triangles
                .extend(m.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        }
        out
    }
}

/// Row-major 4x4 affine matrix applied to column vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub m: [f64; 16],
}

impl Default for RigidTransform {
    fn default() -> Self {
        RigidTransform::identity()
    }
}

impl RigidTransform {
    pub fn identity() -> RigidTransform {
        let mut m = [0.0; 16];
        m[0] = 1.0;
        m[5] = 1.0;
        m[10] = 1.0;
        m[15] = 1.0;
        RigidTransform { m }
    }

    pub fn translation(d: [f64; 3]) -> RigidTransform {
        let mut t = RigidTransform::identity();
        t.m[3] = d[0];
        t.m[7] = d[1];
        t.m[11] = d[2];
        t
    }

    /// Rotation by `angle` radians about the unit `axis`, then translation.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64, translation: [f64; 3]) -> RigidTransform {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let [x, y, z] = if n > 0.0 {
            [axis[0] / n, axis[1] / n, axis[2] / n]
        } else {
            [0.0, 0.0, 1.0]
        };
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        RigidTransform {
            m: [
                t * x * x + c,
                t * x * y - s * z,
                t * x * z + s * y,
                translation[0],
                t * x * y + s * z,
                t * y * y + c,
                t * y * z - s * x,
                translation[1],
                t * x * z - s * y,
                t * y * z + s * x,
                t * z * z + c,
                translation[2],
                0.0,
                0.0,
                0.0,
                1.0,
            ],
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        let m = &self.m;
        Point3::new(
            m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
            m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
            m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11],
        )
    }

    fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.m;
        [[m[0], m[1], m[2]], [m[4], m[5], m[6]], [m[8], m[9], m[10]]]
    }

    /// Largest deviation of the linear part from orthonormality, and of the
    /// bottom row from `0 0 0 1`.
    pub fn rigidity_error(&self) -> f64 {
        let r = self.rows();
        let mut err: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                err = err.max((d - want).abs());
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        err = err.max((det - 1.0).abs());
        for (k, want) in [(12, 0.0), (13, 0.0), (14, 0.0), (15, 1.0)] {
            err = err.max((self.m[k] - want).abs());
        }
        err
    }

    /// Nearest proper rotation (Gram-Schmidt on the rows, with a sign fix)
    /// plus the original translation. Non-finite or rank-deficient input
    /// yields the pure translation.
    pub fn orthonormalized(&self) -> RigidTransform {
        let r = self.rows();
        let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let scale = |v: [f64; 3], s: f64| [v[0] * s, v[1] * s, v[2] * s];
        let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = |a: [f64; 3], b: [f64; 3]| {
            [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        };
        let tr = [self.m[3], self.m[7], self.m[11]];
        let tr = if tr.iter().all(|v| v.is_finite()) { tr } else { [0.0; 3] };
        let n0 = norm(r[0]);
        if !(n0 > 0.0 && n0.is_finite()) {
            return RigidTransform::translation(tr);
        }
        let e0 = scale(r[0], 1.0 / n0);
        let v1 = sub(r[1], scale(e0, dot(e0, r[1])));
        let n1 = norm(v1);
        if !(n1 > 0.0 && n1.is_finite()) {
            return RigidTransform::translation(tr);
        }
        let e1 = scale(v1, 1.0 / n1);
        let e2 = cross(e0, e1);
        let mut out = RigidTransform::translation(tr);
        for (i, row) in [e0, e1, e2].iter().enumerate() {
            out.m[4 * i] = row[0];
            out.m[4 * i + 1] = row[1];
            out.m[4 * i + 2] = row[2];
        }
        out
    }
}
