//! Closed, outward-oriented test solids.

use std::f64::consts::PI;

use crate::kernel::Point3;
use crate::mesh::Mesh;

/// Axis-aligned box with every face split into an `n x n` grid
/// (`12 n^2` triangles).
pub fn grid_box(min: [f64; 3], max: [f64; 3], n: usize) -> Mesh {
    let n = n.max(1);
    let mut b = Builder::default();
    // (normal axis, side) for each face; u, v follow the cyclic order so
    // that u x v points along +axis.
    for axis in 0..3 {
        for side in [0usize, 1] {
            let (ua, va) = ((axis + 1) % 3, (axis + 2) % 3);
            let w = if side == 0 { min[axis] } else { max[axis] };
            let base = b.vertices.len() as u32;
            for i in 0..=n {
                for j in 0..=n {
                    let mut p = [0.0; 3];
                    p[axis] = w;
                    p[ua] = lerp(min[ua], max[ua], i, n);
                    p[va] = lerp(min[va], max[va], j, n);
                    b.vertices.push(Point3::from_array(p));
                }
            }
            let id = |i: usize, j: usize| base + (i * (n + 1) + j) as u32;
            for i in 0..n {
                for j in 0..n {
                    let (a, bb, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                    if side == 1 {
                        b.quad(a, bb, c, d);
                    } else {
                        b.quad(a, d, c, bb);
                    }
                }
            }
        }
    }
    weld(b.finish())
}

/// Unit-grid cube: 12 triangles.
pub fn cube(min: [f64; 3], size: f64) -> Mesh {
    grid_box(min, [min[0] + size, min[1] + size, min[2] + size], 1)
}

/// Latitude/longitude sphere with `2 * slices * (stacks - 1)` triangles.
pub fn uv_sphere(center: [f64; 3], radius: f64, slices: usize, stacks: usize) -> Mesh {
    let slices = slices.max(3);
    let stacks = stacks.max(2);
    let mut b = Builder::default();
    let at = |x: f64, y: f64, z: f64| Point3::new(center[0] + x, center[1] + y, center[2] + z);
    b.vertices.push(at(0.0, 0.0, radius));
    for i in 1..stacks {
        let phi = PI * i as f64 / stacks as f64;
        let (sp, cp) = phi.sin_cos();
        for j in 0..slices {
            let th = 2.0 * PI * j as f64 / slices as f64;
            let (st, ct) = th.sin_cos();
            b.vertices.push(at(radius * sp * ct, radius * sp * st, radius * cp));
        }
    }
    b.vertices.push(at(0.0, 0.0, -radius));
    let south = (b.vertices.len() - 1) as u32;
    let ring = |i: usize, j: usize| (1 + (i - 1) * slices + j % slices) as u32;
    for j in 0..slices {
        b.triangles.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            b.quad(ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1));
        }
    }
    for j in 0..slices {
        b.triangles.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    b.finish()
}

/// Torus around the z axis with `2 * nu * nv` triangles.
pub fn torus(center: [f64; 3], major: f64, minor: f64, nu: usize, nv: usize) -> Mesh {
    let (nu, nv) = (nu.max(3), nv.max(3));
    let mut b = Builder::default();
    for i in 0..nu {
        let u = 2.0 * PI * i as f64 / nu as f64;
        let (su, cu) = u.sin_cos();
        for j in 0..nv {
            let v = 2.0 * PI * j as f64 / nv as f64;
            let (sv, cv) = v.sin_cos();
            let r = major + minor * cv;
            b.vertices.push(Point3::new(
                center[0] + r * cu,
                center[1] + r * su,
                center[2] + minor * sv,
            ));
        }
    }
    let id = |i: usize, j: usize| ((i % nu) * nv + j % nv) as u32;
    for i in 0..nu {
        for j in 0..nv {
            b.quad(id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
        }
    }
    b.finish()
}

/// Regular `segments`-gon prism between heights `z0 < z1`, caps fanned
/// from their centers (`4 * segments` triangles).
pub fn thick_disc(center: [f64; 2], radius: f64, z0: f64, z1: f64, segments: usize) -> Mesh {
    let n = segments.max(3);
    let mut b = Builder::default();
    for z in [z0, z1] {
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            let (s, c) = th.sin_cos();
            b.vertices.push(Point3::new(center[0] + radius * c, center[1] + radius * s, z));
        }
    }
    let bottom = b.vertices.len() as u32;
    b.vertices.push(Point3::new(center[0], center[1], z0));
    b.vertices.push(Point3::new(center[0], center[1], z1));
    let top = bottom + 1;
    let lo = |j: usize| (j % n) as u32;
    let hi = |j: usize| (n + j % n) as u32;
    for j in 0..n {
        b.triangles.push([bottom, lo(j + 1), lo(j)]);
        b.triangles.push([top, hi(j), hi(j + 1)]);
        b.quad(lo(j), lo(j + 1), hi(j + 1), hi(j));
    }
    b.finish()
}

/// Icosahedron with every face split into `freq^2` triangles, projected
/// onto the sphere (`20 freq^2` triangles, nearly uniform).
pub fn geodesic_sphere(center: [f64; 3], radius: f64, freq: usize) -> Mesh {
    let n = freq.max(1);
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let ico: [[f64; 3]; 12] = [
        [-1.0, g, 0.0],
        [1.0, g, 0.0],
        [-1.0, -g, 0.0],
        [1.0, -g, 0.0],
        [0.0, -1.0, g],
        [0.0, 1.0, g],
        [0.0, -1.0, -g],
        [0.0, 1.0, -g],
        [g, 0.0, -1.0],
        [g, 0.0, 1.0],
        [-g, 0.0, -1.0],
        [-g, 0.0, 1.0],
    ];
    let faces: [[usize; 3]; 20] = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut b = Builder::default();
    // Points are keyed by their integer barycentric weights over sorted
    // corner ids, so edge points shared by two faces are computed once.
    let mut ids: std::collections::HashMap<Vec<(usize, usize)>, u32> = std::collections::HashMap::new();
    let mut point = |w: [(usize, usize); 3], b: &mut Builder| -> u32 {
        let mut key: Vec<(usize, usize)> = w.iter().copied().filter(|&(_, k)| k > 0).collect();
        key.sort_unstable();
        *ids.entry(key.clone()).or_insert_with(|| {
            let mut p = [0.0; 3];
            for &(v, k) in &key {
                for c in 0..3 {
                    p[c] += ico[v][c] * k as f64;
                }
            }
            let len = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            b.vertices.push(Point3::new(
                center[0] + radius * p[0] / len,
                center[1] + radius * p[1] / len,
                center[2] + radius * p[2] / len,
            ));
            (b.vertices.len() - 1) as u32
        })
    };
    for f in faces {
        // Row i from corner f[0]; j steps toward f[2].
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let row = (0..=i)
                .map(|j| point([(f[0], n - i), (f[1], i - j), (f[2], j)], &mut b))
                .collect();
            rows.push(row);
        }
        for i in 0..n {
            for j in 0..=i {
                b.triangles.push([rows[i][j], rows[i + 1][j], rows[i + 1][j + 1]]);
                if j < i {
                    b.triangles.push([rows[i][j], rows[i + 1][j + 1], rows[i][j + 1]]);
                }
            }
        }
    }
    b.finish()
}

#[derive(Default)]
struct Builder {
    vertices: Vec<Point3>,
    triangles: Vec<[u32; 3]>,
}

impl Builder {
    /// Counter-clockwise quad `a b c d`.
    fn quad(&mut self, a: u32, b: u32, c: u32, d: u32) {
        self.triangles.push([a, b, c]);
        self.triangles.push([a, c, d]);
    }

    fn finish(self) -> Mesh {
        Mesh::new(self.vertices, self.triangles)
    }
}

fn lerp(a: f64, b: f64, i: usize, n: usize) -> f64 {
    if i == 0 {
        a
    } else if i == n {
        b
    } else {
        a + (b - a) * (i as f64 / n as f64)
    }
}

/// Merges bit-identical vertices (face grids share their border rows).
fn weld(m: Mesh) -> Mesh {
    let mut ids = std::collections::HashMap::new();
    let mut vertices = Vec::new();
    let remap: Vec<u32> = m
        .vertices
        .iter()
        .map(|p| {
            *ids.entry(p.key()).or_insert_with(|| {
                vertices.push(*p);
                (vertices.len() - 1) as u32
            })
        })
        .collect();
    let triangles = m.triangles.iter().map(|t| t.map(|v| remap[v as usize])).collect();
    Mesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn closed_and_oriented(m: &Mesh) -> bool {
        let mut count: HashMap<(u32, u32), i32> = HashMap::new();
        for t in &m.triangles {
            for i in 0..3 {
                *count.entry((t[i], t[(i + 1) % 3])).or_default() += 1;
            }
        }
        count.iter().all(|(&(a, b), &c)| c == 1 && count.get(&(b, a)) == Some(&1))
    }

    fn signed_volume(m: &Mesh) -> f64 {
        m.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|v| m.vertices[v as usize]);
                (a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x)
                    + a.z * (b.x * c.y - b.y * c.x))
                    / 6.0
            })
            .sum()
    }

    fn euler(m: &Mesh) -> i64 {
        let mut e: Vec<(u32, u32)> = m
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |i| (t[i].min(t[(i + 1) % 3]), t[i].max(t[(i + 1) % 3]))))
            .collect();
        e.sort_unstable();
        e.dedup();
        m.vertices.len() as i64 - e.len() as i64 + m.triangles.len() as i64
    }

    #[test]
    fn solids_are_closed_and_outward() {
        let cases = [
            (cube([0.0; 3], 2.0), 8.0, 2),
            (grid_box([0.0; 3], [1.0, 2.0, 3.0], 4), 6.0, 2),
            (uv_sphere([1.0, 0.0, 0.0], 1.0, 32, 16), 4.0 / 3.0 * PI, 2),
            (torus([0.0; 3], 2.0, 0.5, 24, 12), 2.0 * PI * PI * 2.0 * 0.25, 0),
            (thick_disc([0.0, 0.0], 1.0, 0.0, 0.5, 40), PI * 0.5, 2),
            (geodesic_sphere([0.5, 0.0, -1.0], 1.0, 6), 4.0 / 3.0 * PI, 2),
        ];
        for (m, vol, chi) in cases {
            assert!(closed_and_oriented(&m));
            let v = signed_volume(&m);
            assert!(v > 0.0 && (v - vol).abs() < 0.1 * vol, "volume {v} vs {vol}");
            assert_eq!(euler(&m), chi);
        }
    }

    #[test]
    fn triangle_counts() {
        assert_eq!(uv_sphere([0.0; 3], 1.0, 10, 6).triangles.len(), 2 * 10 * 5);
        assert_eq!(grid_box([0.0; 3], [1.0; 3], 3).triangles.len(), 12 * 9);
        assert_eq!(torus([0.0; 3], 2.0, 1.0, 8, 5).triangles.len(), 80);
        assert_eq!(thick_disc([0.0; 2], 1.0, 0.0, 1.0, 7).triangles.len(), 28);
        let g = geodesic_sphere([0.0; 3], 1.0, 5);
        assert_eq!(g.triangles.len(), 20 * 25);
        assert_eq!(g.vertices.len(), 10 * 25 + 2);
    }
}
