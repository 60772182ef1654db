//! Brute-force rational Boolean: every face of the cut surface is built
//! with explicit rational coordinates and classified by crossing parity
//! along a randomly tilted ray.

use std::collections::HashMap;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pslg::{subdivide, Face};
use crate::rat::{add, cross, dot, normal, on_segment_3d, q, PointKey, q3, scale, side, sign, Chart, Q, Q3};
use crate::tritri::{clip_segment, intersect};
use crate::{InputMesh, Op, OracleError};

/// A kept face, oriented outward.
#[derive(Debug, Clone)]
pub struct OutFace {
    pub outer: Vec<u32>,
    pub holes: Vec<Vec<u32>>,
    /// Input meshes the face lies on.
    pub owners: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub vertices: Vec<Q3>,
    pub faces: Vec<OutFace>,
    pub components: usize,
    pub euler: i64,
    /// Faces of the cut surface before selection.
    pub cut_faces: usize,
    pub regions: usize,
}

impl OracleResult {
    /// Exact enclosed volume (times six).
    pub fn volume6(&self) -> Q {
        let mut v = Q::zero();
        for f in &self.faces {
            let c = &self.vertices[f.outer[0] as usize];
            for cyc in std::iter::once(&f.outer).chain(&f.holes) {
                for i in 0..cyc.len() {
                    let a = &self.vertices[cyc[i] as usize];
                    let b = &self.vertices[cyc[(i + 1) % cyc.len()] as usize];
                    v += dot(c, &cross(a, b));
                }
            }
        }
        v
    }
}

struct Tri {
    p: [Q3; 3],
    mesh: u32,
    /// Input vertex ids, for identifying shared edges.
    ids: [u32; 3],
    bbox: [[f64; 3]; 2],
}

struct MergedFace {
    outer: Vec<u32>,
    holes: Vec<Vec<u32>>,
    /// (mesh, winding agrees with `outer`)
    owners: Vec<(u32, bool)>,
    host: usize,
}

fn load(meshes: &[InputMesh]) -> Result<Vec<Tri>, OracleError> {
    let mut tris: Vec<Tri> = Vec::new();
    for (m, mesh) in meshes.iter().enumerate() {
        for t in &mesh.triangles {
            let f = t.map(|v| mesh.vertices[v as usize]);
            let p = f.map(q3);
            if normal(&p).iter().all(|c| c.is_zero()) {
                return Err(OracleError::Input(format!("degenerate triangle in mesh {m}")));
            }
            let mut bbox = [[f64::INFINITY; 3], [f64::NEG_INFINITY; 3]];
            for v in &f {
                for k in 0..3 {
                    bbox[0][k] = bbox[0][k].min(v[k]);
                    bbox[1][k] = bbox[1][k].max(v[k]);
                }
            }
            tris.push(Tri { p, mesh: m as u32, ids: *t, bbox });
        }
    }
    Ok(tris)
}

/// Whether `p` lies strictly inside the closed mesh, by crossing parity.
pub fn point_inside(mesh: &InputMesh, p: &Q3) -> Result<bool, OracleError> {
    let tris = load(std::slice::from_ref(mesh))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    crossing_parity(p, &tris, 0, &mut rng)
}

pub fn run(meshes: &[InputMesh], op: Op) -> Result<OracleResult, OracleError> {
    Ok(run_many(meshes, &[op])?.remove(0))
}

/// One cut and one classification shared by several operators.
pub fn run_many(meshes: &[InputMesh], ops: &[Op]) -> Result<Vec<OracleResult>, OracleError> {
    if meshes.is_empty() {
        return Err(OracleError::Input("no meshes".into()));
    }
    let tris = load(meshes)?;

    // Candidate pairs by a sweep over x.
    let mut order: Vec<usize> = (0..tris.len()).collect();
    order.sort_by(|&a, &b| tris[a].bbox[0][0].total_cmp(&tris[b].bbox[0][0]));
    let mut segments: Vec<Vec<(Q3, Q3)>> = vec![Vec::new(); tris.len()];
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if tris[j].bbox[0][0] > tris[i].bbox[1][0] {
                break;
            }
            if tris[i].mesh == tris[j].mesh || !boxes_overlap(&tris[i].bbox, &tris[j].bbox) {
                continue;
            }
            let r = intersect(&tris[i].p, &tris[j].p);
            if r.coplanar {
                if r.points.len() < 3 {
                    // touching along an edge or at a point: boundaries of both
                    // triangles already carry it unless it is a proper cut
                    if r.points.len() == 2 {
                        segments[i].push((r.points[0].clone(), r.points[1].clone()));
                        segments[j].push((r.points[0].clone(), r.points[1].clone()));
                    }
                    continue;
                }
                for (a, b, into) in [(j, i, i), (i, j, j)] {
                    let (src, dst) = (&tris[a].p, &tris[b].p);
                    for e in 0..3 {
                        if let Some(s) = clip_segment(&src[e], &src[(e + 1) % 3], dst) {
                            if s.0 != s.1 {
                                segments[into].push(s);
                            }
                        }
                    }
                }
            } else if r.points.len() == 2 {
                segments[i].push((r.points[0].clone(), r.points[1].clone()));
                segments[j].push((r.points[0].clone(), r.points[1].clone()));
            }
        }
    }

    // Points that fall on input edges must split the edge on both sides.
    let edge_key = |t: &Tri, e: usize| {
        let (a, b) = (t.ids[e], t.ids[(e + 1) % 3]);
        (t.mesh, a.min(b), a.max(b))
    };
    let mut on_edge: HashMap<(u32, u32, u32), Vec<Q3>> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for (a, b) in &segments[i] {
            for p in [a, b] {
                for e in 0..3 {
                    if on_segment_3d(p, &t.p[e], &t.p[(e + 1) % 3]) {
                        on_edge.entry(edge_key(t, e)).or_default().push(p.clone());
                    }
                }
            }
        }
    }

    // Cut faces with global vertex ids.
    let mut vid: HashMap<PointKey, u32> = HashMap::new();
    let mut vertices: Vec<Q3> = Vec::new();
    let mut id_of = |p: &Q3| -> u32 {
        *vid.entry(PointKey(p.clone())).or_insert_with(|| {
            vertices.push(p.clone());
            (vertices.len() - 1) as u32
        })
    };
    let mut merged: Vec<MergedFace> = Vec::new();
    let mut by_key: HashMap<Vec<u32>, usize> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        let mut extra: Vec<Q3> = Vec::new();
        for e in 0..3 {
            if let Some(ps) = on_edge.get(&edge_key(t, e)) {
                extra.extend(ps.iter().cloned());
            }
        }
        let faces: Vec<Face> = if segments[i].is_empty() && extra.is_empty() {
            vec![Face { outer: t.p.to_vec(), holes: Vec::new() }]
        } else {
            subdivide(&t.p, &segments[i], &extra)
        };
        let tn = normal(&t.p);
        for f in faces {
            let outer: Vec<u32> = f.outer.iter().map(&mut id_of).collect();
            let holes: Vec<Vec<u32>> = f.holes.iter().map(|h| h.iter().map(&mut id_of).collect()).collect();
            let mut key: Vec<u32> = outer.iter().chain(holes.iter().flatten()).copied().collect();
            key.sort_unstable();
            match by_key.get(&key) {
                Some(&k) => {
                    let same = sign(&dot(&tn, &normal(&tris[merged[k].host].p))) > 0;
                    merged[k].owners.push((t.mesh, same));
                }
                None => {
                    by_key.insert(key, merged.len());
                    merged.push(MergedFace { outer, holes, owners: vec![(t.mesh, true)], host: i });
                }
            }
        }
    }
    for f in &mut merged {
        f.owners.sort_unstable();
    }

    // Regions: faces joined across edges with exactly two faces and the
    // same owners.
    let mut edge_faces: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (fi, f) in merged.iter().enumerate() {
        for cyc in std::iter::once(&f.outer).chain(&f.holes) {
            for k in 0..cyc.len() {
                let (a, b) = (cyc[k], cyc[(k + 1) % cyc.len()]);
                edge_faces.entry((a.min(b), a.max(b))).or_default().push(fi);
            }
        }
    }
    let mut uf = UnionFind::new(merged.len());
    for fs in edge_faces.values() {
        if fs.len() == 2 && owner_meshes(&merged[fs[0]]) == owner_meshes(&merged[fs[1]]) {
            uf.union(fs[0], fs[1]);
        }
    }
    let mut region_of: HashMap<usize, Vec<usize>> = HashMap::new();
    for fi in 0..merged.len() {
        region_of.entry(uf.find(fi)).or_default().push(fi);
    }
    let regions = region_of.len();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut keep: Vec<Vec<Option<bool>>> = vec![vec![None; merged.len()]; ops.len()];
    let n = meshes.len();
    let mut region_list: Vec<Vec<usize>> = region_of.into_values().collect();
    region_list.sort();
    for faces in &region_list {
        let rep = *faces
            .iter()
            .min_by_key(|&&f| (merged[f].outer.len() + merged[f].holes.len() * 100, f))
            .unwrap_or(&faces[0]);
        let face = &merged[rep];
        let o = interior_point(face, &vertices, &tris[face.host].p)?;
        let owners = owner_meshes(face);
        let mut inside = vec![false; n];
        for (m, v) in inside.iter_mut().enumerate() {
            if !owners.contains(&(m as u32)) {
                *v = crossing_parity(&o, &tris, m as u32, &mut rng)?;
            }
        }
        // Sides relative to the representative winding.
        let mut front = inside.clone();
        let mut back = inside;
        for &(m, same) in &face.owners {
            front[m as usize] = !same;
            back[m as usize] = same;
        }
        for (k, &op) in ops.iter().enumerate() {
            let (rf, rb) = (eval(op, &front), eval(op, &back));
            if rf != rb {
                let flip = rf;
                // `flip` relative to the representative; other faces in the
                // region share its owners and windings.
                for &f in faces {
                    let agree = merged[f].owners.iter().zip(&face.owners).all(|(a, b)| a.1 == b.1);
                    keep[k][f] = Some(if agree { flip } else { !flip });
                }
            }
        }
    }

    let mut results = Vec::with_capacity(ops.len());
    for keep in keep {
        let mut out: Vec<OutFace> = Vec::new();
        for (fi, f) in merged.iter().enumerate() {
            if let Some(flip) = keep[fi] {
                let rev = |c: &Vec<u32>| {
                    if flip {
                        c.iter().rev().copied().collect()
                    } else {
                        c.clone()
                    }
                };
                out.push(OutFace {
                    outer: rev(&f.outer),
                    holes: f.holes.iter().map(rev).collect(),
                    owners: owner_meshes(f),
                });
            }
        }
        let (components, euler) = topology(&out);
        results.push(OracleResult {
            vertices: vertices.clone(),
            faces: out,
            components,
            euler,
            cut_faces: merged.len(),
            regions,
        });
    }
    Ok(results)
}

fn owner_meshes(f: &MergedFace) -> Vec<u32> {
    let mut m: Vec<u32> = f.owners.iter().map(|o| o.0).collect();
    m.dedup();
    m
}

fn eval(op: Op, inside: &[bool]) -> bool {
    match op {
        Op::Union => inside.iter().any(|&b| b),
        Op::Intersection => inside.iter().all(|&b| b),
        Op::Subtraction => inside[0] && !inside[1..].iter().any(|&b| b),
    }
}

fn boxes_overlap(a: &[[f64; 3]; 2], b: &[[f64; 3]; 2]) -> bool {
    (0..3).all(|k| a[0][k] <= b[1][k] && b[0][k] <= a[1][k])
}

/// Components by shared edges and V - E + sum over faces of (1 - holes).
pub fn topology(faces: &[OutFace]) -> (usize, i64) {
    let mut verts: Vec<u32> = Vec::new();
    let mut edges: HashMap<(u32, u32), usize> = HashMap::new();
    let mut uf = UnionFind::new(faces.len());
    let mut f_sum = 0i64;
    for (fi, f) in faces.iter().enumerate() {
        f_sum += 1 - f.holes.len() as i64;
        for cyc in std::iter::once(&f.outer).chain(&f.holes) {
            verts.extend_from_slice(cyc);
            for k in 0..cyc.len() {
                let (a, b) = (cyc[k], cyc[(k + 1) % cyc.len()]);
                match edges.get(&(a.min(b), a.max(b))) {
                    Some(&g) => uf.union(g, fi),
                    None => {
                        edges.insert((a.min(b), a.max(b)), fi);
                    }
                }
            }
        }
    }
    verts.sort_unstable();
    verts.dedup();
    let mut roots: Vec<usize> = (0..faces.len()).map(|f| uf.find(f)).collect();
    roots.sort_unstable();
    roots.dedup();
    (roots.len(), verts.len() as i64 - edges.len() as i64 + f_sum)
}

/// A point strictly inside the face (not on any of its cycles).
fn interior_point(f: &MergedFace, vertices: &[Q3], host: &[Q3; 3]) -> Result<Q3, OracleError> {
    let chart = Chart::for_triangle(host);
    let outer: Vec<&Q3> = f.outer.iter().map(|&v| &vertices[v as usize]).collect();
    let holes: Vec<Vec<&Q3>> = f
        .holes
        .iter()
        .map(|h| h.iter().map(|&v| &vertices[v as usize]).collect())
        .collect();
    let strictly_inside = |p: &Q3| {
        chart.inside_polygon(p, &outer) == Some(true)
            && holes.iter().all(|h| chart.inside_polygon(p, h) == Some(false))
    };
    let third = Q::new(1.into(), 3.into());
    let half = Q::new(1.into(), 2.into());
    let n = outer.len();
    // Centroids of convex corners, then midpoints of diagonals.
    for i in 0..n {
        let (a, b, c) = (outer[(i + n - 1) % n], outer[i], outer[(i + 1) % n]);
        if sign(&chart.orient(a, b, c)) > 0 {
            let p = scale(&add(&add(a, b), c), &third);
            if strictly_inside(&p) {
                return Ok(p);
            }
        }
    }
    for i in 0..n {
        for j in i + 2..n {
            let p = scale(&add(outer[i], outer[j]), &half);
            if strictly_inside(&p) {
                return Ok(p);
            }
        }
    }
    Err(OracleError::Degenerate("no interior point found for a face".into()))
}

/// Whether `o` is inside mesh `m`, by crossing parity along a random,
/// nearly axis-aligned ray. Degenerate rays are redrawn.
fn crossing_parity(o: &Q3, tris: &[Tri], m: u32, rng: &mut ChaCha8Rng) -> Result<bool, OracleError> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for t in tris.iter().filter(|t| t.mesh == m) {
        for k in 0..3 {
            lo[k] = lo[k].min(t.bbox[0][k]);
            hi[k] = hi[k].max(t.bbox[1][k]);
        }
    }
    let of: [f64; 3] = [0, 1, 2].map(|k| o[k].to_f64().unwrap_or(0.0));
    if (0..3).any(|k| of[k] < lo[k] || of[k] > hi[k]) {
        return Ok(false);
    }
    let span = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max).max(1e-300);
    let reach = 4.0 * span;
    for _ in 0..64 {
        let axis = rng.gen_range(0..3);
        let mut d = [Q::zero(), Q::zero(), Q::zero()];
        d[axis] = q(if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        for k in 1..3 {
            let num: i64 = rng.gen_range(-1024..=1024);
            d[(axis + k) % 3] = Q::new(num.into(), (1i64 << 20).into());
        }
        let f = add(o, &scale(&d, &q(reach)));
        let ff: [f64; 3] = [0, 1, 2].map(|k| f[k].to_f64().unwrap_or(0.0));
        let margin = 1e-9 * span;
        let rb = [
            [0, 1, 2].map(|k| of[k].min(ff[k]) - margin),
            [0, 1, 2].map(|k| of[k].max(ff[k]) + margin),
        ];
        let mut count = 0usize;
        let mut degenerate = false;
        for t in tris.iter().filter(|t| t.mesh == m) {
            if !boxes_overlap(&t.bbox, &rb) {
                continue;
            }
            let [a, b, c] = &t.p;
            let so = side(a, b, c, o);
            let sf = side(a, b, c, &f);
            if so == sf && so != 0 {
                continue;
            }
            if so == 0 {
                let chart = Chart::for_triangle(&t.p);
                if (0..3).all(|e| sign(&chart.orient(&t.p[e], &t.p[(e + 1) % 3], o)) >= 0) {
                    return Err(OracleError::Degenerate("sample point lies on another surface".into()));
                }
                continue;
            }
            if sf == 0 {
                degenerate = true;
                break;
            }
            let s = [
                side(o, &f, a, b),
                side(o, &f, b, c),
                side(o, &f, c, a),
            ];
            if s.iter().all(|&x| x > 0) || s.iter().all(|&x| x < 0) {
                count += 1;
            } else if s.contains(&0) && !(s.contains(&1) && s.contains(&-1)) {
                degenerate = true;
                break;
            }
        }
        if !degenerate {
            return Ok(count % 2 == 1);
        }
    }
    Err(OracleError::Degenerate("no generic ray found".into()))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}
