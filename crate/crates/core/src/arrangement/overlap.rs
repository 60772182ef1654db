//! Per-triangle processing, including coplanar overlaps.
//!
//! Where triangles of different meshes overlap in the same plane, each of
//! them must produce the very same sub-triangles so that assembly can merge
//! them. The overlap is split into cells of constant coverage; every cell is
//! re-triangulated from data that all covering triangles agree on: the host
//! triangle with the smallest id, its projection axis, the cell's vertex
//! set in lexicographic order and its boundary and interior constraints.

use std::collections::{HashMap, HashSet};

use crate::error::Error;
use crate::kernel::{
    compare_lex, point_in_triangle_2d, orient2d_projected, Containment, GenericPoint, Sign,
};

use super::detect::TriangleConstraints;
use super::soup::PreparedSoup;
use super::triangulate::{triangulate_constrained, LocalMesh};

pub(crate) const NO_COVER: u32 = u32::MAX;

/// Sub-triangles of one input triangle.
#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub points: Vec<GenericPoint>,
    pub triangles: Vec<[u32; 3]>,
    /// Index into `covers`, or `NO_COVER`.
    pub cover: Vec<u32>,
    /// Sorted sets of input triangles (the host included) that contain a
    /// shared cell.
    pub covers: Vec<Vec<u32>>,
}

pub(crate) fn process_triangle(
    soup: &PreparedSoup,
    t: usize,
    c: &TriangleConstraints,
) -> Result<Piece, Error> {
    let plane = &soup.planes[t];
    let axis = plane.normal_axis();
    let lt = triangulate_constrained(
        soup.corners(t),
        &c.points,
        &c.segments,
        axis,
        plane.normal_sign(),
    )?;
    if c.coplanar.is_empty() {
        let n = lt.triangles.len();
        return Ok(Piece {
            points: lt.points,
            triangles: lt.triangles,
            cover: vec![NO_COVER; n],
            covers: Vec::new(),
        });
    }

    let mut partners = c.coplanar.clone();
    partners.sort_unstable();
    partners.dedup();
    let pcorners: Vec<[GenericPoint; 3]> = partners
        .iter()
        .map(|&u| soup.corners(u as usize).map(GenericPoint::Explicit))
        .collect();

    // inside[v * np + j]: 0 unknown, 1 inside the closed partner, 2 outside.
    let np = partners.len();
    let mut inside = vec![0u8; lt.points.len() * np];
    let mut is_in = |v: u32, j: usize| -> Result<bool, Error> {
        let slot = &mut inside[v as usize * np + j];
        if *slot == 0 {
            let pc = &pcorners[j];
            let r = point_in_triangle_2d(&lt.points[v as usize], [&pc[0], &pc[1], &pc[2]], axis)?;
            *slot = if r == Containment::Outside { 2 } else { 1 };
        }
        Ok(*slot == 1)
    };
    let mut coverage: Vec<Vec<u32>> = Vec::with_capacity(lt.triangles.len());
    for tri in &lt.triangles {
        let mut cov = Vec::new();
        for j in 0..np {
            if is_in(tri[0], j)? && is_in(tri[1], j)? && is_in(tri[2], j)? {
                cov.push(partners[j]);
            }
        }
        coverage.push(cov);
    }

    let mut owner: HashMap<(u32, u32), usize> = HashMap::with_capacity(lt.triangles.len() * 3);
    for (i, tri) in lt.triangles.iter().enumerate() {
        for k in 0..3 {
            owner.insert((tri[k], tri[(k + 1) % 3]), i);
        }
    }
    let constrained: HashSet<(u32, u32)> = lt.constrained.iter().copied().collect();

    let mut piece = Piece {
        points: lt.points.clone(),
        triangles: Vec::new(),
        cover: Vec::new(),
        covers: Vec::new(),
    };
    let mut cell_of = vec![usize::MAX; lt.triangles.len()];
    for start in 0..lt.triangles.len() {
        if coverage[start].is_empty() {
            piece.triangles.push(lt.triangles[start]);
            piece.cover.push(NO_COVER);
            continue;
        }
        if cell_of[start] != usize::MAX {
            continue;
        }
        let mut cell = vec![start];
        cell_of[start] = start;
        let mut k = 0;
        while k < cell.len() {
            let tri = lt.triangles[cell[k]];
            k += 1;
            for e in 0..3 {
                if let Some(&n) = owner.get(&(tri[(e + 1) % 3], tri[e])) {
                    if cell_of[n] == usize::MAX && coverage[n] == coverage[start] {
                        cell_of[n] = start;
                        cell.push(n);
                    }
                }
            }
        }
        cell.sort_unstable();
        let mut key = coverage[start].clone();
        key.push(t as u32);
        key.sort_unstable();
        let tris: Vec<[u32; 3]> = cell.iter().map(|&i| lt.triangles[i]).collect();
        let canon = canonical_cell(soup, t, &key, &lt.points, &tris, &constrained)?;
        let ci = piece.covers.len() as u32;
        piece.covers.push(key);
        for tri in canon {
            piece.triangles.push(tri);
            piece.cover.push(ci);
        }
    }
    Ok(piece)
}

fn undirected(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Re-triangulates one coverage cell (`tris`, in the host's winding) from
/// data independent of which covering triangle performs the work. Returns
/// triangles over `points` in the host's winding.
fn canonical_cell(
    soup: &PreparedSoup,
    host: usize,
    cover: &[u32],
    points: &[GenericPoint],
    tris: &[[u32; 3]],
    constrained: &HashSet<(u32, u32)>,
) -> Result<Vec<[u32; 3]>, Error> {
    let kmin = cover[0] as usize;
    let kplane = &soup.planes[kmin];
    let kaxis = kplane.normal_axis();
    let mut kc = soup.corners(kmin);
    if kplane.normal_sign() == Sign::Negative {
        kc.swap(1, 2);
    }
    let hc = soup.corners(host).map(GenericPoint::Explicit);
    let host_sign = orient2d_projected(&hc[0], &hc[1], &hc[2], kaxis);
    if host_sign.is_zero() {
        return Err(Error::invariant("coplanar partners disagree on projection"));
    }

    let in_cell: HashSet<(u32, u32)> = tris
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
        .collect();
    let mut boundary: Vec<(u32, u32)> = Vec::new();
    let mut interior: Vec<(u32, u32)> = Vec::new();
    for &(a, b) in &in_cell {
        if !in_cell.contains(&(b, a)) {
            boundary.push((a, b));
        } else if a < b && constrained.contains(&(a, b)) {
            interior.push((a, b));
        }
    }
    let mut verts: Vec<u32> = tris.iter().flatten().copied().collect();
    verts.sort_unstable();
    verts.dedup();

    // Canonical point list: cell vertices plus the reference corners, in
    // lexicographic order. `origin[i]` maps back to `points`.
    let mut cand: Vec<(GenericPoint, u32)> = verts
        .iter()
        .map(|&v| (points[v as usize].clone(), v))
        .chain(kc.iter().map(|&c| (GenericPoint::Explicit(c), u32::MAX)))
        .collect();
    cand.sort_by(|a, b| compare_lex(&a.0, &b.0).then(a.0.complexity().cmp(&b.0.complexity())).then(a.1.cmp(&b.1)));
    let mut cpts: Vec<GenericPoint> = Vec::new();
    let mut origin: Vec<u32> = Vec::new();
    let mut new_id: HashMap<u32, u32> = HashMap::new();
    let mut corner_ids = [u32::MAX; 3];
    for (g, v) in cand {
        let same = cpts.last().is_some_and(|last| compare_lex(last, &g).is_eq());
        if !same {
            cpts.push(g.clone());
            origin.push(v);
        } else if v != u32::MAX && *origin.last().unwrap_or(&u32::MAX) == u32::MAX {
            *origin.last_mut().unwrap_or(&mut 0) = v;
        }
        let id = (cpts.len() - 1) as u32;
        if v != u32::MAX {
            new_id.insert(v, id);
        } else if let Some(k) = kc.iter().position(|c| compare_lex(&GenericPoint::Explicit(*c), &g).is_eq()) {
            corner_ids[k] = id;
        }
    }
    let n = cpts.len() as u32;
    let mut mesh = LocalMesh::new(cpts, corner_ids, kaxis, Sign::Positive)?;
    for p in 0..n {
        if !corner_ids.contains(&p) {
            mesh.insert_point(p)?;
        }
    }
    let map = |e: (u32, u32)| (new_id[&e.0], new_id[&e.1]);
    let oriented = |e: (u32, u32)| if host_sign == Sign::Positive { e } else { (e.1, e.0) };
    let bset: HashSet<(u32, u32)> = boundary.iter().map(|&e| { let (a, b) = map(e); undirected(a, b) }).collect();
    let mut cons: Vec<(u32, u32)> = bset
        .iter()
        .copied()
        .chain(interior.iter().map(|&e| { let (a, b) = map(e); undirected(a, b) }))
        .collect();
    cons.sort_unstable();
    cons.dedup();
    for &(a, b) in &cons {
        mesh.insert_segment(a, b)?;
    }

    let mut seen: HashSet<u32> = HashSet::new();
    let mut stack: Vec<u32> = Vec::new();
    for &e in &boundary {
        let (a, b) = oriented(map(e));
        let id = mesh
            .owner(a, b)
            .ok_or_else(|| Error::invariant("cell boundary missing from canonical triangulation"))?;
        if seen.insert(id) {
            stack.push(id);
        }
    }
    while let Some(id) = stack.pop() {
        let t = mesh.triangle(id);
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if bset.contains(&undirected(a, b)) {
                continue;
            }
            if let Some(nb) = mesh.owner(b, a) {
                if seen.insert(nb) {
                    stack.push(nb);
                }
            }
        }
    }
    let mut ids: Vec<u32> = seen.into_iter().collect();
    ids.sort_unstable();
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let t = mesh.triangle(id);
        let mut m = [0u32; 3];
        for k in 0..3 {
            let o = origin[t[k] as usize];
            if o == u32::MAX {
                return Err(Error::invariant("canonical cell escapes its boundary"));
            }
            m[k] = o;
        }
        out.push(if host_sign == Sign::Positive { m } else { [m[0], m[2], m[1]] });
    }
    Ok(out)
}
