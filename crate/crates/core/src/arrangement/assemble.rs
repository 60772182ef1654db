//! Global vertex identification, merging of coincident triangles and
//! intersection-edge flags.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::Error;
use crate::kernel::{compare_lex, GenericPoint};
use crate::labels::LabelSet;

use super::overlap::{Piece, NO_COVER};
use super::soup::PreparedSoup;

pub const NO_NEIGHBOR: u32 = u32::MAX;

/// Conforming simplicial complex built from the input soup.
#[derive(Debug, Clone)]
pub struct ArrangementMesh {
    /// Input vertices first (same ids as the prepared soup), then the new
    /// implicit vertices in lexicographic order.
    pub vertices: Vec<GenericPoint>,
    pub triangles: Vec<[u32; 3]>,
    pub labels: Vec<LabelSet>,
    /// Meshes whose own copy of the triangle has the opposite winding.
    pub flips: Vec<LabelSet>,
    /// Prepared-soup triangle the triangle lies in (the smallest one for
    /// merged triangles).
    pub parent: Vec<u32>,
    /// Triangle across edge `i` (from corner `i` to corner `i + 1`), or
    /// `NO_NEIGHBOR` when the edge is flagged.
    pub neighbors: Vec<[u32; 3]>,
    /// Bit `i` set when edge `i` is an intersection edge.
    pub flags: Vec<u8>,
    pub mesh_count: usize,
}

impl ArrangementMesh {
    pub fn flagged_edge_count(&self) -> usize {
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (t, f) in self.triangles.iter().zip(&self.flags) {
            for i in 0..3 {
                if f & (1 << i) != 0 {
                    let (a, b) = (t[i], t[(i + 1) % 3]);
                    edges.push(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// Undirected flagged edges, sorted.
    pub fn flagged_edges(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for (t, f) in self.triangles.iter().zip(&self.flags) {
            for i in 0..3 {
                if f & (1 << i) != 0 {
                    let (a, b) = (t[i], t[(i + 1) % 3]);
                    edges.push(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct AssemblyCounts {
    pub implicit_vertices: usize,
    pub merged_triangles: usize,
}

pub(crate) fn assemble(
    soup: &PreparedSoup,
    pieces: &[(u32, Piece)],
) -> Result<(ArrangementMesh, AssemblyCounts), Error> {
    let nv = soup.vertices.len();
    let explicit_id: HashMap<[u64; 3], u32> = soup
        .vertices
        .iter()
        .enumerate()
        .map(|(i, p)| (p.key(), i as u32))
        .collect();

    // Global ids of every local point.
    let mut local_ids: Vec<Vec<u32>> = pieces.iter().map(|(_, p)| vec![u32::MAX; p.points.len()]).collect();
    let mut implicit: Vec<(u32, u32)> = Vec::new();
    for (pi, (_, piece)) in pieces.iter().enumerate() {
        for (li, g) in piece.points.iter().enumerate() {
            match g.as_explicit() {
                Some(p) => {
                    local_ids[pi][li] = *explicit_id
                        .get(&p.key())
                        .ok_or_else(|| Error::invariant("explicit point is not an input vertex"))?;
                }
                None => implicit.push((pi as u32, li as u32)),
            }
        }
    }
    let point = |e: &(u32, u32)| &pieces[e.0 as usize].1.points[e.1 as usize];
    implicit.par_sort_by(|a, b| {
        let (pa, pb) = (point(a), point(b));
        compare_lex(pa, pb).then(pa.complexity().cmp(&pb.complexity()))
    });

    let mut by_x: Vec<u32> = (0..nv as u32).collect();
    by_x.sort_by(|&a, &b| soup.vertices[a as usize].lex_cmp(&soup.vertices[b as usize]));
    let explicit_match = |g: &GenericPoint| -> Option<u32> {
        let bb = g.bbox();
        let lo = by_x.partition_point(|&v| soup.vertices[v as usize].x < bb[0].lo);
        for &v in &by_x[lo..] {
            let p = soup.vertices[v as usize];
            if p.x > bb[0].hi {
                break;
            }
            if bb[1].contains(p.y) && bb[2].contains(p.z) && compare_lex(g, &GenericPoint::Explicit(p)) == Ordering::Equal {
                return Some(v);
            }
        }
        None
    };

    let mut vertices: Vec<GenericPoint> = soup.vertices.iter().map(|&p| GenericPoint::Explicit(p)).collect();
    let mut i = 0;
    while i < implicit.len() {
        let rep = point(&implicit[i]).clone();
        let mut j = i + 1;
        while j < implicit.len() && compare_lex(point(&implicit[j]), &rep) == Ordering::Equal {
            j += 1;
        }
        let id = match explicit_match(&rep) {
            Some(v) => v,
            None => {
                vertices.push(rep);
                (vertices.len() - 1) as u32
            }
        };
        for e in &implicit[i..j] {
            local_ids[e.0 as usize][e.1 as usize] = id;
        }
        i = j;
    }
    let implicit_vertices = vertices.len() - nv;

    let mut piece_of = vec![u32::MAX; soup.triangles.len()];
    for (pi, (t, _)) in pieces.iter().enumerate() {
        piece_of[*t as usize] = pi as u32;
    }

    let mut triangles = Vec::new();
    let mut labels = Vec::new();
    let mut flips = Vec::new();
    let mut parent = Vec::new();
    let mut cover_of: Vec<Option<(u32, u32)>> = Vec::new();
    for t in 0..soup.triangles.len() {
        let pi = piece_of[t];
        if pi == u32::MAX {
            triangles.push(soup.triangles[t]);
            labels.push(soup.labels[t].clone());
            flips.push(soup.flips[t].clone());
            parent.push(t as u32);
            cover_of.push(None);
            continue;
        }
        let piece = &pieces[pi as usize].1;
        let ids = &local_ids[pi as usize];
        for (k, tri) in piece.triangles.iter().enumerate() {
            let g = tri.map(|v| ids[v as usize]);
            if g[0] == g[1] || g[1] == g[2] || g[0] == g[2] {
                return Err(Error::invariant("sub-triangle collapsed after vertex identification"));
            }
            triangles.push(g);
            labels.push(soup.labels[t].clone());
            flips.push(soup.flips[t].clone());
            parent.push(t as u32);
            cover_of.push((piece.cover[k] != NO_COVER).then_some((pi, piece.cover[k])));
        }
    }

    // Merge coincident triangles of overlapping coplanar regions.
    let mut keep = vec![true; triangles.len()];
    let mut merged_triangles = 0;
    let mut groups: HashMap<[u32; 3], Vec<u32>> = HashMap::new();
    for (i, c) in cover_of.iter().enumerate() {
        if c.is_some() {
            let mut k = triangles[i];
            k.sort_unstable();
            groups.entry(k).or_default().push(i as u32);
        }
    }
    let mut group_list: Vec<Vec<u32>> = groups.into_values().collect();
    group_list.sort_unstable();
    for g in group_list {
        let first = g[0] as usize;
        let (pi, ci) = cover_of[first].unwrap_or((0, 0));
        let expected = &pieces[pi as usize].1.covers[ci as usize];
        let mut parents: Vec<u32> = g.iter().map(|&m| parent[m as usize]).collect();
        parents.sort_unstable();
        if &parents != expected {
            return Err(Error::invariant(format!(
                "coplanar overlap resolved differently by triangles {:?}",
                expected
            )));
        }
        for &m in &g[1..] {
            let m = m as usize;
            let same = same_winding(&triangles[first], &triangles[m]);
            let mut f = flips[m].clone();
            if !same {
                f.toggle(&labels[m]);
            }
            let l = labels[m].clone();
            labels[first].union_with(&l);
            flips[first].union_with(&f);
            keep[m] = false;
            merged_triangles += 1;
        }
    }
    let mut out_tris = Vec::with_capacity(triangles.len());
    let mut out_labels = Vec::with_capacity(triangles.len());
    let mut out_flips = Vec::with_capacity(triangles.len());
    let mut out_parent = Vec::with_capacity(triangles.len());
    for i in 0..triangles.len() {
        if keep[i] {
            out_tris.push(triangles[i]);
            out_labels.push(std::mem::take(&mut labels[i]));
            out_flips.push(std::mem::take(&mut flips[i]));
            out_parent.push(parent[i]);
        }
    }

    let (neighbors, flags) = edge_flags(&out_tris, &out_labels, &out_flips);
    Ok((
        ArrangementMesh {
            vertices,
            triangles: out_tris,
            labels: out_labels,
            flips: out_flips,
            parent: out_parent,
            neighbors,
            flags,
            mesh_count: soup.mesh_count,
        },
        AssemblyCounts {
            implicit_vertices,
            merged_triangles,
        },
    ))
}

pub(crate) fn same_winding(a: &[u32; 3], b: &[u32; 3]) -> bool {
    let i = b.iter().position(|&v| v == a[0]).unwrap_or(0);
    b[(i + 1) % 3] == a[1]
}

/// An edge is an intersection edge unless exactly two triangles with equal
/// labels and flips use it in opposite directions.
fn edge_flags(
    tris: &[[u32; 3]],
    labels: &[LabelSet],
    flips: &[LabelSet],
) -> (Vec<[u32; 3]>, Vec<u8>) {
    let mut inc: Vec<(u32, u32, u32, u8)> = Vec::with_capacity(tris.len() * 3);
    for (t, tri) in tris.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            inc.push((lo, hi, t as u32, i as u8));
        }
    }
    inc.par_sort_unstable();
    let mut neighbors = vec![[NO_NEIGHBOR; 3]; tris.len()];
    let mut flags = vec![0u8; tris.len()];
    let mut i = 0;
    while i < inc.len() {
        let mut j = i + 1;
        while j < inc.len() && inc[j].0 == inc[i].0 && inc[j].1 == inc[i].1 {
            j += 1;
        }
        let group = &inc[i..j];
        let manifold = group.len() == 2 && {
            let (t0, e0) = (group[0].2 as usize, group[0].3 as usize);
            let (t1, e1) = (group[1].2 as usize, group[1].3 as usize);
            let d0 = tris[t0][e0];
            let d1 = tris[t1][e1];
            d0 != d1 && labels[t0] == labels[t1] && flips[t0] == flips[t1]
        };
        if manifold {
            let (t0, e0) = (group[0].2, group[0].3 as usize);
            let (t1, e1) = (group[1].2, group[1].3 as usize);
            neighbors[t0 as usize][e0] = t1;
            neighbors[t1 as usize][e1] = t0;
        } else {
            for &(_, _, t, e) in group {
                flags[t as usize] |= 1 << e;
            }
        }
        i = j;
    }
    (neighbors, flags)
}
