//! Exact triangle/triangle intersection and per-triangle constraint lists.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::kernel::{
    compare_lex, orient2d_projected, point_in_triangle_2d, Axis, Containment, GenericPoint,
    Point3, Sign,
};
use crate::spatial::Octree;

use super::soup::PreparedSoup;

/// A segment that must appear as an edge of the triangulation. `cut` is a
/// plane that meets the host triangle's plane exactly along the segment's
/// supporting line.
#[derive(Debug, Clone)]
pub struct ConstraintSegment {
    pub a: GenericPoint,
    pub b: GenericPoint,
    pub cut: [Point3; 3],
}

#[derive(Debug, Clone, Default)]
pub struct TriangleConstraints {
    pub points: Vec<GenericPoint>,
    pub segments: Vec<ConstraintSegment>,
    /// Coplanar triangles of other meshes touching this one.
    pub coplanar: Vec<u32>,
}

impl TriangleConstraints {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.segments.is_empty() && self.coplanar.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Constraints {
    pub by_triangle: BTreeMap<u32, TriangleConstraints>,
    pub candidate_pairs: usize,
    pub intersecting_pairs: usize,
    pub coplanar_pairs: usize,
}

impl Constraints {
    pub fn point_count(&self) -> usize {
        self.by_triangle.values().map(|c| c.points.len()).sum()
    }

    pub fn segment_count(&self) -> usize {
        self.by_triangle.values().map(|c| c.segments.len()).sum()
    }
}

#[derive(Debug, Default)]
pub(crate) struct PairContacts {
    pub t_points: Vec<GenericPoint>,
    pub u_points: Vec<GenericPoint>,
    pub t_segments: Vec<ConstraintSegment>,
    pub u_segments: Vec<ConstraintSegment>,
    pub coplanar: bool,
}

/// Pairs of triangles from different meshes that share an octree leaf and
/// whose boxes overlap, sorted and unique.
pub fn candidate_pairs(soup: &PreparedSoup, octree: &Octree) -> Vec<(u32, u32)> {
    let leaves: Vec<&[u32]> = octree.leaves().map(|(_, ids)| ids).collect();
    let mut pairs: Vec<(u32, u32)> = leaves
        .par_iter()
        .flat_map_iter(|ids| {
            let mut out = Vec::new();
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    let (a, b) = if a < b { (a, b) } else { (b, a) };
                    if soup.labels[a as usize].intersects(&soup.labels[b as usize]) {
                        continue;
                    }
                    if soup.boxes[a as usize].overlaps(&soup.boxes[b as usize]) {
                        out.push((a, b));
                    }
                }
            }
            out
        })
        .collect();
    pairs.par_sort_unstable();
    pairs.dedup();
    pairs
}

/// Intersects every candidate pair exactly and gathers the results per
/// triangle, in ascending pair order.
pub fn detect_intersections(soup: &PreparedSoup, octree: &Octree) -> Constraints {
    let pairs = candidate_pairs(soup, octree);
    let results: Vec<Option<PairContacts>> = pairs
        .par_iter()
        .map(|&(t, u)| intersect_pair(soup, t as usize, u as usize))
        .collect();
    let mut out = Constraints {
        candidate_pairs: pairs.len(),
        ..Default::default()
    };
    for (&(t, u), r) in pairs.iter().zip(results) {
        let Some(r) = r else { continue };
        out.intersecting_pairs += 1;
        if r.coplanar {
            out.coplanar_pairs += 1;
        }
        {
            let ct = out.by_triangle.entry(t).or_default();
            ct.points.extend(r.t_points);
            ct.segments.extend(r.t_segments);
            if r.coplanar {
                ct.coplanar.push(u);
            }
        }
        let cu = out.by_triangle.entry(u).or_default();
        cu.points.extend(r.u_points);
        cu.segments.extend(r.u_segments);
        if r.coplanar {
            cu.coplanar.push(t);
        }
    }
    out
}

fn explicit3(t: &[Point3; 3]) -> [GenericPoint; 3] {
    t.map(GenericPoint::Explicit)
}

fn in_closed(p: &GenericPoint, t: &[GenericPoint; 3], axis: Axis) -> bool {
    !matches!(
        point_in_triangle_2d(p, [&t[0], &t[1], &t[2]], axis),
        Ok(Containment::Outside) | Err(_)
    )
}

fn all_same_strict(o: &[Sign; 3]) -> bool {
    (o[0] == o[1] && o[1] == o[2]) && !o[0].is_zero()
}

/// Points where the boundary of `tri` meets the plane; `o` holds the
/// orientation of each corner against that plane.
fn plane_section(tri: &[Point3; 3], o: &[Sign; 3], plane: &[Point3; 3]) -> SmallVec<[GenericPoint; 2]> {
    let mut pts = SmallVec::new();
    for i in 0..3 {
        if o[i].is_zero() {
            pts.push(GenericPoint::Explicit(tri[i]));
        }
    }
    for i in 0..3 {
        let j = (i + 1) % 3;
        if o[i].as_i32() * o[j].as_i32() < 0 {
            pts.push(GenericPoint::lpi_unchecked(
                tri[i], tri[j], plane[0], plane[1], plane[2],
            ));
        }
    }
    pts
}

/// Sorts and removes exact duplicates, keeping the simplest representation.
pub(crate) fn dedup_points(mut pts: Vec<GenericPoint>) -> Vec<GenericPoint> {
    pts.sort_by(|a, b| compare_lex(a, b).then(a.complexity().cmp(&b.complexity())));
    pts.dedup_by(|later, first| compare_lex(later, first) == Ordering::Equal);
    pts
}

pub(crate) fn intersect_pair(soup: &PreparedSoup, t: usize, u: usize) -> Option<PairContacts> {
    let (pt, pu) = (&soup.planes[t], &soup.planes[u]);
    let tv = soup.corners(t);
    let uv = soup.corners(u);
    let ou = uv.map(|p| pt.orient(&p));
    if all_same_strict(&ou) {
        return None;
    }
    let ot = tv.map(|p| pu.orient(&p));
    if all_same_strict(&ot) {
        return None;
    }
    if ot.iter().all(|s| s.is_zero()) {
        return coplanar_pair(&tv, &uv, pt.normal_axis());
    }

    let (gt, gu) = (explicit3(&tv), explicit3(&uv));
    let mut cands = Vec::with_capacity(4);
    for p in plane_section(&tv, &ot, &uv) {
        if in_closed(&p, &gu, pu.normal_axis()) {
            cands.push(p);
        }
    }
    for p in plane_section(&uv, &ou, &tv) {
        if in_closed(&p, &gt, pt.normal_axis()) {
            cands.push(p);
        }
    }
    let pts = dedup_points(cands);
    match pts.len() {
        0 => None,
        1 => Some(PairContacts {
            t_points: pts.clone(),
            u_points: pts,
            ..Default::default()
        }),
        n => {
            let (a, b) = (pts[0].clone(), pts[n - 1].clone());
            Some(PairContacts {
                t_segments: vec![ConstraintSegment {
                    a: a.clone(),
                    b: b.clone(),
                    cut: uv,
                }],
                u_segments: vec![ConstraintSegment { a, b, cut: tv }],
                ..Default::default()
            })
        }
    }
}

/// Helper point that, with the edge `a b`, spans a plane crossing the
/// triangle plane (whose normal has a nonzero `axis` component) exactly
/// along the edge's line.
pub(crate) fn edge_cut_plane(a: Point3, b: Point3, axis: Axis) -> [Point3; 3] {
    let (r, s) = if a.lex_cmp(&b).is_le() { (a, b) } else { (b, a) };
    let rk = r.coord(axis);
    let step = rk.abs().max(1.0);
    let mut w = r;
    let up = rk + step;
    w.set_coord(axis, if up.is_finite() { up } else { rk - step });
    [r, s, w]
}

fn sorted_edge(a: Point3, b: Point3) -> (Point3, Point3) {
    if a.lex_cmp(&b).is_le() {
        (a, b)
    } else {
        (b, a)
    }
}

/// Crossing of two coplanar edges that cross properly, written with a
/// canonical choice of line and plane.
fn edge_crossing(e1: (Point3, Point3), e2: (Point3, Point3), axis: Axis) -> GenericPoint {
    let e1 = sorted_edge(e1.0, e1.1);
    let e2 = sorted_edge(e2.0, e2.1);
    let first = e1.0.lex_cmp(&e2.0).then(e1.1.lex_cmp(&e2.1)).is_le();
    let (line, other) = if first { (e1, e2) } else { (e2, e1) };
    let [r, s, w] = edge_cut_plane(other.0, other.1, axis);
    GenericPoint::lpi_unchecked(line.0, line.1, r, s, w)
}

fn o2(a: &GenericPoint, b: &GenericPoint, c: &GenericPoint, axis: Axis) -> Sign {
    orient2d_projected(a, b, c, axis)
}

fn strictly_between(a: &GenericPoint, p: &GenericPoint, b: &GenericPoint) -> bool {
    let l = compare_lex(a, p);
    let r = compare_lex(p, b);
    l != Ordering::Equal && l == r
}

/// Clips every edge of `src` to the closed triangle `dst`; returns the
/// segments that keep positive length.
fn clip_edges(
    src: &[Point3; 3],
    gsrc: &[GenericPoint; 3],
    src_in_dst: &[bool; 3],
    gdst: &[GenericPoint; 3],
    crossings: &[[Option<GenericPoint>; 3]; 3],
    src_is_first: bool,
    axis: Axis,
    out: &mut Vec<ConstraintSegment>,
) {
    for j in 0..3 {
        let jn = (j + 1) % 3;
        let mut pts: Vec<GenericPoint> = Vec::new();
        if src_in_dst[j] {
            pts.push(gsrc[j].clone());
        }
        if src_in_dst[jn] {
            pts.push(gsrc[jn].clone());
        }
        for i in 0..3 {
            let c = if src_is_first {
                &crossings[j][i]
            } else {
                &crossings[i][j]
            };
            if let Some(c) = c {
                pts.push(c.clone());
            }
            if o2(&gsrc[j], &gsrc[jn], &gdst[i], axis).is_zero()
                && strictly_between(&gsrc[j], &gdst[i], &gsrc[jn])
            {
                pts.push(gdst[i].clone());
            }
        }
        if pts.len() < 2 {
            continue;
        }
        let pts = dedup_points(pts);
        if pts.len() >= 2 {
            out.push(ConstraintSegment {
                a: pts[0].clone(),
                b: pts[pts.len() - 1].clone(),
                cut: edge_cut_plane(src[j], src[jn], axis),
            });
        }
    }
}

fn coplanar_pair(tv: &[Point3; 3], uv: &[Point3; 3], axis: Axis) -> Option<PairContacts> {
    let (gt, gu) = (explicit3(tv), explicit3(uv));

    // Separating edge lines.
    for (a, b) in [(&gt, &gu), (&gu, &gt)] {
        for i in 0..3 {
            let (p, q, r) = (&a[i], &a[(i + 1) % 3], &a[(i + 2) % 3]);
            let side = o2(p, q, r, axis);
            if b.iter().all(|x| o2(p, q, x, axis).as_i32() * side.as_i32() < 0) {
                return None;
            }
        }
    }

    let u_in_t = [0, 1, 2].map(|i| in_closed(&gu[i], &gt, axis));
    let t_in_u = [0, 1, 2].map(|i| in_closed(&gt[i], &gu, axis));

    let mut res = PairContacts {
        coplanar: true,
        ..Default::default()
    };
    for i in 0..3 {
        if u_in_t[i] && !tv.contains(&uv[i]) {
            res.t_points.push(gu[i].clone());
        }
        if t_in_u[i] && !uv.contains(&tv[i]) {
            res.u_points.push(gt[i].clone());
        }
    }

    // crossings[i][j]: edge i of t against edge j of u.
    let mut crossings: [[Option<GenericPoint>; 3]; 3] = Default::default();
    for i in 0..3 {
        let (a, b) = (&gt[i], &gt[(i + 1) % 3]);
        for j in 0..3 {
            let (c, d) = (&gu[j], &gu[(j + 1) % 3]);
            let s1 = o2(a, b, c, axis).as_i32() * o2(a, b, d, axis).as_i32();
            let s2 = o2(c, d, a, axis).as_i32() * o2(c, d, b, axis).as_i32();
            if s1 < 0 && s2 < 0 {
                let x = edge_crossing(
                    (tv[i], tv[(i + 1) % 3]),
                    (uv[j], uv[(j + 1) % 3]),
                    axis,
                );
                res.t_points.push(x.clone());
                res.u_points.push(x.clone());
                crossings[i][j] = Some(x);
            }
        }
    }

    let mut segs = Vec::new();
    clip_edges(uv, &gu, &u_in_t, &gt, &crossings, false, axis, &mut segs);
    clip_edges(tv, &gt, &t_in_u, &gu, &crossings, true, axis, &mut segs);
    res.t_segments = segs.clone();
    res.u_segments = segs;
    Some(res)
}
