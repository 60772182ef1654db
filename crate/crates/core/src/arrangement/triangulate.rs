//! Constrained triangulation of a single planar triangle.
//!
//! Work happens in the 2D projection that drops one axis. Points are
//! located with a stochastic visibility walk and split the triangle (or
//! edge) they fall in. A segment removes every triangle it crosses and the
//! two pockets left on either side are re-triangulated by ear clipping.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::error::Error;
use crate::kernel::{compare_lex, orient2d_projected, Axis, GenericPoint, Point3, Sign};

use super::detect::ConstraintSegment;

const DEAD: [u32; 3] = [u32::MAX; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Location {
    Inside(u32),
    /// On edge `i` (from corner `i` to corner `i + 1`) of the triangle.
    OnEdge(u32, usize),
    Vertex(u32),
}

/// Triangulation of a convex planar domain with directed-edge adjacency.
/// All triangles are counter-clockwise under `orient`.
pub(crate) struct LocalMesh {
    pub pts: Vec<GenericPoint>,
    axis: Axis,
    sigma: Sign,
    tris: Vec<[u32; 3]>,
    free: Vec<u32>,
    edges: HashMap<(u32, u32), u32>,
    vtri: Vec<u32>,
    constrained: HashSet<(u32, u32)>,
    last: u32,
    rng: u64,
}

fn undirected(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn rotate_to(t: [u32; 3], v: u32) -> [u32; 3] {
    if t[0] == v {
        t
    } else if t[1] == v {
        [t[1], t[2], t[0]]
    } else {
        [t[2], t[0], t[1]]
    }
}

impl LocalMesh {
    /// Mesh made of the single triangle `corner` (indices into `pts`),
    /// which must be counter-clockwise after multiplying by `sigma`.
    pub fn new(pts: Vec<GenericPoint>, corner: [u32; 3], axis: Axis, sigma: Sign) -> Result<LocalMesh, Error> {
        let mut m = LocalMesh {
            vtri: vec![u32::MAX; pts.len()],
            pts,
            axis,
            sigma,
            tris: Vec::new(),
            free: Vec::new(),
            edges: HashMap::new(),
            constrained: HashSet::new(),
            last: 0,
            rng: 0x9E37_79B9_7F4A_7C15,
        };
        if m.orient(corner[0], corner[1], corner[2]) != Sign::Positive {
            return Err(Error::invariant("host triangle is not counter-clockwise"));
        }
        m.add(corner);
        Ok(m)
    }

    #[inline]
    pub fn orient(&self, a: u32, b: u32, c: u32) -> Sign {
        orient2d_projected(
            &self.pts[a as usize],
            &self.pts[b as usize],
            &self.pts[c as usize],
            self.axis,
        )
        .mul(self.sigma)
    }

    fn next_random(&mut self) -> u64 {
        self.rng ^= self.rng << 13;
        self.rng ^= self.rng >> 7;
        self.rng ^= self.rng << 17;
        self.rng
    }

    fn add(&mut self, t: [u32; 3]) -> u32 {
        let id = match self.free.pop() {
            Some(id) => {
                self.tris[id as usize] = t;
                id
            }
            None => {
                self.tris.push(t);
                (self.tris.len() - 1) as u32
            }
        };
        for i in 0..3 {
            self.edges.insert((t[i], t[(i + 1) % 3]), id);
            self.vtri[t[i] as usize] = id;
        }
        self.last = id;
        id
    }

    fn remove(&mut self, id: u32) {
        let t = self.tris[id as usize];
        for i in 0..3 {
            let e = (t[i], t[(i + 1) % 3]);
            if self.edges.get(&e) == Some(&id) {
                self.edges.remove(&e);
            }
        }
        self.tris[id as usize] = DEAD;
        self.free.push(id);
    }

    #[inline]
    fn alive(&self, id: u32) -> bool {
        self.tris[id as usize] != DEAD
    }

    /// Triangle on the other side of the directed edge `a b`.
    #[inline]
    fn across(&self, a: u32, b: u32) -> Option<u32> {
        self.edges.get(&(b, a)).copied()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.edges.contains_key(&(a, b)) || self.edges.contains_key(&(b, a))
    }

    /// Triangle owning the directed edge `a b`.
    pub fn owner(&self, a: u32, b: u32) -> Option<u32> {
        self.edges.get(&(a, b)).copied()
    }

    pub fn triangle(&self, id: u32) -> [u32; 3] {
        self.tris[id as usize]
    }

    pub fn is_constrained(&self, a: u32, b: u32) -> bool {
        self.constrained.contains(&undirected(a, b))
    }

    /// Live triangles in slot order.
    pub fn triangles(&self) -> Vec<[u32; 3]> {
        self.tris.iter().copied().filter(|t| *t != DEAD).collect()
    }

    /// Live triangle ids in slot order.
    pub fn triangle_ids(&self) -> Vec<u32> {
        (0..self.tris.len() as u32).filter(|&i| self.alive(i)).collect()
    }

    fn classify_in(&self, id: u32, p: u32) -> Option<Location> {
        let t = self.tris[id as usize];
        let mut zeros = [false; 3];
        for i in 0..3 {
            match self.orient(t[i], t[(i + 1) % 3], p) {
                Sign::Negative => return None,
                Sign::Zero => zeros[i] = true,
                Sign::Positive => {}
            }
        }
        Some(match zeros.iter().filter(|z| **z).count() {
            0 => Location::Inside(id),
            1 => Location::OnEdge(id, zeros.iter().position(|z| *z).unwrap_or(0)),
            _ => Location::Vertex(id),
        })
    }

    fn locate(&mut self, p: u32) -> Result<Location, Error> {
        let mut cur = if self.alive(self.last) {
            self.last
        } else {
            match self.triangle_ids().first() {
                Some(&t) => t,
                None => return Err(Error::invariant("empty local triangulation")),
            }
        };
        let budget = 4 * self.tris.len() + 64;
        'walk: for _ in 0..budget {
            let t = self.tris[cur as usize];
            let r = (self.next_random() % 3) as usize;
            for j in 0..3 {
                let i = (r + j) % 3;
                let (a, b) = (t[i], t[(i + 1) % 3]);
                if self.orient(a, b, p) == Sign::Negative {
                    match self.across(a, b) {
                        Some(n) => {
                            cur = n;
                            continue 'walk;
                        }
                        None => break 'walk,
                    }
                }
            }
            if let Some(loc) = self.classify_in(cur, p) {
                return Ok(loc);
            }
        }
        for id in self.triangle_ids() {
            if let Some(loc) = self.classify_in(id, p) {
                return Ok(loc);
            }
        }
        Err(Error::invariant("constraint point lies outside its triangle"))
    }

    /// Inserts vertex `p`, which must lie in the domain and be new.
    pub fn insert_point(&mut self, p: u32) -> Result<(), Error> {
        match self.locate(p)? {
            Location::Vertex(_) => Err(Error::invariant("duplicate point in local triangulation")),
            Location::Inside(id) => {
                let [a, b, c] = self.tris[id as usize];
                self.remove(id);
                self.add([a, b, p]);
                self.add([b, c, p]);
                self.add([c, a, p]);
                Ok(())
            }
            Location::OnEdge(id, i) => {
                let t = self.tris[id as usize];
                let (u, w, x) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
                let other = self.across(u, w);
                self.remove(id);
                self.add([u, p, x]);
                self.add([p, w, x]);
                if let Some(o) = other {
                    let y = rotate_to(self.tris[o as usize], w)[2];
                    self.remove(o);
                    self.add([w, p, y]);
                    self.add([p, u, y]);
                }
                if self.constrained.remove(&undirected(u, w)) {
                    self.constrained.insert(undirected(u, p));
                    self.constrained.insert(undirected(p, w));
                }
                Ok(())
            }
        }
    }

    fn fan(&self, a: u32) -> Result<Vec<[u32; 3]>, Error> {
        let mut start = self.vtri[a as usize];
        if start == u32::MAX || !self.alive(start) || !self.tris[start as usize].contains(&a) {
            start = self
                .triangle_ids()
                .into_iter()
                .find(|&id| self.tris[id as usize].contains(&a))
                .ok_or_else(|| Error::invariant("vertex without incident triangle"))?;
        }
        let mut out = Vec::new();
        let mut cur = start;
        loop {
            let t = rotate_to(self.tris[cur as usize], a);
            out.push(t);
            match self.owner(a, t[2]) {
                Some(n) if n == start => return Ok(out),
                Some(n) => cur = n,
                None => break,
            }
            if out.len() > self.tris.len() {
                return Err(Error::invariant("corrupt vertex fan"));
            }
        }
        let mut cur = start;
        loop {
            let t = rotate_to(self.tris[cur as usize], a);
            match self.owner(t[1], a) {
                Some(n) => {
                    cur = n;
                    out.push(rotate_to(self.tris[n as usize], a));
                }
                None => return Ok(out),
            }
            if out.len() > self.tris.len() {
                return Err(Error::invariant("corrupt vertex fan"));
            }
        }
    }

    /// Forces the segment `a b` into the triangulation. No vertex may lie on
    /// its relative interior and it may not cross a constrained edge.
    pub fn insert_segment(&mut self, a: u32, b: u32) -> Result<(), Error> {
        if a == b {
            return Ok(());
        }
        if self.has_edge(a, b) {
            self.constrained.insert(undirected(a, b));
            return Ok(());
        }
        let mut first = None;
        for t in self.fan(a)? {
            let (x, y) = (t[1], t[2]);
            let sx = self.orient(a, b, x);
            let sy = self.orient(a, b, y);
            if sx == Sign::Negative && sy == Sign::Positive {
                first = Some((t, x, y));
                break;
            }
            if sx == Sign::Zero && compare_lex(&self.pts[a as usize], &self.pts[x as usize])
                == compare_lex(&self.pts[x as usize], &self.pts[b as usize])
            {
                return Err(Error::invariant("vertex on the interior of a constraint"));
            }
        }
        let (t0, mut r, mut l) = first.ok_or_else(|| Error::invariant("segment leaves the triangle"))?;
        let mut crossed = vec![self.owner(t0[0], t0[1]).ok_or_else(|| Error::invariant("lost triangle"))?];
        let mut right = vec![r];
        let mut left = vec![l];
        loop {
            if self.is_constrained(r, l) {
                return Err(Error::invariant("crossing constraint segments"));
            }
            let n = self
                .across(r, l)
                .ok_or_else(|| Error::invariant("segment leaves the triangle"))?;
            crossed.push(n);
            let z = rotate_to(self.tris[n as usize], l)[2];
            if z == b {
                break;
            }
            match self.orient(a, b, z) {
                Sign::Positive => {
                    left.push(z);
                    l = z;
                }
                Sign::Negative => {
                    right.push(z);
                    r = z;
                }
                Sign::Zero => return Err(Error::invariant("vertex on the interior of a constraint")),
            }
            if crossed.len() > self.tris.len() {
                return Err(Error::invariant("segment walk does not terminate"));
            }
        }
        for id in crossed {
            self.remove(id);
        }
        let mut rp = Vec::with_capacity(right.len() + 2);
        rp.push(a);
        rp.extend_from_slice(&right);
        rp.push(b);
        let mut lp = Vec::with_capacity(left.len() + 2);
        lp.push(a);
        lp.push(b);
        lp.extend(left.iter().rev());
        for poly in [rp, lp] {
            for t in self.ear_clip(&poly)? {
                self.add(t);
            }
        }
        self.constrained.insert(undirected(a, b));
        Ok(())
    }

    fn in_closed_triangle(&self, a: u32, b: u32, c: u32, q: u32) -> bool {
        self.orient(a, b, q) != Sign::Negative
            && self.orient(b, c, q) != Sign::Negative
            && self.orient(c, a, q) != Sign::Negative
    }

    /// Triangulates a simple counter-clockwise polygon.
    fn ear_clip(&self, poly: &[u32]) -> Result<Vec<[u32; 3]>, Error> {
        let mut v = poly.to_vec();
        let mut out = Vec::with_capacity(v.len().saturating_sub(2));
        let mut i = 0usize;
        let mut misses = 0usize;
        while v.len() > 3 {
            let m = v.len();
            let (p, c, n) = (v[(i + m - 1) % m], v[i % m], v[(i + 1) % m]);
            let is_ear = self.orient(p, c, n) == Sign::Positive
                && v
                    .iter()
                    .all(|&q| q == p || q == c || q == n || !self.in_closed_triangle(p, c, n, q));
            if is_ear {
                out.push([p, c, n]);
                v.remove(i % m);
                i = (i % m + m - 2) % (m - 1);
                misses = 0;
            } else {
                i = (i + 1) % m;
                misses += 1;
                if misses > m {
                    return Err(Error::invariant("polygon has no ear"));
                }
            }
        }
        if v.len() == 3 {
            if self.orient(v[0], v[1], v[2]) != Sign::Positive {
                return Err(Error::invariant("degenerate pocket triangle"));
            }
            out.push([v[0], v[1], v[2]]);
        }
        Ok(out)
    }
}

/// Result of triangulating one input triangle.
#[derive(Debug, Clone)]
pub struct LocalTriangulation {
    /// Sorted lexicographically, corners included.
    pub points: Vec<GenericPoint>,
    pub corners: [u32; 3],
    /// Sub-triangles with the winding of the host triangle.
    pub triangles: Vec<[u32; 3]>,
    /// Constraint edges after splitting, as sorted index pairs.
    pub constrained: Vec<(u32, u32)>,
}

struct IndexedSegment {
    a: u32,
    b: u32,
    cut: [Point3; 3],
}

fn strictly_between(a: &GenericPoint, p: &GenericPoint, b: &GenericPoint) -> bool {
    let l = compare_lex(a, p);
    l != Ordering::Equal && l == compare_lex(p, b)
}

fn boxes_overlap_2d(a: &GenericPoint, b: &GenericPoint, p: &GenericPoint, axis: Axis) -> bool {
    let (u, v) = axis.others();
    let (ba, bb, bp) = (a.bbox(), b.bbox(), p.bbox());
    [u, v].iter().all(|k| {
        let k = k.index();
        let lo = ba[k].lo.min(bb[k].lo);
        let hi = ba[k].hi.max(bb[k].hi);
        bp[k].hi >= lo && bp[k].lo <= hi
    })
}

/// Splits segments at the points lying on them and at their mutual proper
/// crossings (new three-plane points), until no segment contains a point
/// in its relative interior and no two segments cross.
fn split_segments(
    pts: &mut Vec<GenericPoint>,
    mut segs: Vec<IndexedSegment>,
    host: &[Point3; 3],
    axis: Axis,
) -> Result<Vec<IndexedSegment>, Error> {
    let o2 = |pts: &[GenericPoint], a: u32, b: u32, c: u32| {
        orient2d_projected(&pts[a as usize], &pts[b as usize], &pts[c as usize], axis)
    };
    for _round in 0..64 {
        // Points on segments.
        let mut next = Vec::with_capacity(segs.len());
        for s in segs {
            let (pa, pb) = (&pts[s.a as usize], &pts[s.b as usize]);
            let mut on: Vec<u32> = (0..pts.len() as u32)
                .filter(|&q| {
                    q != s.a
                        && q != s.b
                        && boxes_overlap_2d(pa, pb, &pts[q as usize], axis)
                        && o2(pts, s.a, s.b, q).is_zero()
                        && strictly_between(pa, &pts[q as usize], pb)
                })
                .collect();
            if on.is_empty() {
                next.push(s);
                continue;
            }
            on.sort_by(|&x, &y| compare_lex(&pts[x as usize], &pts[y as usize]));
            if compare_lex(pa, pb) == Ordering::Greater {
                on.reverse();
            }
            let mut prev = s.a;
            for q in on.into_iter().chain(std::iter::once(s.b)) {
                next.push(IndexedSegment { a: prev, b: q, cut: s.cut });
                prev = q;
            }
        }
        segs = next;

        // Proper crossings.
        let mut fresh: Vec<GenericPoint> = Vec::new();
        let bbs: Vec<[(f64, f64); 2]> = segs
            .iter()
            .map(|s| {
                let (u, v) = axis.others();
                let (ba, bb) = (pts[s.a as usize].bbox(), pts[s.b as usize].bbox());
                [u, v].map(|k| {
                    let k = k.index();
                    (ba[k].lo.min(bb[k].lo), ba[k].hi.max(bb[k].hi))
                })
            })
            .collect();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let (bi, bj) = (&bbs[i], &bbs[j]);
                if bi[0].1 < bj[0].0 || bj[0].1 < bi[0].0 || bi[1].1 < bj[1].0 || bj[1].1 < bi[1].0 {
                    continue;
                }
                let (s, t) = (&segs[i], &segs[j]);
                if s.a == t.a || s.a == t.b || s.b == t.a || s.b == t.b {
                    continue;
                }
                let c1 = o2(pts, s.a, s.b, t.a).as_i32() * o2(pts, s.a, s.b, t.b).as_i32();
                if c1 >= 0 {
                    continue;
                }
                let c2 = o2(pts, t.a, t.b, s.a).as_i32() * o2(pts, t.a, t.b, s.b).as_i32();
                if c2 >= 0 {
                    continue;
                }
                fresh.push(GenericPoint::tpi_unchecked([*host, s.cut, t.cut]));
            }
        }
        if fresh.is_empty() {
            return Ok(segs);
        }
        for p in super::detect::dedup_points(fresh) {
            pts.push(p);
        }
    }
    Err(Error::invariant("segment splitting does not converge"))
}

/// Triangulates the triangle `corners` so that every constraint point is a
/// vertex and every constraint segment a union of edges. `axis` and
/// `orientation` describe the host's projection and the sign of its
/// projected area.
pub fn triangulate_constrained(
    corners: [Point3; 3],
    points: &[GenericPoint],
    segments: &[ConstraintSegment],
    axis: Axis,
    orientation: Sign,
) -> Result<LocalTriangulation, Error> {
    let mut raw: Vec<GenericPoint> = corners.iter().map(|&c| GenericPoint::Explicit(c)).collect();
    raw.extend(points.iter().cloned());
    for s in segments {
        raw.push(s.a.clone());
        raw.push(s.b.clone());
    }
    let mut order: Vec<u32> = (0..raw.len() as u32).collect();
    order.sort_by(|&i, &j| {
        compare_lex(&raw[i as usize], &raw[j as usize])
            .then(raw[i as usize].complexity().cmp(&raw[j as usize].complexity()))
    });
    let mut id_of = vec![0u32; raw.len()];
    let mut pts: Vec<GenericPoint> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let dup = k > 0 && compare_lex(&raw[i as usize], pts.last().unwrap_or(&raw[i as usize])) == Ordering::Equal;
        if !dup {
            pts.push(raw[i as usize].clone());
        }
        id_of[i as usize] = (pts.len() - 1) as u32;
    }
    let corner_ids = [id_of[0], id_of[1], id_of[2]];
    let seg_base = 3 + points.len();
    let segs: Vec<IndexedSegment> = segments
        .iter()
        .enumerate()
        .map(|(k, s)| IndexedSegment {
            a: id_of[seg_base + 2 * k],
            b: id_of[seg_base + 2 * k + 1],
            cut: s.cut,
        })
        .filter(|s| s.a != s.b)
        .collect();
    let before = pts.len();
    let segs = split_segments(&mut pts, segs, &corners, axis)?;
    let mut edges: Vec<(u32, u32)> = segs.iter().map(|s| undirected(s.a, s.b)).collect();

    // Keep points in lexicographic order even after the crossings were added.
    if pts.len() > before {
        let mut order: Vec<u32> = (0..pts.len() as u32).collect();
        order.sort_by(|&i, &j| compare_lex(&pts[i as usize], &pts[j as usize]));
        let mut rank = vec![0u32; pts.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        pts = order.iter().map(|&i| pts[i as usize].clone()).collect();
        for e in &mut edges {
            *e = undirected(rank[e.0 as usize], rank[e.1 as usize]);
        }
        let cid = corner_ids.map(|c| rank[c as usize]);
        return finish(pts, cid, edges, axis, orientation);
    }
    finish(pts, corner_ids, edges, axis, orientation)
}

fn finish(
    pts: Vec<GenericPoint>,
    corners: [u32; 3],
    mut edges: Vec<(u32, u32)>,
    axis: Axis,
    orientation: Sign,
) -> Result<LocalTriangulation, Error> {
    edges.sort_unstable();
    edges.dedup();
    let n = pts.len() as u32;
    let mut mesh = LocalMesh::new(pts, corners, axis, orientation)?;
    for p in 0..n {
        if !corners.contains(&p) {
            mesh.insert_point(p)?;
        }
    }
    for &(a, b) in &edges {
        mesh.insert_segment(a, b)?;
    }
    Ok(LocalTriangulation {
        triangles: mesh.triangles(),
        points: mesh.pts,
        corners,
        constrained: edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::orient3d_generic;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    fn host() -> [Point3; 3] {
        [p(0.0, 0.0, 0.0), p(4.0, 0.0, 0.0), p(0.0, 4.0, 0.0)]
    }

    fn euler(t: &LocalTriangulation) -> i64 {
        let mut e = HashSet::new();
        for tri in &t.triangles {
            for i in 0..3 {
                e.insert(undirected(tri[i], tri[(i + 1) % 3]));
            }
        }
        t.points.len() as i64 - e.len() as i64 + t.triangles.len() as i64
    }

    #[test]
    fn no_constraints_returns_the_triangle() {
        let t = triangulate_constrained(host(), &[], &[], Axis::Z, Sign::Positive).unwrap();
        assert_eq!(t.triangles.len(), 1);
    }

    #[test]
    fn interior_point_makes_a_fan() {
        let t = triangulate_constrained(
            host(),
            &[GenericPoint::explicit(1.0, 1.0, 0.0)],
            &[],
            Axis::Z,
            Sign::Positive,
        )
        .unwrap();
        assert_eq!(t.triangles.len(), 3);
        assert_eq!(euler(&t), 1);
    }

    #[test]
    fn segment_between_edge_points_is_an_edge() {
        let a = GenericPoint::explicit(2.0, 0.0, 0.0);
        let b = GenericPoint::explicit(0.0, 2.0, 0.0);
        let seg = ConstraintSegment {
            a: a.clone(),
            b: b.clone(),
            cut: [p(2.0, 0.0, 0.0), p(0.0, 2.0, 0.0), p(2.0, 0.0, 1.0)],
        };
        let t = triangulate_constrained(host(), &[], &[seg], Axis::Z, Sign::Positive).unwrap();
        assert!(t.triangles.len() >= 2);
        assert_eq!(euler(&t), 1);
        let ia = t.points.iter().position(|q| compare_lex(q, &a).is_eq()).unwrap() as u32;
        let ib = t.points.iter().position(|q| compare_lex(q, &b).is_eq()).unwrap() as u32;
        let has = t.triangles.iter().any(|tri| {
            (0..3).any(|i| undirected(tri[i], tri[(i + 1) % 3]) == undirected(ia, ib))
        });
        assert!(has);
    }

    #[test]
    fn crossing_segments_get_a_new_vertex() {
        let h = host();
        let s1 = ConstraintSegment {
            a: GenericPoint::explicit(1.0, 0.0, 0.0),
            b: GenericPoint::explicit(1.0, 3.0, 0.0),
            cut: [p(1.0, 0.0, 0.0), p(1.0, 3.0, 0.0), p(1.0, 0.0, 5.0)],
        };
        let s2 = ConstraintSegment {
            a: GenericPoint::explicit(0.0, 1.0, 0.0),
            b: GenericPoint::explicit(3.0, 1.0, 0.0),
            cut: [p(0.0, 1.0, 0.0), p(3.0, 1.0, 0.0), p(0.0, 1.0, -2.0)],
        };
        let t = triangulate_constrained(h, &[], &[s1, s2], Axis::Z, Sign::Positive).unwrap();
        assert_eq!(t.points.len(), 8);
        assert!(t.points.iter().any(|q| matches!(q, GenericPoint::Tpi(_))));
        assert_eq!(euler(&t), 1);
        let g = h.map(GenericPoint::Explicit);
        for q in &t.points {
            assert_eq!(orient3d_generic(&g[0], &g[1], &g[2], q), Sign::Zero);
        }
        for tri in &t.triangles {
            let [a, b, c] = tri.map(|i| &t.points[i as usize]);
            assert_eq!(orient2d_projected(a, b, c, Axis::Z), Sign::Positive);
        }
    }

    #[test]
    fn clockwise_host_keeps_its_winding() {
        let h = [p(0.0, 0.0, 0.0), p(0.0, 4.0, 0.0), p(4.0, 0.0, 0.0)];
        let t = triangulate_constrained(
            h,
            &[GenericPoint::explicit(1.0, 1.0, 0.0), GenericPoint::explicit(2.0, 0.0, 0.0)],
            &[],
            Axis::Z,
            Sign::Negative,
        )
        .unwrap();
        assert_eq!(t.triangles.len(), 4);
        for tri in &t.triangles {
            let [a, b, c] = tri.map(|i| &t.points[i as usize]);
            assert_eq!(orient2d_projected(a, b, c, Axis::Z), Sign::Negative);
        }
    }
}
