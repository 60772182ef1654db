//! Combinatorial mesh checks: components, Euler characteristic,
//! manifoldness and an exact self-intersection scan.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::kernel::{orient2d_projected, point_in_triangle_2d, Containment, GenericPoint, PlaneCache, Point3, Sign};
use crate::mesh::Mesh;
use crate::spatial::{Aabb, Octree, DEFAULT_LEAF_CAPACITY, DEFAULT_MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub components: usize,
    pub euler: i64,
    pub manifold: bool,
}

/// Problems found in a mesh; empty lists mean a closed, consistently
/// oriented 2-manifold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Triangles with a repeated vertex id.
    pub degenerate_triangles: Vec<u32>,
    /// Edges with a single incident triangle.
    pub boundary_edges: Vec<(u32, u32)>,
    /// Edges with more than two incident triangles.
    pub non_manifold_edges: Vec<(u32, u32)>,
    /// Two incident triangles traversing the edge in the same direction.
    pub misoriented_edges: Vec<(u32, u32)>,
    /// Vertices whose link is not a single cycle.
    pub non_manifold_vertices: Vec<u32>,
    pub self_intersections: Vec<(u32, u32)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.degenerate_triangles.is_empty()
            && self.boundary_edges.is_empty()
            && self.non_manifold_edges.is_empty()
            && self.misoriented_edges.is_empty()
            && self.non_manifold_vertices.is_empty()
            && self.self_intersections.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        let mut add = |n: usize, what: &str| {
            if n > 0 {
                parts.push(format!("{n} {what}"));
            }
        };
        add(self.degenerate_triangles.len(), "degenerate triangles");
        add(self.boundary_edges.len(), "boundary edges");
        add(self.non_manifold_edges.len(), "non-manifold edges");
        add(self.misoriented_edges.len(), "misoriented edges");
        add(self.non_manifold_vertices.len(), "non-manifold vertices");
        add(self.self_intersections.len(), "self-intersecting triangle pairs");
        if parts.is_empty() {
            "clean".to_string()
        } else {
            parts.join(", ")
        }
    }
}

fn edge_key(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Edge, orientation and vertex-link checks. Vertices are identified by id.
pub fn validate_connectivity(triangles: &[[u32; 3]]) -> ValidationReport {
    let mut rep = ValidationReport::default();
    // (edge, forward) per incident triangle
    let mut edges: HashMap<(u32, u32), Vec<bool>> = HashMap::with_capacity(triangles.len() * 2);
    for (i, t) in triangles.iter().enumerate() {
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            rep.degenerate_triangles.push(i as u32);
            continue;
        }
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            edges.entry(edge_key(a, b)).or_default().push(a < b);
        }
    }
    for (&e, dirs) in &edges {
        match dirs.len() {
            1 => rep.boundary_edges.push(e),
            2 => {
                if dirs[0] == dirs[1] {
                    rep.misoriented_edges.push(e);
                }
            }
            _ => rep.non_manifold_edges.push(e),
        }
    }
    rep.boundary_edges.sort_unstable();
    rep.non_manifold_edges.sort_unstable();
    rep.misoriented_edges.sort_unstable();

    // Link of every vertex: the opposite edges of its incident triangles
    // must form one cycle.
    let mut link: Vec<(u32, u32, u32)> = Vec::with_capacity(triangles.len() * 3);
    for t in triangles {
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            continue;
        }
        for k in 0..3 {
            link.push((t[k], t[(k + 1) % 3], t[(k + 2) % 3]));
        }
    }
    link.sort_unstable();
    let mut i = 0;
    while i < link.len() {
        let v = link[i].0;
        let mut j = i;
        while j < link.len() && link[j].0 == v {
            j += 1;
        }
        if !is_single_cycle(&link[i..j]) {
            rep.non_manifold_vertices.push(v);
        }
        i = j;
    }
    rep
}

fn is_single_cycle(star: &[(u32, u32, u32)]) -> bool {
    let mut next: HashMap<u32, u32> = HashMap::with_capacity(star.len());
    for &(_, b, c) in star {
        if next.insert(b, c).is_some() {
            return false;
        }
    }
    // Walk from one link vertex; a single cycle returns after exactly
    // `star.len()` steps.
    let start = star[0].1;
    let mut cur = start;
    for step in 1..=star.len() {
        match next.get(&cur) {
            Some(&n) => cur = n,
            None => return false,
        }
        if cur == start {
            return step == star.len();
        }
    }
    false
}

/// Components by shared edges, `V - E + F` over referenced vertices, and
/// the manifold flag of [`validate_connectivity`].
pub fn check_topology(triangles: &[[u32; 3]]) -> Topology {
    let rep = validate_connectivity(triangles);
    let manifold = rep.degenerate_triangles.is_empty()
        && rep.boundary_edges.is_empty()
        && rep.non_manifold_edges.is_empty()
        && rep.misoriented_edges.is_empty()
        && rep.non_manifold_vertices.is_empty();

    let mut verts: Vec<u32> = triangles.iter().flatten().copied().collect();
    verts.sort_unstable();
    verts.dedup();
    let mut parent: Vec<usize> = (0..triangles.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    let mut first: HashMap<(u32, u32), usize> = HashMap::with_capacity(triangles.len() * 2);
    for (i, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let e = edge_key(t[k], t[(k + 1) % 3]);
            if e.0 == e.1 {
                continue;
            }
            match first.get(&e) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
                None => {
                    first.insert(e, i);
                }
            }
        }
    }
    let components = (0..triangles.len()).filter(|&i| find(&mut parent, i) == i).count();
    let euler = verts.len() as i64 - first.len() as i64 + triangles.len() as i64;
    Topology {
        components,
        euler,
        manifold,
    }
}

/// Connectivity checks plus, when asked, the exact self-intersection scan.
pub fn validate_mesh(mesh: &Mesh, self_intersections: bool) -> ValidationReport {
    let mut rep = validate_connectivity(&mesh.triangles);
    if self_intersections {
        rep.self_intersections = find_self_intersections(&mesh.vertices, &mesh.triangles);
    }
    rep
}

/// Pairs of triangles that meet anywhere other than along their shared
/// vertices or edge. Triangles with collinear corners are skipped.
pub fn find_self_intersections(vertices: &[Point3], triangles: &[[u32; 3]]) -> Vec<(u32, u32)> {
    use rayon::prelude::*;

    let corners: Vec<[Point3; 3]> = triangles.iter().map(|t| t.map(|v| vertices[v as usize])).collect();
    let planes: Vec<PlaneCache> = corners.par_iter().map(|c| PlaneCache::new(c[0], c[1], c[2])).collect();
    let boxes: Vec<Aabb> = corners.iter().map(|c| Aabb::from_points(c.iter())).collect();
    let scene = boxes.iter().fold(Aabb::EMPTY, |a, b| a.union(b));
    if boxes.is_empty() {
        return Vec::new();
    }
    let tree = Octree::build(&boxes, scene, DEFAULT_LEAF_CAPACITY, DEFAULT_MAX_DEPTH);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (_, ids) in tree.leaves() {
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if boxes[a as usize].overlaps(&boxes[b as usize]) {
                    pairs.push(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
        .into_par_iter()
        .filter(|&(a, b)| {
            let (a, b) = (a as usize, b as usize);
            !planes[a].is_degenerate()
                && !planes[b].is_degenerate()
                && pair_intersects(&corners[a], &corners[b], &planes[a], &planes[b])
        })
        .collect()
}

fn same(p: &Point3, q: &Point3) -> bool {
    p.key() == q.key()
}

fn pair_intersects(t: &[Point3; 3], u: &[Point3; 3], pt: &PlaneCache, pu: &PlaneCache) -> bool {
    let shared: Vec<Point3> = t.iter().filter(|p| u.iter().any(|q| same(p, q))).copied().collect();
    let ou = u.map(|p| pt.orient(&p));
    if ou[0] == ou[1] && ou[1] == ou[2] && !ou[0].is_zero() {
        return false;
    }
    let ot = t.map(|p| pu.orient(&p));
    if ot[0] == ot[1] && ot[1] == ot[2] && !ot[0].is_zero() {
        return false;
    }
    if shared.len() == 3 {
        return true;
    }
    if ot.iter().all(|s| s.is_zero()) {
        return coplanar_overlap(t, u, &shared, pt.normal_axis());
    }
    // Transversal: the contact lies on the line of the two planes. Any
    // contact point other than a shared vertex is a defect.
    let pts = transversal_points(t, &ot, u, &ou);
    pts.iter().any(|p| !shared.iter().any(|s| p.as_explicit().is_some_and(|e| same(e, s))))
}

/// Points where each triangle's boundary crosses the other triangle.
fn transversal_points(t: &[Point3; 3], ot: &[Sign; 3], u: &[Point3; 3], ou: &[Sign; 3]) -> Vec<GenericPoint> {
    let mut out = Vec::new();
    for (a, oa, b) in [(t, ot, u), (u, ou, t)] {
        let gb = b.map(GenericPoint::Explicit);
        let axis = PlaneCache::new(b[0], b[1], b[2]).normal_axis();
        for i in 0..3 {
            let j = (i + 1) % 3;
            let mut cands = Vec::new();
            if oa[i].is_zero() {
                cands.push(GenericPoint::Explicit(a[i]));
            }
            if oa[i].as_i32() * oa[j].as_i32() < 0 {
                cands.push(GenericPoint::lpi_unchecked(a[i], a[j], b[0], b[1], b[2]));
            }
            for p in cands {
                if !matches!(
                    point_in_triangle_2d(&p, [&gb[0], &gb[1], &gb[2]], axis),
                    Ok(Containment::Outside) | Err(_)
                ) {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn coplanar_overlap(t: &[Point3; 3], u: &[Point3; 3], shared: &[Point3], axis: crate::kernel::Axis) -> bool {
    let g = |p: &Point3| GenericPoint::Explicit(*p);
    let o2 = |a: &Point3, b: &Point3, c: &Point3| orient2d_projected(&g(a), &g(b), &g(c), axis);
    if shared.len() == 2 {
        // Folded onto each other when the free corners lie on the same side.
        let (a, b) = (shared[0], shared[1]);
        let ft = t.iter().find(|p| !same(p, &a) && !same(p, &b)).unwrap();
        let fu = u.iter().find(|p| !same(p, &a) && !same(p, &b)).unwrap();
        return o2(&a, &b, ft) == o2(&a, &b, fu);
    }
    let gt = t.map(GenericPoint::Explicit);
    let gu = u.map(GenericPoint::Explicit);
    let is_shared = |p: &Point3| shared.iter().any(|s| same(s, p));
    for (p, tri) in u.iter().map(|p| (p, &gt)).chain(t.iter().map(|p| (p, &gu))) {
        if is_shared(p) {
            continue;
        }
        if !matches!(
            point_in_triangle_2d(&g(p), [&tri[0], &tri[1], &tri[2]], axis),
            Ok(Containment::Outside) | Err(_)
        ) {
            return true;
        }
    }
    for i in 0..3 {
        let (a, b) = (&t[i], &t[(i + 1) % 3]);
        for j in 0..3 {
            let (c, d) = (&u[j], &u[(j + 1) % 3]);
            let s1 = o2(a, b, c).as_i32() * o2(a, b, d).as_i32();
            let s2 = o2(c, d, a).as_i32() * o2(c, d, b).as_i32();
            if s1 < 0 && s2 < 0 {
                return true;
            }
            // Edges leaving a shared corner in the same direction overlap.
            if shared.len() == 1 && is_shared(a) && is_shared(c) && o2(a, b, d).is_zero() {
                let same_dir = (b.x - a.x) * (d.x - c.x) + (b.y - a.y) * (d.y - c.y) + (b.z - a.z) * (d.z - c.z) > 0.0;
                if same_dir {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{cube, torus, uv_sphere};

    #[test]
    fn closed_shapes() {
        let s = uv_sphere([0.0; 3], 1.0, 12, 8);
        assert_eq!(
            check_topology(&s.triangles),
            Topology { components: 1, euler: 2, manifold: true }
        );
        let two = Mesh::merged(&[s.clone(), s.translated([3.0, 0.0, 0.0])]);
        assert_eq!(check_topology(&two.triangles), Topology { components: 2, euler: 4, manifold: true });
        let t = torus([0.0; 3], 1.0, 0.3, 12, 8);
        assert_eq!(check_topology(&t.triangles), Topology { components: 1, euler: 0, manifold: true });
    }

    #[test]
    fn missing_face_opens_four_edges() {
        let mut c = cube([0.0; 3], 1.0);
        c.triangles.truncate(10);
        let rep = validate_mesh(&c, false);
        assert_eq!(rep.boundary_edges.len(), 4);
        assert!(!check_topology(&c.triangles).manifold);
    }

    #[test]
    fn flipped_triangle_is_misoriented() {
        let mut c = cube([0.0; 3], 1.0);
        c.triangles[0].swap(1, 2);
        assert_eq!(validate_mesh(&c, false).misoriented_edges.len(), 3);
    }

    #[test]
    fn clean_meshes_do_not_self_intersect() {
        assert!(validate_mesh(&uv_sphere([0.0; 3], 1.0, 16, 8), true).is_clean());
        assert!(validate_mesh(&cube([0.0; 3], 1.0), true).is_clean());
    }

    #[test]
    fn overlapping_copies_self_intersect() {
        let c = cube([0.0; 3], 1.0);
        let m = Mesh::merged(&[c.clone(), c.translated([0.5, 0.3, 0.2])]);
        let rep = validate_mesh(&m, true);
        assert!(!rep.self_intersections.is_empty());
        // Connectivity alone does not see it.
        assert!(validate_connectivity(&m.triangles).is_clean());
    }

    #[test]
    fn folded_edge_pair_is_reported() {
        let v = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.5, 0.5, 0.0),
        ];
        let hits = find_self_intersections(&v, &[[0, 1, 2], [1, 0, 3]]);
        assert_eq!(hits, vec![(0, 1)]);
        let v2 = vec![v[0], v[1], v[2], Point3::new(0.5, -0.5, 0.0)];
        assert!(find_self_intersections(&v2, &[[0, 1, 2], [1, 0, 3]]).is_empty());
    }
}
