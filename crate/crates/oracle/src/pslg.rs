//! Faces of a triangle cut by coplanar segments.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::rat::{dot, lerp, on_segment, sign, sub, Chart, PointKey, Q3};

/// A face as a counter-clockwise (host winding) outer cycle plus hole
/// cycles. Cycles list 3D points.
#[derive(Debug, Clone)]
pub struct Face {
    pub outer: Vec<Q3>,
    pub holes: Vec<Vec<Q3>>,
}

/// Splits the closed triangle `t` by `segments` (each lying in its plane
/// and inside it) and returns the bounded faces. `extra` are additional
/// points on the triangle boundary that must become vertices.
pub fn subdivide(t: &[Q3; 3], segments: &[(Q3, Q3)], extra: &[Q3]) -> Vec<Face> {
    let chart = Chart::for_triangle(t);
    let mut pts: Vec<Q3> = Vec::new();
    let mut index: HashMap<PointKey, usize> = HashMap::new();
    let mut id = |p: &Q3, pts: &mut Vec<Q3>| -> usize {
        *index.entry(PointKey(p.clone())).or_insert_with(|| {
            pts.push(p.clone());
            pts.len() - 1
        })
    };
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for i in 0..3 {
        let a = id(&t[i], &mut pts);
        let b = id(&t[(i + 1) % 3], &mut pts);
        segs.push((a, b));
    }
    for (a, b) in segments {
        let (a, b) = (id(a, &mut pts), id(b, &mut pts));
        if a != b {
            segs.push((a, b));
        } else {
            // isolated points do not change the face structure
        }
    }
    for p in extra {
        id(p, &mut pts);
    }

    // Proper crossings between segments.
    let n = segs.len();
    let mut crossings = Vec::new();
    let approx: Vec<[f64; 2]> = pts.iter().map(|p| chart.approx(p)).collect();
    let seg_box = |&(a, b): &(usize, usize)| widened_box(approx[a], approx[b]);
    let boxes: Vec<[[f64; 2]; 2]> = segs.iter().map(seg_box).collect();
    for i in 0..n {
        for j in i + 1..n {
            if !overlap(&boxes[i], &boxes[j]) {
                continue;
            }
            let (a, b) = (&pts[segs[i].0], &pts[segs[i].1]);
            let (c, d) = (&pts[segs[j].0], &pts[segs[j].1]);
            let oa = chart.orient(c, d, a);
            let ob = chart.orient(c, d, b);
            let oc = chart.orient(a, b, c);
            let od = chart.orient(a, b, d);
            if sign(&oa) * sign(&ob) < 0 && sign(&oc) * sign(&od) < 0 {
                let s = &oa / (&oa - &ob);
                crossings.push(lerp(a, b, &s));
            }
        }
    }
    for p in &crossings {
        id(p, &mut pts);
    }
    let approx: Vec<[f64; 2]> = pts.iter().map(|p| chart.approx(p)).collect();

    // Split every segment at the points on it.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in &segs {
        let d = sub(&pts[b], &pts[a]);
        let bx = widened_box(approx[a], approx[b]);
        let mut on: Vec<(crate::rat::Q, usize)> = (0..pts.len())
            .filter(|&k| contains(&bx, approx[k]) && on_segment(&chart, &pts[k], &pts[a], &pts[b]))
            .map(|k| (dot(&sub(&pts[k], &pts[a]), &d), k))
            .collect();
        on.sort_by(|x, y| x.0.cmp(&y.0));
        for w in on.windows(2) {
            let (u, v) = (w[0].1, w[1].1);
            edges.push(if u < v { (u, v) } else { (v, u) });
        }
    }
    edges.sort_unstable();
    edges.dedup();

    let np = pts.len();
    let mut around: Vec<Vec<usize>> = vec![Vec::new(); np];
    for &(a, b) in &edges {
        around[a].push(b);
        around[b].push(a);
    }
    for v in 0..np {
        let o = pts[v].clone();
        around[v].sort_by(|&a, &b| chart.angle_cmp(&o, &pts[a], &pts[b]));
    }
    let position: HashMap<(usize, usize), usize> = (0..np)
        .flat_map(|v| around[v].iter().enumerate().map(move |(k, &w)| ((v, w), k)))
        .collect();

    // Trace cycles with the face on the left.
    let mut used: HashMap<(usize, usize), bool> = HashMap::new();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for &(a, b) in &edges {
        for start in [(a, b), (b, a)] {
            if used.contains_key(&start) {
                continue;
            }
            let mut cyc = Vec::new();
            let (mut u, mut v) = start;
            loop {
                used.insert((u, v), true);
                cyc.push(u);
                let k = position[&(v, u)];
                let deg = around[v].len();
                let w = around[v][(k + deg - 1) % deg];
                u = v;
                v = w;
                if (u, v) == start {
                    break;
                }
            }
            cycles.push(cyc);
        }
    }

    // Connected components of the edge graph.
    let mut comp: Vec<usize> = (0..np).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        let mut y = x;
        while c[y] != r {
            let n = c[y];
            c[y] = r;
            y = n;
        }
        r
    }
    for &(a, b) in &edges {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        if ra != rb {
            comp[ra] = rb;
        }
    }
    let boundary_comp = find(&mut comp, 0);

    let area = |c: &[usize]| chart.area2(&c.iter().map(|&k| &pts[k]).collect::<Vec<_>>());
    let mut faces: Vec<(Vec<usize>, crate::rat::Q)> = Vec::new();
    let mut hole_cycles: Vec<Vec<usize>> = Vec::new();
    for c in cycles {
        let a = area(&c);
        if a.is_positive() {
            faces.push((c, a));
        } else if find(&mut comp, c[0]) != boundary_comp {
            hole_cycles.push(c);
        }
    }
    let mut holes: Vec<Vec<Vec<usize>>> = vec![Vec::new(); faces.len()];
    for h in hole_cycles {
        let hc = find(&mut comp, h[0]);
        let p = &pts[h[0]];
        let mut best: Option<usize> = None;
        for (fi, (f, a)) in faces.iter().enumerate() {
            if find(&mut comp, f[0]) == hc {
                continue;
            }
            let poly: Vec<&Q3> = f.iter().map(|&k| &pts[k]).collect();
            if chart.inside_polygon(p, &poly) == Some(true)
                && best.is_none_or(|b| a < &faces[b].1)
            {
                best = Some(fi);
            }
        }
        if let Some(b) = best {
            holes[b].push(h);
        }
    }
    let pts_of = |c: &[usize]| c.iter().map(|&k| pts[k].clone()).collect::<Vec<_>>();
    let out: Vec<Face> = faces
        .iter()
        .zip(holes)
        .map(|((f, _), hs)| Face {
            outer: pts_of(f),
            holes: hs.iter().map(|h| pts_of(h)).collect(),
        })
        .collect();
    debug_assert!(out.iter().all(|f| !f.outer.is_empty()));
    out
}

/// Box of a segment in chart coordinates, grown far beyond the rounding
/// error of the approximations so it never excludes an exact hit.
fn widened_box(a: [f64; 2], b: [f64; 2]) -> [[f64; 2]; 2] {
    let mut bx = [[0.0; 2]; 2];
    for k in 0..2 {
        let m = 1e-9 * (1.0 + a[k].abs().max(b[k].abs()));
        bx[0][k] = a[k].min(b[k]) - m;
        bx[1][k] = a[k].max(b[k]) + m;
    }
    bx
}

fn overlap(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> bool {
    (0..2).all(|k| a[0][k] <= b[1][k] && b[0][k] <= a[1][k])
}

fn contains(bx: &[[f64; 2]; 2], p: [f64; 2]) -> bool {
    (0..2).all(|k| bx[0][k] <= p[k] && p[k] <= bx[1][k])
}

/// Total signed area (twice) of the faces, for conservation checks.
pub fn faces_area2(t: &[Q3; 3], faces: &[Face]) -> crate::rat::Q {
    let chart = Chart::for_triangle(t);
    let mut s = crate::rat::Q::zero();
    for f in faces {
        s += chart.area2(&f.outer.iter().collect::<Vec<_>>());
        for h in &f.holes {
            s += chart.area2(&h.iter().collect::<Vec<_>>());
        }
    }
    s
}
