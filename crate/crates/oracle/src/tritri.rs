//! Exact intersection of two closed triangles.

use num_traits::Zero;

use crate::rat::{dot, lerp, normal, sign, sub, Chart, Q, Q3};

/// The intersection as a convex polygon: no points, a point, a segment or
/// (coplanar case) a polygon with up to six corners.
#[derive(Debug, Clone, PartialEq)]
pub struct Intersection {
    pub points: Vec<Q3>,
    pub coplanar: bool,
}

pub fn intersect(t: &[Q3; 3], u: &[Q3; 3]) -> Intersection {
    let nt = normal(t);
    let du: Vec<i32> = u.iter().map(|p| sign(&dot(&nt, &sub(p, &t[0])))).collect();
    if du.iter().all(|&s| s == 0) {
        return Intersection {
            points: clip_polygon(u.to_vec(), t),
            coplanar: true,
        };
    }
    let nu = normal(u);
    let dt: Vec<i32> = t.iter().map(|p| sign(&dot(&nu, &sub(p, &u[0])))).collect();
    let none = Intersection {
        points: Vec::new(),
        coplanar: false,
    };
    if du.iter().all(|&s| s == du[0] && s != 0) || dt.iter().all(|&s| s == dt[0] && s != 0) {
        return none;
    }
    let a = plane_section(t, &nu, &u[0]);
    let b = plane_section(u, &nt, &t[0]);
    let dir = crate::rat::cross(&nt, &nu);
    let key = |p: &Q3| dot(&dir, p);
    let span = |s: &[Q3]| {
        let mut lo = 0;
        let mut hi = 0;
        for i in 1..s.len() {
            if key(&s[i]) < key(&s[lo]) {
                lo = i;
            }
            if key(&s[i]) > key(&s[hi]) {
                hi = i;
            }
        }
        (s[lo].clone(), s[hi].clone())
    };
    let (alo, ahi) = span(&a);
    let (blo, bhi) = span(&b);
    let lo = if key(&alo) >= key(&blo) { alo } else { blo };
    let hi = if key(&ahi) <= key(&bhi) { ahi } else { bhi };
    match key(&lo).cmp(&key(&hi)) {
        std::cmp::Ordering::Greater => none,
        std::cmp::Ordering::Equal => Intersection {
            points: vec![lo],
            coplanar: false,
        },
        std::cmp::Ordering::Less => Intersection {
            points: vec![lo, hi],
            coplanar: false,
        },
    }
}

/// Points of triangle `t` on the plane through `o` with normal `n`.
fn plane_section(t: &[Q3; 3], n: &Q3, o: &Q3) -> Vec<Q3> {
    let d: Vec<Q> = t.iter().map(|p| dot(n, &sub(p, o))).collect();
    let mut out = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        if d[i].is_zero() {
            out.push(t[i].clone());
        }
        if sign(&d[i]) * sign(&d[j]) < 0 {
            let s = &d[i] / (&d[i] - &d[j]);
            out.push(lerp(&t[i], &t[j], &s));
        }
    }
    out
}

/// Sutherland-Hodgman clip of a coplanar convex polygon by triangle `t`.
pub fn clip_polygon(mut poly: Vec<Q3>, t: &[Q3; 3]) -> Vec<Q3> {
    let chart = Chart::for_triangle(t);
    for i in 0..3 {
        let (a, b) = (&t[i], &t[(i + 1) % 3]);
        if poly.is_empty() {
            break;
        }
        let f: Vec<Q> = poly.iter().map(|p| chart.orient(a, b, p)).collect();
        let mut out = Vec::new();
        let n = poly.len();
        for k in 0..n {
            let l = (k + 1) % n;
            let (fk, fl) = (sign(&f[k]), sign(&f[l]));
            if fk >= 0 {
                out.push(poly[k].clone());
            }
            if fk * fl < 0 {
                let s = &f[k] / (&f[k] - &f[l]);
                out.push(lerp(&poly[k], &poly[l], &s));
            }
        }
        poly = out;
    }
    let mut clean: Vec<Q3> = Vec::with_capacity(poly.len());
    for p in poly {
        if clean.last() != Some(&p) {
            clean.push(p);
        }
    }
    while clean.len() > 1 && clean.first() == clean.last() {
        clean.pop();
    }
    clean
}

/// Part of the coplanar segment `pq` inside the closed triangle `t`.
pub fn clip_segment(p: &Q3, q: &Q3, t: &[Q3; 3]) -> Option<(Q3, Q3)> {
    let chart = Chart::for_triangle(t);
    let mut lo = Q::zero();
    let mut hi = Q::from_integer(1.into());
    for i in 0..3 {
        let (a, b) = (&t[i], &t[(i + 1) % 3]);
        let fp = chart.orient(a, b, p);
        let fq = chart.orient(a, b, q);
        match (sign(&fp) >= 0, sign(&fq) >= 0) {
            (true, true) => {}
            (false, false) => return None,
            (inp, _) => {
                let s = &fp / (&fp - &fq);
                if inp {
                    if s < hi {
                        hi = s;
                    }
                } else if s > lo {
                    lo = s;
                }
            }
        }
    }
    if lo > hi {
        return None;
    }
    Some((lerp(p, q, &lo), lerp(p, q, &hi)))
}
