//! Plain rational vector arithmetic.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type Q3 = [Q; 3];

/// Hash-map key for a point. Values are always kept in lowest terms with a
/// positive denominator, so hashing the raw parts agrees with equality and
/// avoids the continued-fraction hash of the rational type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointKey(pub Q3);

impl std::hash::Hash for PointKey {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        for c in &self.0 {
            debug_assert!(c.denom().is_positive());
            c.numer().hash(h);
            c.denom().hash(h);
        }
    }
}

pub fn q(x: f64) -> Q {
    Q::from_float(x).expect("finite coordinate")
}

pub fn q3(p: [f64; 3]) -> Q3 {
    [q(p[0]), q(p[1]), q(p[2])]
}

pub fn sub(a: &Q3, b: &Q3) -> Q3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

pub fn add(a: &Q3, b: &Q3) -> Q3 {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub fn scale(a: &Q3, s: &Q) -> Q3 {
    [&a[0] * s, &a[1] * s, &a[2] * s]
}

pub fn cross(a: &Q3, b: &Q3) -> Q3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn dot(a: &Q3, b: &Q3) -> Q {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

pub fn sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub fn normal(t: &[Q3; 3]) -> Q3 {
    cross(&sub(&t[1], &t[0]), &sub(&t[2], &t[0]))
}

/// Positive when `p` lies on the side the normal `(b - a) x (c - a)`
/// points to.
pub fn side(a: &Q3, b: &Q3, c: &Q3, p: &Q3) -> i32 {
    sign(&dot(&cross(&sub(b, a), &sub(c, a)), &sub(p, a)))
}

/// `a + t (b - a)`.
pub fn lerp(a: &Q3, b: &Q3, t: &Q) -> Q3 {
    add(a, &scale(&sub(b, a), t))
}

/// Index of the largest absolute component.
pub fn dominant_axis(n: &Q3) -> usize {
    let mut k = 0;
    for i in 1..3 {
        if n[i].abs() > n[k].abs() {
            k = i;
        }
    }
    k
}

/// A 2D view of a plane: drops `axis` and optionally swaps the remaining
/// two coordinates so that a chosen reference triangle is counter-clockwise.
#[derive(Debug, Clone, Copy)]
pub struct Chart {
    pub u: usize,
    pub v: usize,
}

impl Chart {
    pub fn for_triangle(t: &[Q3; 3]) -> Chart {
        let n = normal(t);
        let k = dominant_axis(&n);
        let (u, v) = ((k + 1) % 3, (k + 2) % 3);
        // With cyclic (u, v) the 2D orientation equals sign(n_k).
        if n[k].is_positive() {
            Chart { u, v }
        } else {
            Chart { u: v, v: u }
        }
    }

    /// Nearest doubles of the chart coordinates.
    pub fn approx(&self, p: &Q3) -> [f64; 2] {
        [p[self.u].to_f64().unwrap_or(f64::NAN), p[self.v].to_f64().unwrap_or(f64::NAN)]
    }

    pub fn orient(&self, a: &Q3, b: &Q3, c: &Q3) -> Q {
        (&b[self.u] - &a[self.u]) * (&c[self.v] - &a[self.v])
            - (&b[self.v] - &a[self.v]) * (&c[self.u] - &a[self.u])
    }

    /// Compares directions `a - o` and `b - o` by angle in [0, 2 pi).
    pub fn angle_cmp(&self, o: &Q3, a: &Q3, b: &Q3) -> Ordering {
        let half = |p: &Q3| {
            let dx = &p[self.u] - &o[self.u];
            let dy = &p[self.v] - &o[self.v];
            if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
                0
            } else {
                1
            }
        };
        half(a).cmp(&half(b)).then_with(|| 0.cmp(&sign(&self.orient(o, a, b))))
    }

    /// Twice the signed area of a closed polygon.
    pub fn area2(&self, poly: &[&Q3]) -> Q {
        let mut s = Q::zero();
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            s += &a[self.u] * &b[self.v] - &a[self.v] * &b[self.u];
        }
        s
    }

    /// Strict interior test by crossing number; `None` when `p` is on the
    /// boundary.
    pub fn inside_polygon(&self, p: &Q3, poly: &[&Q3]) -> Option<bool> {
        let v = self.v;
        let mut inside = false;
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            if on_segment(self, p, a, b) {
                return None;
            }
            if (a[v] > p[v]) != (b[v] > p[v]) {
                // x-coordinate of the edge at height p_v, compared without division.
                let o = self.orient(a, b, p);
                let up = b[v] > a[v];
                if (sign(&o) > 0) == up {
                    inside = !inside;
                }
            }
        }
        Some(inside)
    }
}

/// Whether `p` lies on the closed segment `ab` (all in one plane).
pub fn on_segment(chart: &Chart, p: &Q3, a: &Q3, b: &Q3) -> bool {
    if !chart.orient(a, b, p).is_zero() {
        return false;
    }
    let d = sub(b, a);
    let t = dot(&sub(p, a), &d);
    !t.is_negative() && t <= dot(&d, &d)
}

/// Whether `p` lies on the closed 3D segment `ab`.
pub fn on_segment_3d(p: &Q3, a: &Q3, b: &Q3) -> bool {
    let d = sub(b, a);
    let w = sub(p, a);
    if cross(&d, &w).iter().any(|c| !c.is_zero()) {
        return false;
    }
    let t = dot(&w, &d);
    !t.is_negative() && t <= dot(&d, &d)
}
