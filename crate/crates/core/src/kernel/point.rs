//! Explicit and implicit points.
//!
//! Implicit points are stored by their defining primitives and expose
//! homogeneous coordinates `(X, Y, Z, W)` with `x = X / W`. The interval
//! enclosure is computed once at construction, the exact value lazily.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::arith::{cross, det3, dot, lift3, sub3, Field};
use super::dyadic::Dyadic;
use super::interval::Interval;
use super::{Axis, KernelError, Point3, Sign};

/// Intersection of the line through `line[0], line[1]` with the plane
/// through `plane[0..3]`.
pub struct Lpi {
    pub line: [Point3; 2],
    pub plane: [Point3; 3],
    hom: [Interval; 4],
    bbox: [Interval; 3],
    exact: OnceLock<Box<[Dyadic; 4]>>,
}

/// Common point of three planes, each given by three points.
pub struct Tpi {
    pub planes: [[Point3; 3]; 3],
    hom: [Interval; 4],
    bbox: [Interval; 3],
    exact: OnceLock<Box<[Dyadic; 4]>>,
}

#[derive(Clone)]
pub enum GenericPoint {
    Explicit(Point3),
    Lpi(Arc<Lpi>),
    Tpi(Arc<Tpi>),
}

impl fmt::Debug for GenericPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenericPoint::Explicit(p) => write!(f, "E({}, {}, {})", p.x, p.y, p.z),
            GenericPoint::Lpi(l) => write!(f, "LPI(line={:?}, plane={:?})", l.line, l.plane),
            GenericPoint::Tpi(t) => write!(f, "TPI({:?})", t.planes),
        }
    }
}

impl From<Point3> for GenericPoint {
    fn from(p: Point3) -> GenericPoint {
        GenericPoint::Explicit(p)
    }
}

fn lpi_hom<T: Field>(line: &[Point3; 2], plane: &[Point3; 3]) -> [T; 4] {
    let p = lift3::<T>(&line[0]);
    let q = lift3::<T>(&line[1]);
    let r = lift3::<T>(&plane[0]);
    let s = lift3::<T>(&plane[1]);
    let t = lift3::<T>(&plane[2]);
    let n = cross(&sub3(&s, &r), &sub3(&t, &r));
    let qp = sub3(&q, &p);
    let d = dot(&n, &qp);
    let num = dot(&n, &sub3(&r, &p));
    [
        p[0].mul(&d).add(&qp[0].mul(&num)),
        p[1].mul(&d).add(&qp[1].mul(&num)),
        p[2].mul(&d).add(&qp[2].mul(&num)),
        d,
    ]
}

fn tpi_hom<T: Field>(planes: &[[Point3; 3]; 3]) -> [T; 4] {
    let origin = lift3::<T>(&planes[0][0]);
    let mut n: Vec<[T; 3]> = Vec::with_capacity(3);
    let mut o: Vec<T> = Vec::with_capacity(3);
    for pl in planes {
        let a = sub3(&lift3::<T>(&pl[0]), &origin);
        let b = sub3(&lift3::<T>(&pl[1]), &origin);
        let c = sub3(&lift3::<T>(&pl[2]), &origin);
        let ni = cross(&sub3(&b, &a), &sub3(&c, &a));
        o.push(dot(&ni, &a));
        n.push(ni);
    }
    let d = det3(&n[0], &n[1], &n[2]);
    let col = |k: usize| -> T {
        let row = |i: usize| -> [T; 3] {
            let mut r = n[i].clone();
            r[k] = o[i].clone();
            r
        };
        det3(&row(0), &row(1), &row(2))
    };
    let (x, y, z) = (col(0), col(1), col(2));
    [
        origin[0].mul(&d).add(&x),
        origin[1].mul(&d).add(&y),
        origin[2].mul(&d).add(&z),
        d,
    ]
}

fn bbox_of(hom: &[Interval; 4]) -> [Interval; 3] {
    [hom[0].div(hom[3]), hom[1].div(hom[3]), hom[2].div(hom[3])]
}

fn sort_points<const N: usize>(mut pts: [Point3; N]) -> [Point3; N] {
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts
}

fn plane_cmp(a: &[Point3; 3], b: &[Point3; 3]) -> Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(p, q)| p.lex_cmp(q))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn collinear(a: &Point3, b: &Point3, c: &Point3) -> bool {
    Axis::ALL
        .iter()
        .all(|&ax| super::predicates::orient2d_explicit(a, b, c, ax) == Sign::Zero)
}

impl Lpi {
    fn new(line: [Point3; 2], plane: [Point3; 3]) -> Lpi {
        let hom = lpi_hom::<Interval>(&line, &plane);
        Lpi {
            line,
            plane,
            bbox: bbox_of(&hom),
            hom,
            exact: OnceLock::new(),
        }
    }
}

impl Tpi {
    fn new(planes: [[Point3; 3]; 3]) -> Tpi {
        let hom = tpi_hom::<Interval>(&planes);
        Tpi {
            planes,
            bbox: bbox_of(&hom),
            hom,
            exact: OnceLock::new(),
        }
    }
}

impl GenericPoint {
    pub fn explicit(x: f64, y: f64, z: f64) -> GenericPoint {
        GenericPoint::Explicit(Point3::new(x, y, z))
    }

    /// Line `p q` meets plane `r s t`. Definitions are canonicalised so
    /// that equal definitions compare equal without arithmetic.
    pub fn lpi(
        p: Point3,
        q: Point3,
        r: Point3,
        s: Point3,
        t: Point3,
    ) -> Result<GenericPoint, KernelError> {
        if p.lex_cmp(&q).is_eq() {
            return Err(KernelError::DegenerateLine);
        }
        if collinear(&r, &s, &t) {
            return Err(KernelError::DegeneratePlane);
        }
        let g = GenericPoint::lpi_unchecked(p, q, r, s, t);
        if g.w_sign() == Sign::Zero {
            return Err(KernelError::ParallelLine);
        }
        Ok(g)
    }

    /// As [`GenericPoint::lpi`] without validity checks; the caller
    /// guarantees the line crosses the plane transversally.
    pub fn lpi_unchecked(p: Point3, q: Point3, r: Point3, s: Point3, t: Point3) -> GenericPoint {
        let line = sort_points([p, q]);
        let plane = sort_points([r, s, t]);
        GenericPoint::Lpi(Arc::new(Lpi::new(line, plane)))
    }

    pub fn tpi(planes: [[Point3; 3]; 3]) -> Result<GenericPoint, KernelError> {
        for pl in &planes {
            if collinear(&pl[0], &pl[1], &pl[2]) {
                return Err(KernelError::DegeneratePlane);
            }
        }
        let g = GenericPoint::tpi_unchecked(planes);
        if g.w_sign() == Sign::Zero {
            return Err(KernelError::DegenerateTriple);
        }
        Ok(g)
    }

    pub fn tpi_unchecked(planes: [[Point3; 3]; 3]) -> GenericPoint {
        let mut planes = planes.map(sort_points);
        planes.sort_by(plane_cmp);
        GenericPoint::Tpi(Arc::new(Tpi::new(planes)))
    }

    #[inline]
    pub fn is_explicit(&self) -> bool {
        matches!(self, GenericPoint::Explicit(_))
    }

    #[inline]
    pub fn as_explicit(&self) -> Option<&Point3> {
        match self {
            GenericPoint::Explicit(p) => Some(p),
            _ => None,
        }
    }

    /// Rank used to prefer simpler representations of the same point.
    #[inline]
    pub fn complexity(&self) -> u8 {
        match self {
            GenericPoint::Explicit(_) => 0,
            GenericPoint::Lpi(_) => 1,
            GenericPoint::Tpi(_) => 2,
        }
    }

    #[inline]
    pub fn interval_hom(&self) -> [Interval; 4] {
        match self {
            GenericPoint::Explicit(p) => [
                Interval::point(p.x),
                Interval::point(p.y),
                Interval::point(p.z),
                Interval::point(1.0),
            ],
            GenericPoint::Lpi(l) => l.hom,
            GenericPoint::Tpi(t) => t.hom,
        }
    }

    /// Enclosure of the Cartesian coordinates.
    #[inline]
    pub fn bbox(&self) -> [Interval; 3] {
        match self {
            GenericPoint::Explicit(p) => [
                Interval::point(p.x),
                Interval::point(p.y),
                Interval::point(p.z),
            ],
            GenericPoint::Lpi(l) => l.bbox,
            GenericPoint::Tpi(t) => t.bbox,
        }
    }

    #[inline]
    pub fn coord_interval(&self, axis: Axis) -> Interval {
        self.bbox()[axis.index()]
    }

    /// Exact homogeneous coordinates.
    pub fn exact_hom(&self) -> [Dyadic; 4] {
        match self {
            GenericPoint::Explicit(p) => [
                Dyadic::from_f64(p.x),
                Dyadic::from_f64(p.y),
                Dyadic::from_f64(p.z),
                Dyadic::from_f64(1.0),
            ],
            GenericPoint::Lpi(l) => (**l
                .exact
                .get_or_init(|| Box::new(lpi_hom::<Dyadic>(&l.line, &l.plane))))
            .clone(),
            GenericPoint::Tpi(t) => (**t
                .exact
                .get_or_init(|| Box::new(tpi_hom::<Dyadic>(&t.planes))))
            .clone(),
        }
    }

    /// Exact sign of the homogeneous weight.
    pub fn w_sign(&self) -> Sign {
        match self {
            GenericPoint::Explicit(_) => Sign::Positive,
            _ => {
                let w = self.interval_hom()[3];
                w.sign().unwrap_or_else(|| self.exact_hom()[3].sign())
            }
        }
    }

    /// Each coordinate rounded to the nearest binary64 (ties to even).
    pub fn approximate(&self) -> Point3 {
        match self {
            GenericPoint::Explicit(p) => *p,
            _ => {
                let h = self.exact_hom();
                Point3::new(
                    h[0].ratio_to_f64(&h[3]),
                    h[1].ratio_to_f64(&h[3]),
                    h[2].ratio_to_f64(&h[3]),
                )
            }
        }
    }

    /// Cheap floating point estimate of the coordinates.
    pub fn approx_fast(&self) -> Point3 {
        match self {
            GenericPoint::Explicit(p) => *p,
            _ => {
                let b = self.bbox();
                if b.iter().all(|i| i.lo.is_finite() && i.hi.is_finite()) {
                    Point3::new(b[0].mid(), b[1].mid(), b[2].mid())
                } else {
                    self.approximate()
                }
            }
        }
    }

    /// True when both points have the same variant and bitwise-identical
    /// canonical definitions, which implies they are the same point.
    pub fn same_definition(&self, other: &GenericPoint) -> bool {
        match (self, other) {
            (GenericPoint::Explicit(a), GenericPoint::Explicit(b)) => a.key() == b.key(),
            (GenericPoint::Lpi(a), GenericPoint::Lpi(b)) => {
                Arc::ptr_eq(a, b)
                    || (a.line.iter().zip(&b.line).all(|(p, q)| p.key() == q.key())
                        && a.plane.iter().zip(&b.plane).all(|(p, q)| p.key() == q.key()))
            }
            (GenericPoint::Tpi(a), GenericPoint::Tpi(b)) => {
                Arc::ptr_eq(a, b)
                    || a.planes
                        .iter()
                        .flatten()
                        .zip(b.planes.iter().flatten())
                        .all(|(p, q)| p.key() == q.key())
            }
            _ => false,
        }
    }

    /// Exact coordinates as rationals, for tests and diagnostics.
    pub fn to_rational(&self) -> [num_rational::BigRational; 3] {
        let h = self.exact_hom();
        let w = h[3].to_rational();
        [
            h[0].to_rational() / &w,
            h[1].to_rational() / &w,
            h[2].to_rational() / &w,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn lpi_through_origin() {
        let g = GenericPoint::lpi(
            p(0.0, 0.0, -1.0),
            p(0.0, 0.0, 1.0),
            p(0.0, 0.0, 0.0),
            p(1.0, 0.0, 0.0),
            p(0.0, 1.0, 0.0),
        )
        .unwrap();
        assert_eq!(g.approximate(), p(0.0, 0.0, 0.0));
        assert!(g.bbox().iter().all(|i| i.contains(0.0)));
    }

    #[test]
    fn lpi_rejects_parallel_line() {
        let e = GenericPoint::lpi(
            p(0.0, 0.0, 1.0),
            p(1.0, 0.0, 1.0),
            p(0.0, 0.0, 0.0),
            p(1.0, 0.0, 0.0),
            p(0.0, 1.0, 0.0),
        );
        assert_eq!(e.err(), Some(KernelError::ParallelLine));
    }

    #[test]
    fn tpi_of_coordinate_planes() {
        let x1 = [p(1.0, 0.0, 0.0), p(1.0, 1.0, 0.0), p(1.0, 0.0, 1.0)];
        let y2 = [p(0.0, 2.0, 0.0), p(1.0, 2.0, 0.0), p(0.0, 2.0, 1.0)];
        let z3 = [p(0.0, 0.0, 3.0), p(1.0, 0.0, 3.0), p(0.0, 1.0, 3.0)];
        let g = GenericPoint::tpi([x1, y2, z3]).unwrap();
        assert_eq!(g.approximate(), p(1.0, 2.0, 3.0));
        let h = GenericPoint::tpi([z3, x1, y2]).unwrap();
        assert!(g.same_definition(&h));
    }

    #[test]
    fn tpi_rejects_pencil() {
        let a = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0)];
        let b = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 0.0, 1.0)];
        let c = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 1.0)];
        assert_eq!(
            GenericPoint::tpi([a, b, c]).err(),
            Some(KernelError::DegenerateTriple)
        );
    }

    #[test]
    fn lpi_canonical_order_keeps_point() {
        let a = GenericPoint::lpi(
            p(0.1, 0.2, -1.0),
            p(0.3, 0.7, 2.0),
            p(0.0, 0.0, 0.25),
            p(1.0, 0.0, 0.5),
            p(0.0, 1.0, 0.0),
        )
        .unwrap();
        let b = GenericPoint::lpi(
            p(0.3, 0.7, 2.0),
            p(0.1, 0.2, -1.0),
            p(0.0, 1.0, 0.0),
            p(0.0, 0.0, 0.25),
            p(1.0, 0.0, 0.5),
        )
        .unwrap();
        assert!(a.same_definition(&b));
        assert_eq!(a.to_rational(), b.to_rational());
    }
}
