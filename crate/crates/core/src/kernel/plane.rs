//! Per-triangle cached orientation.
//!
//! Expanding the 4x4 orientation determinant along the query point gives
//! `-px*m_yz + py*m_xz - pz*m_xy + m_xyz`, where the four minors depend only
//! on the plane. Caching them turns each test into a 4-term dot product.

use super::point::GenericPoint;
use super::predicates::{orient2d_explicit, orient3d_after_filter, orient3d_explicit_plane};
use super::{stats, Axis, KernelError, Point3, Sign};

const U: f64 = f64::EPSILON * 0.5;
const CCW_BOUND_A: f64 = (3.0 + 16.0 * U) * U;
const DET3_BOUND: f64 = 8.0 * U;
const DOT4_BOUND: f64 = 6.0 * U;
const UNDERFLOW_GUARD: f64 = 1e-280;

#[derive(Debug, Clone)]
pub struct PlaneCache {
    /// `m_yz, m_xz, m_xy, m_xyz` rounded to binary64.
    pub minors: [f64; 4],
    /// Absolute error bound of each rounded minor.
    pub errors: [f64; 4],
    pub triangle: [Point3; 3],
    filter_ok: bool,
    normal_axis: Axis,
    normal_sign: Sign,
}

fn minor2(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> (f64, f64) {
    let l = (a.0 - c.0) * (b.1 - c.1);
    let r = (a.1 - c.1) * (b.0 - c.0);
    (l - r, l.abs() + r.abs())
}

impl PlaneCache {
    pub fn new(a: Point3, b: Point3, c: Point3) -> PlaneCache {
        let (m_yz, p_yz) = minor2((a.y, a.z), (b.y, b.z), (c.y, c.z));
        let (m_xz, p_xz) = minor2((a.x, a.z), (b.x, b.z), (c.x, c.z));
        let (m_xy, p_xy) = minor2((a.x, a.y), (b.x, b.y), (c.x, c.y));

        let t0 = b.y * c.z;
        let t1 = b.z * c.y;
        let t2 = b.z * c.x;
        let t3 = b.x * c.z;
        let t4 = b.x * c.y;
        let t5 = b.y * c.x;
        let m_xyz = a.x * (t0 - t1) + a.y * (t2 - t3) + a.z * (t4 - t5);
        let p_xyz = a.x.abs() * (t0.abs() + t1.abs())
            + a.y.abs() * (t2.abs() + t3.abs())
            + a.z.abs() * (t4.abs() + t5.abs());

        let perms = [p_yz, p_xz, p_xy, p_xyz];
        let finite = [m_yz, m_xz, m_xy, m_xyz]
            .iter()
            .chain(perms.iter())
            .all(|v| v.is_finite());
        let filter_ok = finite
            && perms
                .iter()
                .all(|&p| p == 0.0 || p >= UNDERFLOW_GUARD);

        let minors = [m_yz, m_xz, m_xy, m_xyz];
        let errors = [
            CCW_BOUND_A * p_yz,
            CCW_BOUND_A * p_xz,
            CCW_BOUND_A * p_xy,
            DET3_BOUND * p_xyz,
        ];

        // |n| components along X, Y, Z are |m_yz|, |m_xz|, |m_xy|.
        let mags = [m_yz.abs(), m_xz.abs(), m_xy.abs()];
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| mags[j].partial_cmp(&mags[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
        let mut normal_axis = Axis::from_index(order[0]);
        let mut normal_sign = Sign::Zero;
        for &i in &order {
            let axis = Axis::from_index(i);
            let s = orient2d_explicit(&a, &b, &c, axis);
            if !s.is_zero() {
                normal_axis = axis;
                normal_sign = s;
                break;
            }
        }

        PlaneCache {
            minors,
            errors,
            triangle: [a, b, c],
            filter_ok,
            normal_axis,
            normal_sign,
        }
    }

    /// True when the defining points are collinear.
    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.normal_sign.is_zero()
    }

    /// Axis along which the normal has its largest (and exactly nonzero)
    /// component; projecting along it gives the largest 2D area.
    #[inline]
    pub fn normal_axis(&self) -> Axis {
        self.normal_axis
    }

    /// Sign of the normal component along [`PlaneCache::normal_axis`].
    #[inline]
    pub fn normal_sign(&self) -> Sign {
        self.normal_sign
    }

    #[inline]
    fn filter(&self, p: &Point3) -> Option<Sign> {
        if !self.filter_ok {
            return None;
        }
        let [m0, m1, m2, m3] = self.minors;
        let [e0, e1, e2, e3] = self.errors;
        let v0 = -p.x * m0;
        let v1 = p.y * m1;
        let v2 = -p.z * m2;
        let det = v0 + v1 + v2 + m3;
        let mag = v0.abs() + v1.abs() + v2.abs() + m3.abs();
        let bound = (p.x.abs() * e0 + p.y.abs() * e1 + p.z.abs() * e2 + e3 + DOT4_BOUND * mag)
            * (1.0 + 8.0 * U);
        if !bound.is_finite() || !det.is_finite() {
            return None;
        }
        if det > bound && det.abs() >= UNDERFLOW_GUARD {
            Some(Sign::Positive)
        } else if -det > bound && det.abs() >= UNDERFLOW_GUARD {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    /// Same sign as `orient3d(a, b, c, p)` for the cached triangle.
    #[inline]
    pub fn orient(&self, p: &Point3) -> Sign {
        if let Some(s) = self.filter(p) {
            return s;
        }
        stats::filter_failed();
        let [a, b, c] = &self.triangle;
        orient3d_after_filter(a, b, c, p)
    }

    /// Filter result only, `None` when it cannot certify the sign.
    pub fn orient_filter_only(&self, p: &Point3) -> Option<Sign> {
        self.filter(p)
    }

    pub fn orient_generic(&self, p: &GenericPoint) -> Sign {
        match p {
            GenericPoint::Explicit(q) => self.orient(q),
            _ => {
                let [a, b, c] = &self.triangle;
                orient3d_explicit_plane(a, b, c, p)
            }
        }
    }
}

/// Builds the cache, rejecting collinear triples.
pub fn make_plane_cache(a: Point3, b: Point3, c: Point3) -> Result<PlaneCache, KernelError> {
    let cache = PlaneCache::new(a, b, c);
    if cache.is_degenerate() {
        Err(KernelError::DegeneratePlane)
    } else {
        Ok(cache)
    }
}
