//! Orientation and comparison predicates.

use std::cmp::Ordering;

use super::arith::{cross, det3, det4, dot, lift3, sub3, Field};
use super::dyadic::Dyadic;
use super::interval::Interval;
use super::point::GenericPoint;
use super::{stats, Axis, KernelError, Point3, Sign};

const U: f64 = f64::EPSILON * 0.5;
const CCW_BOUND_A: f64 = (3.0 + 16.0 * U) * U;
const O3D_BOUND_A: f64 = (7.0 + 56.0 * U) * U;
/// Below this magnitude products may be subnormal and the relative error
/// bounds no longer hold.
const UNDERFLOW_GUARD: f64 = 1e-280;

/// Signs produced by each cascade stage; `None` means the stage could not
/// certify the sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSigns {
    pub filter: Option<Sign>,
    pub interval: Option<Sign>,
    pub exact: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    OnBoundary,
    Outside,
}

#[inline]
fn uv(p: &Point3, axis: Axis) -> (f64, f64) {
    let (u, v) = axis.others();
    (p.coord(u), p.coord(v))
}

/// Orientation of three 2D points: positive when counter-clockwise.
pub fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Sign {
    if let Some(s) = orient2d_filter(a, b, c) {
        return s;
    }
    stats::filter_failed();
    let iv = |x: f64| Interval::point(x);
    let det = (iv(b[0]) - iv(a[0])) * (iv(c[1]) - iv(a[1]))
        - (iv(b[1]) - iv(a[1])) * (iv(c[0]) - iv(a[0]));
    if let Some(s) = det.sign() {
        return s;
    }
    stats::interval_failed();
    orient2d_exact(a, b, c)
}

#[inline]
fn orient2d_filter(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<Sign> {
    let l = (a[0] - c[0]) * (b[1] - c[1]);
    let r = (a[1] - c[1]) * (b[0] - c[0]);
    let det = l - r;
    let perm = l.abs() + r.abs();
    if !(perm >= UNDERFLOW_GUARD) {
        return None;
    }
    let bound = CCW_BOUND_A * perm;
    if det > bound {
        Some(Sign::Positive)
    } else if -det > bound {
        Some(Sign::Negative)
    } else {
        None
    }
}

fn orient2d_exact(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Sign {
    stats::exact_evaluated();
    let d = |x: f64| Dyadic::from_f64(x);
    let (ax, ay, bx, by, cx, cy) = (d(a[0]), d(a[1]), d(b[0]), d(b[1]), d(c[0]), d(c[1]));
    let det = &(&(&bx - &ax) * &(&cy - &ay)) - &(&(&by - &ay) * &(&cx - &ax));
    det.sign()
}

/// 2D orientation of explicit points projected by dropping `axis`.
#[inline]
pub(crate) fn orient2d_explicit(a: &Point3, b: &Point3, c: &Point3, axis: Axis) -> Sign {
    let (au, av) = uv(a, axis);
    let (bu, bv) = uv(b, axis);
    let (cu, cv) = uv(c, axis);
    orient2d([au, av], [bu, bv], [cu, cv])
}

#[inline]
fn orient3d_filter(a: &Point3, b: &Point3, c: &Point3, p: &Point3) -> Option<Sign> {
    let adx = a.x - p.x;
    let bdx = b.x - p.x;
    let cdx = c.x - p.x;
    let ady = a.y - p.y;
    let bdy = b.y - p.y;
    let cdy = c.y - p.y;
    let adz = a.z - p.z;
    let bdz = b.z - p.z;
    let cdz = c.z - p.z;

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;

    let det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
    let perm = (bdxcdy.abs() + cdxbdy.abs()) * adz.abs()
        + (cdxady.abs() + adxcdy.abs()) * bdz.abs()
        + (adxbdy.abs() + bdxady.abs()) * cdz.abs();
    if !(perm >= UNDERFLOW_GUARD) {
        return None;
    }
    let bound = O3D_BOUND_A * perm;
    if det > bound {
        Some(Sign::Positive)
    } else if -det > bound {
        Some(Sign::Negative)
    } else {
        None
    }
}

fn orient3d_rows<T: Field>(a: &Point3, b: &Point3, c: &Point3, p: &Point3) -> T {
    let pp = lift3::<T>(p);
    let ra = sub3(&lift3::<T>(a), &pp);
    let rb = sub3(&lift3::<T>(b), &pp);
    let rc = sub3(&lift3::<T>(c), &pp);
    det3(&ra, &rb, &rc)
}

fn orient3d_interval(a: &Point3, b: &Point3, c: &Point3, p: &Point3) -> Option<Sign> {
    orient3d_rows::<Interval>(a, b, c, p).sign()
}

fn orient3d_exact(a: &Point3, b: &Point3, c: &Point3, p: &Point3) -> Sign {
    stats::exact_evaluated();
    orient3d_rows::<Dyadic>(a, b, c, p).sign()
}

/// Sign of the 4x4 determinant with rows `(a,1), (b,1), (c,1), (p,1)`.
///
/// Negative when `p` lies on the side the normal `(b-a)x(c-a)` points to.
pub fn orient3d(a: &Point3, b: &Point3, c: &Point3, p: &Point3) -> Sign {
    if let Some(s) = orient3d_filter(a, b, c, p) {
        return s;
    }
    stats::filter_failed();
    orient3d_after_filter(a, b, c, p)
}

pub(crate) fn orient3d_after_filter(a: &Point3, b: &Point3, c: &Point3, p: &Point3) -> Sign {
    if let Some(s) = orient3d_interval(a, b, c, p) {
        return s;
    }
    stats::interval_failed();
    orient3d_exact(a, b, c, p)
}

/// Runs every stage of [`orient3d`] regardless of earlier success.
pub fn orient3d_audit(a: &Point3, b: &Point3, c: &Point3, p: &Point3) -> StageSigns {
    StageSigns {
        filter: orient3d_filter(a, b, c, p),
        interval: orient3d_interval(a, b, c, p),
        exact: orient3d_exact(a, b, c, p),
    }
}

fn hom_sign_product(ws: &[Interval]) -> Option<Sign> {
    let mut s = Sign::Positive;
    for w in ws {
        s = s.mul(w.sign()?);
    }
    Some(s)
}

fn dyadic_sign_product(ws: &[&Dyadic]) -> Sign {
    ws.iter().fold(Sign::Positive, |s, w| s.mul(w.sign()))
}

/// Orientation with an explicit plane and an arbitrary query point,
/// evaluated relative to `a` as `det[b-a; c-a; a W - P] * sign(W)`.
fn orient3d_plane_point<T: Field>(a: &Point3, b: &Point3, c: &Point3, h: &[T; 4]) -> T {
    let aa = lift3::<T>(a);
    let ba = sub3(&lift3::<T>(b), &aa);
    let ca = sub3(&lift3::<T>(c), &aa);
    let w = &h[3];
    let ap = [
        aa[0].mul(w).sub(&h[0]),
        aa[1].mul(w).sub(&h[1]),
        aa[2].mul(w).sub(&h[2]),
    ];
    dot(&cross(&ba, &ca), &ap)
}

/// Exact orientation of `p` relative to the plane `a b c`; any of the
/// points may be implicit.
pub fn orient3d_generic(
    a: &GenericPoint,
    b: &GenericPoint,
    c: &GenericPoint,
    p: &GenericPoint,
) -> Sign {
    match (a, b, c, p) {
        (
            GenericPoint::Explicit(a),
            GenericPoint::Explicit(b),
            GenericPoint::Explicit(c),
            GenericPoint::Explicit(p),
        ) => orient3d(a, b, c, p),
        (GenericPoint::Explicit(a), GenericPoint::Explicit(b), GenericPoint::Explicit(c), p) => {
            orient3d_explicit_plane(a, b, c, p)
        }
        _ => orient3d_hom(a, b, c, p),
    }
}

pub(crate) fn orient3d_explicit_plane(a: &Point3, b: &Point3, c: &Point3, p: &GenericPoint) -> Sign {
    if let GenericPoint::Explicit(p) = p {
        return orient3d(a, b, c, p);
    }
    let h = p.interval_hom();
    if let (Some(d), Some(w)) = (orient3d_plane_point(a, b, c, &h).sign(), h[3].sign()) {
        return d.mul(w);
    }
    stats::interval_failed();
    stats::exact_evaluated();
    let h = p.exact_hom();
    orient3d_plane_point(a, b, c, &h).sign().mul(h[3].sign())
}

fn orient3d_hom(a: &GenericPoint, b: &GenericPoint, c: &GenericPoint, p: &GenericPoint) -> Sign {
    let hs = [
        a.interval_hom(),
        b.interval_hom(),
        c.interval_hom(),
        p.interval_hom(),
    ];
    let ws = [hs[0][3], hs[1][3], hs[2][3], hs[3][3]];
    if let (Some(d), Some(w)) = (det4(&hs).sign(), hom_sign_product(&ws)) {
        return d.mul(w);
    }
    stats::interval_failed();
    stats::exact_evaluated();
    let hs = [a.exact_hom(), b.exact_hom(), c.exact_hom(), p.exact_hom()];
    let w = dyadic_sign_product(&[&hs[0][3], &hs[1][3], &hs[2][3], &hs[3][3]]);
    det4(&hs).sign().mul(w)
}

fn project_hom<T: Clone>(h: &[T; 4], axis: Axis) -> [T; 3] {
    let (u, v) = axis.others();
    [h[u.index()].clone(), h[v.index()].clone(), h[3].clone()]
}

/// 2D orientation of the projections obtained by dropping `axis`.
///
/// The projection keeps the remaining axes in cyclic order, so a triangle
/// projects counter-clockwise exactly when its normal has a positive
/// component along `axis`.
pub fn orient2d_projected(
    a: &GenericPoint,
    b: &GenericPoint,
    c: &GenericPoint,
    axis: Axis,
) -> Sign {
    if let (GenericPoint::Explicit(a), GenericPoint::Explicit(b), GenericPoint::Explicit(c)) =
        (a, b, c)
    {
        return orient2d_explicit(a, b, c, axis);
    }
    let ha = project_hom(&a.interval_hom(), axis);
    let hb = project_hom(&b.interval_hom(), axis);
    let hc = project_hom(&c.interval_hom(), axis);
    if let (Some(d), Some(w)) = (
        det3(&ha, &hb, &hc).sign(),
        hom_sign_product(&[ha[2], hb[2], hc[2]]),
    ) {
        return d.mul(w);
    }
    stats::interval_failed();
    stats::exact_evaluated();
    let ha = project_hom(&a.exact_hom(), axis);
    let hb = project_hom(&b.exact_hom(), axis);
    let hc = project_hom(&c.exact_hom(), axis);
    det3(&ha, &hb, &hc)
        .sign()
        .mul(dyadic_sign_product(&[&ha[2], &hb[2], &hc[2]]))
}

/// Exact comparison of one coordinate of two points.
pub fn compare_on_axis(p: &GenericPoint, q: &GenericPoint, axis: Axis) -> Ordering {
    if let (GenericPoint::Explicit(a), GenericPoint::Explicit(b)) = (p, q) {
        return a
            .coord(axis)
            .partial_cmp(&b.coord(axis))
            .expect("non-finite coordinate");
    }
    let i = axis.index();
    let (ip, iq) = (p.bbox()[i], q.bbox()[i]);
    if ip.hi < iq.lo {
        return Ordering::Less;
    }
    if iq.hi < ip.lo {
        return Ordering::Greater;
    }
    if p.same_definition(q) {
        return Ordering::Equal;
    }
    let (hp, hq) = (p.interval_hom(), q.interval_hom());
    let d = hp[i] * hq[3] - hq[i] * hp[3];
    if let (Some(d), Some(w)) = (d.sign(), hom_sign_product(&[hp[3], hq[3]])) {
        return d.mul(w).into();
    }
    stats::interval_failed();
    stats::exact_evaluated();
    let (hp, hq) = (p.exact_hom(), q.exact_hom());
    let d = &(&hp[i] * &hq[3]) - &(&hq[i] * &hp[3]);
    d.sign()
        .mul(dyadic_sign_product(&[&hp[3], &hq[3]]))
        .into()
}

/// Lexicographic exact order on (x, y, z).
pub fn compare_lex(p: &GenericPoint, q: &GenericPoint) -> Ordering {
    if let (GenericPoint::Explicit(a), GenericPoint::Explicit(b)) = (p, q) {
        return a.lex_cmp(b);
    }
    if p.same_definition(q) {
        return Ordering::Equal;
    }
    compare_on_axis(p, q, Axis::X)
        .then_with(|| compare_on_axis(p, q, Axis::Y))
        .then_with(|| compare_on_axis(p, q, Axis::Z))
}

/// Classifies `p` against the closed triangle `t` after dropping `axis`.
pub fn point_in_triangle_2d(
    p: &GenericPoint,
    t: [&GenericPoint; 3],
    axis: Axis,
) -> Result<Containment, KernelError> {
    let o = orient2d_projected(t[0], t[1], t[2], axis);
    if o.is_zero() {
        return Err(KernelError::DegenerateProjection);
    }
    let mut on_edge = false;
    for i in 0..3 {
        let s = orient2d_projected(t[i], t[(i + 1) % 3], p, axis).mul(o);
        match s {
            Sign::Negative => return Ok(Containment::Outside),
            Sign::Zero => on_edge = true,
            Sign::Positive => {}
        }
    }
    Ok(if on_edge {
        Containment::OnBoundary
    } else {
        Containment::Inside
    })
}

/// IEEE-754 `nextAfter`.
pub fn next_after(x: f64, toward: f64) -> f64 {
    if x.is_nan() || toward.is_nan() {
        return f64::NAN;
    }
    if x == toward {
        return toward;
    }
    if x < toward {
        x.next_up()
    } else {
        x.next_down()
    }
}
