//! Kernel predicates checked against straightforward rational evaluation.

use std::cmp::Ordering;

use exactcsg::kernel::{
    compare_lex, compare_on_axis, orient2d_projected, orient3d, orient3d_audit, orient3d_generic,
    Axis, GenericPoint, PlaneCache, Point3, Sign,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn q(x: f64) -> Q {
    Q::from_f64(x).unwrap()
}

fn q3(p: &Point3) -> [Q; 3] {
    [q(p.x), q(p.y), q(p.z)]
}

fn sign_of(v: &Q) -> Sign {
    if v.is_zero() {
        Sign::Zero
    } else if v.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

fn sub(a: &[Q; 3], b: &[Q; 3]) -> [Q; 3] {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn cross(a: &[Q; 3], b: &[Q; 3]) -> [Q; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &[Q; 3], b: &[Q; 3]) -> Q {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

/// Negative when p is on the side of (b-a)x(c-a).
fn rat_orient3d(a: &[Q; 3], b: &[Q; 3], c: &[Q; 3], p: &[Q; 3]) -> Sign {
    let n = cross(&sub(b, a), &sub(c, a));
    sign_of(&-dot(&n, &sub(p, a)))
}

fn rat_lpi(p: &Point3, qq: &Point3, r: &Point3, s: &Point3, t: &Point3) -> [Q; 3] {
    let (p, qq, r, s, t) = (q3(p), q3(qq), q3(r), q3(s), q3(t));
    let n = cross(&sub(&s, &r), &sub(&t, &r));
    let d = sub(&qq, &p);
    let lambda = dot(&n, &sub(&r, &p)) / dot(&n, &d);
    [
        &p[0] + &lambda * &d[0],
        &p[1] + &lambda * &d[1],
        &p[2] + &lambda * &d[2],
    ]
}

fn rat_orient2d(a: &[Q; 3], b: &[Q; 3], c: &[Q; 3], axis: Axis) -> Sign {
    let (u, v) = axis.others();
    let (u, v) = (u.index(), v.index());
    let det = (&b[u] - &a[u]) * (&c[v] - &a[v]) - (&b[v] - &a[v]) * (&c[u] - &a[u]);
    sign_of(&det)
}


/// Scales a set of binary64 points onto a common integer lattice
/// `coord = m * 2^e_min`; predicate signs are invariant under this scaling.
fn lattice(points: &[Point3]) -> Vec<[BigInt; 3]> {
    fn parts(x: f64) -> (BigInt, i64) {
        if x == 0.0 {
            return (BigInt::zero(), i64::MAX);
        }
        let bits = x.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if biased == 0 { (frac, -1074) } else { (frac | (1 << 52), biased - 1075) };
        let m = if x < 0.0 { -m } else { m };
        (BigInt::from(m), e)
    }
    let all: Vec<(BigInt, i64)> = points
        .iter()
        .flat_map(|p| [parts(p.x), parts(p.y), parts(p.z)])
        .collect();
    let emin = all.iter().map(|(_, e)| *e).min().unwrap().min(0);
    let scaled: Vec<BigInt> = all
        .into_iter()
        .map(|(m, e)| if e == i64::MAX { m } else { m << (e - emin) as usize })
        .collect();
    scaled
        .chunks(3)
        .map(|c| [c[0].clone(), c[1].clone(), c[2].clone()])
        .collect()
}

type Z3 = [BigInt; 3];

fn zsub(a: &Z3, b: &Z3) -> Z3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn zcross(a: &Z3, b: &Z3) -> Z3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn zdot(a: &Z3, b: &Z3) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn zsign(v: &BigInt) -> Sign {
    if v.is_zero() {
        Sign::Zero
    } else if v.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Homogeneous lattice coordinates (X, W) of a line/plane intersection.
fn z_lpi(p: &Z3, q: &Z3, r: &Z3, s: &Z3, t: &Z3) -> (Z3, BigInt) {
    let n = zcross(&zsub(s, r), &zsub(t, r));
    let d = zsub(q, p);
    let w = zdot(&n, &d);
    let num = zdot(&n, &zsub(r, p));
    (
        [
            &p[0] * &w + &d[0] * &num,
            &p[1] * &w + &d[1] * &num,
            &p[2] * &w + &d[2] * &num,
        ],
        w,
    )
}

/// orient3d(a, b, c, X / W) on lattice values.
fn z_orient3d_hom(a: &Z3, b: &Z3, c: &Z3, x: &Z3, w: &BigInt) -> Sign {
    let n = zcross(&zsub(b, a), &zsub(c, a));
    let aw = [&a[0] * w, &a[1] * w, &a[2] * w];
    zsign(&-zdot(&n, &zsub(x, &aw))).mul(zsign(w))
}

/// orient2d of (a, X / W, c) after dropping `axis`.
fn z_orient2d_hom(a: &Z3, x: &Z3, w: &BigInt, c: &Z3, axis: Axis) -> Sign {
    let (u, v) = axis.others();
    let (u, v) = (u.index(), v.index());
    let bu = &x[u] - &a[u] * w;
    let bv = &x[v] - &a[v] * w;
    let cu = (&c[u] - &a[u]) * w;
    let cv = (&c[v] - &a[v]) * w;
    zsign(&(&bu * &cv - &bv * &cu))
}

fn random_lpi_points(rng: &mut ChaCha8Rng) -> ([Point3; 5], GenericPoint) {
    loop {
        let pts = [0; 5].map(|_| rand_point(rng, 10.0));
        if let Ok(g) = GenericPoint::lpi(pts[0], pts[1], pts[2], pts[3], pts[4]) {
            return (pts, g);
        }
    }
}

fn rand_point(rng: &mut ChaCha8Rng, scale: f64) -> Point3 {
    Point3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// A point on the plane through a, b, c, rounded to binary64: nearly but
/// usually not exactly coplanar.
fn near_coplanar(rng: &mut ChaCha8Rng, a: &Point3, b: &Point3, c: &Point3) -> Point3 {
    let u: f64 = rng.gen_range(-2.0..2.0);
    let v: f64 = rng.gen_range(-2.0..2.0);
    Point3::new(
        a.x + u * (b.x - a.x) + v * (c.x - a.x),
        a.y + u * (b.y - a.y) + v * (c.y - a.y),
        a.z + u * (b.z - a.z) + v * (c.z - a.z),
    )
}

fn random_lpi(rng: &mut ChaCha8Rng) -> (GenericPoint, [Q; 3]) {
    loop {
        let pts: Vec<Point3> = (0..5).map(|_| rand_point(rng, 10.0)).collect();
        if let Ok(g) = GenericPoint::lpi(pts[0], pts[1], pts[2], pts[3], pts[4]) {
            let r = rat_lpi(&pts[0], &pts[1], &pts[2], &pts[3], &pts[4]);
            return (g, r);
        }
    }
}

#[test]
fn orient3d_matches_rationals_random_and_near_coplanar() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20_000 {
        let scale = [1.0, 1e-3, 1e8][i % 3];
        let a = rand_point(&mut rng, scale);
        let b = rand_point(&mut rng, scale);
        let c = rand_point(&mut rng, scale);
        let p = if i % 2 == 0 {
            rand_point(&mut rng, scale)
        } else {
            near_coplanar(&mut rng, &a, &b, &c)
        };
        let expect = rat_orient3d(&q3(&a), &q3(&b), &q3(&c), &q3(&p));
        assert_eq!(orient3d(&a, &b, &c, &p), expect);
        assert_eq!(PlaneCache::new(a, b, c).orient(&p), expect);
    }
}

#[test]
fn filter_and_interval_never_contradict_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut filter_hits = 0;
    for _ in 0..20_000 {
        let a = rand_point(&mut rng, 1.0);
        let b = rand_point(&mut rng, 1.0);
        let c = rand_point(&mut rng, 1.0);
        let p = near_coplanar(&mut rng, &a, &b, &c);
        let audit = orient3d_audit(&a, &b, &c, &p);
        if let Some(s) = audit.filter {
            filter_hits += 1;
            assert_eq!(s, audit.exact);
        }
        if let Some(s) = audit.interval {
            assert_eq!(s, audit.exact);
        }
        let cache = PlaneCache::new(a, b, c);
        if let Some(s) = cache.orient_filter_only(&p) {
            assert_eq!(s, audit.exact);
        }
    }
    assert!(filter_hits > 0);
}

#[test]
fn generic_orient3d_with_lpi_matches_rational_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..100_000 {
        let (def, l) = random_lpi_points(&mut rng);
        let a = rand_point(&mut rng, 10.0);
        let b = rand_point(&mut rng, 10.0);
        // every fourth plane passes through the point's own supporting plane
        let c = if i % 4 == 0 { def[2] } else { rand_point(&mut rng, 10.0) };
        let (a, b) = if i % 4 == 0 { (def[3], def[4]) } else { (a, b) };
        let p = rand_point(&mut rng, 10.0);
        let z = lattice(&[def[0], def[1], def[2], def[3], def[4], a, b, c, p]);
        let (x, w) = z_lpi(&z[0], &z[1], &z[2], &z[3], &z[4]);
        let expect = z_orient3d_hom(&z[5], &z[6], &z[7], &x, &w);
        if i % 4 == 0 {
            assert_eq!(expect, Sign::Zero);
        }
        assert_eq!(orient3d_generic(&a.into(), &b.into(), &c.into(), &l), expect);
        if i % 10 == 1 {
            // implicit point in a plane-defining slot: orient3d(l, b, c, p)
            // equals orient3d(p, b, c, l) up to the sign of the swap.
            let expect = z_orient3d_hom(&z[8], &z[6], &z[7], &x, &w).flip();
            assert_eq!(orient3d_generic(&l, &b.into(), &c.into(), &p.into()), expect);
        }
    }
}

#[test]
fn projected_orient2d_with_lpi_matches_rational_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..100_000 {
        let (def, l) = random_lpi_points(&mut rng);
        let axis = Axis::from_index(i);
        let a = rand_point(&mut rng, 10.0);
        // every fourth sample has c on the line a + t (p - a) through a
        // defining point of the LPI, i.e. exactly degenerate when l = p
        let c = if i % 4 == 0 { def[0] } else { rand_point(&mut rng, 10.0) };
        let z = lattice(&[def[0], def[1], def[2], def[3], def[4], a, c]);
        let (x, w) = z_lpi(&z[0], &z[1], &z[2], &z[3], &z[4]);
        let expect = z_orient2d_hom(&z[5], &x, &w, &z[6], axis);
        assert_eq!(orient2d_projected(&a.into(), &l, &c.into(), axis), expect);
        assert_eq!(orient2d_projected(&l, &c.into(), &a.into(), axis), expect);
    }
}

#[test]
fn tpi_predicates_match_rational_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 5_000 {
        let pl: Vec<Point3> = (0..9).map(|_| rand_point(&mut rng, 4.0)).collect();
        let planes = [[pl[0], pl[1], pl[2]], [pl[3], pl[4], pl[5]], [pl[6], pl[7], pl[8]]];
        let Ok(t) = GenericPoint::tpi(planes) else { continue };
        let exact = t.to_rational();
        // The point lies on every defining plane.
        for plane in &planes {
            let g: Vec<GenericPoint> = plane.iter().map(|&p| p.into()).collect();
            assert_eq!(orient3d_generic(&g[0], &g[1], &g[2], &t), Sign::Zero);
        }
        let a = rand_point(&mut rng, 4.0);
        let b = rand_point(&mut rng, 4.0);
        let c = rand_point(&mut rng, 4.0);
        assert_eq!(
            orient3d_generic(&a.into(), &b.into(), &c.into(), &t),
            rat_orient3d(&q3(&a), &q3(&b), &q3(&c), &exact)
        );
        let axis = Axis::from_index(checked);
        assert_eq!(
            orient2d_projected(&a.into(), &t, &c.into(), axis),
            rat_orient2d(&q3(&a), &exact, &q3(&c), axis)
        );
        checked += 1;
    }
}

#[test]
fn approximate_is_correctly_rounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10_000 {
        let (l, lr) = random_lpi(&mut rng);
        let approx = l.approximate();
        for (k, v) in approx.to_array().iter().enumerate() {
            // |approx - exact| <= half the gap to the neighbouring double
            let err = (q(*v) - &lr[k]).abs();
            let gap_up = q(v.next_up()) - q(*v);
            let gap_down = q(*v) - q(v.next_down());
            let half = if &lr[k] >= &q(*v) { gap_up } else { gap_down } / Q::from_integer(BigInt::from(2));
            assert!(err <= half, "coordinate {k} off by more than half an ulp");
        }
    }
}

fn rational_cmp(a: &[Q; 3], b: &[Q; 3], axis: Axis) -> Ordering {
    a[axis.index()].cmp(&b[axis.index()])
}

#[test]
fn comparator_is_a_strict_weak_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    // Coincident explicit/implicit pairs: lines crossing the z = 0.5 plane
    // at a representable point.
    let mut pts: Vec<(GenericPoint, [Q; 3])> = Vec::new();
    for _ in 0..300 {
        let (l, lr) = random_lpi(&mut rng);
        pts.push((l, lr));
        let x = rng.gen_range(-4i32..4) as f64 * 0.25;
        let y = rng.gen_range(-4i32..4) as f64 * 0.25;
        let e = Point3::new(x, y, 0.5);
        let dir = Point3::new(x + 1.0, y - 2.0, 3.5);
        let lpi = GenericPoint::lpi(
            dir,
            Point3::new(2.0 * x - dir.x, 2.0 * y - dir.y, 1.0 - dir.z),
            Point3::new(0.0, 0.0, 0.5),
            Point3::new(1.0, 0.0, 0.5),
            Point3::new(0.0, 1.0, 0.5),
        )
        .unwrap();
        assert_eq!(compare_lex(&lpi, &e.into()), Ordering::Equal);
        pts.push((lpi, q3(&e)));
        pts.push((e.into(), q3(&e)));
    }
    for _ in 0..10_000 {
        let i = rng.gen_range(0..pts.len());
        let j = rng.gen_range(0..pts.len());
        let k = rng.gen_range(0..pts.len());
        let axis = Axis::from_index(rng.gen_range(0..3));
        let (a, b, c) = (&pts[i], &pts[j], &pts[k]);
        let ab = compare_on_axis(&a.0, &b.0, axis);
        assert_eq!(ab, rational_cmp(&a.1, &b.1, axis));
        assert_eq!(compare_on_axis(&b.0, &a.0, axis), ab.reverse());
        assert_eq!(compare_on_axis(&a.0, &a.0, axis), Ordering::Equal);
        let bc = compare_on_axis(&b.0, &c.0, axis);
        let ac = compare_on_axis(&a.0, &c.0, axis);
        if ab == bc {
            assert_eq!(ac, ab);
        }
        if ab != Ordering::Greater && bc != Ordering::Greater {
            assert_ne!(ac, Ordering::Greater);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn cached_orient_agrees_under_translation_and_scale(
        coords in prop::array::uniform12(-1.0f64..1.0),
        offset in prop::sample::select(vec![0.0, 1e3, 1e9, -7.5e12, 1e15]),
        scale in prop::sample::select(vec![1.0, 1e-6, 1e6, 3.0]),
        coplanar in any::<bool>(),
    ) {
        let pt = |i: usize| Point3::new(
            coords[i] * scale + offset,
            coords[i + 1] * scale + offset,
            coords[i + 2] * scale + offset,
        );
        let (a, b, c) = (pt(0), pt(3), pt(6));
        let p = if coplanar {
            let u = coords[9];
            let v = coords[10];
            Point3::new(
                a.x + u * (b.x - a.x) + v * (c.x - a.x),
                a.y + u * (b.y - a.y) + v * (c.y - a.y),
                a.z + u * (b.z - a.z) + v * (c.z - a.z),
            )
        } else {
            pt(9)
        };
        let expect = rat_orient3d(&q3(&a), &q3(&b), &q3(&c), &q3(&p));
        prop_assert_eq!(orient3d(&a, &b, &c, &p), expect);
        prop_assert_eq!(PlaneCache::new(a, b, c).orient(&p), expect);
    }

    #[test]
    fn all_explicit_generic_is_stage_independent(
        coords in prop::array::uniform12(-1e3f64..1e3),
    ) {
        let pt = |i: usize| Point3::new(coords[i], coords[i + 1], coords[i + 2]);
        let (a, b, c, p) = (pt(0), pt(3), pt(6), pt(9));
        let audit = orient3d_audit(&a, &b, &c, &p);
        let g = orient3d_generic(&a.into(), &b.into(), &c.into(), &p.into());
        prop_assert_eq!(g, audit.exact);
        if let Some(s) = audit.filter { prop_assert_eq!(s, audit.exact); }
        if let Some(s) = audit.interval { prop_assert_eq!(s, audit.exact); }
    }
}
