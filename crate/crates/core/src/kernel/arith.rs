//! Arithmetic shared by the interval and exact stages.

use super::dyadic::Dyadic;
use super::interval::Interval;
use super::Point3;

pub(crate) trait Field: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn lift(x: f64) -> Self;
}

impl Field for Interval {
    #[inline]
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    #[inline]
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    #[inline]
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    #[inline]
    fn lift(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Field for Dyadic {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn lift(x: f64) -> Self {
        Dyadic::from_f64(x)
    }
}

pub(crate) fn lift3<T: Field>(p: &Point3) -> [T; 3] {
    [T::lift(p.x), T::lift(p.y), T::lift(p.z)]
}

pub(crate) fn sub3<T: Field>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[0].sub(&b[0]), a[1].sub(&b[1]), a[2].sub(&b[2])]
}

pub(crate) fn cross<T: Field>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

pub(crate) fn dot<T: Field>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

pub(crate) fn det3<T: Field>(r0: &[T; 3], r1: &[T; 3], r2: &[T; 3]) -> T {
    dot(r0, &cross(r1, r2))
}


pub(crate) fn det2<T: Field>(a: &T, b: &T, c: &T, d: &T) -> T {
    a.mul(d).sub(&b.mul(c))
}

/// Determinant of a 4x4 matrix given by rows.
pub(crate) fn det4<T: Field>(m: &[[T; 4]; 4]) -> T {
    let s = |i: usize, j: usize| det2(&m[0][i], &m[0][j], &m[1][i], &m[1][j]);
    let t = |i: usize, j: usize| det2(&m[2][i], &m[2][j], &m[3][i], &m[3][j]);
    s(0, 1)
        .mul(&t(2, 3))
        .sub(&s(0, 2).mul(&t(1, 3)))
        .add(&s(0, 3).mul(&t(1, 2)))
        .add(&s(1, 2).mul(&t(0, 3)))
        .sub(&s(1, 3).mul(&t(0, 2)))
        .add(&s(2, 3).mul(&t(0, 1)))
}
