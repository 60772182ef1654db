//! Exact geometric kernel.
//!
//! Predicates run a cascade: a semi-static floating point filter, then
//! outward-rounded interval arithmetic, then exact dyadic arithmetic.
//! Implicit points (line/plane and three-plane intersections) keep their
//! defining inputs, so every predicate on them is exact as well.

mod arith;
mod dyadic;
mod interval;
mod plane;
mod point;
mod predicates;
pub mod stats;

use std::cmp::Ordering;
use std::fmt;

pub use dyadic::Dyadic;
pub use interval::Interval;
pub use plane::{make_plane_cache, PlaneCache};
pub use point::{GenericPoint, Lpi, Tpi};
pub use predicates::{
    compare_lex, compare_on_axis, next_after, orient2d, orient2d_projected, orient3d,
    orient3d_audit, orient3d_generic, point_in_triangle_2d, Containment, StageSigns,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("plane through collinear points")]
    DegeneratePlane,
    #[error("triangle projects to zero area")]
    DegenerateProjection,
    #[error("line coincides with or is parallel to the plane")]
    ParallelLine,
    #[error("line endpoints coincide")]
    DegenerateLine,
    #[error("planes do not meet in a single point")]
    DegenerateTriple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    #[inline]
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    #[inline]
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    #[inline]
    pub fn from_i32(v: i32) -> Sign {
        v.cmp(&0).into()
    }

    #[inline]
    pub fn flip(self) -> Sign {
        Sign::from_i32(-self.as_i32())
    }

    #[inline]
    pub fn mul(self, other: Sign) -> Sign {
        Sign::from_i32(self.as_i32() * other.as_i32())
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl From<Ordering> for Sign {
    fn from(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
}

impl From<Sign> for Ordering {
    fn from(s: Sign) -> Ordering {
        match s {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    /// The two remaining axes in cyclic order. Projecting onto them keeps
    /// the orientation of a triangle equal to the sign of its normal
    /// component along `self`.
    #[inline]
    pub fn others(self) -> (Axis, Axis) {
        let i = self.index();
        (Axis::from_index(i + 1), Axis::from_index(i + 2))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        })
    }
}

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Axis, String> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            _ => Err(format!("unknown axis {s:?}")),
        }
    }
}

/// An input point with binary64 coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Point3 {
        Point3 { x, y, z }
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Point3 {
        Point3::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn coord(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    #[inline]
    pub fn set_coord(&mut self, axis: Axis, v: f64) {
        match axis {
            Axis::X => self.x = v,
            Axis::Y => self.y = v,
            Axis::Z => self.z = v,
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Lexicographic order on exact coordinate values (`-0.0 == 0.0`).
    #[inline]
    pub fn lex_cmp(&self, other: &Point3) -> Ordering {
        self.x
            .total_cmp_zero(other.x)
            .then(self.y.total_cmp_zero(other.y))
            .then(self.z.total_cmp_zero(other.z))
    }

    /// Bit pattern with `-0.0` folded into `+0.0`, for hashing exact values.
    #[inline]
    pub fn key(self) -> [u64; 3] {
        [fold_zero(self.x), fold_zero(self.y), fold_zero(self.z)]
    }
}

#[inline]
fn fold_zero(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

trait ValueCmp {
    fn total_cmp_zero(self, other: f64) -> Ordering;
}

impl ValueCmp for f64 {
    #[inline]
    fn total_cmp_zero(self, other: f64) -> Ordering {
        self.partial_cmp(&other).expect("non-finite coordinate")
    }
}
