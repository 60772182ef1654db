//! Exact dyadic numbers `m * 2^e` with an arbitrary-precision mantissa.
//!
//! Closed under `+`, `-` and `*`, which is all the homogeneous point formulas
//! and determinant predicates need.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::Sign;

#[derive(Clone, Debug)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Dyadic {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    /// Exact value of a finite double.
    pub fn from_f64(x: f64) -> Dyadic {
        assert!(x.is_finite(), "non-finite coordinate {x}");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mut m, mut e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let tz = m.trailing_zeros();
        m >>= tz;
        e += tz as i64;
        let mant = if neg { -BigInt::from(m) } else { BigInt::from(m) };
        Dyadic { mant, exp: e }
    }

    pub fn sign(&self) -> Sign {
        match self.mant.sign() {
            BigSign::Minus => Sign::Negative,
            BigSign::NoSign => Sign::Zero,
            BigSign::Plus => Sign::Positive,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        let one = BigInt::from(1);
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), one << (-self.exp) as usize)
        }
    }

    /// `self / other` rounded to the nearest double (ties to even).
    pub fn ratio_to_f64(&self, other: &Dyadic) -> f64 {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return 0.0;
        }
        let e = self.exp - other.exp;
        let (num, den) = if e >= 0 {
            (&self.mant << e as usize, other.mant.clone())
        } else {
            (self.mant.clone(), &other.mant << (-e) as usize)
        };
        BigRational::new(num, den).to_f64().unwrap_or(f64::NAN)
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        match (self - other).sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        if a.exp == b.exp {
            (a.mant.clone(), b.mant.clone(), a.exp)
        } else if a.exp > b.exp {
            (&a.mant << (a.exp - b.exp) as usize, b.mant.clone(), b.exp)
        } else {
            (a.mant.clone(), &b.mant << (b.exp - a.exp) as usize, a.exp)
        }
    }
}

impl From<f64> for Dyadic {
    fn from(x: f64) -> Dyadic {
        Dyadic::from_f64(x)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (a, b, exp) = Dyadic::aligned(self, o);
        Dyadic { mant: a + b, exp }
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, o: &Dyadic) -> Dyadic {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return -o;
        }
        let (a, b, exp) = Dyadic::aligned(self, o);
        Dyadic { mant: a - b, exp }
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, o: &Dyadic) -> Dyadic {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: &self.mant * &o.mant,
            exp: self.exp + o.exp,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, o: Dyadic) -> Dyadic {
        &self + &o
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, o: Dyadic) -> Dyadic {
        &self - &o
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, o: Dyadic) -> Dyadic {
        &self * &o
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn from_f64_is_exact() {
        for &x in &[
            0.1,
            -3.75,
            1e-310,
            f64::MIN_POSITIVE,
            f64::MAX,
            -f64::MAX,
            5e-324,
            123456789.0,
        ] {
            assert_eq!(
                Dyadic::from_f64(x).to_rational(),
                BigRational::from_f64(x).unwrap(),
                "{x}"
            );
        }
    }

    #[test]
    fn arithmetic_matches_rationals() {
        let xs = [0.1, -2.5e300, 7.0, 1e-300, -0.3];
        for &a in &xs {
            for &b in &xs {
                let (da, db) = (Dyadic::from_f64(a), Dyadic::from_f64(b));
                let (ra, rb) = (da.to_rational(), db.to_rational());
                assert_eq!((&da + &db).to_rational(), &ra + &rb);
                assert_eq!((&da - &db).to_rational(), &ra - &rb);
                assert_eq!((&da * &db).to_rational(), &ra * &rb);
            }
        }
    }

    #[test]
    fn ratio_rounds_to_nearest() {
        let one = Dyadic::from_f64(1.0);
        let three = Dyadic::from_f64(3.0);
        assert_eq!(one.ratio_to_f64(&three), 1.0 / 3.0);
        let big = Dyadic::from_f64(1e300);
        let tiny = Dyadic::from_f64(1e-300);
        assert_eq!((&big * &tiny).ratio_to_f64(&tiny), 1e300);
    }
}
