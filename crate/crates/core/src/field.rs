//! Scalar fields used for operator assembly.
//!
//! Every basis and operator constructor is generic over [`Field`], so the same
//! code produces floating-point operators for the solvers and exact operators
//! (rationals, or rationals adjoined with `sqrt(5)` for the cubic Gauss-Lobatto
//! nodes) for golden comparisons.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Exact arithmetic: pivoting only needs a nonzero entry.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Arbitrary-precision rational.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Field for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        rat(num, den)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
}

/// Element `a + b*sqrt(5)` of the quadratic field Q(sqrt 5).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd5 {
    pub a: BigRational,
    pub b: BigRational,
}

impl Surd5 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        Self {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn sqrt5() -> Self {
        Self {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    fn signum(&self) -> Ordering {
        let zero = BigRational::zero();
        let sa = self.a.cmp(&zero);
        let sb = self.b.cmp(&zero);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (sa, sb) => {
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * BigRational::from_integer(BigInt::from(5));
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }
}

impl fmt::Debug for Surd5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Surd5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt5", self.b)
        } else if self.b.is_negative() {
            write!(f, "{} - {}*sqrt5", self.a, -self.b.clone())
        } else {
            write!(f, "{} + {}*sqrt5", self.a, self.b)
        }
    }
}

impl PartialOrd for Surd5 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).signum())
    }
}

impl Zero for Surd5 {
    fn zero() -> Self {
        Self::rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Surd5 {
    fn one() -> Self {
        Self::rational(BigRational::one())
    }
}

impl Neg for Surd5 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Add for Surd5 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for Surd5 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Mul for Surd5 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let five = BigRational::from_integer(BigInt::from(5));
        Self::new(
            &self.a * &rhs.a + five * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl Div for Surd5 {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // multiply by the conjugate; the norm a^2 - 5 b^2 vanishes only at zero
        let five = BigRational::from_integer(BigInt::from(5));
        let norm = &rhs.a * &rhs.a - five * &rhs.b * &rhs.b;
        let conj = Self::new(rhs.a / &norm, -rhs.b / &norm);
        self * conj
    }
}

impl Field for Surd5 {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(rat(num, den))
    }

    fn to_f64(&self) -> f64 {
        Field::to_f64(&self.a) + Field::to_f64(&self.b) * 5f64.sqrt()
    }
}
