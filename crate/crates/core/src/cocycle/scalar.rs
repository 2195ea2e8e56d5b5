//! Scalar rings the cocycle is evaluated over.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Ring operations the operator code needs. Equality is value equality.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Complex conjugate; the identity on real rings.
    fn conj(&self) -> Self {
        self.clone()
    }
    /// Set when an exact computation has left its representable range; such
    /// values compare unequal to everything.
    fn overflowed(&self) -> bool {
        false
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_one(&self) -> bool {
        self.re == 1.0 && self.im == 0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
}

/// An exact rational `num / base^exp` with an `i128` numerator.
///
/// All values in one computation share a base (the common denominator of the
/// circle point), so products of cocycle factors never need a gcd. Arithmetic
/// that would overflow yields a poisoned value instead of wrapping.
#[derive(Debug, Clone, Copy)]
pub struct BaseRational {
    num: i128,
    exp: u32,
    base: u32,
}

const POISON: u32 = u32::MAX;

impl BaseRational {
    /// `num / base^exp`; `base` is ignored when `exp == 0`.
    pub fn new(num: i128, base: u32, exp: u32) -> Self {
        assert!(exp == 0 || base >= 2, "base must be at least 2");
        if num == 0 || exp == 0 {
            return Self::integer(num);
        }
        Self { num, exp, base }
    }

    pub fn integer(num: i128) -> Self {
        Self { num, exp: 0, base: 0 }
    }

    fn poison() -> Self {
        Self {
            num: 0,
            exp: POISON,
            base: 0,
        }
    }

    pub fn is_poisoned(&self) -> bool {
        self.exp == POISON
    }

    pub fn to_big_rational(&self) -> Option<BigRational> {
        if self.is_poisoned() {
            return None;
        }
        let den = BigInt::from(self.base.max(1)).pow(self.exp);
        Some(BigRational::new(BigInt::from(self.num), den))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_poisoned() {
            return f64::NAN;
        }
        self.num as f64 / (self.base as f64).powi(self.exp as i32)
    }

    fn common_base(a: &Self, b: &Self) -> Option<u32> {
        match (a.exp, b.exp) {
            (0, 0) => Some(0),
            (0, _) => Some(b.base),
            (_, 0) => Some(a.base),
            _ if a.base == b.base => Some(a.base),
            _ => None,
        }
    }

    /// Numerator rescaled to denominator `base^exp`, `exp >= self.exp`.
    fn lift(&self, base: u32, exp: u32) -> Option<i128> {
        let factor = (base as i128).checked_pow(exp - self.exp)?;
        self.num.checked_mul(factor)
    }

    fn add_impl(&self, other: &Self) -> Self {
        if self.is_poisoned() || other.is_poisoned() {
            return Self::poison();
        }
        let Some(base) = Self::common_base(self, other) else {
            return Self::poison();
        };
        let exp = self.exp.max(other.exp);
        match (self.lift(base, exp), other.lift(base, exp)) {
            (Some(a), Some(b)) => match a.checked_add(b) {
                Some(s) => Self::new(s, base, exp),
                None => Self::poison(),
            },
            _ => Self::poison(),
        }
    }
}

impl PartialEq for BaseRational {
    fn eq(&self, other: &Self) -> bool {
        if self.is_poisoned() || other.is_poisoned() {
            return false;
        }
        if self.num == 0 || other.num == 0 {
            return self.num == other.num;
        }
        let Some(base) = Self::common_base(self, other) else {
            return self.to_big_rational() == other.to_big_rational();
        };
        let exp = self.exp.max(other.exp);
        match (self.lift(base, exp), other.lift(base, exp)) {
            (Some(a), Some(b)) => a == b,
            _ => self.to_big_rational() == other.to_big_rational(),
        }
    }
}

impl Scalar for BaseRational {
    fn zero() -> Self {
        Self::integer(0)
    }
    fn one() -> Self {
        Self::integer(1)
    }
    fn is_zero(&self) -> bool {
        !self.is_poisoned() && self.num == 0
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn plus(&self, other: &Self) -> Self {
        self.add_impl(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.add_impl(&other.negated())
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_poisoned() || other.is_poisoned() {
            return Self::poison();
        }
        if self.num == 0 || other.num == 0 {
            return Self::zero();
        }
        let Some(base) = Self::common_base(self, other) else {
            return Self::poison();
        };
        match (self.num.checked_mul(other.num), self.exp.checked_add(other.exp)) {
            (Some(n), Some(e)) if e < POISON => Self::new(n, base, e),
            _ => Self::poison(),
        }
    }
    fn negated(&self) -> Self {
        if self.is_poisoned() {
            return *self;
        }
        Self { num: -self.num, ..*self }
    }
    fn overflowed(&self) -> bool {
        self.is_poisoned()
    }
}

/// Magnitude for numeric comparisons.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Magnitude for BigRational {
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Magnitude for BaseRational {
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}
