//! Integer polynomials in two independent variables `z` and `w`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::scalar::Scalar;

/// `sign · z^k · w^ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedMonomial {
    pub sign: i8,
    pub k: u32,
    pub ell: u32,
}

impl SignedMonomial {
    pub fn new(sign: i8, k: u32, ell: u32) -> Self {
        assert!(sign == 1 || sign == -1);
        Self { sign, k, ell }
    }

    pub fn to_polynomial(self) -> ZWPolynomial {
        ZWPolynomial::monomial(self.sign as i128, self.k, self.ell)
    }

    pub fn eval<T: Scalar>(&self, z: &T, w: &T) -> T {
        let v = pow(z, self.k).times(&pow(w, self.ell));
        if self.sign < 0 {
            v.negated()
        } else {
            v
        }
    }
}

impl fmt::Display for SignedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}z^{}w^{}", if self.sign < 0 { "-" } else { "+" }, self.k, self.ell)
    }
}

pub(crate) fn pow<T: Scalar>(base: &T, e: u32) -> T {
    let mut acc = T::one();
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.times(&b);
        }
        e >>= 1;
        if e > 0 {
            b = b.times(&b);
        }
    }
    acc
}

/// Terms `(k, ell, coefficient)` sorted by `(k, ell)` with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ZWPolynomial {
    terms: SmallVec<[(u32, u32, i128); 2]>,
}

impl ZWPolynomial {
    pub fn monomial(coeff: i128, k: u32, ell: u32) -> Self {
        let mut p = Self::default();
        if coeff != 0 {
            p.terms.push((k, ell, coeff));
        }
        p
    }

    pub fn z() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn w() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn terms(&self) -> &[(u32, u32, i128)] {
        &self.terms
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, i128)>) -> Self {
        let mut v: Vec<_> = terms.into_iter().collect();
        v.sort_unstable_by_key(|t| (t.0, t.1));
        let mut out = Self::default();
        for (k, l, c) in v {
            match out.terms.last_mut() {
                Some(last) if last.0 == k && last.1 == l => {
                    last.2 = last.2.checked_add(c).expect("coefficient overflow")
                }
                _ => out.terms.push((k, l, c)),
            }
        }
        out.terms.retain(|t| t.2 != 0);
        out
    }

    /// The single signed monomial this polynomial equals, if any.
    pub fn as_monomial(&self) -> Option<SignedMonomial> {
        match self.terms[..] {
            [(k, ell, 1)] => Some(SignedMonomial::new(1, k, ell)),
            [(k, ell, -1)] => Some(SignedMonomial::new(-1, k, ell)),
            _ => None,
        }
    }

    /// Canonical form modulo `z^2 + w^2 = 1`: every `w^2` replaced by `1 - z^2`,
    /// leaving `w`-degree at most one.
    pub fn reduce_circle(&self) -> Self {
        let mut out: Vec<(u32, u32, i128)> = Vec::new();
        for &(k, ell, c) in &self.terms {
            // w^ell = w^(ell mod 2) (1 - z^2)^(ell / 2)
            let half = ell / 2;
            let mut binom: i128 = 1;
            for i in 0..=half {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let coeff = c.checked_mul(binom * sign).expect("coefficient overflow");
                out.push((k + 2 * i, ell % 2, coeff));
                binom = binom * (half - i) as i128 / (i + 1) as i128;
            }
        }
        Self::from_terms(out)
    }

    /// Equality as functions on the circle `z^2 + w^2 = 1`.
    pub fn eq_on_circle(&self, other: &Self) -> bool {
        self.reduce_circle() == other.reduce_circle()
    }

    pub fn eval<T: Scalar>(&self, z: &T, w: &T, from_int: impl Fn(i128) -> T) -> T {
        let mut acc = T::zero();
        for &(k, ell, c) in &self.terms {
            let term = pow(z, k).times(&pow(w, ell)).times(&from_int(c));
            acc = acc.plus(&term);
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.eval(&z, &w, |c| Complex64::new(c as f64, 0.0))
    }

    pub fn eval_rational(&self, z: &BigRational, w: &BigRational) -> BigRational {
        self.eval(z, w, |c| BigRational::from_integer(BigInt::from(c)))
    }

    pub fn max_k(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0).max()
    }
}

impl fmt::Debug for ZWPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ZWPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(k, ell, c)) in self.terms.iter().enumerate() {
            if i > 0 || c < 0 {
                write!(f, "{}", if c < 0 { "-" } else { "+" })?;
            }
            let mag = c.unsigned_abs();
            let mut wrote = false;
            if mag != 1 || (k == 0 && ell == 0) {
                write!(f, "{mag}")?;
                wrote = true;
            }
            for (name, e) in [("z", k), ("w", ell)] {
                if e > 0 {
                    if wrote {
                        write!(f, "*")?;
                    }
                    write!(f, "{name}")?;
                    if e > 1 {
                        write!(f, "^{e}")?;
                    }
                    wrote = true;
                }
            }
        }
        Ok(())
    }
}

impl Scalar for ZWPolynomial {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::monomial(1, 0, 0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn is_one(&self) -> bool {
        self.terms[..] == [(0, 0, 1)]
    }
    fn plus(&self, other: &Self) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Self::default();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && (a[i].0, a[i].1) < (b[j].0, b[j].1));
            let take_b = i >= a.len() || (j < b.len() && (b[j].0, b[j].1) < (a[i].0, a[i].1));
            if take_a {
                out.terms.push(a[i]);
                i += 1;
            } else if take_b {
                out.terms.push(b[j]);
                j += 1;
            } else {
                let c = a[i].2.checked_add(b[j].2).expect("coefficient overflow");
                if c != 0 {
                    out.terms.push((a[i].0, a[i].1, c));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    fn times(&self, other: &Self) -> Self {
        if self.terms.len() == 1 && other.terms.len() == 1 {
            let (a, b) = (self.terms[0], other.terms[0]);
            let c = a.2.checked_mul(b.2).expect("coefficient overflow");
            return Self::monomial(c, a.0 + b.0, a.1 + b.1);
        }
        let mut prod = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                prod.push((a.0 + b.0, a.1 + b.1, a.2.checked_mul(b.2).expect("coefficient overflow")));
            }
        }
        Self::from_terms(prod)
    }
    fn negated(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.2 = -t.2;
        }
        out
    }
}

impl From<SignedMonomial> for ZWPolynomial {
    fn from(m: SignedMonomial) -> Self {
        m.to_polynomial()
    }
}
