//! Points `(z, w)` with `z^2 + w^2 = 1`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::poly::ZWPolynomial;
use super::scalar::{BaseRational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PointError {
    #[error("|z| = {0} lies outside the open unit disc")]
    OutsideDisc(f64),
    #[error("t = {p}/{q} is not a usable parameter")]
    BadParameter { p: i64, q: i64 },
}

/// Which square root `w` of `1 - z^2` was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `Re w > 0`, holomorphic on the unit disc.
    Principal,
    /// `z` and `w` independent indeterminates.
    Symbolic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CirclePoint<T> {
    pub z: T,
    pub w: T,
    pub branch: Branch,
}

impl<T: Scalar> CirclePoint<T> {
    pub fn minus_z(&self) -> T {
        self.z.negated()
    }

    /// `z^2 + w^2 - 1`.
    pub fn defect(&self) -> T {
        self.z.times(&self.z).plus(&self.w.times(&self.w)).minus(&T::one())
    }
}

impl CirclePoint<Complex64> {
    /// `w = sqrt(1 - z^2)` on the principal branch.
    pub fn float(z: Complex64) -> Result<Self, PointError> {
        if !(z.norm() < 1.0) {
            return Err(PointError::OutsideDisc(z.norm()));
        }
        let w = (Complex64::new(1.0, 0.0) - z * z).sqrt();
        Ok(Self {
            z,
            w,
            branch: Branch::Principal,
        })
    }

    pub fn polar(r: f64, theta: f64) -> Result<Self, PointError> {
        Self::float(Complex64::from_polar(r, theta))
    }
}

impl CirclePoint<ZWPolynomial> {
    pub fn symbolic() -> Self {
        Self {
            z: ZWPolynomial::z(),
            w: ZWPolynomial::w(),
            branch: Branch::Symbolic,
        }
    }
}

/// Parameter `t = p/q` of the rational point `z = 2t/(1+t^2)`, `w = (1-t^2)/(1+t^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PythagoreanParameter {
    pub p: i64,
    pub q: i64,
}

impl PythagoreanParameter {
    /// Requires `|p| < q` so that `w > 0` and the point is on the principal branch.
    pub fn new(p: i64, q: i64) -> Result<Self, PointError> {
        if q <= 0 || p.abs() >= q || q > 1 << 20 {
            return Err(PointError::BadParameter { p, q });
        }
        Ok(Self { p, q })
    }

    /// `(z_num, w_num, den)` in lowest terms.
    pub fn fraction(&self) -> (i64, i64, i64) {
        let (p, q) = (self.p, self.q);
        let (zn, wn, den) = (2 * p * q, q * q - p * p, p * p + q * q);
        let g = zn.gcd(&wn).gcd(&den);
        (zn / g, wn / g, den / g)
    }

    pub fn big_rational(&self) -> CirclePoint<BigRational> {
        let (zn, wn, den) = self.fraction();
        CirclePoint {
            z: BigRational::new(BigInt::from(zn), BigInt::from(den)),
            w: BigRational::new(BigInt::from(wn), BigInt::from(den)),
            branch: Branch::Principal,
        }
    }

    pub fn base_rational(&self) -> CirclePoint<BaseRational> {
        let (zn, wn, den) = self.fraction();
        CirclePoint {
            z: BaseRational::new(zn as i128, den as u32, 1),
            w: BaseRational::new(wn as i128, den as u32, 1),
            branch: Branch::Principal,
        }
    }

    pub fn complex(&self) -> CirclePoint<Complex64> {
        let (zn, wn, den) = self.fraction();
        CirclePoint {
            z: Complex64::new(zn as f64 / den as f64, 0.0),
            w: Complex64::new(wn as f64 / den as f64, 0.0),
            branch: Branch::Principal,
        }
    }
}

/// Five parameters on the principal branch with small denominators.
pub fn standard_parameters() -> Vec<PythagoreanParameter> {
    [(1, 2), (-1, 2), (2, 3), (1, 4), (-2, 3)]
        .into_iter()
        .map(|(p, q)| PythagoreanParameter::new(p, q).unwrap())
        .collect()
}

/// `n` distinct rational parameters, for exact polynomial identification.
pub fn distinct_parameters(n: usize) -> Vec<PythagoreanParameter> {
    let mut out = Vec::with_capacity(n);
    let mut q = 2;
    while out.len() < n {
        for p in 1..q {
            if p.gcd(&q) == 1 {
                out.push(PythagoreanParameter::new(p, q).unwrap());
                if out.len() == n {
                    break;
                }
            }
        }
        q += 1;
    }
    out
}
