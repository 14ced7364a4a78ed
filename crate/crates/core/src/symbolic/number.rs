//! Exact complex-rational scalars and the evaluation result type.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A complex number `re + i·im` with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRational { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn imag_unit() -> Self {
        CRational { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True when the first non-zero part is negative; used to pick a sign representative.
    pub fn is_negative_leading(&self) -> bool {
        if !self.re.is_zero() {
            self.re.is_negative()
        } else {
            self.im.is_negative()
        }
    }

    pub fn conj(&self) -> Self {
        CRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Self::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(CRational { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn powi(&self, n: i64) -> Option<Self> {
        if n < 0 {
            return self.inv().and_then(|c| c.powi(-n));
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Some(acc)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Integer value, if this is a real integer that fits in `i64`.
    pub fn as_i64(&self) -> Option<i64> {
        if self.im.is_zero() && self.re.is_integer() {
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators: fall back to a scaled division
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &n * &n == *r.numer() && &d * &d == *r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl Add for &CRational {
    type Output = CRational;
    fn add(self, o: &CRational) -> CRational {
        CRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &CRational {
    type Output = CRational;
    fn sub(self, o: &CRational) -> CRational {
        CRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &CRational {
    type Output = CRational;
    fn mul(self, o: &CRational) -> CRational {
        if self.im.is_zero() && o.im.is_zero() {
            return CRational::real(&self.re * &o.re);
        }
        CRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

fn fmt_rat(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_rat(&self.re, f),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-self.im.clone()).is_one() {
                    write!(f, "-i")
                } else {
                    fmt_rat(&self.im, f)?;
                    write!(f, "*i")
                }
            }
            (false, false) => {
                write!(f, "(")?;
                fmt_rat(&self.re, f)?;
                if self.im.is_negative() {
                    write!(f, " - ")?;
                    let a = self.im.abs();
                    if !a.is_one() {
                        fmt_rat(&a, f)?;
                        write!(f, "*")?;
                    }
                } else {
                    write!(f, " + ")?;
                    if !self.im.is_one() {
                        fmt_rat(&self.im, f)?;
                        write!(f, "*")?;
                    }
                }
                write!(f, "i)")
            }
        }
    }
}

/// Result of evaluating an expression: exact when only rational operations were involved.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(CRational),
    Float(Complex64),
}

impl Value {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Value::Exact(c) => c.to_c64(),
            Value::Float(z) => *z,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn norm(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Exact zero test for exact values; `|z| < tol` for floats.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        match self {
            Value::Exact(c) => c.is_zero(),
            Value::Float(z) => z.norm() < tol,
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Value::Exact(c) => c.is_real(),
            Value::Float(z) => z.im == 0.0,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(c) => write!(f, "{c}"),
            Value::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{:e}", z.re)
                } else {
                    write!(f, "({:e} {} {:e}i)", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_complex() {
        let z = CRational::new(BigRational::from_integer(1.into()), BigRational::from_integer(2.into()));
        let w = z.inv().unwrap();
        assert!((&z * &w).is_one());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = CRational::imag_unit();
        assert_eq!(&i * &i, CRational::from_int(-1));
    }

    #[test]
    fn sqrt_of_perfect_square() {
        let r = BigRational::new(9.into(), 4.into());
        assert_eq!(rational_sqrt(&r), Some(BigRational::new(3.into(), 2.into())));
        assert_eq!(rational_sqrt(&BigRational::from_integer(2.into())), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(CRational::ratio(-3, 2).to_string(), "-3/2");
        assert_eq!(CRational::imag_unit().to_string(), "i");
        let z = CRational::new(BigRational::from_integer(1.into()), BigRational::from_integer((-2).into()));
        assert_eq!(z.to_string(), "(1 - 2*i)");
    }
}
