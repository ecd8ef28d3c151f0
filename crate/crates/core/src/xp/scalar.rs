//! Double-word numbers: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
//!
//! Products use `f64::mul_add` for the exact error of `a * b`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct XpScalar {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Requires `|a| >= |b|` (or `a == 0`).
#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl XpScalar {
    pub const ZERO: XpScalar = XpScalar { hi: 0.0, lo: 0.0 };
    pub const ONE: XpScalar = XpScalar { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        XpScalar { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        XpScalar { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (ch, cl1) = two_prod(self.hi, b);
        let cl3 = self.lo.mul_add(b, cl1);
        let (hi, lo) = fast_two_sum(ch, cl3);
        XpScalar { hi, lo }
    }

    pub fn checked_div(self, b: XpScalar) -> Result<Self> {
        if b.hi == 0.0 {
            return Err(Error::XpDivisionByZero);
        }
        Ok(self.div_unchecked(b))
    }

    /// Long division with two correction steps.
    #[inline]
    fn div_unchecked(self, b: XpScalar) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = fast_two_sum(q1, q2);
        XpScalar { hi, lo } + XpScalar::from_f64(q3)
    }

    /// `sqrt` via one Newton step from the machine square root.
    pub fn sqrt(self) -> Result<Self> {
        if self.hi < 0.0 {
            return Err(Error::XpNegativeSqrt(self.to_f64()));
        }
        if self.hi == 0.0 {
            return Ok(XpScalar::ZERO);
        }
        let x = self.hi.sqrt();
        let (sq, sq_err) = two_prod(x, x);
        let r = self - XpScalar { hi: sq, lo: sq_err };
        let corr = r.to_f64() / (2.0 * x);
        let (hi, lo) = fast_two_sum(x, corr);
        Ok(XpScalar { hi, lo })
    }
}

impl From<f64> for XpScalar {
    fn from(x: f64) -> Self {
        XpScalar::from_f64(x)
    }
}

impl Add for XpScalar {
    type Output = XpScalar;

    /// Accurate double-word addition.
    #[inline]
    fn add(self, b: XpScalar) -> XpScalar {
        let (sh, sl) = two_sum(self.hi, b.hi);
        let (th, tl) = two_sum(self.lo, b.lo);
        let c = sl + th;
        let (vh, vl) = fast_two_sum(sh, c);
        let w = tl + vl;
        let (hi, lo) = fast_two_sum(vh, w);
        XpScalar { hi, lo }
    }
}

impl AddAssign for XpScalar {
    #[inline]
    fn add_assign(&mut self, b: XpScalar) {
        *self = *self + b;
    }
}

impl Neg for XpScalar {
    type Output = XpScalar;

    #[inline]
    fn neg(self) -> XpScalar {
        XpScalar { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for XpScalar {
    type Output = XpScalar;

    #[inline]
    fn sub(self, b: XpScalar) -> XpScalar {
        self + (-b)
    }
}

impl Mul for XpScalar {
    type Output = XpScalar;

    #[inline]
    fn mul(self, b: XpScalar) -> XpScalar {
        let (ch, cl1) = two_prod(self.hi, b.hi);
        let tl0 = self.lo * b.lo;
        let tl1 = self.hi.mul_add(b.lo, tl0);
        let cl2 = self.lo.mul_add(b.hi, tl1);
        let cl3 = cl1 + cl2;
        let (hi, lo) = fast_two_sum(ch, cl3);
        XpScalar { hi, lo }
    }
}

impl Div for XpScalar {
    type Output = XpScalar;

    /// Division by zero yields a non-finite result; use
    /// [`XpScalar::checked_div`] to get an error instead.
    #[inline]
    fn div(self, b: XpScalar) -> XpScalar {
        if b.hi == 0.0 {
            return XpScalar::from_f64(self.hi / b.hi);
        }
        self.div_unchecked(b)
    }
}

impl PartialOrd for XpScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Debug for XpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

impl fmt::Display for XpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e}", self.to_f64())
    }
}

pub fn xp_add(a: XpScalar, b: XpScalar) -> XpScalar {
    a + b
}

pub fn xp_sub(a: XpScalar, b: XpScalar) -> XpScalar {
    a - b
}

pub fn xp_mul(a: XpScalar, b: XpScalar) -> XpScalar {
    a * b
}

pub fn xp_div(a: XpScalar, b: XpScalar) -> Result<XpScalar> {
    a.checked_div(b)
}

pub fn xp_sqrt(a: XpScalar) -> Result<XpScalar> {
    a.sqrt()
}

/// Double-word sum of machine numbers.
pub fn xp_sum(a: &[f64]) -> XpScalar {
    a.iter().fold(XpScalar::ZERO, |acc, &x| acc + XpScalar::from_f64(x))
}

/// Double-word dot product of machine vectors (exact products).
pub fn xp_dot(a: &[f64], b: &[f64]) -> XpScalar {
    a.iter().zip(b).fold(XpScalar::ZERO, |acc, (&x, &y)| {
        let (p, e) = two_prod(x, y);
        acc + XpScalar { hi: p, lo: e }
    })
}
