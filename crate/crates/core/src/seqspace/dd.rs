//! Scalar arithmetic used by the weight sums: plain `f64` and an unevaluated
//! pair of doubles (~106 bits) for the extended precision mode.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl Precision {
    /// Largest stage index whose unit steps the predicates can still resolve.
    pub fn index_budget(self) -> u128 {
        match self {
            Precision::Double => 1 << 53,
            Precision::Extended => 1 << 100,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        })
    }
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision mode {other:?}")),
        }
    }
}

/// The operations the weight sums and stage predicates need.
pub trait Real:
    Copy
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Unit roundoff.
    const EPSILON: f64;
    fn from_f64(x: f64) -> Self;
    fn from_u128(n: u128) -> Self;
    fn to_f64(self) -> f64;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn abs(self) -> Self;
    /// High and low `f64` words; the low word is zero for plain doubles.
    fn split(self) -> (f64, f64);
    fn powf(self, y: Self) -> Self {
        (y * self.ln()).exp()
    }
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON / 2.0;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_u128(n: u128) -> Self {
        n as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn split(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn powf(self, y: Self) -> Self {
        f64::powf(self, y)
    }
}

/// `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const LN2: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    fn scale_pow2(self, k: i32) -> Self {
        // two steps so that 2^k itself never overflows for |k| near 1024
        let half = k / 2;
        let a = 2f64.powi(half);
        let b = 2f64.powi(k - half);
        DoubleDouble {
            hi: self.hi * a * b,
            lo: self.lo * a * b,
        }
    }

    /// `e^r - 1` for `|r| ≤ ln2/2`: Taylor series on `r/1024`, then undo the
    /// scaling with `em1(2x) = em1(x)(em1(x) + 2)`.
    fn exp_m1_reduced(r: DoubleDouble) -> DoubleDouble {
        let x = r.scale_pow2(-10);
        let mut term = x;
        let mut sum = x;
        for i in 2..=12 {
            term = term * x / DoubleDouble::from_f64(f64::from(i));
            sum = sum + term;
        }
        let two = DoubleDouble::from_f64(2.0);
        for _ in 0..10 {
            sum = sum * (sum + two);
        }
        sum
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::renorm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * DoubleDouble::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DoubleDouble::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble { hi: q1, lo: q2 } + DoubleDouble::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = 1.0 / (1u128 << 104) as f64;

    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn from_u128(n: u128) -> Self {
        let hi = n as f64;
        // hi is n rounded; the remainder is small enough for an i128
        let lo = (n as i128 - hi as i128) as f64;
        Self::renorm(hi, lo)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn exp(self) -> Self {
        if self.hi > 709.78 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::zero();
        }
        let k = (self.hi / Self::LN2.hi).round();
        let r = self - Self::LN2 * Self::from_f64(k);
        (Self::exp_m1_reduced(r) + Self::one()).scale_pow2(k as i32)
    }

    fn exp_m1(self) -> Self {
        if self.hi.abs() <= 0.5 * Self::LN2.hi {
            Self::exp_m1_reduced(self)
        } else {
            self.exp() - Self::one()
        }
    }

    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(f64::NAN);
        }
        // split off the binary exponent so exp(-y) below stays normal, then
        // one Newton step on exp(y) = m doubles the f64 accuracy
        let e = self.hi.log2().floor() as i32;
        let m = self.scale_pow2(-e);
        let y = Self::from_f64(m.hi.ln());
        y + m * (-y).exp() - Self::one() + Self::LN2 * Self::from_f64(f64::from(e))
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn split(self) -> (f64, f64) {
        (self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: DoubleDouble, b: DoubleDouble) -> f64 {
        ((a - b).to_f64() / b.to_f64()).abs()
    }

    const E: DoubleDouble = DoubleDouble::new(std::f64::consts::E, 1.4456468917292502e-16);

    #[test]
    fn exp_and_ln_against_reference_digits() {
        let one = DoubleDouble::one();
        assert!(rel(one.exp(), E) < 1e-30);
        assert!(rel(DoubleDouble::from_f64(2.0).ln(), DoubleDouble::LN2) < 1e-30);
        let ln3 = DoubleDouble::new(1.0986122886681098, -9.07129723500153e-17);
        assert!(rel(DoubleDouble::from_f64(3.0).ln(), ln3) < 1e-30);
        let e205 = DoubleDouble::new(1.2501528663867426e-09, 6.448235878237776e-26);
        assert!(rel(DoubleDouble::from_f64(-20.5).exp(), e205) < 1e-29);
        let sqrt3 = DoubleDouble::new(1.7320508075688772, 1.0035084221806903e-16);
        let got = DoubleDouble::from_f64(3.0).powf(DoubleDouble::from_f64(0.5));
        assert!(rel(got, sqrt3) < 1e-30);
        let em1 = DoubleDouble::new(1.00000000005e-10, 3.3900133221217734e-27);
        assert!(rel(DoubleDouble::from_f64(1e-10).exp_m1(), em1) < 1e-30);
    }

    #[test]
    fn arithmetic_keeps_the_low_word() {
        let third = DoubleDouble::one() / DoubleDouble::from_f64(3.0);
        let back = third * DoubleDouble::from_f64(3.0);
        assert!((back - DoubleDouble::one()).to_f64().abs() < 1e-31);
        let big = DoubleDouble::from_u128((1u128 << 100) + 1);
        assert_eq!(
            big - DoubleDouble::from_f64(2f64.powi(100)),
            DoubleDouble::one()
        );
    }

    #[test]
    fn extremes() {
        assert_eq!(DoubleDouble::from_f64(-800.0).exp(), DoubleDouble::zero());
        assert!(DoubleDouble::from_f64(800.0).exp().hi.is_infinite());
        assert!(DoubleDouble::from_f64(-1.0).ln().hi.is_nan());
        assert!(
            rel(
                DoubleDouble::from_f64(700.0).exp().ln(),
                DoubleDouble::from_f64(700.0)
            ) < 1e-30
        );
    }

    #[test]
    fn precision_text() {
        assert_eq!(
            "extended".parse::<Precision>().unwrap(),
            Precision::Extended
        );
        assert_eq!(Precision::Double.to_string(), "double");
        assert!("quad".parse::<Precision>().is_err());
    }
}
