//! Scalar backends: exact rationals, exact Gaussian rationals and double
//! precision complex numbers behind one small field trait.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact Gaussian rational `p + q i` with `p, q` in Q.
pub type Gaussian = Complex<BigRational>;

/// Field operations shared by the exact and floating backends.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether equality tests on this type are exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn to_c64(&self) -> Complex64;

    /// Approximate modulus, used for pivoting and tolerance tests.
    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn powu(&self, e: u32) -> Self {
        self.powu(e)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn modulus(&self) -> f64 {
        rational_to_f64(&self.abs())
    }
}

impl Scalar for Gaussian {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_i64(v), BigRational::zero())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(<BigRational as Scalar>::from_ratio(num, den), BigRational::zero())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn gaussian(re: BigRational, im: BigRational) -> Gaussian {
    Complex::new(re, im)
}

pub fn gaussian_int(re: i64, im: i64) -> Gaussian {
    Complex::new(BigRational::from_i64(re), BigRational::from_i64(im))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-1.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int_part: BigInt = match int.trim() {
            "" | "-" | "+" => BigInt::zero(),
            t => t.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mut value = BigRational::new(int_part.abs() * &scale + frac_part, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    s.parse::<BigInt>()
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
