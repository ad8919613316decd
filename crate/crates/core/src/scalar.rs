//! Scalar abstractions.
//!
//! Polytope code runs over any exact field implementing [`ExactScalar`]
//! (`Ratio<i64>`, `Ratio<i128>`, `BigRational`). Numerical code runs over
//! any [`Real`] (`f32`, `f64`).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};
use rustfft::FftNum;

use crate::error::{Error, Result};

/// An exact ordered field element.
pub trait ExactScalar:
    Clone + Debug + Display + Ord + Num + Signed + Send + Sync + 'static
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
    /// Largest integer `<= self`.
    fn floor_int(&self) -> i64;
    fn is_integral(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Canonical `num/den` rendering (always with a denominator).
    fn to_canonical(&self) -> String;
    fn parse_canonical(s: &str) -> Result<Self>;
}

/// Integer types that can back a [`Ratio`] used as an [`ExactScalar`].
pub trait RatioInt:
    Clone
    + Debug
    + Display
    + Integer
    + Signed
    + FromPrimitive
    + ToPrimitive
    + ToBigInt
    + std::str::FromStr
    + Send
    + Sync
    + 'static
{
}

impl RatioInt for i64 {}
impl RatioInt for i128 {}
impl RatioInt for BigInt {}

impl<I: RatioInt> ExactScalar for Ratio<I> {
    fn from_ratio(num: i64, den: i64) -> Self {
        let n = I::from_i64(num).expect("i64 fits");
        let d = I::from_i64(den).expect("i64 fits");
        Ratio::new(n, d)
    }

    fn floor_int(&self) -> i64 {
        self.floor()
            .to_integer()
            .to_i64()
            .expect("floor fits in i64")
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn to_f64(&self) -> f64 {
        // Ratio::to_f64 handles large numerators/denominators without overflow.
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_canonical(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_canonical(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: I = n.parse().map_err(|_| bad())?;
        let d: I = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Ratio::new(n, d))
    }
}

/// Floating-point scalar for the numerical paths.
pub trait Real:
    Float + FftNum + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an exact scalar to a float type.
pub fn to_real<F: Real, T: ExactScalar>(x: &T) -> F {
    F::lit(x.to_f64())
}

/// Parse a comma-separated list of rationals, e.g. `1/2,1/3,2/3`.
pub fn parse_rational_list<T: ExactScalar>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(T::parse_canonical).collect()
}
