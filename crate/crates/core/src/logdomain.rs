//! Nonnegative extended-range reals stored by their base-2 logarithm.

use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, Div, Mul};

use crate::error::{Error, Result};

const LN_2: f64 = core::f64::consts::LN_2;

/// Largest `|exponent|` accepted by [`Log2Value::to_linear`].
pub const LINEAR_RANGE: f64 = 1000.0;

/// A nonnegative real `2^exponent`, with a separate tag for zero.
///
/// The exponent is always finite; zero is never encoded as `-inf`. Ordering
/// follows the represented values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Log2Value(Option<f64>);

impl Log2Value {
    pub const ZERO: Log2Value = Log2Value(None);
    pub const ONE: Log2Value = Log2Value(Some(0.0));

    /// The value `2^exponent`. `-inf` maps to [`Log2Value::ZERO`].
    ///
    /// Panics on NaN or `+inf`.
    pub fn pow2(exponent: f64) -> Self {
        assert!(!exponent.is_nan(), "Log2Value exponent is NaN");
        if exponent == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        assert!(exponent.is_finite(), "Log2Value exponent is +inf");
        Log2Value(Some(exponent))
    }

    pub fn from_linear(x: f64) -> Result<Self> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::InvalidArgument("log-domain values are nonnegative"));
        }
        if x.is_infinite() {
            return Err(Error::Overflow { exponent: f64::INFINITY });
        }
        if x == 0.0 {
            return Ok(Self::ZERO);
        }
        Ok(Log2Value(Some(libm::log2(x))))
    }

    pub fn to_linear(self) -> Result<f64> {
        match self.0 {
            None => Ok(0.0),
            Some(e) if e.abs() <= LINEAR_RANGE => Ok(libm::exp2(e)),
            Some(e) => Err(Error::Overflow { exponent: e }),
        }
    }

    #[inline]
    pub fn exponent(self) -> Option<f64> {
        self.0
    }

    /// The base-2 logarithm, `-inf` for zero.
    #[inline]
    pub fn log2(self) -> f64 {
        self.0.unwrap_or(f64::NEG_INFINITY)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0.is_none()
    }

    /// `self + other` in the represented values.
    pub fn log_add(self, other: Self) -> Self {
        match (self.0, other.0) {
            (None, _) => other,
            (_, None) => self,
            (Some(a), Some(b)) => {
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                Log2Value(Some(hi + libm::log1p(libm::exp2(lo - hi)) / LN_2))
            }
        }
    }

    /// `self - other`, requiring `self >= other`.
    ///
    /// Exponents equal to within one machine epsilon (relative) give zero.
    pub fn log_sub_nonneg(self, other: Self) -> Result<Self> {
        let b = match other.0 {
            None => return Ok(self),
            Some(b) => b,
        };
        let a = match self.0 {
            None => return Err(Error::NegativeDifference),
            Some(a) => a,
        };
        let eps = f64::EPSILON * a.abs().max(1.0);
        if (a - b).abs() <= eps {
            return Ok(Self::ZERO);
        }
        if b > a {
            return Err(Error::NegativeDifference);
        }
        let frac = -libm::expm1((b - a) * LN_2);
        Ok(Log2Value(Some(a + libm::log2(frac))))
    }

    /// `self^p` for `p >= 0`.
    pub fn powf(self, p: f64) -> Self {
        debug_assert!(p >= 0.0);
        match self.0 {
            None if p == 0.0 => Self::ONE,
            None => Self::ZERO,
            Some(e) => Log2Value(Some(e * p)),
        }
    }

    /// `self * 2^delta`.
    pub fn shift(self, delta: f64) -> Self {
        match self.0 {
            None => self,
            Some(e) => Self::pow2(e + delta),
        }
    }

    /// `1 / self`. Panics on zero.
    pub fn recip(self) -> Self {
        match self.0 {
            None => panic!("reciprocal of zero"),
            Some(e) => Log2Value(Some(-e)),
        }
    }

    /// Within `tol` in log2 units; two zeros are equal, a zero and a nonzero
    /// are not.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        match (self.0, other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

impl Eq for Log2Value {}

impl Ord for Log2Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.total_cmp(&b),
        }
    }
}

impl PartialOrd for Log2Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Log2Value {
    type Output = Log2Value;

    fn add(self, rhs: Self) -> Self {
        self.log_add(rhs)
    }
}

impl Mul for Log2Value {
    type Output = Log2Value;

    fn mul(self, rhs: Self) -> Self {
        match (self.0, rhs.0) {
            (Some(a), Some(b)) => Self::pow2(a + b),
            _ => Self::ZERO,
        }
    }
}

impl Div for Log2Value {
    type Output = Log2Value;

    /// Panics when dividing by zero.
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Sum for Log2Value {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Log2Value::log_add)
    }
}

impl fmt::Display for Log2Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => f.write_str("0"),
            Some(e) => write!(f, "2^{e}"),
        }
    }
}
