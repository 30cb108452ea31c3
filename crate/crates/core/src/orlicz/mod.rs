//! Orlicz function specifications evaluated in the log domain.
//!
//! Every spec is read through `y = log2 x`: [`OrliczFunctionSpec::eval_log`]
//! returns `F(2^y)` as a [`Log2Value`]. This keeps constructions whose
//! arguments are themselves of size `2^(2^k)` within reach of `f64`.

use alloc::boxed::Box;

use crate::bisect::{bisect, expand};
use crate::error::{Error, Result};
use crate::logdomain::{Log2Value, LINEAR_RANGE};

mod conjugate;
mod indices;
mod piecewise;
mod smooth;

pub use indices::{convexity_probe, delta2_index, fundamental_log, ConvexityReport, Delta2Index};
pub use piecewise::PiecewiseLogAffine;
pub use smooth::SmoothedPiecewise;

/// Width of the final bracket for inverses computed by bisection, in `log2` units.
pub const INVERSE_TOL: f64 = 1e-12;

/// Lowest log-argument explored by bisection-based inversion and conjugation.
pub(crate) const Y_FLOOR: f64 = -LINEAR_RANGE;
const Y_CEIL: f64 = 1e15;

/// A nonnegative, nondecreasing function on `[0, inf)` vanishing at zero.
#[derive(Debug, Clone, PartialEq)]
pub enum OrliczFunctionSpec {
    /// `F(t) = t^p`, `p >= 1`.
    PowerLaw { p: f64 },
    /// `F(2^y) = 2^f(y)`.
    LogPiecewise(PiecewiseLogAffine),
    /// `t -> inner(t^p)`.
    PowerComposition { inner: Box<OrliczFunctionSpec>, p: f64 },
    /// `Φ(t) = ∫_0^t F(s)/s ds` of a log-piecewise `F`.
    IntegralSmoothed(SmoothedPiecewise),
    /// Young conjugate `G(u) = sup_{0 < t <= cap} (u t - inner(t))`.
    ConjugateOf { inner: Box<OrliczFunctionSpec>, range_cap: Log2Value },
}

impl OrliczFunctionSpec {
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidArgument("power exponent must be at least 1"));
        }
        Ok(Self::PowerLaw { p })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::PowerLaw { .. } => "power",
            Self::LogPiecewise(_) => "log_piecewise",
            Self::PowerComposition { .. } => "power_composition",
            Self::IntegralSmoothed(_) => "integral_smoothed",
            Self::ConjugateOf { .. } => "conjugate",
        }
    }

    pub fn as_log_piecewise(&self) -> Option<&PiecewiseLogAffine> {
        match self {
            Self::LogPiecewise(f) => Some(f),
            _ => None,
        }
    }

    /// `F(2^y)`.
    pub fn eval_log(&self, y: f64) -> Result<Log2Value> {
        match self {
            Self::PowerLaw { p } => Ok(Log2Value::pow2(p * y)),
            Self::LogPiecewise(f) => Ok(Log2Value::pow2(f.eval(y))),
            Self::PowerComposition { inner, p } => inner.eval_log(p * y),
            Self::IntegralSmoothed(s) => Ok(s.eval_log(y)),
            Self::ConjugateOf { inner, range_cap } => Ok(conjugate::conjugate_point(inner, y, range_cap.log2())?.value),
        }
    }

    /// `F(x)`, with `F(0) = 0`.
    pub fn eval(&self, x: Log2Value) -> Result<Log2Value> {
        match x.exponent() {
            None => Ok(Log2Value::ZERO),
            Some(y) => self.eval_log(y),
        }
    }

    /// Right derivative `F'(2^y)`.
    pub fn derivative_log(&self, y: f64) -> Result<Log2Value> {
        match self {
            Self::PowerLaw { p } => Ok(Log2Value::pow2(libm::log2(*p) + (p - 1.0) * y)),
            Self::LogPiecewise(f) => Ok(Log2Value::pow2(libm::log2(f.slope_at(y)) + f.eval(y) - y)),
            Self::PowerComposition { inner, p } => {
                Ok(inner.derivative_log(p * y)?.shift(libm::log2(*p) + (p - 1.0) * y))
            }
            Self::IntegralSmoothed(s) => Ok(s.derivative_log(y)),
            // G'(u) is the maximiser t*(u)
            Self::ConjugateOf { inner, range_cap } => {
                let point = conjugate::conjugate_point(inner, y, range_cap.log2())?;
                Ok(point.arg_log2.map_or(Log2Value::ZERO, Log2Value::pow2))
            }
        }
    }

    /// The `y` with `F(2^y) = w`.
    ///
    /// Exact for power laws, log-piecewise and smoothed specs; bisection to
    /// [`INVERSE_TOL`] otherwise.
    pub fn inverse_log(&self, w: Log2Value) -> Result<f64> {
        let w = w.exponent().ok_or(Error::BelowDomain)?;
        match self {
            Self::PowerLaw { p } => Ok(w / p),
            Self::LogPiecewise(f) => Ok(f.inverse(w)),
            Self::PowerComposition { inner, p } => Ok(inner.inverse_log(Log2Value::pow2(w))? / p),
            Self::IntegralSmoothed(s) => Ok(s.inverse_log(w)),
            Self::ConjugateOf { inner, range_cap } => match **inner {
                Self::PowerLaw { p } if p > 1.0 => {
                    // G(u) = (p-1) (u/p)^(p/(p-1))
                    let y = (w - libm::log2(p - 1.0)) * (p - 1.0) / p + libm::log2(p);
                    if y > conjugate::slope_cap(p, range_cap.log2()) {
                        return Err(Error::ConjugateRangeExhausted { slope_log2: y, cap_log2: range_cap.log2() });
                    }
                    Ok(y)
                }
                _ => self.inverse_by_bisection(w),
            },
        }
    }

    fn inverse_by_bisection(&self, w: f64) -> Result<f64> {
        let target = Log2Value::pow2(w);
        let reaches = |y: f64| Ok(self.eval_log(y)? >= target);
        let (lo, hi) = expand(-1.0, 1.0, Y_FLOOR, Y_CEIL, reaches)?.ok_or(Error::BelowDomain)?;
        let tol = INVERSE_TOL * hi.abs().max(1.0);
        Ok(bisect(lo, hi, tol, reaches)?.mid())
    }

    /// `Φ(t) = ∫_0^t F(s)/s ds`; convex whenever `F(s)/s` is nondecreasing,
    /// and `Φ <= F`.
    pub fn smooth_to_convex(&self) -> Result<Self> {
        match self {
            Self::LogPiecewise(f) => Ok(Self::IntegralSmoothed(SmoothedPiecewise::new(f.clone()))),
            _ => Err(Error::NotLogPiecewise),
        }
    }

    /// Young conjugate restricted to maximisers `t <= range_cap`.
    pub fn conjugate(&self, range_cap: Log2Value) -> Result<Self> {
        if range_cap.is_zero() {
            return Err(Error::InvalidArgument("conjugate range cap must be positive"));
        }
        Ok(Self::ConjugateOf { inner: Box::new(self.clone()), range_cap })
    }

    /// `t -> F(t^p)`.
    pub fn compose_power(&self, p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidArgument("composition exponent must be at least 1"));
        }
        Ok(Self::PowerComposition { inner: Box::new(self.clone()), p })
    }
}
