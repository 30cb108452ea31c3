use super::{OrliczFunctionSpec, PiecewiseLogAffine, SmoothedPiecewise, INVERSE_TOL, Y_FLOOR};
use crate::bisect::bisect;
use crate::error::{Error, Result};
use crate::logdomain::Log2Value;

/// Maximiser and value of `sup_t (u t - F(t))`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ConjugatePoint {
    /// `log2 t*`; `None` when the supremum is approached as `t -> 0`.
    pub arg_log2: Option<f64>,
    pub value: Log2Value,
}

/// Largest `log2 u` whose maximiser for `t^p` stays below `2^cap_log2`.
pub(crate) fn slope_cap(p: f64, cap_log2: f64) -> f64 {
    libm::log2(p) + (p - 1.0) * cap_log2
}

fn exhausted(u_log2: f64, cap_log2: f64) -> Error {
    Error::ConjugateRangeExhausted { slope_log2: u_log2, cap_log2 }
}

pub(crate) fn conjugate_point(inner: &OrliczFunctionSpec, u_log2: f64, cap_log2: f64) -> Result<ConjugatePoint> {
    match inner {
        OrliczFunctionSpec::PowerLaw { p } => power_point(*p, u_log2, cap_log2),
        OrliczFunctionSpec::IntegralSmoothed(s) => smoothed_point(s, u_log2, cap_log2),
        _ => bisection_point(inner, u_log2, cap_log2),
    }
}

fn power_point(p: f64, u_log2: f64, cap_log2: f64) -> Result<ConjugatePoint> {
    if p == 1.0 {
        // sup_t (u - 1) t: zero for u <= 1, unbounded otherwise
        return if u_log2 <= 0.0 {
            Ok(ConjugatePoint { arg_log2: None, value: Log2Value::ZERO })
        } else {
            Err(exhausted(u_log2, cap_log2))
        };
    }
    if u_log2 > slope_cap(p, cap_log2) {
        return Err(exhausted(u_log2, cap_log2));
    }
    let lp = libm::log2(p);
    let arg = (u_log2 - lp) / (p - 1.0);
    let value = libm::log2(p - 1.0) + p / (p - 1.0) * (u_log2 - lp);
    Ok(ConjugatePoint { arg_log2: Some(arg), value: Log2Value::pow2(value) })
}

/// Slope matching for `Φ`: `Φ'(t) = F(t)/t = 2^(f(y) - y)`, and
/// `e(y) = f(y) - y` is piecewise linear and nondecreasing.
fn smoothed_point(s: &SmoothedPiecewise, u_log2: f64, cap_log2: f64) -> Result<ConjugatePoint> {
    let f = s.source();
    let y = match excess_level(f, u_log2) {
        Level::Origin => return Ok(ConjugatePoint { arg_log2: None, value: Log2Value::ZERO }),
        Level::Unreached => return Err(exhausted(u_log2, cap_log2)),
        Level::At(y) => y,
    };
    if y > cap_log2 {
        return Err(exhausted(u_log2, cap_log2));
    }
    // u t* = F(t*) at the matching point
    let value = Log2Value::pow2(f.eval(y)).log_sub_nonneg(s.eval_log(y)).unwrap_or(Log2Value::ZERO);
    Ok(ConjugatePoint { arg_log2: Some(y), value })
}

enum Level {
    Origin,
    Unreached,
    At(f64),
}

/// Smallest `y` with `f(y) - y >= level`.
fn excess_level(f: &PiecewiseLogAffine, level: f64) -> Level {
    let h = f.head_slope();
    if level <= 0.0 {
        return if h > 1.0 { Level::At(level / (h - 1.0)) } else { Level::Origin };
    }
    let bps = f.breakpoints();
    let vals = f.knot_values();
    for m in 0..bps.len() {
        let e_start = vals[m] - bps[m];
        let a = f.slopes()[m];
        let reached = match bps.get(m + 1) {
            Some(&next) => vals[m + 1] - next >= level,
            None => a > 1.0,
        };
        if reached {
            return Level::At(bps[m] + (level - e_start) / (a - 1.0));
        }
    }
    Level::Unreached
}

/// Derivative bisection: the smallest `y <= cap` with `F'(2^y) >= u`.
fn bisection_point(inner: &OrliczFunctionSpec, u_log2: f64, cap_log2: f64) -> Result<ConjugatePoint> {
    let u = Log2Value::pow2(u_log2);
    let steep_enough = |y: f64| Ok(inner.derivative_log(y)? >= u);
    if !steep_enough(cap_log2)? {
        return Err(exhausted(u_log2, cap_log2));
    }
    let y = if steep_enough(Y_FLOOR)? {
        Y_FLOOR
    } else {
        let tol = INVERSE_TOL * cap_log2.abs().max(1.0);
        bisect(Y_FLOOR, cap_log2, tol, steep_enough)?.hi
    };
    let value = Log2Value::pow2(u_log2 + y).log_sub_nonneg(inner.eval_log(y)?).unwrap_or(Log2Value::ZERO);
    Ok(ConjugatePoint { arg_log2: Some(y), value })
}
