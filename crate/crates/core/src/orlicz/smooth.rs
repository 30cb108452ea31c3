use alloc::vec::Vec;

use super::PiecewiseLogAffine;
use crate::logdomain::Log2Value;

/// `log2(2^x - 1)` for `x > 0`; `-inf` at `x = 0`.
pub(crate) fn log2_exp2m1(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        f64::NEG_INFINITY
    } else if x > 60.0 {
        x + libm::log1p(-libm::exp2(-x)) / core::f64::consts::LN_2
    } else {
        libm::log2(libm::expm1(x * core::f64::consts::LN_2))
    }
}

/// `Φ(t) = ∫_0^t F(s)/s ds` for `F(2^y) = 2^f(y)` with piecewise-linear `f`.
///
/// On a segment where `F(s) = 2^c (s / 2^b)^a`, the integral from `2^b` to
/// `2^y` is `(2^c / a) (2^(a (y - b)) - 1)`; the totals at each breakpoint are
/// cached in log form.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedPiecewise {
    source: PiecewiseLogAffine,
    cumulative: Vec<Log2Value>,
}

impl SmoothedPiecewise {
    pub fn new(source: PiecewiseLogAffine) -> Self {
        let bps = source.breakpoints();
        let mut cumulative = Vec::with_capacity(bps.len());
        // ∫_0^1 s^(h-1) ds = 1/h
        cumulative.push(Log2Value::pow2(-libm::log2(source.head_slope())));
        for m in 1..bps.len() {
            let piece = piece_log(&source, m - 1, bps[m] - bps[m - 1]);
            let prev = cumulative[m - 1];
            cumulative.push(prev + piece);
        }
        Self { source, cumulative }
    }

    pub fn source(&self) -> &PiecewiseLogAffine {
        &self.source
    }

    /// `Φ` at each breakpoint.
    pub fn cumulative(&self) -> &[Log2Value] {
        &self.cumulative
    }

    pub fn eval_log(&self, y: f64) -> Log2Value {
        let h = self.source.head_slope();
        if y <= 0.0 {
            return Log2Value::pow2(h * y - libm::log2(h));
        }
        let m = self.source.segment(y);
        let dy = y - self.source.breakpoints()[m];
        self.cumulative[m] + piece_log(&self.source, m, dy)
    }

    /// `y` with `Φ(2^y) = w`, by exact per-piece inversion.
    pub fn inverse_log(&self, w: f64) -> f64 {
        let h = self.source.head_slope();
        let first = self.cumulative[0].log2();
        if w <= first {
            return (w + libm::log2(h)) / h;
        }
        let target = Log2Value::pow2(w);
        let m = self.cumulative.partition_point(|&c| c <= target) - 1;
        let rest = match target.log_sub_nonneg(self.cumulative[m]) {
            Ok(r) if !r.is_zero() => r.log2(),
            _ => return self.source.breakpoints()[m],
        };
        let a = self.source.slopes()[m];
        let c = self.source.knot_values()[m];
        // 2^(a dy) = 1 + 2^(rest + log2 a - c)
        let x = rest + libm::log2(a) - c;
        let a_dy = (Log2Value::ONE + Log2Value::pow2(x)).log2();
        self.source.breakpoints()[m] + a_dy / a
    }

    /// `log2 Φ'(2^y) = log2 (F(t) / t) = f(y) - y`.
    pub fn derivative_log(&self, y: f64) -> Log2Value {
        Log2Value::pow2(self.source.eval(y) - y)
    }
}

fn piece_log(f: &PiecewiseLogAffine, m: usize, dy: f64) -> Log2Value {
    if dy <= 0.0 {
        return Log2Value::ZERO;
    }
    let a = f.slopes()[m];
    let c = f.knot_values()[m];
    Log2Value::pow2(c - libm::log2(a) + log2_exp2m1(a * dy))
}
