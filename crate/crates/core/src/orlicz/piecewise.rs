use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A continuous, strictly increasing, piecewise-linear `f` with `f(0) = 0`,
/// read as the log-log profile of an Orlicz function: `F(2^y) = 2^f(y)`.
///
/// Segment `m` covers `[breakpoints[m], breakpoints[m + 1])`; the last
/// segment extends to `+inf`. Below zero `f(y) = head_slope * y` (slope 1 by
/// default, i.e. `F(x) = x` on `[0, 1]`).
///
/// Knot values `f(breakpoints[m])` are stored, not recomputed, so callers that
/// know exact integer rises (see [`PiecewiseLogAffine::from_knots`]) get exact
/// values at every knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLogAffine {
    head_slope: f64,
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLogAffine {
    /// Builds `f` from breakpoints (starting at 0) and per-segment slopes.
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        Self::with_head_slope(breakpoints, slopes, 1.0)
    }

    pub fn with_head_slope(breakpoints: Vec<f64>, slopes: Vec<f64>, head_slope: f64) -> Result<Self> {
        if breakpoints.len() != slopes.len() {
            return Err(Error::InvalidArgument("one slope per breakpoint is required"));
        }
        check_breakpoints(&breakpoints)?;
        let mut values = Vec::with_capacity(breakpoints.len());
        let mut acc = 0.0;
        values.push(acc);
        for m in 1..breakpoints.len() {
            acc += slopes[m - 1] * (breakpoints[m] - breakpoints[m - 1]);
            values.push(acc);
        }
        let out = Self { head_slope, breakpoints, slopes, values };
        out.check_slopes()?;
        Ok(out)
    }

    /// Builds `f` through the knots `(y_m, f(y_m))`, the first of which must
    /// be `(0, 0)`, continuing with `tail_slope` after the last knot.
    pub fn from_knots(knots: &[(f64, f64)], tail_slope: f64) -> Result<Self> {
        match knots.first() {
            Some(&(y, v)) if y == 0.0 && v == 0.0 => {}
            _ => return Err(Error::InvalidArgument("first knot must be (0, 0)")),
        }
        let breakpoints: Vec<f64> = knots.iter().map(|k| k.0).collect();
        check_breakpoints(&breakpoints)?;
        let values: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let mut slopes: Vec<f64> = knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        slopes.push(tail_slope);
        let out = Self { head_slope: 1.0, breakpoints, slopes, values };
        out.check_slopes()?;
        Ok(out)
    }

    /// Reassembles a profile from its stored parts, e.g. after
    /// deserialization. Knot values must agree with the slopes to `1e-9`
    /// relative.
    pub fn from_parts(head_slope: f64, breakpoints: Vec<f64>, slopes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != slopes.len() || breakpoints.len() != values.len() {
            return Err(Error::InvalidArgument("breakpoints, slopes and values must have equal length"));
        }
        check_breakpoints(&breakpoints)?;
        if values[0] != 0.0 {
            return Err(Error::InvalidArgument("f(0) must be 0"));
        }
        for m in 1..values.len() {
            let want = values[m - 1] + slopes[m - 1] * (breakpoints[m] - breakpoints[m - 1]);
            if (values[m] - want).abs() > 1e-9 * want.abs().max(1.0) {
                return Err(Error::InvalidArgument("knot values disagree with slopes"));
            }
        }
        let out = Self { head_slope, breakpoints, slopes, values };
        out.check_slopes()?;
        Ok(out)
    }

    /// `f(y) = y`, i.e. `F(x) = x`.
    pub fn identity() -> Self {
        Self::power(1.0).expect("unit slope is valid")
    }

    /// `f(y) = a * y` everywhere, including below zero.
    pub fn power(a: f64) -> Result<Self> {
        Self::with_head_slope(alloc::vec![0.0], alloc::vec![a], a)
    }

    fn check_slopes(&self) -> Result<()> {
        let ok = |a: f64| a.is_finite() && a >= 1.0;
        if !ok(self.head_slope) || !self.slopes.iter().all(|&a| ok(a)) {
            return Err(Error::InvalidArgument("slopes must be finite and at least 1"));
        }
        if !self.values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("knot values must be finite"));
        }
        Ok(())
    }

    pub fn head_slope(&self) -> f64 {
        self.head_slope
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// `f` at each breakpoint.
    pub fn knot_values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the segment containing `y >= 0`.
    pub(crate) fn segment(&self, y: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= y) - 1
    }

    /// Right slope at `y`.
    pub fn slope_at(&self, y: f64) -> f64 {
        if y < 0.0 {
            self.head_slope
        } else {
            self.slopes[self.segment(y)]
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y < 0.0 {
            return self.head_slope * y;
        }
        let m = self.segment(y);
        let dy = y - self.breakpoints[m];
        if dy == 0.0 {
            self.values[m]
        } else {
            self.values[m] + self.slopes[m] * dy
        }
    }

    /// The unique `y` with `f(y) = w`.
    pub fn inverse(&self, w: f64) -> f64 {
        if w < 0.0 {
            return w / self.head_slope;
        }
        let m = self.values.partition_point(|&v| v <= w) - 1;
        let dw = w - self.values[m];
        if dw == 0.0 {
            self.breakpoints[m]
        } else {
            self.breakpoints[m] + dw / self.slopes[m]
        }
    }

    pub fn min_slope(&self) -> f64 {
        self.slopes.iter().copied().fold(self.head_slope, f64::min)
    }

    pub fn max_slope(&self) -> f64 {
        self.slopes.iter().copied().fold(self.head_slope, f64::max)
    }

    /// `f(y) - f(y - width)`, maximised over all `y`.
    ///
    /// The windowed integral of a step function peaks with a window end on a
    /// breakpoint, so only those placements are examined.
    pub fn max_window_increment(&self, width: f64) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, 0.0);
        let mut consider = |y: f64| {
            let inc = self.eval(y) - self.eval(y - width);
            if inc > best.0 {
                best = (inc, y);
            }
        };
        consider(0.0);
        for &b in &self.breakpoints {
            consider(b);
            consider(b + width);
        }
        // both ends in the tail
        consider(self.breakpoints[self.len() - 1] + 2.0 * width);
        best
    }

    /// `∫ (slope - 1)` over `[lo, hi]`, i.e. `f(hi) - f(lo) - (hi - lo)`.
    pub fn excess(&self, lo: f64, hi: f64) -> f64 {
        self.eval(hi) - self.eval(lo) - (hi - lo)
    }
}

fn check_breakpoints(breakpoints: &[f64]) -> Result<()> {
    if breakpoints.first() != Some(&0.0) {
        return Err(Error::InvalidArgument("breakpoints must start at 0"));
    }
    if !breakpoints.iter().all(|b| b.is_finite()) {
        return Err(Error::InvalidArgument("breakpoints must be finite"));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("breakpoints must be strictly ascending"));
    }
    Ok(())
}
