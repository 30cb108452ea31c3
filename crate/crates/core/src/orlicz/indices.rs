use alloc::vec::Vec;

use super::OrliczFunctionSpec;
use crate::error::{Error, Result};
use crate::logdomain::Log2Value;

/// `sup log2(F(2t) / F(t))` over a grid of `y = log2 t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delta2Index {
    pub sup_increment: f64,
    pub at_y: f64,
    pub grid_points: usize,
}

impl Delta2Index {
    /// Δ₂ at the tested scale: the doubling increment stays within `cap_log2`.
    pub fn holds(&self, cap_log2: f64) -> bool {
        self.sup_increment <= cap_log2
    }
}

pub fn delta2_index(spec: &OrliczFunctionSpec, y_min: f64, y_max: f64, step: f64) -> Result<Delta2Index> {
    if !(y_min < y_max) || !(step > 0.0) {
        return Err(Error::InvalidArgument("delta2 grid needs y_min < y_max and step > 0"));
    }
    let n = libm::floor((y_max - y_min) / step) as usize + 1;
    let mut best = Delta2Index { sup_increment: f64::NEG_INFINITY, at_y: y_min, grid_points: n };
    for k in 0..n {
        let y = y_min + k as f64 * step;
        let inc = spec.eval_log(y + 1.0)?.log2() - spec.eval_log(y)?.log2();
        if inc > best.sup_increment {
            best.sup_increment = inc;
            best.at_y = y;
        }
    }
    Ok(best)
}

/// `log2 φ(s) = -log2 F^{-1}(1/s)` for `0 < s <= 1`.
pub fn fundamental_log(spec: &OrliczFunctionSpec, s: Log2Value) -> Result<Log2Value> {
    match s.exponent() {
        Some(e) if e <= 0.0 => Ok(Log2Value::pow2(-spec.inverse_log(Log2Value::pow2(-e))?)),
        _ => Err(Error::InvalidArgument("fundamental function needs 0 < s <= 1")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    /// Middle points `y` of consecutive grid triples where `F` lies strictly
    /// above its chord.
    pub midpoint_violations: Vec<f64>,
    /// Smallest `d log2 F / d log2 t`: exact over all slopes for log-piecewise
    /// specs, from consecutive grid points otherwise.
    pub min_log_slope: f64,
    /// `F(s)/s` nondecreasing, i.e. `min_log_slope >= 1`.
    pub ratio_monotone: bool,
}

impl ConvexityReport {
    pub fn is_convex_on_grid(&self) -> bool {
        self.midpoint_violations.is_empty()
    }
}

const CHORD_TOL: f64 = 1e-9;

/// Three-point chord test on consecutive grid triples, carried out in the
/// log domain so that it applies at any scale.
pub fn convexity_probe(spec: &OrliczFunctionSpec, grid: &[f64]) -> Result<ConvexityReport> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("convexity grid must be strictly ascending"));
    }
    let values = grid.iter().map(|&y| spec.eval_log(y)).collect::<Result<Vec<_>>>()?;
    let mut midpoint_violations = Vec::new();
    for k in 1..grid.len().saturating_sub(1) {
        let (x1, x2, x3) = (Log2Value::pow2(grid[k - 1]), Log2Value::pow2(grid[k]), Log2Value::pow2(grid[k + 1]));
        let span = x3.log_sub_nonneg(x1)?;
        let left = x3.log_sub_nonneg(x2)? / span;
        let right = x2.log_sub_nonneg(x1)? / span;
        let chord = left * values[k - 1] + right * values[k + 1];
        if values[k].log2() > chord.log2() + CHORD_TOL {
            midpoint_violations.push(grid[k]);
        }
    }
    let min_log_slope = match spec.as_log_piecewise() {
        Some(f) => f.min_slope(),
        None => grid
            .windows(2)
            .zip(values.windows(2))
            .map(|(y, v)| (v[1].log2() - v[0].log2()) / (y[1] - y[0]))
            .fold(f64::INFINITY, f64::min),
    };
    Ok(ConvexityReport { midpoint_violations, min_log_slope, ratio_monotone: min_log_slope >= 1.0 - CHORD_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::PiecewiseLogAffine;

    fn prop3_head() -> OrliczFunctionSpec {
        OrliczFunctionSpec::LogPiecewise(
            PiecewiseLogAffine::from_knots(&[(0.0, 0.0), (2.0, 2.0), (4.0, 5.0), (6.0, 7.0), (8.0, 10.0)], 1.0)
                .unwrap(),
        )
    }

    fn exp_type(n: usize) -> OrliczFunctionSpec {
        let bps = (0..n).map(|m| m as f64).collect();
        let slopes = (1..=n).map(|m| m as f64).collect();
        OrliczFunctionSpec::LogPiecewise(PiecewiseLogAffine::new(bps, slopes).unwrap())
    }

    #[test]
    fn delta2_of_power_is_exponent() {
        for &p in &[1.0, 1.5, 2.0, 3.7] {
            let d = delta2_index(&OrliczFunctionSpec::power(p).unwrap(), -10.0, 50.0, 0.37).unwrap();
            assert!((d.sup_increment - p).abs() < 1e-12);
        }
    }

    #[test]
    fn delta2_of_construction_is_bounded() {
        let d = delta2_index(&prop3_head(), -4.0, 20.0, 0.25).unwrap();
        assert!(d.sup_increment <= 2.0);
        assert_eq!(d.sup_increment, 1.5);
    }

    #[test]
    fn delta2_fails_for_exp_type() {
        let g = exp_type(200);
        let small = delta2_index(&g, 0.0, 20.0, 1.0).unwrap();
        let large = delta2_index(&g, 0.0, 150.0, 1.0).unwrap();
        assert!(large.sup_increment > small.sup_increment);
        assert!(!large.holds(10.0));
        // f(y+1) - f(y) = y + 1 at integers
        assert_eq!(large.sup_increment, 151.0);
    }

    #[test]
    fn fundamental_examples() {
        let p2 = OrliczFunctionSpec::power(2.0).unwrap();
        assert_eq!(fundamental_log(&p2, Log2Value::pow2(-2.0)).unwrap(), Log2Value::pow2(-1.0));
        assert_eq!(fundamental_log(&p2, Log2Value::ONE).unwrap(), Log2Value::ONE);
        assert_eq!(fundamental_log(&prop3_head(), Log2Value::pow2(-5.0)).unwrap(), Log2Value::pow2(-4.0));
        assert!(fundamental_log(&p2, Log2Value::pow2(1.0)).is_err());
        assert!(fundamental_log(&p2, Log2Value::ZERO).is_err());
    }

    #[test]
    fn convexity_examples() {
        let grid: Vec<f64> = (0..=10).map(|k| k as f64).collect();
        let r = convexity_probe(&OrliczFunctionSpec::power(2.0).unwrap(), &grid).unwrap();
        assert!(r.is_convex_on_grid() && r.ratio_monotone);

        let fine: Vec<f64> = (0..=48).map(|k| k as f64 * 0.25).collect();
        let raw = convexity_probe(&prop3_head(), &fine).unwrap();
        assert!(raw.ratio_monotone);
        assert_eq!(raw.min_log_slope, 1.0);
        assert!(raw.midpoint_violations.contains(&4.0));

        let phi = prop3_head().smooth_to_convex().unwrap();
        let smooth = convexity_probe(&phi, &fine).unwrap();
        assert!(smooth.is_convex_on_grid(), "{:?}", smooth.midpoint_violations);
    }
}
