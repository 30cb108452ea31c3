//! The counterexample Orlicz function built from separated log-intervals.
//!
//! With `r_0 = 1 < r_1 < ...` and `r_{i-1}/r_i -> 0`, intervals
//! `A_i^j = [2^k - r_i, 2^k]` (`k = k_i^j`) are laid out on the `y = log2 t`
//! axis with growing gaps. The log-profile `f` has slope `1 + r_{i-1}/r_i`
//! on `A_i^j` and slope 1 elsewhere; `F(2^y) = 2^f(y)` and `F(x) = x` on
//! `[0, 1]`. Its smoothing `Φ(t) = ∫_0^t F(s)/s ds` is convex and within a
//! factor 4 of `F`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::orlicz::{OrliczFunctionSpec, PiecewiseLogAffine};

/// Generator of `r_0 = 1, r_1, r_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum RRule {
    /// `r_i = (i + 1)!`
    Factorial,
    /// Explicit values, `r[0]` first.
    Explicit(Vec<u64>),
}

/// Required gap before the `n`-th placed interval (1-based).
#[derive(Debug, Clone, PartialEq)]
pub enum GapRule {
    /// `g_n = n`
    Linear,
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prop3Params {
    pub r_rule: RRule,
    pub i_max: usize,
    pub j_max: usize,
    pub gap_rule: GapRule,
    pub k_cap: u32,
}

impl Default for Prop3Params {
    fn default() -> Self {
        Self { r_rule: RRule::Factorial, i_max: 4, j_max: 4, gap_rule: GapRule::Linear, k_cap: 50 }
    }
}

/// Exponents above this would put breakpoints past the exact-integer range of `f64`.
const MAX_K_CAP: u32 = 52;

impl Prop3Params {
    pub fn r(&self, i: usize) -> Result<u64> {
        match &self.r_rule {
            RRule::Factorial => (2..=i as u64 + 1)
                .try_fold(1u64, |acc, n| acc.checked_mul(n))
                .ok_or(Error::InvalidArgument("factorial r schedule overflows u64")),
            RRule::Explicit(r) => r.get(i).copied().ok_or(Error::InvalidArgument("explicit r schedule is too short")),
        }
    }

    pub fn gap(&self, n: usize) -> Result<u64> {
        match &self.gap_rule {
            GapRule::Linear => Ok(n as u64),
            GapRule::Explicit(g) => {
                g.get(n - 1).copied().ok_or(Error::InvalidArgument("explicit gap schedule is too short"))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_cap > MAX_K_CAP {
            return Err(Error::InvalidArgument("k_cap above 52 loses integer exactness"));
        }
        if self.r(0)? != 1 {
            return Err(Error::InvalidArgument("r_0 must be 1"));
        }
        for i in 1..=self.i_max {
            if self.r(i)? == 0 {
                return Err(Error::InvalidArgument("r_i must be positive"));
            }
        }
        if let GapRule::Explicit(g) = &self.gap_rule {
            if g.len() < self.i_max * self.j_max {
                return Err(Error::InvalidArgument("explicit gap schedule is too short"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacedInterval {
    pub i: usize,
    pub j: usize,
    pub k: u32,
    pub lo: u64,
    pub hi: u64,
    /// `r_{i-1}`: the rise of `f` over the interval in excess of its width.
    pub excess: u64,
}

impl PlacedInterval {
    pub fn width(&self) -> u64 {
        self.hi - self.lo
    }

    /// `1 + r_{i-1} / r_i`.
    pub fn slope(&self) -> f64 {
        1.0 + self.excess as f64 / self.width() as f64
    }
}

/// Places `A_i^j` in diagonal order (`i + j`, then `i`), each at the least
/// `k` with `2^k - r_i >= previous max + gap`, where the gap is at least
/// `g_n` and exceeds the previous gap.
pub fn enumerate_intervals(params: &Prop3Params) -> Result<Vec<PlacedInterval>> {
    params.validate()?;
    let mut out: Vec<PlacedInterval> = Vec::with_capacity(params.i_max * params.j_max);
    let mut prev_max = 0u64;
    let mut last_gap: Option<u64> = None;
    for diag in 2..=params.i_max + params.j_max {
        let i_lo = diag.saturating_sub(params.j_max).max(1);
        let i_hi = params.i_max.min(diag - 1);
        for i in i_lo..=i_hi {
            let j = diag - i;
            let n = out.len() + 1;
            let gap = match last_gap {
                Some(g) => params.gap(n)?.max(g + 1),
                None => params.gap(n)?,
            };
            let r_i = params.r(i)?;
            let need = prev_max + gap + r_i;
            let k = (0..=params.k_cap).find(|&k| (1u64 << k) >= need).ok_or(Error::KCapExhausted {
                i,
                j,
                k_cap: params.k_cap,
            })?;
            let hi = 1u64 << k;
            let lo = hi - r_i;
            if !out.is_empty() {
                last_gap = Some(lo - prev_max);
            }
            prev_max = hi;
            out.push(PlacedInterval { i, j, k, lo, hi, excess: params.r(i - 1)? });
        }
    }
    Ok(out)
}

/// A built construction: its parameters, interval table and log-profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    params: Prop3Params,
    intervals: Vec<PlacedInterval>,
    profile: PiecewiseLogAffine,
}

impl Construction {
    pub fn build(params: Prop3Params) -> Result<Self> {
        let mut intervals = enumerate_intervals(&params)?;
        intervals.sort_by_key(|a| a.lo);
        let mut knots = vec![(0.0, 0.0)];
        let (mut y, mut v) = (0u64, 0u64);
        for a in &intervals {
            v += a.lo - y;
            knots.push((a.lo as f64, v as f64));
            v += a.width() + a.excess;
            knots.push((a.hi as f64, v as f64));
            y = a.hi;
        }
        let profile = PiecewiseLogAffine::from_knots(&knots, 1.0)?;
        Ok(Self { params, intervals, profile })
    }

    pub fn params(&self) -> &Prop3Params {
        &self.params
    }

    /// Intervals in ascending position.
    pub fn intervals(&self) -> &[PlacedInterval] {
        &self.intervals
    }

    pub fn interval(&self, i: usize, j: usize) -> Option<&PlacedInterval> {
        self.intervals.iter().find(|a| a.i == i && a.j == j)
    }

    pub fn profile(&self) -> &PiecewiseLogAffine {
        &self.profile
    }

    /// The raw `F`.
    pub fn raw_spec(&self) -> OrliczFunctionSpec {
        OrliczFunctionSpec::LogPiecewise(self.profile.clone())
    }

    /// The convex `Φ`.
    pub fn smoothed_spec(&self) -> OrliczFunctionSpec {
        self.raw_spec().smooth_to_convex().expect("raw spec is log-piecewise")
    }

    pub fn r(&self, i: usize) -> u64 {
        self.params.r(i).expect("validated at build")
    }

    /// `log2 t = 2^{k_i^j}` for `i = 1..=i_max` at fixed `j`.
    pub fn probe_scales(&self, j: usize) -> Vec<f64> {
        (1..=self.params.i_max).filter_map(|i| self.interval(i, j).map(|a| a.hi as f64)).collect()
    }

    /// `min A_{n+1} - max A_n` for consecutive intervals.
    pub fn gaps(&self) -> Vec<u64> {
        self.intervals.windows(2).map(|w| w[1].lo - w[0].hi).collect()
    }

    /// `r` strictly increasing with nonincreasing `r_{i-1}/r_i`, and strictly
    /// increasing gaps.
    pub fn schedule_ok(&self) -> bool {
        let r: Vec<u64> = (0..=self.params.i_max).map(|i| self.r(i)).collect();
        let r_inc = r.windows(2).all(|w| w[0] < w[1]);
        // r_{i-1}/r_i >= r_i/r_{i+1}
        let ratio_dec = r.windows(3).all(|w| w[0] as u128 * w[2] as u128 >= w[1] as u128 * w[1] as u128);
        let gaps = self.gaps();
        r_inc && ratio_dec && gaps.windows(2).all(|w| w[0] < w[1])
    }

    /// `∫ (φ - 1)` over `[lo, hi]` from interval overlaps.
    pub fn window_excess(&self, lo: f64, hi: f64) -> f64 {
        self.intervals
            .iter()
            .map(|a| {
                let overlap = (hi.min(a.hi as f64) - lo.max(a.lo as f64)).max(0.0);
                overlap * a.excess as f64 / a.width() as f64
            })
            .sum()
    }

    /// Defect exponents `r_i + log2 spec(2^(2^k - r_i)) - log2 spec(2^(2^k))`
    /// for `k = k_i^j`, `j` in `js`.
    ///
    /// The raw `F` gives exactly `-r_{i-1}` for every `j`.
    pub fn defect_probe(&self, spec: &OrliczFunctionSpec, i: usize, js: &[usize]) -> Result<Vec<f64>> {
        js.iter()
            .map(|&j| {
                let a = self.interval(i, j).ok_or(Error::IntervalNotGenerated { i, j })?;
                let ratio = spec.eval_log(a.lo as f64)?.log2() - spec.eval_log(a.hi as f64)?.log2();
                Ok(a.width() as f64 + ratio)
            })
            .collect()
    }

    pub fn structural_check(&self, smoothed: &OrliczFunctionSpec, grid_points: usize) -> Result<StructuralReport> {
        structural_check(&self.raw_spec(), smoothed, grid_points)
    }
}

/// Minimum over `r = 1..=window` of `r + log2 spec(2^(y_t - r)) - log2 spec(2^y_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorProbe {
    pub floor: f64,
    pub at_r: u32,
}

pub fn pointwise_floor_probe(spec: &OrliczFunctionSpec, y_t: f64, window: u32) -> Result<FloorProbe> {
    if window == 0 || window as f64 > y_t {
        return Err(Error::InvalidArgument("floor window must satisfy 1 <= R <= y_t"));
    }
    let top = spec.eval_log(y_t)?.log2();
    let mut best = FloorProbe { floor: f64::INFINITY, at_r: 0 };
    for r in 1..=window {
        let v = r as f64 + spec.eval_log(y_t - r as f64)?.log2() - top;
        if v < best.floor {
            best = FloorProbe { floor: v, at_r: r };
        }
    }
    Ok(best)
}

/// Measured extrema behind the three structural inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralReport {
    /// Least slope of `f` (eq6 holds iff `>= 1`).
    pub min_slope: f64,
    /// Largest `f(y) - f(y - 1)` (eq7 holds iff `<= 2`).
    pub max_unit_increment: f64,
    pub max_unit_increment_at: f64,
    /// Extremes of `log2 F - log2 Φ` over the grid (eq7a holds iff in `[0, 2]`).
    pub sandwich_min: f64,
    pub sandwich_min_at: f64,
    pub sandwich_max: f64,
    pub sandwich_max_at: f64,
    pub grid_points: usize,
}

pub const STRUCTURAL_TOL: f64 = 1e-9;

impl StructuralReport {
    pub fn eq6(&self) -> bool {
        self.min_slope >= 1.0 - STRUCTURAL_TOL
    }

    pub fn eq7(&self) -> bool {
        self.max_unit_increment <= 2.0 + STRUCTURAL_TOL
    }

    pub fn eq7a(&self) -> bool {
        self.sandwich_min >= -STRUCTURAL_TOL && self.sandwich_max <= 2.0 + STRUCTURAL_TOL
    }

    pub fn passed(&self) -> bool {
        self.eq6() && self.eq7() && self.eq7a()
    }
}

/// Checks `F(st) >= t F(s)`, `F(t) <= 4 F(t/2)` and `F/4 <= Φ <= F` in log
/// form. Slopes and unit increments are read exactly off the profile; the
/// sandwich is sampled on `grid_points` uniform points spanning all
/// breakpoints.
pub fn structural_check(
    raw: &OrliczFunctionSpec,
    smoothed: &OrliczFunctionSpec,
    grid_points: usize,
) -> Result<StructuralReport> {
    let f = raw.as_log_piecewise().ok_or(Error::NotLogPiecewise)?;
    if grid_points < 2 {
        return Err(Error::InvalidArgument("structural grid needs at least 2 points"));
    }
    let (max_unit_increment, max_unit_increment_at) = f.max_window_increment(1.0);
    let lo = -4.0;
    let hi = f.breakpoints()[f.len() - 1] + 4.0;
    let mut report = StructuralReport {
        min_slope: f.min_slope(),
        max_unit_increment,
        max_unit_increment_at,
        sandwich_min: f64::INFINITY,
        sandwich_min_at: lo,
        sandwich_max: f64::NEG_INFINITY,
        sandwich_max_at: lo,
        grid_points,
    };
    for k in 0..grid_points {
        let y = lo + (hi - lo) * k as f64 / (grid_points - 1) as f64;
        let gap = raw.eval_log(y)?.log2() - smoothed.eval_log(y)?.log2();
        if gap < report.sandwich_min {
            report.sandwich_min = gap;
            report.sandwich_min_at = y;
        }
        if gap > report.sandwich_max {
            report.sandwich_max = gap;
            report.sandwich_max_at = y;
        }
    }
    Ok(report)
}
