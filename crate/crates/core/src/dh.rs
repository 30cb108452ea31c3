//! Finite-scale diagnostics for disjoint homogeneity.
//!
//! The limit sets of `F(u t) / F(t)` as `t -> ∞` are only ever sampled: a
//! [`RatioCurve`] records `v(d) = log2 F(2^{y_t - d}) - log2 F(2^{y_t})` on the
//! dyadic grid `u = 2^{-d}`, `d = 0..=D`, and every verdict below is a
//! statement about the scales and depths it was given.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::logdomain::Log2Value;
use crate::luxemburg::{modular_log, Atom, SimpleFunction};
use crate::orlicz::{OrliczFunctionSpec, PiecewiseLogAffine};

/// Decision thresholds for the envelope and eq8 classifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Caps {
    /// `log2` of the largest equivalence constant still called uniform.
    pub uniform_cap_log2: f64,
    /// Least `log2 G(Ct)/G(t)` on the grid tail for eq8 to hold.
    pub growth_threshold: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Self { uniform_cap_log2: 10.0, growth_threshold: 10.0 }
    }
}

/// `F(u t) / F(t)` at `t = 2^scale`, `u = 2^{-d}`, in `log2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCurve {
    pub scale: f64,
    pub values: Vec<f64>,
}

impl RatioCurve {
    pub fn depth(&self) -> u32 {
        self.values.len() as u32 - 1
    }

    /// `v(0) = 0` and `v` nonincreasing.
    pub fn is_well_formed(&self) -> bool {
        self.values[0] == 0.0 && self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

pub fn ratio_curve(spec: &OrliczFunctionSpec, y_t: f64, depth: u32) -> Result<RatioCurve> {
    if depth == 0 {
        return Err(Error::InvalidArgument("ratio curve depth must be at least 1"));
    }
    let top = spec.eval_log(y_t)?.log2();
    let values = (0..=depth).map(|d| Ok(spec.eval_log(y_t - d as f64)?.log2() - top)).collect::<Result<Vec<_>>>()?;
    Ok(RatioCurve { scale: y_t, values })
}

/// `log2 Σ λ_s F(u t_s) / F(t_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullCurve {
    pub weights: Vec<f64>,
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn convex_combo_curve(spec: &OrliczFunctionSpec, weights: &[f64], scales: &[f64], depth: u32) -> Result<HullCurve> {
    if weights.len() != scales.len() || weights.is_empty() {
        return Err(Error::InvalidArgument("one positive weight per scale"));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidArgument("convex weights must be positive"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightsNotNormalized { sum });
    }
    let mut acc = vec![Log2Value::ZERO; depth as usize + 1];
    for (&w, &y) in weights.iter().zip(scales) {
        let c = ratio_curve(spec, y, depth)?;
        for (a, v) in acc.iter_mut().zip(&c.values) {
            *a = *a + Log2Value::pow2(libm::log2(w) + v);
        }
    }
    Ok(HullCurve { weights: weights.to_vec(), scales: scales.to_vec(), values: acc.iter().map(|v| v.log2()).collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    UniformConsistent,
    PointwiseOnly,
    InconsistentWithExponent,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::UniformConsistent => "uniform-consistent",
            Verdict::PointwiseOnly => "pointwise-only",
            Verdict::InconsistentWithExponent => "inconsistent-with-exponent",
        }
    }
}

/// `log2 C(t) = max_d |v(d) + p d|` at one scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleConstant {
    pub scale: f64,
    pub log2_c: f64,
    pub at_d: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub p: f64,
    pub constants: Vec<ScaleConstant>,
    /// Pointwise minimum of `v(d)` over the schedule.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub curves: Vec<RatioCurve>,
    pub cap_log2: f64,
    pub verdict: Verdict,
}

impl EnvelopeReport {
    pub fn sup_log2_c(&self) -> f64 {
        self.constants.iter().map(|c| c.log2_c).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Compares every sampled curve with `u^p`.
///
/// Uniform-consistent when the largest constant is within the cap;
/// pointwise-only when it exceeds the cap but is attained at the last scale
/// and grew from the first; inconsistent otherwise.
pub fn envelope(
    spec: &OrliczFunctionSpec,
    p: f64,
    schedule: &[f64],
    depth: u32,
    caps: &Caps,
) -> Result<EnvelopeReport> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("envelope needs a nonempty schedule"));
    }
    let curves = schedule.iter().map(|&y| ratio_curve(spec, y, depth)).collect::<Result<Vec<_>>>()?;
    let constants: Vec<ScaleConstant> = curves
        .iter()
        .map(|c| {
            let (at_d, log2_c) = c
                .values
                .iter()
                .enumerate()
                .map(|(d, v)| (d as u32, (v + p * d as f64).abs()))
                .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            ScaleConstant { scale: c.scale, log2_c, at_d }
        })
        .collect();
    let pointwise = |pick: fn(f64, f64) -> f64| -> Vec<f64> {
        (0..=depth as usize).map(|d| curves.iter().map(|c| c.values[d]).reduce(pick).unwrap()).collect()
    };
    let (lower, upper) = (pointwise(f64::min), pointwise(f64::max));
    let sup = constants.iter().map(|c| c.log2_c).fold(f64::NEG_INFINITY, f64::max);
    let first = constants[0].log2_c;
    let last = constants[constants.len() - 1].log2_c;
    let verdict = if sup <= caps.uniform_cap_log2 {
        Verdict::UniformConsistent
    } else if sup.is_finite() && last == sup && last > first {
        Verdict::PointwiseOnly
    } else {
        Verdict::InconsistentWithExponent
    };
    Ok(EnvelopeReport { p, constants, lower, upper, curves, cap_log2: caps.uniform_cap_log2, verdict })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegVar {
    /// Least-squares `p` in `v(d) ≈ -p d` over all sampled curves.
    Order(f64),
    /// Two scales whose curves differ by more than the tolerance at depth `d`.
    NotRegular { scale_a: f64, scale_b: f64, d: u32, gap: f64 },
}

pub fn regvar_order(spec: &OrliczFunctionSpec, schedule: &[f64], depth: u32, tol: f64) -> Result<RegVar> {
    if schedule.len() < 3 {
        return Err(Error::InvalidArgument("regular variation needs at least 3 scales"));
    }
    let curves = schedule.iter().map(|&y| ratio_curve(spec, y, depth)).collect::<Result<Vec<_>>>()?;
    let mut worst: Option<(f64, f64, f64, u32)> = None;
    for d in 0..=depth as usize {
        let (lo, hi) = curves.iter().fold((&curves[0], &curves[0]), |(lo, hi), c| {
            (if c.values[d] < lo.values[d] { c } else { lo }, if c.values[d] > hi.values[d] { c } else { hi })
        });
        let gap = hi.values[d] - lo.values[d];
        if gap > tol && worst.is_none_or(|w| gap > w.2) {
            worst = Some((lo.scale, hi.scale, gap, d as u32));
        }
    }
    if let Some((scale_a, scale_b, gap, d)) = worst {
        return Ok(RegVar::NotRegular { scale_a, scale_b, d, gap });
    }
    let (mut dv, mut dd) = (0.0, 0.0);
    for c in &curves {
        for (d, v) in c.values.iter().enumerate() {
            dv += d as f64 * v;
            dd += (d * d) as f64;
        }
    }
    Ok(RegVar::Order(-dv / dd))
}

/// `G(C t) <= M G(t)` along the witness scales.
#[derive(Debug, Clone, PartialEq)]
pub struct Eq8Witness {
    pub log2_m: f64,
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eq8Verdict {
    pub c: f64,
    /// `log2 G(C t) / G(t)` at every grid point.
    pub ratios: Vec<f64>,
    pub tail_min: f64,
    pub holds: bool,
    pub witness: Option<Eq8Witness>,
}

/// `G(C t) / G(t) -> ∞` at the tested scale: on the second half of the
/// grid the log-ratio stays above the growth threshold and strictly
/// increases. Failures carry the largest tail ratio as the constant `M`.
pub fn eq8_probe(g: &OrliczFunctionSpec, ladder: &[f64], y_grid: &[f64], caps: &Caps) -> Result<Vec<Eq8Verdict>> {
    if y_grid.len() < 2 {
        return Err(Error::InvalidArgument("eq8 grid needs at least 2 points"));
    }
    ladder
        .iter()
        .map(|&c| {
            if !(c > 1.0) {
                return Err(Error::InvalidArgument("eq8 constants must exceed 1"));
            }
            let shift = libm::log2(c);
            let ratios = y_grid
                .iter()
                .map(|&y| Ok(g.eval_log(y + shift)?.log2() - g.eval_log(y)?.log2()))
                .collect::<Result<Vec<_>>>()?;
            let tail_start = y_grid.len() / 2;
            let tail = &ratios[tail_start..];
            let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
            let holds = tail_min > caps.growth_threshold && tail.windows(2).all(|w| w[1] > w[0]);
            let witness = (!holds).then(|| Eq8Witness {
                log2_m: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                scales: y_grid[tail_start..].to_vec(),
            });
            Ok(Eq8Verdict { c, ratios, tail_min, holds, witness })
        })
        .collect()
}

/// Per-atom `μ G(c / 2C_0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySequence {
    pub values: Vec<Log2Value>,
    pub strictly_decreasing: bool,
}

pub fn modular_decay(g: &OrliczFunctionSpec, c0: f64, family: &SimpleFunction) -> Result<DecaySequence> {
    if !(c0 > 0.0) {
        return Err(Error::InvalidArgument("C0 must be positive"));
    }
    let scale = Log2Value::pow2(-1.0 - libm::log2(c0));
    let values =
        family.atoms().iter().map(|a| Ok(a.total_measure() * g.eval(a.coef * scale)?)).collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
    Ok(DecaySequence { values, strictly_decreasing })
}

/// Modular of `Σ_{k<m} C' t_k χ_{E_k}` scaled by `1/C'`, with
/// `m(E_k) = 1 / (M G(t_k))`; equals `m / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualityStress {
    pub c_prime: f64,
    pub log2_m_const: f64,
    /// `(m, log2 modular, log2 (m / M))`.
    pub rows: Vec<(u64, f64, f64)>,
}

impl DualityStress {
    pub fn max_log_error(&self) -> f64 {
        self.rows.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max)
    }
}

pub fn duality_stress(g: &OrliczFunctionSpec, verdict: &Eq8Verdict, m_max: u64) -> Result<DualityStress> {
    let w = verdict.witness.as_ref().ok_or(Error::NoWitness)?;
    if w.scales.is_empty() || m_max == 0 {
        return Err(Error::InvalidArgument("duality stress needs witness scales and m_max >= 1"));
    }
    let c_prime = Log2Value::pow2(libm::log2(verdict.c));
    let sets = w
        .scales
        .iter()
        .map(|&y| {
            let measure = (g.eval_log(y)?.shift(w.log2_m)).recip();
            Ok(Atom::new(Log2Value::pow2(y) * c_prime, measure))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let n = sets.len() as u64;
        let atoms = sets
            .iter()
            .enumerate()
            .map(|(k, a)| a.with_mult(m / n + u64::from((k as u64) < m % n)))
            .filter(|a| a.mult > 0)
            .collect();
        let f = SimpleFunction::new(atoms)?;
        let modular = modular_log(g, &f, c_prime)?;
        rows.push((m, modular.log2(), libm::log2(m as f64) - w.log2_m));
    }
    Ok(DualityStress { c_prime: verdict.c, log2_m_const: w.log2_m, rows })
}

/// The sampled limit function is indistinguishable from one vanishing near
/// zero: `v(D) < D (log2 threshold - 1)`, i.e. the deepest ratio falls below
/// `threshold` per octave times `u`.
pub fn generate_detect(curve: &RatioCurve, threshold: Log2Value) -> bool {
    let d = curve.depth() as f64;
    curve.values[curve.values.len() - 1] < d * (threshold.log2() - 1.0)
}

/// `max |log2 F(2^{a+b}) - log2 F(2^a) - log2 F(2^b)|` over grid pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiMultiplicativity {
    pub max_deviation: f64,
    pub at: (f64, f64),
}

pub fn quasi_multiplicativity(spec: &OrliczFunctionSpec, grid: &[f64]) -> Result<QuasiMultiplicativity> {
    let mut best = QuasiMultiplicativity { max_deviation: 0.0, at: (0.0, 0.0) };
    for (k, &a) in grid.iter().enumerate() {
        for &b in &grid[k..] {
            let dev = (spec.eval_log(a + b)?.log2() - spec.eval_log(a)?.log2() - spec.eval_log(b)?.log2()).abs();
            if dev > best.max_deviation {
                best = QuasiMultiplicativity { max_deviation: dev, at: (a, b) };
            }
        }
    }
    Ok(best)
}

/// `F(2^y) = 2^f(y)` with slope `m` on `[m - 1, m)`, `m = 1..=segments`.
pub fn exp_type(segments: usize) -> Result<OrliczFunctionSpec> {
    if segments == 0 {
        return Err(Error::InvalidArgument("exp-type profile needs at least one segment"));
    }
    let bps = (0..segments).map(|m| m as f64).collect();
    let slopes = (1..=segments).map(|m| m as f64).collect();
    Ok(OrliczFunctionSpec::LogPiecewise(PiecewiseLogAffine::new(bps, slopes)?))
}
