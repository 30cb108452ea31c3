//! Modulars and Luxemburg norms of disjointly supported simple functions.
//!
//! A [`SimpleFunction`] on `[0, 1]` is a list of atoms, each standing for
//! `mult` disjoint sets of equal measure carrying the same coefficient. The
//! norm `inf { λ > 0 : Σ mult μ F(c / λ) <= 1 }` is found by bisection on
//! `log2 λ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bisect::bisect;
use crate::error::{Error, Result};
use crate::logdomain::Log2Value;
use crate::orlicz::OrliczFunctionSpec;

/// Final bracket width for norms, in `log2 λ`.
pub const NORM_TOL: f64 = 1e-12;

/// Relative offset at which [`NormResult::certify`] probes the modular.
pub const CERTIFICATE_OFFSET: f64 = 1e-9;

/// Slack allowed on `Σ mult μ <= 1`, in `log2` units.
const FIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub coef: Log2Value,
    pub measure: Log2Value,
    pub mult: u64,
}

impl Atom {
    pub fn new(coef: Log2Value, measure: Log2Value) -> Self {
        Self { coef, measure, mult: 1 }
    }

    pub fn with_mult(self, mult: u64) -> Self {
        Self { mult, ..self }
    }

    /// `mult · measure`.
    pub fn total_measure(&self) -> Log2Value {
        self.measure * Log2Value::pow2(libm::log2(self.mult as f64))
    }
}

/// Disjointly supported atoms fitting in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimpleFunction {
    atoms: Vec<Atom>,
}

impl SimpleFunction {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let total: Log2Value = atoms.iter().map(Atom::total_measure).sum();
        if total.log2() > FIT_TOL {
            return Err(Error::FamilyDoesNotFit { index: first_overflow(&atoms) });
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_measure(&self) -> Log2Value {
        self.atoms.iter().map(Atom::total_measure).sum()
    }

    /// `c · f`.
    pub fn scaled(&self, c: Log2Value) -> Self {
        let atoms = self.atoms.iter().map(|a| Atom { coef: a.coef * c, ..*a }).collect();
        Self { atoms }
    }
}

fn first_overflow(atoms: &[Atom]) -> usize {
    let mut acc = Log2Value::ZERO;
    for (k, a) in atoms.iter().enumerate() {
        acc = acc + a.total_measure();
        if acc.log2() > FIT_TOL {
            return k;
        }
    }
    atoms.len().saturating_sub(1)
}

/// `Σ mult μ F(c / λ)`.
pub fn modular_log(spec: &OrliczFunctionSpec, f: &SimpleFunction, lambda: Log2Value) -> Result<Log2Value> {
    atoms_modular(spec, f.atoms(), lambda)
}

fn atoms_modular(spec: &OrliczFunctionSpec, atoms: &[Atom], lambda: Log2Value) -> Result<Log2Value> {
    if lambda.is_zero() {
        return Err(Error::InvalidArgument("modular needs λ > 0"));
    }
    let mut acc = Log2Value::ZERO;
    for a in atoms {
        if a.coef.is_zero() || a.mult == 0 || a.measure.is_zero() {
            continue;
        }
        acc = acc + a.total_measure() * spec.eval(a.coef / lambda)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormResult {
    pub value: Log2Value,
    pub modular_at_value: Log2Value,
    pub iterations: u32,
}

impl NormResult {
    /// The modular is at most 1 just above the value and at least 1 just below.
    pub fn certify(&self, spec: &OrliczFunctionSpec, f: &SimpleFunction) -> Result<bool> {
        certify_atoms(self, spec, f.atoms())
    }
}

fn certify_atoms(n: &NormResult, spec: &OrliczFunctionSpec, atoms: &[Atom]) -> Result<bool> {
    if n.value.is_zero() {
        return Ok(atoms.iter().all(|a| a.coef.is_zero() || a.mult == 0 || a.measure.is_zero()));
    }
    let above = atoms_modular(spec, atoms, n.value.shift(libm::log2(1.0 + CERTIFICATE_OFFSET)))?;
    let below = atoms_modular(spec, atoms, n.value.shift(libm::log2(1.0 - CERTIFICATE_OFFSET)))?;
    Ok(above <= Log2Value::ONE && below >= Log2Value::ONE)
}

/// Luxemburg norm of `f` in `L_F[0, 1]`; the zero function has norm ZERO.
pub fn lux_norm(spec: &OrliczFunctionSpec, f: &SimpleFunction) -> Result<NormResult> {
    atoms_norm(spec, f.atoms())
}

/// Luxemburg norm of a finite sequence in `ℓ_φ`.
pub fn seq_norm(phi: &OrliczFunctionSpec, coeffs: &[Log2Value]) -> Result<NormResult> {
    let atoms: Vec<Atom> = coeffs.iter().map(|&c| Atom::new(c, Log2Value::ONE)).collect();
    atoms_norm(phi, &atoms)
}

fn atoms_norm(spec: &OrliczFunctionSpec, atoms: &[Atom]) -> Result<NormResult> {
    let live: Vec<Atom> =
        atoms.iter().filter(|a| !(a.coef.is_zero() || a.mult == 0 || a.measure.is_zero())).copied().collect();
    if live.is_empty() {
        return Ok(NormResult { value: Log2Value::ZERO, modular_at_value: Log2Value::ZERO, iterations: 0 });
    }
    // each atom alone forces λ >= c / F^{-1}(1 / (mult μ)); all atoms at the
    // largest coefficient bound λ from above
    let mut lo = f64::NEG_INFINITY;
    let mut max_coef = Log2Value::ZERO;
    let mut total = Log2Value::ZERO;
    for a in &live {
        let m = a.total_measure();
        lo = lo.max(a.coef.log2() - spec.inverse_log(m.recip())?);
        max_coef = max_coef.max(a.coef);
        total = total + m;
    }
    let hi = max_coef.log2() - spec.inverse_log(total.recip())?;
    let pad = 1e-6 * (1.0 + hi.abs().max(lo.abs()));
    let (lo, hi) = (lo.min(hi) - pad, hi.max(lo) + pad);
    let fits = |l: f64| Ok(atoms_modular(spec, &live, Log2Value::pow2(l))? <= Log2Value::ONE);
    let b = bisect(lo, hi, NORM_TOL, fits)?;
    let value = Log2Value::pow2(b.mid());
    Ok(NormResult { value, modular_at_value: atoms_modular(spec, &live, value)?, iterations: b.iterations })
}

/// `F^{-1}(1/μ) χ_E` with `m(E) = μ`, of norm 1.
pub fn normalized_char(spec: &OrliczFunctionSpec, measure: Log2Value) -> Result<Atom> {
    match measure.exponent() {
        Some(e) if e <= 0.0 => Ok(Atom::new(Log2Value::pow2(spec.inverse_log(Log2Value::pow2(-e))?), measure)),
        _ => Err(Error::InvalidArgument("normalized characteristic needs 0 < measure <= 1")),
    }
}

/// Normalized characteristic functions of disjoint sets with
/// `m(E_n) = 1 / F(2^{y_n})`; requires `F(t_n) >= 2^n` (1-based).
pub fn disjoint_family(spec: &OrliczFunctionSpec, y_list: &[f64]) -> Result<SimpleFunction> {
    let mut atoms = Vec::with_capacity(y_list.len());
    for (k, &y) in y_list.iter().enumerate() {
        let level = spec.eval_log(y)?;
        if level.log2() < (k + 1) as f64 {
            return Err(Error::FamilyDoesNotFit { index: k });
        }
        atoms.push(Atom::new(Log2Value::pow2(y), level.recip()));
    }
    SimpleFunction::new(atoms)
}

/// `log2 λ*(2^l)` for `l = 1..=L` and the least-squares slope through the
/// origin point `l = 0` included.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub y_t: f64,
    pub log2_lambda: Vec<f64>,
    pub slope: f64,
}

/// Norm of the sum of `m` normalized characteristic functions of measure
/// `1/F(t)`: the modular is `m F(t/λ) / F(t)`, so
/// `log2 λ* = y_t - F^{-1}(F(t) / m)`.
pub fn growth_exponent(spec: &OrliczFunctionSpec, y_t: f64, log2_m_max: u32) -> Result<GrowthFit> {
    let top = spec.eval_log(y_t)?;
    let mut log2_lambda = Vec::with_capacity(log2_m_max as usize);
    for l in 1..=log2_m_max {
        if l as f64 > top.log2() {
            return Err(Error::GrowthOutOfRange { log2_m: l });
        }
        log2_lambda.push(y_t - spec.inverse_log(top.shift(-(l as f64)))?);
    }
    let slope = fit_through(&log2_lambda);
    Ok(GrowthFit { y_t, log2_lambda, slope })
}

/// Least-squares slope of `(l, v_l)` over `(0, 0), (1, v_1), ...`.
fn fit_through(values: &[f64]) -> f64 {
    let n = values.len() as f64 + 1.0;
    let xs = (0..=values.len()).map(|l| l as f64);
    let ys = core::iter::once(0.0).chain(values.iter().copied());
    let (sx, sy, sxx, sxy) =
        xs.zip(ys).fold((0.0, 0.0, 0.0, 0.0), |(sx, sy, sxx, sxy), (x, y)| (sx + x, sy + y, sxx + x * x, sxy + x * y));
    let den = n * sxx - sx * sx;
    if den == 0.0 {
        0.0
    } else {
        (n * sxy - sx * sy) / den
    }
}

/// Replaces each group of atoms by one atom carrying the measure-weighted
/// average coefficient on the union; atoms outside every group follow
/// unchanged, in order.
pub fn avg_projection(f: &SimpleFunction, groups: &[Vec<usize>]) -> Result<SimpleFunction> {
    let atoms = f.atoms();
    let mut used = vec![false; atoms.len()];
    let mut out = Vec::with_capacity(atoms.len());
    for group in groups {
        if group.is_empty() {
            return Err(Error::InvalidArgument("empty projection group"));
        }
        let mut mass = Log2Value::ZERO;
        let mut weighted = Log2Value::ZERO;
        for &k in group {
            let a = atoms.get(k).ok_or(Error::InvalidArgument("projection group index out of range"))?;
            if core::mem::replace(&mut used[k], true) {
                return Err(Error::OverlappingGroups { atom: k });
            }
            let m = a.total_measure();
            mass = mass + m;
            weighted = weighted + m * a.coef;
        }
        let coef = if mass.is_zero() { Log2Value::ZERO } else { weighted / mass };
        out.push(Atom::new(coef, mass));
    }
    out.extend(atoms.iter().zip(&used).filter(|(_, &u)| !u).map(|(a, _)| *a));
    Ok(SimpleFunction { atoms: out })
}

/// `f = u + v` atomwise, with `v` the atoms above the threshold.
///
/// Both parts keep the atom list of `f`; the part not carrying an atom has
/// coefficient ZERO there.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSplit {
    pub u: SimpleFunction,
    pub v: SimpleFunction,
    pub threshold: Log2Value,
    /// `Σ F(|v| / 2)`.
    pub tail_modular: Log2Value,
}

/// Smallest atom coefficient `M` with `∫ F(|f| [|f| > M] / 2) <= ε`.
pub fn truncation_split(spec: &OrliczFunctionSpec, f: &SimpleFunction, eps: Log2Value) -> Result<TruncationSplit> {
    if eps.is_zero() {
        return Err(Error::InvalidArgument("truncation needs ε > 0"));
    }
    let mut levels: Vec<Log2Value> = f.atoms().iter().map(|a| a.coef).collect();
    levels.sort();
    levels.dedup();
    let two = Log2Value::pow2(1.0);
    let split = |m: Log2Value| {
        let (mut u, mut v) = (f.clone(), f.clone());
        for (ua, va) in u.atoms.iter_mut().zip(v.atoms.iter_mut()) {
            if ua.coef > m {
                ua.coef = Log2Value::ZERO;
            } else {
                va.coef = Log2Value::ZERO;
            }
        }
        (u, v)
    };
    // the tail shrinks as M grows, so the first admissible level is the least
    for &m in &levels {
        let (u, v) = split(m);
        let tail_modular = modular_log(spec, &v, two)?;
        if tail_modular <= eps {
            return Ok(TruncationSplit { u, v, threshold: m, tail_modular });
        }
    }
    // only reachable for an atomless f
    let (u, v) = split(Log2Value::ZERO);
    Ok(TruncationSplit { u, v, threshold: Log2Value::ZERO, tail_modular: Log2Value::ZERO })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConjugateProduct {
    /// `s F^{-1}(1/s) G^{-1}(1/s)`.
    Value(Log2Value),
    /// `F` is linear, so its conjugate vanishes on `[0, 1]` and is infinite beyond.
    Degenerate,
}

pub fn conjugate_product_check(
    f: &OrliczFunctionSpec,
    g: &OrliczFunctionSpec,
    s: Log2Value,
) -> Result<ConjugateProduct> {
    let e = match s.exponent() {
        Some(e) if e <= 0.0 => e,
        _ => return Err(Error::InvalidArgument("conjugate product needs 0 < s <= 1")),
    };
    let linear = |spec: &OrliczFunctionSpec| matches!(spec, OrliczFunctionSpec::PowerLaw { p } if *p == 1.0);
    let degenerate = linear(f) || matches!(g, OrliczFunctionSpec::ConjugateOf { inner, .. } if linear(inner));
    if degenerate {
        return Ok(ConjugateProduct::Degenerate);
    }
    let w = Log2Value::pow2(-e);
    Ok(ConjugateProduct::Value(Log2Value::pow2(e + f.inverse_log(w)? + g.inverse_log(w)?)))
}
