//! Library results checked against independently computed values.

use orlicz_core::construction::{pointwise_floor_probe, Construction, Prop3Params};
use orlicz_core::dh::{envelope, ratio_curve, Caps, Verdict};
use orlicz_core::luxemburg::{growth_exponent, lux_norm, seq_norm};
use orlicz_core::{Atom, Log2Value, OrliczFunctionSpec, SimpleFunction};

fn construction() -> Construction {
    Construction::build(Prop3Params::default()).unwrap()
}

/// `∫ (φ - 1)` over `[lo, hi]` by a midpoint rule on an eighth-step grid;
/// exact because every interval endpoint is an integer.
fn excess_by_density(c: &Construction, lo: f64, hi: f64) -> f64 {
    let phi = |s: f64| {
        c.intervals()
            .iter()
            .find(|a| a.lo as f64 <= s && s < a.hi as f64)
            .map_or(1.0, |a| (a.width() + a.excess) as f64 / a.width() as f64)
    };
    let n = ((hi - lo) * 8.0).round() as usize;
    (0..n).map(|k| phi(lo + (k as f64 + 0.5) / 8.0) - 1.0).sum::<f64>() / 8.0
}

#[test]
fn defects_are_minus_previous_r() {
    let c = construction();
    let raw = c.raw_spec();
    for i in 1..=4 {
        let d = c.defect_probe(&raw, i, &[1, 2, 3, 4]).unwrap();
        assert!(d.iter().all(|&x| x == -(c.r(i - 1) as f64)), "i = {i}: {d:?}");
    }
}

#[test]
fn floors_match_density_integral() {
    let c = construction();
    let raw = c.raw_spec();
    let phi = c.smoothed_spec();
    for a in c.intervals() {
        for &(y_t, window) in &[(a.hi, a.width()), (a.hi, a.width() / 2 + 1), (a.hi + 3, a.width() + 2)] {
            let (y, w) = (y_t as f64, window as u32);
            let want = -excess_by_density(&c, y - w as f64, y);
            let got = pointwise_floor_probe(&raw, y, w).unwrap().floor;
            assert!((got - want).abs() < 1e-9, "raw at {y}, R = {w}: {got} vs {want}");
            let smooth = pointwise_floor_probe(&phi, y, w).unwrap().floor;
            assert!((smooth - want).abs() <= 2.0 + 1e-9, "Φ at {y}: {smooth} vs {want}");
        }
    }
}

#[test]
fn power_norms_match_closed_form() {
    // deterministic pseudo-random atoms from a linear congruential stream
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for &p in &[1.0, 1.5, 2.0, 3.0] {
        let spec = OrliczFunctionSpec::power(p).unwrap();
        for _ in 0..200 {
            let n = 1 + (next() * 5.0) as usize;
            let raw: Vec<(f64, f64)> = (0..n).map(|_| (next() * 8.0 - 4.0, next() + 0.01)).collect();
            let total: f64 = raw.iter().map(|r| r.1).sum();
            let atoms: Vec<(f64, f64)> = raw.iter().map(|&(c, w)| (c.exp2(), w / total)).collect();
            let closed = atoms.iter().map(|&(c, mu)| mu * c.powf(p)).sum::<f64>().powf(1.0 / p);
            let f = SimpleFunction::new(
                atoms
                    .iter()
                    .map(|&(c, mu)| Atom::new(Log2Value::from_linear(c).unwrap(), Log2Value::from_linear(mu).unwrap()))
                    .collect(),
            )
            .unwrap();
            let got = lux_norm(&spec, &f).unwrap().value.to_linear().unwrap();
            assert!((got - closed).abs() <= 1e-9 * closed, "p = {p}: {got} vs {closed}");
        }
    }
}

#[test]
fn sequence_norms() {
    let coeffs: Vec<Log2Value> = [3.0, 4.0, 12.0].iter().map(|&x| Log2Value::from_linear(x).unwrap()).collect();
    let l2 = seq_norm(&OrliczFunctionSpec::power(2.0).unwrap(), &coeffs).unwrap();
    assert!((l2.value.to_linear().unwrap() - 13.0).abs() < 1e-8);
}

#[test]
fn growth_is_linear_in_gaps_and_four_fifths_on_third_level() {
    let c = construction();
    let raw = c.raw_spec();
    // [4096, 8186] contains no interval
    let g = growth_exponent(&raw, 8000.0, 1000).unwrap();
    assert!(g.log2_lambda.iter().enumerate().all(|(l, &v)| v == (l + 1) as f64));
    assert_eq!(g.slope, 1.0);
    let y = c.interval(3, 1).unwrap().hi as f64;
    let g = growth_exponent(&raw, y, 30).unwrap();
    for (l, &v) in g.log2_lambda.iter().enumerate() {
        assert!((v - 0.8 * (l + 1) as f64).abs() < 1e-12);
    }
    assert!((g.slope - 0.8).abs() < 1e-6);
}

#[test]
fn envelope_constants_track_defects() {
    let c = construction();
    let phi = c.smoothed_spec();
    let rep = envelope(&phi, 1.0, &c.probe_scales(1), 120, &Caps::default()).unwrap();
    assert_eq!(rep.verdict, Verdict::PointwiseOnly);
    for (i, k) in (1..).zip(&rep.constants) {
        // the curve at depth r_i is read off directly
        let v = ratio_curve(&phi, k.scale, 120).unwrap().values[c.r(i) as usize];
        assert!(k.log2_c >= (v + c.r(i) as f64).abs());
        assert!(k.log2_c >= c.r(i - 1) as f64 - 2.0);
    }
    let phi2 = phi.compose_power(2.0).unwrap();
    let half: Vec<f64> = c.probe_scales(1).iter().map(|y| y / 2.0).collect();
    let rep2 = envelope(&phi2, 2.0, &half, 60, &Caps::default()).unwrap();
    assert_eq!(rep2.verdict, Verdict::PointwiseOnly);
    for (a, b) in rep.constants.iter().zip(&rep2.constants) {
        assert!(b.log2_c <= a.log2_c + 1e-9);
        assert!(b.log2_c >= a.log2_c - 2.0);
    }
}
