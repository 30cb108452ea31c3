//! Executes configured suites in declaration order.

use orlicz_core::construction::pointwise_floor_probe;
use orlicz_core::dh::{self, Caps, RegVar};
use orlicz_core::luxemburg::{
    avg_projection, conjugate_product_check, disjoint_family, growth_exponent, lux_norm, truncation_split,
    ConjugateProduct,
};
use orlicz_core::{Log2Value, OrliczFunctionSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{LoadedConfig, SuiteDef};
use crate::report::{sig12, Check, Report, SuiteReport, Table};
use crate::trials::{random_groups, random_simple_function};

/// Log-domain slack for "equal" comparisons.
const LOG_TOL: f64 = 1e-9;

type SuiteResult = Result<(Vec<Check>, serde_json::Value, Vec<Table>), orlicz_core::Error>;

pub fn run(loaded: &LoadedConfig, seed: u64) -> Report {
    let caps: Caps = loaded.config.caps.into();
    let mut suites = Vec::with_capacity(loaded.config.suites.len());
    for (n, def) in loaded.config.suites.iter().enumerate() {
        let index = n + 1;
        let suite_seed = seed.wrapping_add(index as u64);
        let (checks, measured, tables) = match run_suite(loaded, def, &caps, suite_seed) {
            Ok(out) => out,
            Err(e) => (vec![Check::new("error", false, e.to_string())], serde_json::Value::Null, Vec::new()),
        };
        suites.push(SuiteReport {
            index,
            kind: def.kind().to_owned(),
            function: def.function().to_owned(),
            checks,
            measured,
            tables,
        });
    }
    let first_failure = suites.iter().find_map(|s| {
        s.checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| format!("suite {} ({} {}) {}: {}", s.index, s.kind, s.function, c.anchor, c.detail))
    });
    Report { seed, passed: first_failure.is_none(), first_failure, suites }
}

fn run_suite(loaded: &LoadedConfig, def: &SuiteDef, caps: &Caps, seed: u64) -> SuiteResult {
    let spec = &loaded.function(def.function()).spec;
    let schedule = |s| loaded.schedule(s).expect("schedules validated at load");
    let construction = |name: &str| loaded.construction(name).expect("constructions validated at load");
    match def {
        SuiteDef::Structural { function, grid_points } => structural(construction(function), *grid_points),
        SuiteDef::Defect { function } => defect(construction(function)),
        SuiteDef::Floor { function, scales, window } => floor(construction(function), &schedule(scales), *window),
        SuiteDef::Envelope { p, schedule: s, depth, expect, .. } => {
            envelope(spec, *p, &schedule(s), *depth, expect.as_deref(), caps)
        }
        SuiteDef::Regvar { schedule: s, depth, tol, expect, order, .. } => {
            regvar(spec, &schedule(s), *depth, *tol, expect.as_deref(), *order)
        }
        SuiteDef::Eq8 { ladder, grid, expect, .. } => eq8(spec, ladder, &grid.points(), expect.as_deref(), caps),
        SuiteDef::Eq9 { c0, scales, expect_decay, .. } => eq9(spec, *c0, scales, *expect_decay),
        SuiteDef::DualityStress { c_prime, grid, m_max, .. } => duality(spec, *c_prime, &grid.points(), *m_max, caps),
        SuiteDef::Growth { y_t, log2_m_max, expect_slope, tol, .. } => {
            growth(spec, *y_t, *log2_m_max, *expect_slope, *tol)
        }
        SuiteDef::ConjugateProduct { cap_log2, k_max, .. } => conjugate_product(spec, *cap_log2, *k_max),
        SuiteDef::Projection { trials, .. } => projection(spec, *trials, seed),
        SuiteDef::Truncation { trials, eps_log2, .. } => truncation(spec, *trials, *eps_log2, seed),
    }
}

fn structural(c: &orlicz_core::Construction, grid_points: usize) -> SuiteResult {
    let rep = c.structural_check(&c.smoothed_spec(), grid_points)?;
    let checks = vec![
        Check::new("eq6", rep.eq6(), format!("min slope {} (needs >= 1)", sig12(rep.min_slope))),
        Check::new(
            "eq7",
            rep.eq7(),
            format!(
                "max unit log-increment {} at y = {} (needs <= 2)",
                sig12(rep.max_unit_increment),
                sig12(rep.max_unit_increment_at)
            ),
        ),
        Check::new(
            "eq7a",
            rep.eq7a(),
            format!(
                "log2 F - log2 Φ in [{}, {}], extremes at y = {} and y = {} (needs [0, 2])",
                sig12(rep.sandwich_min),
                sig12(rep.sandwich_max),
                sig12(rep.sandwich_min_at),
                sig12(rep.sandwich_max_at)
            ),
        ),
        Check::new("eq2", c.schedule_ok(), format!("r schedule and gaps {:?}", c.gaps())),
    ];
    let mut intervals = Table::new("intervals", &["i", "j", "k", "lo", "hi", "slope"]);
    for a in c.intervals() {
        intervals.rows.push(vec![a.i as f64, a.j as f64, a.k as f64, a.lo as f64, a.hi as f64, a.slope()]);
    }
    let measured = json!({
        "min_slope": rep.min_slope,
        "max_unit_increment": rep.max_unit_increment,
        "max_unit_increment_at": rep.max_unit_increment_at,
        "sandwich_min": rep.sandwich_min,
        "sandwich_max": rep.sandwich_max,
        "grid_points": rep.grid_points,
        "intervals": c.intervals().len(),
        "gaps": c.gaps(),
    });
    Ok((checks, measured, vec![intervals]))
}

fn defect(c: &orlicz_core::Construction) -> SuiteResult {
    let (raw, phi) = (c.raw_spec(), c.smoothed_spec());
    let js: Vec<usize> = (1..=c.params().j_max).collect();
    let mut table = Table::new("defects", &["i", "r_prev", "raw_min", "raw_max", "smoothed_min", "smoothed_max"]);
    let mut checks = Vec::new();
    let mut raw_table = Vec::new();
    for i in 1..=c.params().i_max {
        let want = -(c.r(i - 1) as f64);
        let d_raw = c.defect_probe(&raw, i, &js)?;
        let d_phi = c.defect_probe(&phi, i, &js)?;
        let exact = d_raw.iter().all(|&d| d == want);
        let near = d_phi.iter().all(|&d| (d - want).abs() <= 2.0 + LOG_TOL);
        let (lo, hi) = min_max(&d_raw);
        let (plo, phi_hi) = min_max(&d_phi);
        checks.push(Check::new(
            "eq3",
            exact && near,
            format!(
                "i = {i}: raw defects [{}, {}], smoothed [{}, {}], expected {} (smoothed within 2)",
                sig12(lo),
                sig12(hi),
                sig12(plo),
                sig12(phi_hi),
                sig12(want)
            ),
        ));
        table.rows.push(vec![i as f64, -want, lo, hi, plo, phi_hi]);
        raw_table.push(lo);
    }
    Ok((checks, json!({ "raw_defects": raw_table }), vec![table]))
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

fn floor(c: &orlicz_core::Construction, scales: &[f64], window: u32) -> SuiteResult {
    let (raw, phi) = (c.raw_spec(), c.smoothed_spec());
    let mut table = Table::new("floors", &["scale", "window", "raw_floor", "window_excess", "smoothed_floor"]);
    let mut checks = Vec::new();
    for &y in scales {
        let r = window.min(y.floor() as u32).max(1);
        let raw_floor = pointwise_floor_probe(&raw, y, r)?.floor;
        let excess = c.window_excess(y - r as f64, y);
        let smooth = pointwise_floor_probe(&phi, y, r)?.floor;
        let ok = (raw_floor + excess).abs() <= LOG_TOL && (smooth - raw_floor).abs() <= 2.0 + LOG_TOL;
        checks.push(Check::new(
            "eq4",
            ok,
            format!(
                "y = {}, R = {r}: raw floor {} vs -excess {}, smoothed {}",
                sig12(y),
                sig12(raw_floor),
                sig12(-excess),
                sig12(smooth)
            ),
        ));
        table.rows.push(vec![y, r as f64, raw_floor, excess, smooth]);
    }
    Ok((checks, serde_json::Value::Null, vec![table]))
}

fn envelope(
    spec: &OrliczFunctionSpec,
    p: f64,
    schedule: &[f64],
    depth: u32,
    expect: Option<&str>,
    caps: &Caps,
) -> SuiteResult {
    let rep = dh::envelope(spec, p, schedule, depth, caps)?;
    let mut checks = vec![Check::new(
        "eq1",
        rep.constants.iter().all(|k| k.log2_c >= 0.0),
        format!("sup log2 C(t) = {} over {} scales", sig12(rep.sup_log2_c()), schedule.len()),
    )];
    if let Some(want) = expect {
        checks.push(Check::new(
            "verdict",
            rep.verdict.tag() == want,
            format!("verdict {} (expected {want})", rep.verdict.tag()),
        ));
    }
    let mut curves = Table::new("curves", &["scale", "d", "u_log2", "v_log2"]);
    for c in &rep.curves {
        for (d, &v) in c.values.iter().enumerate() {
            curves.rows.push(vec![c.scale, d as f64, -(d as f64), v]);
        }
    }
    let mut constants = Table::new("constants", &["scale", "log2_c", "at_d"]);
    for k in &rep.constants {
        constants.rows.push(vec![k.scale, k.log2_c, k.at_d as f64]);
    }
    let mut env = Table::new("envelope", &["d", "lower", "upper"]);
    for d in 0..rep.lower.len() {
        env.rows.push(vec![d as f64, rep.lower[d], rep.upper[d]]);
    }
    let measured = json!({
        "p": p,
        "verdict": rep.verdict.tag(),
        "sup_log2_c": rep.sup_log2_c(),
        "cap_log2": rep.cap_log2,
        "log2_c": rep.constants.iter().map(|k| k.log2_c).collect::<Vec<_>>(),
    });
    Ok((checks, measured, vec![curves, constants, env]))
}

fn regvar(
    spec: &OrliczFunctionSpec,
    schedule: &[f64],
    depth: u32,
    tol: f64,
    expect: Option<&str>,
    order: Option<f64>,
) -> SuiteResult {
    let r = dh::regvar_order(spec, schedule, depth, tol)?;
    let (tag, measured) = match &r {
        RegVar::Order(p) => ("order", json!({ "order": p })),
        RegVar::NotRegular { scale_a, scale_b, d, gap } => {
            ("not-regular", json!({ "scale_a": scale_a, "scale_b": scale_b, "d": d, "gap": gap }))
        }
    };
    let mut ok = expect.is_none_or(|e| e == tag);
    if let (Some(want), RegVar::Order(p)) = (order, &r) {
        ok &= (p - want).abs() <= LOG_TOL;
    }
    let detail = match &r {
        RegVar::Order(p) => format!("order {}", sig12(*p)),
        RegVar::NotRegular { scale_a, scale_b, d, gap } => {
            format!(
                "curves at y = {} and y = {} differ by {} at d = {d}",
                sig12(*scale_a),
                sig12(*scale_b),
                sig12(*gap)
            )
        }
    };
    Ok((vec![Check::new("regvar", ok, detail)], measured, Vec::new()))
}

fn eq8(spec: &OrliczFunctionSpec, ladder: &[f64], grid: &[f64], expect: Option<&str>, caps: &Caps) -> SuiteResult {
    let verdicts = dh::eq8_probe(spec, ladder, grid, caps)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for v in &verdicts {
        let tag = if v.holds { "holds" } else { "fails" };
        let ok = expect.is_none_or(|e| e == tag);
        checks.push(Check::new(
            "eq8",
            ok,
            format!("C = {}: {tag}, tail min log2 G(Ct)/G(t) = {}", sig12(v.c), sig12(v.tail_min)),
        ));
        rows.push(json!({ "c": v.c, "verdict": tag, "tail_min": v.tail_min,
            "witness_log2_m": v.witness.as_ref().map(|w| w.log2_m) }));
    }
    Ok((checks, json!(rows), Vec::new()))
}

fn eq9(spec: &OrliczFunctionSpec, c0: f64, scales: &[f64], expect_decay: bool) -> SuiteResult {
    let family = disjoint_family(spec, scales)?;
    let seq = dh::modular_decay(spec, c0, &family)?;
    let below = seq.values.iter().enumerate().all(|(n, v)| v.log2() < -((n + 1) as f64));
    let decays = seq.strictly_decreasing && below;
    let logs: Vec<f64> = seq.values.iter().map(|v| v.log2()).collect();
    let check = Check::new(
        "eq9",
        decays == expect_decay,
        format!(
            "decay {} (expected {expect_decay}); last log2 modular {}",
            decays,
            logs.last().map_or("none".into(), |&v| sig12(v))
        ),
    );
    let mut table = Table::new("decay", &["n", "scale", "modular_log2"]);
    for (n, (&y, &v)) in scales.iter().zip(&logs).enumerate() {
        table.rows.push(vec![(n + 1) as f64, y, v]);
    }
    Ok((vec![check], json!({ "modular_log2": logs }), vec![table]))
}

fn duality(spec: &OrliczFunctionSpec, c_prime: f64, grid: &[f64], m_max: u64, caps: &Caps) -> SuiteResult {
    let verdict = &dh::eq8_probe(spec, &[c_prime], grid, caps)?[0];
    let stress = dh::duality_stress(spec, verdict, m_max)?;
    let err = stress.max_log_error();
    let check = Check::new(
        "eq12",
        err <= (1.0 + LOG_TOL).log2(),
        format!("modular of m-fold sum vs m/M, M = 2^{}: max log2 error {}", sig12(stress.log2_m_const), sig12(err)),
    );
    let mut table = Table::new("stress", &["m", "modular_log2", "expected_log2"]);
    for &(m, got, want) in &stress.rows {
        table.rows.push(vec![m as f64, got, want]);
    }
    Ok((vec![check], json!({ "log2_m_const": stress.log2_m_const, "max_log_error": err }), vec![table]))
}

fn growth(spec: &OrliczFunctionSpec, y_t: f64, log2_m_max: u32, expect: Option<f64>, tol: f64) -> SuiteResult {
    let fit = growth_exponent(spec, y_t, log2_m_max)?;
    let ok = expect.is_none_or(|s| (fit.slope - s).abs() <= tol);
    let check = Check::new(
        "eq1new",
        ok,
        format!(
            "fitted slope {} at y = {} over log2 m <= {log2_m_max}{}",
            sig12(fit.slope),
            sig12(y_t),
            expect.map_or(String::new(), |s| format!(" (expected {})", sig12(s)))
        ),
    );
    let mut table = Table::new("growth", &["log2_m", "log2_lambda"]);
    for (l, &v) in fit.log2_lambda.iter().enumerate() {
        table.rows.push(vec![(l + 1) as f64, v]);
    }
    Ok((vec![check], json!({ "slope": fit.slope }), vec![table]))
}

fn conjugate_product(spec: &OrliczFunctionSpec, cap_log2: f64, k_max: u32) -> SuiteResult {
    let g = spec.conjugate(Log2Value::pow2(cap_log2))?;
    let mut table = Table::new("products", &["k", "product"]);
    let mut worst: Option<(u32, f64)> = None;
    let mut degenerate = false;
    for k in 0..=k_max {
        match conjugate_product_check(spec, &g, Log2Value::pow2(-(k as f64)))? {
            ConjugateProduct::Degenerate => {
                degenerate = true;
                break;
            }
            ConjugateProduct::Value(v) => {
                let e = v.log2();
                table.rows.push(vec![k as f64, e.exp2()]);
                let outside = (-e).max(e - 1.0);
                if outside > LOG_TOL && worst.is_none_or(|w| outside > w.1) {
                    worst = Some((k, outside));
                }
            }
        }
    }
    let detail = if degenerate {
        "degenerate conjugate, skipped".to_owned()
    } else {
        match worst {
            None => format!("s F^-1(1/s) G^-1(1/s) within [1, 2] for s = 2^-k, k <= {k_max}"),
            Some((k, e)) => format!("product leaves [1, 2] by 2^{} at s = 2^-{k}", sig12(e)),
        }
    };
    let measured = json!({ "degenerate": degenerate, "band": [1.0, 2.0], "alt_band": [0.5, 1.0] });
    Ok((vec![Check::new("eq9a", worst.is_none(), detail)], measured, vec![table]))
}

fn projection(spec: &OrliczFunctionSpec, trials: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let f = random_simple_function(&mut rng);
        let groups = random_groups(&mut rng, f.atoms().len());
        let pf = avg_projection(&f, &groups)?;
        let gain = lux_norm(spec, &pf)?.value.log2() - lux_norm(spec, &f)?.value.log2();
        worst = worst.max(gain);
    }
    let check = Check::new(
        "projection",
        worst <= LOG_TOL,
        format!("max log2 ||Pf|| / ||f|| over {trials} trials: {}", sig12(worst)),
    );
    Ok((vec![check], json!({ "max_log_gain": worst }), Vec::new()))
}

fn truncation(spec: &OrliczFunctionSpec, trials: usize, eps_log2: f64, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_tail = f64::NEG_INFINITY;
    let mut exact = true;
    for _ in 0..trials {
        let f = random_simple_function(&mut rng);
        let f = f.scaled(lux_norm(spec, &f)?.value.recip());
        let s = truncation_split(spec, &f, Log2Value::pow2(eps_log2))?;
        worst_tail = worst_tail.max(s.tail_modular.log2());
        exact &= f
            .atoms()
            .iter()
            .zip(s.u.atoms().iter().zip(s.v.atoms()))
            .all(|(a, (u, v))| (u.coef.is_zero() || v.coef.is_zero()) && u.coef + v.coef == a.coef);
    }
    let check = Check::new(
        "lemma_truncation",
        worst_tail <= eps_log2 && exact,
        format!(
            "max tail log2 modular {} (needs <= {}), atomwise recomposition {}",
            sig12(worst_tail),
            sig12(eps_log2),
            if exact { "exact" } else { "broken" }
        ),
    );
    Ok((vec![check], json!({ "max_tail_log2": worst_tail, "exact": exact }), Vec::new()))
}
