//! TOML suite configuration and function resolution.

use std::collections::BTreeMap;
use std::path::Path;
use std::rc::Rc;

use orlicz_core::construction::{GapRule, RRule};
use orlicz_core::dh::{exp_type, Caps};
use orlicz_core::{Construction, Log2Value, OrliczFunctionSpec, Prop3Params};
use serde::Deserialize;

use crate::error::LabError;
use crate::spec_json::SpecJson;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub caps: CapsDef,
    #[serde(default)]
    pub output: OutputDef,
    pub functions: BTreeMap<String, FunctionDef>,
    #[serde(rename = "suite", default)]
    pub suites: Vec<SuiteDef>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsDef {
    #[serde(default = "ten")]
    pub uniform_cap_log2: f64,
    #[serde(default = "ten")]
    pub growth_threshold: f64,
}

fn ten() -> f64 {
    10.0
}

impl Default for CapsDef {
    fn default() -> Self {
        Self { uniform_cap_log2: 10.0, growth_threshold: 10.0 }
    }
}

impl From<CapsDef> for Caps {
    fn from(c: CapsDef) -> Self {
        Caps { uniform_cap_log2: c.uniform_cap_log2, growth_threshold: c.growth_threshold }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDef {
    pub dir: Option<String>,
    pub format: Option<Format>,
}

/// One named function: a base (exactly one of `prop3`, `power`, `exp_type`,
/// `json`, `of`) followed by optional transforms applied in the order
/// smooth, compose_power, conjugate.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDef {
    pub prop3: Option<Prop3Def>,
    pub power: Option<f64>,
    pub exp_type: Option<usize>,
    pub json: Option<String>,
    pub of: Option<String>,
    #[serde(default)]
    pub smooth: bool,
    pub compose_power: Option<f64>,
    pub conjugate_cap_log2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prop3Def {
    /// `r_0, r_1, ...`; factorial when absent.
    pub r: Option<Vec<u64>>,
    #[serde(default = "four")]
    pub i_max: usize,
    #[serde(default = "four")]
    pub j_max: usize,
    pub gaps: Option<Vec<u64>>,
    #[serde(default = "fifty")]
    pub k_cap: u32,
}

fn four() -> usize {
    4
}

fn fifty() -> u32 {
    50
}

impl From<&Prop3Def> for Prop3Params {
    fn from(d: &Prop3Def) -> Self {
        Prop3Params {
            r_rule: d.r.clone().map_or(RRule::Factorial, RRule::Explicit),
            i_max: d.i_max,
            j_max: d.j_max,
            gap_rule: d.gaps.clone().map_or(GapRule::Linear, GapRule::Explicit),
            k_cap: d.k_cap,
        }
    }
}

/// Scale schedule: explicit `log2 t` values, or the probe scales
/// `2^{k_i^j}` of a construction, multiplied by `factor`, after `prepend`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Explicit(Vec<f64>),
    Probe {
        probe: String,
        #[serde(default = "first")]
        j: usize,
        #[serde(default = "unit")]
        factor: f64,
        #[serde(default)]
        prepend: Vec<f64>,
    },
}

fn first() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDef {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GridDef {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuiteDef {
    Structural {
        function: String,
        #[serde(default = "thousand")]
        grid_points: usize,
    },
    Defect {
        function: String,
    },
    Floor {
        function: String,
        scales: Schedule,
        window: u32,
    },
    Envelope {
        function: String,
        p: f64,
        schedule: Schedule,
        depth: u32,
        expect: Option<String>,
    },
    Regvar {
        function: String,
        schedule: Schedule,
        depth: u32,
        #[serde(default = "tiny")]
        tol: f64,
        expect: Option<String>,
        order: Option<f64>,
    },
    Eq8 {
        function: String,
        ladder: Vec<f64>,
        grid: GridDef,
        expect: Option<String>,
    },
    Eq9 {
        function: String,
        c0: f64,
        scales: Vec<f64>,
        #[serde(default = "yes")]
        expect_decay: bool,
    },
    DualityStress {
        function: String,
        c_prime: f64,
        grid: GridDef,
        m_max: u64,
    },
    Growth {
        function: String,
        y_t: f64,
        log2_m_max: u32,
        expect_slope: Option<f64>,
        #[serde(default = "micro")]
        tol: f64,
    },
    ConjugateProduct {
        function: String,
        #[serde(default = "sixty_four")]
        cap_log2: f64,
        #[serde(default = "forty")]
        k_max: u32,
    },
    Projection {
        function: String,
        #[serde(default = "thousand")]
        trials: usize,
    },
    Truncation {
        function: String,
        #[serde(default = "thousand")]
        trials: usize,
        #[serde(default = "minus_three")]
        eps_log2: f64,
    },
}

fn yes() -> bool {
    true
}

fn thousand() -> usize {
    1000
}

fn tiny() -> f64 {
    1e-9
}

fn micro() -> f64 {
    1e-6
}

fn sixty_four() -> f64 {
    64.0
}

fn forty() -> u32 {
    40
}

fn minus_three() -> f64 {
    -3.0
}

impl SuiteDef {
    pub fn kind(&self) -> &'static str {
        match self {
            SuiteDef::Structural { .. } => "structural",
            SuiteDef::Defect { .. } => "defect",
            SuiteDef::Floor { .. } => "floor",
            SuiteDef::Envelope { .. } => "envelope",
            SuiteDef::Regvar { .. } => "regvar",
            SuiteDef::Eq8 { .. } => "eq8",
            SuiteDef::Eq9 { .. } => "eq9",
            SuiteDef::DualityStress { .. } => "duality_stress",
            SuiteDef::Growth { .. } => "growth",
            SuiteDef::ConjugateProduct { .. } => "conjugate_product",
            SuiteDef::Projection { .. } => "projection",
            SuiteDef::Truncation { .. } => "truncation",
        }
    }

    pub fn function(&self) -> &str {
        match self {
            SuiteDef::Structural { function, .. }
            | SuiteDef::Defect { function }
            | SuiteDef::Floor { function, .. }
            | SuiteDef::Envelope { function, .. }
            | SuiteDef::Regvar { function, .. }
            | SuiteDef::Eq8 { function, .. }
            | SuiteDef::Eq9 { function, .. }
            | SuiteDef::DualityStress { function, .. }
            | SuiteDef::Growth { function, .. }
            | SuiteDef::ConjugateProduct { function, .. }
            | SuiteDef::Projection { function, .. }
            | SuiteDef::Truncation { function, .. } => function,
        }
    }
}

/// A resolved function together with the construction it derives from, if any.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: OrliczFunctionSpec,
    pub construction: Option<Rc<Construction>>,
}

/// Parsed and resolved configuration.
#[derive(Debug)]
pub struct LoadedConfig {
    pub config: SuiteConfig,
    pub functions: BTreeMap<String, Resolved>,
}

impl LoadedConfig {
    pub fn function(&self, name: &str) -> &Resolved {
        &self.functions[name]
    }

    pub fn schedule(&self, s: &Schedule) -> Result<Vec<f64>, LabError> {
        match s {
            Schedule::Explicit(v) => Ok(v.clone()),
            Schedule::Probe { probe, j, factor, prepend } => {
                let c = self.construction(probe)?;
                let mut out = prepend.clone();
                out.extend(c.probe_scales(*j).iter().map(|y| y * factor));
                Ok(out)
            }
        }
    }

    pub fn construction(&self, name: &str) -> Result<&Construction, LabError> {
        self.functions
            .get(name)
            .and_then(|r| r.construction.as_deref())
            .ok_or_else(|| LabError::Config(format!("function `{name}` is not built from a prop3 construction")))
    }
}

pub fn parse(text: &str) -> Result<SuiteConfig, LabError> {
    toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
}

pub fn load(path: &Path) -> Result<LoadedConfig, LabError> {
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Io { path: path.to_owned(), source })?;
    let config = parse(&text).map_err(|e| match e {
        LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    resolve(config)
}

pub fn resolve(config: SuiteConfig) -> Result<LoadedConfig, LabError> {
    let mut functions = BTreeMap::new();
    for name in config.functions.keys() {
        resolve_one(name, &config.functions, &mut functions, &mut Vec::new())?;
    }
    let loaded = LoadedConfig { config, functions };
    for (n, suite) in loaded.config.suites.iter().enumerate() {
        let name = suite.function();
        if !loaded.functions.contains_key(name) {
            return Err(LabError::Config(format!(
                "suite {} ({}) references unknown function `{name}`",
                n + 1,
                suite.kind()
            )));
        }
        let needs_construction =
            matches!(suite, SuiteDef::Structural { .. } | SuiteDef::Defect { .. } | SuiteDef::Floor { .. });
        if needs_construction {
            loaded.construction(name)?;
        }
        for s in suite_schedules(suite) {
            loaded.schedule(s)?;
        }
    }
    Ok(loaded)
}

fn suite_schedules(suite: &SuiteDef) -> Vec<&Schedule> {
    match suite {
        SuiteDef::Floor { scales, .. } => vec![scales],
        SuiteDef::Envelope { schedule, .. } | SuiteDef::Regvar { schedule, .. } => vec![schedule],
        _ => vec![],
    }
}

fn resolve_one(
    name: &str,
    defs: &BTreeMap<String, FunctionDef>,
    done: &mut BTreeMap<String, Resolved>,
    stack: &mut Vec<String>,
) -> Result<Resolved, LabError> {
    if let Some(r) = done.get(name) {
        return Ok(r.clone());
    }
    if stack.iter().any(|s| s == name) {
        return Err(LabError::Config(format!("function `{name}` refers to itself")));
    }
    let def = defs.get(name).ok_or_else(|| LabError::Config(format!("unknown function `{name}`")))?;
    let bad = |what: String| LabError::Config(format!("function `{name}`: {what}"));
    let bases =
        [def.prop3.is_some(), def.power.is_some(), def.exp_type.is_some(), def.json.is_some(), def.of.is_some()];
    if bases.iter().filter(|&&b| b).count() != 1 {
        return Err(bad("exactly one of prop3, power, exp_type, json, of is required".into()));
    }
    stack.push(name.to_owned());
    let mut r = if let Some(p) = &def.prop3 {
        let c = Construction::build(p.into()).map_err(|e| bad(e.to_string()))?;
        Resolved { spec: c.raw_spec(), construction: Some(Rc::new(c)) }
    } else if let Some(p) = def.power {
        Resolved { spec: OrliczFunctionSpec::power(p).map_err(|e| bad(e.to_string()))?, construction: None }
    } else if let Some(n) = def.exp_type {
        Resolved { spec: exp_type(n).map_err(|e| bad(e.to_string()))?, construction: None }
    } else if let Some(text) = &def.json {
        let j: SpecJson = serde_json::from_str(text).map_err(|e| bad(format!("spec json: {e}")))?;
        let spec = OrliczFunctionSpec::try_from(&j).map_err(|e| bad(e.to_string()))?;
        Resolved { spec, construction: None }
    } else {
        let inner = def.of.as_deref().unwrap_or_default();
        resolve_one(inner, defs, done, stack)?
    };
    stack.pop();
    if def.smooth {
        r.spec = r.spec.smooth_to_convex().map_err(|e| bad(e.to_string()))?;
    }
    if let Some(p) = def.compose_power {
        r.spec = r.spec.compose_power(p).map_err(|e| bad(e.to_string()))?;
    }
    if let Some(cap) = def.conjugate_cap_log2 {
        r.spec = r.spec.conjugate(Log2Value::pow2(cap)).map_err(|e| bad(e.to_string()))?;
    }
    done.insert(name.to_owned(), r.clone());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_chains() {
        let cfg = parse(
            r#"
            [functions.F]
            prop3 = { i_max = 2, j_max = 2 }
            [functions.Phi]
            of = "F"
            smooth = true
            [functions.P]
            json = '{"kind": "power", "p": 2}'
            [[suite]]
            type = "structural"
            function = "Phi"
            "#,
        )
        .unwrap();
        let loaded = resolve(cfg).unwrap();
        assert_eq!(loaded.function("Phi").spec.kind(), "integral_smoothed");
        assert!(loaded.construction("Phi").is_ok());
        assert!(loaded.construction("P").is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse("seed = 0\n[functions.F\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn rejects_unknown_references_and_cycles() {
        let cfg = parse("[functions.A]\nof = \"B\"\n[functions.B]\nof = \"A\"\n").unwrap();
        assert!(resolve(cfg).is_err());
        let cfg = parse("[functions.A]\npower = 2.0\n[[suite]]\ntype = \"defect\"\nfunction = \"Z\"\n").unwrap();
        assert!(resolve(cfg).unwrap_err().to_string().contains("unknown function"));
    }

    #[test]
    fn grid_points_include_end() {
        let g = GridDef { start: 0.0, end: 1.0, step: 0.25 };
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
