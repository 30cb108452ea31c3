//! JSON forms of Orlicz function specs and simple functions.
//!
//! Log-domain values travel as their exponent, with `null` for zero. All
//! numbers go through `f64` unchanged, so a spec survives a round trip
//! bit for bit.

use orlicz_core::orlicz::SmoothedPiecewise;
use orlicz_core::{Atom, Log2Value, OrliczFunctionSpec, PiecewiseLogAffine, SimpleFunction};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecJson {
    Power { p: f64 },
    LogPiecewise(ProfileJson),
    PowerComposition { inner: Box<SpecJson>, p: f64 },
    IntegralSmoothed { source: ProfileJson },
    Conjugate { inner: Box<SpecJson>, range_cap_log2: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub head_slope: f64,
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
    pub values: Vec<f64>,
}

impl From<&PiecewiseLogAffine> for ProfileJson {
    fn from(f: &PiecewiseLogAffine) -> Self {
        Self {
            head_slope: f.head_slope(),
            breakpoints: f.breakpoints().to_vec(),
            slopes: f.slopes().to_vec(),
            values: f.knot_values().to_vec(),
        }
    }
}

impl TryFrom<&ProfileJson> for PiecewiseLogAffine {
    type Error = orlicz_core::Error;

    fn try_from(p: &ProfileJson) -> Result<Self, Self::Error> {
        PiecewiseLogAffine::from_parts(p.head_slope, p.breakpoints.clone(), p.slopes.clone(), p.values.clone())
    }
}

impl From<&OrliczFunctionSpec> for SpecJson {
    fn from(spec: &OrliczFunctionSpec) -> Self {
        match spec {
            OrliczFunctionSpec::PowerLaw { p } => SpecJson::Power { p: *p },
            OrliczFunctionSpec::LogPiecewise(f) => SpecJson::LogPiecewise(f.into()),
            OrliczFunctionSpec::PowerComposition { inner, p } => {
                SpecJson::PowerComposition { inner: Box::new(inner.as_ref().into()), p: *p }
            }
            OrliczFunctionSpec::IntegralSmoothed(s) => SpecJson::IntegralSmoothed { source: s.source().into() },
            OrliczFunctionSpec::ConjugateOf { inner, range_cap } => {
                SpecJson::Conjugate { inner: Box::new(inner.as_ref().into()), range_cap_log2: range_cap.exponent() }
            }
        }
    }
}

impl TryFrom<&SpecJson> for OrliczFunctionSpec {
    type Error = orlicz_core::Error;

    fn try_from(j: &SpecJson) -> Result<Self, Self::Error> {
        Ok(match j {
            SpecJson::Power { p } => OrliczFunctionSpec::power(*p)?,
            SpecJson::LogPiecewise(f) => OrliczFunctionSpec::LogPiecewise(f.try_into()?),
            SpecJson::PowerComposition { inner, p } => {
                OrliczFunctionSpec::try_from(inner.as_ref())?.compose_power(*p)?
            }
            SpecJson::IntegralSmoothed { source } => {
                OrliczFunctionSpec::IntegralSmoothed(SmoothedPiecewise::new(source.try_into()?))
            }
            SpecJson::Conjugate { inner, range_cap_log2 } => {
                let cap = range_cap_log2.map_or(Log2Value::ZERO, Log2Value::pow2);
                OrliczFunctionSpec::try_from(inner.as_ref())?.conjugate(cap)?
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub coef_log2: Option<f64>,
    pub measure_log2: Option<f64>,
    #[serde(default = "one")]
    pub mult: u64,
}

fn one() -> u64 {
    1
}

fn from_exponent(e: Option<f64>) -> Log2Value {
    e.map_or(Log2Value::ZERO, Log2Value::pow2)
}

pub fn simple_function_to_json(f: &SimpleFunction) -> Vec<AtomJson> {
    f.atoms()
        .iter()
        .map(|a| AtomJson { coef_log2: a.coef.exponent(), measure_log2: a.measure.exponent(), mult: a.mult })
        .collect()
}

pub fn simple_function_from_json(atoms: &[AtomJson]) -> orlicz_core::Result<SimpleFunction> {
    SimpleFunction::new(
        atoms
            .iter()
            .map(|a| Atom::new(from_exponent(a.coef_log2), from_exponent(a.measure_log2)).with_mult(a.mult))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use orlicz_core::{Construction, Prop3Params};

    fn round_trip(spec: &OrliczFunctionSpec) -> OrliczFunctionSpec {
        let text = serde_json::to_string(&SpecJson::from(spec)).unwrap();
        let back: SpecJson = serde_json::from_str(&text).unwrap();
        OrliczFunctionSpec::try_from(&back).unwrap()
    }

    #[test]
    fn specs_round_trip_exactly() {
        let c = Construction::build(Prop3Params::default()).unwrap();
        let specs = [
            OrliczFunctionSpec::power(1.0 / 3.0 + 2.0).unwrap(),
            c.raw_spec(),
            c.smoothed_spec(),
            c.smoothed_spec().compose_power(2.0).unwrap(),
            OrliczFunctionSpec::power(2.0).unwrap().conjugate(Log2Value::pow2(64.0)).unwrap(),
        ];
        for s in &specs {
            assert_eq!(&round_trip(s), s);
        }
    }

    #[test]
    fn power_json_shape() {
        let j: SpecJson = serde_json::from_str(r#"{"kind": "power", "p": 2}"#).unwrap();
        assert_eq!(j, SpecJson::Power { p: 2.0 });
        assert!(serde_json::from_str::<SpecJson>(r#"{"kind": "cubic"}"#).is_err());
    }

    #[test]
    fn atoms_round_trip() {
        let text = r#"[{"coef_log2": 1.5, "measure_log2": -3, "mult": 2}, {"coef_log2": null, "measure_log2": -2}]"#;
        let atoms: Vec<AtomJson> = serde_json::from_str(text).unwrap();
        let f = simple_function_from_json(&atoms).unwrap();
        assert!(f.atoms()[1].coef.is_zero());
        assert_eq!(f.atoms()[1].mult, 1);
        assert_eq!(simple_function_to_json(&f), atoms);
        let too_big = [AtomJson { coef_log2: Some(0.0), measure_log2: Some(0.0), mult: 2 }];
        assert!(simple_function_from_json(&too_big).is_err());
    }
}
