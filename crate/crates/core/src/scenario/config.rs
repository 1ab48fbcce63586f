use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::OdeScheme;
use crate::error::{Error, Result};
use crate::scalar_oracle::Coefficient;
use crate::solver::SolverConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Example1,
    ScalarGeneral,
    WaveMax,
    WaveSingularL1,
    #[serde(rename = "nodal-2x2")]
    Nodal2x2,
    Sweep,
}

/// `y' = y + eᵗ u`, `y(0) = -1`, implicit Euler, cost
/// `½u² + |u| + γ|y|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Scenario {
    pub gamma: f64,
    #[serde(default = "two")]
    pub horizon: f64,
    #[serde(default = "two_hundred")]
    pub steps: usize,
}

/// `y' = f y + g u`, `y(0) = α`, terminal condition `y(T) = 0` enforced by
/// an exact penalty on the last node. Exactly one of `gamma` and `t1` is
/// given; with `t1` the weight is the threshold `γ(t₁)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarGeneralScenario {
    #[serde(default = "unit_coefficient")]
    pub f: Coefficient,
    #[serde(default = "unit_coefficient")]
    pub g: Coefficient,
    #[serde(default = "minus_one")]
    pub alpha: f64,
    #[serde(default = "three")]
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default = "four_hundred")]
    pub steps: usize,
    #[serde(default = "trapezoidal")]
    pub scheme: OdeScheme,
    /// Terminal penalty `pin_weight · |y_N|`, scaled by `1/dt`.
    #[serde(default = "hundred")]
    pub pin_weight: f64,
}

/// Wave equation on `[0, L]` with unit speed in Riemann variables, Neumann
/// control on the right. The desired state is the rest state held by
/// `u_d`: `r₊ = -u_d`, `r₋ = u_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveScenario {
    #[serde(default = "one")]
    pub length: f64,
    #[serde(default = "fifty")]
    pub nx: usize,
    /// Defaults to `3 nx`, i.e. `T = 3L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Window start; defaults to `2 nx`, i.e. `t₀ = 2L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<usize>,
    #[serde(default = "half")]
    pub u_d: f64,
    /// Defaults to twice `Ĉ₁ ‖u_exact − u_d‖` for the max-norm problem
    /// and to one for the singular-weight problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

/// 2×2 transport system with Dirichlet control, observed through the
/// outgoing characteristic at `x = L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalScenario {
    #[serde(default = "one")]
    pub length: f64,
    #[serde(default = "twenty")]
    pub nx: usize,
    #[serde(default = "one")]
    pub d_plus: f64,
    #[serde(default = "minus_one")]
    pub d_minus: f64,
    #[serde(default = "minus_tenth")]
    pub eta0: f64,
    #[serde(default = "identity2")]
    pub coupling: [[f64; 2]; 2],
    /// Boundary value of the incoming characteristic at `x = L`.
    #[serde(default = "fifth")]
    pub r_minus_right: f64,
    /// Defaults to `3 nx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Window start; defaults to `3 nx / 2` and must leave room for the
    /// transport delay `L/d₊`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<usize>,
    /// Desired trace value `Π x_d`.
    #[serde(default = "half")]
    pub target: f64,
    #[serde(default)]
    pub u_d: f64,
    #[serde(default = "one")]
    pub gamma: f64,
}

/// Example 1 solved for each `γ` of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepScenario {
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    #[serde(default = "two")]
    pub horizon: f64,
    #[serde(default = "two_hundred")]
    pub steps: usize,
    /// Arrival deadline for the empirical threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_time: Option<f64>,
    #[serde(default)]
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Example1(Example1Scenario),
    ScalarGeneral(ScalarGeneralScenario),
    WaveMax(WaveScenario),
    WaveSingularL1(WaveScenario),
    Nodal2x2(NodalScenario),
    Sweep(SweepScenario),
}

impl Scenario {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            Scenario::Example1(_) => ScenarioKind::Example1,
            Scenario::ScalarGeneral(_) => ScenarioKind::ScalarGeneral,
            Scenario::WaveMax(_) => ScenarioKind::WaveMax,
            Scenario::WaveSingularL1(_) => ScenarioKind::WaveSingularL1,
            Scenario::Nodal2x2(_) => ScenarioKind::Nodal2x2,
            Scenario::Sweep(_) => ScenarioKind::Sweep,
        }
    }

    fn parameters(&self) -> Result<Value> {
        Ok(match self {
            Scenario::Example1(p) => serde_json::to_value(p)?,
            Scenario::ScalarGeneral(p) => serde_json::to_value(p)?,
            Scenario::WaveMax(p) | Scenario::WaveSingularL1(p) => serde_json::to_value(p)?,
            Scenario::Nodal2x2(p) => serde_json::to_value(p)?,
            Scenario::Sweep(p) => serde_json::to_value(p)?,
        })
    }

    fn from_parts(kind: ScenarioKind, parameters: Value) -> Result<Self> {
        fn typed<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
            serde_json::from_value(v).map_err(|e| Error::Scenario(format!("parameters: {e}")))
        }
        Ok(match kind {
            ScenarioKind::Example1 => Scenario::Example1(typed(parameters)?),
            ScenarioKind::ScalarGeneral => Scenario::ScalarGeneral(typed(parameters)?),
            ScenarioKind::WaveMax => Scenario::WaveMax(typed(parameters)?),
            ScenarioKind::WaveSingularL1 => Scenario::WaveSingularL1(typed(parameters)?),
            ScenarioKind::Nodal2x2 => Scenario::Nodal2x2(typed(parameters)?),
            ScenarioKind::Sweep => Scenario::Sweep(typed(parameters)?),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    scenario: ScenarioKind,
    #[serde(default = "empty_object")]
    parameters: Value,
    #[serde(default)]
    solver: SolverConfig,
    #[serde(default = "default_output_dir")]
    output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        ScenarioConfig {
            scenario,
            solver: SolverConfig::default(),
            output_dir: default_output_dir(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Scenario(format!("config: {e}")))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(Error::Scenario(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                raw.schema_version
            )));
        }
        let parameters = if raw.parameters.is_null() {
            empty_object()
        } else {
            raw.parameters
        };
        let cfg = ScenarioConfig {
            scenario: Scenario::from_parts(raw.scenario, parameters)?,
            solver: raw.solver,
            output_dir: raw.output_dir,
        };
        cfg.solver
            .validate()
            .map_err(|e| Error::Scenario(format!("solver: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Pretty JSON with every default spelled out.
    pub fn to_json(&self) -> Result<String> {
        let raw = RawConfig {
            schema_version: SCHEMA_VERSION,
            scenario: self.scenario.kind(),
            parameters: self.scenario.parameters()?,
            solver: self.solver.clone(),
            output_dir: self.output_dir.clone(),
        };
        let mut s = serde_json::to_string_pretty(&raw)?;
        s.push('\n');
        Ok(s)
    }
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_gammas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn unit_coefficient() -> Coefficient {
    Coefficient::constant(1.0)
}
fn trapezoidal() -> OdeScheme {
    OdeScheme::Trapezoidal
}
fn identity2() -> [[f64; 2]; 2] {
    [[1.0, 0.0], [0.0, 1.0]]
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn three() -> f64 {
    3.0
}
fn half() -> f64 {
    0.5
}
fn fifth() -> f64 {
    0.2
}
fn hundred() -> f64 {
    100.0
}
fn minus_one() -> f64 {
    -1.0
}
fn minus_tenth() -> f64 {
    -0.1
}
fn twenty() -> usize {
    20
}
fn fifty() -> usize {
    50
}
fn two_hundred() -> usize {
    200
}
fn four_hundred() -> usize {
    400
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled_and_round_trip() {
        let cfg =
            ScenarioConfig::from_json(r#"{"schema_version": 1, "scenario": "example1", "parameters": {"gamma": 1}}"#)
                .unwrap();
        assert_eq!(
            cfg.scenario,
            Scenario::Example1(Example1Scenario {
                gamma: 1.0,
                horizon: 2.0,
                steps: 200
            })
        );
        let again = ScenarioConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(again.to_json().unwrap(), cfg.to_json().unwrap());
    }

    #[test]
    fn every_kind_parses_with_defaults() {
        for kind in ["scalar-general", "wave-max", "wave-singular-l1", "nodal-2x2", "sweep"] {
            let params = if kind == "scalar-general" {
                r#"{"gamma": 2}"#
            } else {
                "{}"
            };
            let text = format!(r#"{{"schema_version": 1, "scenario": "{kind}", "parameters": {params}}}"#);
            let cfg = ScenarioConfig::from_json(&text).unwrap();
            assert_eq!(ScenarioConfig::from_json(&cfg.to_json().unwrap()).unwrap(), cfg);
        }
    }

    #[test]
    fn errors_name_the_offending_key() {
        let cases = [
            (
                r#"{"schema_version": 1, "scenario": "example1", "parameters": {"gama": 1}}"#,
                "gama",
            ),
            (
                r#"{"schema_version": 1, "scenario": "example1", "parameters": {}}"#,
                "gamma",
            ),
            (r#"{"schema_version": 1, "scenario": "example2"}"#, "example2"),
            (r#"{"schema_version": 2, "scenario": "sweep"}"#, "schema_version"),
            (r#"{"schema_version": 1, "scenario": "sweep", "colour": 3}"#, "colour"),
            (
                r#"{"schema_version": 1, "scenario": "sweep", "solver": {"max_iter": 3}}"#,
                "max_iter",
            ),
            (
                r#"{"schema_version": 1, "scenario": "sweep", "solver": {"tol_gap": -1}}"#,
                "tol_gap",
            ),
        ];
        for (text, key) in cases {
            let err = ScenarioConfig::from_json(text).unwrap_err().to_string();
            assert!(err.contains(key), "{err} should mention {key}");
        }
    }
}
