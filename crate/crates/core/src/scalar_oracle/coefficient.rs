use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Built-in coefficient functions of time for scalar ODEs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Coefficient {
    Constant {
        value: f64,
    },
    /// `scale * exp(rate * t)`
    Exponential {
        scale: f64,
        rate: f64,
    },
    /// Ascending powers: `c[0] + c[1] t + c[2] t² + ...`
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// Piecewise-linear through `(times[i], values[i])`, constant beyond the
    /// end points.
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Coefficient {
    pub fn constant(value: f64) -> Self {
        Coefficient::Constant { value }
    }

    pub fn exponential(scale: f64, rate: f64) -> Self {
        Coefficient::Exponential { scale, rate }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Coefficient::Constant { value } if !value.is_finite() => Err(domain("constant coefficient must be finite")),
            Coefficient::Exponential { scale, rate } if !(scale.is_finite() && rate.is_finite()) => {
                Err(domain("exponential coefficient parameters must be finite"))
            }
            Coefficient::Polynomial { coefficients } => {
                if coefficients.is_empty() || !finite(coefficients) {
                    Err(domain("polynomial needs at least one finite coefficient"))
                } else {
                    Ok(())
                }
            }
            Coefficient::Tabulated { times, values } => {
                if times.len() < 2 || times.len() != values.len() {
                    return Err(domain("tabulated coefficient needs >= 2 matching times/values"));
                }
                if !finite(times) || !finite(values) {
                    return Err(domain("tabulated coefficient must be finite"));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(domain("tabulated times must be strictly increasing"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Coefficient::Constant { value } => *value,
            Coefficient::Exponential { scale, rate } => scale * (rate * t).exp(),
            Coefficient::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Coefficient::Tabulated { times, values } => {
                let last = times.len() - 1;
                if t <= times[0] {
                    return values[0];
                }
                if t >= times[last] {
                    return values[last];
                }
                let i = times.partition_point(|&x| x <= t) - 1;
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                values[i] + w * (values[i + 1] - values[i])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_builtins() {
        assert_eq!(Coefficient::constant(2.5).eval(7.0), 2.5);
        assert!((Coefficient::exponential(2.0, 1.0).eval(1.0) - 2.0 * 1f64.exp()).abs() < 1e-15);
        let p = Coefficient::Polynomial {
            coefficients: vec![1.0, 2.0, 3.0],
        };
        assert_eq!(p.eval(2.0), 1.0 + 4.0 + 12.0);
        let tab = Coefficient::Tabulated {
            times: vec![0.0, 1.0, 3.0],
            values: vec![1.0, 3.0, 2.0],
        };
        assert_eq!(tab.eval(0.5), 2.0);
        assert_eq!(tab.eval(2.0), 2.5);
        assert_eq!(tab.eval(-1.0), 1.0);
        assert_eq!(tab.eval(9.0), 2.0);
    }

    #[test]
    fn rejects_unsorted_table() {
        let tab = Coefficient::Tabulated {
            times: vec![0.0, 2.0, 1.0],
            values: vec![1.0, 1.0, 1.0],
        };
        assert!(tab.validate().is_err());
    }

    #[test]
    fn config_form_round_trips() {
        let c: Coefficient = serde_json::from_str(r#"{"kind":"exponential","scale":1.0,"rate":1.0}"#).unwrap();
        assert_eq!(c, Coefficient::exponential(1.0, 1.0));
    }
}
