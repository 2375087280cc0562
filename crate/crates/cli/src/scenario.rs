//! Scenario files: a reservoir (or a schedule of them), an initial state,
//! sample times and the requested output columns.

use std::path::Path;

use gaussdyn::phase::params_for_asymptote;
use gaussdyn::{effective_params, EngineeredParams, PhysicalSetup, TwoModeCovariance, Variant};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default)]
    pub params: Option<ParamSpec>,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub schedule: Option<Vec<StageSpec>>,
    #[serde(default)]
    pub times: Option<TimeSpec>,
    #[serde(default)]
    pub outputs: Option<Vec<String>>,
    #[serde(default)]
    pub time_unit: TimeUnit,
}

fn default_variant() -> Variant {
    Variant::Symmetric
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamSpec {
    Engineered(EngineeredParams),
    Physical {
        setup: PhysicalSetup,
        lambda: f64,
        #[serde(rename = "nT")]
        n_t: f64,
        #[serde(default)]
        phi: f64,
    },
    /// Symmetric reservoir (λ = 1) whose asymptotic state has the given
    /// `n_f` and real `m_c,f`.
    Asymptote {
        n_f: f64,
        mc_f: f64,
        #[serde(rename = "R")]
        ratio: f64,
    },
}

impl ParamSpec {
    pub fn resolve(&self) -> Result<EngineeredParams, Failure> {
        let p = match self {
            ParamSpec::Engineered(p) => *p,
            ParamSpec::Physical {
                setup,
                lambda,
                n_t,
                phi,
            } => {
                if !setup.strong_drive() {
                    eprintln!(
                        "warning: |Omega| = {} is not much larger than |g| = {}; the effective reservoir assumes a strong drive",
                        setup.omega.abs(),
                        setup.g.abs()
                    );
                }
                effective_params(setup, *lambda, *n_t, *phi)?
            }
            ParamSpec::Asymptote { n_f, mc_f, ratio } => params_for_asymptote(*n_f, *mc_f, *ratio)?,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    #[default]
    Vacuum,
    Tmsv {
        r: f64,
        #[serde(default)]
        phi: f64,
    },
    /// `(n₁, n₂, Re m₁, Im m₁, Re m₂, Im m₂, Re m_c, Im m_c, Re m_s, Im m_s)`.
    Custom([f64; 10]),
}

impl InitialState {
    pub fn state(&self) -> TwoModeCovariance {
        match self {
            InitialState::Vacuum => TwoModeCovariance::vacuum(),
            InitialState::Tmsv { r, phi } => TwoModeCovariance::tmsv(*r, *phi),
            InitialState::Custom(c) => TwoModeCovariance::from_coords(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    /// Overrides the scenario variant for this stage.
    #[serde(default)]
    pub variant: Option<Variant>,
    pub params: ParamSpec,
    /// `null` (or absent) only on the last stage.
    #[serde(default)]
    pub duration: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    List(Vec<f64>),
    Grid { t_max: f64, samples: usize },
}

impl TimeSpec {
    pub fn times(&self) -> Vec<f64> {
        match self {
            TimeSpec::List(v) => v.clone(),
            TimeSpec::Grid { t_max, samples } => gaussdyn::phase::linspace(0.0, *t_max, *samples),
        }
    }
}

/// `lambda` rescales every rate by the first stage's λ so times read in
/// units of 1/λ; `input` keeps the rates as given.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    #[default]
    Lambda,
    Input,
}

/// A scenario with parameters resolved and rates normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub initial: TwoModeCovariance,
    pub stages: Vec<(Variant, EngineeredParams, Option<f64>)>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<(Self, serde_json::Value), Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let scenario: Scenario = serde_json::from_value(value.clone())
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        if scenario.schema != SCHEMA_VERSION {
            return Err(Failure::Usage(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                scenario.schema
            )));
        }
        Ok((scenario, value))
    }

    pub fn resolve(&self) -> Result<Resolved, Failure> {
        let mut stages = match (&self.params, &self.schedule) {
            (Some(p), None) => vec![(self.variant, p.resolve()?, None)],
            (None, Some(list)) if !list.is_empty() => list
                .iter()
                .map(|s| {
                    Ok((
                        s.variant.unwrap_or(self.variant),
                        s.params.resolve()?,
                        s.duration,
                    ))
                })
                .collect::<Result<Vec<_>, Failure>>()?,
            (Some(_), Some(_)) => {
                return Err(Failure::Usage(
                    "give either params or schedule, not both".into(),
                ))
            }
            _ => {
                return Err(Failure::Usage(
                    "scenario needs params or a non-empty schedule".into(),
                ))
            }
        };
        if self.time_unit == TimeUnit::Lambda {
            let lambda = stages[0].1.lambda;
            if lambda > 0.0 {
                for (_, p, _) in &mut stages {
                    p.kappa1 /= lambda;
                    p.kappa2 /= lambda;
                    p.lambda /= lambda;
                    p.d /= lambda;
                }
            } else {
                eprintln!("warning: λ = 0 in the first stage; times are in input units");
            }
        }
        Ok(Resolved {
            initial: self.initial_state.state(),
            stages,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Scenario {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn engineered_scenario() {
        let s = parse(
            r#"{"schema": 1, "variant": "asymmetric",
                "params": {"engineered": {"r": 1, "kappa1": 2, "kappa2": 0, "lambda": 2, "nT": 0.1}},
                "initial_state": {"tmsv": {"r": 0.5}}}"#,
        );
        let r = s.resolve().unwrap();
        let (v, p, d) = r.stages[0];
        assert_eq!(v, Variant::Asymmetric);
        assert_eq!((p.kappa1, p.lambda, p.n_t), (1.0, 1.0, 0.1));
        assert_eq!(d, None);
        assert_eq!(r.initial, TwoModeCovariance::tmsv(0.5, 0.0));
    }

    #[test]
    fn input_time_unit_keeps_rates() {
        let s = parse(
            r#"{"schema": 1, "time_unit": "input",
                "params": {"engineered": {"r": 1, "kappa1": 2, "kappa2": 2, "lambda": 4, "nT": 0}}}"#,
        );
        assert_eq!(s.resolve().unwrap().stages[0].1.lambda, 4.0);
    }

    #[test]
    fn asymptote_and_custom() {
        let s = parse(
            r#"{"schema": 1, "params": {"asymptote": {"n_f": 1, "mc_f": 1, "R": 1}},
                "initial_state": {"custom": [1, 1, 0, 0, 0, 0, 1.0125, 0, 0, 0]}}"#,
        );
        let r = s.resolve().unwrap();
        assert!((r.stages[0].1.r - 4f64.asinh() / 2.0).abs() < 1e-15);
        assert_eq!(r.initial.mc.re, 1.0125);
    }

    #[test]
    fn schedule_and_conflicts() {
        let s = parse(
            r#"{"schema": 1, "schedule": [
                {"params": {"engineered": {"r": 1, "kappa1": 1, "kappa2": 1, "lambda": 0.01, "nT": 0.05}}, "duration": 3},
                {"params": {"engineered": {"r": 1, "kappa1": 1, "kappa2": 1, "lambda": 1, "nT": 0.05}}}]}"#,
        );
        let r = s.resolve().unwrap();
        assert_eq!(r.stages.len(), 2);
        assert_eq!(r.stages[0].2, Some(3.0));
        // normalized by the first stage's λ
        assert!((r.stages[1].1.kappa1 - 100.0).abs() < 1e-12);

        let both = parse(
            r#"{"schema": 1, "params": {"asymptote": {"n_f": 1, "mc_f": 1, "R": 1}},
                "schedule": [{"params": {"asymptote": {"n_f": 1, "mc_f": 1, "R": 1}}}]}"#,
        );
        assert!(both.resolve().is_err());
        assert!(parse(r#"{"schema": 1}"#).resolve().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<Scenario>(r#"{"schema": 1, "bogus": 2}"#).is_err());
    }
}
