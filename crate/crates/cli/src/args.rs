use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussdyn::Variant;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "gaussdyn",
    version,
    about = "Entanglement dynamics of two cavity modes in engineered reservoirs"
)]
pub struct Cli {
    /// Scenario file (JSON, `"schema": 1`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Reserved. The dynamics are deterministic and ignore it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Use the equations and boundary formula exactly as printed in the
    /// source article instead of the re-derived ones.
    #[arg(long, global = true)]
    pub paper_verbatim: bool,

    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Trajectory of a scenario: moments and entanglement measures vs time.
    Evolve(EvolveArgs),
    /// Asymptotic phase over an (R, nT) grid plus the boundary curve.
    PhaseDiagram(PhaseArgs),
    /// Sudden-death times of the ideal squeezed state, closed form and numeric.
    Esd(EsdArgs),
    /// Entanglement reached from vacuum, normalized by the ideal value.
    Robustness(RobustnessArgs),
    /// Asymptotic state of a scenario's final stage.
    Asymptotic,
    /// Compare the moment equations against the truncated master equation.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Evolve(_) => "evolve",
            Command::PhaseDiagram(_) => "phase-diagram",
            Command::Esd(_) => "esd",
            Command::Robustness(_) => "robustness",
            Command::Asymptotic => "asymptotic",
            Command::Validate(_) => "validate",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EvolveArgs {
    /// Sample times as `a,b,c` or `start:stop:count` (units of 1/λ unless
    /// the scenario sets `"time_unit": "input"`).
    #[arg(long)]
    pub times: Option<TimeList>,
}

#[derive(Args, Debug, Serialize)]
pub struct PhaseArgs {
    /// Squeeze parameter.
    #[arg(long)]
    pub r: f64,
    /// Squeeze angle.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Ratio range `lo:hi`, R = λ/κ.
    #[arg(long = "R-range", default_value = "0.1:5")]
    pub ratio_range: Range,
    /// Thermal photon range `lo:hi`.
    #[arg(long = "nT-range", default_value = "0:2")]
    pub n_t_range: Range,
    /// Points per axis, `N` or `NRxNnT`.
    #[arg(long, default_value = "100x100")]
    pub grid: Grid,
    #[arg(long, value_enum, default_value_t = VariantArg::Symmetric)]
    pub variant: VariantArg,
    /// Boundary curve file; defaults to `<out stem>.boundary.csv`.
    #[arg(long)]
    pub boundary_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EsdArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[arg(long = "R-range", default_value = "0.05:5")]
    pub ratio_range: Range,
    #[arg(long = "R-points", default_value_t = 200)]
    pub ratio_points: usize,
    /// Space the R grid logarithmically.
    #[arg(long = "R-log")]
    pub ratio_log: bool,
    /// Comma-separated thermal photon numbers.
    #[arg(long = "nT-list", default_value = "1")]
    pub n_t_list: FloatList,
}

#[derive(Args, Debug, Serialize)]
pub struct RobustnessArgs {
    /// Comma-separated squeeze parameters.
    #[arg(long = "r-list", default_value = "1,1.5,2,2.5")]
    pub r_list: FloatList,
    #[arg(long = "nT", default_value_t = 0.05)]
    pub n_t: f64,
    #[arg(long = "R-range", default_value = "0:1")]
    pub ratio_range: Range,
    #[arg(long = "R-points", default_value_t = 101)]
    pub ratio_points: usize,
    /// Preparation time in units of 1/κ; `inf` for the asymptotic state.
    #[arg(long, default_value_t = f64::INFINITY)]
    pub time: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Fock levels per mode.
    #[arg(long, default_value_t = gaussdyn::fock::DEFAULT_CUTOFF)]
    pub cutoff: usize,
    /// Relative moment tolerance.
    #[arg(long, default_value_t = gaussdyn::fock::DEFAULT_MOMENT_TOL)]
    pub tol: f64,
    /// Largest tolerated top-level population.
    #[arg(long, default_value_t = gaussdyn::fock::DEFAULT_LEAK_TOL)]
    pub leak_tol: f64,
    /// Fixed integrator step; defaults to 1e-3/(κ+λ+|d|+1).
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Symmetric,
    Asymmetric,
    LaserFrame,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Symmetric => Variant::Symmetric,
            VariantArg::Asymmetric => Variant::Asymmetric,
            VariantArg::LaserFrame => Variant::LaserFrame,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteArg {
    Symmetric,
    Asymmetric,
    LaserFrame,
    All,
}

impl SuiteArg {
    pub fn suite_name(&self) -> &'static str {
        match self {
            SuiteArg::Symmetric => "symmetric",
            SuiteArg::Asymmetric => "asymmetric",
            SuiteArg::LaserFrame => "laser_frame",
            SuiteArg::All => "all",
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

/// Closed interval `lo:hi` with finite `lo ≤ hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let (lo, hi) = (parse_f64(a)?, parse_f64(b)?);
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(format!("malformed range {s:?}: need finite lo ≤ hi"));
        }
        Ok(Range { lo, hi })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub first: usize,
    pub second: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |x: &str| -> Result<usize, String> {
            let n: usize = x
                .trim()
                .parse()
                .map_err(|_| format!("bad grid size {x:?}"))?;
            if n == 0 {
                return Err("grid sizes must be ≥ 1".into());
            }
            Ok(n)
        };
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(Grid {
                first: parse(a)?,
                second: parse(b)?,
            }),
            None => {
                let n = parse(s)?;
                Ok(Grid {
                    first: n,
                    second: n,
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = s.split(',').map(parse_f64).collect::<Result<Vec<_>, _>>()?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(format!("non-finite entry in {s:?}"));
        }
        Ok(FloatList(v))
    }
}

/// `a,b,c` or `start:stop:count`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeList(pub Vec<f64>);

impl FromStr for TimeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a, b, n] => {
                let (a, b) = (parse_f64(a)?, parse_f64(b)?);
                let n: usize = n.trim().parse().map_err(|_| format!("bad count {n:?}"))?;
                if n == 0 || !a.is_finite() || !b.is_finite() || a > b {
                    return Err(format!("malformed time range {s:?}"));
                }
                Ok(TimeList(gaussdyn::phase::linspace(a, b, n)))
            }
            [_] => Ok(TimeList(FloatList::from_str(s)?.0)),
            _ => Err(format!("expected a,b,c or start:stop:count, got {s:?}")),
        }
    }
}
