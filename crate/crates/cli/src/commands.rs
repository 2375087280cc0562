use std::path::{Path, PathBuf};

use gaussdyn::dynamics::{drift_spectrum, progress, DIVERGENCE_MARGIN};
use gaussdyn::fock::{run_case, suite, FockConfig};
use gaussdyn::phase::{
    boundary_nt_numeric, boundary_nt_printed, linspace, robustness_eof, BOUNDARY_TOL,
};
use gaussdyn::{
    asymptotic_state, boundary_nt, drift, esd_time_closed, esd_time_numeric, run_schedule, sweep,
    Asymptote, Convention, EngineeredParams, EprPair, Phase, Schedule, Stage, TwoModeCovariance,
    Variant,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{EsdArgs, EvolveArgs, PhaseArgs, RobustnessArgs, ValidateArgs};
use crate::failure::Failure;
use crate::scenario::{Resolved, Scenario};
use crate::table::{emit, fmt_float, scenario_hash, Cell, Table};

/// Everything a subcommand needs besides its own arguments.
pub struct Ctx {
    pub conv: Convention,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Ctx {
    fn hash(&self, command: &str, args: Value, scenario: Option<&Value>) -> String {
        scenario_hash(&json!({
            "command": command,
            "args": args,
            "paper_verbatim": self.conv == Convention::PaperVerbatim,
            "scenario": scenario,
        }))
    }

    fn scenario(&self) -> Result<(Scenario, Value), Failure> {
        let path = self.config.as_deref().ok_or_else(|| {
            Failure::Usage("this subcommand needs --config <scenario.json>".into())
        })?;
        Scenario::load(path)
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("arguments serialize")
}

pub const EVOLVE_COLUMNS: [&str; 18] = [
    "t",
    "p",
    "n1",
    "n2",
    "re_m1",
    "im_m1",
    "re_m2",
    "im_m2",
    "re_mc",
    "im_mc",
    "re_ms",
    "im_ms",
    "simon_S",
    "eof",
    "logneg",
    "epr_sum_initial_opt",
    "epr_sum_final_opt",
    "epr_sum_instant_opt",
];

/// Default sampling span past the bounded stages when the last stage has
/// no asymptote.
const MARGINAL_HORIZON: f64 = 10.0;

fn require_physical(v: &TwoModeCovariance) -> Result<(), Failure> {
    if v.is_physical(gaussdyn::covariance::PHYSICAL_TOL) {
        Ok(())
    } else {
        Err(Failure::NonPhysical(format!(
            "initial state has ν₋ = {}",
            v.nu_minus_checked().map_or("undefined".into(), fmt_float)
        )))
    }
}

fn build_schedule(res: &Resolved, conv: Convention) -> Result<Schedule, Failure> {
    let stages = res
        .stages
        .iter()
        .map(|(variant, p, duration)| {
            Ok(Stage {
                generator: drift(p, *variant, conv)?,
                duration: *duration,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(Schedule::new(stages)?)
}

fn divergent_message(offending: &[num_complex::Complex64]) -> String {
    let list: Vec<String> = offending
        .iter()
        .map(|z| format!("{}{:+}i", fmt_float(z.re), z.im))
        .collect();
    format!(
        "generator is not stable; eigenvalues with Re ≥ 0: {}",
        list.join(", ")
    )
}

pub fn evolve(ctx: &Ctx, args: &EvolveArgs) -> Result<(), Failure> {
    let (scenario, raw) = ctx.scenario()?;
    let res = scenario.resolve()?;
    require_physical(&res.initial)?;
    let schedule = build_schedule(&res, ctx.conv)?;
    let last = schedule.stages().last().expect("non-empty schedule");

    // asymptote of an unbounded last stage, or the end state otherwise
    let mut end_state = None;
    let mut horizon = schedule
        .stages()
        .iter()
        .filter_map(|s| s.duration)
        .sum::<f64>();
    if schedule.is_unbounded() {
        match asymptotic_state(&last.generator)? {
            Asymptote::Divergent { offending } => {
                let scale = last.generator.drift.norm().max(1.0);
                if offending.iter().any(|z| z.re > DIVERGENCE_MARGIN * scale) {
                    return Err(Failure::Divergent(divergent_message(&offending)));
                }
                // marginal (e.g. no dissipation): bounded motion, no asymptote
                horizon += MARGINAL_HORIZON;
            }
            Asymptote::Stable { state, .. } => {
                end_state = Some(state);
                let slowest = drift_spectrum(&last.generator)
                    .iter()
                    .map(|z| -z.re)
                    .fold(f64::INFINITY, f64::min);
                horizon += 3.0 / slowest;
            }
        }
    }
    let times = match (&args.times, &scenario.times) {
        (Some(t), _) => t.0.clone(),
        (None, Some(spec)) => spec.times(),
        (None, None) => linspace(0.0, horizon, 101),
    };
    if times.is_empty() {
        return Err(Failure::Usage("no sample times".into()));
    }
    let traj = run_schedule(&res.initial, &schedule, &times)?;
    if !schedule.is_unbounded() {
        end_state = Some(
            *run_schedule(&res.initial, &schedule, &[schedule.total_duration()])?
                .states()
                .last()
                .expect("one sample"),
        );
    }

    let columns: Vec<&str> = match &scenario.outputs {
        None => EVOLVE_COLUMNS.to_vec(),
        Some(list) => {
            if let Some(bad) = list.iter().find(|c| !EVOLVE_COLUMNS.contains(&c.as_str())) {
                return Err(Failure::Usage(format!(
                    "unknown output {bad:?}; choose from {}",
                    EVOLVE_COLUMNS.join(", ")
                )));
            }
            EVOLVE_COLUMNS
                .iter()
                .copied()
                .filter(|c| *c == "t" || list.iter().any(|x| x == c))
                .collect()
        }
    };

    let rate = match schedule.stages() {
        [only] => only.generator.uniform_rate().filter(|g| *g > 0.0),
        _ => None,
    };
    let pair_of =
        |v: &TwoModeCovariance| -> Option<EprPair> { v.optimal_epr_squeeze().ok().map(|o| o.pair) };
    let initial_pair = pair_of(&res.initial);
    let final_pair = end_state.as_ref().and_then(pair_of);

    let mut table = Table::new(&columns);
    for (t, v) in traj.times().iter().zip(traj.states()) {
        let c = v.to_coords();
        let cell = |name: &str| -> Cell {
            match name {
                "t" => (*t).into(),
                "p" => rate.map(|g| progress(g, *t)).into(),
                "simon_S" => v.simon_s().into(),
                "eof" => v.eof_symmetric().ok().into(),
                "logneg" => v.log_negativity().into(),
                "epr_sum_initial_opt" => initial_pair.map(|p| v.epr_variance_sum(&p)).into(),
                "epr_sum_final_opt" => final_pair.map(|p| v.epr_variance_sum(&p)).into(),
                "epr_sum_instant_opt" => v.optimal_epr_squeeze().ok().map(|o| o.min_sum).into(),
                coord => {
                    let i = gaussdyn::fock::COORD_NAMES
                        .iter()
                        .position(|n| *n == coord)
                        .expect("known coordinate");
                    c[i].into()
                }
            }
        };
        table.push(columns.iter().map(|c| cell(c)).collect());
    }
    let hash = ctx.hash("evolve", to_value(args), Some(&raw));
    emit(ctx.out.as_deref(), &table.render(&hash))
}

fn companion_path(explicit: Option<&Path>, out: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| out.map(|p| p.with_extension("boundary.csv")))
}

pub fn phase_diagram(ctx: &Ctx, args: &PhaseArgs) -> Result<(), Failure> {
    if !(args.r >= 0.0) || !args.r.is_finite() {
        return Err(Failure::Usage(format!(
            "--r {} must be finite and ≥ 0",
            args.r
        )));
    }
    if !(args.ratio_range.lo > 0.0) {
        return Err(Failure::Usage("--R-range must be positive".into()));
    }
    if !(args.n_t_range.lo >= 0.0) {
        return Err(Failure::Usage("--nT-range must be non-negative".into()));
    }
    let variant: Variant = args.variant.into();
    let ratios = linspace(args.ratio_range.lo, args.ratio_range.hi, args.grid.first);
    let n_ts = linspace(args.n_t_range.lo, args.n_t_range.hi, args.grid.second);
    let rows = sweep(args.r, args.phi, &ratios, &n_ts, variant, ctx.conv)?;

    let mut table = Table::new(&[
        "R",
        "nT",
        "phase",
        "simon_S",
        "eof_or_logneg",
        "divergent_flag",
    ]);
    for row in &rows {
        table.push(vec![
            row.ratio.into(),
            row.n_t.into(),
            row.phase.tag.name().into(),
            row.phase.s_value.into(),
            row.entanglement.into(),
            row.divergent.into(),
        ]);
    }
    let hash = ctx.hash("phase-diagram", to_value(args), None);
    emit(ctx.out.as_deref(), &table.render(&hash))?;

    if let Some(path) = companion_path(args.boundary_out.as_deref(), ctx.out.as_deref()) {
        let verbatim = ctx.conv == Convention::PaperVerbatim;
        let mut cols = vec!["R", "nT_boundary"];
        if verbatim {
            cols.push("nT_boundary_printed");
        }
        let values = ratios
            .par_iter()
            .map(|&ratio| -> Result<Option<f64>, Failure> {
                if args.r == 0.0 {
                    return Ok(Some(0.0));
                }
                Ok(match variant {
                    Variant::Asymmetric => {
                        boundary_nt_numeric(args.r, args.phi, ratio, variant, ctx.conv)?
                    }
                    _ => Some(boundary_nt(args.r, ratio)?),
                })
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        let mut b = Table::new(&cols);
        for (&ratio, v) in ratios.iter().zip(values) {
            let mut row: Vec<Cell> = vec![ratio.into(), v.into()];
            if verbatim {
                row.push(boundary_nt_printed(args.r, ratio).into());
            }
            b.push(row);
        }
        emit(Some(&path), &b.render(&hash))?;
    }
    Ok(())
}

pub fn esd(ctx: &Ctx, args: &EsdArgs) -> Result<(), Failure> {
    if !(args.r > 0.0) || !args.r.is_finite() {
        return Err(Failure::Usage(format!(
            "--r {} must be finite and > 0",
            args.r
        )));
    }
    if !(args.ratio_range.lo > 0.0) || args.ratio_points == 0 {
        return Err(Failure::Usage(
            "--R-range must be positive with ≥ 1 point".into(),
        ));
    }
    if args.n_t_list.0.iter().any(|x| *x < 0.0) {
        return Err(Failure::Usage("--nT-list entries must be ≥ 0".into()));
    }
    let ratios = if args.ratio_log {
        linspace(
            args.ratio_range.lo.ln(),
            args.ratio_range.hi.ln(),
            args.ratio_points,
        )
        .into_iter()
        .map(f64::exp)
        .collect()
    } else {
        linspace(args.ratio_range.lo, args.ratio_range.hi, args.ratio_points)
    };
    let points: Vec<(f64, f64)> = args
        .n_t_list
        .0
        .iter()
        .flat_map(|&n_t| ratios.iter().map(move |&ratio| (ratio, n_t)))
        .collect();
    let v0 = TwoModeCovariance::tmsv(args.r, args.phi);
    let rows = points
        .par_iter()
        .map(|&(ratio, n_t)| -> Result<Vec<Cell>, Failure> {
            let closed = esd_time_closed(args.r, args.phi, ratio, n_t);
            let p = EngineeredParams::from_ratio(args.r, ratio, n_t).with_phi(args.phi);
            let gen = drift(&p, Variant::Symmetric, ctx.conv)?;
            let numeric = esd_time_numeric(&v0, &gen)?.esd;
            Ok(vec![
                ratio.into(),
                n_t.into(),
                closed.p_esd.into(),
                closed.t_esd.into(),
                numeric.p_esd.into(),
                numeric.t_esd.into(),
            ])
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let mut table = Table::new(&[
        "R",
        "nT",
        "p_esd",
        "lambda_t_esd",
        "p_esd_numeric",
        "lambda_t_esd_numeric",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    let hash = ctx.hash("esd", to_value(args), None);
    emit(ctx.out.as_deref(), &table.render(&hash))
}

pub fn robustness(ctx: &Ctx, args: &RobustnessArgs) -> Result<(), Failure> {
    if args.r_list.0.iter().any(|r| !(*r > 0.0)) {
        return Err(Failure::Usage("--r-list entries must be > 0".into()));
    }
    if !(args.ratio_range.lo >= 0.0) || args.ratio_points == 0 {
        return Err(Failure::Usage(
            "--R-range must be non-negative with ≥ 1 point".into(),
        ));
    }
    if !(args.time > 0.0) || !(args.n_t >= 0.0) {
        return Err(Failure::Usage("--time must be > 0 and --nT ≥ 0".into()));
    }
    let ratios = linspace(args.ratio_range.lo, args.ratio_range.hi, args.ratio_points);
    let mut table = Table::new(&["r", "R", "eof", "eof_normalized"]);
    for &r in &args.r_list.0 {
        for &ratio in &ratios {
            let (eof, ideal) = robustness_eof(r, args.n_t, ratio, args.time)?;
            table.push(vec![
                r.into(),
                ratio.into(),
                eof.into(),
                (eof / ideal).into(),
            ]);
        }
    }
    let hash = ctx.hash("robustness", to_value(args), None);
    emit(ctx.out.as_deref(), &table.render(&hash))
}

pub fn asymptotic(ctx: &Ctx) -> Result<(), Failure> {
    let (scenario, raw) = ctx.scenario()?;
    let res = scenario.resolve()?;
    let (variant, params, _) = *res.stages.last().expect("non-empty schedule");
    let gen = drift(&params, variant, ctx.conv)?;
    let asym = asymptotic_state(&gen)?;
    let mut cols = vec!["variant", "divergent", "condition"];
    cols.extend(gaussdyn::fock::COORD_NAMES);
    cols.extend(["simon_S", "phase", "eof", "logneg"]);
    let mut table = Table::new(&cols);
    let mut row: Vec<Cell> = vec![variant.name().into(), asym.is_divergent().into()];
    match &asym {
        Asymptote::Stable { state, condition } => {
            if asym.ill_conditioned() {
                eprintln!("warning: drift matrix condition number {condition:.3e}");
            }
            row.push((*condition).into());
            row.extend(state.to_coords().map(Cell::from));
            let s = state.simon_s();
            row.push(s.into());
            row.push(Phase::from_simon(s, BOUNDARY_TOL).tag.name().into());
            row.push(state.eof_symmetric().ok().into());
            row.push(state.log_negativity().into());
        }
        Asymptote::Divergent { .. } => {
            row.push(f64::NAN.into());
            row.extend([f64::NAN; 10].map(Cell::from));
            row.extend([
                Cell::from(f64::NAN),
                "divergent".into(),
                f64::NAN.into(),
                f64::NAN.into(),
            ]);
        }
    }
    table.push(row);
    let hash = ctx.hash("asymptotic", Value::Null, Some(&raw));
    emit(ctx.out.as_deref(), &table.render(&hash))?;
    match asym {
        Asymptote::Divergent { offending } => {
            Err(Failure::Divergent(divergent_message(&offending)))
        }
        Asymptote::Stable { .. } => Ok(()),
    }
}

pub fn validate(ctx: &Ctx, args: &ValidateArgs) -> Result<(), Failure> {
    let cfg = FockConfig {
        cutoff: args.cutoff,
        dt: args.dt,
        leak_tol: args.leak_tol,
    };
    cfg.validate()?;
    if !(args.tol > 0.0) {
        return Err(Failure::Usage("--tol must be > 0".into()));
    }
    let cases = suite(args.suite.suite_name()).expect("suite names match the enum");
    let reports: Vec<_> = cases
        .par_iter()
        .map(|c| run_case(c, ctx.conv, &cfg, args.tol))
        .collect();
    for r in &reports {
        let detail = match (&r.failure, r.max_rel_error) {
            (Some(f), _) => f.clone(),
            (None, Some(e)) => format!(
                "max relative error {} ({})",
                fmt_float(e),
                r.worst_coordinate.as_deref().unwrap_or("-")
            ),
            (None, None) => String::new(),
        };
        eprintln!(
            "{} {}: {detail}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name
        );
    }
    let passed = reports.iter().all(|r| r.passed);
    let report = json!({
        "suite": args.suite.suite_name(),
        "convention": match ctx.conv {
            Convention::Derived => "derived",
            Convention::PaperVerbatim => "paper_verbatim",
        },
        "cutoff": cfg.cutoff,
        "leak_tol": cfg.leak_tol,
        "tol": args.tol,
        "passed": passed,
        "cases": reports,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(ctx.out.as_deref(), &text)?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name.as_str())
            .collect();
        Err(Failure::Validation(failed.join(", ")))
    }
}
