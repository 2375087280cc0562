//! Propagation of covariance matrices under constant linear-affine
//! generators, asymptotic states and piecewise-constant schedules.

use nalgebra::{SMatrix, Schur};
use num_complex::Complex64 as C64;

use crate::covariance::{TwoModeCovariance, PHYSICAL_TOL};
use crate::error::{Error, Result};
use crate::reservoir::{DriftAffine, EngineeredParams, Vector10};

/// Relative margin below which the largest real part counts as non-negative.
pub const DIVERGENCE_MARGIN: f64 = 1e-12;

/// Conditioning above which an asymptotic solve is flagged.
pub const COND_LIMIT: f64 = 1e12;

type Matrix11 = SMatrix<f64, 11, 11>;

fn to_vector(v: &TwoModeCovariance) -> Vector10 {
    Vector10::from_column_slice(&v.to_coords())
}

fn from_vector(v: &Vector10) -> TwoModeCovariance {
    let mut c = [0.0; 10];
    c.copy_from_slice(v.as_slice());
    TwoModeCovariance::from_coords(&c)
}

/// Progress `p(t) = 1 − e^{−γt}`.
pub fn progress(rate: f64, t: f64) -> f64 {
    if t.is_infinite() && rate > 0.0 {
        1.0
    } else {
        -(-rate * t).exp_m1()
    }
}

/// Time at which `p(t) = p` for the relaxation rate `γ`.
pub fn time_for_progress(rate: f64, p: f64) -> f64 {
    if p >= 1.0 {
        f64::INFINITY
    } else {
        -(-p).ln_1p() / rate
    }
}

/// Fixed point of the symmetric reservoir:
/// `n_f = (κ|B|² + λn_T)/(κ+λ)`, `m_c,f = κAB/(κ+λ)`, all else zero.
pub fn symmetric_asymptote(p: &EngineeredParams) -> Result<TwoModeCovariance> {
    p.validate()?;
    let kappa = p.kappa1;
    let total = kappa + p.lambda;
    if total <= 0.0 {
        return Err(Error::InvalidParameter("kappa + lambda must be > 0".into()));
    }
    let n = (kappa * p.b().norm_sqr() + p.lambda * p.n_t) / total;
    Ok(TwoModeCovariance {
        n1: n,
        n2: n,
        mc: p.b() * (kappa * p.a() / total),
        ..Default::default()
    })
}

/// Closed-form symmetric evolution: every coordinate moves on the segment
/// `v(t) = v₀ + p(t)(v_f − v₀)` with `p(t) = 1 − e^{−2(κ+λ)t}`.
pub fn propagate_closed_form(
    v0: &TwoModeCovariance,
    p: &EngineeredParams,
    t: f64,
) -> Result<TwoModeCovariance> {
    if p.kappa1 != p.kappa2 {
        return Err(Error::InvalidParameter(
            "closed form needs a symmetric reservoir".into(),
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be ≥ 0")));
    }
    if t == 0.0 {
        return Ok(*v0);
    }
    let vf = symmetric_asymptote(p)?;
    let prog = progress(2.0 * (p.kappa1 + p.lambda), t);
    Ok(interpolate(v0, &vf, prog))
}

/// Point at progress `p` on the straight segment from `v0` to `vf`.
pub fn interpolate(v0: &TwoModeCovariance, vf: &TwoModeCovariance, p: f64) -> TwoModeCovariance {
    let a = to_vector(v0);
    let b = to_vector(vf);
    from_vector(&(a + (b - a) * p))
}

/// Exact solution of `v̇ = Mv + c` via the exponential of the homogenized
/// 11×11 system `[[M, c], [0, 0]]`.
pub fn propagate(v0: &TwoModeCovariance, gen: &DriftAffine, t: f64) -> Result<TwoModeCovariance> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t = {t} must be finite and ≥ 0"
        )));
    }
    if t == 0.0 {
        return Ok(*v0);
    }
    let mut h = Matrix11::zeros();
    h.fixed_view_mut::<10, 10>(0, 0).copy_from(&(gen.drift * t));
    h.fixed_view_mut::<10, 1>(0, 10)
        .copy_from(&(gen.source * t));
    let e = h.exp();
    let v = to_vector(v0);
    let out = e.fixed_view::<10, 10>(0, 0) * v + e.fixed_view::<10, 1>(0, 10);
    Ok(from_vector(&out))
}

/// Adaptive Dormand–Prince 5(4) integration of `v̇ = Mv + c`, used as a
/// cross-check of [`propagate`]. Local errors are held at `rtol/100`.
pub fn propagate_adaptive(
    v0: &TwoModeCovariance,
    gen: &DriftAffine,
    t: f64,
    rtol: f64,
) -> Result<TwoModeCovariance> {
    if !(rtol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rtol = {rtol} must be > 0"
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t = {t} must be finite and ≥ 0"
        )));
    }
    let f = |y: &Vector10| gen.drift * y + gen.source;
    let tol = rtol / 100.0;
    let mut y = to_vector(v0);
    let mut now = 0.0;
    let norm = gen.drift.abs().max().max(1e-300);
    let mut h = (0.01 / norm).min(t);
    let mut k1 = f(&y);
    while now < t {
        if now + h > t {
            h = t - now;
        }
        let k2 = f(&(y + k1 * (h / 5.0)));
        let k3 = f(&(y + (k1 * (3.0 / 40.0) + k2 * (9.0 / 40.0)) * h));
        let k4 = f(&(y + (k1 * (44.0 / 45.0) - k2 * (56.0 / 15.0) + k3 * (32.0 / 9.0)) * h));
        let k5 = f(&(y
            + (k1 * (19372.0 / 6561.0) - k2 * (25360.0 / 2187.0) + k3 * (64448.0 / 6561.0)
                - k4 * (212.0 / 729.0))
                * h));
        let k6 = f(&(y
            + (k1 * (9017.0 / 3168.0) - k2 * (355.0 / 33.0)
                + k3 * (46732.0 / 5247.0)
                + k4 * (49.0 / 176.0)
                - k5 * (5103.0 / 18656.0))
                * h));
        let y5 = y
            + (k1 * (35.0 / 384.0) + k3 * (500.0 / 1113.0) + k4 * (125.0 / 192.0)
                - k5 * (2187.0 / 6784.0)
                + k6 * (11.0 / 84.0))
                * h;
        let k7 = f(&y5);
        let err = (k1 * (71.0 / 57600.0) - k3 * (71.0 / 16695.0) + k4 * (71.0 / 1920.0)
            - k5 * (17253.0 / 339200.0)
            + k6 * (22.0 / 525.0)
            - k7 * (1.0 / 40.0))
            * h;
        let scale = y.abs().sup(&y5.abs()).map(|x| tol * (x + 1.0));
        let ratio = err.component_div(&scale).abs().max();
        if ratio <= 1.0 {
            now += h;
            y = y5;
            k1 = k7;
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * t.max(1.0) {
            return Err(Error::InvalidParameter(
                "adaptive step size underflow".into(),
            ));
        }
    }
    Ok(from_vector(&y))
}

/// Eigenvalues of the drift matrix.
pub fn drift_spectrum(gen: &DriftAffine) -> Vec<C64> {
    if let Some(rate) = gen.uniform_rate() {
        return vec![C64::new(-rate, 0.0); 10];
    }
    let scale = gen.drift.abs().max();
    if scale == 0.0 {
        return vec![C64::new(0.0, 0.0); 10];
    }
    // The default deflation threshold (machine epsilon, no iteration cap)
    // can stall on the strongly degenerate spectra these generators have.
    let schur = Schur::try_new(gen.drift, 1e-14, 10_000)
        .or_else(|| Schur::try_new(gen.drift, 1e-12, 100_000))
        .expect("Schur decomposition of a finite 10×10 matrix");
    schur.complex_eigenvalues().iter().copied().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Asymptote {
    /// Unique fixed point `v* = −M⁻¹c`; `condition` is the 2-norm condition
    /// number of `M`, flagged when above [`COND_LIMIT`].
    Stable {
        state: TwoModeCovariance,
        condition: f64,
    },
    /// `M` is not Hurwitz; carries the eigenvalues with non-negative real part
    /// (within the margin).
    Divergent { offending: Vec<C64> },
}

impl Asymptote {
    pub fn state(&self) -> Option<&TwoModeCovariance> {
        match self {
            Asymptote::Stable { state, .. } => Some(state),
            Asymptote::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Asymptote::Divergent { .. })
    }

    pub fn ill_conditioned(&self) -> bool {
        matches!(self, Asymptote::Stable { condition, .. } if *condition > COND_LIMIT)
    }
}

/// Whether every eigenvalue of `M` has real part below
/// `−DIVERGENCE_MARGIN·‖M‖`.
pub fn is_hurwitz(gen: &DriftAffine) -> bool {
    offending_eigenvalues(gen).is_empty()
}

fn offending_eigenvalues(gen: &DriftAffine) -> Vec<C64> {
    let threshold = -DIVERGENCE_MARGIN * gen.drift.norm();
    drift_spectrum(gen)
        .into_iter()
        .filter(|z| z.re >= threshold)
        .collect()
}

pub fn asymptotic_state(gen: &DriftAffine) -> Result<Asymptote> {
    if !gen.is_finite() {
        return Err(Error::InvalidParameter(
            "generator has non-finite entries".into(),
        ));
    }
    let offending = offending_eigenvalues(gen);
    if !offending.is_empty() {
        return Ok(Asymptote::Divergent { offending });
    }
    let sv = gen.drift.singular_values();
    let condition = sv.max() / sv.min();
    let lu = gen.drift.lu();
    let v = lu
        .solve(&(-gen.source))
        .ok_or_else(|| Error::InvalidParameter("singular drift matrix".into()))?;
    Ok(Asymptote::Stable {
        state: from_vector(&v),
        condition,
    })
}

/// One stage of a piecewise-constant protocol; `duration = None` marks an
/// unbounded final stage.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub generator: DriftAffine,
    pub duration: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    stages: Vec<Stage>,
}

impl Schedule {
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidParameter(
                "schedule needs at least one stage".into(),
            ));
        }
        let last = stages.len() - 1;
        for (i, s) in stages.iter().enumerate() {
            match s.duration {
                Some(d) if !(d >= 0.0) || !d.is_finite() => {
                    return Err(Error::InvalidParameter(format!("stage {i} duration {d}")));
                }
                None if i != last => {
                    return Err(Error::InvalidParameter(format!(
                        "only the final stage may be unbounded (stage {i})"
                    )));
                }
                _ => {}
            }
        }
        Ok(Self { stages })
    }

    pub fn single(generator: DriftAffine) -> Self {
        Self {
            stages: vec![Stage {
                generator,
                duration: None,
            }],
        }
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Total duration; infinite when the last stage is unbounded.
    pub fn total_duration(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| s.duration.unwrap_or(f64::INFINITY))
            .sum()
    }

    pub fn is_unbounded(&self) -> bool {
        self.stages.last().is_some_and(|s| s.duration.is_none())
    }

    /// Stage index and stage-local time at absolute time `t`. Boundary times
    /// belong to the earlier stage.
    pub fn locate(&self, t: f64) -> Option<(usize, f64)> {
        let mut start = 0.0;
        for (i, s) in self.stages.iter().enumerate() {
            let end = s.duration.map_or(f64::INFINITY, |d| start + d);
            if t <= end {
                return Some((i, t - start));
            }
            start = end;
        }
        None
    }
}

/// Time-stamped covariance matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<TwoModeCovariance>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<TwoModeCovariance>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidParameter(
                "times and states differ in length".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "times must be strictly ascending".into(),
            ));
        }
        for (t, s) in times.iter().zip(&states) {
            if !s.is_physical(PHYSICAL_TOL) {
                return Err(Error::PhysicalityLost {
                    time: *t,
                    nu_minus: s.nu_minus_checked().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[TwoModeCovariance] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn simon_series(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.simon_s()).collect()
    }

    /// EoF where the state is symmetric, `None` elsewhere.
    pub fn eof_series(&self) -> Vec<Option<f64>> {
        self.states.iter().map(|s| s.eof_symmetric().ok()).collect()
    }

    pub fn log_negativity_series(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.log_negativity()).collect()
    }

    pub fn epr_series(&self, pair: &crate::covariance::EprPair) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| s.epr_variance_sum(pair))
            .collect()
    }
}

/// Piecewise propagation through a schedule, sampled at ascending times.
pub fn run_schedule(
    v0: &TwoModeCovariance,
    schedule: &Schedule,
    sample_times: &[f64],
) -> Result<Trajectory> {
    if !v0.is_physical(PHYSICAL_TOL) {
        return Err(Error::NonPhysical {
            nu_minus: v0.nu_minus_checked().unwrap_or(f64::NAN),
        });
    }
    if sample_times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "sample times must be strictly ascending".into(),
        ));
    }
    let total = schedule.total_duration();
    if let Some(&t) = sample_times.iter().find(|&&t| !(t >= 0.0) || t > total) {
        return Err(Error::InvalidParameter(format!(
            "sample time {t} outside [0, {total}]"
        )));
    }
    // state at the start of each stage
    let mut starts = vec![*v0];
    for s in &schedule.stages()[..schedule.stages().len() - 1] {
        let d = s.duration.expect("bounded inner stage");
        let next = propagate(starts.last().unwrap(), &s.generator, d)?;
        starts.push(next);
    }
    let mut states = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let (i, local) = schedule.locate(t).expect("time inside schedule");
        let st = propagate(&starts[i], &schedule.stages()[i].generator, local)?;
        if !st.is_physical(PHYSICAL_TOL) {
            return Err(Error::PhysicalityLost {
                time: t,
                nu_minus: st.nu_minus_checked().unwrap_or(f64::NAN),
            });
        }
        states.push(st);
    }
    Trajectory::new(sample_times.to_vec(), states)
}
