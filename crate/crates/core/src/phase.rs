//! Asymptotic entanglement phases, the symmetric phase boundary, sudden-death
//! times and parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::TwoModeCovariance;
use crate::dynamics::{asymptotic_state, interpolate, propagate, time_for_progress, Asymptote};
use crate::error::{Error, Result};
use crate::reservoir::{drift, Convention, DriftAffine, EngineeredParams, Variant};

/// Default half-width of the boundary band in Simon `S`.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Required agreement between the analytic boundary and its bisection check.
pub const BOUNDARY_CHECK_TOL: f64 = 1e-9;

/// Distance from `p = 1` treated as the threshold case in [`esd_time_closed`].
pub const ESD_P_SNAP: f64 = 1e-12;

/// Bracketing samples used by the numeric sudden-death search.
const SCAN_POINTS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseTag {
    PersistentEntanglement,
    SuddenDeath,
    Boundary,
    Divergent,
}

impl PhaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            PhaseTag::PersistentEntanglement => "persistent_entanglement",
            PhaseTag::SuddenDeath => "sudden_death",
            PhaseTag::Boundary => "boundary",
            PhaseTag::Divergent => "divergent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub tag: PhaseTag,
    /// Simon `S` of the asymptotic state; `None` when divergent.
    pub s_value: Option<f64>,
}

impl Phase {
    pub fn from_simon(s: f64, boundary_tol: f64) -> Self {
        let tag = if s < -boundary_tol {
            PhaseTag::PersistentEntanglement
        } else if s > boundary_tol {
            PhaseTag::SuddenDeath
        } else {
            PhaseTag::Boundary
        };
        Self {
            tag,
            s_value: Some(s),
        }
    }
}

/// Phase of the asymptotic state of the given reservoir.
pub fn classify(
    params: &EngineeredParams,
    variant: Variant,
    conv: Convention,
    boundary_tol: f64,
) -> Result<Phase> {
    if !(boundary_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "boundary_tol = {boundary_tol} must be > 0"
        )));
    }
    let gen = drift(params, variant, conv)?;
    Ok(match asymptotic_state(&gen)? {
        Asymptote::Divergent { .. } => Phase {
            tag: PhaseTag::Divergent,
            s_value: None,
        },
        Asymptote::Stable { state, .. } => Phase::from_simon(state.simon_s(), boundary_tol),
    })
}

/// Closed-form boundary `n_T* = (1 − e^{−2r})/(2R)` of the symmetric reservoir.
pub fn boundary_nt_analytic(r: f64, ratio: f64) -> f64 {
    -(-2.0 * r).exp_m1() / (2.0 * ratio)
}

/// The boundary as printed in the source article, `(e^{2r} − 1)/(2R)`.
/// Kept only for side-by-side comparison.
pub fn boundary_nt_printed(r: f64, ratio: f64) -> f64 {
    (2.0 * r).exp_m1() / (2.0 * ratio)
}

fn asymptotic_simon(
    r: f64,
    phi: f64,
    ratio: f64,
    n_t: f64,
    variant: Variant,
    conv: Convention,
) -> Result<Option<f64>> {
    let gen = drift(&sweep_params(r, phi, ratio, n_t, variant), variant, conv)?;
    Ok(asymptotic_state(&gen)?.state().map(|s| s.simon_s()))
}

/// Root of `S(asymptotic state)` in `n_T` by bisection, for any variant.
/// `None` when the asymptotic state is already separable at `n_T = 0` or
/// the dynamics diverge.
pub fn boundary_nt_numeric(
    r: f64,
    phi: f64,
    ratio: f64,
    variant: Variant,
    conv: Convention,
) -> Result<Option<f64>> {
    check_boundary_args(r, ratio)?;
    let s = |n_t: f64| asymptotic_simon(r, phi, ratio, n_t, variant, conv);
    match s(0.0)? {
        Some(v) if v < 0.0 => {}
        _ => return Ok(None),
    }
    let mut lo = 0.0;
    let mut hi = 1.0 / ratio;
    loop {
        match s(hi)? {
            None => return Ok(None),
            Some(v) if v > 0.0 => break,
            Some(_) => {
                lo = hi;
                hi *= 2.0;
                if hi > 1e12 {
                    return Ok(None);
                }
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match s(mid)? {
            Some(v) if v > 0.0 => hi = mid,
            Some(_) => lo = mid,
            None => return Ok(None),
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Root of `S(asymptotic state)` in `n_T` by bisection for the symmetric
/// reservoir.
pub fn boundary_nt_bisection(r: f64, ratio: f64) -> Result<f64> {
    boundary_nt_numeric(r, 0.0, ratio, Variant::Symmetric, Convention::Derived)?
        .ok_or_else(|| Error::InvalidParameter("no boundary found".into()))
}

fn check_boundary_args(r: f64, ratio: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() || !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "boundary needs r > 0 and R > 0 (got r = {r}, R = {ratio})"
        )));
    }
    Ok(())
}

/// Thermal photon number at which the symmetric asymptotic state becomes
/// separable. The closed form is always checked against bisection.
pub fn boundary_nt(r: f64, ratio: f64) -> Result<f64> {
    check_boundary_args(r, ratio)?;
    let analytic = boundary_nt_analytic(r, ratio);
    let numeric = boundary_nt_bisection(r, ratio)?;
    let diff = (analytic - numeric).abs();
    if diff > BOUNDARY_CHECK_TOL * analytic.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "boundary cross-check failed: analytic {analytic}, bisection {numeric}"
        )));
    }
    Ok(analytic)
}

/// Sudden-death time. `t_esd` is finite exactly when `p_esd ∈ (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsdResult {
    pub p_esd: Option<f64>,
    pub t_esd: f64,
}

impl EsdResult {
    pub fn is_finite(&self) -> bool {
        self.t_esd.is_finite()
    }

    fn never() -> Self {
        Self {
            p_esd: None,
            t_esd: f64::INFINITY,
        }
    }
}

/// Sudden-death progress and time (in units of `λ⁻¹`) for the ideal
/// two-mode squeezed vacuum relaxing in the symmetric reservoir.
pub fn esd_time_closed(r: f64, phi: f64, ratio: f64, n_t: f64) -> EsdResult {
    let _ = phi; // only |AB| and |B|² enter
    let b2 = r.sinh().powi(2);
    let ab = r.sinh() * r.cosh();
    let gap = (1.0 + ratio) * (b2 - ab);
    let mut p = gap / (gap - b2 - n_t * ratio + ab);
    // on the boundary itself round-off would give a huge finite time
    if (p - 1.0).abs() <= ESD_P_SNAP {
        p = 1.0;
    }
    if p > 0.0 && p < 1.0 {
        EsdResult {
            p_esd: Some(p),
            t_esd: ratio / (2.0 * (1.0 + ratio)) * (-(-p).ln_1p()),
        }
    } else {
        EsdResult {
            p_esd: p.is_finite().then_some(p),
            t_esd: f64::INFINITY,
        }
    }
}

/// A zero of Simon `S` along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Progress variable, when the generator has a single relaxation rate.
    pub p: Option<f64>,
    pub t: f64,
    /// `true` when the state leaves the entangled set.
    pub into_separable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsdNumeric {
    pub esd: EsdResult,
    /// Re-entry into the entangled set after the first death, if any.
    pub revival: Option<Crossing>,
    pub crossings: Vec<Crossing>,
}

fn sign(s: f64, tol: f64) -> i8 {
    if s > tol {
        1
    } else if s < -tol {
        -1
    } else {
        0
    }
}

/// Bisect for a sign change of `f` on `[lo, hi]` where `f(lo) < 0 < f(hi)`
/// or vice versa.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let s_lo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locate the strict sign changes of `f` over the sampled abscissae.
fn scan_crossings(xs: &[f64], f: &impl Fn(f64) -> f64) -> Vec<(f64, bool)> {
    let mut out = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for &x in xs {
        let s = sign(f(x), 0.0);
        if s == 0 {
            continue;
        }
        if let Some((x0, s0)) = last {
            if s != s0 {
                out.push((bisect(x0, x, f), s > 0));
            }
        }
        last = Some((x, s));
    }
    out
}

/// Numeric sudden-death search along the trajectory from `v0` under `gen`.
/// Single-rate generators are searched in the progress variable, others
/// over a time horizon set by the slowest relaxation rate.
pub fn esd_time_numeric(v0: &TwoModeCovariance, gen: &DriftAffine) -> Result<EsdNumeric> {
    let s0 = v0.simon_s();
    if !(s0 < 0.0) {
        return Err(Error::NotEntangled(s0));
    }
    let vf = match asymptotic_state(gen)? {
        Asymptote::Stable { state, .. } => state,
        Asymptote::Divergent { .. } => {
            return Err(Error::InvalidParameter(
                "sudden-death search needs a stable generator".into(),
            ))
        }
    };
    let s_final = vf.simon_s();

    let crossings: Vec<Crossing> = if let Some(rate) = gen.uniform_rate() {
        let f = |p: f64| interpolate(v0, &vf, p).simon_s();
        let ps: Vec<f64> = (0..=SCAN_POINTS)
            .map(|i| i as f64 / SCAN_POINTS as f64)
            .collect();
        scan_crossings(&ps, &f)
            .into_iter()
            .filter(|(p, _)| *p < 1.0)
            .map(|(p, into)| Crossing {
                p: Some(p),
                t: time_for_progress(rate, p),
                into_separable: into,
            })
            .collect()
    } else {
        let slowest = crate::dynamics::drift_spectrum(gen)
            .iter()
            .map(|z| -z.re)
            .fold(f64::INFINITY, f64::min);
        // map q ∈ [0, 1) onto t = −ln(1 − q)/γ_min, covering ~30 e-folds
        let q_max = 1.0 - 1e-13;
        let to_t = |q: f64| -(-q).ln_1p() / slowest;
        let f = |q: f64| {
            propagate(v0, gen, to_t(q))
                .map(|v| v.simon_s())
                .unwrap_or(f64::NAN)
        };
        let qs: Vec<f64> = (0..=SCAN_POINTS)
            .map(|i| q_max * i as f64 / SCAN_POINTS as f64)
            .collect();
        scan_crossings(&qs, &f)
            .into_iter()
            .map(|(q, into)| Crossing {
                p: None,
                t: to_t(q),
                into_separable: into,
            })
            .collect()
    };

    let first_death = crossings.iter().position(|c| c.into_separable);
    let esd = match first_death {
        Some(i) => EsdResult {
            p_esd: crossings[i].p,
            t_esd: crossings[i].t,
        },
        None if sign(s_final, BOUNDARY_TOL) == 0 => EsdResult {
            p_esd: Some(1.0),
            t_esd: f64::INFINITY,
        },
        None => EsdResult::never(),
    };
    let revival = first_death.and_then(|i| {
        crossings[i + 1..]
            .iter()
            .find(|c| !c.into_separable)
            .copied()
    });
    Ok(EsdNumeric {
        esd,
        revival,
        crossings,
    })
}

/// Number of sign changes of `S` along the sampled values, ignoring samples
/// within `tol` of zero.
pub fn count_sign_changes(values: &[f64], tol: f64) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for &v in values {
        let s = sign(v, tol);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Symmetric reservoir (`λ = 1`) whose asymptotic state has the given
/// `n_f` and real `m_c,f` at ratio `R`.
pub fn params_for_asymptote(n_f: f64, mc_f: f64, ratio: f64) -> Result<EngineeredParams> {
    if !(ratio > 0.0) || !(mc_f >= 0.0) || !(n_f >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need R > 0, n_f ≥ 0, m_c,f ≥ 0 (got {ratio}, {n_f}, {mc_f})"
        )));
    }
    // sinh(2r)/2 = AB = m_c,f (1 + R)
    let r = 0.5 * (2.0 * mc_f * (1.0 + ratio)).asinh();
    let n_t = (n_f * (1.0 + ratio) - r.sinh().powi(2)) / ratio;
    if n_t < -1e-12 {
        return Err(Error::InvalidParameter(format!(
            "asymptote (n_f = {n_f}, m_c,f = {mc_f}) needs n_T = {n_t} < 0 at R = {ratio}"
        )));
    }
    Ok(EngineeredParams::from_ratio(r, ratio, n_t.max(0.0)))
}

/// EoF of the state reached from vacuum after time `t` (units of `κ⁻¹`)
/// in the symmetric reservoir at ratio `R`, normalized by the EoF of the
/// ideal two-mode squeezed vacuum.
pub fn robustness_ratio(r: f64, n_t: f64, ratio: f64, t: f64) -> Result<f64> {
    let (num, den) = robustness_eof(r, n_t, ratio, t)?;
    Ok(num / den)
}

/// Unnormalized EoF and the ideal reference for [`robustness_ratio`].
pub fn robustness_eof(r: f64, n_t: f64, ratio: f64, t: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r = {r} must be > 0")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be > 0")));
    }
    if !(ratio >= 0.0) || !(n_t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "R = {ratio} and nT = {n_t} must be ≥ 0"
        )));
    }
    // κ = 1, λ = R
    let p = crate::dynamics::progress(2.0 * (1.0 + ratio), t);
    let b2 = r.sinh().powi(2);
    let ab = r.sinh() * r.cosh();
    let n = p * (b2 + n_t * ratio) / (1.0 + ratio);
    let mc = p * ab / (1.0 + ratio);
    let eof = TwoModeCovariance::real_symmetric(n, 0.0, mc).eof_symmetric()?;
    let ideal = TwoModeCovariance::tmsv(r, 0.0).eof_symmetric()?;
    Ok((eof, ideal))
}

/// One evaluated point of a sweep over `(R, n_T)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ratio: f64,
    pub n_t: f64,
    pub phase: Phase,
    /// EoF for the symmetric variant, log-negativity otherwise.
    pub entanglement: Option<f64>,
    /// Closed-form sudden-death time of the ideal initial state (symmetric only).
    pub esd: Option<EsdResult>,
    pub divergent: bool,
}

/// Reservoir at a sweep point, normalized to `λ = 1`, `κ₁ = 1/R`.
pub fn sweep_params(r: f64, phi: f64, ratio: f64, n_t: f64, variant: Variant) -> EngineeredParams {
    let p = match variant {
        Variant::Asymmetric => EngineeredParams::asymmetric(r, 1.0 / ratio, 1.0, n_t),
        _ => EngineeredParams::from_ratio(r, ratio, n_t),
    };
    p.with_phi(phi)
}

fn sweep_point(
    r: f64,
    phi: f64,
    ratio: f64,
    n_t: f64,
    variant: Variant,
    conv: Convention,
) -> Result<SweepRow> {
    let params = sweep_params(r, phi, ratio, n_t, variant);
    let gen = drift(&params, variant, conv)?;
    let asym = asymptotic_state(&gen)?;
    let (phase, entanglement) = match &asym {
        Asymptote::Divergent { .. } => (
            Phase {
                tag: PhaseTag::Divergent,
                s_value: None,
            },
            None,
        ),
        Asymptote::Stable { state, .. } => {
            let ent = match variant {
                Variant::Asymmetric => Some(state.log_negativity()),
                _ => state.eof_symmetric().ok(),
            };
            (Phase::from_simon(state.simon_s(), BOUNDARY_TOL), ent)
        }
    };
    let esd = match variant {
        Variant::Asymmetric => None,
        _ => Some(esd_time_closed(r, phi, ratio, n_t)),
    };
    Ok(SweepRow {
        ratio,
        n_t,
        phase,
        entanglement,
        esd,
        divergent: asym.is_divergent(),
    })
}

/// Evaluate every `(R, n_T)` pair, `R` outermost. Points run in parallel;
/// the output order is the grid order.
pub fn sweep(
    r: f64,
    phi: f64,
    ratios: &[f64],
    n_ts: &[f64],
    variant: Variant,
    conv: Convention,
) -> Result<Vec<SweepRow>> {
    if ratios.is_empty() || n_ts.is_empty() {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    if let Some(bad) = ratios.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "R = {bad} must be finite and > 0"
        )));
    }
    let points: Vec<(f64, f64)> = ratios
        .iter()
        .flat_map(|&ratio| n_ts.iter().map(move |&n_t| (ratio, n_t)))
        .collect();
    points
        .par_iter()
        .map(|&(ratio, n_t)| sweep_point(r, phi, ratio, n_t, variant, conv))
        .collect()
}

/// `n` evenly spaced values over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::drift_symmetric;
    use approx::assert_abs_diff_eq;

    fn classify_sym(r: f64, ratio: f64, n_t: f64) -> Phase {
        classify(
            &EngineeredParams::from_ratio(r, ratio, n_t),
            Variant::Symmetric,
            Convention::Derived,
            BOUNDARY_TOL,
        )
        .unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_sym(1.0, 1.0, 0.0).tag,
            PhaseTag::PersistentEntanglement
        );
        assert_eq!(classify_sym(1.0, 1.0, 1.0).tag, PhaseTag::SuddenDeath);
        let at = boundary_nt_analytic(1.0, 1.0);
        assert_eq!(classify_sym(1.0, 1.0, at).tag, PhaseTag::Boundary);
        let p = EngineeredParams::asymmetric(1.0, 1.0, 0.0, 0.0);
        let ph = classify(&p, Variant::Asymmetric, Convention::Derived, BOUNDARY_TOL).unwrap();
        assert_eq!(
            ph,
            Phase {
                tag: PhaseTag::Divergent,
                s_value: None
            }
        );
        assert!(classify(&p, Variant::Symmetric, Convention::Derived, 0.0).is_err());
    }

    #[test]
    fn boundary_examples() {
        assert_abs_diff_eq!(boundary_nt(1.0, 1.0).unwrap(), 0.432_332_3, epsilon = 1e-7);
        assert_abs_diff_eq!(boundary_nt(1.0, 2.0).unwrap(), 0.216_166_1, epsilon = 1e-7);
        assert!(boundary_nt(1e-6, 1.0).unwrap() < 1e-5);
        assert!(boundary_nt(0.0, 1.0).is_err());
        assert!(boundary_nt(1.0, 0.0).is_err());
        assert_abs_diff_eq!(
            boundary_nt_printed(1.0, 1.0),
            (2f64.exp() - 1.0) / 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn numeric_boundary_for_every_variant() {
        let sym = boundary_nt_numeric(1.0, 0.0, 1.0, Variant::Symmetric, Convention::Derived)
            .unwrap()
            .unwrap();
        assert_abs_diff_eq!(sym, boundary_nt_analytic(1.0, 1.0), epsilon = 1e-12);
        let laser = boundary_nt_numeric(1.0, 0.4, 1.0, Variant::LaserFrame, Convention::Derived)
            .unwrap()
            .unwrap();
        assert_abs_diff_eq!(laser, sym, epsilon = 1e-12);
        let asym = boundary_nt_numeric(1.0, 0.0, 1.0, Variant::Asymmetric, Convention::Derived)
            .unwrap()
            .unwrap();
        let p = sweep_params(1.0, 0.0, 1.0, asym, Variant::Asymmetric);
        let ph = classify(&p, Variant::Asymmetric, Convention::Derived, 1e-9).unwrap();
        assert_eq!(ph.tag, PhaseTag::Boundary);
    }

    #[test]
    fn boundary_monotone() {
        let rs = linspace(0.1, 2.5, 12);
        let ratios = linspace(0.1, 5.0, 12);
        for &r in &rs {
            let b: Vec<f64> = ratios.iter().map(|&x| boundary_nt(r, x).unwrap()).collect();
            assert!(b.windows(2).all(|w| w[1] < w[0]));
        }
        for &x in &ratios {
            let b: Vec<f64> = rs.iter().map(|&r| boundary_nt(r, x).unwrap()).collect();
            assert!(b.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn esd_closed_examples() {
        let e = esd_time_closed(1.0, 0.0, 1.0, 1.0);
        assert_abs_diff_eq!(e.p_esd.unwrap(), 0.603_675_9, epsilon = 1e-6);
        assert_abs_diff_eq!(e.t_esd, 0.2314, epsilon = 1e-4);

        let e = esd_time_closed(1.0, 0.0, 1.0, 0.2);
        assert!(e.t_esd.is_infinite());
        assert_abs_diff_eq!(e.p_esd.unwrap(), 1.3674, epsilon = 1e-4);

        let at = boundary_nt_analytic(1.0, 1.0);
        let e = esd_time_closed(1.0, 0.0, 1.0, at);
        assert!(e.t_esd.is_infinite());
        assert_abs_diff_eq!(e.p_esd.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn esd_closed_is_phase_independent() {
        let a = esd_time_closed(0.8, 0.0, 0.7, 0.9);
        let b = esd_time_closed(0.8, 1.3, 0.7, 0.9);
        assert_eq!(a, b);
    }

    #[test]
    fn esd_closed_matches_numeric() {
        for (r, ratio, n_t) in [
            (1.0, 1.0, 1.0),
            (0.5, 0.3, 2.0),
            (1.7, 4.0, 0.4),
            (0.3, 2.0, 0.5),
        ] {
            let closed = esd_time_closed(r, 0.0, ratio, n_t);
            let gen = drift_symmetric(
                &EngineeredParams::from_ratio(r, ratio, n_t),
                Convention::Derived,
            )
            .unwrap();
            let num = esd_time_numeric(&TwoModeCovariance::tmsv(r, 0.0), &gen).unwrap();
            assert!(closed.is_finite(), "{r} {ratio} {n_t}");
            let rel = (num.esd.t_esd - closed.t_esd).abs() / closed.t_esd;
            assert!(rel < 1e-9, "{rel}");
            assert!(num.revival.is_none());
        }
    }

    #[test]
    fn esd_numeric_for_multi_rate_generator() {
        // the laser-frame generator has complex eigenvalues, forcing the
        // time-domain search; with m₁ = m₂ = m_s = 0 it must match the
        // symmetric answer
        let p = EngineeredParams::from_ratio(1.0, 1.0, 1.0).with_splitting(3.0);
        let gen = crate::reservoir::drift_laser_frame(&p, Convention::Derived).unwrap();
        assert!(gen.uniform_rate().is_none());
        let num = esd_time_numeric(&TwoModeCovariance::tmsv(1.0, 0.0), &gen).unwrap();
        let closed = esd_time_closed(1.0, 0.0, 1.0, 1.0);
        assert!(num.esd.p_esd.is_none());
        assert!((num.esd.t_esd - closed.t_esd).abs() < 1e-9);
    }

    #[test]
    fn esd_numeric_rejects_separable() {
        let gen = drift_symmetric(
            &EngineeredParams::from_ratio(1.0, 1.0, 1.0),
            Convention::Derived,
        )
        .unwrap();
        assert!(matches!(
            esd_time_numeric(&TwoModeCovariance::vacuum(), &gen),
            Err(Error::NotEntangled(_))
        ));
    }

    #[test]
    fn asymptote_helper() {
        let p = params_for_asymptote(1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.r, 4f64.asinh() / 2.0, epsilon = 1e-15);
        let gen = drift_symmetric(&p, Convention::Derived).unwrap();
        let v = asymptotic_state(&gen).unwrap();
        let v = v.state().unwrap();
        assert_abs_diff_eq!(v.n1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.mc.re, 1.0, epsilon = 1e-12);
        assert!(params_for_asymptote(0.1, 1.0, 1.0).is_err());
    }

    fn scenario(v0: TwoModeCovariance, n_f: f64) -> (Vec<f64>, EsdNumeric) {
        let p = params_for_asymptote(n_f, 1.0, 1.0).unwrap();
        let gen = drift_symmetric(&p, Convention::Derived).unwrap();
        let vf = *asymptotic_state(&gen).unwrap().state().unwrap();
        let s: Vec<f64> = linspace(0.0, 1.0, 1000)
            .iter()
            .map(|&q| interpolate(&v0, &vf, q).simon_s())
            .collect();
        (s, esd_time_numeric(&v0, &gen).unwrap())
    }

    #[test]
    fn relaxation_scenarios() {
        let (s, num) = scenario(TwoModeCovariance::real_symmetric(1.0, 0.0, 1.0125), 1.0);
        assert!(s.iter().all(|&x| x <= BOUNDARY_TOL));
        assert_abs_diff_eq!(*s.last().unwrap(), 0.0, epsilon = 1e-9);
        assert_eq!(count_sign_changes(&s, BOUNDARY_TOL), 0);
        assert_eq!(num.esd.p_esd, Some(1.0));
        assert!(num.esd.t_esd.is_infinite());

        let b0 = TwoModeCovariance::real_symmetric(1.2, 0.5, 1.0);
        let (s, num) = scenario(b0, 1.0);
        assert_eq!(count_sign_changes(&s, BOUNDARY_TOL), 1);
        assert!(num.esd.is_finite());
        assert!(num.revival.is_none());

        let (s, num) = scenario(b0, 0.95);
        assert_eq!(count_sign_changes(&s, BOUNDARY_TOL), 2);
        let rev = num.revival.unwrap();
        assert!(rev.t > num.esd.t_esd);
        assert_eq!(num.crossings.len(), 2);
    }

    #[test]
    fn instantaneous_epr_pair_is_best() {
        let v0 = TwoModeCovariance::real_symmetric(1.2, 0.5, 1.0);
        let vf = TwoModeCovariance::real_symmetric(0.95, 0.0, 1.0);
        let first = v0.optimal_epr_squeeze().unwrap().pair;
        let last = vf.optimal_epr_squeeze().unwrap().pair;
        for q in linspace(0.0, 1.0, 101) {
            let v = interpolate(&v0, &vf, q);
            let best = v.optimal_epr_squeeze().unwrap().min_sum;
            assert!(best <= v.epr_variance_sum(&first) + 1e-12);
            assert!(best <= v.epr_variance_sum(&last) + 1e-12);
        }
    }

    #[test]
    fn threshold_equivalence() {
        let rs = linspace(0.05, 2.5, 20);
        let ratios = linspace(0.05, 5.0, 20);
        let n_ts = linspace(0.01, 2.0, 20);
        for &r in &rs {
            for &x in &ratios {
                let rows =
                    sweep(r, 0.0, &[x], &n_ts, Variant::Symmetric, Convention::Derived).unwrap();
                for row in rows {
                    let sudden = row.phase.tag == PhaseTag::SuddenDeath;
                    let finite = row.esd.unwrap().is_finite();
                    let above = row.n_t > boundary_nt_analytic(r, x) + BOUNDARY_TOL;
                    assert_eq!(sudden, finite, "r={r} R={x} nT={}", row.n_t);
                    assert_eq!(sudden, above, "r={r} R={x} nT={}", row.n_t);
                }
            }
        }
    }

    #[test]
    fn eof_sweep_properties() {
        let r = 1.0;
        let ratios = linspace(0.05, 5.0, 60);
        let rows = sweep(
            r,
            0.0,
            &ratios,
            &[0.0],
            Variant::Symmetric,
            Convention::Derived,
        )
        .unwrap();
        let e: Vec<f64> = rows.iter().map(|x| x.entanglement.unwrap()).collect();
        assert!(e.iter().all(|&x| x > 0.0));
        assert!(e.windows(2).all(|w| w[1] < w[0]));

        for n_t in [0.1, 0.5, 1.0] {
            let cut = boundary_nt_analytic(r, 1.0) / n_t; // R* = (1 − e^{−2r})/(2 nT)
            let rows = sweep(
                r,
                0.0,
                &ratios,
                &[n_t],
                Variant::Symmetric,
                Convention::Derived,
            )
            .unwrap();
            for row in rows {
                let e = row.entanglement.unwrap();
                if row.ratio > cut {
                    assert_eq!(e, 0.0, "R = {}", row.ratio);
                } else {
                    assert!(e > 0.0);
                }
            }
        }
    }

    #[test]
    fn sweep_keeps_grid_order_and_flags() {
        let ratios = [0.5, 1.0, 2.0];
        let n_ts = [0.0, 0.3];
        let rows = sweep(
            1.0,
            0.0,
            &ratios,
            &n_ts,
            Variant::Asymmetric,
            Convention::Derived,
        )
        .unwrap();
        let got: Vec<(f64, f64)> = rows.iter().map(|r| (r.ratio, r.n_t)).collect();
        assert_eq!(
            got,
            vec![
                (0.5, 0.0),
                (0.5, 0.3),
                (1.0, 0.0),
                (1.0, 0.3),
                (2.0, 0.0),
                (2.0, 0.3)
            ]
        );
        assert!(rows.iter().all(|r| !r.divergent && r.esd.is_none()));
        assert!(sweep(
            1.0,
            0.0,
            &[],
            &n_ts,
            Variant::Symmetric,
            Convention::Derived
        )
        .is_err());
        assert!(sweep(
            1.0,
            0.0,
            &[0.0],
            &n_ts,
            Variant::Symmetric,
            Convention::Derived
        )
        .is_err());
    }

    #[test]
    fn robustness_examples() {
        assert_abs_diff_eq!(
            robustness_ratio(1.0, 0.05, 0.0, f64::INFINITY).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert!(robustness_ratio(1.0, 0.05, 0.01, 3.0).unwrap() >= 0.9);
        let pinned = robustness_ratio(1.0, 0.05, 0.1, f64::INFINITY).unwrap();
        assert!(pinned > 0.0 && pinned < 1.0);
        assert!(robustness_ratio(0.0, 0.05, 0.1, 1.0).is_err());
    }

    #[test]
    fn robustness_more_sensitive_for_larger_squeezing() {
        for ratio in [0.05, 0.1, 0.3] {
            let v: Vec<f64> = [1.0, 1.5, 2.0, 2.5]
                .iter()
                .map(|&r| robustness_ratio(r, 0.05, ratio, f64::INFINITY).unwrap())
                .collect();
            assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
        }
    }

    #[test]
    fn sign_change_counting() {
        assert_eq!(count_sign_changes(&[-1.0, 0.0, -1.0], 1e-9), 0);
        assert_eq!(count_sign_changes(&[-1.0, 1e-12, 2.0, -3.0], 1e-9), 2);
        assert_eq!(count_sign_changes(&[], 1e-9), 0);
    }
}
