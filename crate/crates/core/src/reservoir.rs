//! Effective reservoir parameters and the linear-affine generators of the
//! second-moment equations.
//!
//! The engineered dissipators act on the squeezed modes
//! `b₁ = A a₁ − B a₂†`, `b₂ = A a₂ − B a₁†` (`A = cosh r`, `B = e^{iφ} sinh r`)
//! as `κ_j (2 b_j ρ b_j† − b_j† b_j ρ − ρ b_j† b_j)`; the thermal dissipator
//! acts on each `a_j` at rate `λ` with `n_T` thermal photons. Every moment
//! equation below follows from that master equation.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix10 = SMatrix<f64, 10, 10>;
pub type Vector10 = SVector<f64, 10>;

/// Coordinate slots of the 10-vector
/// `(n₁, n₂, Re m₁, Im m₁, Re m₂, Im m₂, Re m_c, Im m_c, Re m_s, Im m_s)`.
pub mod slot {
    pub const N1: usize = 0;
    pub const N2: usize = 1;
    /// Complex slots point at their real part; the imaginary part follows.
    pub const M1: usize = 2;
    pub const M2: usize = 4;
    pub const MC: usize = 6;
    pub const MS: usize = 8;
}

/// Which set of moment equations to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `κ₁ = κ₂`, interaction picture.
    Symmetric,
    /// Only type-1 atoms: `κ₂ = 0`.
    Asymmetric,
    /// `κ₁ = κ₂` seen from the laser frame (adds the `±2id` rotations).
    LaserFrame,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Symmetric => "symmetric",
            Variant::Asymmetric => "asymmetric",
            Variant::LaserFrame => "laser_frame",
        }
    }
}

/// Coefficient convention for the moment equations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Convention {
    /// Re-derived from the master equation.
    #[default]
    Derived,
    /// The printed coefficients, kept for side-by-side comparison. The
    /// asymmetric `ṅ₂` equation damps with `n₁`, the `m_c` source uses `AB*`
    /// and the asymmetric cross couplings follow the printed signs.
    PaperVerbatim,
}

/// Cavity and atom-beam parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    /// Atom–mode coupling (rad/s).
    pub g: f64,
    /// Classical drive strength (rad/s).
    pub omega: f64,
    /// Drive–atom detuning `ω_L − ω₀` (rad/s).
    pub delta: f64,
    /// Per-atom interaction time (s).
    pub tau: f64,
    /// Type-1 atom preparation rate (1/s).
    pub rate1: f64,
    /// Type-2 atom preparation rate (1/s).
    pub rate2: f64,
}

impl PhysicalSetup {
    /// The effective model assumes a drive much stronger than the cavity
    /// coupling; this only reports whether `|Ω| ≥ 10|g|`.
    pub fn strong_drive(&self) -> bool {
        self.omega.abs() >= 10.0 * self.g.abs()
    }

    /// Dressed splitting `d = √(Δ² + 4Ω²)`.
    pub fn dressed_splitting(&self) -> f64 {
        (self.delta * self.delta + 4.0 * self.omega * self.omega).sqrt()
    }

    /// `μ = min(tan²θ, tan⁻²θ)` with `tan θ = 2Ω/(d − Δ)`, written as
    /// `(2Ω/(d + |Δ|))²` so the `Ω → 0` limit is finite.
    pub fn mu(&self) -> f64 {
        let d = self.dressed_splitting();
        let t = 2.0 * self.omega / (d + self.delta.abs());
        t * t
    }
}

/// Effective reservoir parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineeredParams {
    /// Squeeze magnitude.
    pub r: f64,
    /// Squeeze angle, `r_μ = r e^{iφ}`.
    #[serde(default)]
    pub phi: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Cavity decay rate.
    pub lambda: f64,
    /// Thermal photon number.
    #[serde(rename = "nT")]
    pub n_t: f64,
    /// Dressed splitting, used only by the laser-frame equations.
    #[serde(default)]
    pub d: f64,
}

impl EngineeredParams {
    /// Symmetric reservoir with `κ₁ = κ₂ = κ`.
    pub fn symmetric(r: f64, kappa: f64, lambda: f64, n_t: f64) -> Self {
        Self {
            r,
            phi: 0.0,
            kappa1: kappa,
            kappa2: kappa,
            lambda,
            n_t,
            d: 0.0,
        }
    }

    /// Only type-1 atoms.
    pub fn asymmetric(r: f64, kappa1: f64, lambda: f64, n_t: f64) -> Self {
        Self {
            kappa2: 0.0,
            ..Self::symmetric(r, kappa1, lambda, n_t)
        }
    }

    /// Symmetric reservoir normalized to `λ = 1` with `R = λ/κ`.
    pub fn from_ratio(r: f64, ratio: f64, n_t: f64) -> Self {
        Self::symmetric(r, 1.0 / ratio, 1.0, n_t)
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_splitting(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    /// `A = cosh r`.
    pub fn a(&self) -> f64 {
        self.r.cosh()
    }

    /// `B = e^{iφ} sinh r`.
    pub fn b(&self) -> C64 {
        C64::from_polar(self.r.sinh(), self.phi)
    }

    /// `R = λ/κ₁`.
    pub fn ratio(&self) -> f64 {
        self.lambda / self.kappa1
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("r", self.r),
            ("phi", self.phi),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("lambda", self.lambda),
            ("nT", self.n_t),
            ("d", self.d),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v}")));
        }
        for (name, v) in [
            ("r", self.r),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("lambda", self.lambda),
            ("nT", self.n_t),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be ≥ 0")));
            }
        }
        Ok(())
    }
}

/// Maps a cavity/atom setup onto effective reservoir parameters.
pub fn effective_params(
    setup: &PhysicalSetup,
    lambda: f64,
    n_t: f64,
    phi: f64,
) -> Result<EngineeredParams> {
    if setup.omega == 0.0 && setup.delta == 0.0 {
        return Err(Error::InvalidParameter("Omega and Delta both zero".into()));
    }
    if !(setup.tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tau = {} must be > 0",
            setup.tau
        )));
    }
    let mu = setup.mu();
    if mu >= 1.0 {
        return Err(Error::DegenerateDrive);
    }
    let omega_b2 = setup.g * setup.g * (1.0 - mu) / (1.0 + mu);
    let kappa = |rate: f64| rate * omega_b2 * setup.tau * setup.tau / 4.0;
    let params = EngineeredParams {
        r: mu.atanh(),
        phi,
        kappa1: kappa(setup.rate1),
        kappa2: kappa(setup.rate2),
        lambda,
        n_t,
        d: setup.dressed_splitting(),
    };
    params.validate()?;
    Ok(params)
}

/// Linear-affine generator `v̇ = M v + c` in the fixed coordinate layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftAffine {
    pub drift: Matrix10,
    pub source: Vector10,
}

impl DriftAffine {
    pub fn zero() -> Self {
        Self {
            drift: Matrix10::zeros(),
            source: Vector10::zeros(),
        }
    }

    pub fn new(drift: Matrix10, source: Vector10) -> Self {
        Self { drift, source }
    }

    /// `γ` when `M = −γ·I` exactly; such generators move every coordinate
    /// along a straight line with progress `p(t) = 1 − e^{−γt}`.
    pub fn uniform_rate(&self) -> Option<f64> {
        let g = -self.drift[(0, 0)];
        let uniform = (0..10).all(|i| {
            (0..10).all(|j| {
                let want = if i == j { -g } else { 0.0 };
                self.drift[(i, j)] == want
            })
        });
        uniform.then_some(g)
    }

    pub fn is_finite(&self) -> bool {
        self.drift
            .iter()
            .chain(self.source.iter())
            .all(|x| x.is_finite())
    }
}

/// Accumulates real and complex-linear terms into a [`DriftAffine`].
struct Builder(DriftAffine);

impl Builder {
    fn new() -> Self {
        Self(DriftAffine::zero())
    }

    /// `ẋ_row += v · x_col` for real coordinates.
    fn real(&mut self, row: usize, col: usize, v: f64) {
        self.0.drift[(row, col)] += v;
    }

    /// `ż_tgt += a · z_src`.
    fn cplx(&mut self, tgt: usize, src: usize, a: C64) {
        let m = &mut self.0.drift;
        m[(tgt, src)] += a.re;
        m[(tgt, src + 1)] -= a.im;
        m[(tgt + 1, src)] += a.im;
        m[(tgt + 1, src + 1)] += a.re;
    }

    /// `ż_tgt += a · z_src*`.
    fn cplx_conj(&mut self, tgt: usize, src: usize, a: C64) {
        let m = &mut self.0.drift;
        m[(tgt, src)] += a.re;
        m[(tgt, src + 1)] += a.im;
        m[(tgt + 1, src)] += a.im;
        m[(tgt + 1, src + 1)] -= a.re;
    }

    /// `ż_tgt += a · x_col` with `x` real.
    fn cplx_from_real(&mut self, tgt: usize, col: usize, a: C64) {
        self.0.drift[(tgt, col)] += a.re;
        self.0.drift[(tgt + 1, col)] += a.im;
    }

    /// `ẋ_row += Re(a · z_src)`.
    fn real_from_cplx(&mut self, row: usize, src: usize, a: C64) {
        self.0.drift[(row, src)] += a.re;
        self.0.drift[(row, src + 1)] -= a.im;
    }

    /// Same rate on both parts of a complex slot.
    fn damp(&mut self, tgt: usize, rate: f64) {
        self.real(tgt, tgt, -rate);
        self.real(tgt + 1, tgt + 1, -rate);
    }

    fn source(&mut self, row: usize, v: f64) {
        self.0.source[row] += v;
    }

    fn source_cplx(&mut self, tgt: usize, a: C64) {
        self.0.source[tgt] += a.re;
        self.0.source[tgt + 1] += a.im;
    }

    fn finish(self) -> DriftAffine {
        self.0
    }
}

fn check_symmetric(p: &EngineeredParams) -> Result<f64> {
    p.validate()?;
    let scale = p.kappa1.abs().max(p.kappa2.abs());
    if (p.kappa1 - p.kappa2).abs() > 1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "symmetric reservoir needs kappa1 = kappa2 (got {} and {})",
            p.kappa1, p.kappa2
        )));
    }
    Ok(p.kappa1)
}

/// Symmetric reservoir:
///
/// ```text
/// ṅ_j = −2(κ+λ) n_j + 2κ|B|² + 2λ n_T
/// ṁ_j = −2(κ+λ) m_j
/// ṁ_c = −2(κ+λ) m_c + 2κ AB
/// ṁ_s = −2(κ+λ) m_s
/// ```
pub fn drift_symmetric(p: &EngineeredParams, conv: Convention) -> Result<DriftAffine> {
    let kappa = check_symmetric(p)?;
    let lambda = p.lambda;
    let (a, b) = (p.a(), p.b());
    let rate = 2.0 * (kappa + lambda);
    let mut bld = Builder::new();
    for n in [slot::N1, slot::N2] {
        bld.real(n, n, -rate);
        bld.source(n, 2.0 * kappa * b.norm_sqr() + 2.0 * lambda * p.n_t);
    }
    for z in [slot::M1, slot::M2, slot::MC, slot::MS] {
        bld.damp(z, rate);
    }
    let ab = match conv {
        Convention::Derived => a * b,
        Convention::PaperVerbatim => a * b.conj(),
    };
    bld.source_cplx(slot::MC, 2.0 * kappa * ab);
    Ok(bld.finish())
}

/// Laser-frame symmetric reservoir: [`drift_symmetric`] plus
/// `ṁ_j += (−1)^{j+1} 2id m_j` and `ṁ_s += 2id m_s`.
pub fn drift_laser_frame(p: &EngineeredParams, conv: Convention) -> Result<DriftAffine> {
    let mut bld = Builder(drift_symmetric(p, conv)?);
    let rot = C64::new(0.0, 2.0 * p.d);
    bld.cplx(slot::M1, slot::M1, rot);
    bld.cplx(slot::M2, slot::M2, -rot);
    bld.cplx(slot::MS, slot::MS, rot);
    Ok(bld.finish())
}

/// Only type-1 atoms (`κ₂ = 0`, `κ₁ = κ`):
///
/// ```text
/// ṅ₁  = −2(A²κ+λ) n₁ + κ(AB* m_c + AB m_c*) + 2λ n_T
/// ṅ₂  = −2(λ−|B|²κ) n₂ − κ(AB m_c* + AB* m_c) + 2κ|B|² + 2λ n_T
/// ṁ₁  = −2(A²κ+λ) m₁ + 2κ AB m_s
/// ṁ₂  = −2(λ−|B|²κ) m₂ − 2κ AB m_s*
/// ṁ_c = −(κ+2λ) m_c − κ AB n₁ + κ AB n₂ + κ AB
/// ṁ_s = −(κ+2λ) m_s − κ AB* m₁ + κ AB m₂*
/// ```
///
/// The `(n, m_c)` block relaxes at rates `2λ`, `κ+2λ` and `2(κ+λ)`, so the
/// generator is stable for every `λ > 0` even though the `n₂` diagonal can be
/// positive.
pub fn drift_asymmetric(p: &EngineeredParams, conv: Convention) -> Result<DriftAffine> {
    p.validate()?;
    if p.kappa2 != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "asymmetric reservoir needs kappa2 = 0 (got {})",
            p.kappa2
        )));
    }
    let (kappa, lambda) = (p.kappa1, p.lambda);
    let (a, b) = (p.a(), p.b());
    let b2 = b.norm_sqr();
    let ab = a * b;
    let abc = a * b.conj();
    let mut bld = Builder::new();
    use slot::*;

    let fast = 2.0 * (a * a * kappa + lambda);
    let slow = 2.0 * (lambda - b2 * kappa);
    let mixed = kappa + 2.0 * lambda;

    bld.real(N1, N1, -fast);
    bld.source(N1, 2.0 * lambda * p.n_t);
    bld.source(N2, 2.0 * lambda * p.n_t + 2.0 * kappa * b2);
    bld.damp(M1, fast);
    bld.damp(M2, slow);
    bld.damp(MC, mixed);
    bld.damp(MS, mixed);

    match conv {
        Convention::Derived => {
            // κ(AB* m_c + AB m_c*) = 2κ Re(AB* m_c)
            bld.real_from_cplx(N1, MC, 2.0 * kappa * abc);
            bld.real(N2, N2, -slow);
            bld.real_from_cplx(N2, MC, -2.0 * kappa * abc);
            bld.cplx(M1, MS, 2.0 * kappa * ab);
            bld.cplx_conj(M2, MS, -2.0 * kappa * ab);
            bld.cplx_from_real(MC, N1, -kappa * ab);
            bld.cplx_from_real(MC, N2, kappa * ab);
            bld.source_cplx(MC, kappa * ab);
            bld.cplx(MS, M1, -kappa * abc);
            bld.cplx_conj(MS, M2, kappa * ab);
        }
        Convention::PaperVerbatim => {
            // AB κ m_c + AB* κ m_c* = 2κ Re(AB m_c)
            bld.real_from_cplx(N1, MC, 2.0 * kappa * ab);
            bld.real(N2, N1, -slow);
            bld.real_from_cplx(N2, MC, -2.0 * kappa * ab);
            bld.cplx(M1, MS, -2.0 * kappa * abc);
            bld.cplx_conj(M2, MS, 2.0 * kappa * abc);
            bld.cplx_from_real(MC, N1, -kappa * abc);
            bld.cplx_from_real(MC, N2, kappa * abc);
            bld.source_cplx(MC, kappa * abc);
            bld.cplx(MS, M1, kappa * ab);
            bld.cplx(MS, M2, -kappa * abc);
        }
    }
    Ok(bld.finish())
}

/// Dispatches on the variant.
pub fn drift(p: &EngineeredParams, variant: Variant, conv: Convention) -> Result<DriftAffine> {
    match variant {
        Variant::Symmetric => drift_symmetric(p, conv),
        Variant::Asymmetric => drift_asymmetric(p, conv),
        Variant::LaserFrame => drift_laser_frame(p, conv),
    }
}
