//! Truncated Fock-space integration of the full two-mode master equation.
//!
//! This is a validation oracle for the moment equations, not a production
//! path: it builds the Liouvillian as a sparse superoperator on the
//! row-major vectorized density matrix and steps it with fixed-step RK4.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sprs::{CsMat, TriMat};

use crate::covariance::TwoModeCovariance;
use crate::dynamics::propagate;
use crate::error::{Error, Result};
use crate::reservoir::{drift, Convention, EngineeredParams, Variant};

pub const MIN_CUTOFF: usize = 4;
pub const MAX_CUTOFF: usize = 24;
pub const DEFAULT_CUTOFF: usize = 12;
pub const DEFAULT_LEAK_TOL: f64 = 1e-4;
/// Largest change of `Tr ρ` tolerated in one step.
pub const TRACE_STEP_TOL: f64 = 1e-9;
/// Default relative tolerance for moment agreement.
pub const DEFAULT_MOMENT_TOL: f64 = 1e-3;
/// Series whose peak magnitude is below this are compared in absolute terms.
pub const MOMENT_FLOOR: f64 = 1e-6;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

type Op = CsMat<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockConfig {
    /// Fock levels kept per mode.
    pub cutoff: usize,
    /// Fixed step; `None` picks `10⁻³/(κ + λ + |d| + 1)`.
    pub dt: Option<f64>,
    /// Largest allowed population on the top level of either mode.
    pub leak_tol: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            dt: None,
            leak_tol: DEFAULT_LEAK_TOL,
        }
    }
}

impl FockConfig {
    pub fn with_cutoff(cutoff: usize) -> Self {
        Self {
            cutoff,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_CUTOFF..=MAX_CUTOFF).contains(&self.cutoff) {
            return Err(Error::InvalidParameter(format!(
                "cutoff {} outside [{MIN_CUTOFF}, {MAX_CUTOFF}]",
                self.cutoff
            )));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::InvalidParameter(format!("dt = {dt} must be > 0")));
            }
        }
        if !(self.leak_tol > 0.0 && self.leak_tol <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "leak_tol = {} outside (0, 1e-3]",
                self.leak_tol
            )));
        }
        Ok(())
    }

    pub fn step(&self, p: &EngineeredParams) -> f64 {
        self.dt
            .unwrap_or_else(|| 1e-3 / (p.kappa1.max(p.kappa2) + p.lambda + p.d.abs() + 1.0))
    }
}

/// Single-particle operators on the two-mode space, basis `|n₁, n₂⟩` at
/// index `n₁·N + n₂`.
struct Ladder {
    n: usize,
}

impl Ladder {
    fn dim(&self) -> usize {
        self.n * self.n
    }

    fn idx(&self, n1: usize, n2: usize) -> usize {
        n1 * self.n + n2
    }

    fn build(&self, f: impl Fn(usize, usize) -> Option<(usize, C64)>) -> Op {
        let mut t = TriMat::new((self.dim(), self.dim()));
        for n1 in 0..self.n {
            for n2 in 0..self.n {
                if let Some((row, v)) = f(n1, n2) {
                    t.add_triplet(row, self.idx(n1, n2), v);
                }
            }
        }
        t.to_csr()
    }

    fn a1(&self) -> Op {
        self.build(|n1, n2| (n1 > 0).then(|| (self.idx(n1 - 1, n2), C64::from((n1 as f64).sqrt()))))
    }

    fn a2(&self) -> Op {
        self.build(|n1, n2| (n2 > 0).then(|| (self.idx(n1, n2 - 1), C64::from((n2 as f64).sqrt()))))
    }

    fn identity(&self) -> Op {
        self.build(|n1, n2| Some((self.idx(n1, n2), ONE)))
    }
}

fn adjoint(op: &Op) -> Op {
    let t = op.transpose_view().to_csr();
    t.map(|z| z.conj())
}

fn mul(a: &Op, b: &Op) -> Op {
    a * b
}

fn scale(a: &Op, s: C64) -> Op {
    a.map(|z| z * s)
}

fn add(a: &Op, b: &Op) -> Op {
    a + b
}

/// Operators whose expectations give the ten moment coordinates.
struct MomentOps {
    n1: Op,
    n2: Op,
    a1a1: Op,
    a2a2: Op,
    a1a2: Op,
    a1a2d: Op,
}

impl MomentOps {
    fn new(l: &Ladder) -> Self {
        let (a1, a2) = (l.a1(), l.a2());
        Self {
            n1: mul(&adjoint(&a1), &a1),
            n2: mul(&adjoint(&a2), &a2),
            a1a1: mul(&a1, &a1),
            a2a2: mul(&a2, &a2),
            a1a2: mul(&a1, &a2),
            a1a2d: mul(&a1, &adjoint(&a2)),
        }
    }
}

/// Row-major `N²×N²` density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    cutoff: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    fn zeros(cutoff: usize) -> Self {
        let d = cutoff * cutoff;
        Self {
            cutoff,
            data: vec![ZERO; d * d],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff * self.cutoff
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(cutoff: usize, psi: &[C64]) -> Result<Self> {
        let d = cutoff * cutoff;
        if psi.len() != d {
            return Err(Error::InvalidParameter(format!(
                "state vector has length {}, expected {d}",
                psi.len()
            )));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let mut rho = Self::zeros(cutoff);
        for i in 0..d {
            for j in 0..d {
                rho.data[i * d + j] = psi[i] * psi[j].conj() / (norm * norm);
            }
        }
        Ok(rho)
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::fock(cutoff, 0, 0).expect("vacuum fits any cutoff")
    }

    pub fn fock(cutoff: usize, n1: usize, n2: usize) -> Result<Self> {
        if n1 >= cutoff || n2 >= cutoff {
            return Err(Error::InvalidParameter(format!(
                "|{n1}, {n2}⟩ does not fit cutoff {cutoff}"
            )));
        }
        let mut rho = Self::zeros(cutoff);
        let i = n1 * cutoff + n2;
        let d = rho.dim();
        rho.data[i * d + i] = ONE;
        Ok(rho)
    }

    /// Product of thermal states with the given mean occupations,
    /// truncated and renormalized.
    pub fn thermal(cutoff: usize, nbar1: f64, nbar2: f64) -> Result<Self> {
        if !(nbar1 >= 0.0 && nbar2 >= 0.0) {
            return Err(Error::InvalidParameter(
                "thermal occupation must be ≥ 0".into(),
            ));
        }
        let weights = |nb: f64| -> Vec<f64> {
            let q = nb / (1.0 + nb);
            let w: Vec<f64> = (0..cutoff).map(|k| q.powi(k as i32)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        };
        let (w1, w2) = (weights(nbar1), weights(nbar2));
        let mut rho = Self::zeros(cutoff);
        let d = rho.dim();
        for (n1, p1) in w1.iter().enumerate() {
            for (n2, p2) in w2.iter().enumerate() {
                let i = n1 * cutoff + n2;
                rho.data[i * d + i] = C64::from(p1 * p2);
            }
        }
        Ok(rho)
    }

    /// Two-mode squeezed vacuum `Σ c_n |n, n⟩` with
    /// `c_n = (e^{iφ} tanh r)ⁿ / cosh r`, truncated and renormalized.
    pub fn tmsv(cutoff: usize, r: f64, phi: f64) -> Result<Self> {
        let mut psi = vec![ZERO; cutoff * cutoff];
        let q = C64::from_polar(r.tanh(), phi);
        for k in 0..cutoff {
            psi[k * cutoff + k] = q.powu(k as u32) / r.cosh();
        }
        Self::pure(cutoff, &psi)
    }

    /// Pure Gaussian state `exp(½z₁₁a₁†² + ½z₂₂a₂†² + z₁₂a₁†a₂†)|0⟩`,
    /// truncated and renormalized. Generic `z` gives all six moments
    /// nonzero.
    pub fn gaussian_pure(cutoff: usize, z11: C64, z22: C64, z12: C64) -> Result<Self> {
        let l = Ladder { n: cutoff };
        let (c1, c2) = (adjoint(&l.a1()), adjoint(&l.a2()));
        let g = add(
            &add(
                &scale(&mul(&c1, &c1), z11 * 0.5),
                &scale(&mul(&c2, &c2), z22 * 0.5),
            ),
            &scale(&mul(&c1, &c2), z12),
        );
        let d = l.dim();
        let mut psi = vec![ZERO; d];
        let mut term = vec![ZERO; d];
        term[0] = ONE;
        psi[0] = ONE;
        for k in 1..4 * cutoff {
            let mut next = vec![ZERO; d];
            spmv(&g, &term, &mut next);
            let inv = 1.0 / k as f64;
            next.iter_mut().for_each(|z| *z *= inv);
            for (p, t) in psi.iter_mut().zip(&next) {
                *p += t;
            }
            term = next;
            if term.iter().all(|z| z.norm_sqr() == 0.0) {
                break;
            }
        }
        Self::pure(cutoff, &psi)
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    /// Population on the top Fock level of either mode.
    pub fn top_population(&self) -> f64 {
        let n = self.cutoff;
        let d = self.dim();
        let mut s = 0.0;
        for n1 in 0..n {
            for n2 in 0..n {
                if n1 == n - 1 || n2 == n - 1 {
                    let i = n1 * n + n2;
                    s += self.data[i * d + i].re;
                }
            }
        }
        s
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut e: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                e = e.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        e
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| {
            0.5 * (self.data[i * d + j] + self.data[j * d + i].conj())
        });
        m.symmetric_eigenvalues().min()
    }

    fn expect(&self, op: &Op) -> C64 {
        // Tr(ρO) = Σ_ik O_ik ρ_ki
        let d = self.dim();
        let mut s = ZERO;
        for (i, row) in op.outer_iterator().enumerate() {
            for (k, &v) in row.iter() {
                s += v * self.data[k * d + i];
            }
        }
        s
    }

    fn moments_with(&self, ops: &MomentOps) -> TwoModeCovariance {
        let tr = self.trace().re;
        TwoModeCovariance {
            n1: self.expect(&ops.n1).re / tr,
            n2: self.expect(&ops.n2).re / tr,
            m1: -self.expect(&ops.a1a1) / tr,
            m2: -self.expect(&ops.a2a2) / tr,
            mc: self.expect(&ops.a1a2) / tr,
            ms: -self.expect(&ops.a1a2d) / tr,
        }
    }

    /// Second moments `(n₁, n₂, m₁, m₂, m_c, m_s)` of the state.
    pub fn moments(&self) -> TwoModeCovariance {
        self.moments_with(&MomentOps::new(&Ladder { n: self.cutoff }))
    }
}

fn spmv(m: &Op, x: &[C64], y: &mut [C64]) {
    let indptr = m.indptr();
    let indptr = indptr.raw_storage();
    let (indices, data) = (m.indices(), m.data());
    for (i, out) in y.iter_mut().enumerate() {
        let mut s = ZERO;
        for k in indptr[i]..indptr[i + 1] {
            s += data[k] * x[indices[k]];
        }
        *out = s;
    }
}

/// Liouvillian of the reservoir model on a fixed cutoff.
pub struct FockModel {
    cutoff: usize,
    liouvillian: Op,
    moments: MomentOps,
}

impl FockModel {
    /// Engineered dissipators `κ_j(2bρb† − b†bρ − ρb†b)` with
    /// `b₁ = A a₁ − B a₂†`, `b₂ = A a₂ − B a₁†`, thermal damping at rate `λ`
    /// with `n_T` photons, and for the laser-frame variant the free
    /// evolution `H = d(a₂†a₂ − a₁†a₁)`.
    pub fn new(p: &EngineeredParams, variant: Variant, cutoff: usize) -> Result<Self> {
        p.validate()?;
        FockConfig::with_cutoff(cutoff).validate()?;
        let l = Ladder { n: cutoff };
        let (a1, a2) = (l.a1(), l.a2());
        let (a1d, a2d) = (adjoint(&a1), adjoint(&a2));
        let (a, b) = (C64::from(p.a()), p.b());
        let b1 = add(&scale(&a1, a), &scale(&a2d, -b));
        let b2 = add(&scale(&a2, a), &scale(&a1d, -b));

        // (jump operator, rate γ) for terms γ(2LρL† − L†Lρ − ρL†L)
        let mut jumps: Vec<(Op, f64)> = Vec::new();
        if p.kappa1 > 0.0 {
            jumps.push((b1, p.kappa1));
        }
        if p.kappa2 > 0.0 {
            jumps.push((b2, p.kappa2));
        }
        if p.lambda > 0.0 {
            jumps.push((a1.clone(), p.lambda * (p.n_t + 1.0)));
            jumps.push((a2.clone(), p.lambda * (p.n_t + 1.0)));
            if p.n_t > 0.0 {
                jumps.push((a1d.clone(), p.lambda * p.n_t));
                jumps.push((a2d.clone(), p.lambda * p.n_t));
            }
        }

        // ρ̇ = −Gρ − ρG† + Σ 2γ LρL†,  G = iH + Σ γ L†L
        let d = l.dim();
        let mut g: Op = CsMat::zero((d, d));
        for (op, rate) in &jumps {
            g = add(&g, &scale(&mul(&adjoint(op), op), C64::from(*rate)));
        }
        if variant == Variant::LaserFrame && p.d != 0.0 {
            let h = add(&mul(&a2d, &a2), &scale(&mul(&a1d, &a1), -ONE));
            g = add(&g, &scale(&h, C64::new(0.0, p.d)));
        }

        let ident = l.identity();
        let mut t = TriMat::new((d * d, d * d));
        // A ρ B ↦ vec index (i, j) ← (k, l) with weight A_ik B_lj
        let mut push = |lhs: &Op, rhs_t: &Op, w: C64| {
            // rhs_t is Bᵀ, so row j of rhs_t lists B_lj
            for (i, row_a) in lhs.outer_iterator().enumerate() {
                for (k, &va) in row_a.iter() {
                    for (j, row_b) in rhs_t.outer_iterator().enumerate() {
                        for (lcol, &vb) in row_b.iter() {
                            t.add_triplet(i * d + j, k * d + lcol, w * va * vb);
                        }
                    }
                }
            }
        };
        let gd_t = g.map(|z| z.conj()); // (G†)ᵀ = conj(G)
        push(&g, &ident, -ONE);
        push(&ident, &gd_t, -ONE);
        for (op, rate) in &jumps {
            // (L†)ᵀ = conj(L)
            let ld_t = op.map(|z| z.conj());
            push(op, &ld_t, C64::from(2.0 * rate));
        }
        Ok(Self {
            cutoff,
            liouvillian: t.to_csr(),
            moments: MomentOps::new(&l),
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.cutoff != self.cutoff {
            return Err(Error::InvalidParameter(format!(
                "density matrix cutoff {} differs from model cutoff {}",
                rho.cutoff, self.cutoff
            )));
        }
        Ok(())
    }

    pub fn rhs(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho)?;
        let mut out = DensityMatrix::zeros(self.cutoff);
        spmv(&self.liouvillian, &rho.data, &mut out.data);
        Ok(out)
    }

    /// Fixed-step RK4 from `rho0`, returning the moments at each of the
    /// ascending `times`.
    pub fn evolve(
        &self,
        rho0: &DensityMatrix,
        times: &[f64],
        dt: f64,
        leak_tol: f64,
    ) -> Result<Vec<TwoModeCovariance>> {
        self.check_dim(rho0)?;
        if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite())
            || times.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::InvalidParameter(
                "times must be finite, ≥ 0 and strictly ascending".into(),
            ));
        }
        let leak = rho0.top_population();
        if leak >= leak_tol {
            return Err(Error::TruncationLeak {
                time: 0.0,
                population: leak,
                limit: leak_tol,
            });
        }
        let n = rho0.data.len();
        let mut y = rho0.data.clone();
        let (mut k1, mut k2, mut k3, mut k4) =
            (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
        let mut tmp = vec![ZERO; n];
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        let probe = |y: &[C64]| DensityMatrix {
            cutoff: self.cutoff,
            data: y.to_vec(),
        };
        let d = self.cutoff * self.cutoff;
        let trace = |y: &[C64]| (0..d).map(|i| y[i * d + i].re).sum::<f64>();
        let top = |y: &[C64]| {
            let c = self.cutoff;
            (0..d)
                .filter(|i| i / c == c - 1 || i % c == c - 1)
                .map(|i| y[i * d + i].re)
                .sum::<f64>()
        };
        let mut tr = trace(&y);
        for &target in times {
            let span = target - now;
            let steps = (span / dt).ceil() as usize;
            let h = if steps > 0 { span / steps as f64 } else { 0.0 };
            for s in 0..steps {
                let l = &self.liouvillian;
                spmv(l, &y, &mut k1);
                axpy(&y, &k1, h / 2.0, &mut tmp);
                spmv(l, &tmp, &mut k2);
                axpy(&y, &k2, h / 2.0, &mut tmp);
                spmv(l, &tmp, &mut k3);
                axpy(&y, &k3, h, &mut tmp);
                spmv(l, &tmp, &mut k4);
                for i in 0..n {
                    y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
                }
                let t_here = now + h * (s + 1) as f64;
                let tr_new = trace(&y);
                if (tr_new - tr).abs() > TRACE_STEP_TOL {
                    return Err(Error::TraceDrift {
                        time: t_here,
                        drift: tr_new - tr,
                    });
                }
                tr = tr_new;
                let leak = top(&y);
                if leak > leak_tol {
                    return Err(Error::TruncationLeak {
                        time: t_here,
                        population: leak,
                        limit: leak_tol,
                    });
                }
            }
            now = target;
            out.push(probe(&y).moments_with(&self.moments));
        }
        Ok(out)
    }
}

fn axpy(y: &[C64], k: &[C64], h: f64, out: &mut [C64]) {
    for ((o, a), b) in out.iter_mut().zip(y).zip(k) {
        *o = a + b * h;
    }
}

/// Right-hand side of the master equation at `rho`.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    p: &EngineeredParams,
    variant: Variant,
) -> Result<DensityMatrix> {
    FockModel::new(p, variant, rho.cutoff)?.rhs(rho)
}

/// Moments at each of `times` from fixed-step integration of the master
/// equation starting at `rho0`.
pub fn evolve_and_extract(
    rho0: &DensityMatrix,
    p: &EngineeredParams,
    variant: Variant,
    times: &[f64],
    cfg: &FockConfig,
) -> Result<Vec<TwoModeCovariance>> {
    cfg.validate()?;
    if rho0.cutoff != cfg.cutoff {
        return Err(Error::InvalidParameter(format!(
            "initial state cutoff {} differs from configured cutoff {}",
            rho0.cutoff, cfg.cutoff
        )));
    }
    let model = FockModel::new(p, variant, cfg.cutoff)?;
    model.evolve(rho0, times, cfg.step(p), cfg.leak_tol)
}

/// Initial states available to validation cases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FockInitial {
    Vacuum,
    Thermal {
        n1: f64,
        n2: f64,
    },
    Tmsv {
        r: f64,
        phi: f64,
    },
    /// `exp(½z₁₁a₁†² + ½z₂₂a₂†² + z₁₂a₁†a₂†)|0⟩`, each `z` as `[re, im]`.
    GaussianPure {
        z11: [f64; 2],
        z22: [f64; 2],
        z12: [f64; 2],
    },
    Fock {
        n1: usize,
        n2: usize,
    },
}

impl FockInitial {
    pub fn build(&self, cutoff: usize) -> Result<DensityMatrix> {
        let c = |z: [f64; 2]| C64::new(z[0], z[1]);
        match *self {
            FockInitial::Vacuum => Ok(DensityMatrix::vacuum(cutoff)),
            FockInitial::Thermal { n1, n2 } => DensityMatrix::thermal(cutoff, n1, n2),
            FockInitial::Tmsv { r, phi } => DensityMatrix::tmsv(cutoff, r, phi),
            FockInitial::GaussianPure { z11, z22, z12 } => {
                DensityMatrix::gaussian_pure(cutoff, c(z11), c(z22), c(z12))
            }
            FockInitial::Fock { n1, n2 } => DensityMatrix::fock(cutoff, n1, n2),
        }
    }
}

/// One oracle comparison: the moment generator against the master equation
/// over `[0, t_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationCase {
    pub name: String,
    pub variant: Variant,
    pub params: EngineeredParams,
    pub initial: FockInitial,
    pub t_max: f64,
    pub samples: usize,
}

impl ValidationCase {
    fn new(name: &str, variant: Variant, params: EngineeredParams, initial: FockInitial) -> Self {
        let total = params.kappa1.max(params.kappa2) + params.lambda;
        Self {
            name: name.into(),
            variant,
            params,
            initial,
            t_max: 2.0 / total,
            samples: 21,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples)
            .map(|i| self.t_max * i as f64 / (self.samples - 1).max(1) as f64)
            .collect()
    }
}

pub const COORD_NAMES: [&str; 10] = [
    "n1", "n2", "re_m1", "im_m1", "re_m2", "im_m2", "re_mc", "im_mc", "re_ms", "im_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    pub variant: Variant,
    pub passed: bool,
    /// Largest error over coordinates, each relative to its series peak.
    pub max_rel_error: Option<f64>,
    pub worst_coordinate: Option<String>,
    pub errors: Vec<(String, f64)>,
    /// Set when the oracle aborted (for example on truncation leak).
    pub failure: Option<String>,
}

/// Per-coordinate error of `test` against `reference`, scaled by the
/// reference series peak (floored at [`MOMENT_FLOOR`]).
pub fn series_errors(reference: &[TwoModeCovariance], test: &[TwoModeCovariance]) -> [f64; 10] {
    let mut out = [0.0; 10];
    for (c, slot) in out.iter_mut().enumerate() {
        let peak = reference
            .iter()
            .map(|v| v.to_coords()[c].abs())
            .fold(0.0, f64::max)
            .max(MOMENT_FLOOR);
        let diff = reference
            .iter()
            .zip(test)
            .map(|(a, b)| (a.to_coords()[c] - b.to_coords()[c]).abs())
            .fold(0.0, f64::max);
        *slot = diff / peak;
    }
    out
}

/// Moment trajectories from the master equation and from the moment
/// generator, sampled at the case's times.
pub fn case_trajectories(
    case: &ValidationCase,
    conv: Convention,
    cfg: &FockConfig,
) -> Result<(Vec<TwoModeCovariance>, Vec<TwoModeCovariance>)> {
    cfg.validate()?;
    let rho0 = case.initial.build(cfg.cutoff)?;
    let times = case.times();
    let model = FockModel::new(&case.params, case.variant, cfg.cutoff)?;
    let fock = model.evolve(&rho0, &times, cfg.step(&case.params), cfg.leak_tol)?;
    let gen = drift(&case.params, case.variant, conv)?;
    let v0 = fock[0];
    let gauss = times
        .iter()
        .map(|&t| propagate(&v0, &gen, t))
        .collect::<Result<Vec<_>>>()?;
    Ok((fock, gauss))
}

pub fn run_case(case: &ValidationCase, conv: Convention, cfg: &FockConfig, tol: f64) -> CaseReport {
    match case_trajectories(case, conv, cfg) {
        Ok((fock, gauss)) => {
            let errs = series_errors(&fock, &gauss);
            let (worst, max) =
                errs.iter().enumerate().fold(
                    (0, 0.0),
                    |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc },
                );
            CaseReport {
                name: case.name.clone(),
                variant: case.variant,
                passed: max <= tol,
                max_rel_error: Some(max),
                worst_coordinate: Some(COORD_NAMES[worst].into()),
                errors: COORD_NAMES
                    .iter()
                    .zip(errs)
                    .map(|(n, e)| (n.to_string(), e))
                    .collect(),
                failure: None,
            }
        }
        Err(e) => CaseReport {
            name: case.name.clone(),
            variant: case.variant,
            passed: false,
            max_rel_error: None,
            worst_coordinate: None,
            errors: Vec::new(),
            failure: Some(e.to_string()),
        },
    }
}

const MIXED_Z: FockInitial = FockInitial::GaussianPure {
    z11: [0.12, 0.06],
    z22: [-0.04, 0.1],
    z12: [0.1, -0.08],
};

pub const SUITE_NAMES: [&str; 4] = ["symmetric", "asymmetric", "laser_frame", "all"];

/// Named comparison suites, all within `r ≤ 0.5`, `n_T ≤ 0.5`, `κ, λ ≤ 2`.
pub fn suite(name: &str) -> Option<Vec<ValidationCase>> {
    use Variant::*;
    let sym = || {
        vec![
            ValidationCase::new(
                "symmetric_vacuum",
                Symmetric,
                EngineeredParams::symmetric(0.3, 1.0, 1.0, 0.2),
                FockInitial::Vacuum,
            ),
            ValidationCase::new(
                "symmetric_phase_general_state",
                Symmetric,
                EngineeredParams::symmetric(0.5, 0.5, 1.5, 0.5).with_phi(0.7),
                MIXED_Z,
            ),
            ValidationCase::new(
                "symmetric_fock_decay",
                Symmetric,
                EngineeredParams::symmetric(0.0, 0.0, 1.0, 0.0),
                FockInitial::Fock { n1: 1, n2: 0 },
            ),
        ]
    };
    let asym = || {
        vec![
            ValidationCase::new(
                "asymmetric_vacuum",
                Asymmetric,
                EngineeredParams::asymmetric(0.3, 1.0, 2.0, 0.0),
                FockInitial::Vacuum,
            ),
            ValidationCase::new(
                "asymmetric_phase_general_state",
                Asymmetric,
                EngineeredParams::asymmetric(0.5, 1.0, 1.5, 0.3).with_phi(0.9),
                MIXED_Z,
            ),
            ValidationCase::new(
                "asymmetric_thermal",
                Asymmetric,
                EngineeredParams::asymmetric(0.4, 1.0, 1.0, 0.5),
                FockInitial::Thermal { n1: 0.1, n2: 0.4 },
            ),
        ]
    };
    let laser = || {
        vec![
            ValidationCase::new(
                "laser_frame_general_state",
                LaserFrame,
                EngineeredParams::symmetric(0.4, 1.0, 1.0, 0.2)
                    .with_phi(0.3)
                    .with_splitting(1.5),
                MIXED_Z,
            ),
            ValidationCase::new(
                "laser_frame_tmsv",
                LaserFrame,
                EngineeredParams::symmetric(0.5, 2.0, 0.5, 0.5).with_splitting(0.8),
                FockInitial::Tmsv { r: 0.3, phi: 0.4 },
            ),
        ]
    };
    match name {
        "symmetric" => Some(sym()),
        "asymmetric" => Some(asym()),
        "laser_frame" => Some(laser()),
        "all" => Some([sym(), asym(), laser()].concat()),
        _ => None,
    }
}
