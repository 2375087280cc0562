//! Two-mode covariance matrices and the static entanglement measures
//! defined on them.
//!
//! A zero-mean two-mode Gaussian state is fixed by ten real numbers: the
//! photon numbers `n_j = ⟨a_j†a_j⟩` and four complex second moments
//!
//! ```text
//! m_j = −⟨a_j²⟩,   m_c = ⟨a_1 a_2⟩,   m_s = −⟨a_1 a_2†⟩
//! ```
//!
//! Quadratures follow `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`, so the vacuum
//! has variance 1/2 and every symplectic threshold below is 1/2.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default tolerance used when a physicality check is implied.
pub const PHYSICAL_TOL: f64 = 1e-8;

/// Relative tolerance on `|I1 − I2|` for the symmetric-state EoF formula.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Lower clamp for the EoF argument.
pub const EOF_X_MIN: f64 = 1e-12;

/// Absolute tolerance for membership in the real symmetric family.
const FAMILY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TwoModeCovariance {
    pub n1: f64,
    pub n2: f64,
    pub m1: C64,
    pub m2: C64,
    pub mc: C64,
    pub ms: C64,
}

/// Local-unitary invariants of the complex covariance blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimonInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
}

/// An EPR-like quadrature pair `u = |a|Q₁ + Q₂/a`, `v = |a|P₁ − P₂/a`, where
/// `(Q, P) = (r′ X_θ, P_θ / r′)` and `(X_θ, P_θ)` are the local quadratures
/// rotated by `rotation_angle`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EprPair {
    pub weight_a: f64,
    pub local_squeeze: f64,
    pub rotation_angle: f64,
}

impl EprPair {
    pub fn new(weight_a: f64, local_squeeze: f64, rotation_angle: f64) -> Result<Self> {
        if weight_a == 0.0 || !weight_a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "EPR weight a = {weight_a}"
            )));
        }
        if !(local_squeeze > 0.0) || !local_squeeze.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "EPR local squeeze r′ = {local_squeeze}"
            )));
        }
        Ok(Self {
            weight_a,
            local_squeeze,
            rotation_angle,
        })
    }

    /// Separable states satisfy `⟨Δu²⟩ + ⟨Δv²⟩ ≥ a² + 1/a²`.
    pub fn separable_bound(&self) -> f64 {
        self.weight_a * self.weight_a + 1.0 / (self.weight_a * self.weight_a)
    }
}

/// The variance-minimizing pair for a state of the real symmetric family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalEpr {
    pub pair: EprPair,
    pub min_sum: f64,
    /// Set when one of the two variance coefficients is non-positive; the
    /// pair then falls back to `r′ = 1`.
    pub degenerate: bool,
}

impl TwoModeCovariance {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn thermal(n1: f64, n2: f64) -> Self {
        Self {
            n1,
            n2,
            ..Self::default()
        }
    }

    /// Two-mode squeezed vacuum annihilated by `b₁ = A a₁ − B a₂†` and
    /// `b₂ = A a₂ − B a₁†`, with `A = cosh r`, `B = e^{iφ} sinh r`.
    pub fn tmsv(r: f64, phi: f64) -> Self {
        let (s, c) = (r.sinh(), r.cosh());
        Self {
            n1: s * s,
            n2: s * s,
            mc: C64::from_polar(s * c, phi),
            ..Self::default()
        }
    }

    /// `n1 = n2 = n`, `m1 = m2 = m` (real), `m_c` real, `m_s = 0`.
    pub fn real_symmetric(n: f64, m: f64, mc: f64) -> Self {
        Self {
            n1: n,
            n2: n,
            m1: C64::new(m, 0.0),
            m2: C64::new(m, 0.0),
            mc: C64::new(mc, 0.0),
            ms: C64::new(0.0, 0.0),
        }
    }

    /// Coordinates in the fixed order
    /// `(n₁, n₂, Re m₁, Im m₁, Re m₂, Im m₂, Re m_c, Im m_c, Re m_s, Im m_s)`.
    pub fn to_coords(&self) -> [f64; 10] {
        [
            self.n1, self.n2, self.m1.re, self.m1.im, self.m2.re, self.m2.im, self.mc.re,
            self.mc.im, self.ms.re, self.ms.im,
        ]
    }

    pub fn from_coords(v: &[f64; 10]) -> Self {
        Self {
            n1: v[0],
            n2: v[1],
            m1: C64::new(v[2], v[3]),
            m2: C64::new(v[4], v[5]),
            mc: C64::new(v[6], v[7]),
            ms: C64::new(v[8], v[9]),
        }
    }

    /// Applies local phase rotations `a_j → e^{iθ_j} a_j` to the moments.
    pub fn rotate_local(&self, theta1: f64, theta2: f64) -> Self {
        let ph = |t: f64| C64::from_polar(1.0, t);
        Self {
            n1: self.n1,
            n2: self.n2,
            m1: self.m1 * ph(2.0 * theta1),
            m2: self.m2 * ph(2.0 * theta2),
            mc: self.mc * ph(theta1 + theta2),
            ms: self.ms * ph(theta1 - theta2),
        }
    }

    /// The complex 4×4 covariance matrix in the `(a₁, a₁†, a₂, a₂†)` layout,
    /// with `n_j + 1/2` on the diagonal.
    pub fn assemble_matrix(&self) -> Matrix4<C64> {
        let d1 = C64::new(self.n1 + 0.5, 0.0);
        let d2 = C64::new(self.n2 + 0.5, 0.0);
        let (m1, m2, mc, ms) = (self.m1, self.m2, self.mc, self.ms);
        Matrix4::new(
            d1,
            m1,
            ms,
            mc, //
            m1.conj(),
            d1,
            mc.conj(),
            ms.conj(), //
            ms.conj(),
            mc,
            d2,
            m2, //
            mc.conj(),
            ms,
            m2.conj(),
            d2,
        )
    }

    /// Local blocks `(V₁, V₂, C)` of [`assemble_matrix`](Self::assemble_matrix).
    pub fn blocks(&self) -> (Matrix2<C64>, Matrix2<C64>, Matrix2<C64>) {
        let v = self.assemble_matrix();
        (
            v.fixed_view::<2, 2>(0, 0).into_owned(),
            v.fixed_view::<2, 2>(2, 2).into_owned(),
            v.fixed_view::<2, 2>(0, 2).into_owned(),
        )
    }

    /// Real symmetric covariance matrix `⟨{R_i, R_j}⟩/2` in the ordered
    /// basis `(x₁, p₁, x₂, p₂)`.
    pub fn to_quadrature(&self) -> Matrix4<f64> {
        let (m1, m2, mc, ms) = (self.m1, self.m2, self.mc, self.ms);
        let x1x1 = self.n1 + 0.5 - m1.re;
        let p1p1 = self.n1 + 0.5 + m1.re;
        let x1p1 = -m1.im;
        let x2x2 = self.n2 + 0.5 - m2.re;
        let p2p2 = self.n2 + 0.5 + m2.re;
        let x2p2 = -m2.im;
        let x1x2 = mc.re - ms.re;
        let p1p2 = -(mc.re + ms.re);
        let x1p2 = mc.im + ms.im;
        let p1x2 = mc.im - ms.im;
        Matrix4::new(
            x1x1, x1p1, x1x2, x1p2, //
            x1p1, p1p1, p1x2, p1p2, //
            x1x2, p1x2, x2x2, x2p2, //
            x1p2, p1p2, x2p2, p2p2,
        )
    }

    pub fn simon_invariants(&self) -> SimonInvariants {
        let (v1, v2, c) = self.blocks();
        let z = Matrix2::new(
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        );
        let i4 = (v1 * z * c * z * v2 * z * c.adjoint() * z).trace();
        SimonInvariants {
            i1: v1.determinant().re,
            i2: v2.determinant().re,
            i3: c.determinant().re,
            i4: i4.re,
        }
    }

    /// Simon's function; the state is separable iff the value is `≥ 0`.
    pub fn simon_s(&self) -> f64 {
        let SimonInvariants { i1, i2, i3, i4 } = self.simon_invariants();
        let t = 0.25 - i3.abs();
        i1 * i2 + t * t - i4 - 0.25 * (i1 + i2)
    }

    /// Symplectic eigenvalues `(ν₋, ν₊)` of the quadrature covariance matrix,
    /// optionally after the partial transpose `p₂ → −p₂`.
    ///
    /// These are the moduli of the eigenvalues of `iΩσ`. They are computed as
    /// the singular values of the antisymmetric matrix `σ^{1/2} Ω σ^{1/2}`,
    /// which stays accurate for nearly pure, strongly squeezed states. NaN is
    /// returned when `σ` is not positive definite.
    pub fn symplectic_eigenvalues(&self, partial_transpose: bool) -> (f64, f64) {
        let mut q = self.to_quadrature();
        if partial_transpose {
            for k in 0..4 {
                if k != 3 {
                    q[(k, 3)] = -q[(k, 3)];
                    q[(3, k)] = -q[(3, k)];
                }
            }
        }
        if !q.iter().all(|x| x.is_finite()) {
            return (f64::NAN, f64::NAN);
        }
        let eig = q.symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return (f64::NAN, f64::NAN);
        }
        let root = eig.eigenvectors
            * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
            * eig.eigenvectors.transpose();
        let k = root * symplectic_form() * root;
        let sv = k.singular_values();
        let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Generalized uncertainty relation: `σ > 0` and `ν₋ ≥ 1/2 − tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.nu_minus_checked().is_some_and(|nu| nu >= 0.5 - tol)
    }

    /// Smallest symplectic eigenvalue, or `None` when the quadrature matrix
    /// is not positive definite.
    pub fn nu_minus_checked(&self) -> Option<f64> {
        let (nu, _) = self.symplectic_eigenvalues(false);
        nu.is_finite().then_some(nu)
    }

    fn require_physical(&self) -> Result<()> {
        if self.is_physical(PHYSICAL_TOL) {
            Ok(())
        } else {
            Err(Error::NonPhysical {
                nu_minus: self.nu_minus_checked().unwrap_or(f64::NAN),
            })
        }
    }

    pub fn is_separable(&self) -> Result<bool> {
        self.require_physical()?;
        Ok(self.simon_s() >= 0.0)
    }

    /// Entanglement of formation (bits) of a symmetric state (`I1 = I2`).
    pub fn eof_symmetric(&self) -> Result<f64> {
        self.require_physical()?;
        let SimonInvariants { i1, i2, i3, i4 } = self.simon_invariants();
        if (i1 - i2).abs() > SYMMETRY_TOL * i1.max(i2) {
            return Err(Error::Asymmetric { i1, i2 });
        }
        let a3 = i3.abs();
        let inner = (i4 + 2.0 * i1 * a3).max(0.0).sqrt();
        let x = 2.0 * (i1 + a3 - inner).max(0.0).sqrt();
        Ok(eof_function(x))
    }

    /// Logarithmic negativity in bits, `max(0, −log₂ 2ν̃₋)`.
    pub fn log_negativity(&self) -> f64 {
        let (nu, _) = self.symplectic_eigenvalues(true);
        (-(2.0 * nu).log2()).max(0.0)
    }

    /// `⟨Δu²⟩ + ⟨Δv²⟩` for the given pair (first moments are zero).
    pub fn epr_variance_sum(&self, pair: &EprPair) -> f64 {
        let a = pair.weight_a;
        let s = pair.local_squeeze;
        let (sin, cos) = pair.rotation_angle.sin_cos();
        // rows of the map (x, p) -> (Q, P) for one mode
        let q_row = [s * cos, s * sin];
        let p_row = [-sin / s, cos / s];
        let u = [
            a.abs() * q_row[0],
            a.abs() * q_row[1],
            q_row[0] / a,
            q_row[1] / a,
        ];
        let v = [
            a.abs() * p_row[0],
            a.abs() * p_row[1],
            -p_row[0] / a,
            -p_row[1] / a,
        ];
        let sigma = self.to_quadrature();
        quad_form(&sigma, &u) + quad_form(&sigma, &v)
    }

    /// Whether the state is in the real symmetric family (`n₁ = n₂`,
    /// `m₁ = m₂` real, `m_c` real, `m_s = 0`).
    pub fn in_real_symmetric_family(&self) -> bool {
        let scale = 1.0 + self.n1.abs().max(self.mc.norm());
        let tol = FAMILY_TOL * scale;
        (self.n1 - self.n2).abs() <= tol
            && (self.m1 - self.m2).norm() <= tol
            && self.m1.im.abs() <= tol
            && self.mc.im.abs() <= tol
            && self.ms.norm() <= tol
    }

    /// Variance-minimizing EPR pair over the local squeeze `r′` for a state
    /// of the real symmetric family. The weight sign follows `m_c` so the
    /// pair is `(Q₁ − Q₂, P₁ + P₂)` for `m_c > 0`.
    pub fn optimal_epr_squeeze(&self) -> Result<OptimalEpr> {
        if !self.in_real_symmetric_family() {
            return Err(Error::OutsideFamily(
                "optimal pair requires n1 = n2, m1 = m2 real, mc real, ms = 0",
            ));
        }
        self.require_physical()?;
        let n = self.n1;
        let m = self.m1.re;
        let mc = self.mc.re;
        let weight_a = if mc > 0.0 { -1.0 } else { 1.0 };
        let alpha = 2.0 * (n + 0.5 - m - mc.abs());
        let beta = 2.0 * (n + 0.5 + m - mc.abs());
        let (local_squeeze, degenerate) = if alpha > 0.0 && beta > 0.0 {
            ((beta / alpha).sqrt().sqrt(), false)
        } else {
            (1.0, true)
        };
        let pair = EprPair {
            weight_a,
            local_squeeze,
            rotation_angle: 0.0,
        };
        let min_sum = if degenerate {
            self.epr_variance_sum(&pair)
        } else {
            2.0 * (alpha * beta).sqrt()
        };
        Ok(OptimalEpr {
            pair,
            min_sum,
            degenerate,
        })
    }
}

/// Standard symplectic form for the ordering `(x₁, p₁, x₂, p₂)`.
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

fn quad_form(m: &Matrix4<f64>, w: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += w[i] * m[(i, j)] * w[j];
        }
    }
    acc
}

/// `c±(x) = (x^{-1/2} ± x^{1/2})² / 4`.
pub fn eof_coefficients(x: f64) -> (f64, f64) {
    let (inv, sq) = (x.sqrt().recip(), x.sqrt());
    (0.25 * (inv + sq).powi(2), 0.25 * (inv - sq).powi(2))
}

/// `f(x) = c₊ log₂ c₊ − c₋ log₂ c₋`, zero for `x ≥ 1` and with `x` clamped
/// below at [`EOF_X_MIN`].
pub fn eof_function(x: f64) -> f64 {
    if x >= 1.0 {
        return 0.0;
    }
    let (cp, cm) = eof_coefficients(x.max(EOF_X_MIN));
    let xlog = |c: f64| if c > 0.0 { c * c.log2() } else { 0.0 };
    (xlog(cp) - xlog(cm)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn assemble_vacuum_and_thermal() {
        let v = TwoModeCovariance::vacuum().assemble_matrix();
        assert_eq!(v, Matrix4::from_diagonal_element(c(0.5, 0.0)));
        let v = TwoModeCovariance::thermal(1.0, 0.0).assemble_matrix();
        let d: Vec<f64> = (0..4).map(|i| v[(i, i)].re).collect();
        assert_eq!(d, vec![1.5, 1.5, 0.5, 0.5]);
    }

    #[test]
    fn assemble_places_mc() {
        let st = TwoModeCovariance {
            mc: c(0.5, 0.0),
            ..Default::default()
        };
        let v = st.assemble_matrix();
        assert_eq!(v[(0, 3)], c(0.5, 0.0));
        assert_eq!(v[(1, 2)].conj(), c(0.5, 0.0));
        let st = TwoModeCovariance {
            n1: 0.3,
            m1: c(0.1, -0.2),
            m2: c(0.05, 0.3),
            mc: c(0.4, 0.1),
            ms: c(-0.2, 0.15),
            ..Default::default()
        };
        let v = st.assemble_matrix();
        assert_eq!(v, v.adjoint());
    }

    #[test]
    fn quadrature_examples() {
        assert_eq!(
            TwoModeCovariance::vacuum().to_quadrature(),
            Matrix4::from_diagonal_element(0.5)
        );
        let q = TwoModeCovariance::tmsv(1.0, 0.0).to_quadrature();
        assert_abs_diff_eq!(q[(0, 2)], 1.813_430_2, epsilon = 1e-7);
        assert_abs_diff_eq!(q[(1, 3)], -1.813_430_2, epsilon = 1e-7);
        for i in 0..4 {
            assert_abs_diff_eq!(q[(i, i)], 1.881_097_8, epsilon = 1e-7);
        }
        let bad = TwoModeCovariance {
            m1: c(0.5, 0.0),
            ..Default::default()
        };
        assert_eq!(bad.to_quadrature()[(0, 0)], 0.0);
        assert!(!bad.is_physical(0.0));
    }

    #[test]
    fn invariants_examples() {
        let inv = TwoModeCovariance::vacuum().simon_invariants();
        assert_eq!((inv.i1, inv.i2, inv.i3, inv.i4), (0.25, 0.25, 0.0, 0.0));

        let inv = TwoModeCovariance::tmsv(1.0, 0.0).simon_invariants();
        assert_abs_diff_eq!(inv.i1, 3.538_529_5, epsilon = 1e-6);
        assert_abs_diff_eq!(inv.i2, 3.538_529_5, epsilon = 1e-6);
        assert_abs_diff_eq!(inv.i3, -3.288_529_1, epsilon = 1e-6);
        assert_abs_diff_eq!(inv.i4, 23.273_112, epsilon = 1e-5);
        // closed forms
        let (s2, sc) = (1f64.sinh().powi(2), 1f64.sinh() * 1f64.cosh());
        let h = s2 + 0.5;
        assert_abs_diff_eq!(inv.i1, h * h, epsilon = 1e-12);
        assert_abs_diff_eq!(inv.i3, -sc * sc, epsilon = 1e-12);
        assert_abs_diff_eq!(inv.i4, 2.0 * h * h * sc * sc, epsilon = 1e-10);

        let inv = TwoModeCovariance::real_symmetric(1.2, 0.5, 1.0).simon_invariants();
        #[allow(clippy::approx_constant)]
        let i4 = 6.28;
        assert_abs_diff_eq!(inv.i1, 2.64, epsilon = 1e-12);
        assert_abs_diff_eq!(inv.i2, 2.64, epsilon = 1e-12);
        assert_abs_diff_eq!(inv.i3, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(inv.i4, i4, epsilon = 1e-12);
    }

    #[test]
    fn simon_examples() {
        assert_eq!(TwoModeCovariance::vacuum().simon_s(), 0.0);
        let s = TwoModeCovariance::tmsv(1.0, 0.0).simon_s();
        assert_abs_diff_eq!(s, -3.288_529_1, epsilon = 1e-6);
        assert_abs_diff_eq!(s, -(2.0f64).sinh().powi(2) / 4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            TwoModeCovariance::thermal(1.0, 1.0).simon_s(),
            4.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn symplectic_examples() {
        let (a, b) = TwoModeCovariance::vacuum().symplectic_eigenvalues(false);
        assert_abs_diff_eq!(a, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.5, epsilon = 1e-15);
        let (a, b) =
            TwoModeCovariance::real_symmetric(0.95, 0.0, 1.0).symplectic_eigenvalues(false);
        assert_abs_diff_eq!(a, 1.05, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 1.05, epsilon = 1e-12);
        let (a, _) = TwoModeCovariance::tmsv(1.0, 0.0).symplectic_eigenvalues(true);
        assert_abs_diff_eq!(a, (-2.0f64).exp() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn symplectic_matches_eigen_decomposition() {
        // oracle: moduli of the eigenvalues of Ω σ
        let omega = symplectic_form();
        let st = TwoModeCovariance {
            n1: 0.7,
            n2: 1.1,
            m1: c(0.2, -0.1),
            m2: c(-0.3, 0.25),
            mc: c(0.5, 0.2),
            ms: c(0.1, -0.15),
        };
        assert!(st.is_physical(0.0));
        for pt in [false, true] {
            let mut q = st.to_quadrature();
            if pt {
                let flip = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
                q = flip * q * flip;
            }
            let mut ev: Vec<f64> = (omega * q)
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .collect();
            ev.sort_by(f64::total_cmp);
            let (lo, hi) = st.symplectic_eigenvalues(pt);
            assert_abs_diff_eq!(lo, ev[0], epsilon = 1e-10);
            assert_abs_diff_eq!(hi, ev[3], epsilon = 1e-10);
        }
    }

    #[test]
    fn physicality_examples() {
        assert!(TwoModeCovariance::vacuum().is_physical(0.0));
        assert!(!TwoModeCovariance::real_symmetric(1.0, 0.0, 1.6).is_physical(1e-8));
        assert!(TwoModeCovariance::real_symmetric(0.95, 0.0, 1.0).is_physical(0.0));
        // negative photon number
        assert!(!TwoModeCovariance::thermal(-0.2, 0.0).is_physical(1e-8));
    }

    #[test]
    fn separability_examples() {
        assert!(TwoModeCovariance::vacuum().is_separable().unwrap());
        assert!(!TwoModeCovariance::tmsv(1.0, 0.0).is_separable().unwrap());
        assert!(TwoModeCovariance::thermal(1.0, 1.0).is_separable().unwrap());
        assert!(matches!(
            TwoModeCovariance::real_symmetric(1.0, 0.0, 1.6).is_separable(),
            Err(Error::NonPhysical { .. })
        ));
    }

    fn pure_state_entropy(r: f64) -> f64 {
        let (c2, s2) = (r.cosh().powi(2), r.sinh().powi(2));
        c2 * c2.log2() - s2 * s2.log2()
    }

    #[test]
    fn eof_examples() {
        assert_eq!(TwoModeCovariance::vacuum().eof_symmetric().unwrap(), 0.0);
        let e = TwoModeCovariance::tmsv(1.0, 0.0).eof_symmetric().unwrap();
        assert_abs_diff_eq!(e, 2.3369, epsilon = 1e-4);
        assert_abs_diff_eq!(e, pure_state_entropy(1.0), epsilon = 1e-8);
        let e = TwoModeCovariance::real_symmetric(1.0, 0.0, 1.0125)
            .eof_symmetric()
            .unwrap();
        assert_abs_diff_eq!(e, 0.002_251_7, epsilon = 1e-6);
        assert_abs_diff_eq!(e, eof_function(0.975), epsilon = 1e-12);
    }

    #[test]
    fn eof_rejects_asymmetric() {
        let st = TwoModeCovariance::thermal(1.0, 0.5);
        assert!(matches!(st.eof_symmetric(), Err(Error::Asymmetric { .. })));
    }

    #[test]
    fn eof_coefficients_differ_by_one() {
        for x in [1e-9, 1e-3, 0.1, 0.5, 0.975, 1.0, 3.0] {
            let (p, m) = eof_coefficients(x);
            assert_abs_diff_eq!(p - m, 1.0, epsilon = 1e-12 * p.max(1.0));
        }
        assert_eq!(eof_function(1.0), 0.0);
        assert_eq!(eof_function(2.0), 0.0);
        assert!(eof_function(0.0).is_finite());
    }

    #[test]
    fn log_negativity_examples() {
        assert_eq!(TwoModeCovariance::vacuum().log_negativity(), 0.0);
        assert_abs_diff_eq!(
            TwoModeCovariance::tmsv(1.0, 0.0).log_negativity(),
            2.0 / std::f64::consts::LN_2,
            epsilon = 1e-10
        );
        assert_eq!(TwoModeCovariance::thermal(1.0, 1.0).log_negativity(), 0.0);
    }

    #[test]
    fn epr_examples() {
        let pair = EprPair::new(1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            TwoModeCovariance::vacuum().epr_variance_sum(&pair),
            2.0,
            epsilon = 1e-14
        );
        let pair = EprPair::new(-1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            TwoModeCovariance::tmsv(1.0, 0.0).epr_variance_sum(&pair),
            2.0 * (-2.0f64).exp(),
            epsilon = 1e-12
        );
        let pair = EprPair::new(-1.0, 6f64.powf(0.25), 0.0).unwrap();
        assert_abs_diff_eq!(
            TwoModeCovariance::real_symmetric(1.2, 0.5, 1.0).epr_variance_sum(&pair),
            2.0 * 0.96f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(EprPair::new(0.0, 1.0, 0.0).is_err());
        assert!(EprPair::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn optimal_pair_examples() {
        let opt = TwoModeCovariance::tmsv(1.0, 0.0)
            .optimal_epr_squeeze()
            .unwrap();
        assert_abs_diff_eq!(opt.pair.local_squeeze, 1.0, epsilon = 1e-12);
        assert_eq!(opt.pair.weight_a, -1.0);

        let st = TwoModeCovariance::real_symmetric(1.2, 0.5, 1.0);
        let opt = st.optimal_epr_squeeze().unwrap();
        assert_abs_diff_eq!(opt.pair.local_squeeze, 1.565_084_6, epsilon = 1e-7);
        assert_abs_diff_eq!(opt.min_sum, 1.959_591_8, epsilon = 1e-7);
        assert!(opt.min_sum < opt.pair.separable_bound());

        // brute-force minimization over r′
        let brute = (1..20000)
            .map(|k| k as f64 * 2e-4)
            .map(|s| st.epr_variance_sum(&EprPair::new(-1.0, s, 0.0).unwrap()))
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(brute, opt.min_sum, epsilon = 1e-6);

        // α = β = 2(n + 1/2 − m_c) = 2, so the minimum is 2√(αβ) = 4: separable
        let opt = TwoModeCovariance::real_symmetric(1.0, 0.0, 0.5)
            .optimal_epr_squeeze()
            .unwrap();
        assert_abs_diff_eq!(opt.pair.local_squeeze, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(opt.min_sum, 4.0, epsilon = 1e-12);

        let outside = TwoModeCovariance::thermal(1.0, 0.5);
        assert!(matches!(
            outside.optimal_epr_squeeze(),
            Err(Error::OutsideFamily(_))
        ));
    }

    #[test]
    fn boundary_line_m_zero() {
        for k in 0..=500 {
            let n = 5.0 * k as f64 / 500.0;
            let s = TwoModeCovariance::real_symmetric(n, 0.0, n).simon_s();
            assert!(s.abs() <= 1e-12 * (1.0 + n).powi(4), "n = {n}, S = {s}");
        }
    }

    #[test]
    fn tmsv_is_pure() {
        for r in [0.1, 0.5, 1.0, 2.0, 3.0] {
            let (a, b) = TwoModeCovariance::tmsv(r, 0.7).symplectic_eigenvalues(false);
            assert_abs_diff_eq!(a, 0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(b, 0.5, epsilon = 1e-10);
        }
    }
}
