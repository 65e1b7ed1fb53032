//! Dirac algebra in the standard representation, free positive-energy spinors,
//! and the two-component spin states used to label electron polarization.
//!
//! Conventions: metric diag(+,−,−,−), `γ⁰ = diag(1,1,−1,−1)`,
//! `γⁱ = [[0, σᵢ], [−σᵢ, 0]]`, and spinors normalized to `ū u = 1`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ComptonError, Result};
use crate::kinematics::{FourVector, ELECTRON_MASS, ON_SHELL_TOLERANCE};
use crate::linalg::{inner, kron, norm_sqr, Matrix2, Matrix4, C64, I, ONE, ZERO};

/// Minkowski metric diagonal.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Tolerance on `|s|² = 1` for spinors handed to expectation values.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Two-component spin state `(c_up, c_down)` in the σ_z basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSpinor {
    pub c_up: C64,
    pub c_down: C64,
}

impl PauliSpinor {
    pub const UP: PauliSpinor = PauliSpinor { c_up: ONE, c_down: ZERO };
    pub const DOWN: PauliSpinor = PauliSpinor { c_up: ZERO, c_down: ONE };

    pub const fn new(c_up: C64, c_down: C64) -> Self {
        PauliSpinor { c_up, c_down }
    }

    pub fn real(up: f64, down: f64) -> Self {
        Self::new(C64::new(up, 0.0), C64::new(down, 0.0))
    }

    pub fn from_array([c_up, c_down]: [C64; 2]) -> Self {
        Self::new(c_up, c_down)
    }

    pub fn to_array(self) -> [C64; 2] {
        [self.c_up, self.c_down]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.to_array())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PauliSpinor) -> C64 {
        inner(&self.to_array(), &other.to_array())
    }

    pub fn scale(self, z: C64) -> Self {
        Self::new(self.c_up * z, self.c_down * z)
    }
}

impl std::ops::Add for PauliSpinor {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c_up + o.c_up, self.c_down + o.c_down)
    }
}

impl std::ops::Sub for PauliSpinor {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.c_up - o.c_up, self.c_down - o.c_down)
    }
}

/// Bloch-sphere state `(cos θ/2, e^{iφ} sin θ/2)`.
pub fn bloch_spinor(theta: f64, phi: f64) -> PauliSpinor {
    let (s, c) = (0.5 * theta).sin_cos();
    PauliSpinor::new(C64::new(c, 0.0), C64::from_polar(s, phi))
}

/// The six electron spin directions used as measurement axes.
///
/// The pairs are eigenbases of `(σx+σz)/√2`, `σy` and `(σx−σz)/√2`. The
/// arrows give the spin direction in the x-z plane (x right, z up), so ↙ is
/// the −1 eigenvector of `(σx+σz)/√2` while ⊗ and ↘ carry eigenvalue +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tilt {
    /// ↙
    SouthWest,
    /// ↗
    NorthEast,
    /// ⊗, spin along +y.
    PlusY,
    /// ⊙, spin along −y.
    MinusY,
    /// ↘
    SouthEast,
    /// ↖
    NorthWest,
}

impl Tilt {
    pub const ALL: [Tilt; 6] = [
        Tilt::SouthWest,
        Tilt::NorthEast,
        Tilt::PlusY,
        Tilt::MinusY,
        Tilt::SouthEast,
        Tilt::NorthWest,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Tilt::SouthWest => "↙",
            Tilt::NorthEast => "↗",
            Tilt::PlusY => "⊗",
            Tilt::MinusY => "⊙",
            Tilt::SouthEast => "↘",
            Tilt::NorthWest => "↖",
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Tilt::SouthWest => "sw",
            Tilt::NorthEast => "ne",
            Tilt::PlusY => "py",
            Tilt::MinusY => "my",
            Tilt::SouthEast => "se",
            Tilt::NorthWest => "nw",
        }
    }

    /// Operator whose eigenvector this state is, and the eigenvalue.
    pub fn eigen_operator(self) -> (Matrix2, f64) {
        let [sx, sy, sz] = pauli_matrices();
        match self {
            Tilt::SouthWest => ((sx + sz) * FRAC_1_SQRT_2, -1.0),
            Tilt::NorthEast => ((sx + sz) * FRAC_1_SQRT_2, 1.0),
            Tilt::PlusY => (sy, 1.0),
            Tilt::MinusY => (sy, -1.0),
            Tilt::SouthEast => ((sx - sz) * FRAC_1_SQRT_2, 1.0),
            Tilt::NorthWest => ((sx - sz) * FRAC_1_SQRT_2, -1.0),
        }
    }
}

impl fmt::Display for Tilt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Tilt {
    type Err = ComptonError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Tilt::ALL
            .into_iter()
            .find(|tilt| t == tilt.symbol() || t.eq_ignore_ascii_case(tilt.ascii()))
            .ok_or_else(|| ComptonError::InvalidLabel(s.to_string()))
    }
}

/// Angle `θₙ = 2π + (1+2n)π/4` of the n-th tilted Bloch state.
///
/// The 2π offset flips the sign of both half-angle components, so these
/// states coincide exactly with the closed forms of [`tilted_spinor`].
pub fn tilt_angle(n: u32) -> f64 {
    2.0 * PI + f64::from(1 + 2 * n) * PI / 4.0
}

/// Spin state for a tilt label.
///
/// ↘ and ↖ use the closed forms `N∓·(1∓√2, −1)`; ↙ and ↗ are their sum and
/// difference over √2, which equal the Bloch states `s(θ₂)` and `s(θ₀)`.
pub fn tilted_spinor(label: Tilt) -> PauliSpinor {
    let n_minus = 1.0 / (2.0 * (2.0 - SQRT_2)).sqrt();
    let n_plus = 1.0 / (2.0 * (2.0 + SQRT_2)).sqrt();
    let se = PauliSpinor::real(n_minus * (1.0 - SQRT_2), -n_minus);
    let nw = PauliSpinor::real(n_plus * (1.0 + SQRT_2), -n_plus);
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    match label {
        Tilt::SouthEast => se,
        Tilt::NorthWest => nw,
        Tilt::SouthWest => (se + nw).scale(r),
        Tilt::NorthEast => (se - nw).scale(r),
        Tilt::PlusY => PauliSpinor::new(r, I * r),
        Tilt::MinusY => PauliSpinor::new(r, -I * r),
    }
}

/// `[σx, σy, σz]`.
pub fn pauli_matrices() -> [Matrix2; 3] {
    [
        Matrix2::new([[ZERO, ONE], [ONE, ZERO]]),
        Matrix2::new([[ZERO, -I], [I, ZERO]]),
        Matrix2::new([[ONE, ZERO], [ZERO, -ONE]]),
    ]
}

/// Spin expectation `(s†σx s, s†σy s, s†σz s)` of a unit spinor.
pub fn pauli_expectation(s: &PauliSpinor) -> Result<[f64; 3]> {
    let n = s.norm_sqr();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(ComptonError::Precondition(format!(
            "Pauli spinor must be normalized, |s|² = {n}"
        )));
    }
    let v = s.to_array();
    Ok(pauli_matrices().map(|sigma| {
        let e = sigma.sandwich(&v, &v);
        debug_assert!(e.im.abs() < 1e-12);
        e.re
    }))
}

/// Dirac matrices `[γ⁰, γ¹, γ², γ³]` in the standard representation.
pub fn gamma_matrices() -> [Matrix4; 4] {
    let [sx, sy, sz] = pauli_matrices();
    let g0 = Matrix4::from_diagonal([ONE, ONE, -ONE, -ONE]);
    // [[0, σ], [−σ, 0]] = (iσ_y) ⊗ σ
    let eps = Matrix2::new([[ZERO, ONE], [-ONE, ZERO]]);
    [g0, kron(&eps, &sx), kron(&eps, &sy), kron(&eps, &sz)]
}

/// `γ^µ v_µ` for a complex four-vector given with upper indices.
pub fn slash_complex(v: &[C64; 4]) -> Matrix4 {
    gamma_matrices()
        .iter()
        .zip(v)
        .zip(METRIC)
        .fold(Matrix4::zeros(), |acc, ((g, &c), m)| acc + g.scale(c * m))
}

pub fn slash(v: &FourVector) -> Matrix4 {
    slash_complex(&v.to_complex())
}

/// Four-component positive-energy spinor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracSpinor(pub [C64; 4]);

impl DiracSpinor {
    /// Row spinor `ū = u†γ⁰`.
    pub fn bar(&self) -> [C64; 4] {
        let u = self.0;
        [u[0].conj(), u[1].conj(), -u[2].conj(), -u[3].conj()]
    }

    /// `ū Γ v` with `self` as the barred spinor.
    pub fn bar_sandwich(&self, gamma: &Matrix4, v: &DiracSpinor) -> C64 {
        let gv = gamma.mul_vec(&v.0);
        self.bar().iter().zip(&gv).map(|(a, b)| a * b).sum()
    }

    /// `ū u`.
    pub fn scalar_norm(&self) -> f64 {
        self.bar_sandwich(&Matrix4::identity(), self).re
    }

    /// `u†u`.
    pub fn density(&self) -> f64 {
        norm_sqr(&self.0)
    }
}

/// Free spinor `u(p,s) = √((E+m)/2m) (s ; σ·p s/(E+m))`.
pub fn dirac_spinor(p: &FourVector, s: &PauliSpinor) -> Result<DiracSpinor> {
    let m = ELECTRON_MASS;
    let m2 = m * m;
    let p2 = p.mass_sqr();
    if (p2 - m2).abs() > ON_SHELL_TOLERANCE * m2.max(p.t * p.t) || p.t <= 0.0 {
        return Err(ComptonError::OffShell { mass_sqr: p2, expected: m2 });
    }
    let [sx, sy, sz] = pauli_matrices();
    let sigma_p = sx * p.x + sy * p.y + sz * p.z;
    let upper = s.to_array();
    let lower = sigma_p.mul_vec(&upper);
    let e_m = p.t + m;
    let n = (e_m / (2.0 * m)).sqrt();
    Ok(DiracSpinor([
        upper[0] * n,
        upper[1] * n,
        lower[0] * (n / e_m),
        lower[1] * (n / e_m),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_spinor_close(a: &PauliSpinor, b: &PauliSpinor, tol: f64) {
        assert!((*a - *b).norm_sqr().sqrt() < tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn bloch_poles() {
        assert_spinor_close(&bloch_spinor(0.0, 0.0), &PauliSpinor::UP, 1e-16);
        assert_spinor_close(&bloch_spinor(PI, 0.0), &PauliSpinor::DOWN, 1e-16);
    }

    #[test]
    fn tilted_closed_forms_equal_offset_bloch_states() {
        let pairs = [
            (Tilt::NorthEast, 0),
            (Tilt::SouthEast, 1),
            (Tilt::SouthWest, 2),
            (Tilt::NorthWest, 3),
        ];
        for (tilt, n) in pairs {
            assert_spinor_close(&tilted_spinor(tilt), &bloch_spinor(tilt_angle(n), 0.0), 1e-15);
        }
        let se = tilted_spinor(Tilt::SouthEast);
        assert!((se.c_up.re + 0.38268343).abs() < 1e-8);
        assert!((se.c_down.re + 0.92387953).abs() < 1e-8);
        assert!((se.c_up.re + (3.0 * PI / 8.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn tilted_spinors_are_unit_eigenvectors() {
        for tilt in Tilt::ALL {
            let s = tilted_spinor(tilt);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
            let (op, ev) = tilt.eigen_operator();
            let v = s.to_array();
            let r = op.mul_vec(&v);
            let res: f64 = (0..2).map(|i| (r[i] - v[i] * ev).norm_sqr()).sum::<f64>().sqrt();
            assert!(res < 1e-12, "{tilt}: {res}");
        }
    }

    #[test]
    fn plus_y_spinor_matches_closed_form() {
        let s = tilted_spinor(Tilt::PlusY);
        assert!((s.c_up - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        assert!((s.c_down - C64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-16);
    }

    #[test]
    fn southwest_is_normalized_sum() {
        let sum = (tilted_spinor(Tilt::SouthEast) + tilted_spinor(Tilt::NorthWest))
            .scale(C64::new(FRAC_1_SQRT_2, 0.0));
        assert_spinor_close(&sum, &tilted_spinor(Tilt::SouthWest), 1e-15);
    }

    #[test]
    fn expectation_values_of_tilted_states() {
        let h = FRAC_1_SQRT_2;
        let expected = [
            (Tilt::SouthWest, [-h, 0.0, -h]),
            (Tilt::NorthEast, [h, 0.0, h]),
            (Tilt::PlusY, [0.0, 1.0, 0.0]),
            (Tilt::MinusY, [0.0, -1.0, 0.0]),
            (Tilt::SouthEast, [h, 0.0, -h]),
            (Tilt::NorthWest, [-h, 0.0, h]),
        ];
        for (tilt, e) in expected {
            let v = pauli_expectation(&tilted_spinor(tilt)).unwrap();
            for i in 0..3 {
                assert!((v[i] - e[i]).abs() < 1e-12, "{tilt} {i}: {v:?}");
            }
        }
        assert_eq!(pauli_expectation(&PauliSpinor::UP).unwrap(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn unnormalized_expectation_is_rejected() {
        let s = PauliSpinor::real(1.0, 1.0);
        assert!(matches!(pauli_expectation(&s), Err(ComptonError::Precondition(_))));
    }

    #[test]
    fn labels_parse_in_both_spellings() {
        for tilt in Tilt::ALL {
            assert_eq!(tilt.symbol().parse::<Tilt>().unwrap(), tilt);
            assert_eq!(tilt.ascii().to_uppercase().parse::<Tilt>().unwrap(), tilt);
        }
        assert!(matches!("up".parse::<Tilt>(), Err(ComptonError::InvalidLabel(_))));
    }

    #[test]
    fn clifford_algebra() {
        let g = gamma_matrices();
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = g[mu] * g[nu] + g[nu] * g[mu];
                let expect = if mu == nu { Matrix4::identity() * (2.0 * METRIC[mu]) } else { Matrix4::zeros() };
                assert!(anti.max_abs_diff(&expect) < 1e-14, "({mu},{nu})");
            }
        }
    }

    #[test]
    fn slash_of_time_unit_is_gamma0() {
        let s = slash(&FourVector::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(s, gamma_matrices()[0]);
    }

    #[test]
    fn lightlike_slash_squares_to_zero() {
        let k = FourVector::new(0.3, 0.0, -0.3 * 0.6, 0.3 * 0.8);
        assert!((slash(&k) * slash(&k)).max_abs() < 1e-15);
    }

    #[test]
    fn rest_frame_spinor() {
        let u = dirac_spinor(&FourVector::new(1.0, 0.0, 0.0, 0.0), &PauliSpinor::UP).unwrap();
        assert_eq!(u.0, [ONE, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn density_equals_energy_at_reference_momentum() {
        let p = FourVector::on_shell(1.0, [-0.02, 0.0, 1.0]);
        let u = dirac_spinor(&p, &tilted_spinor(Tilt::SouthEast)).unwrap();
        assert!((u.density() - 1.41435).abs() < 1e-5);
        assert!((u.density() - p.t).abs() < 1e-14);
        assert!((u.scalar_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn off_shell_momentum_is_rejected() {
        let p = FourVector::new(1.0, 0.5, 0.0, 0.0);
        assert!(matches!(dirac_spinor(&p, &PauliSpinor::UP), Err(ComptonError::OffShell { .. })));
    }

    proptest! {
        #[test]
        fn dirac_equation_and_normalization(
            px in -3.0f64..3.0, py in -3.0f64..3.0, pz in -3.0f64..3.0,
            theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI),
        ) {
            let p = FourVector::on_shell(1.0, [px, py, pz]);
            let u = dirac_spinor(&p, &bloch_spinor(theta, phi)).unwrap();
            let pu = slash(&p).mul_vec(&u.0);
            let scale = p.t;
            for (a, b) in pu.iter().zip(&u.0) {
                prop_assert!((a - b).norm() < 1e-10 * scale);
            }
            prop_assert!((u.scalar_norm() - 1.0).abs() < 1e-10);
            prop_assert!((u.density() / p.t - 1.0).abs() < 1e-10);
        }

        #[test]
        fn slash_is_linear(
            a in prop::array::uniform4(-2.0f64..2.0),
            b in prop::array::uniform4(-2.0f64..2.0),
            c in -3.0f64..3.0,
        ) {
            let va = FourVector::new(a[0], a[1], a[2], a[3]);
            let vb = FourVector::new(b[0], b[1], b[2], b[3]);
            let lhs = slash(&(va * c + vb));
            let rhs = slash(&va) * c + slash(&vb);
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
            // slash(v)² = v·v
            let sq = slash(&va) * slash(&va);
            prop_assert!(sq.max_abs_diff(&(Matrix4::identity() * va.mass_sqr())) < 1e-12);
        }

        #[test]
        fn bloch_states_are_unit_and_point_along_axis(theta in 0.0f64..PI, phi in -PI..PI) {
            let s = bloch_spinor(theta, phi);
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
            let v = pauli_expectation(&s).unwrap();
            let e = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            for i in 0..3 {
                prop_assert!((v[i] - e[i]).abs() < 1e-12);
            }
        }
    }
}
