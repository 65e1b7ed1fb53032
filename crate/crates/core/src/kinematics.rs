//! Scattering geometry, energy–momentum conservation and x-boosts.
//!
//! The incoming photon travels along +x with momentum `kp`; the incoming
//! electron carries `(-kp + dp1, p2, p3)`. The outgoing photon direction is
//! parametrized by the scattering angle `theta` measured from +x and the
//! azimuth `phi`, so that `phi = 0` scans the x-y plane and `phi = π/2` the x-z
//! plane. All quantities are in units of the electron mass.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ComptonError, Result};
use crate::linalg::C64;

/// Electron mass in internal units.
pub const ELECTRON_MASS: f64 = 1.0;

/// Relative tolerance for on-shell and conservation checks.
pub const ON_SHELL_TOLERANCE: f64 = 1e-10;

/// Real Minkowski four-vector with metric diag(+,−,−,−).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { t, x, y, z }
    }

    /// On-shell four-momentum with energy fixed by the spatial part.
    pub fn on_shell(mass: f64, spatial: [f64; 3]) -> Self {
        let [x, y, z] = spatial;
        FourVector::new((mass * mass + x * x + y * y + z * z).sqrt(), x, y, z)
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    pub fn mass_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn spatial_norm(&self) -> f64 {
        let [x, y, z] = self.spatial();
        (x * x + y * y + z * z).sqrt()
    }

    pub fn components(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn to_complex(&self) -> [C64; 4] {
        self.components().map(|c| C64::new(c, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for FourVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        FourVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        FourVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for FourVector {
    type Output = Self;
    fn neg(self) -> Self {
        FourVector::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        FourVector::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

/// Incoming momenta and outgoing photon direction of one scattering event.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringGeometry {
    /// Incoming photon momentum along +x.
    pub kp: f64,
    /// Transverse electron momentum along y.
    pub p2: f64,
    /// Electron momentum along z.
    pub p3: f64,
    /// Scattering angle of the outgoing photon, measured from +x.
    pub theta: f64,
    /// Azimuth of the outgoing photon around x, measured from +y.
    pub phi: f64,
    /// Shift of the incoming electron's x momentum away from `-kp`.
    #[serde(default)]
    pub dp1: f64,
}

impl ScatteringGeometry {
    pub fn new(kp: f64, p2: f64, p3: f64, theta: f64, phi: f64) -> Self {
        ScatteringGeometry { kp, p2, p3, theta, phi, dp1: 0.0 }
    }

    /// Photon reflected straight back along −x.
    pub fn backscatter(kp: f64, p2: f64, p3: f64) -> Self {
        Self::new(kp, p2, p3, std::f64::consts::PI, 0.0)
    }

    pub fn with_angles(self, theta: f64, phi: f64) -> Self {
        ScatteringGeometry { theta, phi, ..self }
    }

    pub fn with_p1_shift(self, dp1: f64) -> Self {
        ScatteringGeometry { dp1, ..self }
    }

    /// Unit vector of the outgoing photon.
    pub fn outgoing_direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [ct, st * cp, st * sp]
    }

    /// Energy of the incoming electron.
    pub fn electron_energy(&self) -> f64 {
        initial_momenta(self).0.t
    }
}

/// Incoming electron and photon four-momenta `(p_i, k)`.
pub fn initial_momenta(g: &ScatteringGeometry) -> (FourVector, FourVector) {
    let p_i = FourVector::on_shell(ELECTRON_MASS, [-g.kp + g.dp1, g.p2, g.p3]);
    let k = FourVector::new(g.kp, g.kp, 0.0, 0.0);
    (p_i, k)
}

/// Outgoing photon energy fixed by four-momentum conservation.
///
/// For `p2 = 0` and an unshifted electron this is
/// `kp (E + kp) / (E + kp − p3 sinθ sinφ)`; the general form keeps the
/// transverse and longitudinal electron momenta.
pub fn omega_prime(g: &ScatteringGeometry) -> Result<f64> {
    if !(g.kp >= 0.0) {
        return Err(ComptonError::Precondition(format!(
            "photon momentum must be non-negative, got {}",
            g.kp
        )));
    }
    let (p_i, k) = initial_momenta(g);
    let [nx, ny, nz] = g.outgoing_direction();
    let n = FourVector::new(1.0, nx, ny, nz);
    let denom = (p_i + k).dot(&n);
    if !(denom > 0.0) {
        return Err(ComptonError::Kinematics(format!(
            "non-positive denominator {denom:e} for outgoing photon energy"
        )));
    }
    Ok(p_i.dot(&k) / denom)
}

/// Outgoing electron and photon four-momenta `(p_f, k')`, verified on-shell.
pub fn final_momenta(g: &ScatteringGeometry) -> Result<(FourVector, FourVector)> {
    let w = omega_prime(g)?;
    let (p_i, k) = initial_momenta(g);
    let [nx, ny, nz] = g.outgoing_direction();
    let k_f = FourVector::new(w, w * nx, w * ny, w * nz);
    let p_f = p_i + k - k_f;
    let m2 = ELECTRON_MASS * ELECTRON_MASS;
    let scale = m2.max(p_f.t * p_f.t);
    if (p_f.mass_sqr() - m2).abs() > ON_SHELL_TOLERANCE * scale {
        return Err(ComptonError::Kinematics(format!(
            "outgoing electron off-shell: p_f² = {}",
            p_f.mass_sqr()
        )));
    }
    Ok((p_f, k_f))
}

/// All four momenta of an event.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Momenta {
    pub p_i: FourVector,
    pub k: FourVector,
    pub p_f: FourVector,
    pub k_f: FourVector,
}

impl Momenta {
    pub fn from_geometry(g: &ScatteringGeometry) -> Result<Self> {
        let (p_i, k) = initial_momenta(g);
        let (p_f, k_f) = final_momenta(g)?;
        Ok(Momenta { p_i, k, p_f, k_f })
    }

    /// `p_i + k − p_f − k'`, zero for a conserving event.
    pub fn conservation_residual(&self) -> FourVector {
        self.p_i + self.k - self.p_f - self.k_f
    }
}

/// Flux-factor speed between the incoming photon and electron,
/// `sqrt(E² + 2E k̂·p + |p|²)/E`.
///
/// In the head-on geometry (`p_x = −kp`) this is
/// `sqrt(E² − 2E kp + kp² + p2² + p3²)/E`, the form used for the reference
/// cross-section values. Note the sign of the `k̂·p` term: the kinematic
/// `|v_γ − v_e|` would carry the opposite sign.
pub fn relative_speed(p_i: &FourVector, k: &FourVector) -> f64 {
    let kn = k.spatial_norm();
    let khat = if kn > 0.0 {
        [k.x / kn, k.y / kn, k.z / kn]
    } else {
        [1.0, 0.0, 0.0]
    };
    let e = p_i.t;
    let p = p_i.spatial();
    let kp: f64 = khat.iter().zip(&p).map(|(a, b)| a * b).sum();
    let p2: f64 = p.iter().map(|c| c * c).sum();
    (e * e + 2.0 * e * kp + p2).sqrt() / e
}

/// Pure Lorentz boost along x with the given rapidity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzBoost {
    pub rapidity: f64,
}

impl LorentzBoost {
    pub fn new(rapidity: f64) -> Self {
        LorentzBoost { rapidity }
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        boost_matrix(self.rapidity)
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        let (sh, ch) = (self.rapidity.sinh(), self.rapidity.cosh());
        FourVector::new(ch * v.t - sh * v.x, -sh * v.t + ch * v.x, v.y, v.z)
    }

    pub fn inverse(&self) -> Self {
        LorentzBoost::new(-self.rapidity)
    }

    /// `self ∘ other`; collinear rapidities add.
    pub fn compose(&self, other: &LorentzBoost) -> Self {
        LorentzBoost::new(self.rapidity + other.rapidity)
    }
}

/// `Λ(Δ)` acting on `(t, x, y, z)`.
pub fn boost_matrix(rapidity: f64) -> [[f64; 4]; 4] {
    let (sh, ch) = (rapidity.sinh(), rapidity.cosh());
    [
        [ch, -sh, 0.0, 0.0],
        [-sh, ch, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn apply_matrix(m: &[[f64; 4]; 4], v: &FourVector) -> FourVector {
    let c = v.components();
    let r: [f64; 4] = std::array::from_fn(|i| (0..4).map(|j| m[i][j] * c[j]).sum());
    FourVector::new(r[0], r[1], r[2], r[3])
}

/// Rapidities relating a lab frame with an x-shifted electron momentum to the
/// frame in which electron and photon x momenta are equal and opposite again.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricFrame {
    /// `sqrt(m² + p2² + p3²)`.
    pub transverse_energy: f64,
    /// Rapidity of the unshifted electron, `sinh η = kp / Ẽ`.
    pub eta: f64,
    /// Boost producing the shift `dp1` from the unshifted electron.
    pub delta: f64,
    /// Boost from the shifted lab frame into the symmetric frame.
    pub theta: f64,
}

impl SymmetricFrame {
    /// Photon momentum in the symmetric frame, `kp e^{−θ}`.
    pub fn photon_momentum(&self, kp: f64) -> f64 {
        kp * (-self.theta).exp()
    }

    /// Combined transformation `Λ(θ)Λ(Δ)` from the unshifted electron frame.
    pub fn total_boost(&self) -> LorentzBoost {
        LorentzBoost::new(self.theta).compose(&LorentzBoost::new(self.delta))
    }
}

/// Exact rapidity of the boost into the symmetric-momentum frame after the
/// incoming electron's x momentum changed from `-kp` to `-kp + dp`.
///
/// The closed form is exact for any `dp`; its first-order behaviour is
/// `θ ≈ e^{−η} dp / Ẽ`.
pub fn symmetric_frame_rapidity(dp: f64, g: &ScatteringGeometry) -> Result<SymmetricFrame> {
    if !(g.kp > 0.0) {
        return Err(ComptonError::Precondition(
            "symmetric frame requires a positive photon momentum".into(),
        ));
    }
    let e_t = (ELECTRON_MASS * ELECTRON_MASS + g.p2 * g.p2 + g.p3 * g.p3).sqrt();
    let eta = (g.kp / e_t).asinh();
    let delta = (eta.sinh() - dp / e_t).asinh() - eta;
    let arg = (-delta).exp() - (-2.0 * eta - delta).exp() + (-2.0 * eta - 2.0 * delta).exp();
    if !(arg > 0.0) {
        return Err(ComptonError::Kinematics(format!(
            "symmetric-frame rapidity undefined: ln argument {arg:e}"
        )));
    }
    Ok(SymmetricFrame { transverse_energy: e_t, eta, delta, theta: 0.5 * arg.ln() })
}
