//! Photon polarization vectors and the direction-dependent H/V bases.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ComptonError, Result};
use crate::kinematics::ScatteringGeometry;
use crate::linalg::{C64, I, ONE, ZERO};

/// Tolerance on `ε⃗·k̂ = 0` for transverse polarization vectors.
pub const TRANSVERSE_TOLERANCE: f64 = 1e-12;

/// Azimuths closer than this to π/2 use the explicit x-z plane basis.
const PLANE_TOLERANCE: f64 = 1e-12;

/// Complex spatial polarization vector; its time component is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationVector(pub [C64; 3]);

impl PolarizationVector {
    pub fn real(v: [f64; 3]) -> Self {
        PolarizationVector(v.map(|c| C64::new(c, 0.0)))
    }

    /// Embeds the vector as `(0, ε⃗)`.
    pub fn four(&self) -> [C64; 4] {
        [ZERO, self.0[0], self.0[1], self.0[2]]
    }

    pub fn conj(&self) -> Self {
        PolarizationVector(self.0.map(|c| c.conj()))
    }

    pub fn scale(&self, z: C64) -> Self {
        PolarizationVector(self.0.map(|c| c * z))
    }

    /// Hermitian product `ε⃗*·η⃗`.
    pub fn inner(&self, other: &PolarizationVector) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    /// Bilinear product `ε⃗·v⃗` with a real vector.
    pub fn dot_real(&self, v: &[f64; 3]) -> C64 {
        self.0.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn cross(&self, other: &PolarizationVector) -> [C64; 3] {
        let (a, b) = (&self.0, &other.0);
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn is_transverse_to(&self, direction: &[f64; 3]) -> bool {
        self.dot_real(direction).norm() < TRANSVERSE_TOLERANCE
    }
}

impl std::ops::Add for PolarizationVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        PolarizationVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

/// Named photon polarization states, expressed in a basis's (H, V) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhotonPolarization {
    H,
    V,
    /// Left circular, `(H + iV)/√2`.
    L,
    /// Right circular, `(H − iV)/√2`.
    R,
    /// Diagonal, `(H + V)/√2`.
    D,
    /// Antidiagonal, `(H − V)/√2`.
    A,
}

impl PhotonPolarization {
    pub const ALL: [PhotonPolarization; 6] = [Self::H, Self::V, Self::L, Self::R, Self::D, Self::A];

    /// Coefficients `(c_H, c_V)`.
    pub fn coefficients(self) -> [C64; 2] {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            Self::H => [ONE, ZERO],
            Self::V => [ZERO, ONE],
            Self::L => [r, I * r],
            Self::R => [r, -I * r],
            Self::D => [r, r],
            Self::A => [r, -r],
        }
    }
}

impl fmt::Display for PhotonPolarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for PhotonPolarization {
    type Err = ComptonError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| s.trim().eq_ignore_ascii_case(&p.to_string()))
            .ok_or_else(|| ComptonError::InvalidLabel(s.to_string()))
    }
}

/// Linear polarization pair attached to one photon direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationBasis {
    pub h: PolarizationVector,
    pub v: PolarizationVector,
    pub direction: [f64; 3],
}

impl PolarizationBasis {
    pub fn vector(&self, pol: PhotonPolarization) -> PolarizationVector {
        self.combine(pol.coefficients())
    }

    pub fn combine(&self, [ch, cv]: [C64; 2]) -> PolarizationVector {
        self.h.scale(ch) + self.v.scale(cv)
    }

    pub fn pair(&self) -> [PolarizationVector; 2] {
        [self.h, self.v]
    }
}

/// Basis of the incoming photon travelling along +x: H = ê_y, V = ê_z.
pub fn incoming_basis() -> PolarizationBasis {
    PolarizationBasis {
        h: PolarizationVector::real([0.0, 1.0, 0.0]),
        v: PolarizationVector::real([0.0, 0.0, 1.0]),
        direction: [1.0, 0.0, 0.0],
    }
}

/// Basis of the outgoing photon.
///
/// V is the unit normal `(0, −sinφ, cosφ)` of the plane containing ê_x and
/// k̂′ and H completes it as `k̂′ × V`. For φ = 0 this gives
/// H = (sinθ, −cosθ, 0), V = ê_z. In the x-z plane V is taken as +ê_y, so
/// H = (−sinθ, 0, cosθ). With this handedness both planes assign the same
/// circular states at θ = π, up to a global phase.
pub fn polarization_basis(g: &ScatteringGeometry) -> PolarizationBasis {
    let khat = g.outgoing_direction();
    let v = if (g.phi - FRAC_PI_2).abs() < PLANE_TOLERANCE {
        [0.0, 1.0, 0.0]
    } else {
        let (s, c) = g.phi.sin_cos();
        [0.0, -s, c]
    };
    let h = [
        khat[1] * v[2] - khat[2] * v[1],
        khat[2] * v[0] - khat[0] * v[2],
        khat[0] * v[1] - khat[1] * v[0],
    ];
    PolarizationBasis {
        h: PolarizationVector::real(h),
        v: PolarizationVector::real(v),
        direction: khat,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: &PolarizationVector, b: [f64; 3]) -> bool {
        a.0.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-15)
    }

    #[test]
    fn xy_plane_matches_explicit_form() {
        for theta in [0.0, 0.3, FRAC_PI_2, 2.0, PI] {
            let b = polarization_basis(&ScatteringGeometry::new(0.02, 0.0, 1.0, theta, 0.0));
            assert!(close(&b.h, [theta.sin(), -theta.cos(), 0.0]));
            assert!(close(&b.v, [0.0, 0.0, 1.0]));
        }
        let b = polarization_basis(&ScatteringGeometry::new(0.02, 0.0, 1.0, FRAC_PI_2, 0.0));
        assert!(close(&b.h, [1.0, 0.0, 0.0]));
    }

    #[test]
    fn backscatter_bases_share_circular_states() {
        let xy = polarization_basis(&ScatteringGeometry::new(0.02, 0.0, 1.0, PI, 0.0));
        let xz = polarization_basis(&ScatteringGeometry::new(0.02, 0.0, 1.0, PI, FRAC_PI_2));
        assert!(close(&xy.h, [0.0, 1.0, 0.0]) && close(&xy.v, [0.0, 0.0, 1.0]));
        assert!(close(&xz.h, [0.0, 0.0, -1.0]) && close(&xz.v, [0.0, 1.0, 0.0]));
        // The x-z plane L and R differ from the x-y ones by a global phase only.
        for pol in [PhotonPolarization::L, PhotonPolarization::R] {
            let overlap = xy.vector(pol).inner(&xz.vector(pol));
            assert!((overlap.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn xz_plane_vertical_is_y() {
        let b = polarization_basis(&ScatteringGeometry::new(0.02, 0.0, 1.0, 1.0, FRAC_PI_2));
        assert!(close(&b.v, [0.0, 1.0, 0.0]));
        assert!(close(&b.h, [-(1.0f64).sin(), 0.0, (1.0f64).cos()]));
    }

    #[test]
    fn circular_coefficients_are_orthonormal() {
        let [l, r] = [PhotonPolarization::L, PhotonPolarization::R].map(|p| p.coefficients());
        let ip: C64 = l.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
        assert!(ip.norm() < 1e-16);
        let n: f64 = l.iter().map(|c| c.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-15);
    }

    #[test]
    fn labels_round_trip() {
        for p in PhotonPolarization::ALL {
            assert_eq!(p.to_string().to_lowercase().parse::<PhotonPolarization>().unwrap(), p);
        }
        assert!("Q".parse::<PhotonPolarization>().is_err());
    }

    proptest! {
        #[test]
        fn basis_is_orthonormal_and_transverse(theta in 0.0f64..(2.0 * PI), phi in 0.0f64..(2.0 * PI)) {
            let b = polarization_basis(&ScatteringGeometry::new(0.02, 0.0, 1.0, theta, phi));
            for pol in PhotonPolarization::ALL {
                let e = b.vector(pol);
                prop_assert!((e.inner(&e).re - 1.0).abs() < 1e-12);
                prop_assert!(e.is_transverse_to(&b.direction));
            }
            prop_assert!(b.h.inner(&b.v).norm() < 1e-12);
        }
    }
}
