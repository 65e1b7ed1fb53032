//! Measurable quantities built on the amplitude matrix.
//!
//! Cross sections carry the kinematic prefactor and refer to a normalized
//! incoming state. Stokes and spin parameters are normalized by the norm of
//! the scattered state, so they are independent of that prefactor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::amplitudes::{
    amplitude_matrix, incoming_basis, polarization_basis, scatter, JointState, PhotonPolarization,
    PolarizationVector, SpinBasis, TRANSVERSE_TOLERANCE,
};
use crate::dirac::{pauli_expectation, tilted_spinor, PauliSpinor, Tilt};
use crate::error::{ComptonError, Result};
use crate::kinematics::{initial_momenta, relative_speed, FourVector, ScatteringGeometry};
use crate::linalg::{C64, I};
use crate::units::PhysicalConstants;

/// `ψ_f = M ψ_i` in the σ_z spin basis; photon components refer to the
/// outgoing polarization basis of `g`.
pub fn final_state(g: &ScatteringGeometry, psi_i: &JointState) -> Result<JointState> {
    let m = amplitude_matrix(g, SpinBasis::UpDown)?;
    scatter(&psi_i.in_basis(SpinBasis::UpDown), &m)
}

/// Kinematic factor turning `|amplitude|²` into dσ/dΩ in barn/sr:
/// `r_e² (ω′/kp)² (m/(E|Δv|)) (m/(E+kp))`.
pub fn cross_section_prefactor(g: &ScatteringGeometry, constants: &PhysicalConstants) -> Result<f64> {
    let (p_i, k) = initial_momenta(g);
    let [x, y, z] = g.outgoing_direction();
    let n = FourVector::new(1.0, 1.0, 0.0, 0.0);
    let n_f = FourVector::new(1.0, x, y, z);
    // ω′/kp written without dividing by kp, so that kp = 0 is regular.
    let denom = (p_i + k).dot(&n_f);
    if !(denom > 0.0) {
        return Err(ComptonError::Kinematics(format!(
            "non-positive denominator {denom:e} for outgoing photon energy"
        )));
    }
    let ratio = p_i.dot(&n) / denom;
    let e = p_i.t;
    let flux = e * relative_speed(&p_i, &k);
    Ok(constants.classical_radius_sqr_barn() * ratio * ratio / flux / (e + g.kp))
}

/// Cross sections refer to the normalized incoming state.
fn initial_norm(psi_i: &JointState) -> Result<f64> {
    let n = psi_i.norm_sqr();
    if !(n > 0.0) {
        return Err(ComptonError::DegenerateState("cross section of a zero initial state".into()));
    }
    Ok(n)
}

/// dσ/dΩ in barn/sr for the transition `ψ_i → |pol, spin⟩`.
pub fn differential_cross_section(
    pol: [C64; 2],
    spin: &PauliSpinor,
    g: &ScatteringGeometry,
    psi_i: &JointState,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let amp = final_state(g, psi_i)?.amplitude(pol, spin);
    Ok(cross_section_prefactor(g, constants)? * amp.norm_sqr() / initial_norm(psi_i)?)
}

/// The four nested cross sections (barn/sr) used to compare projected and
/// summed detection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSections {
    /// Projected onto `|L,↖⟩`.
    pub projected: f64,
    /// `|L,↖⟩ + |R,↖⟩`: photon polarization summed, electron ↖.
    pub polarization_summed: f64,
    /// `|L,↖⟩ + |L,↘⟩`: electron spin summed, photon L.
    pub spin_summed: f64,
    /// Summed over all final states.
    pub total: f64,
}

pub fn cross_sections(
    g: &ScatteringGeometry,
    psi_i: &JointState,
    constants: &PhysicalConstants,
) -> Result<CrossSections> {
    let psi_f = final_state(g, psi_i)?;
    let pre = cross_section_prefactor(g, constants)? / initial_norm(psi_i)?;
    let (nw, se) = (tilted_spinor(Tilt::NorthWest), tilted_spinor(Tilt::SouthEast));
    let (l, r) = (PhotonPolarization::L.coefficients(), PhotonPolarization::R.coefficients());
    let p = |pol, s: &PauliSpinor| psi_f.amplitude(pol, s).norm_sqr();
    let l_nw = p(l, &nw);
    Ok(CrossSections {
        projected: pre * l_nw,
        polarization_summed: pre * (l_nw + p(r, &nw)),
        spin_summed: pre * (l_nw + p(l, &se)),
        total: pre * psi_f.norm_sqr(),
    })
}

/// `|⟨pol, spin|ψ⟩|² / ⟨ψ|ψ⟩`.
pub fn projection_probability(pol: [C64; 2], spin: &PauliSpinor, psi: &JointState) -> Result<f64> {
    let n = psi.norm_sqr();
    if !(n > 0.0) {
        return Err(ComptonError::DegenerateState("projection onto a zero state".into()));
    }
    Ok(psi.amplitude(pol, spin).norm_sqr() / n)
}

/// Whether a parameter set conditions on one detected partner state or sums
/// over both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conditioning {
    /// Stokes parameters given electron ↖; spin parameters given photon L.
    Conditional,
    Summed,
}

/// Photon Stokes parameters `(Π₀, Π₁, Π₂, Π₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesVector(pub [f64; 4]);

/// Electron spin parameters `(Ξ₀, Ξ₁, Ξ₂, Ξ₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinExpectationVector(pub [f64; 4]);

pub fn stokes_of_state(psi_f: &JointState, mode: Conditioning) -> Result<StokesVector> {
    let spins: &[Tilt] = match mode {
        Conditioning::Conditional => &[Tilt::NorthWest],
        Conditioning::Summed => &[Tilt::NorthWest, Tilt::SouthEast],
    };
    let p = |pol: PhotonPolarization| -> Result<f64> {
        spins.iter().map(|&s| projection_probability(pol.coefficients(), &tilted_spinor(s), psi_f)).sum()
    };
    use PhotonPolarization::*;
    let (h, v) = (p(H)?, p(V)?);
    Ok(StokesVector([h + v, h - v, p(D)? - p(A)?, p(L)? - p(R)?]))
}

pub fn spin_expectation_of_state(psi_f: &JointState, mode: Conditioning) -> Result<SpinExpectationVector> {
    let pols: &[PhotonPolarization] = match mode {
        Conditioning::Conditional => &[PhotonPolarization::L],
        Conditioning::Summed => &[PhotonPolarization::L, PhotonPolarization::R],
    };
    let p = |s: Tilt| -> Result<f64> {
        pols.iter().map(|pol| projection_probability(pol.coefficients(), &tilted_spinor(s), psi_f)).sum()
    };
    use Tilt::*;
    let (sw, ne) = (p(SouthWest)?, p(NorthEast)?);
    Ok(SpinExpectationVector([sw + ne, sw - ne, p(PlusY)? - p(MinusY)?, p(SouthEast)? - p(NorthWest)?]))
}

pub fn stokes(g: &ScatteringGeometry, psi_i: &JointState, mode: Conditioning) -> Result<StokesVector> {
    stokes_of_state(&final_state(g, psi_i)?, mode)
}

pub fn spin_expectation(
    g: &ScatteringGeometry,
    psi_i: &JointState,
    mode: Conditioning,
) -> Result<SpinExpectationVector> {
    spin_expectation_of_state(&final_state(g, psi_i)?, mode)
}

/// Intrinsic spin of a plane-wave photon mode along the lab x axis, in ħ.
///
/// The spin density `S = −i ε* × ε` (the period average of E × A in units of
/// the photon energy) is projected onto the propagation direction and the
/// result is expressed as its x component, `(S·k̂) k̂_x`. Linear states give 0;
/// a left-circular photon gives +1 whether it travels along +x or −x.
pub fn photon_longitudinal_spin(eps: &PolarizationVector, khat: &[f64; 3]) -> Result<f64> {
    if !eps.is_transverse_to(khat) {
        return Err(ComptonError::Precondition(format!(
            "polarization not transverse: |ε·k̂| = {:e} > {TRANSVERSE_TOLERANCE:e}",
            eps.dot_real(khat).norm()
        )));
    }
    let norm = eps.inner(eps).re;
    let c = eps.conj().cross(eps);
    let s: C64 = (0..3).map(|i| -I * c[i] * khat[i]).sum();
    let k2: f64 = khat.iter().map(|x| x * x).sum();
    Ok(s.re / norm / k2 * khat[0])
}

/// Spin vector of a positive-energy plane-wave electron, `s†σs/2`, in ħ.
pub fn electron_spin_vector(s: &PauliSpinor) -> Result<[f64; 3]> {
    Ok(pauli_expectation(s)?.map(|x| 0.5 * x))
}

/// In and out states of a backscatter process with photons along ±x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinProcess {
    pub photon_in: PolarizationVector,
    pub electron_in: PauliSpinor,
    pub photon_out: PolarizationVector,
    pub electron_out: PauliSpinor,
}

impl SpinProcess {
    /// Backscatter process between labelled states; the outgoing photon
    /// basis is the θ = π basis of the x-y plane.
    pub fn backscatter(pol_in: PhotonPolarization, s_in: Tilt, pol_out: PhotonPolarization, s_out: Tilt) -> Self {
        let out = polarization_basis(&ScatteringGeometry::new(1.0, 0.0, 0.0, PI, 0.0));
        SpinProcess {
            photon_in: incoming_basis().vector(pol_in),
            electron_in: tilted_spinor(s_in),
            photon_out: out.vector(pol_out),
            electron_out: tilted_spinor(s_out),
        }
    }
}

/// x components of the intrinsic angular momenta before and after, in ħ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinBudget {
    pub photon_in: f64,
    pub electron_in: f64,
    pub photon_out: f64,
    pub electron_out: f64,
    pub net_transfer: f64,
}

pub fn spin_budget(process: &SpinProcess) -> Result<SpinBudget> {
    let photon_in = photon_longitudinal_spin(&process.photon_in, &[1.0, 0.0, 0.0])?;
    let photon_out = photon_longitudinal_spin(&process.photon_out, &[-1.0, 0.0, 0.0])?;
    let electron_in = electron_spin_vector(&process.electron_in)?[0];
    let electron_out = electron_spin_vector(&process.electron_out)?[0];
    Ok(SpinBudget {
        photon_in,
        electron_in,
        photon_out,
        electron_out,
        net_transfer: (photon_out - photon_in) + (electron_out - electron_in),
    })
}

/// Concurrence `2|φ₁φ₄ − φ₂φ₃|/‖ψ‖²` of a photon ⊗ electron pure state.
pub fn concurrence(psi: &JointState) -> Result<f64> {
    let n = psi.norm_sqr();
    if !(n > 0.0) {
        return Err(ComptonError::DegenerateState("concurrence of a zero state".into()));
    }
    let [a, b, c, d] = psi.amplitudes;
    Ok(2.0 * (a * d - b * c).norm() / n)
}

/// Solid angle of a cone with the given half-opening angle.
pub fn cone_solid_angle(half_angle: f64) -> f64 {
    2.0 * PI * (1.0 - half_angle.cos())
}

/// Inputs of the count-rate estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRateInputs {
    /// Incident photons per second.
    pub photon_flux: f64,
    /// Focal spot area in nm², holding one electron.
    pub focus_area_nm2: f64,
    /// dσ/dΩ of the detected channel in barn/sr.
    pub cross_section_barn_per_sr: f64,
    /// Detector acceptance in sr.
    pub solid_angle_sr: f64,
    /// Fraction of scattered photons reaching the detector.
    pub transmittivity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRate {
    /// Scattering events per second and steradian.
    pub collisions_per_second_per_sr: f64,
    /// Photons per second reaching the detector.
    pub detected_per_second: f64,
    /// Mean waiting time between detected photons, in seconds.
    pub seconds_per_detection: f64,
}

/// `flux × (dσ/dΩ)/area`, then times acceptance and transmittivity.
pub fn event_rate(inputs: &EventRateInputs) -> Result<EventRate> {
    let EventRateInputs {
        photon_flux,
        focus_area_nm2,
        cross_section_barn_per_sr,
        solid_angle_sr,
        transmittivity,
    } = *inputs;
    let all = [photon_flux, cross_section_barn_per_sr, solid_angle_sr, transmittivity];
    if all.iter().any(|x| !(*x >= 0.0)) || !(focus_area_nm2 > 0.0) {
        return Err(ComptonError::Precondition(format!("event-rate inputs must be positive: {inputs:?}")));
    }
    let area_barn = focus_area_nm2 * crate::units::BARN_PER_NM2;
    let collisions = photon_flux * cross_section_barn_per_sr / area_barn;
    let detected = collisions * solid_angle_sr * transmittivity;
    Ok(EventRate {
        collisions_per_second_per_sr: collisions,
        detected_per_second: detected,
        seconds_per_detection: if detected > 0.0 { 1.0 / detected } else { f64::INFINITY },
    })
}
