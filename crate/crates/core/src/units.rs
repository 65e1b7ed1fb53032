//! Physical constants and unit conversions applied at the API boundary.
//!
//! Internally every energy and momentum is measured in units of the electron
//! rest mass (ħ = c = m = 1). Conversions to keV and to barn happen only when
//! reporting.

use serde::{Deserialize, Serialize};

/// Electron rest energy m_e c² in keV (CODATA 2018).
pub const ELECTRON_MASS_KEV: f64 = 510.998_950_00;

/// Fine-structure constant (CODATA 2018).
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035_999_084;

/// ħc in MeV·fm (CODATA 2018).
pub const HBAR_C_MEV_FM: f64 = 197.326_980_4;

/// 1 barn = 100 fm².
pub const FM2_PER_BARN: f64 = 100.0;

/// 1 nm² = 10¹⁰ barn.
pub const BARN_PER_NM2: f64 = 1.0e10;

/// Squared reduced Compton wavelength (ħ/m_e c)² in barn; converts an area
/// in units of m⁻² into barn.
pub fn compton_area_barn() -> f64 {
    let lambda_fm = HBAR_C_MEV_FM / (ELECTRON_MASS_KEV * 1.0e-3);
    lambda_fm * lambda_fm / FM2_PER_BARN
}

/// Unit system for energies and momenta at the CLI boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyUnit {
    /// Units of the electron mass.
    #[default]
    M,
    /// keV (momenta in keV/c).
    Kev,
}

impl EnergyUnit {
    /// Converts a value given in this unit into units of m.
    pub fn to_mass_units(self, value: f64) -> f64 {
        match self {
            EnergyUnit::M => value,
            EnergyUnit::Kev => value / ELECTRON_MASS_KEV,
        }
    }

    /// Converts a value in units of m into this unit.
    pub fn from_mass_units(self, value: f64) -> f64 {
        match self {
            EnergyUnit::M => value,
            EnergyUnit::Kev => value * ELECTRON_MASS_KEV,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            EnergyUnit::M => "m",
            EnergyUnit::Kev => "kev",
        }
    }
}

/// Constants entering the cross-section prefactor. Kept as a value so that a
/// verification run can inject a deliberately corrupted set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub fine_structure: f64,
    /// (ħ/m_e c)² in barn.
    pub compton_area_barn: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            fine_structure: FINE_STRUCTURE,
            compton_area_barn: compton_area_barn(),
        }
    }
}

impl PhysicalConstants {
    /// Classical electron radius squared, α²/m², in barn.
    pub fn classical_radius_sqr_barn(&self) -> f64 {
        self.fine_structure * self.fine_structure * self.compton_area_barn
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compton_area_is_about_1491_barn() {
        assert!((compton_area_barn() - 1491.19).abs() < 0.01);
    }

    #[test]
    fn classical_radius_squared_is_79_4_mb() {
        let r2 = PhysicalConstants::default().classical_radius_sqr_barn();
        assert!((r2 - 0.0794079).abs() < 1e-6, "{r2}");
    }

    #[test]
    fn photon_momentum_of_0_02_m_is_10_2_kev() {
        let kev = EnergyUnit::Kev.from_mass_units(0.02);
        assert!((kev - 10.22).abs() < 0.001);
        assert!((EnergyUnit::Kev.to_mass_units(kev) - 0.02).abs() < 1e-15);
    }
}
