//! Angular and initial-momentum scans producing tabular data.
//!
//! Points are evaluated in parallel and collected in input order, so output
//! is identical for any thread count. Points whose kinematics are singular
//! are skipped with a warning rather than interpolated.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{amplitude_matrix, scatter, JointState, PhotonPolarization, SpinBasis};
use crate::dirac::{tilted_spinor, Tilt};
use crate::error::{ComptonError, Result};
use crate::kinematics::{omega_prime, symmetric_frame_rapidity, ScatteringGeometry};
use crate::observables::{
    cross_sections, final_state, spin_expectation_of_state, stokes_of_state, Conditioning,
};
use crate::units::PhysicalConstants;

/// barn → µb.
const MICROBARN_PER_BARN: f64 = 1e6;

/// Scattering plane of the outgoing photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xy,
    Xz,
}

impl Plane {
    pub fn phi(self) -> f64 {
        match self {
            Plane::Xy => 0.0,
            Plane::Xz => FRAC_PI_2,
        }
    }
}

impl FromStr for Plane {
    type Err = ComptonError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xy" | "x-y" => Ok(Plane::Xy),
            "xz" | "x-z" => Ok(Plane::Xz),
            _ => Err(ComptonError::InvalidLabel(s.to_string())),
        }
    }
}

/// Observable groups that can be requested from a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    CrossSection,
    StokesConditional,
    StokesSummed,
    SpinConditional,
    SpinSummed,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::CrossSection,
        Observable::StokesConditional,
        Observable::StokesSummed,
        Observable::SpinConditional,
        Observable::SpinSummed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::CrossSection => "cross-section",
            Observable::StokesConditional => "stokes-conditional",
            Observable::StokesSummed => "stokes-summed",
            Observable::SpinConditional => "spin-conditional",
            Observable::SpinSummed => "spin-summed",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Observable::CrossSection => &[
                "xs_l_nw_ub_per_sr",
                "xs_pol_summed_ub_per_sr",
                "xs_spin_summed_ub_per_sr",
                "xs_total_ub_per_sr",
            ],
            Observable::StokesConditional => &["pi0", "pi1", "pi2", "pi3"],
            Observable::StokesSummed => &["pibar0", "pibar1", "pibar2", "pibar3"],
            Observable::SpinConditional => &["xi0", "xi1", "xi2", "xi3"],
            Observable::SpinSummed => &["xibar0", "xibar1", "xibar2", "xibar3"],
        }
    }
}

impl FromStr for Observable {
    type Err = ComptonError;
    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s.trim())
            .ok_or_else(|| ComptonError::InvalidLabel(s.to_string()))
    }
}

/// Parameters of an angular scan. Momenta are in units of m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRequest {
    pub plane: Plane,
    pub theta_min: f64,
    pub theta_max: f64,
    pub samples: usize,
    pub kp: f64,
    pub p2: f64,
    pub p3: f64,
    pub initial_state: JointState,
    pub outputs: Vec<Observable>,
    #[serde(skip)]
    pub constants: PhysicalConstants,
}

impl ScanRequest {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(ComptonError::Usage(format!("samples must be at least 2, got {}", self.samples)));
        }
        let in_range = |t: f64| (0.0..=2.0 * PI + 1e-12).contains(&t);
        if !in_range(self.theta_min) || !in_range(self.theta_max) || self.theta_min > self.theta_max {
            return Err(ComptonError::Usage(format!(
                "theta range [{}, {}] must be ordered and inside [0, 2π]",
                self.theta_min, self.theta_max
            )));
        }
        if self.outputs.is_empty() {
            return Err(ComptonError::Usage("no observables requested".into()));
        }
        if self.initial_state.norm_sqr() == 0.0 {
            return Err(ComptonError::DegenerateState("initial state is zero".into()));
        }
        Ok(())
    }

    pub fn thetas(&self) -> Vec<f64> {
        let step = (self.theta_max - self.theta_min) / (self.samples - 1) as f64;
        (0..self.samples).map(|i| self.theta_min + step * i as f64).collect()
    }

    pub fn geometry(&self, theta: f64) -> ScatteringGeometry {
        ScatteringGeometry::new(self.kp, self.p2, self.p3, theta, self.plane.phi())
    }

    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["theta", "omega_prime"];
        for o in &self.outputs {
            h.extend_from_slice(o.columns());
        }
        h
    }
}

/// One scan point: θ followed by the requested columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta: f64,
    pub omega_prime: f64,
    pub values: Vec<f64>,
}

pub fn evaluate_point(req: &ScanRequest, theta: f64) -> Result<ScanRow> {
    let g = req.geometry(theta);
    let psi_i = req.initial_state.in_basis(SpinBasis::UpDown);
    let psi_f = final_state(&g, &psi_i)?;
    let mut values = Vec::with_capacity(4 * req.outputs.len());
    for o in &req.outputs {
        let block = match o {
            Observable::CrossSection => {
                let xs = cross_sections(&g, &psi_i, &req.constants)?;
                [xs.projected, xs.polarization_summed, xs.spin_summed, xs.total]
                    .map(|x| x * MICROBARN_PER_BARN)
            }
            Observable::StokesConditional => stokes_of_state(&psi_f, Conditioning::Conditional)?.0,
            Observable::StokesSummed => stokes_of_state(&psi_f, Conditioning::Summed)?.0,
            Observable::SpinConditional => spin_expectation_of_state(&psi_f, Conditioning::Conditional)?.0,
            Observable::SpinSummed => spin_expectation_of_state(&psi_f, Conditioning::Summed)?.0,
        };
        values.extend_from_slice(&block);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ComptonError::Kinematics(format!("non-finite observable at θ = {theta}")));
    }
    Ok(ScanRow { theta, omega_prime: omega_prime(&g)?, values })
}

pub fn run_scan(req: &ScanRequest) -> Result<Vec<ScanRow>> {
    req.validate()?;
    let rows: Vec<Option<ScanRow>> = req
        .thetas()
        .into_par_iter()
        .map(|theta| match evaluate_point(req, theta) {
            Ok(row) => Some(row),
            Err(e) => {
                log::warn!("skipping θ = {theta:.6}: {e}");
                None
            }
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Locale-independent scientific notation with 9 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(format_number).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn scan_csv(req: &ScanRequest, rows: &[ScanRow]) -> String {
    to_csv(
        &req.header(),
        rows.iter().map(|r| {
            let mut v = vec![r.theta, r.omega_prime];
            v.extend_from_slice(&r.values);
            v
        }),
    )
}

/// Transition channels reported by amplitude tables, all from `|V,↘⟩`.
pub const CHANNELS: [(PhotonPolarization, Tilt); 4] = [
    (PhotonPolarization::L, Tilt::SouthEast),
    (PhotonPolarization::L, Tilt::NorthWest),
    (PhotonPolarization::R, Tilt::SouthEast),
    (PhotonPolarization::R, Tilt::NorthWest),
];

pub const CHANNEL_COLUMNS: [&str; 4] = ["l_se", "l_nw", "r_se", "r_nw"];

/// `|⟨ε, s|M|V,↘⟩|²` for the four circular channels at a geometry.
pub fn channel_amplitudes_sq(g: &ScatteringGeometry) -> Result<[f64; 4]> {
    let m = amplitude_matrix(g, SpinBasis::UpDown)?;
    let psi_f = scatter(&JointState::labelled(PhotonPolarization::V, Tilt::SouthEast), &m)?;
    Ok(CHANNELS.map(|(pol, s)| psi_f.amplitude(pol.coefficients(), &tilted_spinor(s)).norm_sqr()))
}

/// How the shifted initial electron momentum is handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum P1Method {
    /// Evaluate the lab-frame backscatter with the shifted electron.
    Direct,
    /// Boost into the frame with balanced x momenta and evaluate the
    /// symmetric backscatter there.
    Boost,
}

/// Amplitudes for one electron-momentum shift `dp` (units of m).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct P1Row {
    pub dp: f64,
    pub theta_boost: f64,
    pub kp_symmetric: f64,
    pub direct: [f64; 4],
    pub boost: [f64; 4],
}

impl P1Row {
    /// Ratio of the dominant `L↖` channel to the largest other channel.
    pub fn dominance(&self, method: P1Method) -> f64 {
        let a = match method {
            P1Method::Direct => self.direct,
            P1Method::Boost => self.boost,
        };
        a[1] / a[0].max(a[2]).max(a[3])
    }

    /// Largest channel difference between the two methods relative to the
    /// dominant channel.
    pub fn method_discrepancy(&self) -> f64 {
        let scale = self.direct[1].max(self.boost[1]);
        (0..4).map(|c| (self.direct[c] - self.boost[c]).abs()).fold(0.0, f64::max) / scale
    }
}

pub fn p1_point(kp: f64, p2: f64, p3: f64, dp: f64) -> Result<P1Row> {
    let base = ScatteringGeometry::backscatter(kp, p2, p3);
    let direct = channel_amplitudes_sq(&base.with_p1_shift(dp))?;
    let frame = symmetric_frame_rapidity(dp, &base)?;
    let kp_symmetric = frame.photon_momentum(kp);
    let boost = channel_amplitudes_sq(&ScatteringGeometry::backscatter(kp_symmetric, p2, p3))?;
    Ok(P1Row { dp, theta_boost: frame.theta, kp_symmetric, direct, boost })
}

pub fn run_p1_scan(kp: f64, p2: f64, p3: f64, dp_min: f64, dp_max: f64, samples: usize) -> Result<Vec<P1Row>> {
    if samples < 2 || !(dp_max >= dp_min) {
        return Err(ComptonError::Usage(format!(
            "p1 scan needs samples ≥ 2 and an ordered range, got {samples} on [{dp_min}, {dp_max}]"
        )));
    }
    let step = (dp_max - dp_min) / (samples - 1) as f64;
    let rows: Vec<Option<P1Row>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let dp = dp_min + step * i as f64;
            p1_point(kp, p2, p3, dp)
                .map_err(|e| log::warn!("skipping dp = {dp:e}: {e}"))
                .ok()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn p1_header() -> Vec<String> {
    let mut h = vec!["dp".to_string(), "theta_boost".into(), "kp_symmetric".into()];
    for prefix in ["direct", "boost"] {
        h.extend(CHANNEL_COLUMNS.iter().map(|c| format!("{prefix}_{c}")));
    }
    h
}

pub fn p1_csv(rows: &[P1Row]) -> String {
    let header = p1_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    to_csv(
        &header,
        rows.iter().map(|r| {
            let mut v = vec![r.dp, r.theta_boost, r.kp_symmetric];
            v.extend_from_slice(&r.direct);
            v.extend_from_slice(&r.boost);
            v
        }),
    )
}

/// A named flag set for one standard plot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    pub plane: Plane,
    pub outputs: &'static [Observable],
    /// θ range as multiples of π.
    pub theta_range_pi: (f64, f64),
    pub samples: usize,
}

pub const RECIPES: &[Recipe] = &[
    Recipe {
        name: "cross-sections-xy",
        description: "projected and summed differential cross sections, x-y plane",
        plane: Plane::Xy,
        outputs: &[Observable::CrossSection],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "cross-sections-xz",
        description: "projected and summed differential cross sections, x-z plane",
        plane: Plane::Xz,
        outputs: &[Observable::CrossSection],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "stokes-conditional-xy",
        description: "photon Stokes parameters given electron ↖, x-y plane",
        plane: Plane::Xy,
        outputs: &[Observable::StokesConditional],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "stokes-conditional-xz",
        description: "photon Stokes parameters given electron ↖, x-z plane",
        plane: Plane::Xz,
        outputs: &[Observable::StokesConditional],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "spin-conditional-xy",
        description: "electron spin parameters given photon L, x-y plane",
        plane: Plane::Xy,
        outputs: &[Observable::SpinConditional],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "spin-conditional-xz",
        description: "electron spin parameters given photon L, x-z plane",
        plane: Plane::Xz,
        outputs: &[Observable::SpinConditional],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "stokes-summed-xy",
        description: "spin-summed photon Stokes parameters, x-y plane",
        plane: Plane::Xy,
        outputs: &[Observable::StokesSummed],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "stokes-summed-xz",
        description: "spin-summed photon Stokes parameters, x-z plane",
        plane: Plane::Xz,
        outputs: &[Observable::StokesSummed],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "spin-summed-xy",
        description: "polarization-summed electron spin parameters, x-y plane",
        plane: Plane::Xy,
        outputs: &[Observable::SpinSummed],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "spin-summed-xz",
        description: "polarization-summed electron spin parameters, x-z plane",
        plane: Plane::Xz,
        outputs: &[Observable::SpinSummed],
        theta_range_pi: (0.0, 2.0),
        samples: 2001,
    },
    Recipe {
        name: "acceptance-window-xy",
        description: "conditional Stokes and spin parameters within ±0.005π of backscatter, x-y plane",
        plane: Plane::Xy,
        outputs: &[Observable::StokesConditional, Observable::SpinConditional],
        theta_range_pi: (0.995, 1.005),
        samples: 201,
    },
    Recipe {
        name: "acceptance-window-xz",
        description: "conditional Stokes and spin parameters within ±0.005π of backscatter, x-z plane",
        plane: Plane::Xz,
        outputs: &[Observable::StokesConditional, Observable::SpinConditional],
        theta_range_pi: (0.995, 1.005),
        samples: 201,
    },
];

pub fn recipe(name: &str) -> Result<&'static Recipe> {
    RECIPES
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| ComptonError::InvalidLabel(name.to_string()))
}
