//! Command-line front end. Parsing lives here so the binary stays a thin
//! shell and the integration tests can drive the same code paths.

use std::f64::consts::PI;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::amplitudes::{amplitude_matrix, calibrate_p3, phase, JointState, PhotonPolarization, SpinBasis};
use crate::dirac::{tilted_spinor, Tilt};
use crate::error::{ComptonError, Result};
use crate::kinematics::{omega_prime, ScatteringGeometry};
use crate::linalg::C64;
use crate::observables::{cone_solid_angle, cross_sections, event_rate, EventRateInputs};
use crate::scan::{
    channel_amplitudes_sq, p1_csv, p1_header, recipe, run_p1_scan, run_scan, scan_csv, Observable,
    Plane, ScanRequest, CHANNEL_COLUMNS, RECIPES,
};
use crate::units::{EnergyUnit, PhysicalConstants};
use crate::verify::{
    Verifier, REFERENCE_ACCEPTANCE_HALF_ANGLE, REFERENCE_FLUX, REFERENCE_FOCUS_NM2,
    REFERENCE_TRANSMITTIVITY,
};

#[derive(Debug, Parser)]
#[command(name = "compton", version, about = "Spin and polarization observables of Compton scattering")]
pub struct Cli {
    /// Only print errors on the diagnostic stream.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Unit of momentum flags and momentum outputs.
    #[arg(long, global = true, value_enum, default_value_t = UnitArg::M)]
    pub units: UnitArg,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub output: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    M,
    Kev,
}

impl From<UnitArg> for EnergyUnit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::M => EnergyUnit::M,
            UnitArg::Kev => EnergyUnit::Kev,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlaneArg {
    Xy,
    Xz,
}

impl From<PlaneArg> for Plane {
    fn from(p: PlaneArg) -> Self {
        match p {
            PlaneArg::Xy => Plane::Xy,
            PlaneArg::Xz => Plane::Xz,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Updown,
    Tilted,
}

impl From<BasisArg> for SpinBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Updown => SpinBasis::UpDown,
            BasisArg::Tilted => SpinBasis::Tilted,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Amplitude matrix and the four circular transition probabilities at
    /// one geometry.
    Amplitudes {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Outgoing polar angle (radians, or a multiple of π such as `1pi`).
        #[arg(long, default_value = "1pi", value_parser = parse_angle)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = PlaneArg::Xy)]
        plane: PlaneArg,
        /// Spin basis of the reported 4×4 matrix.
        #[arg(long, value_enum, default_value_t = BasisArg::Tilted)]
        basis: BasisArg,
    },
    /// Observables along a θ scan in one plane.
    Scan(ScanArgs),
    /// Backscatter amplitudes versus a shift of the incoming electron's
    /// x momentum, evaluated directly and through the symmetric-frame boost.
    P1Scan {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        dp_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        dp_max: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Run the golden acceptance checks; exits nonzero if any fails.
    Verify {
        /// Only the sub-second subset.
        #[arg(long)]
        quick: bool,
        /// Override the fine-structure constant (negative controls).
        #[arg(long)]
        fine_structure: Option<f64>,
    },
    /// Count-rate estimate for a focused photon beam on one electron.
    Rate {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Incident photons per second.
        #[arg(long, default_value_t = REFERENCE_FLUX)]
        flux: f64,
        /// Focal spot area in nm².
        #[arg(long, default_value_t = REFERENCE_FOCUS_NM2)]
        focus_area_nm2: f64,
        /// dσ/dΩ in µb/sr; computed for `|V,↘⟩ → |L,↖⟩` at θ = π if absent.
        #[arg(long)]
        cross_section_ub: Option<f64>,
        /// Half-opening angle of the detector cone.
        #[arg(long, default_value_t = REFERENCE_ACCEPTANCE_HALF_ANGLE, value_parser = parse_angle)]
        half_angle: f64,
        #[arg(long, default_value_t = REFERENCE_TRANSMITTIVITY)]
        transmittivity: f64,
    },
}

#[derive(Clone, Debug, Args)]
pub struct GeometryArgs {
    /// Incoming photon momentum (units of m, or keV with `--units kev`).
    #[arg(long = "kp-over-m", default_value_t = 0.02)]
    pub kp: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p2: f64,
    /// Longitudinal electron momentum; defaults to the calibrated root.
    #[arg(long, allow_negative_numbers = true)]
    pub p3: Option<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Named flag set; explicit flags override its values.
    #[arg(long)]
    pub recipe: Option<String>,
    /// Print the available recipes and exit.
    #[arg(long)]
    pub list_recipes: bool,
    #[arg(long, value_enum)]
    pub plane: Option<PlaneArg>,
    #[arg(long, value_parser = parse_angle)]
    pub theta_min: Option<f64>,
    #[arg(long, value_parser = parse_angle)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Comma-separated observable groups (default: all).
    #[arg(long, value_delimiter = ',')]
    pub observables: Vec<String>,
    /// Initial state: four complex amplitudes `a1,a2,a3,a4` (`re+imi`), or a
    /// label such as `V:se`.
    #[arg(long, default_value = "V:se")]
    pub state: String,
    /// Spin basis of numeric `--state` amplitudes.
    #[arg(long, value_enum, default_value_t = BasisArg::Tilted)]
    pub state_basis: BasisArg,
}

/// Accepts plain radians or a multiple of π written as `0.4pi` or `pi`.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let parsed = match t.strip_suffix("pi").or_else(|| t.strip_suffix('π')) {
        Some("") => Ok(PI),
        Some("-") => Ok(-PI),
        Some(m) => m.trim_end_matches('*').parse::<f64>().map(|x| x * PI),
        None => t.parse::<f64>(),
    };
    parsed.map_err(|e| format!("invalid angle `{s}`: {e}"))
}

/// Parses `re`, `imi`, or `re±imi`, e.g. `0.5-0.25i`, `-i`, `3`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || ComptonError::Usage(format!("invalid complex number `{s}`"));
    let num = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(C64::new(body[..k].parse().map_err(|_| bad())?, num(&body[k..])?)),
        None => Ok(C64::new(0.0, num(body)?)),
    }
}

/// Parses `--state`: four complex amplitudes or `POL:SPIN`.
pub fn parse_state(s: &str, basis: SpinBasis) -> Result<JointState> {
    if let Some((pol, spin)) = s.split_once(':') {
        let pol: PhotonPolarization = pol.parse()?;
        let spin: Tilt = spin.parse()?;
        return Ok(JointState::labelled(pol, spin));
    }
    let parts = s.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
    let amplitudes: [C64; 4] = parts
        .try_into()
        .map_err(|v: Vec<C64>| ComptonError::Usage(format!("--state needs 4 amplitudes, got {}", v.len())))?;
    let state = JointState::new(amplitudes, basis);
    if !(state.norm_sqr() > 0.0) {
        return Err(ComptonError::Usage("--state must not be the zero vector".into()));
    }
    Ok(state)
}

struct Context {
    units: EnergyUnit,
    output: OutputFormat,
}

impl Context {
    fn momentum_in(&self, x: f64) -> f64 {
        self.units.to_mass_units(x)
    }

    fn momentum_out(&self, x: f64) -> f64 {
        self.units.from_mass_units(x)
    }

    /// Resolves `(kp, p2, p3)` in units of m plus the calibrated root.
    fn resolve(&self, g: &GeometryArgs) -> Result<(f64, f64, f64, f64)> {
        let (kp, p2) = (self.momentum_in(g.kp), self.momentum_in(g.p2));
        if !(kp >= 0.0) || !kp.is_finite() || !p2.is_finite() {
            return Err(ComptonError::Usage(format!("invalid photon/electron momentum kp = {}, p2 = {}", g.kp, g.p2)));
        }
        let root = calibrate_p3(kp, p2)?;
        let p3 = g.p3.map(|v| self.momentum_in(v)).unwrap_or(root);
        if !p3.is_finite() {
            return Err(ComptonError::Usage(format!("invalid p3 {p3}")));
        }
        Ok((kp, p2, p3, root))
    }

    fn unit_label(&self) -> &'static str {
        self.units.suffix()
    }
}

#[derive(Serialize)]
struct GeometryReport {
    units: &'static str,
    kp: f64,
    p2: f64,
    p3: f64,
    theta: f64,
    phi: f64,
    omega_prime: f64,
}

/// Runs a parsed command, writing results to `out`. Returns the process exit
/// code for outcomes that are not errors (a failed verification).
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let ctx = Context { units: cli.units.into(), output: cli.output };
    let io = |e: std::io::Error| ComptonError::Usage(format!("cannot write output: {e}"));
    match &cli.command {
        Command::Amplitudes { geometry, theta, plane, basis } => {
            let (kp, p2, p3, root) = ctx.resolve(geometry)?;
            let g = ScatteringGeometry::new(kp, p2, p3, *theta, Plane::from(*plane).phi());
            let report = amplitude_report(&ctx, &g, root, (*basis).into())?;
            match ctx.output {
                OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")),
                OutputFormat::Csv => {
                    let sq = &report["amplitudes_sq"];
                    let cells: Vec<String> = (0..4).map(|k| crate::scan::format_number(sq[k].as_f64().unwrap_or(f64::NAN))).collect();
                    writeln!(out, "{}\n{}", CHANNEL_COLUMNS.join(","), cells.join(","))
                }
            }
            .map_err(io)?;
            Ok(0)
        }
        Command::Scan(args) => {
            if args.list_recipes {
                for r in RECIPES {
                    let groups: Vec<&str> = r.outputs.iter().map(|o| o.name()).collect();
                    writeln!(
                        out,
                        "{:<24} --plane {} --theta-min {}pi --theta-max {}pi --samples {} --observables {}  # {}",
                        r.name,
                        if r.plane == Plane::Xy { "xy" } else { "xz" },
                        r.theta_range_pi.0,
                        r.theta_range_pi.1,
                        r.samples,
                        groups.join(","),
                        r.description
                    )
                    .map_err(io)?;
                }
                return Ok(0);
            }
            let req = scan_request(&ctx, args)?;
            let mut rows = run_scan(&req)?;
            for r in &mut rows {
                r.omega_prime = ctx.momentum_out(r.omega_prime);
            }
            let omega_col = format!("omega_prime_{}", ctx.unit_label());
            match ctx.output {
                OutputFormat::Csv => {
                    let csv = scan_csv(&req, &rows).replacen("omega_prime", &omega_col, 1);
                    out.write_all(csv.as_bytes())
                }
                OutputFormat::Json => {
                    let mut columns = req.header();
                    columns[1] = &omega_col;
                    let data: Vec<Vec<f64>> = rows
                        .iter()
                        .map(|r| [r.theta, r.omega_prime].into_iter().chain(r.values.iter().copied()).collect())
                        .collect();
                    let doc = json!({ "columns": columns, "rows": data, "metadata": metadata() });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))
                }
            }
            .map_err(io)?;
            Ok(0)
        }
        Command::P1Scan { geometry, dp_min, dp_max, samples } => {
            let (kp, p2, p3, _) = ctx.resolve(geometry)?;
            let (lo, hi) = (ctx.momentum_in(*dp_min), ctx.momentum_in(*dp_max));
            if !lo.is_finite() || !hi.is_finite() {
                return Err(ComptonError::Usage("p1 range must be finite".into()));
            }
            let mut rows = run_p1_scan(kp, p2, p3, lo, hi, *samples)?;
            for r in &mut rows {
                r.dp = ctx.momentum_out(r.dp);
                r.kp_symmetric = ctx.momentum_out(r.kp_symmetric);
            }
            match ctx.output {
                OutputFormat::Csv => out.write_all(p1_csv(&rows).as_bytes()),
                OutputFormat::Json => {
                    let doc = json!({
                        "columns": p1_header(),
                        "units": ctx.unit_label(),
                        "rows": rows,
                        "metadata": metadata(),
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))
                }
            }
            .map_err(io)?;
            Ok(0)
        }
        Command::Verify { quick, fine_structure } => {
            let mut constants = PhysicalConstants::default();
            if let Some(a) = fine_structure {
                constants.fine_structure = *a;
            }
            let reports = Verifier::new(constants)?.run_all(*quick);
            match ctx.output {
                OutputFormat::Json => {
                    writeln!(out, "{}", serde_json::to_string_pretty(&reports).expect("serializable")).map_err(io)?
                }
                OutputFormat::Csv => {
                    for r in &reports {
                        writeln!(out, "{r}").map_err(io)?;
                    }
                }
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            log::info!("{} of {} checks passed", reports.len() - failed, reports.len());
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::Rate { geometry, flux, focus_area_nm2, cross_section_ub, half_angle, transmittivity } => {
            let xs_barn = match cross_section_ub {
                Some(ub) => ub * 1e-6,
                None => {
                    let (kp, p2, p3, _) = ctx.resolve(geometry)?;
                    let g = ScatteringGeometry::backscatter(kp, p2, p3);
                    let psi = JointState::labelled(PhotonPolarization::V, Tilt::SouthEast);
                    cross_sections(&g, &psi, &PhysicalConstants::default())?.projected
                }
            };
            let inputs = EventRateInputs {
                photon_flux: *flux,
                focus_area_nm2: *focus_area_nm2,
                cross_section_barn_per_sr: xs_barn,
                solid_angle_sr: cone_solid_angle(*half_angle),
                transmittivity: *transmittivity,
            };
            let rate = event_rate(&inputs).map_err(|e| ComptonError::Usage(e.to_string()))?;
            match ctx.output {
                OutputFormat::Json => {
                    let doc = json!({ "inputs": inputs, "rate": rate, "metadata": metadata() });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))
                }
                OutputFormat::Csv => writeln!(
                    out,
                    "collisions_per_s_per_sr,detected_per_s,seconds_per_detection\n{},{},{}",
                    crate::scan::format_number(rate.collisions_per_second_per_sr),
                    crate::scan::format_number(rate.detected_per_second),
                    crate::scan::format_number(rate.seconds_per_detection)
                ),
            }
            .map_err(io)?;
            Ok(0)
        }
    }
}

fn metadata() -> serde_json::Value {
    json!({ "version": env!("CARGO_PKG_VERSION"), "name": env!("CARGO_PKG_NAME") })
}

fn amplitude_report(ctx: &Context, g: &ScatteringGeometry, root: f64, basis: SpinBasis) -> Result<serde_json::Value> {
    let m = amplitude_matrix(g, basis)?;
    let matrix: Vec<[f64; 2]> = m.entries.iter().map(|z| [z.re, z.im]).collect();
    let sq = channel_amplitudes_sq(g)?;
    let dominant = {
        let up = amplitude_matrix(g, SpinBasis::UpDown)?;
        let psi = crate::amplitudes::scatter(&JointState::labelled(PhotonPolarization::V, Tilt::SouthEast), &up)?;
        psi.amplitude(PhotonPolarization::L.coefficients(), &tilted_spinor(Tilt::NorthWest))
    };
    let geometry = GeometryReport {
        units: ctx.unit_label(),
        kp: ctx.momentum_out(g.kp),
        p2: ctx.momentum_out(g.p2),
        p3: ctx.momentum_out(g.p3),
        theta: g.theta,
        phi: g.phi,
        omega_prime: ctx.momentum_out(omega_prime(g)?),
    };
    Ok(json!({
        "geometry": geometry,
        "basis": basis,
        "matrix": matrix,
        "channels": CHANNEL_COLUMNS,
        "amplitudes_sq": sq,
        "p3_root": ctx.momentum_out(root),
        "dominant_amplitude": [dominant.re, dominant.im],
        "dominant_phase": phase(dominant),
        "metadata": metadata(),
    }))
}

fn scan_request(ctx: &Context, args: &ScanArgs) -> Result<ScanRequest> {
    let base = args.recipe.as_deref().map(recipe).transpose()?;
    let plane = args.plane.map(Plane::from).or(base.map(|r| r.plane)).unwrap_or(Plane::Xy);
    let (lo, hi) = base.map(|r| (r.theta_range_pi.0 * PI, r.theta_range_pi.1 * PI)).unwrap_or((0.0, 2.0 * PI));
    let outputs = if args.observables.is_empty() {
        base.map(|r| r.outputs.to_vec()).unwrap_or_else(|| Observable::ALL.to_vec())
    } else {
        args.observables.iter().map(|s| s.parse()).collect::<Result<Vec<Observable>>>()?
    };
    let (kp, p2, p3, _) = ctx.resolve(&args.geometry)?;
    let req = ScanRequest {
        plane,
        theta_min: args.theta_min.unwrap_or(lo),
        theta_max: args.theta_max.unwrap_or(hi),
        samples: args.samples.or(base.map(|r| r.samples)).unwrap_or(721),
        kp,
        p2,
        p3,
        initial_state: parse_state(&args.state, args.state_basis.into())?,
        outputs,
        constants: PhysicalConstants::default(),
    };
    req.validate()?;
    Ok(req)
}

/// Process exit code for an error: 2 for usage problems, 1 otherwise.
pub fn exit_code(e: &ComptonError) -> i32 {
    match e {
        ComptonError::Usage(_) | ComptonError::InvalidLabel(_) => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<i32>, String) {
        let cli = Cli::try_parse_from(std::iter::once("compton").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let code = run(&cli, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn complex_parser_forms() {
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.5-0.25i").unwrap(), C64::new(0.5, -0.25));
        assert_eq!(parse_complex("1e-3+2E-2i").unwrap(), C64::new(1e-3, 2e-2));
        assert_eq!(parse_complex("-2.5e+1i").unwrap(), C64::new(0.0, -25.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn angle_parser_forms() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert!((parse_angle("0.4pi").unwrap() - 0.4 * PI).abs() < 1e-15);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert!(parse_angle("twopi").is_err());
    }

    #[test]
    fn state_parser_accepts_labels_and_amplitudes() {
        let a = parse_state("V:se", SpinBasis::Tilted).unwrap();
        let b = parse_state("0,0,1,0", SpinBasis::Tilted).unwrap();
        let d = a.in_basis(SpinBasis::UpDown).amplitudes;
        let e = b.in_basis(SpinBasis::UpDown).amplitudes;
        assert!((0..4).all(|k| (d[k] - e[k]).norm() < 1e-15));
        assert!(parse_state("1,0,0", SpinBasis::UpDown).is_err());
        assert!(parse_state("0,0,0,0", SpinBasis::UpDown).is_err());
        assert!(parse_state("Q:se", SpinBasis::UpDown).is_err());
    }

    #[test]
    fn amplitudes_json_round_trips() {
        let (code, text) = run_args(&["--output", "json", "amplitudes"]);
        assert_eq!(code.unwrap(), 0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["matrix"].as_array().unwrap().len(), 16);
        assert!((v["amplitudes_sq"][1].as_f64().unwrap() - 4.0e-4).abs() < 4e-6);
        let again: serde_json::Value = serde_json::from_str(&v.to_string()).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn kev_units_rescale_inputs() {
        let kp_kev = (0.02 * crate::units::ELECTRON_MASS_KEV).to_string();
        let (_, m) = run_args(&["--output", "json", "amplitudes"]);
        let (_, k) = run_args(&["--output", "json", "--units", "kev", "amplitudes", "--kp-over-m", &kp_kev]);
        let (m, k): (serde_json::Value, serde_json::Value) = (serde_json::from_str(&m).unwrap(), serde_json::from_str(&k).unwrap());
        let a = m["amplitudes_sq"][1].as_f64().unwrap();
        let b = k["amplitudes_sq"][1].as_f64().unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        assert_eq!(k["geometry"]["units"], "kev");
    }

    #[test]
    fn recipe_is_overridable() {
        let (code, text) = run_args(&["scan", "--recipe", "stokes-conditional-xz", "--samples", "3"]);
        assert_eq!(code.unwrap(), 0);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "theta,omega_prime_m,pi0,pi1,pi2,pi3");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn bad_observable_is_a_usage_error() {
        let (res, _) = run_args(&["scan", "--observables", "bogus"]);
        assert_eq!(exit_code(&res.unwrap_err()), 2);
    }
}
