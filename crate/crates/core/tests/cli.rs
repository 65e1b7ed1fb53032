//! End-to-end runs of the `compton` binary.

use std::process::{Command, Output};

fn compton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compton")).args(args).output().expect("run compton")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn default_amplitudes_report() {
    let out = compton(&["--output", "json", "amplitudes"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let sq: Vec<f64> = v["amplitudes_sq"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((sq[1] / 4.0e-4 - 1.0).abs() < 0.01);
    assert!((v["p3_root"].as_f64().unwrap() - 1.0 - 8.283e-5).abs() < 1e-8);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 16);
    assert!(v["metadata"]["version"].is_string());
    assert!((v["dominant_phase"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
}

#[test]
fn zero_photon_momentum_leaves_only_the_h_block() {
    let out = compton(&["--output", "json", "amplitudes", "--kp-over-m", "0", "--basis", "updown"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m: Vec<(f64, f64)> = v["matrix"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect();
    for f in 0..4 {
        for i in 0..4 {
            let (re, im) = m[4 * f + i];
            if f < 2 && i < 2 {
                let expected = if f == i { 1.0 } else { 0.0 };
                assert!((re - expected).abs() < 1e-12 && im.abs() < 1e-12);
            } else {
                assert!(re.hypot(im) < 1e-12, "entry ({f},{i}) = {re}+{im}i");
            }
        }
    }
}

#[test]
fn xy_scan_has_constant_omega_prime() {
    let out = compton(&["scan", "--plane", "xy", "--samples", "9", "--observables", "cross-section"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header[..3], ["theta", "omega_prime_m", "xs_l_nw_ub_per_sr"]);
    let w = column(&header, "omega_prime_m");
    assert!(rows.iter().all(|r| (r[w] - 0.02).abs() < 1e-12));
}

#[test]
fn summed_stokes_forward_is_vertical() {
    let out = compton(&["scan", "--plane", "xy", "--theta-min", "0", "--theta-max", "0.01", "--samples", "2", "--observables", "stokes-summed"]);
    let (header, rows) = csv_rows(&stdout(&out));
    let (p0, p1) = (column(&header, "pibar0"), column(&header, "pibar1"));
    assert!((rows[0][p0] - 1.0).abs() < 1e-12);
    assert!((rows[0][p1] + 1.0).abs() < 1e-6, "{}", rows[0][p1]);
}

#[test]
fn xz_scan_shows_both_dips() {
    let pi = std::f64::consts::PI;
    let lowest = |args: &[&str]| {
        let (header, rows) = csv_rows(&stdout(&compton(args)));
        let (proj, total) = (column(&header, "xs_l_nw_ub_per_sr"), column(&header, "xs_total_ub_per_sr"));
        let r = rows.iter().min_by(|a, b| a[total].total_cmp(&b[total])).unwrap().clone();
        (r[0], r[proj] / r[total])
    };
    // The summed cross section collapses onto the projected channel at
    // backscatter and again in a narrow dip near 0.4π.
    let (theta, share) = lowest(&["scan", "--recipe", "cross-sections-xz", "--theta-min", "0.9pi", "--theta-max", "1.1pi", "--samples", "201"]);
    assert!((theta - pi).abs() < 1e-7 && share > 0.999, "{theta} {share}");
    let (theta, share) = lowest(&["scan", "--recipe", "cross-sections-xz", "--theta-min", "0.2pi", "--theta-max", "0.6pi", "--samples", "401"]);
    assert!((theta / pi - 0.4).abs() < 0.05, "{}", theta / pi);
    assert!(share > 0.9, "{share}");
}

#[test]
fn scan_output_is_deterministic_across_threads() {
    let args = ["scan", "--plane", "xz", "--samples", "257"];
    let one = Command::new(env!("CARGO_BIN_EXE_compton")).args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_compton")).args(args).env("RAYON_NUM_THREADS", "7").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(compton(&args).stdout, one.stdout);
}

#[test]
fn p1_scan_zero_shift_matches_amplitudes() {
    let amps = compton(&["amplitudes"]);
    let reference: Vec<String> = stdout(&amps).lines().nth(1).unwrap().split(',').map(str::to_string).collect();
    let out = compton(&["p1-scan", "--dp-min", "-0.002", "--dp-max", "0.002", "--samples", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let middle: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
    assert_eq!(middle[0].parse::<f64>().unwrap(), 0.0);
    let d = header.iter().position(|h| *h == "direct_l_se").unwrap();
    let b = header.iter().position(|h| *h == "boost_l_se").unwrap();
    assert_eq!(middle[d..d + 4], reference[..]);
    assert_eq!(middle[b..b + 4], reference[..]);
}

#[test]
fn recipes_are_listed() {
    let out = compton(&["scan", "--list-recipes"]);
    let text = stdout(&out);
    assert!(text.lines().count() >= 10);
    assert!(text.contains("stokes-summed-xy"));
}

#[test]
fn verify_reports_every_criterion() {
    let out = compton(&["--quiet", "verify"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 12);
    assert!(text.lines().all(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")));
    let all_pass = text.lines().all(|l| l.starts_with("[PASS]"));
    assert_eq!(out.status.success(), all_pass);
}

#[test]
fn verify_negative_control_exits_nonzero() {
    let out = compton(&["--quiet", "verify", "--quick", "--fine-structure", "0.01"]);
    assert!(!out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("[FAIL]  2")));
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        vec!["scan", "--samples", "1"],
        vec!["scan", "--plane", "yz"],
        vec!["scan", "--state", "1,2"],
        vec!["scan", "--observables", "nothing"],
        vec!["amplitudes", "--kp-over-m", "-1"],
        vec!["frobnicate"],
    ] {
        let out = compton(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numbers_use_nine_significant_digits() {
    let text = stdout(&compton(&["scan", "--samples", "2", "--observables", "cross-section"]));
    for cell in text.lines().nth(1).unwrap().split(',') {
        let mantissa = cell.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.len(), 10, "{cell}");
    }
}
