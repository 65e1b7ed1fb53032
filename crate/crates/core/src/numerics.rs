//! One-dimensional root finding and extremum search.

use crate::error::{ComptonError, Result};

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 − √5)/2

/// Brent's method on a bracketing interval.
pub fn brent_root<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(ComptonError::NoConvergence(format!(
            "no sign change on [{a}, {b}]: f = {fa:e}, {fb:e}"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // Inverse quadratic or secant step.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(ComptonError::NoConvergence(format!("Brent iteration limit {max_iter} reached")))
}

/// Golden-section search for a minimum of `f` inside `[a, b]`.
pub fn golden_section_min<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = a + GOLDEN * (b - a);
    let mut x2 = b - GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - GOLDEN * (b - a);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Minimum,
    Maximum,
}

/// Local extremum of `f` on `[lo, hi]` found by a uniform coarse scan of
/// `samples` points followed by golden-section refinement to `xtol`.
///
/// Only interior local extrema of the coarse scan are considered; the one
/// with the most extreme value is refined. Returns `(x, f(x))`.
pub fn locate_extremum<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    samples: usize,
    kind: Extremum,
    xtol: f64,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if samples < 3 || !(hi > lo) {
        return Err(ComptonError::Precondition(format!(
            "extremum search needs ≥ 3 samples on a non-empty interval, got {samples} on [{lo}, {hi}]"
        )));
    }
    let sign = match kind {
        Extremum::Minimum => 1.0,
        Extremum::Maximum => -1.0,
    };
    let step = (hi - lo) / (samples - 1) as f64;
    let xs: Vec<f64> = (0..samples).map(|i| lo + step * i as f64).collect();
    let ys = xs.iter().map(|&x| f(x).map(|y| sign * y)).collect::<Result<Vec<_>>>()?;
    let best = (1..samples - 1)
        .filter(|&i| ys[i] <= ys[i - 1] && ys[i] <= ys[i + 1])
        .min_by(|&i, &j| ys[i].total_cmp(&ys[j]))
        .ok_or_else(|| {
            ComptonError::NoConvergence(format!("no interior local {kind:?} on [{lo}, {hi}]"))
        })?;
    let (x, y) = golden_section_min(|x| f(x).map(|y| sign * y), xs[best - 1], xs[best + 1], xtol)?;
    Ok((x, sign * y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent_root(|x| Ok(x * x * x - 2.0 * x - 5.0), 2.0, 3.0, 1e-15, 100).unwrap();
        assert!((r - 2.094_551_481_542_326_5).abs() < 1e-13);
    }

    #[test]
    fn brent_rejects_missing_bracket() {
        let r = brent_root(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 100);
        assert!(matches!(r, Err(ComptonError::NoConvergence(_))));
    }

    #[test]
    fn golden_section_parabola() {
        let (x, y) = golden_section_min(|x| Ok((x - 0.3).powi(2) + 1.0), -1.0, 2.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-7);
        assert!((y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn extremum_picks_deepest_interior_minimum() {
        // Minima near 0.5 (value −1) and 2.5 (value −2).
        let f = |x: f64| Ok(-(-(x - 0.5f64).powi(2) * 20.0).exp() - 2.0 * (-(x - 2.5f64).powi(2) * 20.0).exp());
        let (x, y) = locate_extremum(f, 0.0, 3.0, 301, Extremum::Minimum, 1e-10).unwrap();
        assert!((x - 2.5).abs() < 1e-4);
        assert!(y < -1.99);
        let (xm, _) = locate_extremum(|x: f64| Ok(x.sin()), 0.0, 3.0, 31, Extremum::Maximum, 1e-10).unwrap();
        assert!((xm - std::f64::consts::FRAC_PI_2).abs() < 1e-5);
    }

    #[test]
    fn monotone_function_has_no_interior_extremum() {
        assert!(locate_extremum(Ok, 0.0, 1.0, 11, Extremum::Minimum, 1e-6).is_err());
    }
}
