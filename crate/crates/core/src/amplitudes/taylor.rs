//! Closed-form small-parameter expansion of the backscatter amplitude matrix,
//! kept as an independent oracle for the full tensor evaluation.

use std::f64::consts::SQRT_2;

use super::{AmplitudeMatrix, SpinBasis};
use crate::dirac::pauli_matrices;
use crate::linalg::{Matrix2, I};

/// Expansion of the σ_z-basis amplitude matrix at θ = π, φ = 0 in
/// `α = kp/m`, `β = p2/m` and `γ = 1 − p3/m`, including the α² terms of the
/// photon-preserving blocks.
pub fn taylor_amplitude(alpha: f64, beta: f64, gamma: f64) -> AmplitudeMatrix {
    let [sx, sy, sz] = pauli_matrices();
    let id = Matrix2::identity();
    let c2 = (SQRT_2 - 1.0) / 2.0 * alpha * alpha;
    let hh = id + sy.scale(I * ((1.0 - SQRT_2) / SQRT_2 * alpha)) + id * c2;
    let hv = (sx + sz).scale(-I * (0.5 * alpha)) - id * beta;
    let vh = (sx - sz).scale(I * (0.5 * alpha)) - id * beta;
    let vv = sy.scale(I * (alpha / SQRT_2)) + id * (gamma + c2);
    AmplitudeMatrix::from_blocks([[hh, hv], [vh, vv]], SpinBasis::UpDown)
}

/// Largest entry-wise deviation between the expansion and a full matrix.
pub fn taylor_residual(full: &AmplitudeMatrix, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let full = full.in_basis(SpinBasis::UpDown);
    full.entries.max_abs_diff(&taylor_amplitude(alpha, beta, gamma).entries)
}
