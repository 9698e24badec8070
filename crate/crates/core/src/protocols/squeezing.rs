//! Optimal squeezing rotation after one-axis twisting.

use crate::spin::{coherent_state, oat_phase, Axis, DickeState, Sign};
use crate::{C64, Error, Result};

/// Relative amplitude below which `Var(Jz)` is treated as independent of the
/// rotation angle.
const FLAT_TOL: f64 = 1e-12;

/// Angle `θ ∈ [0, π)` of the rotation about `x` that minimizes `Var(Jz)` of
/// the twisted coherent state `exp(-iθJx) exp(-iχt Jz²) |x+>`.
pub fn squeezing_angle(n: usize, chi_t: f64) -> Result<f64> {
    squeezing_angle_about(n, chi_t, Axis::X, Sign::Plus)
}

/// [`squeezing_angle`] for a coherent state along `±axis`, rotated about the
/// same axis. Only `x` and `y` are meaningful since `Jz` rotations leave
/// `Var(Jz)` unchanged.
///
/// Under a rotation by `θ`, `Jz → Jz cosθ + P sinθ` with `P = i[J_axis, Jz]`,
/// so `Var(Jz)(θ) = A + B cos 2θ + C sin 2θ` and the minimizer is closed-form.
pub fn squeezing_angle_about(n: usize, chi_t: f64, axis: Axis, sign: Sign) -> Result<f64> {
    if !(chi_t.is_finite() && chi_t >= 0.0) {
        return Err(Error::param("chi_t", format!("must be finite and >= 0, got {chi_t}")));
    }
    if axis == Axis::Z {
        return Err(Error::param("axis", "squeezing rotation must be about x or y"));
    }
    let psi = oat_phase(&coherent_state(n, axis, sign)?, chi_t);
    let (vzz, vpp, czp) = rotation_moments(&psi, axis);
    let a = 0.5 * (vzz + vpp);
    let b = 0.5 * (vzz - vpp);
    let c = czp;
    if b.hypot(c) <= FLAT_TOL * a.max(1.0) {
        return Ok(0.0);
    }
    let theta = (0.5 * (-c).atan2(-b)).rem_euclid(std::f64::consts::PI);
    // fold round-off just below π back onto 0
    Ok(if std::f64::consts::PI - theta < 1e-14 { 0.0 } else { theta })
}

/// `Var(Jz)` after the rotation `exp(-iθ J_axis)`.
pub fn rotated_jz_variance(state: &DickeState, axis: Axis, theta: f64) -> f64 {
    let (vzz, vpp, czp) = rotation_moments(state, axis);
    let (s, c) = theta.sin_cos();
    c * c * vzz + s * s * vpp + 2.0 * s * c * czp
}

/// `(Var Jz, Var P, Cov(Jz, P))` with `P` the partner of `Jz` under rotations
/// about `axis`: `Jy` for `x`, `-Jx` for `y`.
fn rotation_moments(state: &DickeState, axis: Axis) -> (f64, f64, f64) {
    let n = state.n_particles();
    let a = state.amplitudes();
    let dim = a.len();
    let j = n as f64 / 2.0;
    let m = |k: usize| k as f64 - j;
    // J+ |k> = l(k) |k+1>
    let l = |k: usize| (j * (j + 1.0) - m(k) * (m(k) + 1.0)).max(0.0).sqrt();

    let jz: Vec<C64> = (0..dim).map(|k| a[k] * m(k)).collect();
    let mut jp = vec![C64::new(0.0, 0.0); dim];
    let mut jm = vec![C64::new(0.0, 0.0); dim];
    for k in 0..dim {
        if k + 1 < dim {
            jp[k + 1] += a[k] * l(k);
            jm[k] += a[k + 1] * l(k);
        }
    }
    let partner: Vec<C64> = match axis {
        // Jy = (J+ - J-) / 2i
        Axis::X => jp.iter().zip(&jm).map(|(p, q)| (p - q) * C64::new(0.0, -0.5)).collect(),
        // -Jx = -(J+ + J-) / 2
        _ => jp.iter().zip(&jm).map(|(p, q)| -(p + q) * 0.5).collect(),
    };
    let dot = |u: &[C64], v: &[C64]| -> C64 { u.iter().zip(v).map(|(x, y)| x.conj() * y).sum() };
    let amps = a.as_slice();
    let ez = dot(amps, &jz).re;
    let ep = dot(amps, &partner).re;
    let vzz = dot(&jz, &jz).re - ez * ez;
    let vpp = dot(&partner, &partner).re - ep * ep;
    let czp = dot(&jz, &partner).re - ez * ep;
    (vzz, vpp, czp)
}
