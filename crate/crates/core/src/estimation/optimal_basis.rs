//! Measurement-basis discovery from the parity conditions.

use nalgebra::DMatrix;

use crate::spin::{apply_steps, steps_unitary, BasisSpec, CollectiveOperator, DickeState, Step};
use crate::{C64, Error, Result};

/// Tolerance for the parity conditions on numerically evolved states.
pub const PARITY_TOL: f64 = 1e-8;
/// A state counts as projected onto one basis vector above this probability.
const PROJECTION_TOL: f64 = 1e-10;

/// The `Jx`, `Jy`, `Jz` eigenbases, in that order.
pub fn default_candidates(n: usize) -> Result<Vec<BasisSpec>> {
    crate::spin::Axis::ALL.iter().map(|&a| BasisSpec::axis(n, a)).collect()
}

/// First candidate in which the entangled state `U₁|ψ₀>` is a parity
/// eigenstate and the generator flips parity, after accounting for the
/// readout `U₂`: measuring `B` after `U₂` is measuring in the basis
/// `U₂^dag B`, so the conditions are checked on `U₂U₁|ψ₀>` and `U₂ G U₂^dag`.
///
/// When no candidate satisfies both conditions, a candidate in which
/// `U₂U₁|ψ₀>` is a single basis vector is returned instead. Such a basis
/// projects onto the prepared state, so every other outcome has a double zero
/// at `φ = 0` and the measurement still saturates the QFI there. The fallback
/// is skipped when `G` leaves the state invariant (zero variance), since no
/// basis can then resolve the phase.
pub fn find_optimal_basis(
    initial: &DickeState,
    u1_steps: &[Step],
    u2_steps: &[Step],
    generator: &CollectiveOperator,
    candidates: &[BasisSpec],
) -> Result<Option<BasisSpec>> {
    if candidates.is_empty() {
        return Err(Error::param("candidates", "at least one candidate basis is required"));
    }
    let dim = initial.dim();
    if generator.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: generator.dim() });
    }
    let n = initial.n_particles();
    let state = apply_steps(&apply_steps(initial, u1_steps), u2_steps);
    let g = if u2_steps.is_empty() {
        generator.matrix().clone()
    } else {
        let u2 = steps_unitary(n, u2_steps);
        &u2 * generator.matrix() * u2.adjoint()
    };

    let amps = state.amplitudes();
    let g_psi = &g * amps;
    let mean = amps.dotc(&g_psi).re;
    let var = g_psi.norm_squared() - mean * mean;
    let moves = var > PARITY_TOL;

    let mut projecting = None;
    for basis in candidates {
        if basis.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: basis.dim() });
        }
        let coords = basis.coordinates(&state)?;
        if state_has_parity(basis, coords.as_slice()) && flips_parity(basis, &g) {
            return Ok(Some(basis.clone()));
        }
        let top = coords.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        if moves && projecting.is_none() && top > 1.0 - PROJECTION_TOL {
            projecting = Some(basis.clone());
        }
    }
    Ok(projecting)
}

fn state_has_parity(basis: &BasisSpec, coords: &[C64]) -> bool {
    let (mut even, mut odd) = (0.0, 0.0);
    for (k, z) in coords.iter().enumerate() {
        if basis.parity_sign(k) > 0.0 {
            even += z.norm_sqr();
        } else {
            odd += z.norm_sqr();
        }
    }
    2.0 * even.min(odd).sqrt() <= PARITY_TOL
}

fn flips_parity(basis: &BasisSpec, g: &DMatrix<C64>) -> bool {
    let v = basis.eigenvectors();
    let rep = v.ad_mul(&(g * v));
    let dim = rep.nrows();
    (0..dim).all(|k| {
        (0..dim).all(|l| basis.parity_sign(k) != basis.parity_sign(l) || 2.0 * rep[(k, l)].norm() <= PARITY_TOL)
    })
}
