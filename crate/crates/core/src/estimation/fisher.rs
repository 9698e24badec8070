//! Hellinger distance and Fisher information.

use super::distribution::OutcomeDistribution;
use crate::spin::{expectation_and_variance, CollectiveOperator, DickeState};
use crate::{Error, Result};

/// Probabilities below this are treated as zeros of the distribution.
pub const EPS_FLOOR: f64 = 1e-12;

/// Below this the curvature limit replaces `(dP_k)^2 / P_k`.
pub const CURVATURE_FLOOR: f64 = 1e-20;

/// `1 - Σ_k sqrt(P_k Q_k)`, clamped to `[0, 1]`.
pub fn hellinger_sq(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    p.check_same_lattice(q)?;
    let overlap: f64 = p.probabilities().iter().zip(q.probabilities()).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((1.0 - overlap).clamp(0.0, 1.0))
}

/// `F_C = Σ_k (dP_k)^2 / P_k`.
///
/// Terms with `P_k < EPS_FLOOR` and `|dP_k| < sqrt(EPS_FLOOR)` are dropped; a
/// small `P_k` paired with a large derivative is reported as
/// [`Error::Singularity`].
pub fn cfi_from_distribution_pair(p: &OutcomeDistribution, dp: &[f64]) -> Result<f64> {
    if dp.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: dp.len() });
    }
    let drift: f64 = dp.iter().sum();
    if drift.abs() > 1e-10 {
        return Err(Error::param("dP", format!("derivative must sum to zero, sums to {drift:e}")));
    }
    fisher_sum(p.probabilities(), dp)
}

/// Fisher information with the zero-probability limit resolved by curvature.
///
/// At an isolated zero of `P_k(φ)` both `P_k` and `dP_k` vanish while
/// `(dP_k)^2 / P_k → 2 d²P_k`. Distributions from parity eigenstates sit
/// exactly at such zeros at `φ = 0`, and those outcomes carry all of the
/// information there, so they cannot simply be skipped.
///
/// Since the derivatives are exact, the ratio itself is used down to
/// [`CURVATURE_FLOOR`]; near a double zero `dP_k ~ sqrt(P_k)`, so a
/// singularity cannot arise.
pub fn cfi_with_curvature(p: &[f64], dp: &[f64], d2p: &[f64]) -> Result<f64> {
    if dp.len() != p.len() || d2p.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: dp.len().min(d2p.len()) });
    }
    let total = p
        .iter()
        .zip(dp)
        .zip(d2p)
        .map(|((&pk, &dk), &ck)| if pk >= CURVATURE_FLOOR { dk * dk / pk } else { 2.0 * ck.max(0.0) })
        .sum();
    Ok(total)
}

fn fisher_sum(p: &[f64], dp: &[f64]) -> Result<f64> {
    let tiny_slope = EPS_FLOOR.sqrt();
    let mut total = 0.0;
    for (k, (&pk, &dk)) in p.iter().zip(dp).enumerate() {
        if pk >= EPS_FLOOR {
            total += dk * dk / pk;
        } else if dk.abs() >= tiny_slope {
            return Err(Error::Singularity { index: k, probability: pk, derivative: dk });
        }
    }
    Ok(total)
}

/// Quantum Fisher information of a pure state, `4 Var(G)`.
pub fn qfi_pure(state: &DickeState, generator: &CollectiveOperator) -> Result<f64> {
    let (_, var) = expectation_and_variance(state, generator)?;
    Ok(4.0 * var.max(0.0))
}
