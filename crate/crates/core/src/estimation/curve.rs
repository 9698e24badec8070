//! Phase scans of Fisher information and moment sensitivity.

use rayon::prelude::*;

use super::readout::PhaseReadout;
use super::search::{golden_section_max, golden_section_min};
use crate::protocols::{BasisChoice, CompiledProtocol, ProtocolSpec};
use crate::spin::{Axis, BasisSpec};
use crate::{Error, Result};

/// Points in the default phase grid on `[-π/2, π/2]`.
pub const DEFAULT_PHASE_POINTS: usize = 721;
/// Bracket width at which golden-section refinement stops.
pub const REFINE_TOL: f64 = 1e-4;

/// Uniform grid of [`DEFAULT_PHASE_POINTS`] phases from `-π/2` to `π/2`
/// inclusive, so `φ = 0` is a grid point.
pub fn default_phase_grid() -> Vec<f64> {
    uniform_grid(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, DEFAULT_PHASE_POINTS)
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn uniform_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (points - 1) as f64;
            (0..points).map(|i| if i + 1 == points { stop } else { start + step * i as f64 }).collect()
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Maximize,
    Minimize,
}

/// A quantity sampled over phases, with its refined optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct FisherCurve {
    pub phase_grid: Vec<f64>,
    /// `NaN` at skipped points.
    pub values: Vec<f64>,
    /// Grid indices where evaluation failed (singular Fisher terms).
    pub skipped: Vec<usize>,
    pub objective: Objective,
    /// Best value after refinement (`max` of CFI, `min` of `Δφ²`).
    pub best_value: f64,
    pub best_phase: f64,
    /// Best value on the grid itself.
    pub grid_best_value: f64,
    pub grid_best_phase: f64,
}

impl FisherCurve {
    /// Scan `f` over `grid`, then refine around the grid optimum by golden
    /// section on the neighbouring bracket. Failed points are recorded in
    /// `skipped`; ties on the grid resolve to the first (smallest) phase.
    pub fn scan<F>(grid: &[f64], objective: Objective, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        if grid.is_empty() {
            return Err(Error::param("phase_grid", "must be nonempty"));
        }
        if grid.iter().any(|p| !p.is_finite()) {
            return Err(Error::param("phase_grid", "phases must be finite"));
        }
        let raw: Vec<Result<f64>> = grid.par_iter().map(|&phi| f(phi)).collect();
        let mut values = Vec::with_capacity(grid.len());
        let mut skipped = Vec::new();
        for (i, r) in raw.into_iter().enumerate() {
            match r {
                Ok(v) => values.push(v),
                Err(Error::Singularity { .. }) => {
                    values.push(f64::NAN);
                    skipped.push(i);
                }
                Err(e) => return Err(e),
            }
        }
        let better = |a: f64, b: f64| match objective {
            Objective::Maximize => a > b,
            Objective::Minimize => a < b,
        };
        let mut best: Option<usize> = None;
        for (i, &v) in values.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            if best.is_none_or(|b| better(v, values[b])) {
                best = Some(i);
            }
        }
        let Some(bi) = best else {
            return Err(Error::param("phase_grid", "every grid point was singular"));
        };
        let (grid_best_phase, grid_best_value) = (grid[bi], values[bi]);

        let (mut best_phase, mut best_value) = (grid_best_phase, grid_best_value);
        if grid.len() > 1 && grid_best_value.is_finite() {
            let lo = grid[bi.saturating_sub(1)];
            let hi = grid[(bi + 1).min(grid.len() - 1)];
            let eval = |phi: f64| match f(phi) {
                Ok(v) if v.is_finite() => v,
                _ => match objective {
                    Objective::Maximize => f64::NEG_INFINITY,
                    Objective::Minimize => f64::INFINITY,
                },
            };
            let (x, fx) = match objective {
                Objective::Maximize => golden_section_max(eval, lo, hi, REFINE_TOL),
                Objective::Minimize => golden_section_min(eval, lo, hi, REFINE_TOL),
            };
            if better(fx, best_value) {
                best_phase = x;
                best_value = fx;
            }
        }
        Ok(Self {
            phase_grid: grid.to_vec(),
            values,
            skipped,
            objective,
            best_value,
            best_phase,
            grid_best_value,
            grid_best_phase,
        })
    }
}

/// Classical Fisher information of the protocol's measurement, with detection
/// noise `sigma`, over `phase_grid`; the curve's best value is `max_φ F_C`.
pub fn max_cfi_over_phase(protocol: &ProtocolSpec, sigma: f64, phase_grid: &[f64]) -> Result<FisherCurve> {
    if protocol.measurement_basis == BasisChoice::Best {
        return Ok(best_readout(protocol, sigma, phase_grid)?.1);
    }
    let compiled = CompiledProtocol::new(protocol, sigma)?;
    cfi_curve(compiled.readout(), phase_grid)
}

/// Resolution of [`BasisChoice::Best`]: the parity basis if one exists,
/// otherwise the `x`, `y`, `z` basis with the largest `max_φ F_C` over
/// `phase_grid` (earlier axes win near-ties). Returns the compiled protocol
/// with its curve.
pub fn best_readout(protocol: &ProtocolSpec, sigma: f64, phase_grid: &[f64]) -> Result<(CompiledProtocol, FisherCurve)> {
    let auto = ProtocolSpec { measurement_basis: BasisChoice::Auto, ..protocol.clone() };
    match CompiledProtocol::new(&auto, sigma) {
        Ok(compiled) => {
            let curve = cfi_curve(compiled.readout(), phase_grid)?;
            return Ok((compiled, curve));
        }
        Err(Error::NoOptimalBasis) => {}
        Err(e) => return Err(e),
    }
    let mut best: Option<(CompiledProtocol, FisherCurve)> = None;
    for axis in Axis::ALL {
        let compiled = CompiledProtocol::with_basis(protocol, BasisSpec::axis(protocol.n_particles, axis)?, sigma)?;
        let curve = cfi_curve(compiled.readout(), phase_grid)?;
        let better = match &best {
            None => true,
            Some((_, b)) => curve.best_value > b.best_value * (1.0 + BASIS_TIE_TOL),
        };
        if better {
            best = Some((compiled, curve));
        }
    }
    Ok(best.expect("three candidate axes"))
}

/// Relative margin by which a later axis must beat an earlier one.
const BASIS_TIE_TOL: f64 = 1e-9;

/// [`max_cfi_over_phase`] for an already compiled readout.
pub fn cfi_curve(readout: &PhaseReadout, phase_grid: &[f64]) -> Result<FisherCurve> {
    FisherCurve::scan(phase_grid, Objective::Maximize, |phi| readout.cfi(phi))
}

/// Method-of-moments sensitivity `Δφ² = Var[S] / (∂φ<S>)²` over `phase_grid`,
/// measured in the eigenbasis of the collective `signal` component, with the
/// moments taken from the noise-convolved distribution. The curve's best value
/// is `min_φ Δφ²`; points with no slope hold `+∞`.
pub fn moment_sensitivity(
    protocol: &ProtocolSpec,
    signal: Axis,
    phase_grid: &[f64],
    sigma: f64,
) -> Result<FisherCurve> {
    let basis = BasisSpec::axis(protocol.n_particles, signal)?;
    let compiled = CompiledProtocol::with_basis(protocol, basis, sigma)?;
    let readout = compiled.readout();
    FisherCurve::scan(phase_grid, Objective::Minimize, |phi| Ok(readout.moment_variance(phi)))
}

/// Analytic `∂φ P_k` of the protocol's (noisy) outcome distribution.
pub fn state_phase_derivative(protocol: &ProtocolSpec, phi: f64, sigma: f64) -> Result<Vec<f64>> {
    Ok(CompiledProtocol::new(protocol, sigma)?.readout().noisy(phi).dp)
}
