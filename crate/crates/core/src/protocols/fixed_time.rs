//! Splitting a fixed total twisting budget between entangler and readout.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::spec::{build_protocol_on, BasisChoice, ProtocolKind, ProtocolSpec};
use crate::estimation::{default_phase_grid, max_cfi_over_phase, uniform_grid};
use crate::spin::Axis;
use crate::{Error, Result};

/// Points in the default `t1` grid.
pub const DEFAULT_T1_POINTS: usize = 101;
/// Relative tolerance within which a smaller `t1` wins a tie.
const TIE_TOL: f64 = 1e-6;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `U₂ = U_OAT(t₂)^dag`.
    AsymmetricReversed,
    /// `U₂ = U_OAT(t₂)`.
    PseudoForward,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::AsymmetricReversed, Family::PseudoForward];

    pub fn name(self) -> &'static str {
        match self {
            Family::AsymmetricReversed => "asymmetric-reversed",
            Family::PseudoForward => "pseudo-forward",
        }
    }

    pub fn kind(self) -> ProtocolKind {
        match self {
            Family::AsymmetricReversed => ProtocolKind::Asymmetric,
            Family::PseudoForward => ProtocolKind::PseudoForward,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "asymmetric-reversed" | "asymmetric" | "reversed" => Ok(Family::AsymmetricReversed),
            "pseudo-forward" | "forward" => Ok(Family::PseudoForward),
            _ => Err(Error::param("family", format!("unknown family `{s}`"))),
        }
    }
}

/// `t1 + t2 = total` with both nonnegative.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TimeBudget {
    pub total: f64,
    pub t1: f64,
    pub t2: f64,
}

impl TimeBudget {
    pub fn split(total: f64, t1: f64) -> Result<Self> {
        if !(total.is_finite() && total >= 0.0) {
            return Err(Error::param("total", format!("must be finite and >= 0, got {total}")));
        }
        if !(t1.is_finite() && (0.0..=total).contains(&t1)) {
            return Err(Error::param("t1", format!("must lie in [0, {total}], got {t1}")));
        }
        Ok(Self { total, t1, t2: (total - t1).max(0.0) })
    }
}

/// `DEFAULT_T1_POINTS` uniform points on `[0, total]`.
pub fn default_t1_grid(total: f64) -> Vec<f64> {
    uniform_grid(0.0, total, DEFAULT_T1_POINTS)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedTimeResult {
    pub total: f64,
    pub sigma: f64,
    pub family: Family,
    /// Sorted, deduplicated, always containing `T/2` and `T`.
    pub t1_grid: Vec<f64>,
    pub max_cfi: Vec<f64>,
    pub best_t1: f64,
    pub best_max_cfi: f64,
}

impl FixedTimeResult {
    /// `max_φ F_C` at the grid point nearest `t1`.
    pub fn value_at(&self, t1: f64) -> f64 {
        let i = self
            .t1_grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t1).abs().total_cmp(&(b.1 - t1).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.max_cfi[i]
    }

    /// The no-readout endpoint `t1 = T`.
    pub fn no_readout(&self) -> f64 {
        self.value_at(self.total)
    }

    /// The symmetric split `t1 = t2 = T/2`.
    pub fn even_split(&self) -> f64 {
        self.value_at(0.5 * self.total)
    }
}

/// Scan of `max_φ F_C` over the split `t1 + t2 = T` for one readout family.
#[derive(Clone, Debug)]
pub struct FixedTimeScan {
    n: usize,
    total: f64,
    sigma: f64,
    family: Family,
    initial: Axis,
    basis: BasisChoice,
    t1_grid: Option<Vec<f64>>,
    phase_grid: Vec<f64>,
}

impl FixedTimeScan {
    pub fn new(n: usize, total: f64, sigma: f64, family: Family) -> Self {
        Self { n, total, sigma, family, initial: Axis::X, basis: BasisChoice::Auto, t1_grid: None, phase_grid: default_phase_grid() }
    }

    /// Coherent-state axis of the input (and of the squeezing rotations).
    pub fn initial(mut self, axis: Axis) -> Self {
        self.initial = axis;
        self
    }

    /// Measurement basis for every split; splits other than the echo point
    /// may lack a parity basis, which [`BasisChoice::Best`] tolerates.
    pub fn basis(mut self, basis: BasisChoice) -> Self {
        self.basis = basis;
        self
    }

    pub fn t1_grid(mut self, grid: Vec<f64>) -> Self {
        self.t1_grid = Some(grid);
        self
    }

    pub fn phase_grid(mut self, grid: Vec<f64>) -> Self {
        self.phase_grid = grid;
        self
    }

    pub fn run(&self) -> Result<FixedTimeResult> {
        TimeBudget::split(self.total, 0.0)?;
        let mut grid = self.t1_grid.clone().unwrap_or_else(|| default_t1_grid(self.total));
        if grid.is_empty() {
            return Err(Error::param("t1_grid", "must be nonempty"));
        }
        for &t1 in &grid {
            TimeBudget::split(self.total, t1)?;
        }
        grid.push(0.5 * self.total);
        grid.push(self.total);
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * self.total.max(1.0));

        let max_cfi = grid
            .par_iter()
            .map(|&t1| {
                let budget = TimeBudget::split(self.total, t1)?;
                let spec = build_protocol_on(self.family.kind(), self.n, budget.t1, Some(budget.t2), self.initial)?;
                let spec = ProtocolSpec { measurement_basis: self.basis, ..spec };
                Ok(max_cfi_over_phase(&spec, self.sigma, &self.phase_grid)?.best_value)
            })
            .collect::<Result<Vec<f64>>>()?;

        let top = max_cfi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best = max_cfi.iter().position(|&v| v >= top - TIE_TOL * top.abs()).unwrap_or(0);
        Ok(FixedTimeResult {
            total: self.total,
            sigma: self.sigma,
            family: self.family,
            best_t1: grid[best],
            best_max_cfi: max_cfi[best],
            t1_grid: grid,
            max_cfi,
        })
    }
}

/// [`FixedTimeScan`] from `|x+>` on the default phase grid.
pub fn fixed_t_scan(n: usize, total: f64, sigma: f64, family: Family, t1_grid: &[f64]) -> Result<FixedTimeResult> {
    FixedTimeScan::new(n, total, sigma, family).t1_grid(t1_grid.to_vec()).run()
}
