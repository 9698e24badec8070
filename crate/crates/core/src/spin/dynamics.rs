//! Unitary evolution: rotations, one-axis twisting, and step sequences.

use nalgebra::{DMatrix, DVector};

use super::basis::axis_spectrum;
use super::operator::{spin_projection, Axis};
use super::state::DickeState;
use crate::{C64, Error, Result};

/// `exp(-i angle J_axis) |ψ>`.
pub fn rotate(state: &DickeState, axis: Axis, angle: f64) -> DickeState {
    DickeState::from_raw(rotate_vector(state.n_particles(), axis, angle, state.amplitudes()))
}

pub(crate) fn rotate_vector(n: usize, axis: Axis, angle: f64, v: &DVector<C64>) -> DVector<C64> {
    if angle == 0.0 {
        return v.clone();
    }
    match axis {
        Axis::Z => {
            let mut out = v.clone();
            for (k, z) in out.iter_mut().enumerate() {
                *z *= C64::from_polar(1.0, -angle * spin_projection(n, k));
            }
            out
        }
        _ => axis_spectrum(n, axis)
            .expect("collective spectrum is always available for N >= 1")
            .evolve(angle, v),
    }
}

/// One-axis twisting phase `exp(-i chi_t Jz^2) |ψ>`.
pub fn oat_phase(state: &DickeState, chi_t: f64) -> DickeState {
    let mut amps = state.amplitudes().clone();
    twist_rows(state.n_particles(), chi_t, amps.as_mut_slice(), 1);
    DickeState::from_raw(amps)
}

/// Multiply row `k` of a column-major buffer with `cols` columns by
/// `exp(-i chi_t m_k^2)`.
fn twist_rows(n: usize, chi_t: f64, data: &mut [C64], cols: usize) {
    let dim = n + 1;
    let phases: Vec<C64> = (0..dim)
        .map(|k| {
            let m = spin_projection(n, k);
            C64::from_polar(1.0, -chi_t * m * m)
        })
        .collect();
    for c in 0..cols {
        for (z, ph) in data[c * dim..(c + 1) * dim].iter_mut().zip(&phases) {
            *z *= ph;
        }
    }
}

/// A primitive unitary in a protocol pipeline.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Step {
    /// `exp(-i chi_t Jz^2)`.
    Oat { chi_t: f64 },
    /// `exp(-i angle J_axis)`.
    Rotate { axis: Axis, angle: f64 },
}

impl Step {
    pub fn inverse(self) -> Self {
        match self {
            Step::Oat { chi_t } => Step::Oat { chi_t: -chi_t },
            Step::Rotate { axis, angle } => Step::Rotate { axis, angle: -angle },
        }
    }

    pub fn is_finite(&self) -> bool {
        match *self {
            Step::Oat { chi_t } => chi_t.is_finite(),
            Step::Rotate { angle, .. } => angle.is_finite(),
        }
    }

    pub fn apply(&self, state: &DickeState) -> DickeState {
        match *self {
            Step::Oat { chi_t } => oat_phase(state, chi_t),
            Step::Rotate { axis, angle } => rotate(state, axis, angle),
        }
    }

    /// Left-multiply a matrix by this step's unitary.
    pub fn apply_to_matrix(&self, n: usize, m: &mut DMatrix<C64>) {
        match *self {
            Step::Oat { chi_t } => {
                let cols = m.ncols();
                twist_rows(n, chi_t, m.as_mut_slice(), cols);
            }
            Step::Rotate { axis: Axis::Z, angle } => {
                for k in 0..m.nrows() {
                    let ph = C64::from_polar(1.0, -angle * spin_projection(n, k));
                    for z in m.row_mut(k).iter_mut() {
                        *z *= ph;
                    }
                }
            }
            Step::Rotate { axis, angle } => {
                if angle != 0.0 {
                    let spec = axis_spectrum(n, axis).expect("collective spectrum is always available");
                    *m = spec.evolve_matrix(angle, m);
                }
            }
        }
    }
}

/// Apply steps left to right (the first step acts first).
pub fn apply_steps(state: &DickeState, steps: &[Step]) -> DickeState {
    steps.iter().fold(state.clone(), |s, step| step.apply(&s))
}

/// The product unitary of a step sequence as a dense matrix.
pub fn steps_unitary(n: usize, steps: &[Step]) -> DMatrix<C64> {
    let mut u = DMatrix::identity(n + 1, n + 1);
    for step in steps {
        step.apply_to_matrix(n, &mut u);
    }
    u
}

/// Steps undoing `steps`: inverses in reverse order.
pub fn inverse_steps(steps: &[Step]) -> Vec<Step> {
    steps.iter().rev().map(|s| s.inverse()).collect()
}

pub(crate) fn check_steps(steps: &[Step]) -> Result<()> {
    if steps.iter().all(Step::is_finite) {
        Ok(())
    } else {
        Err(Error::param("steps", "step parameters must be finite"))
    }
}
