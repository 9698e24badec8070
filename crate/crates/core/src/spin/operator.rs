//! Collective spin operators in the `Jz` eigenbasis.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::{C64, Error, Result};

/// Hermiticity tolerance for user-supplied operators.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A Cartesian direction of the collective spin.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "jx" => Ok(Axis::X),
            "y" | "jy" => Ok(Axis::Y),
            "z" | "jz" => Ok(Axis::Z),
            other => Err(Error::param("axis", format!("unknown axis `{other}`"))),
        }
    }
}

/// Dimensionless projection `m_k = k - N/2` of the `k`-th Dicke state.
#[inline]
pub fn spin_projection(n: usize, k: usize) -> f64 {
    k as f64 - n as f64 / 2.0
}

/// Matrix element `<k+1| J+ |k>` for spin `j = N/2`.
#[inline]
pub(crate) fn ladder_element(n: usize, k: usize) -> f64 {
    let j = n as f64 / 2.0;
    let m = spin_projection(n, k);
    (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// Hermitian `(N+1) x (N+1)` representation of a collective observable.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectiveOperator {
    n: usize,
    matrix: DMatrix<C64>,
    axis: Option<Axis>,
}

impl CollectiveOperator {
    /// `Jx`, `Jy` or `Jz` for `N` particles, written in the `Jz` eigenbasis.
    pub fn axis(n: usize, axis: Axis) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewParticles { min: 1, found: 0 });
        }
        let dim = n + 1;
        let mut matrix = DMatrix::<C64>::zeros(dim, dim);
        match axis {
            Axis::Z => {
                for k in 0..dim {
                    matrix[(k, k)] = C64::new(spin_projection(n, k), 0.0);
                }
            }
            Axis::X => {
                for k in 0..n {
                    let half = 0.5 * ladder_element(n, k);
                    matrix[(k + 1, k)] = C64::new(half, 0.0);
                    matrix[(k, k + 1)] = C64::new(half, 0.0);
                }
            }
            Axis::Y => {
                // Jy = (J+ - J-) / 2i
                for k in 0..n {
                    let half = 0.5 * ladder_element(n, k);
                    matrix[(k + 1, k)] = C64::new(0.0, -half);
                    matrix[(k, k + 1)] = C64::new(0.0, half);
                }
            }
        }
        Ok(Self { n, matrix, axis: Some(axis) })
    }

    /// Wrap an arbitrary Hermitian matrix acting on the `N`-particle
    /// symmetric subspace.
    pub fn custom(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if matrix.nrows() < 2 {
            return Err(Error::TooFewParticles { min: 1, found: 0 });
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { n: matrix.nrows() - 1, matrix, axis: None })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::custom(DMatrix::identity(n + 1, n + 1))
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `Some(axis)` for the three collective spin components.
    pub fn axis_label(&self) -> Option<Axis> {
        self.axis
    }

    pub fn label(&self) -> String {
        match self.axis {
            Some(a) => format!("J{a}"),
            None => "custom".to_string(),
        }
    }

    /// `A B - B A` as an unlabeled (not necessarily Hermitian) matrix.
    pub fn commutator(&self, other: &Self) -> Result<DMatrix<C64>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }
}

/// Build `Jx`, `Jy` or `Jz` for `N` particles.
pub fn make_collective_operator(n: usize, axis: Axis) -> Result<CollectiveOperator> {
    CollectiveOperator::axis(n, axis)
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}
