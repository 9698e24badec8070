//! Pure states in the Dicke basis.

use nalgebra::DVector;

use super::operator::{spin_projection, Axis, CollectiveOperator};
use crate::{C64, Error, Result};

/// Normalization tolerance enforced at construction.
pub const NORM_TOL: f64 = 1e-12;

/// Complex amplitudes over the Dicke states `|j, m_k>`, `k = 0..=N`,
/// with `m_k = k - N/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeState {
    n: usize,
    amplitudes: DVector<C64>,
}

/// Sign of a coherent-state polarization.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl DickeState {
    /// Wrap an amplitude vector of length `N + 1`; it must already be
    /// normalized within [`NORM_TOL`].
    pub fn from_amplitudes(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::TooFewParticles { min: 1, found: 0 });
        }
        let norm = amplitudes.norm_squared();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n: amplitudes.len() - 1, amplitudes })
    }

    /// Normalize and wrap an arbitrary nonzero amplitude vector.
    pub fn normalized(mut amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm * norm));
        }
        amplitudes.unscale_mut(norm);
        Self::from_amplitudes(amplitudes)
    }

    /// The Dicke state `|j, m_k>`.
    pub fn dicke(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewParticles { min: 1, found: 0 });
        }
        if k > n {
            return Err(Error::DimensionMismatch { expected: n + 1, found: k + 1 });
        }
        let mut amplitudes = DVector::zeros(n + 1);
        amplitudes[k] = C64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub(crate) fn from_raw(amplitudes: DVector<C64>) -> Self {
        Self { n: amplitudes.len() - 1, amplitudes }
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        self.check_dim(other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|`, the global-phase-insensitive equality measure.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        self.overlap(other).map(|z| z.norm())
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dim });
        }
        Ok(())
    }
}

/// Maximal (`Plus`) or minimal (`Minus`) eigenstate of `J_axis`.
///
/// Amplitudes are written in closed form: the `x` state has the binomial
/// profile `sqrt(C(N, k)) / 2^(N/2)`, `-x` alternates its sign, and `±y`
/// follow from a `∓π/2` rotation about `z`.
pub fn coherent_state(n: usize, axis: Axis, sign: Sign) -> Result<DickeState> {
    if n == 0 {
        return Err(Error::TooFewParticles { min: 1, found: 0 });
    }
    if axis == Axis::Z {
        let k = match sign {
            Sign::Plus => n,
            Sign::Minus => 0,
        };
        return DickeState::dicke(n, k);
    }
    let profile = binomial_sqrt_profile(n);
    let amplitudes = DVector::from_iterator(
        n + 1,
        profile.iter().enumerate().map(|(k, &a)| {
            let m = spin_projection(n, k);
            let phase = match (axis, sign) {
                (Axis::X, Sign::Plus) => C64::new(1.0, 0.0),
                (Axis::X, Sign::Minus) => {
                    if (n - k).is_multiple_of(2) {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(-1.0, 0.0)
                    }
                }
                (Axis::Y, Sign::Plus) => C64::from_polar(1.0, -std::f64::consts::FRAC_PI_2 * m),
                (Axis::Y, Sign::Minus) => C64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * m),
                (Axis::Z, _) => unreachable!(),
            };
            phase * a
        }),
    );
    DickeState::normalized(amplitudes)
}

/// `sqrt(C(N, k) / 2^N)` evaluated in log space so large `N` does not overflow.
fn binomial_sqrt_profile(n: usize) -> Vec<f64> {
    let mut ln_fact = vec![0.0f64; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let ln2n = n as f64 * std::f64::consts::LN_2;
    (0..=n)
        .map(|k| (0.5 * (ln_fact[n] - ln_fact[k] - ln_fact[n - k] - ln2n)).exp())
        .collect()
}

/// Exact `<O>` and `Var(O)` for a pure state.
pub fn expectation_and_variance(state: &DickeState, op: &CollectiveOperator) -> Result<(f64, f64)> {
    state.check_dim(op.dim())?;
    let applied = op.matrix() * state.amplitudes();
    let mean = state.amplitudes().dotc(&applied).re;
    let second = applied.norm_squared();
    Ok((mean, second - mean * mean))
}
