use crate::{Error, Result};

/// Normalization tolerance for outcome distributions.
pub const DISTRIBUTION_TOL: f64 = 1e-10;
/// Round-off below which negative probabilities are clamped to zero.
const NEGATIVE_CLAMP: f64 = 1e-14;

/// Probabilities over the `N + 1` integer-spaced outcomes of a measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    probabilities: Vec<f64>,
    outcomes: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(mut probabilities: Vec<f64>, outcomes: Vec<f64>) -> Result<Self> {
        if probabilities.len() != outcomes.len() {
            return Err(Error::DimensionMismatch { expected: outcomes.len(), found: probabilities.len() });
        }
        for (k, p) in probabilities.iter_mut().enumerate() {
            if !p.is_finite() || *p < -NEGATIVE_CLAMP {
                return Err(Error::InvalidDistribution(format!("P[{k}] = {p}")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { probabilities, outcomes })
    }

    /// A distribution on the spin lattice `m_k = k - N/2`.
    pub fn on_lattice(probabilities: Vec<f64>) -> Result<Self> {
        let n = probabilities.len().saturating_sub(1);
        let outcomes = (0..probabilities.len()).map(|k| k as f64 - n as f64 / 2.0).collect();
        Self::new(probabilities, outcomes)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities.iter().zip(&self.outcomes).map(|(p, m)| p * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.probabilities.iter().zip(&self.outcomes).map(|(p, m)| p * (m - mean).powi(2)).sum()
    }

    pub(crate) fn check_same_lattice(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        if self.outcomes.iter().zip(&other.outcomes).any(|(a, b)| (a - b).abs() > 1e-9) {
            return Err(Error::InvalidDistribution("outcome lattices differ".into()));
        }
        Ok(())
    }
}
