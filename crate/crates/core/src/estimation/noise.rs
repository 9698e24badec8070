//! Detection noise as a discrete Gaussian blur of the outcome index.
//!
//! A source outcome `k'` is reported as `k` with probability
//! `C_{k'} G_{k-k'}`, where `G_d = exp(-d^2 / 2σ^2)` and `C_{k'}` renormalizes
//! over the physical outcomes `k = 0..=N`. The induced matrix is
//! column-stochastic, so it maps distributions to distributions and, being
//! linear, maps phase derivatives of distributions to derivatives.

use super::distribution::OutcomeDistribution;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseKernel {
    sigma: f64,
    dim: usize,
    /// Row-major `dim x dim` stochastic matrix; `None` is the identity channel.
    matrix: Option<Vec<f64>>,
}

impl NoiseKernel {
    pub fn new(dim: usize, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::param("sigma", format!("must be finite and >= 0, got {sigma}")));
        }
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if sigma == 0.0 {
            return Ok(Self::identity(dim));
        }
        let gauss = |d: usize| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp();
        let mut matrix = vec![0.0; dim * dim];
        for src in 0..dim {
            let norm: f64 = (0..dim).map(|k| gauss(k.abs_diff(src))).sum();
            for k in 0..dim {
                matrix[k * dim + src] = gauss(k.abs_diff(src)) / norm;
            }
        }
        Ok(Self { sigma, dim, matrix: Some(matrix) })
    }

    pub fn identity(dim: usize) -> Self {
        Self { sigma: 0.0, dim, matrix: None }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_none()
    }

    /// Transition probability from source outcome `src` to reported `k`.
    pub fn entry(&self, k: usize, src: usize) -> f64 {
        match &self.matrix {
            Some(m) => m[k * self.dim + src],
            None => (k == src) as u8 as f64,
        }
    }

    /// Apply the channel to any vector over outcomes (probabilities or their
    /// phase derivatives).
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "noise kernel dimension mismatch");
        match &self.matrix {
            None => v.to_vec(),
            Some(m) => m.chunks_exact(self.dim).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect(),
        }
    }

    /// [`apply`](Self::apply) to three vectors in one pass over the matrix.
    pub fn apply3(&self, v: [&[f64]; 3]) -> [Vec<f64>; 3] {
        let Some(m) = &self.matrix else {
            return v.map(|x| x.to_vec());
        };
        let mut out = [vec![0.0; self.dim], vec![0.0; self.dim], vec![0.0; self.dim]];
        for (k, row) in m.chunks_exact(self.dim).enumerate() {
            let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
            for (((w, x), y), z) in row.iter().zip(v[0]).zip(v[1]).zip(v[2]) {
                s0 += w * x;
                s1 += w * y;
                s2 += w * z;
            }
            out[0][k] = s0;
            out[1][k] = s1;
            out[2][k] = s2;
        }
        out
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.dim).map(|src| (0..self.dim).map(|k| self.entry(k, src)).sum()).collect()
    }
}

/// `P~_k = Σ_{k'} C_{k'} G_{k-k'} P_{k'}` on the outcome lattice.
pub fn convolve_noise(p: &OutcomeDistribution, sigma: f64) -> Result<OutcomeDistribution> {
    let kernel = NoiseKernel::new(p.len(), sigma)?;
    OutcomeDistribution::new(kernel.apply(p.probabilities()), p.outcomes().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_is_identity() {
        let p = OutcomeDistribution::on_lattice(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(convolve_noise(&p, 0.0).unwrap(), p);
    }

    #[test]
    fn delta_spreads_into_renormalized_gaussian() {
        let n = 20;
        let mut probs = vec![0.0; n + 1];
        probs[n / 2] = 1.0;
        let p = OutcomeDistribution::on_lattice(probs).unwrap();
        let q = convolve_noise(&p, 2.0).unwrap();
        // direct kernel evaluation: all displacements -10..=10 fit on the lattice
        let weights: Vec<f64> = (0..=n).map(|k| (-((k as f64 - 10.0).powi(2)) / 8.0).exp()).collect();
        let total: f64 = weights.iter().sum();
        for (k, w) in weights.iter().enumerate() {
            assert!((q.probabilities()[k] - w / total).abs() < 1e-15);
            assert!((q.probabilities()[k] - q.probabilities()[n - k]).abs() < 1e-15);
        }
    }

    #[test]
    fn columns_sum_to_one_with_boundary_truncation() {
        for sigma in [0.3, 1.0, 4.0, 50.0] {
            let k = NoiseKernel::new(13, sigma).unwrap();
            for s in k.column_sums() {
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_is_boundary_weighted_but_normalized() {
        let p = OutcomeDistribution::on_lattice(vec![1.0 / 11.0; 11]).unwrap();
        let q = convolve_noise(&p, 3.0).unwrap();
        let total: f64 = q.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // edge outcomes have fewer neighbours to receive mass from, which the
        // renormalized edge columns only partly make up
        assert!(q.probabilities()[5] - q.probabilities()[0] > 1e-3);
    }

    #[test]
    fn negative_sigma_rejected() {
        assert!(NoiseKernel::new(4, -1.0).is_err());
        assert!(NoiseKernel::new(4, f64::NAN).is_err());
    }
}
