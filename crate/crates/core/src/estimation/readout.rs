//! Phase-to-distribution map of a fixed interferometer.
//!
//! For a prepared state `ψ₁ = U₁|ψ₀>`, generator `G = V diag(w) V^dag`, a
//! readout unitary `U₂` and a measurement basis `B`, the outcome amplitudes are
//!
//! ```text
//! a(φ) = B^dag U₂ V · (exp(-iφw) ⊙ V^dag ψ₁)
//! ```
//!
//! The transfer matrix `B^dag U₂ V` and the coefficients `V^dag ψ₁` are fixed,
//! so each phase costs one pass over a dense matrix, and the analytic
//! derivatives follow from multiplying the coefficients by `-iw` and `-w²`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::distribution::OutcomeDistribution;
use super::fisher::cfi_with_curvature;
use super::noise::NoiseKernel;
use crate::spin::{axis_spectrum, BasisSpec, CollectiveOperator, DickeState, Spectrum};
use crate::{C64, Error, Result};

/// Spectrum of a phase generator, shared for the collective components.
pub fn generator_spectrum(g: &CollectiveOperator) -> Result<Arc<Spectrum>> {
    match g.axis_label() {
        Some(axis) => axis_spectrum(g.n_particles(), axis),
        None => Ok(Arc::new(Spectrum::of_hermitian(g.matrix()))),
    }
}

/// A distribution over outcomes with its first and second phase derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseDerivatives {
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub d2p: Vec<f64>,
}

impl PhaseDerivatives {
    fn through(&self, kernel: &NoiseKernel) -> Self {
        let [p, dp, d2p] = kernel.apply3([&self.p, &self.dp, &self.d2p]);
        Self { p, dp, d2p }
    }

    pub fn fisher_information(&self) -> Result<f64> {
        cfi_with_curvature(&self.p, &self.dp, &self.d2p)
    }
}

/// Outcome amplitudes and their first two phase derivatives.
#[derive(Clone, Debug)]
pub struct Amplitudes {
    pub a: DVector<C64>,
    pub da: DVector<C64>,
    pub d2a: DVector<C64>,
}

#[derive(Clone, Debug)]
pub struct PhaseReadout {
    generator_eigenvalues: Vec<f64>,
    coefficients: DVector<C64>,
    transfer: DMatrix<C64>,
    outcomes: Vec<f64>,
    kernel: NoiseKernel,
}

impl PhaseReadout {
    /// `readout = None` means `U₂ = 1`.
    pub fn new(
        prepared: &DickeState,
        generator: &Spectrum,
        readout: Option<&DMatrix<C64>>,
        basis: &BasisSpec,
        sigma: f64,
    ) -> Result<Self> {
        let dim = prepared.dim();
        for found in [generator.dim(), basis.dim()] {
            if found != dim {
                return Err(Error::DimensionMismatch { expected: dim, found });
            }
        }
        if let Some(u) = readout {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: u.nrows() });
            }
        }
        let v = generator.eigenvectors();
        let rotated = match readout {
            Some(u) => u * v,
            None => v.clone(),
        };
        let transfer = basis.eigenvectors().ad_mul(&rotated);
        Ok(Self {
            generator_eigenvalues: generator.eigenvalues().to_vec(),
            coefficients: generator.coordinates(prepared.amplitudes()),
            transfer,
            outcomes: basis.outcomes().to_vec(),
            kernel: NoiseKernel::new(dim, sigma)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn kernel(&self) -> &NoiseKernel {
        &self.kernel
    }

    pub fn sigma(&self) -> f64 {
        self.kernel.sigma()
    }

    pub fn amplitudes(&self, phi: f64) -> Amplitudes {
        let dim = self.dim();
        let zero = C64::new(0.0, 0.0);
        let (mut a, mut da, mut d2a) = (vec![zero; dim], vec![zero; dim], vec![zero; dim]);
        for (j, (&w, &c)) in self.generator_eigenvalues.iter().zip(self.coefficients.iter()).enumerate() {
            let e = c * C64::from_polar(1.0, -phi * w);
            if e == zero {
                continue;
            }
            let e1 = C64::new(e.im * w, -e.re * w);
            let e2 = e * -(w * w);
            let col = &self.transfer.as_slice()[j * dim..(j + 1) * dim];
            for (((b, x), y), z) in col.iter().zip(a.iter_mut()).zip(da.iter_mut()).zip(d2a.iter_mut()) {
                *x += b * e;
                *y += b * e1;
                *z += b * e2;
            }
        }
        Amplitudes { a: DVector::from_vec(a), da: DVector::from_vec(da), d2a: DVector::from_vec(d2a) }
    }

    /// Noise-free distribution and derivatives.
    pub fn clean(&self, phi: f64) -> PhaseDerivatives {
        let Amplitudes { a, da, d2a } = self.amplitudes(phi);
        let p = a.iter().map(|z| z.norm_sqr()).collect();
        let dp = a.iter().zip(da.iter()).map(|(x, y)| 2.0 * (x.conj() * y).re).collect();
        let d2p = a
            .iter()
            .zip(da.iter())
            .zip(d2a.iter())
            .map(|((x, y), z)| 2.0 * (x.conj() * z).re + 2.0 * y.norm_sqr())
            .collect();
        PhaseDerivatives { p, dp, d2p }
    }

    /// Distribution and derivatives after the detection-noise channel.
    pub fn noisy(&self, phi: f64) -> PhaseDerivatives {
        let clean = self.clean(phi);
        if self.kernel.is_identity() {
            clean
        } else {
            clean.through(&self.kernel)
        }
    }

    pub fn distribution(&self, phi: f64) -> Result<OutcomeDistribution> {
        OutcomeDistribution::new(self.noisy(phi).p, self.outcomes.clone())
    }

    pub fn clean_distribution(&self, phi: f64) -> Result<OutcomeDistribution> {
        OutcomeDistribution::new(self.clean(phi).p, self.outcomes.clone())
    }

    /// Classical Fisher information of the (noisy) measurement at `phi`.
    pub fn cfi(&self, phi: f64) -> Result<f64> {
        self.noisy(phi).fisher_information()
    }

    /// `Var[S] / (∂φ <S>)²` for the signal diagonal in the measurement basis
    /// with eigenvalues `outcomes`; `+∞` where the slope vanishes.
    pub fn moment_variance(&self, phi: f64) -> f64 {
        let d = self.noisy(phi);
        let mean: f64 = d.p.iter().zip(&self.outcomes).map(|(p, m)| p * m).sum();
        // centred sums avoid cancellation when <S> sits near an extreme
        let var: f64 = d.p.iter().zip(&self.outcomes).map(|(p, m)| p * (m - mean).powi(2)).sum();
        let slope: f64 = d.dp.iter().zip(&self.outcomes).map(|(p, m)| p * (m - mean)).sum();
        if slope.abs() < MOMENT_SLOPE_FLOOR {
            f64::INFINITY
        } else {
            var / (slope * slope)
        }
    }
}

/// Slopes `|∂φ<S>|` below this mark a point with no usable signal.
pub const MOMENT_SLOPE_FLOOR: f64 = 1e-12;
