//! Brute-force reference implementations shared by the integration tests.
//!
//! Everything here is built from the ladder formula and a Taylor-series
//! matrix exponential with scaling and squaring, without touching the
//! library's cached eigendecompositions or analytic derivatives.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

pub fn ladder(n: usize) -> (DMatrix<C>, DMatrix<C>, DMatrix<C>) {
    let dim = n + 1;
    let j = n as f64 / 2.0;
    let mut jp = DMatrix::zeros(dim, dim);
    for k in 0..n {
        let m = k as f64 - j;
        jp[(k + 1, k)] = C::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * C::new(0.5, 0.0);
    let jy = (&jp - &jm) * C::new(0.0, -0.5);
    let jz = DMatrix::from_diagonal(&DVector::from_fn(dim, |k, _| C::new(k as f64 - j, 0.0)));
    (jx, jy, jz)
}

/// `exp(-i t H)` by scaling and squaring a truncated Taylor series.
pub fn expm_i(h: &DMatrix<C>, t: f64) -> DMatrix<C> {
    let dim = h.nrows();
    let a = h * C::new(0.0, -t);
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * dim as f64;
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.25 {
        s += 1;
    }
    let a = a / C::new(2f64.powi(s as i32), 0.0);
    let mut term = DMatrix::<C>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..=24 {
        term = &term * &a / C::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `|+x>` from its closed-form binomial amplitudes.
pub fn css_x(n: usize) -> DVector<C> {
    let mut amps = DVector::zeros(n + 1);
    let mut c = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            c *= (n - k + 1) as f64 / k as f64;
        }
        amps[k] = C::new((c / 2f64.powi(n as i32)).sqrt(), 0.0);
    }
    amps
}

/// Eigenvectors of `Jx` or `Jy` ordered by ascending eigenvalue, as the
/// columns of the rotation `R` with `R Jz R^dag = J_axis`.
pub fn axis_basis(n: usize, axis: char) -> DMatrix<C> {
    let (jx, jy, _) = ladder(n);
    let half_pi = std::f64::consts::FRAC_PI_2;
    match axis {
        'x' => expm_i(&jy, half_pi),
        'y' => expm_i(&jx, -half_pi),
        _ => DMatrix::identity(n + 1, n + 1),
    }
}

pub fn noise_matrix(dim: usize, sigma: f64) -> DMatrix<f64> {
    if sigma == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let mut m = DMatrix::zeros(dim, dim);
    for src in 0..dim {
        let col: Vec<f64> = (0..dim)
            .map(|k| (-((k as f64 - src as f64).powi(2)) / (2.0 * sigma * sigma)).exp())
            .collect();
        let s: f64 = col.iter().sum();
        for k in 0..dim {
            m[(k, src)] = col[k] / s;
        }
    }
    m
}

/// Dense interferometer: `P(φ) = K |B^dag U₂ exp(-iφG) ψ₁|²`.
pub struct DenseInterferometer {
    pub prepared: DVector<C>,
    pub generator: DMatrix<C>,
    pub readout: DMatrix<C>,
    pub basis: DMatrix<C>,
    pub noise: DMatrix<f64>,
}

impl DenseInterferometer {
    pub fn probabilities(&self, phi: f64) -> DVector<f64> {
        let psi = &self.readout * expm_i(&self.generator, phi) * &self.prepared;
        let amps = self.basis.adjoint() * psi;
        let p = DVector::from_iterator(amps.len(), amps.iter().map(|z| z.norm_sqr()));
        &self.noise * p
    }

    /// Central-difference derivative.
    pub fn derivative(&self, phi: f64, h: f64) -> DVector<f64> {
        (self.probabilities(phi + h) - self.probabilities(phi - h)) / (2.0 * h)
    }

    /// Classical Fisher information from central differences, skipping
    /// vanishing outcomes.
    pub fn cfi(&self, phi: f64, h: f64) -> f64 {
        let p = self.probabilities(phi);
        let d = self.derivative(phi, h);
        p.iter().zip(d.iter()).filter(|(p, _)| **p > 1e-9).map(|(p, d)| d * d / p).sum()
    }
}

/// OAT then rotation about `axis_op` by `theta`.
pub fn squeeze(n: usize, chi_t: f64, axis_op: &DMatrix<C>, theta: f64) -> DMatrix<C> {
    let (_, _, jz) = ladder(n);
    let jz2 = &jz * &jz;
    expm_i(axis_op, theta) * expm_i(&jz2, chi_t)
}

pub fn variance(psi: &DVector<C>, op: &DMatrix<C>) -> f64 {
    let g = op * psi;
    let mean = psi.dotc(&g).re;
    g.norm_squared() - mean * mean
}
