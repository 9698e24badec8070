//! Evaluation of `|ψφ> = U₂ exp(-iφG) U₁ |ψ₀>`.

use super::spec::{BasisChoice, ProtocolSpec};
use crate::estimation::{
    best_readout, default_candidates, default_phase_grid, find_optimal_basis, generator_spectrum, hellinger_sq, qfi_pure, OutcomeDistribution,
    PhaseReadout,
};
use crate::spin::{apply_steps, coherent_state, rotate, steps_unitary, BasisSpec, CollectiveOperator, DickeState};
use crate::{Error, Result};

/// A protocol with its measurement basis resolved and its phase readout
/// precomputed.
#[derive(Clone, Debug)]
pub struct CompiledProtocol {
    spec: ProtocolSpec,
    basis: BasisSpec,
    generator: CollectiveOperator,
    initial: DickeState,
    prepared: DickeState,
    readout: PhaseReadout,
}

/// Result of a single phase evaluation.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub final_state: DickeState,
    /// Noise-convolved distribution.
    pub distribution: OutcomeDistribution,
    pub clean_distribution: OutcomeDistribution,
    /// `∂φ` of the noise-convolved distribution.
    pub dp: Vec<f64>,
    pub d2p: Vec<f64>,
}

impl CompiledProtocol {
    pub fn new(spec: &ProtocolSpec, sigma: f64) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_particles;
        let basis = match spec.measurement_basis {
            BasisChoice::Axis(a) => BasisSpec::axis(n, a)?,
            BasisChoice::Auto => {
                let initial = coherent_state(n, spec.initial_axis, spec.initial_sign)?;
                let generator = CollectiveOperator::axis(n, spec.generator)?;
                find_optimal_basis(&initial, &spec.u1_steps, &spec.u2_steps, &generator, &default_candidates(n)?)?
                    .ok_or(Error::NoOptimalBasis)?
            }
            BasisChoice::Best => return Ok(best_readout(spec, sigma, &default_phase_grid())?.0),
        };
        Self::with_basis(spec, basis, sigma)
    }

    /// Compile with an explicit measurement basis, ignoring
    /// `spec.measurement_basis`.
    pub fn with_basis(spec: &ProtocolSpec, basis: BasisSpec, sigma: f64) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_particles;
        let initial = coherent_state(n, spec.initial_axis, spec.initial_sign)?;
        let prepared = apply_steps(&initial, &spec.u1_steps);
        let generator = CollectiveOperator::axis(n, spec.generator)?;
        let u2 = (!spec.u2_steps.is_empty()).then(|| steps_unitary(n, &spec.u2_steps));
        let readout = PhaseReadout::new(&prepared, &*generator_spectrum(&generator)?, u2.as_ref(), &basis, sigma)?;
        Ok(Self { spec: spec.clone(), basis, generator, initial, prepared, readout })
    }

    pub fn spec(&self) -> &ProtocolSpec {
        &self.spec
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn generator(&self) -> &CollectiveOperator {
        &self.generator
    }

    pub fn initial_state(&self) -> &DickeState {
        &self.initial
    }

    /// `U₁|ψ₀>`.
    pub fn prepared_state(&self) -> &DickeState {
        &self.prepared
    }

    pub fn readout(&self) -> &PhaseReadout {
        &self.readout
    }

    pub fn sigma(&self) -> f64 {
        self.readout.sigma()
    }

    /// `U₂ exp(-iφG) U₁ |ψ₀>`.
    pub fn final_state(&self, phi: f64) -> DickeState {
        apply_steps(&rotate(&self.prepared, self.spec.generator, phi), &self.spec.u2_steps)
    }

    pub fn evaluate(&self, phi: f64) -> Result<Evaluation> {
        let noisy = self.readout.noisy(phi);
        let outcomes = self.readout.outcomes().to_vec();
        Ok(Evaluation {
            final_state: self.final_state(phi),
            distribution: OutcomeDistribution::new(noisy.p, outcomes)?,
            clean_distribution: self.readout.clean_distribution(phi)?,
            dp: noisy.dp,
            d2p: noisy.d2p,
        })
    }

    pub fn cfi(&self, phi: f64) -> Result<f64> {
        self.readout.cfi(phi)
    }

    /// `4 Var(G)` on the prepared state.
    pub fn qfi(&self) -> Result<f64> {
        qfi_pure(&self.prepared, &self.generator)
    }

    /// Squared Hellinger distance between the noisy distributions at two phases.
    pub fn hellinger_sq(&self, phi1: f64, phi2: f64) -> Result<f64> {
        hellinger_sq(&self.readout.distribution(phi1)?, &self.readout.distribution(phi2)?)
    }
}

/// Evaluate a protocol at a single phase with detection noise `sigma`.
pub fn evaluate_protocol(spec: &ProtocolSpec, phi: f64, sigma: f64) -> Result<Evaluation> {
    CompiledProtocol::new(spec, sigma)?.evaluate(phi)
}
