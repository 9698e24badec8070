//! Randomized check that parity-respecting measurements saturate the QFI.
//!
//! Saturation cases draw a measurement basis, a parity eigenstate in it and a
//! generator that flips parity, and compare `F_C(0)` with `4 Var(G)`.
//! Falsification cases break one condition at a time (a generic input state,
//! or a generator that conserves parity) and record how far `F_C(0)` falls
//! short of `4 Var(G)`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::estimation::{generator_spectrum, qfi_pure, PhaseReadout};
use crate::spin::{spin_projection, Axis, BasisSpec, CollectiveOperator, DickeState};
use crate::{C64, Error, Result};

/// Relative tolerance on `|F_C(0) - 4Var(G)|` for saturation cases.
pub const SATURATION_TOL: f64 = 1e-8;
/// A falsification case shows a strict gap when `4Var(G) - F_C(0)` exceeds
/// this fraction of `4Var(G)`.
pub const GAP_FRACTION: f64 = 1e-3;
/// Required share of falsification cases with a strict gap.
pub const MIN_GAP_SHARE: f64 = 0.9;

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremConfig {
    pub seed: u64,
    pub cases: usize,
    pub falsification_cases: usize,
    pub min_n: usize,
    pub max_n: usize,
    /// Largest accepted relative deviation on saturating cases.
    pub saturation_tol: f64,
    /// Share of falsification cases that must show a strict gap.
    pub min_gap_share: f64,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            cases: 200,
            falsification_cases: 100,
            min_n: 1,
            max_n: 12,
            saturation_tol: SATURATION_TOL,
            min_gap_share: MIN_GAP_SHARE,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CaseKind {
    /// Both conditions hold.
    Saturating,
    /// The input is not a parity eigenstate.
    BrokenState,
    /// The generator conserves parity.
    BrokenGenerator,
}

impl CaseKind {
    pub const ALL: [CaseKind; 3] = [CaseKind::Saturating, CaseKind::BrokenState, CaseKind::BrokenGenerator];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Saturating => "saturating",
            CaseKind::BrokenState => "broken-state",
            CaseKind::BrokenGenerator => "broken-generator",
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub kind: CaseKind,
    /// Seed that regenerates this case via [`run_case`].
    pub seed: u64,
    pub n: usize,
    pub basis: String,
    pub generator: String,
    pub cfi: f64,
    pub four_var: f64,
    /// `(4Var(G) - F_C(0)) / 4Var(G)`.
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub config: TheoremConfig,
    pub cases: Vec<CaseReport>,
}

impl TheoremReport {
    fn of(&self, kind: CaseKind) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(move |c| c.kind == kind)
    }

    pub fn max_saturation_deviation(&self) -> f64 {
        self.of(CaseKind::Saturating).map(|c| c.relative_gap.abs()).fold(0.0, f64::max)
    }

    /// Share of `kind` cases whose gap exceeds [`GAP_FRACTION`].
    pub fn strict_gap_share(&self, kind: CaseKind) -> f64 {
        let (mut total, mut strict) = (0usize, 0usize);
        for c in self.of(kind) {
            total += 1;
            strict += (c.relative_gap > GAP_FRACTION) as usize;
        }
        if total == 0 {
            1.0
        } else {
            strict as f64 / total as f64
        }
    }

    /// Saturation cases outside tolerance, and any falsification case where
    /// the measurement exceeds the bound.
    pub fn violations(&self) -> Vec<&CaseReport> {
        self.cases
            .iter()
            .filter(|c| match c.kind {
                CaseKind::Saturating => c.relative_gap.abs() > self.config.saturation_tol,
                _ => c.relative_gap < -self.config.saturation_tol,
            })
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
            && self.strict_gap_share(CaseKind::BrokenState) >= self.config.min_gap_share
            && self.strict_gap_share(CaseKind::BrokenGenerator) >= self.config.min_gap_share
    }
}

/// Seed of case `index` derived from the suite seed.
pub fn case_seed(seed: u64, kind: CaseKind, index: usize) -> u64 {
    // splitmix64 finalizer over the combined key
    let mut z = seed
        ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (kind.code() as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn verify_theorem(config: &TheoremConfig) -> Result<TheoremReport> {
    if config.min_n == 0 || config.min_n > config.max_n {
        return Err(Error::param("n", format!("need 1 <= min_n <= max_n, got {}..={}", config.min_n, config.max_n)));
    }
    let mut cases = Vec::with_capacity(config.cases + 2 * config.falsification_cases);
    for i in 0..config.cases {
        cases.push(run_case(CaseKind::Saturating, case_seed(config.seed, CaseKind::Saturating, i), config)?);
    }
    for kind in [CaseKind::BrokenState, CaseKind::BrokenGenerator] {
        for i in 0..config.falsification_cases {
            cases.push(run_case(kind, case_seed(config.seed, kind, i), config)?);
        }
    }
    Ok(TheoremReport { config: config.clone(), cases })
}

/// Draw and evaluate a single case.
pub fn run_case(kind: CaseKind, seed: u64, config: &TheoremConfig) -> Result<CaseReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // conserving generators need two outcomes per parity class for a
    // nonzero variance
    let lo = if kind == CaseKind::BrokenGenerator { config.min_n.max(3) } else { config.min_n };
    let n = rng.random_range(lo..=config.max_n.max(lo));
    let dim = n + 1;

    let basis = random_basis(n, &mut rng)?;
    let v = basis.eigenvectors().clone();
    let sign = |k: usize| basis.parity_sign(k) > 0.0;

    let target = rng.random_bool(0.5);
    let coords: DVector<C64> = match kind {
        CaseKind::BrokenState => DVector::from_fn(dim, |_, _| gauss_c(&mut rng)),
        _ => DVector::from_fn(dim, |k, _| if sign(k) == target { gauss_c(&mut rng) } else { C64::new(0.0, 0.0) }),
    };
    let state = DickeState::normalized(&v * coords)?;

    let flip = kind != CaseKind::BrokenGenerator;
    let generator = match collective_generator(&basis, flip, &mut rng) {
        Some(g) => g,
        None => {
            let h = random_block_hermitian(dim, |k, l| (sign(k) != sign(l)) == flip, &mut rng);
            let g = &v * h * v.adjoint();
            CollectiveOperator::custom(hermitize(g))?
        }
    };

    let four_var = qfi_pure(&state, &generator)?;
    let readout = PhaseReadout::new(&state, &*generator_spectrum(&generator)?, None, &basis, 0.0)?;
    let cfi = readout.cfi(0.0)?;
    Ok(CaseReport {
        kind,
        seed,
        n,
        basis: basis_name(&basis),
        generator: generator.label(),
        cfi,
        four_var,
        relative_gap: (four_var - cfi) / four_var,
    })
}

fn basis_name(b: &BasisSpec) -> String {
    format!("{}+{}", b.label(), b.parity_offset())
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn gauss_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(gauss(rng), gauss(rng))
}

fn hermitize(m: DMatrix<C64>) -> DMatrix<C64> {
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// A collective axis basis half the time, otherwise the eigenbasis of a random
/// observable with lattice spectrum; random parity offset.
fn random_basis(n: usize, rng: &mut ChaCha8Rng) -> Result<BasisSpec> {
    let offset = rng.random_range(0..2u8);
    let basis = if rng.random_bool(0.5) {
        BasisSpec::axis(n, Axis::ALL[rng.random_range(0..3)])?
    } else {
        let dim = n + 1;
        let z = DMatrix::from_fn(dim, dim, |_, _| gauss_c(rng));
        let q = z.qr().q();
        let d = DMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                C64::new(spin_projection(n, r), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        BasisSpec::from_operator(CollectiveOperator::custom(hermitize(&q * d * q.adjoint()))?)?
    };
    Ok(basis.with_parity_offset(offset))
}

/// For axis bases, half the time use one of the two collective components
/// that flip the basis's parity. Conserving cases always use a random
/// block-diagonal generator, since the only conserving collective component
/// is diagonal in the basis.
fn collective_generator(basis: &BasisSpec, flip: bool, rng: &mut ChaCha8Rng) -> Option<CollectiveOperator> {
    let own = basis.axis_label()?;
    if !flip || !rng.random_bool(0.5) {
        return None;
    }
    let others: Vec<Axis> = Axis::ALL.into_iter().filter(|&a| a != own).collect();
    CollectiveOperator::axis(basis.operator().n_particles(), others[rng.random_range(0..2)]).ok()
}

/// Random Hermitian matrix with entries only where `allowed(k, l)`.
fn random_block_hermitian(dim: usize, allowed: impl Fn(usize, usize) -> bool, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let mut h = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        for l in k..dim {
            if !allowed(k, l) {
                continue;
            }
            let z = if k == l { C64::new(gauss(rng), 0.0) } else { gauss_c(rng) };
            h[(k, l)] = z;
            h[(l, k)] = z.conj();
        }
    }
    h
}
