//! Eigenbases of collective operators, parity, and measurement distributions.
//!
//! Eigendecompositions of `Jx`, `Jy`, `Jz` are computed once per `(N, axis)`
//! and shared read-only afterwards. `Jx` is real symmetric tridiagonal in the
//! Dicke basis; `Jy` reuses its eigenvectors through the phase map
//! `exp(-i π/2 Jz)`, which carries `Jx` onto `Jy`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::operator::{ladder_element, spin_projection, Axis, CollectiveOperator};
use super::state::DickeState;
use crate::estimation::OutcomeDistribution;
use crate::{C64, Error, Result};

/// Computed eigenvalues of collective spin components must sit this close to
/// the integer-spaced lattice `m_k`.
const LATTICE_TOL: f64 = 1e-8;

/// Eigenvalues ascending with the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Coordinates `V^dag v` of a vector in this eigenbasis.
    pub fn coordinates(&self, v: &DVector<C64>) -> DVector<C64> {
        self.eigenvectors.ad_mul(v)
    }

    /// `exp(-i t H) v` for the operator `H` this spectrum diagonalizes.
    pub fn evolve(&self, t: f64, v: &DVector<C64>) -> DVector<C64> {
        let mut c = self.coordinates(v);
        for (ck, &w) in c.iter_mut().zip(&self.eigenvalues) {
            *ck *= C64::from_polar(1.0, -t * w);
        }
        &self.eigenvectors * c
    }

    /// `exp(-i t H) M`, column by column.
    pub fn evolve_matrix(&self, t: f64, m: &DMatrix<C64>) -> DMatrix<C64> {
        let mut c = self.eigenvectors.ad_mul(m);
        for (k, &w) in self.eigenvalues.iter().enumerate() {
            let phase = C64::from_polar(1.0, -t * w);
            for z in c.row_mut(k).iter_mut() {
                *z *= phase;
            }
        }
        &self.eigenvectors * c
    }

    /// Diagonalize an arbitrary Hermitian matrix.
    pub fn of_hermitian(matrix: &DMatrix<C64>) -> Self {
        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = DMatrix::zeros(matrix.nrows(), matrix.ncols());
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            fix_phase(&mut col);
            eigenvectors.set_column(dst, &col);
        }
        Self { eigenvalues, eigenvectors }
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    fn require_nondegenerate(&self) -> Result<()> {
        let scale = self.eigenvalues.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        let tol = 1e-9 * scale;
        for w in self.eigenvalues.windows(2) {
            if w[1] - w[0] < tol {
                return Err(Error::DegenerateSpectrum { lower: w[0], upper: w[1], tol });
            }
        }
        Ok(())
    }
}

/// Rotate a vector so its largest-magnitude entry is real and positive.
fn fix_phase(v: &mut DVector<C64>) {
    let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()));
    if let Some(p) = pivot {
        if p.norm() > 0.0 {
            let phase = p.conj() / p.norm();
            for z in v.iter_mut() {
                *z *= phase;
            }
        }
    }
}

fn compute_axis_spectrum(n: usize, axis: Axis) -> Result<Spectrum> {
    let dim = n + 1;
    let lattice: Vec<f64> = (0..dim).map(|k| spin_projection(n, k)).collect();
    match axis {
        Axis::Z => Ok(Spectrum {
            eigenvalues: lattice,
            eigenvectors: DMatrix::identity(dim, dim),
        }),
        Axis::X | Axis::Y => {
            let mut jx = DMatrix::<f64>::zeros(dim, dim);
            for k in 0..n {
                let half = 0.5 * ladder_element(n, k);
                jx[(k + 1, k)] = half;
                jx[(k, k + 1)] = half;
            }
            let eig = SymmetricEigen::new(jx);
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let mut eigenvectors = DMatrix::<C64>::zeros(dim, dim);
            for (k, &src) in order.iter().enumerate() {
                let found = eig.eigenvalues[src];
                if (found - lattice[k]).abs() > LATTICE_TOL {
                    // Collective components are nondegenerate with spacing 1;
                    // anything else means the diagonalization went wrong.
                    return Err(Error::DegenerateSpectrum {
                        lower: found,
                        upper: lattice[k],
                        tol: LATTICE_TOL,
                    });
                }
                let mut col: DVector<C64> = eig.eigenvectors.column(src).map(|x| C64::new(x, 0.0));
                fix_phase(&mut col);
                if axis == Axis::Y {
                    for (row, z) in col.iter_mut().enumerate() {
                        *z *= C64::from_polar(1.0, -std::f64::consts::FRAC_PI_2 * lattice[row]);
                    }
                }
                eigenvectors.set_column(k, &col);
            }
            Ok(Spectrum { eigenvalues: lattice, eigenvectors })
        }
    }
}

type SpectrumCell = Arc<OnceLock<Result<Arc<Spectrum>>>>;

/// Shared eigendecomposition of `J_axis` for `N` particles.
pub fn axis_spectrum(n: usize, axis: Axis) -> Result<Arc<Spectrum>> {
    if n == 0 {
        return Err(Error::TooFewParticles { min: 1, found: 0 });
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, Axis), SpectrumCell>>> = OnceLock::new();
    let cell = {
        let mut map = CACHE.get_or_init(Default::default).lock().expect("spectrum cache poisoned");
        map.entry((n, axis)).or_default().clone()
    };
    cell.get_or_init(|| compute_axis_spectrum(n, axis).map(Arc::new)).clone()
}

/// An orthonormal measurement basis: the eigenvectors of `basis_operator`
/// ordered by ascending eigenvalue, with parity `(-1)^(k + parity_offset)`.
#[derive(Clone, Debug)]
pub struct BasisSpec {
    operator: CollectiveOperator,
    spectrum: Arc<Spectrum>,
    parity_offset: u8,
}

impl BasisSpec {
    /// Eigenbasis of `Jx`, `Jy` or `Jz`.
    pub fn axis(n: usize, axis: Axis) -> Result<Self> {
        Ok(Self {
            operator: CollectiveOperator::axis(n, axis)?,
            spectrum: axis_spectrum(n, axis)?,
            parity_offset: 0,
        })
    }

    /// Eigenbasis of an arbitrary observable. Fails on degenerate spectra,
    /// where the outcome ordering would be ambiguous.
    pub fn from_operator(operator: CollectiveOperator) -> Result<Self> {
        if let Some(axis) = operator.axis_label() {
            return Self::axis(operator.n_particles(), axis);
        }
        let spectrum = Spectrum::of_hermitian(operator.matrix());
        spectrum.require_nondegenerate()?;
        Ok(Self { operator, spectrum: Arc::new(spectrum), parity_offset: 0 })
    }

    pub fn with_parity_offset(mut self, offset: u8) -> Self {
        self.parity_offset = offset % 2;
        self
    }

    pub fn operator(&self) -> &CollectiveOperator {
        &self.operator
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn axis_label(&self) -> Option<Axis> {
        self.operator.axis_label()
    }

    pub fn label(&self) -> String {
        self.operator.label()
    }

    pub fn parity_offset(&self) -> u8 {
        self.parity_offset
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    /// Measurement outcome values `m_k` (the eigenvalues).
    pub fn outcomes(&self) -> &[f64] {
        self.spectrum.eigenvalues()
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        self.spectrum.eigenvectors()
    }

    /// `+1` or `-1`: the parity-operator eigenvalue on outcome `k`.
    pub fn parity_sign(&self, k: usize) -> f64 {
        if (k + self.parity_offset as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Amplitudes `<v_k|psi>`.
    pub fn coordinates(&self, state: &DickeState) -> Result<DVector<C64>> {
        state.check_dim(self.dim())?;
        Ok(self.spectrum.coordinates(state.amplitudes()))
    }

    /// The operator written in this basis, `V^dag G V`.
    pub fn represent(&self, op: &CollectiveOperator) -> Result<DMatrix<C64>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.dim() });
        }
        let v = self.eigenvectors();
        Ok(v.ad_mul(&(op.matrix() * v)))
    }
}

/// `P_k = |<v_k|psi>|^2` over the basis outcomes.
pub fn measurement_distribution(state: &DickeState, basis: &BasisSpec) -> Result<OutcomeDistribution> {
    let c = basis.coordinates(state)?;
    OutcomeDistribution::new(c.iter().map(|z| z.norm_sqr()).collect(), basis.outcomes().to_vec())
}

/// Result of [`parity_check`]. `p` is set only for parity eigenstates, with
/// `Π|ψ> = (-1)^p |ψ>`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ParityCheck {
    pub is_eigenstate: bool,
    pub p: Option<u8>,
}

/// Whether `Π|ψ> = ±|ψ>` within `tol`, with `Π = Σ_k (-1)^(k+offset) |v_k><v_k|`.
pub fn parity_check(state: &DickeState, basis: &BasisSpec, tol: f64) -> Result<ParityCheck> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param("tol", "must be positive"));
    }
    let c = basis.coordinates(state)?;
    let (mut even, mut odd) = (0.0, 0.0);
    for (k, z) in c.iter().enumerate() {
        if basis.parity_sign(k) > 0.0 {
            even += z.norm_sqr();
        } else {
            odd += z.norm_sqr();
        }
    }
    // ||Π ψ - s ψ|| = 2 sqrt(weight on the opposite-parity outcomes)
    let p = if 2.0 * odd.sqrt() <= tol {
        Some(0)
    } else if 2.0 * even.sqrt() <= tol {
        Some(1)
    } else {
        None
    };
    Ok(ParityCheck { is_eigenstate: p.is_some(), p })
}

/// Whether `Π G Π = -G` within `tol` entrywise, i.e. `G` only couples
/// outcomes of opposite parity.
pub fn generator_flips_parity(g: &CollectiveOperator, basis: &BasisSpec, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param("tol", "must be positive"));
    }
    let rep = basis.represent(g)?;
    for k in 0..rep.nrows() {
        for l in 0..rep.ncols() {
            if basis.parity_sign(k) == basis.parity_sign(l) && 2.0 * rep[(k, l)].norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
