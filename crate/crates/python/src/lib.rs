//! Python bindings: states are lists of complex Dicke amplitudes, indexed
//! by `k = m + N/2`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spinlab::estimation::{self, default_phase_grid, OutcomeDistribution};
use spinlab::protocols::{
    build_ghz_protocol, build_protocol, BasisChoice, CompiledProtocol, Family, FixedTimeScan, ProtocolSpec,
};
use spinlab::spin::{self, Axis, CollectiveOperator, DickeState, Sign};
use spinlab::verify::{self, TheoremConfig};

fn err(e: spinlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn axis(s: &str) -> PyResult<Axis> {
    s.parse().map_err(err)
}

fn state(amps: Vec<Complex64>) -> PyResult<DickeState> {
    DickeState::from_amplitudes(amps.into()).map_err(err)
}

fn amps(s: &DickeState) -> Vec<Complex64> {
    s.amplitudes().iter().copied().collect()
}

fn lattice(p: Vec<f64>) -> PyResult<OutcomeDistribution> {
    OutcomeDistribution::on_lattice(p).map_err(err)
}

fn grid(phases: Option<Vec<f64>>) -> Vec<f64> {
    phases.unwrap_or_else(default_phase_grid)
}

/// Spin coherent state of `n` particles polarized along `±axis`.
#[pyfunction]
#[pyo3(signature = (n, axis = "x", sign = "+"))]
fn coherent_state(n: usize, axis: &str, sign: &str) -> PyResult<Vec<Complex64>> {
    let sign = match sign {
        "+" | "plus" => Sign::Plus,
        "-" | "minus" => Sign::Minus,
        other => return Err(PyValueError::new_err(format!("sign must be '+' or '-', got {other:?}"))),
    };
    Ok(amps(&spin::coherent_state(n, self::axis(axis)?, sign).map_err(err)?))
}

/// `exp(-i angle J_axis) |psi>`.
#[pyfunction]
fn rotate(state: Vec<Complex64>, axis: &str, angle: f64) -> PyResult<Vec<Complex64>> {
    Ok(amps(&spin::rotate(&self::state(state)?, self::axis(axis)?, angle)))
}

/// One-axis twisting `exp(-i chi_t Jz^2) |psi>`.
#[pyfunction]
fn oat_phase(state: Vec<Complex64>, chi_t: f64) -> PyResult<Vec<Complex64>> {
    Ok(amps(&spin::oat_phase(&self::state(state)?, chi_t)))
}

#[pyfunction]
fn ghz_state(n: usize) -> PyResult<Vec<Complex64>> {
    Ok(amps(&spinlab::protocols::ghz_state(n).map_err(err)?))
}

/// Rotation angle about x that minimizes the twisted state's variance.
#[pyfunction]
fn squeezing_angle(n: usize, chi_t: f64) -> PyResult<f64> {
    spinlab::protocols::squeezing_angle(n, chi_t).map_err(err)
}

/// Pure-state quantum Fisher information `4 Var(J_generator)`.
#[pyfunction]
#[pyo3(signature = (state, generator = "y"))]
fn qfi(state: Vec<Complex64>, generator: &str) -> PyResult<f64> {
    let s = self::state(state)?;
    let g = CollectiveOperator::axis(s.n_particles(), axis(generator)?).map_err(err)?;
    estimation::qfi_pure(&s, &g).map_err(err)
}

/// Gaussian detection noise applied to a distribution over `m = -N/2..N/2`.
#[pyfunction]
fn convolve_noise(p: Vec<f64>, sigma: f64) -> PyResult<Vec<f64>> {
    Ok(estimation::convolve_noise(&lattice(p)?, sigma).map_err(err)?.probabilities().to_vec())
}

/// Squared Hellinger distance between two lattice distributions.
#[pyfunction]
fn hellinger_sq(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    estimation::hellinger_sq(&lattice(p)?, &lattice(q)?).map_err(err)
}

/// Best split of a fixed twisting budget between preparation and readout.
#[pyfunction]
#[pyo3(signature = (n, total, sigma, family = "asymmetric", t1_grid = None, initial = "x"))]
fn fixed_t_scan<'py>(
    py: Python<'py>,
    n: usize,
    total: f64,
    sigma: f64,
    family: &str,
    t1_grid: Option<Vec<f64>>,
    initial: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let family: Family = family.parse().map_err(err)?;
    let mut scan = FixedTimeScan::new(n, total, sigma, family).initial(axis(initial)?).basis(BasisChoice::Best);
    if let Some(g) = t1_grid {
        scan = scan.t1_grid(g);
    }
    let r = py.detach(|| scan.run()).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t1_grid", &r.t1_grid)?;
    d.set_item("max_cfi", &r.max_cfi)?;
    d.set_item("best_t1", r.best_t1)?;
    d.set_item("best_max_cfi", r.best_max_cfi)?;
    d.set_item("no_readout", r.no_readout())?;
    d.set_item("even_split", r.even_split())?;
    Ok(d)
}

/// Randomized check that parity-symmetric states and parity-flipping
/// generators give `F_C(0) = 4 Var(G)`.
#[pyfunction]
#[pyo3(signature = (seed = 0, cases = 200, falsification_cases = 100, min_n = 1, max_n = 12))]
fn verify_theorem<'py>(
    py: Python<'py>,
    seed: u64,
    cases: usize,
    falsification_cases: usize,
    min_n: usize,
    max_n: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let config = TheoremConfig { seed, cases, falsification_cases, min_n, max_n, ..Default::default() };
    let report = py.detach(|| verify::verify_theorem(&config)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("passed", report.passed())?;
    d.set_item("max_saturation_deviation", report.max_saturation_deviation())?;
    for kind in [verify::CaseKind::BrokenState, verify::CaseKind::BrokenGenerator] {
        d.set_item(format!("{}_gap_share", kind.name().replace('-', "_")), report.strict_gap_share(kind))?;
    }
    d.set_item("violation_seeds", report.violations().iter().map(|c| c.seed).collect::<Vec<_>>())?;
    Ok(d)
}

/// A compiled interferometer with an interaction-based readout.
#[pyclass(frozen)]
struct Protocol {
    spec: ProtocolSpec,
    compiled: CompiledProtocol,
}

#[pymethods]
impl Protocol {
    /// `kind` is one of trivial, echo, pseudo-echo, asymmetric,
    /// pseudo-forward, ghz-readout. With `ghz=True` the twisting strength
    /// is fixed to prepare a cat state.
    #[new]
    #[pyo3(signature = (kind, n, chi_t = 0.0, chi_t2 = None, sigma = 0.0, ghz = false))]
    fn new(py: Python<'_>, kind: &str, n: usize, chi_t: f64, chi_t2: Option<f64>, sigma: f64, ghz: bool) -> PyResult<Self> {
        let kind = kind.parse().map_err(err)?;
        let spec = if ghz { build_ghz_protocol(kind, n) } else { build_protocol(kind, n, chi_t, chi_t2) }.map_err(err)?;
        let spec = ProtocolSpec { measurement_basis: BasisChoice::Best, ..spec };
        let compiled = py.detach(|| CompiledProtocol::new(&spec, sigma)).map_err(err)?;
        Ok(Self { spec, compiled })
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.n_particles
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.compiled.sigma()
    }

    /// Outcome probabilities and their phase derivatives at `phi`.
    fn evaluate<'py>(&self, py: Python<'py>, phi: f64) -> PyResult<Bound<'py, PyDict>> {
        let e = self.compiled.evaluate(phi).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("p", e.distribution.probabilities())?;
        d.set_item("p_clean", e.clean_distribution.probabilities())?;
        d.set_item("dp", &e.dp)?;
        d.set_item("d2p", &e.d2p)?;
        d.set_item("state", amps(&e.final_state))?;
        Ok(d)
    }

    fn cfi(&self, phi: f64) -> PyResult<f64> {
        self.compiled.cfi(phi).map_err(err)
    }

    fn qfi(&self) -> PyResult<f64> {
        self.compiled.qfi().map_err(err)
    }

    /// `(max F_C, phase)` over `phases` (a closed grid on `[-pi/2, pi/2]` by default).
    #[pyo3(signature = (phases = None))]
    fn max_cfi(&self, py: Python<'_>, phases: Option<Vec<f64>>) -> PyResult<(f64, f64)> {
        let g = grid(phases);
        let c = py.detach(|| estimation::cfi_curve(self.compiled.readout(), &g)).map_err(err)?;
        Ok((c.best_value, c.best_phase))
    }

    /// `(min Δφ², phase)` for mean-value estimation from `J_signal`.
    #[pyo3(signature = (signal = "z", phases = None))]
    fn moment_sensitivity(&self, py: Python<'_>, signal: &str, phases: Option<Vec<f64>>) -> PyResult<(f64, f64)> {
        let (signal, g) = (axis(signal)?, grid(phases));
        let sigma = self.compiled.sigma();
        let c = py.detach(|| estimation::moment_sensitivity(&self.spec, signal, &g, sigma)).map_err(err)?;
        Ok((c.best_value, c.best_phase))
    }

    fn hellinger_sq(&self, phi1: f64, phi2: f64) -> PyResult<f64> {
        self.compiled.hellinger_sq(phi1, phi2).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Protocol(n={}, sigma={}, basis={})", self.spec.n_particles, self.compiled.sigma(), self.spec.measurement_basis)
    }
}

#[pymodule]
fn spinlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Protocol>()?;
    m.add_function(wrap_pyfunction!(coherent_state, m)?)?;
    m.add_function(wrap_pyfunction!(rotate, m)?)?;
    m.add_function(wrap_pyfunction!(oat_phase, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_state, m)?)?;
    m.add_function(wrap_pyfunction!(squeezing_angle, m)?)?;
    m.add_function(wrap_pyfunction!(qfi, m)?)?;
    m.add_function(wrap_pyfunction!(convolve_noise, m)?)?;
    m.add_function(wrap_pyfunction!(hellinger_sq, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_t_scan, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    Ok(())
}
