//! Python bindings. Structured results (parameter sets, reports) cross the
//! boundary as plain dicts built from their JSON form.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use qmstat::scenario::{self, ScenarioConfig};
use qmstat::transform::measure;
use qmstat::{
    analytic_oscillator_report, analytic_scenario_report, check_uncertainty_relations,
    entropy_deltas, error_indicators, gaussian_kernel, oscillator_ground_state, parameter_set,
    positional_entropy, reading_of, DeviceParams, GaussianPacketParams, Kernel, KernelKind, Label,
};

create_exception!(pyqmstat, QmstatError, PyValueError);

fn err(e: qmstat::Error) -> PyErr {
    QmstatError::new_err(format!("[{}] {e}", e.check_name()))
}

fn units(hbar: f64, mass: f64) -> PyResult<qmstat::UnitSystem> {
    qmstat::UnitSystem::new(hbar, mass).map_err(err)
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Grid", module = "pyqmstat", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(qmstat::Grid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(x_min: f64, x_max: f64, n: usize) -> PyResult<Self> {
        qmstat::Grid::new(x_min, x_max, n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn centered(center: f64, half_width: f64, n: usize) -> PyResult<Self> {
        qmstat::Grid::centered(center, half_width, n).map(Self).map_err(err)
    }

    #[getter]
    fn x_min(&self) -> f64 {
        self.0.x_min()
    }

    #[getter]
    fn x_max(&self) -> f64 {
        self.0.x_max()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn points(&self) -> Vec<f64> {
        self.0.points()
    }

    fn integrate(&self, values: Vec<f64>) -> PyResult<f64> {
        if values.len() != self.0.len() {
            return Err(PyValueError::new_err("values must have one entry per grid point"));
        }
        Ok(self.0.integrate(&values))
    }

    fn __repr__(&self) -> String {
        format!("Grid(x_min={}, x_max={}, n={})", self.0.x_min(), self.0.x_max(), self.0.len())
    }
}

/// Density and current on a grid, labelled intrinsic ("I") or recorded ("R").
#[pyclass(name = "Reading", module = "pyqmstat", frozen)]
struct PyReading(qmstat::Reading);

#[pymethods]
impl PyReading {
    #[new]
    #[pyo3(signature = (grid, rho, current, label = "I"))]
    fn new(grid: &PyGrid, rho: Vec<f64>, current: Vec<f64>, label: &str) -> PyResult<Self> {
        let label = match label {
            "I" => Label::I,
            "R" => Label::R,
            other => return Err(PyValueError::new_err(format!("label must be 'I' or 'R', got {other:?}"))),
        };
        qmstat::Reading::from_values(grid.0, rho, current, label).map(Self).map_err(err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    #[getter]
    fn rho(&self) -> Vec<f64> {
        self.0.rho().values().to_vec()
    }

    #[getter]
    fn current(&self) -> Vec<f64> {
        self.0.current().values().to_vec()
    }

    #[getter]
    fn label(&self) -> &'static str {
        match self.0.label() {
            Label::I => "I",
            Label::R => "R",
        }
    }

    /// Observable parameters as a dict; `omega` adds the oscillator energy.
    #[pyo3(signature = (hbar = 1.0, mass = 1.0, omega = None))]
    fn parameters<'py>(&self, py: Python<'py>, hbar: f64, mass: f64, omega: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let p = parameter_set(&self.0, units(hbar, mass)?, omega).map_err(err)?;
        to_py(py, &p)
    }

    #[pyo3(signature = (hbar = 1.0, mass = 1.0))]
    fn uncertainty<'py>(&self, py: Python<'py>, hbar: f64, mass: f64) -> PyResult<Bound<'py, PyAny>> {
        let u = units(hbar, mass)?;
        let p = parameter_set(&self.0, u, None).map_err(err)?;
        to_py(py, &check_uncertainty_relations(&p, u))
    }

    fn entropy(&self) -> f64 {
        positional_entropy(self.0.rho())
    }

    fn __repr__(&self) -> String {
        format!("Reading(label={}, n={})", self.label(), self.0.grid().len())
    }
}

#[pyclass(name = "Kernel", module = "pyqmstat", frozen)]
struct PyKernel(Kernel);

#[pymethods]
impl PyKernel {
    /// Gaussian kernel of the given width; `kind` is "density" or "current".
    #[staticmethod]
    fn gaussian(grid: &PyGrid, width: f64, kind: &str) -> PyResult<Self> {
        let kind: KernelKind = kind.parse().map_err(err)?;
        gaussian_kernel(grid.0, width, kind).map(Self).map_err(err)
    }

    #[getter]
    fn width(&self) -> f64 {
        self.0.width()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().as_str()
    }

    fn apply(&self, values: Vec<f64>) -> PyResult<Vec<f64>> {
        if values.len() != self.0.grid().len() {
            return Err(PyValueError::new_err("values must have one entry per grid point"));
        }
        Ok(self.0.apply(&values))
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.0.entry(i, j)
    }
}

#[pyfunction]
#[pyo3(signature = (grid, x0, alpha, k, hbar = 1.0, mass = 1.0))]
fn gaussian_reading(grid: &PyGrid, x0: f64, alpha: f64, k: f64, hbar: f64, mass: f64) -> PyResult<PyReading> {
    let u = units(hbar, mass)?;
    let params = GaussianPacketParams::new(x0, alpha, k).map_err(err)?;
    let psi = qmstat::gaussian_packet(params, grid.0, u).map_err(err)?;
    reading_of(&psi, u).map(PyReading).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (grid, omega, hbar = 1.0, mass = 1.0))]
fn oscillator_reading(grid: &PyGrid, omega: f64, hbar: f64, mass: f64) -> PyResult<PyReading> {
    let u = units(hbar, mass)?;
    let psi = oscillator_ground_state(omega, grid.0, u).map_err(err)?;
    reading_of(&psi, u).map(PyReading).map_err(err)
}

/// Recorded reading from an intrinsic one and the two device kernels.
#[pyfunction(name = "measure")]
fn measure_reading(reading: &PyReading, density: &PyKernel, current: &PyKernel) -> PyResult<PyReading> {
    measure(&reading.0, &density.0, &current.0).map(PyReading).map_err(err)
}

/// Error indicators between an intrinsic and a recorded reading, with the
/// entropy deltas filled in.
#[pyfunction]
#[pyo3(signature = (intrinsic, recorded, hbar = 1.0, mass = 1.0))]
fn indicators<'py>(
    py: Python<'py>,
    intrinsic: &PyReading,
    recorded: &PyReading,
    hbar: f64,
    mass: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let u = units(hbar, mass)?;
    let p_i = parameter_set(&intrinsic.0, u, None).map_err(err)?;
    let p_r = parameter_set(&recorded.0, u, None).map_err(err)?;
    let (d_h, d_tau) = entropy_deltas(&intrinsic.0, &recorded.0).map_err(err)?;
    let report = error_indicators(&p_i, &p_r).map_err(err)?.with_entropy(d_h, d_tau);
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (x0, alpha, k, sigma, lambda_, hbar = 1.0, mass = 1.0))]
#[allow(clippy::too_many_arguments)]
fn analytic_packet<'py>(
    py: Python<'py>,
    x0: f64,
    alpha: f64,
    k: f64,
    sigma: f64,
    lambda_: f64,
    hbar: f64,
    mass: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let params = GaussianPacketParams::new(x0, alpha, k).map_err(err)?;
    let device = DeviceParams::new(sigma, lambda_).map_err(err)?;
    let report = analytic_scenario_report(params, device, units(hbar, mass)?).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (omega, sigma, hbar = 1.0, mass = 1.0))]
fn analytic_oscillator<'py>(py: Python<'py>, omega: f64, sigma: f64, hbar: f64, mass: f64) -> PyResult<Bound<'py, PyAny>> {
    let report = analytic_oscillator_report(omega, sigma, units(hbar, mass)?).map_err(err)?;
    to_py(py, &report)
}

fn parse_config(config: &str) -> PyResult<ScenarioConfig> {
    ScenarioConfig::from_json(config).map_err(err)
}

/// Runs a scenario given as a JSON string and returns the report dict.
#[pyfunction]
fn run_scenario<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let config = parse_config(config)?;
    let run = scenario::run_scenario(&config).map_err(err)?;
    to_py(py, &run.output(&config))
}

#[pyfunction]
fn verify<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let outcome = scenario::verify(&parse_config(config)?).map_err(err)?;
    to_py(py, &outcome)
}

#[pyfunction]
fn sample<'py>(py: Python<'py>, config: &str) -> PyResult<(Vec<f64>, Bound<'py, PyAny>)> {
    let config = parse_config(config)?;
    let run = scenario::sample(&config).map_err(err)?;
    let summary = to_py(py, &run.summary(&config))?;
    Ok((run.samples.draws.clone(), summary))
}

#[pymodule]
fn pyqmstat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QmstatError", m.py().get_type::<QmstatError>())?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyReading>()?;
    m.add_class::<PyKernel>()?;
    m.add_function(wrap_pyfunction!(gaussian_reading, m)?)?;
    m.add_function(wrap_pyfunction!(oscillator_reading, m)?)?;
    m.add_function(wrap_pyfunction!(measure_reading, m)?)?;
    m.add_function(wrap_pyfunction!(indicators, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_packet, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_oscillator, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    Ok(())
}
