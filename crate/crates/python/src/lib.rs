//! Python bindings for `cutplane`.

use std::cell::RefCell;
use std::path::PathBuf;

use cutplane::jump::{JumpMode, JumpOptions};
use cutplane::{abel, io, jump, moments, reconstruct, series, specfun, verify};
use cutplane::{ComplexDegree, CoordKind, GridFunction, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(cutplane_py, CutplaneError, PyValueError, "Raised for every library error; the message starts with its E_* code.");

fn err(e: cutplane::Error) -> PyErr {
    CutplaneError::new_err(format!("[{}] {e}", e.code()))
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn coord(kind: &str) -> PyResult<CoordKind> {
    kind.parse().map_err(err)
}

fn mode(name: &str) -> PyResult<JumpMode> {
    name.parse().map_err(err)
}

/// Fourier-Legendre coefficients `a_0..a_N` with their decay parameters.
#[pyclass(name = "CoefficientSequence", module = "cutplane_py", frozen)]
struct PyCoefficients(moments::CoefficientSequence);

#[pymethods]
impl PyCoefficients {
    #[new]
    #[pyo3(signature = (a, p = 0, epsilon = 0.5))]
    fn new(a: Vec<f64>, p: u32, epsilon: f64) -> PyResult<Self> {
        moments::CoefficientSequence::new(a, p, epsilon).map(Self).map_err(err)
    }

    /// Exact coefficients from `(numerator, denominator)` pairs.
    #[staticmethod]
    #[pyo3(signature = (fractions, p = 0, epsilon = 0.5))]
    fn from_fractions(fractions: Vec<(i64, i64)>, p: u32, epsilon: f64) -> PyResult<Self> {
        if fractions.iter().any(|&(_, d)| d == 0) {
            return Err(err(cutplane::Error::InvalidInput("zero denominator".into())));
        }
        let exact = fractions
            .into_iter()
            .map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .collect();
        moments::CoefficientSequence::from_rationals(exact, p, epsilon).map(Self).map_err(err)
    }

    /// Reads an `n,a_n` CSV (fractions are kept exact).
    #[staticmethod]
    #[pyo3(signature = (path, p = 0, epsilon = 0.5))]
    fn read(path: PathBuf, p: u32, epsilon: f64) -> PyResult<Self> {
        io::read_coefficients(&path, p, epsilon).map(Self).map_err(err)
    }

    #[getter]
    fn a(&self) -> Vec<f64> {
        self.0.a().to_vec()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon()
    }

    #[getter]
    fn exact(&self) -> bool {
        self.0.exact().is_some()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("CoefficientSequence(n_max={}, p={}, epsilon={})", self.0.n_max(), self.0.p(), self.0.epsilon())
    }

    /// Hausdorff moment condition; returns the report as a dict.
    #[pyo3(signature = (bound = 10.0))]
    fn hausdorff_check<'py>(&self, py: Python<'py>, bound: f64) -> PyResult<Bound<'py, PyAny>> {
        let r = moments::hausdorff_check(&self.0, bound).map_err(err)?;
        to_py(py, &r)
    }

    /// `f(u) = (1/4π) Σ (2n+1) a_n P_n(cos u)` at each `u`.
    #[pyo3(signature = (u, n_trunc = None))]
    fn synthesize(&self, u: Vec<f64>, n_trunc: Option<usize>) -> PyResult<Vec<f64>> {
        let f = series::synthesize(&self.0, n_trunc).map_err(err)?;
        Ok(u.into_iter().map(f).collect())
    }

    /// Pollaczek coefficients `c_0..c_L`.
    #[pyo3(signature = (ell, n_trunc = None))]
    fn pollaczek(&self, ell: usize, n_trunc: Option<usize>) -> PyResult<Vec<C64>> {
        reconstruct::pollaczek_coefficients(&self.0, ell, n_trunc).map(|e| e.c).map_err(err)
    }

    /// Horocyclic jump `F̂(w)` from the truncated Pollaczek expansion.
    #[pyo3(signature = (w, ell, n_trunc = None))]
    fn jump_hat(&self, w: Vec<f64>, ell: usize, n_trunc: Option<usize>) -> PyResult<Vec<C64>> {
        let exp = reconstruct::pollaczek_coefficients(&self.0, ell, n_trunc).map_err(err)?;
        let g = reconstruct::expand_jump(&exp, w).map_err(err)?;
        Ok(g.grid().iter().zip(g.values()).map(|(&w, &c)| c * (-0.5 * w).exp()).collect())
    }

    /// Base jump `F(v)` reconstructed with `L` Pollaczek terms.
    #[pyo3(signature = (v, ell, n_trunc = None))]
    fn reconstruct_base(&self, v: Vec<f64>, ell: usize, n_trunc: Option<usize>) -> PyResult<Vec<C64>> {
        let r = reconstruct::reconstruct_base_jump(&self.0, v, ell, n_trunc).map_err(err)?;
        Ok(r.base.values().to_vec())
    }
}

/// Samples of `ã(σ + iν)` on a uniform `ν` grid.
#[pyclass(name = "LineSamples", module = "cutplane_py", frozen)]
struct PyLine(jump::LineSamples);

#[pymethods]
impl PyLine {
    #[new]
    fn new(sigma: f64, nu: Vec<f64>, values: Vec<C64>) -> PyResult<Self> {
        jump::LineSamples::new(sigma, nu, values).map(Self).map_err(err)
    }

    /// Samples a Python callable `λ -> ã(λ)` on `ν ∈ [-nu_max, nu_max]`.
    #[staticmethod]
    fn from_callable(sigma: f64, nu_max: f64, dnu: f64, f: Bound<'_, PyAny>) -> PyResult<Self> {
        let failure = RefCell::new(None);
        let line = jump::LineSamples::from_fn(sigma, nu_max, dnu, |l| {
            match f.call1((l,)).and_then(|r| r.extract::<C64>()) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    C64::new(f64::NAN, 0.0)
                }
            }
        });
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        line.map(Self).map_err(err)
    }

    /// Reads a line CSV and its sidecar.
    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        io::read_line(&path).map(Self).map_err(err)
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma()
    }

    #[getter]
    fn nu(&self) -> Vec<f64> {
        self.0.nu().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<C64> {
        self.0.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// `F̂(w)` by inverting the line; `mode` is `eq60` or `eq61`.
    #[pyo3(signature = (w, mode = "eq60", tolerance = 1e-6))]
    fn jump_hat(&self, w: Vec<f64>, mode: &str, tolerance: f64) -> PyResult<Vec<f64>> {
        let opts = JumpOptions { tolerance, ..JumpOptions::default() }.with_mode(self::mode(mode)?);
        w.iter().map(|&w| jump::jump_hat_from_atilde(&self.0, w, opts).map(|j| j.value).map_err(err)).collect()
    }

    /// Base jump `F(v)` from the line.
    #[pyo3(signature = (v, tolerance = 1e-6))]
    fn jump_base(&self, v: Vec<f64>, tolerance: f64) -> PyResult<Vec<f64>> {
        let opts = JumpOptions { tolerance, ..JumpOptions::default() };
        v.iter().map(|&v| jump::jump_base_from_atilde(&self.0, v, opts).map(|j| j.value).map_err(err)).collect()
    }
}

/// Complex values on a named coordinate grid (`u`, `t`, `v`, `w` or `x`).
#[pyclass(name = "GridFunction", module = "cutplane_py", frozen)]
struct PyGrid(GridFunction);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(kind: &str, grid: Vec<f64>, values: Vec<C64>) -> PyResult<Self> {
        GridFunction::new(coord(kind)?, grid, values).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (path, kind = None))]
    fn read(path: PathBuf, kind: Option<&str>) -> PyResult<Self> {
        let kind = kind.map(coord).transpose()?;
        io::read_grid(&path, kind).map(Self).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().as_str()
    }

    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.0.grid().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<C64> {
        self.0.values().to_vec()
    }

    fn __call__(&self, x: f64) -> PyResult<C64> {
        self.0.eval(x).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Abel transform of a base jump (`v` grid) at `w`.
    fn abel_forward(&self, w: f64) -> PyResult<f64> {
        abel::abel_forward_grid(&self.0, w).map_err(err)
    }

    /// Integral over the horocycle at `w` of a base jump (`v` grid).
    fn horocycle_radon(&self, w: f64) -> PyResult<f64> {
        abel::horocycle_radon_grid(&self.0, w).map_err(err)
    }

    /// Inverse Abel transform: `w` grid to `F(v)`, `t` grid to `f(u)`.
    fn abel_inverse(&self, point: f64) -> PyResult<C64> {
        abel::abel_inverse(&self.0, point).map(|r| r.value).map_err(err)
    }

    /// `ã(σ + iν)` of a horocyclic jump (`w` grid) or base jump (`v` grid).
    #[pyo3(signature = (sigma, nu = 0.0))]
    fn atilde(&self, sigma: f64, nu: f64) -> PyResult<C64> {
        let lambda = ComplexDegree::new(sigma, nu);
        match self.0.kind() {
            CoordKind::V => jump::atilde_from_base_jump(&self.0, lambda),
            _ => jump::atilde_from_jump(&self.0, lambda),
        }
        .map_err(err)
    }

    /// Legendre coefficients `a_0..a_n_max` of `f(u)` on a `u` grid.
    fn coefficients(&self, n_max: usize) -> PyResult<Vec<f64>> {
        series::coefficients_from_f(&self.0, n_max).map(|e| e.value).map_err(err)
    }
}

#[pyfunction]
fn legendre_p(n: usize, x: f64) -> PyResult<f64> {
    specfun::legendre_p(n, x).map_err(err)
}

/// `P_λ(cosh v)` for `λ = σ + iν`.
#[pyfunction]
#[pyo3(signature = (sigma, v, nu = 0.0))]
fn legendre_p_deg(sigma: f64, v: f64, nu: f64) -> PyResult<C64> {
    specfun::legendre_p_deg(ComplexDegree::new(sigma, nu), v).map_err(err)
}

/// `Q_λ(cosh v)` for `λ = σ + iν`.
#[pyfunction]
#[pyo3(signature = (sigma, v, nu = 0.0))]
fn legendre_q(sigma: f64, v: f64, nu: f64) -> PyResult<C64> {
    specfun::legendre_q(ComplexDegree::new(sigma, nu), v).map_err(err)
}

#[pyfunction]
fn psi_n(n: usize, u: f64) -> PyResult<f64> {
    specfun::psi_n(n, u).map_err(err)
}

#[pyfunction]
fn laguerre(ell: usize, x: f64) -> PyResult<f64> {
    specfun::laguerre(ell, x).map_err(err)
}

#[pyfunction]
fn pollaczek(ell: usize, x: C64) -> PyResult<C64> {
    specfun::pollaczek(ell, x).map_err(err)
}

#[pyfunction]
fn phi_basis(ell: usize, w: f64) -> PyResult<C64> {
    specfun::phi_basis(ell, w).map_err(err)
}

/// Runs one acceptance criterion, or all of them; returns dicts.
#[pyfunction]
#[pyo3(signature = (criterion = None))]
fn run_verify<'py>(py: Python<'py>, criterion: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    let results = py.detach(|| match criterion {
        Some(id) if verify::CRITERIA.contains(&id) => Ok(vec![verify::run_criterion(id)]),
        Some(id) => Err(cutplane::Error::InvalidInput(format!("no criterion {id}"))),
        None => Ok(verify::run_all()),
    });
    to_py(py, &results.map_err(err)?)
}

/// Runs the `cutplane` command line with `args` (without the program
/// name) and returns its exit code.
#[pyfunction]
fn cli(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("cutplane".to_string()).chain(args).collect();
    py.detach(|| cutplane::cli::main_with_args(argv))
}

#[pymodule]
fn cutplane_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CutplaneError", m.py().get_type::<CutplaneError>())?;
    m.add_class::<PyCoefficients>()?;
    m.add_class::<PyLine>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(legendre_p, m)?)?;
    m.add_function(wrap_pyfunction!(legendre_p_deg, m)?)?;
    m.add_function(wrap_pyfunction!(legendre_q, m)?)?;
    m.add_function(wrap_pyfunction!(psi_n, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre, m)?)?;
    m.add_function(wrap_pyfunction!(pollaczek, m)?)?;
    m.add_function(wrap_pyfunction!(phi_basis, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}
