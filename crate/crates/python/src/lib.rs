//! Python bindings for `geoqm`. Matrices cross the boundary as nested lists
//! of complex numbers, row-major.

use geoqm::kahler::{self, ChartPoint};
use geoqm::lie::{self, LieBasis};
use geoqm::phasespace::grid::oscillator_wigner as osc_wigner;
use geoqm::phasespace::{DiscreteWeylSystem, Ordering};
use geoqm::validation;
use geoqm::witness::{self, RhoTParams};
use geoqm::{CMat, DensityState, HermitianOperator, StateVector};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

type PyMat = Vec<Vec<Complex64>>;

fn err(e: geoqm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_mat(rows: PyMat) -> PyResult<CMat> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a non-empty square matrix"));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn from_mat(m: &CMat) -> PyMat {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn hermitian(rows: PyMat) -> PyResult<HermitianOperator> {
    HermitianOperator::new(to_mat(rows)?).map_err(err)
}

fn basis(algebra: &str) -> PyResult<LieBasis> {
    match algebra {
        "u2" => Ok(LieBasis::u2()),
        "u3" => Ok(LieBasis::u3()),
        "u4" => Ok(LieBasis::u4()),
        _ => Err(PyValueError::new_err(format!("unknown algebra {algebra:?} (u2|u3|u4)"))),
    }
}

/// Nonzero `(mu, nu, rho, value)` entries of `C` or `d` for u(2), u(3) or u(4).
#[pyfunction]
#[pyo3(signature = (algebra, symbol = "c", tol = 1e-12))]
fn structure_constants(algebra: &str, symbol: &str, tol: f64) -> PyResult<Vec<(usize, usize, usize, f64)>> {
    let sc = lie::structure_constants(&basis(algebra)?);
    match symbol {
        "c" => Ok(sc.c_table(tol)),
        "d" => Ok(sc.d_table(tol)),
        _ => Err(PyValueError::new_err(format!("unknown symbol {symbol:?} (c|d)"))),
    }
}

#[pyfunction]
fn concurrence(rho: PyMat) -> PyResult<f64> {
    let rho = DensityState::new(to_mat(rho)?).map_err(err)?;
    witness::concurrence(&rho).map_err(err)
}

#[pyfunction]
fn von_neumann_entropy(rho: PyMat) -> PyResult<f64> {
    let rho = DensityState::new(to_mat(rho)?).map_err(err)?;
    Ok(witness::von_neumann_entropy(&rho))
}

/// The two-qubit family `ρ_t(a, b, c, φ)`.
#[pyfunction]
#[pyo3(signature = (a, b, c, phi = 0.0))]
fn rho_t(a: f64, b: f64, c: f64, phi: f64) -> PyResult<PyMat> {
    Ok(from_mat(witness::rho_t(RhoTParams::new(a, b, c, phi)).map_err(err)?.matrix()))
}

/// Entropy, concurrence, their differentials and `‖dS ∧ dC‖` at an interior point.
#[pyfunction]
#[pyo3(signature = (a, b, c, phi = 0.0))]
fn witness_record<'py>(py: Python<'py>, a: f64, b: f64, c: f64, phi: f64) -> PyResult<Bound<'py, PyDict>> {
    let p = RhoTParams::new(a, b, c, phi);
    let r = witness::witness_differentials(p).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("entropy", r.entropy)?;
    d.set_item("concurrence", r.concurrence)?;
    d.set_item("d_entropy", r.d_entropy.to_vec())?;
    d.set_item("d_concurrence", r.d_concurrence.to_vec())?;
    d.set_item("wedge_norm", r.wedge_norm)?;
    d.set_item("bracket_sc", witness::poisson_bracket_sc(p).map_err(err)?)?;
    Ok(d)
}

/// Independence points `(a, b, c, wedge_norm)` on the slice `b = a`.
#[pyfunction]
fn independence_locus(a_values: Vec<f64>) -> Vec<(f64, f64, f64, f64)> {
    witness::independence_locus(&a_values).into_iter().map(|p| (p.a, p.b, p.c, p.wedge_norm)).collect()
}

#[pyfunction]
fn locus_closed_form(a: f64) -> Option<f64> {
    witness::locus_closed_form(a)
}

/// `f_A ⋆ f_B` at `ψ` from the metric and Poisson tensors.
#[pyfunction]
fn star_hilbert(a: PyMat, b: PyMat, psi: Vec<Complex64>) -> PyResult<Complex64> {
    let (a, b) = (hermitian(a)?, hermitian(b)?);
    if a.dim() != psi.len() || b.dim() != psi.len() {
        return Err(PyValueError::new_err("operator and state dimensions differ"));
    }
    let x = ChartPoint::from_state(&StateVector::from_slice(&psi));
    Ok(kahler::star_hilbert(&a, &b, &x))
}

/// `|ψ><ψ|`.
#[pyfunction]
fn momentum_map(psi: Vec<Complex64>) -> PyMat {
    from_mat(&lie::momentum_map(&StateVector::from_slice(&psi)))
}

fn weyl_system(n: usize, ordering: &str) -> PyResult<DiscreteWeylSystem> {
    if n < 2 {
        return Err(PyValueError::new_err("N must be at least 2"));
    }
    let o = match ordering {
        "symmetric" => Ordering::Symmetric,
        "shift_first" => Ordering::ShiftFirst,
        "clock_first" => Ordering::ClockFirst,
        _ => return Err(PyValueError::new_err(format!("unknown ordering {ordering:?}"))),
    };
    Ok(DiscreteWeylSystem::with_ordering(n, o))
}

/// Discrete Weyl operator `W(x, α)` on `C^N`.
#[pyfunction]
#[pyo3(signature = (n, x, alpha, ordering = "symmetric"))]
fn weyl_operator(n: usize, x: i64, alpha: i64, ordering: &str) -> PyResult<PyMat> {
    Ok(from_mat(&weyl_system(n, ordering)?.weyl(x, alpha)))
}

/// Symbol of `A` on `Z_N × Z_N`, row-major over `(x, α)`.
#[pyfunction]
#[pyo3(signature = (a, ordering = "symmetric"))]
fn weyl_symbol(a: PyMat, ordering: &str) -> PyResult<Vec<Complex64>> {
    let m = to_mat(a)?;
    Ok(weyl_system(m.nrows(), ordering)?.symbol(&m))
}

/// Operator whose symbol is `f` (inverse of `weyl_symbol`).
#[pyfunction]
#[pyo3(signature = (n, f, ordering = "symmetric"))]
fn weyl_quantize(n: usize, f: Vec<Complex64>, ordering: &str) -> PyResult<PyMat> {
    if f.len() != n * n {
        return Err(PyValueError::new_err(format!("expected {} samples, got {}", n * n, f.len())));
    }
    Ok(from_mat(&weyl_system(n, ordering)?.quantize(&f)))
}

/// Analytic Wigner function of oscillator level `n`.
#[pyfunction]
#[pyo3(signature = (n, q, p, hbar = 1.0))]
fn oscillator_wigner(n: usize, q: f64, p: f64, hbar: f64) -> f64 {
    osc_wigner(n, q, p, hbar)
}

/// Acceptance criteria as dicts (`id`, `name`, `passed`, `value`, `threshold`, `runtime_s`).
#[pyfunction]
#[pyo3(signature = (seed = validation::DEFAULT_SEED))]
fn run_acceptance<'py>(py: Python<'py>, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    validation::run_all(seed)
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("id", r.id)?;
            d.set_item("name", r.name)?;
            d.set_item("passed", r.passed)?;
            d.set_item("value", r.value)?;
            d.set_item("threshold", r.threshold)?;
            d.set_item("runtime_s", r.runtime_s)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "geoqm")]
fn geoqm_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(structure_constants, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(rho_t, m)?)?;
    m.add_function(wrap_pyfunction!(witness_record, m)?)?;
    m.add_function(wrap_pyfunction!(independence_locus, m)?)?;
    m.add_function(wrap_pyfunction!(locus_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(star_hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(momentum_map, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_operator, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_quantize, m)?)?;
    m.add_function(wrap_pyfunction!(oscillator_wigner, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}
