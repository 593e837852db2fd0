//! Python bindings for the autoqec crate.
//!
//! Complex scalars cross the boundary as `[re, im]` pairs; matrices are
//! row-major nested lists of such pairs.

use autoqec::analysis::{average_fidelity, epsilon_error, scaling_fit, CardinalSet};
use autoqec::codes::{
    build_corrupted_structure, builtin_code, check_knill_laflamme, BuiltinCode, CodeSpace,
    ErrorSet,
};
use autoqec::lindblad::assemble_autoqec;
use autoqec::numerics::{CMatrix, CVector};
use autoqec::synthesis::{synthesize, EngineeredDissipation, PhiPolicy};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::str::FromStr;

fn to_py_err(e: autoqec::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector_to_py(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn matrix_to_py(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect()
}

fn parse_builtin(name: &str) -> PyResult<(CodeSpace, ErrorSet)> {
    let code = BuiltinCode::from_str(name).map_err(to_py_err)?;
    Ok(builtin_code(code))
}

fn parse_policy(policy: &str) -> PyResult<PhiPolicy> {
    match policy {
        "first_codeword" => Ok(PhiPolicy::FirstCodeword),
        "zero" => Ok(PhiPolicy::Zero),
        other => Err(PyValueError::new_err(format!(
            "unknown preventive-target policy `{other}` (expected `first_codeword` or `zero`)"
        ))),
    }
}

fn synthesize_for(name: &str, policy: &str) -> PyResult<(CodeSpace, ErrorSet, EngineeredDissipation)> {
    let (code, errors) = parse_builtin(name)?;
    let cs = build_corrupted_structure(&code, &errors, 1e-8).map_err(to_py_err)?;
    let eng = synthesize(&cs, &parse_policy(policy)?).map_err(to_py_err)?;
    Ok((code, errors, eng))
}

/// A logical code space with its intrinsic error set.
#[pyclass]
struct Code {
    code: CodeSpace,
    errors: ErrorSet,
    name: String,
}

#[pymethods]
impl Code {
    /// Load a builtin code by name, e.g. `"binomial_04_2_loss"`,
    /// `"repetition3_bitflip"`, or `"physical_qubit_loss"`.
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let (code, errors) = parse_builtin(name)?;
        Ok(Code {
            code,
            errors,
            name: name.to_string(),
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.name
    }

    /// Logical dimension (number of codewords).
    #[getter]
    fn dim(&self) -> usize {
        self.code.dim()
    }

    /// Hilbert-space dimension the code lives in.
    #[getter]
    fn ambient_dim(&self) -> usize {
        self.code.ambient_dim()
    }

    fn codewords(&self) -> Vec<Vec<[f64; 2]>> {
        self.code.codewords().iter().map(vector_to_py).collect()
    }

    fn error_jumps(&self) -> Vec<Vec<Vec<[f64; 2]>>> {
        self.errors.jumps().iter().map(matrix_to_py).collect()
    }

    /// Recoverability check against the intrinsic error set. Returns a dict
    /// with `satisfied`, `residual`, and the coefficient matrix `c`.
    fn knill_laflamme<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = check_knill_laflamme(&self.code, &self.errors, 1e-8).map_err(to_py_err)?;
        let out = PyDict::new(py);
        out.set_item("satisfied", report.satisfied)?;
        out.set_item("residual", report.residual)?;
        out.set_item("c", matrix_to_py(&report.c))?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Code(name={:?}, dim={}, ambient_dim={})",
            self.name,
            self.code.dim(),
            self.code.ambient_dim()
        )
    }
}

/// Synthesize the engineered jump operators for a builtin code. Returns a
/// dict with `corrective` and `preventive` lists of matrices.
#[pyfunction]
#[pyo3(signature = (name, phi_policy = "first_codeword"))]
fn synthesize_jumps<'py>(
    py: Python<'py>,
    name: &str,
    phi_policy: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let (_, _, eng) = synthesize_for(name, phi_policy)?;
    let out = PyDict::new(py);
    out.set_item(
        "corrective",
        eng.corrective.iter().map(matrix_to_py).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "preventive",
        eng.preventive.iter().map(matrix_to_py).collect::<Vec<_>>(),
    )?;
    Ok(out)
}

/// Average fidelity over the six cardinal logical states, at each time in
/// `times`, under intrinsic noise of rate `gamma` plus engineered
/// dissipation at rate `strength * gamma`.
#[pyfunction]
#[pyo3(signature = (name, strength, times, gamma = 1.0, phi_policy = "first_codeword"))]
fn fidelity_curve(
    name: &str,
    strength: f64,
    times: Vec<f64>,
    gamma: f64,
    phi_policy: &str,
) -> PyResult<Vec<f64>> {
    let (code, errors, eng) = synthesize_for(name, phi_policy)?;
    let lind = assemble_autoqec(&errors, &eng, strength, gamma, None, false).map_err(to_py_err)?;
    average_fidelity(&lind, &code, &times).map_err(to_py_err)
}

/// Worst-case code-space error at time `t`: largest spectral-norm deviation
/// of an evolved cardinal state from its initial value.
#[pyfunction]
#[pyo3(signature = (name, strength, t, gamma = 1.0, phi_policy = "first_codeword"))]
fn worst_case_error(
    name: &str,
    strength: f64,
    t: f64,
    gamma: f64,
    phi_policy: &str,
) -> PyResult<f64> {
    let (code, errors, eng) = synthesize_for(name, phi_policy)?;
    let lind = assemble_autoqec(&errors, &eng, strength, gamma, None, false).map_err(to_py_err)?;
    let cardinal = CardinalSet::new(&code).map_err(to_py_err)?;
    let mut worst = 0.0f64;
    for psi in cardinal.states() {
        let rho = CMatrix::outer(psi, psi);
        worst = worst.max(epsilon_error(&lind, &code, &rho, t).map_err(to_py_err)?);
    }
    Ok(worst)
}

/// Fit the power law of worst-case error versus dissipation strength.
/// Returns a dict with `slope`, `intercept`, `fit_residual`, `m_values`,
/// and `epsilons`.
#[pyfunction]
#[pyo3(signature = (name, m_values, t = 1.0, gamma = 1.0, phi_policy = "first_codeword"))]
fn strength_scaling<'py>(
    py: Python<'py>,
    name: &str,
    m_values: Vec<f64>,
    t: f64,
    gamma: f64,
    phi_policy: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let (code, errors, eng) = synthesize_for(name, phi_policy)?;
    let report = scaling_fit(&code, &errors, &eng, t, &m_values, gamma).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("slope", report.slope)?;
    out.set_item("intercept", report.intercept)?;
    out.set_item("fit_residual", report.fit_residual)?;
    out.set_item("m_values", report.m_values)?;
    out.set_item("epsilons", report.epsilons)?;
    Ok(out)
}

#[pymodule]
fn autoqec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Code>()?;
    m.add_function(wrap_pyfunction!(synthesize_jumps, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_curve, m)?)?;
    m.add_function(wrap_pyfunction!(worst_case_error, m)?)?;
    m.add_function(wrap_pyfunction!(strength_scaling, m)?)?;
    Ok(())
}
