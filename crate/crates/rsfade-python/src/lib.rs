//! Python bindings for the main rsfade types and operations.
//!
//! Build with `cargo build -p rsfade-python --release`, then import the
//! produced `librsfade_py.so` as the module `rsfade_py` (rename or symlink;
//! `python/smoke_test.py` does this automatically).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rsfade::{FractionalOrder, StudyAxis};

fn err(e: rsfade::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn order(gamma: f64) -> PyResult<FractionalOrder> {
    FractionalOrder::new(gamma).map_err(err)
}

/// Fourth-order correction weights (ϱ_{-1}, ϱ_0, ϱ_1) for one order.
#[pyfunction]
fn rho_coefficients(gamma: f64) -> PyResult<(f64, f64, f64)> {
    let [a, b, c] = rsfade::rho_coefficients(order(gamma)?);
    Ok((a, b, c))
}

/// Centered-difference weights ω_0..ω_K.
#[pyfunction]
fn omega_coefficients(gamma: f64, k_max: usize) -> PyResult<Vec<f64>> {
    Ok(rsfade::omega_coefficients(order(gamma)?, k_max)
        .map_err(err)?
        .omega_half()
        .to_vec())
}

/// Truncated generating-function sum approximating |2 sin(z/2)|^gamma.
#[pyfunction]
fn generating_function(gamma: f64, z: f64, k_max: usize) -> PyResult<f64> {
    rsfade::generating_function(order(gamma)?, z, k_max).map_err(err)
}

/// Riesz scale 1/(2 cos(pi gamma / 2)).
#[pyfunction]
fn kappa(gamma: f64) -> PyResult<f64> {
    Ok(rsfade::kappa(order(gamma)?))
}

#[pyfunction]
fn phi(gamma: f64, z: f64) -> PyResult<f64> {
    rsfade::phi(order(gamma)?, z).map_err(err)
}

#[pyfunction]
fn psi(gamma: f64, z: f64) -> PyResult<f64> {
    rsfade::psi(order(gamma)?, z).map_err(err)
}

/// Closed-form Riesz derivative of x²(1-x)² on [0,1].
#[pyfunction]
fn riesz_derivative_poly1(gamma: f64, x: f64) -> PyResult<f64> {
    rsfade::riesz_derivative_poly1(order(gamma)?, x).map_err(err)
}

/// Closed-form Riesz derivative of x(pi-x) on [0,pi].
#[pyfunction]
fn riesz_derivative_poly2(gamma: f64, x: f64) -> PyResult<f64> {
    rsfade::riesz_derivative_poly2(order(gamma)?, x).map_err(err)
}

/// Dense discrete Riesz operator matrix (row-major nested lists).
#[pyfunction]
fn assemble_riesz_matrix(gamma: f64, n: usize, h: f64) -> PyResult<Vec<Vec<f64>>> {
    let m = rsfade::assemble_riesz_matrix(order(gamma)?, n, h).map_err(err)?;
    Ok((0..n)
        .map(|i| (0..n).map(|j| m.matrix()[(i, j)]).collect())
        .collect())
}

/// SPD certificate (is_spd, min_eigenvalue) of the assembled Riesz matrix.
#[pyfunction]
fn certify_spd_riesz(gamma: f64, n: usize, h: f64) -> PyResult<(bool, f64)> {
    let m = rsfade::assemble_riesz_matrix(order(gamma)?, n, h).map_err(err)?;
    let cert = rsfade::certify_spd(m.matrix()).map_err(err)?;
    Ok((cert.is_spd, cert.min_eigenvalue))
}

/// Analytic eigenvalues of tridiag(c, b, a), ascending.
#[pyfunction]
fn tridiag_toeplitz_eigenvalues(a: f64, b: f64, c: f64, n: usize) -> PyResult<Vec<f64>> {
    let mut eigs: Vec<f64> = rsfade::tridiag_toeplitz_eigenpairs(a, b, c, n)
        .map_err(err)?
        .into_iter()
        .map(|p| p.0)
        .collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// Outcome of a single solve.
#[pyclass]
struct SolveResult {
    #[pyo3(get)]
    steps: usize,
    #[pyo3(get)]
    dt: f64,
    #[pyo3(get)]
    t_end: f64,
    #[pyo3(get)]
    max_abs: f64,
    #[pyo3(get)]
    max_error: Option<f64>,
    #[pyo3(get)]
    l2_error: Option<f64>,
}

/// Outcome of a refinement study.
#[pyclass]
struct StudyResult {
    #[pyo3(get)]
    steps: Vec<f64>,
    #[pyo3(get)]
    max_errors: Vec<f64>,
    #[pyo3(get)]
    l2_errors: Vec<f64>,
    #[pyo3(get)]
    rates: Vec<f64>,
    #[pyo3(get)]
    json: String,
}

/// A catalog problem instance.
#[pyclass]
struct Problem {
    inner: rsfade::ProblemSpec,
}

#[pymethods]
impl Problem {
    /// Look up a catalog problem ("example1" or "example2").
    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        Ok(Problem {
            inner: rsfade::problems::by_name(name).map_err(err)?,
        })
    }

    /// Load a problem description from a JSON file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Ok(Problem {
            inner: rsfade::problems::from_config_file(std::path::Path::new(path)).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn orders(&self) -> (f64, f64, f64, f64) {
        (
            self.inner.alpha.value(),
            self.inner.beta.value(),
            self.inner.mu.value(),
            self.inner.nu.value(),
        )
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.inner.t_end
    }

    fn exact(&self, x: f64, y: f64, t: f64) -> Option<f64> {
        self.inner.exact(x, y, t)
    }

    fn source(&self, x: f64, y: f64, t: f64) -> f64 {
        self.inner.source(x, y, t)
    }

    /// Solve with spacing h; dt is snapped to divide the horizon exactly.
    #[pyo3(signature = (h, dt, t_end=None))]
    fn solve(&self, h: f64, dt: f64, t_end: Option<f64>) -> PyResult<SolveResult> {
        let mut problem = self.inner.clone();
        if let Some(t) = t_end {
            problem.t_end = t;
        }
        let grid = problem.grid_with_h(h).map_err(err)?;
        let (steps, dt) = rsfade::snap_time_step(problem.t_end, dt).map_err(err)?;
        let field = rsfade::solve(&problem, &grid, dt, problem.t_end).map_err(err)?;
        let errors = match problem.exact_fn() {
            Some(exact) => Some(
                rsfade::error_norms(&field, |x, y, t| exact(x, y, t), &grid).map_err(err)?,
            ),
            None => None,
        };
        Ok(SolveResult {
            steps,
            dt,
            t_end: field.t(),
            max_abs: field.max_abs(),
            max_error: errors.map(|e| e.0),
            l2_error: errors.map(|e| e.1),
        })
    }

    /// Refinement study along "space" or "time".
    fn study(&self, axis: &str, levels: Vec<f64>, fixed_step: f64) -> PyResult<StudyResult> {
        let axis = match axis {
            "space" => StudyAxis::Space,
            "time" => StudyAxis::Time,
            other => return Err(PyValueError::new_err(format!("unknown axis {other:?}"))),
        };
        let report = rsfade::refinement_study(&self.inner, axis, &levels, fixed_step).map_err(err)?;
        Ok(StudyResult {
            steps: report.levels.iter().map(|l| l.step).collect(),
            max_errors: report.levels.iter().map(|l| l.max_error).collect(),
            l2_errors: report.levels.iter().map(|l| l.l2_error).collect(),
            rates: report.rates.clone(),
            json: report.to_json(),
        })
    }

    /// Spectral radius of the PR iteration for this problem at (h, dt).
    fn pr_spectral_radius(&self, h: f64, dt: f64) -> PyResult<f64> {
        let grid = self.inner.grid_with_h(h).map_err(err)?;
        let ops = rsfade::build_sweep_operators(&self.inner, &grid, dt).map_err(err)?;
        rsfade::pr_iteration_spectral_radius(&ops).map_err(err)
    }
}

#[pymodule]
fn rsfade_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(rho_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(omega_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(generating_function, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(riesz_derivative_poly1, m)?)?;
    m.add_function(wrap_pyfunction!(riesz_derivative_poly2, m)?)?;
    m.add_function(wrap_pyfunction!(assemble_riesz_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(certify_spd_riesz, m)?)?;
    m.add_function(wrap_pyfunction!(tridiag_toeplitz_eigenvalues, m)?)?;
    m.add_class::<Problem>()?;
    m.add_class::<SolveResult>()?;
    m.add_class::<StudyResult>()?;
    Ok(())
}
