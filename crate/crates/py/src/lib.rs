//! Python bindings: the state constructors, negativity and Fisher-information
//! pipelines, and the closed forms, exposed as a thin extension module.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use entfi::{
    averaged_qubit_fisher, channel_matrix, closed_form_en, closed_form_fisher, en_from_fisher,
    f_factor, fisher_information, flipped_fisher, lambda_threshold_bisect, lambda_threshold_pure,
    ln_qubit, log_negativity, log_negativity_mixture, log_negativity_pure, mutual_information,
    BeamSplitterSpec, BellSource, DerivativeConfig, EnKind, IntegratorConfig, TruncationSpec,
};

fn to_py_err(e: entfi::Error) -> PyErr {
    match e {
        entfi::Error::Domain(m) => PyValueError::new_err(m),
        entfi::Error::Numeric(m) => PyRuntimeError::new_err(m),
    }
}

fn parse_kind(kind: &str) -> PyResult<EnKind> {
    match kind {
        "sq" => Ok(EnKind::Sq),
        "ng" | "ng-pure" => Ok(EnKind::Ng),
        other => Err(PyValueError::new_err(format!(
            "unknown kind {other:?}: expected \"sq\" or \"ng\""
        ))),
    }
}

fn trunc_for(lambda: f64, tail_tol: f64, n_max: Option<usize>) -> PyResult<TruncationSpec> {
    match n_max {
        Some(n) => TruncationSpec::new(n, tail_tol).map_err(to_py_err),
        None => TruncationSpec::auto_squeezed(lambda, tail_tol).map_err(to_py_err),
    }
}

fn integrator(quad_points: usize, half_width: Option<f64>) -> IntegratorConfig {
    IntegratorConfig {
        points: quad_points,
        half_width,
    }
}

fn derivative(deriv_step: f64) -> DerivativeConfig {
    DerivativeConfig {
        step: deriv_step,
        richardson_levels: 2,
    }
}

/// Pure state Σ_n c_n |n,n⟩ in the truncated Fock basis.
#[pyclass(name = "SchmidtState")]
struct PySchmidtState {
    inner: entfi::SchmidtDiagonalState,
}

#[pymethods]
impl PySchmidtState {
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }

    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    /// E_N = 2 log2(Σ c_n), the pure-state shortcut.
    fn log_negativity(&self) -> f64 {
        log_negativity_pure(&self.inner)
    }

    /// E_N via partial transpose and trace norm of the dense density matrix.
    fn log_negativity_dense(&self) -> PyResult<f64> {
        log_negativity(&self.inner.to_density_matrix())
            .map(|r| r.value)
            .map_err(to_py_err)
    }

    #[pyo3(signature = (deriv_step=1e-3, quad_points=160, half_width=None))]
    fn fisher_information(
        &self,
        deriv_step: f64,
        quad_points: usize,
        half_width: Option<f64>,
    ) -> PyResult<f64> {
        fisher_information(
            BellSource::Schmidt(&self.inner),
            &derivative(deriv_step),
            &integrator(quad_points, half_width),
        )
        .map_err(to_py_err)
    }

    /// Bell outcome density P(x, p | x_s, p_s).
    fn bell_density(&self, x_s: f64, p_s: f64, x: f64, p: f64) -> f64 {
        entfi::bell_density_schmidt(&self.inner, x_s, p_s, x, p)
    }

    #[pyo3(signature = (beta, quad_points=160, half_width=None))]
    fn channel_matrix(
        &self,
        beta: f64,
        quad_points: usize,
        half_width: Option<f64>,
    ) -> PyResult<[[f64; 4]; 4]> {
        channel_matrix(
            BellSource::Schmidt(&self.inner),
            beta,
            &integrator(quad_points, half_width),
        )
        .map(|cm| *cm.probs())
        .map_err(to_py_err)
    }

    #[pyo3(signature = (beta, quad_points=160, half_width=None))]
    fn mutual_information(
        &self,
        beta: f64,
        quad_points: usize,
        half_width: Option<f64>,
    ) -> PyResult<f64> {
        channel_matrix(
            BellSource::Schmidt(&self.inner),
            beta,
            &integrator(quad_points, half_width),
        )
        .map(|cm| mutual_information(&cm))
        .map_err(to_py_err)
    }
}

/// On/off-heralded mixed state: incoherent sum of offset kets.
#[pyclass(name = "FockMixture")]
struct PyFockMixture {
    inner: entfi::TwoModeFockMixture,
}

#[pymethods]
impl PyFockMixture {
    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn n_components(&self) -> usize {
        self.inner.components().len()
    }

    /// E_N from the blockwise partial-transpose spectrum.
    fn log_negativity(&self) -> PyResult<f64> {
        log_negativity_mixture(&self.inner)
            .map(|r| r.value)
            .map_err(to_py_err)
    }

    #[pyo3(signature = (deriv_step=1e-3, quad_points=160, half_width=None))]
    fn fisher_information(
        &self,
        deriv_step: f64,
        quad_points: usize,
        half_width: Option<f64>,
    ) -> PyResult<f64> {
        fisher_information(
            BellSource::Mixture(&self.inner),
            &derivative(deriv_step),
            &integrator(quad_points, half_width),
        )
        .map_err(to_py_err)
    }

    fn bell_density(&self, x_s: f64, p_s: f64, x: f64, p: f64) -> f64 {
        entfi::bell_density_mixture(&self.inner, x_s, p_s, x, p)
    }
}

/// Entangled photon-number qubit (|c0|, phase, mixedness t).
#[pyclass(name = "QubitState")]
struct PyQubitState {
    inner: entfi::QubitEntangledState,
}

#[pymethods]
impl PyQubitState {
    #[new]
    #[pyo3(signature = (c0_abs, phase=0.0, mixedness=1.0))]
    fn new(c0_abs: f64, phase: f64, mixedness: f64) -> PyResult<Self> {
        Ok(PyQubitState {
            inner: entfi::QubitEntangledState::new(c0_abs, phase, mixedness)
                .map_err(to_py_err)?,
        })
    }

    /// t·|c0|·|c1|.
    fn product(&self) -> f64 {
        self.inner.coherence_product()
    }

    /// Closed form log2(1 + 2 t |c0||c1|).
    fn log_negativity(&self) -> f64 {
        ln_qubit(&self.inner)
    }

    fn log_negativity_dense(&self) -> PyResult<f64> {
        log_negativity(&entfi::make_qubit_state(&self.inner, false))
            .map(|r| r.value)
            .map_err(to_py_err)
    }

    #[pyo3(signature = (phi=None, deriv_step=1e-3, quad_points=160, half_width=None))]
    fn fisher_information(
        &self,
        phi: Option<f64>,
        deriv_step: f64,
        quad_points: usize,
        half_width: Option<f64>,
    ) -> PyResult<f64> {
        entfi::qubit_fisher(
            &self.inner,
            phi,
            &derivative(deriv_step),
            &integrator(quad_points, half_width),
        )
        .map_err(to_py_err)
    }

    /// φ-averaged Fisher information; returns (j_avg, product).
    #[pyo3(signature = (n_phi=32, deriv_step=1e-3, quad_points=160, half_width=None))]
    fn averaged_fisher(
        &self,
        n_phi: usize,
        deriv_step: f64,
        quad_points: usize,
        half_width: Option<f64>,
    ) -> PyResult<(f64, f64)> {
        averaged_qubit_fisher(
            &self.inner,
            n_phi,
            &derivative(deriv_step),
            &integrator(quad_points, half_width),
        )
        .map(|r| (r.j_avg, r.product))
        .map_err(to_py_err)
    }

    /// φ-averaged Fisher information of the flip-decoded pipeline.
    #[pyo3(signature = (n_phi=32, deriv_step=1e-3, quad_points=160, half_width=None))]
    fn flipped_fisher(
        &self,
        n_phi: usize,
        deriv_step: f64,
        quad_points: usize,
        half_width: Option<f64>,
    ) -> PyResult<f64> {
        flipped_fisher(
            &self.inner,
            n_phi,
            &derivative(deriv_step),
            &integrator(quad_points, half_width),
        )
        .map_err(to_py_err)
    }
}

#[pyfunction]
#[pyo3(signature = (lam, tail_tol=1e-12, n_max=None))]
fn make_squeezed(lam: f64, tail_tol: f64, n_max: Option<usize>) -> PyResult<PySchmidtState> {
    let trunc = trunc_for(lam, tail_tol, n_max)?;
    Ok(PySchmidtState {
        inner: entfi::make_squeezed(lam, trunc).map_err(to_py_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (lam, transmittance, tail_tol=1e-12, n_max=None))]
fn make_photon_subtracted_pure(
    lam: f64,
    transmittance: f64,
    tail_tol: f64,
    n_max: Option<usize>,
) -> PyResult<(PySchmidtState, f64)> {
    let bs = BeamSplitterSpec::new(transmittance).map_err(to_py_err)?;
    let trunc = match n_max {
        Some(n) => TruncationSpec::new(n, tail_tol).map_err(to_py_err)?,
        None => TruncationSpec::auto_subtracted(lam, transmittance, tail_tol).map_err(to_py_err)?,
    };
    let (state, p_det) =
        entfi::make_photon_subtracted_pure(lam, &bs, trunc).map_err(to_py_err)?;
    Ok((PySchmidtState { inner: state }, p_det))
}

#[pyfunction]
#[pyo3(signature = (lam, transmittance, tail_tol=1e-12, component_tol=1e-10, n_max=None))]
fn make_photon_subtracted_mixed(
    lam: f64,
    transmittance: f64,
    tail_tol: f64,
    component_tol: f64,
    n_max: Option<usize>,
) -> PyResult<PyFockMixture> {
    let bs = BeamSplitterSpec::new(transmittance).map_err(to_py_err)?;
    let trunc = trunc_for(lam, tail_tol, n_max)?;
    Ok(PyFockMixture {
        inner: entfi::make_photon_subtracted_mixed(lam, &bs, trunc, component_tol)
            .map_err(to_py_err)?,
    })
}

/// Closed-form logarithmic negativity; kind is "sq" or "ng".
#[pyfunction(name = "closed_form_en")]
#[pyo3(signature = (kind, lam, transmittance=1.0))]
fn py_closed_form_en(kind: &str, lam: f64, transmittance: f64) -> PyResult<f64> {
    closed_form_en(parse_kind(kind)?, lam, transmittance).map_err(to_py_err)
}

/// Closed-form Fisher information; kind is "sq" or "ng".
#[pyfunction(name = "closed_form_fisher")]
#[pyo3(signature = (kind, lam, transmittance=1.0))]
fn py_closed_form_fisher(kind: &str, lam: f64, transmittance: f64) -> PyResult<f64> {
    closed_form_fisher(parse_kind(kind)?, lam, transmittance).map_err(to_py_err)
}

#[pyfunction(name = "f_factor")]
fn py_f_factor(lambda_t: f64) -> f64 {
    f_factor(lambda_t)
}

#[pyfunction(name = "en_from_fisher")]
#[pyo3(signature = (j, f=1.0))]
fn py_en_from_fisher(j: f64, f: f64) -> f64 {
    en_from_fisher(j, f)
}

/// λ below which the subtracted pure state beats the squeezed state in E_N.
#[pyfunction]
fn lambda_threshold(transmittance: f64) -> PyResult<f64> {
    lambda_threshold_pure(transmittance).map_err(to_py_err)
}

#[pyfunction(name = "lambda_threshold_bisect")]
fn py_lambda_threshold_bisect(transmittance: f64) -> PyResult<f64> {
    lambda_threshold_bisect(transmittance).map_err(to_py_err)
}

#[pyfunction(name = "pnr_success_probability")]
fn py_pnr_success_probability(lam: f64, transmittance: f64) -> PyResult<f64> {
    let bs = BeamSplitterSpec::new(transmittance).map_err(to_py_err)?;
    Ok(entfi::pnr_success_probability(lam, &bs))
}

#[pyfunction(name = "onoff_success_probability")]
fn py_onoff_success_probability(lam: f64, transmittance: f64) -> PyResult<f64> {
    let bs = BeamSplitterSpec::new(transmittance).map_err(to_py_err)?;
    Ok(entfi::onoff_success_probability(lam, &bs))
}

/// Runs the self-check suite; returns (name, passed, detail) triples.
#[pyfunction]
fn validate() -> Vec<(String, bool, String)> {
    entfi::run_validation(&entfi::ValidateOptions::default())
        .into_iter()
        .map(|r| (r.name.to_string(), r.passed, r.detail))
        .collect()
}

#[pymodule]
fn entfi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchmidtState>()?;
    m.add_class::<PyFockMixture>()?;
    m.add_class::<PyQubitState>()?;
    m.add_function(wrap_pyfunction!(make_squeezed, m)?)?;
    m.add_function(wrap_pyfunction!(make_photon_subtracted_pure, m)?)?;
    m.add_function(wrap_pyfunction!(make_photon_subtracted_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(py_closed_form_en, m)?)?;
    m.add_function(wrap_pyfunction!(py_closed_form_fisher, m)?)?;
    m.add_function(wrap_pyfunction!(py_f_factor, m)?)?;
    m.add_function(wrap_pyfunction!(py_en_from_fisher, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(py_lambda_threshold_bisect, m)?)?;
    m.add_function(wrap_pyfunction!(py_pnr_success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(py_onoff_success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
