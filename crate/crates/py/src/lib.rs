//! Python bindings for the qfluct toolkit: spectra and regularized
//! energies, contraction counting, the 2D moment model, and the discretized
//! quadratic-operator sampler.
//!
//! Build with `cargo build --release -p qfluct-py`; the resulting
//! `libqfluct.so` imports as the module `qfluct` once renamed to
//! `qfluct.so` (see python/smoke_test.py).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use qfluct_core::spectra::{CasimirGeometry, CasimirPolderSetup, SpectrumModel};
use qfluct_core::{abel, field2d, quadform, stats, wick};

fn to_py_err(e: qfluct_core::Error) -> PyErr {
    match e {
        qfluct_core::Error::NonConvergence { .. }
        | qfluct_core::Error::NotPositiveSemidefinite { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_model(kind: &str, area: f64, periodicity: f64, z: f64) -> PyResult<SpectrumModel> {
    match kind {
        "casimir" => Ok(SpectrumModel::Casimir(
            CasimirGeometry::new(area, periodicity).map_err(to_py_err)?,
        )),
        "cp" => Ok(SpectrumModel::CasimirPolder(
            CasimirPolderSetup::new(1.0, z).map_err(to_py_err)?,
        )),
        other => Err(PyValueError::new_err(format!(
            "unknown model `{other}` (expected casimir | cp)"
        ))),
    }
}

#[pyfunction]
fn sawtooth_s(x: f64) -> f64 {
    qfluct_core::spectra::sawtooth_s(x)
}

#[pyfunction]
fn sawtooth_partial_sum(x: f64, terms: u32) -> f64 {
    qfluct_core::spectra::sawtooth_partial_sum(x, terms)
}

#[pyfunction]
fn casimir_sigma(omega: f64, area: f64, periodicity: f64) -> PyResult<f64> {
    let geom = CasimirGeometry::new(area, periodicity).map_err(to_py_err)?;
    Ok(qfluct_core::spectra::casimir_sigma(omega, &geom))
}

#[pyfunction]
fn cp_sigma(omega: f64, z: f64) -> PyResult<f64> {
    let setup = CasimirPolderSetup::new(1.0, z).map_err(to_py_err)?;
    Ok(qfluct_core::spectra::cp_sigma(omega, &setup))
}

#[pyfunction]
fn casimir_energy_closed(area: f64, periodicity: f64) -> PyResult<f64> {
    let geom = CasimirGeometry::new(area, periodicity).map_err(to_py_err)?;
    Ok(qfluct_core::spectra::casimir_energy_closed(&geom))
}

#[pyfunction]
fn cp_potential_closed(alpha0: f64, z: f64) -> PyResult<f64> {
    let setup = CasimirPolderSetup::new(alpha0, z).map_err(to_py_err)?;
    Ok(qfluct_core::spectra::cp_potential_closed(&setup))
}

/// Damped integral of the spectrum at one beta by segmented quadrature.
#[pyfunction]
#[pyo3(signature = (model, beta, tol=1e-10, area=1.0, periodicity=1.0, z=1.0))]
fn damped_integral(
    model: &str,
    beta: f64,
    tol: f64,
    area: f64,
    periodicity: f64,
    z: f64,
) -> PyResult<f64> {
    let model = parse_model(model, area, periodicity, z)?;
    Ok(abel::integrate_damped(&model, beta, tol)
        .map_err(to_py_err)?
        .value)
}

/// Extrapolated Abel limit: the Casimir energy resp. Casimir-Polder
/// potential. Returns (limit, error_estimate).
#[pyfunction]
#[pyo3(signature = (model, area=1.0, periodicity=1.0, alpha0=1.0, z=1.0, beta_seq=None))]
fn abel_limit(
    model: &str,
    area: f64,
    periodicity: f64,
    alpha0: f64,
    z: f64,
    beta_seq: Option<Vec<f64>>,
) -> PyResult<(f64, f64)> {
    let model = match model {
        "cp" => SpectrumModel::CasimirPolder(
            CasimirPolderSetup::new(alpha0, z).map_err(to_py_err)?,
        ),
        _ => parse_model(model, area, periodicity, z)?,
    };
    let seq = beta_seq.unwrap_or_else(|| abel::default_beta_sequence(&model));
    let res = abel::abel_limit(&model, &seq, 1e-10).map_err(to_py_err)?;
    Ok((res.limit, res.error_estimate))
}

#[pyfunction]
fn richardson_extrapolate(points: Vec<(f64, f64)>) -> PyResult<(f64, f64)> {
    abel::richardson_extrapolate(&points).map_err(to_py_err)
}

#[pyfunction]
fn pairing_count(n: usize) -> PyResult<u128> {
    Ok(wick::enumerate_pairings(n).map_err(to_py_err)?.len() as u128)
}

#[pyfunction]
fn enumerate_pairings(n: usize) -> PyResult<Vec<Vec<(usize, usize)>>> {
    Ok(wick::enumerate_pairings(n)
        .map_err(to_py_err)?
        .into_iter()
        .map(|p| p.pairs)
        .collect())
}

#[pyfunction]
fn matching_count(n: usize) -> PyResult<u128> {
    Ok(wick::enumerate_vertex_matchings(n)
        .map_err(to_py_err)?
        .len() as u128)
}

#[pyfunction]
fn matching_count_formula(n: u32) -> u128 {
    wick::matching_count_formula(n)
}

#[pyfunction]
fn cycle_partitions(n: usize) -> PyResult<Vec<(Vec<Vec<usize>>, u128)>> {
    Ok(wick::cycle_partitions(n)
        .map_err(to_py_err)?
        .into_iter()
        .map(|p| (p.blocks, p.multiplicity))
        .collect())
}

#[pyfunction]
fn gaussian_moment(n: u32, variance: f64) -> f64 {
    wick::gaussian_moment(n, variance)
}

#[pyfunction]
fn gaussian_density(x: f64, variance: f64) -> f64 {
    wick::gaussian_density(x, variance)
}

#[pyfunction]
fn moments_from_cumulants(kappas: Vec<f64>) -> Vec<f64> {
    wick::moments_from_cumulants(&kappas).moments
}

#[pyfunction]
fn cumulants_from_moments(moments: Vec<f64>) -> Vec<f64> {
    wick::cumulants_from_moments(&moments).cumulants
}

#[pyfunction]
fn hadamard_log(t1: f64, t2: f64, mu: f64) -> PyResult<f64> {
    field2d::hadamard_log(t1, t2, mu).map_err(to_py_err)
}

#[pyfunction]
fn hadamard_massive(t1: f64, t2: f64, m: f64) -> PyResult<f64> {
    field2d::hadamard_massive(t1, t2, m).map_err(to_py_err)
}

#[pyfunction]
fn bessel_y0(x: f64) -> f64 {
    field2d::bessel_y0(x)
}

fn parse_method(method: &str, points: usize) -> PyResult<field2d::MomentMethod> {
    Ok(match method {
        "quadrature" => field2d::MomentMethod::Quadrature,
        "closed_form" | "closed-form" => field2d::MomentMethod::ClosedForm,
        "leading_log" | "leading-log" => field2d::MomentMethod::LeadingLog,
        "trace" => field2d::MomentMethod::Trace { points },
        other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
    })
}

#[pyfunction]
#[pyo3(signature = (mu, duration, method="closed_form", points=2000))]
fn second_moment(mu: f64, duration: f64, method: &str, points: usize) -> PyResult<f64> {
    let params = field2d::ModelParams::new(mu, duration).map_err(to_py_err)?;
    Ok(field2d::second_moment(&params, parse_method(method, points)?)
        .map_err(to_py_err)?
        .value)
}

#[pyfunction]
#[pyo3(signature = (mu, duration, method="quadrature", points=2000))]
fn third_moment(mu: f64, duration: f64, method: &str, points: usize) -> PyResult<f64> {
    let params = field2d::ModelParams::new(mu, duration).map_err(to_py_err)?;
    Ok(field2d::third_moment(&params, parse_method(method, points)?)
        .map_err(to_py_err)?
        .value)
}

#[pyfunction]
fn skewness_ratio(mu: f64, duration: f64) -> PyResult<f64> {
    let params = field2d::ModelParams::new(mu, duration).map_err(to_py_err)?;
    field2d::skewness_ratio(&params).map_err(to_py_err)
}

/// Discretized model of the time-averaged normal-ordered squared field:
/// kernel eigenvalues, trace cumulants, exact support bound, seeded sampling.
#[pyclass]
struct QuadraticModel {
    model: quadform::EigenModel,
}

#[pymethods]
impl QuadraticModel {
    #[new]
    #[pyo3(signature = (mu, duration, points, epsilon=None))]
    fn new(mu: f64, duration: f64, points: usize, epsilon: Option<f64>) -> PyResult<Self> {
        let grid = match epsilon {
            Some(eps) => quadform::TimeGrid::with_epsilon(duration, points, eps),
            None => quadform::TimeGrid::new(duration, points),
        }
        .map_err(to_py_err)?;
        let kernel = quadform::build_kernel(&grid, mu).map_err(to_py_err)?;
        let model = quadform::eigen_lambdas(&kernel, 1e-10).map_err(to_py_err)?;
        Ok(Self { model })
    }

    #[getter]
    fn lambdas(&self) -> Vec<f64> {
        self.model.lambdas.clone()
    }

    #[getter]
    fn clipped_count(&self) -> usize {
        self.model.clipped_count
    }

    fn lower_bound(&self) -> f64 {
        quadform::lower_bound(&self.model)
    }

    fn trace_cumulant(&self, ell: u32) -> PyResult<f64> {
        quadform::trace_cumulant(&self.model, ell).map_err(to_py_err)
    }

    /// Seeded draws of sum_i lambda_i (z_i^2 - 1); reproducible bit-for-bit.
    fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        quadform::sample_quadratic(&self.model, count, seed).values
    }
}

#[pyfunction]
fn sample_linear(coeffs: Vec<f64>, count: usize, seed: u64) -> Vec<f64> {
    quadform::sample_linear(&coeffs, count, seed).values
}

/// Moment/shape estimators with standard errors, as a dict.
#[pyfunction]
fn shape(py: Python<'_>, samples: Vec<f64>) -> PyResult<Py<PyDict>> {
    let est = stats::shape(&samples).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("count", est.count)?;
    d.set_item("mean", est.mean)?;
    d.set_item("mean_se", est.mean_se)?;
    d.set_item("variance", est.variance)?;
    d.set_item("variance_se", est.variance_se)?;
    d.set_item("skewness", est.skewness)?;
    d.set_item("skewness_se", est.skewness_se)?;
    d.set_item("excess_kurtosis", est.excess_kurtosis)?;
    d.set_item("excess_kurtosis_se", est.excess_kurtosis_se)?;
    d.set_item("min", est.min)?;
    d.set_item("frac_below_zero", est.frac_below_zero)?;
    d.set_item("degenerate", est.degenerate)?;
    Ok(d.into())
}

/// Uniform histogram over [lo, hi): returns (counts, underflow, overflow).
#[pyfunction]
fn histogram(samples: Vec<f64>, bins: usize, lo: f64, hi: f64) -> PyResult<(Vec<u64>, u64, u64)> {
    let h = stats::histogram(&samples, bins, (lo, hi)).map_err(to_py_err)?;
    Ok((h.counts, h.underflow, h.overflow))
}

#[pymodule]
fn qfluct(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sawtooth_s, m)?)?;
    m.add_function(wrap_pyfunction!(sawtooth_partial_sum, m)?)?;
    m.add_function(wrap_pyfunction!(casimir_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(cp_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(casimir_energy_closed, m)?)?;
    m.add_function(wrap_pyfunction!(cp_potential_closed, m)?)?;
    m.add_function(wrap_pyfunction!(damped_integral, m)?)?;
    m.add_function(wrap_pyfunction!(abel_limit, m)?)?;
    m.add_function(wrap_pyfunction!(richardson_extrapolate, m)?)?;
    m.add_function(wrap_pyfunction!(pairing_count, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_pairings, m)?)?;
    m.add_function(wrap_pyfunction!(matching_count, m)?)?;
    m.add_function(wrap_pyfunction!(matching_count_formula, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_moment, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_density, m)?)?;
    m.add_function(wrap_pyfunction!(moments_from_cumulants, m)?)?;
    m.add_function(wrap_pyfunction!(cumulants_from_moments, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_log, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_massive, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_y0, m)?)?;
    m.add_function(wrap_pyfunction!(second_moment, m)?)?;
    m.add_function(wrap_pyfunction!(third_moment, m)?)?;
    m.add_function(wrap_pyfunction!(skewness_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(sample_linear, m)?)?;
    m.add_function(wrap_pyfunction!(shape, m)?)?;
    m.add_function(wrap_pyfunction!(histogram, m)?)?;
    m.add_class::<QuadraticModel>()?;
    Ok(())
}
