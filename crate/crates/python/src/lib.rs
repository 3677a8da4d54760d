//! Python bindings.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::fractal_spectra as fs;
use fs::sl::Blowup;
use fs::zeta::{RhoMode, Window};
use fs::C64;

create_exception!(fractal_spectra, FractalSpectraError, PyException, "Engine error; the message starts with the error name.");

fn py_err(e: fs::Error) -> PyErr {
    FractalSpectraError::new_err(format!("{}: {e}", e.name()))
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for fs::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

#[pyclass(frozen, skip_from_py_object, name = "SLParams")]
#[derive(Clone)]
struct PySLParams {
    inner: fs::sl::SLParams,
}

#[pymethods]
impl PySLParams {
    #[new]
    fn new(alpha: f64) -> PyResult<Self> {
        Ok(PySLParams { inner: fs::sl::make_params(alpha).py()? })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("SLParams(alpha={}, b={}, delta={}, gamma={})", p.alpha, p.b, p.delta, p.gamma)
    }
}

/// Roots of the generating set, with the parameters that produced them.
#[pyclass(frozen, name = "GeneratingSet")]
struct PyGeneratingSet {
    params: fs::sl::SLParams,
    inner: fs::sl::GeneratingSet,
}

#[pymethods]
impl PyGeneratingSet {
    #[new]
    #[pyo3(signature = (alpha, lambda_max, grid=4000, depth=16))]
    fn new(py: Python<'_>, alpha: f64, lambda_max: f64, grid: usize, depth: u32) -> PyResult<Self> {
        let params = fs::sl::make_params(alpha).py()?;
        let inner = py.detach(|| fs::sl::generating_set(&params, lambda_max, grid, depth)).py()?;
        Ok(PyGeneratingSet { params, inner })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.inner.depth
    }

    #[getter]
    fn lambda_max(&self) -> f64 {
        self.inner.lambda_max
    }

    #[getter]
    fn roots(&self) -> Vec<f64> {
        self.inner.roots.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.roots.len()
    }

    /// `(value, k, p)` triples of `H_<n>`, or of the half-line when `blowup` is None.
    #[pyo3(signature = (lambda_max, blowup=Some(0), floor=None))]
    fn ladder(&self, lambda_max: f64, blowup: Option<u32>, floor: Option<f64>) -> PyResult<Vec<(f64, usize, i32)>> {
        let b = blowup.map_or(Blowup::Infinite { floor }, Blowup::Finite);
        let l = fs::sl::ladder_spectrum(&self.params, b, lambda_max, &self.inner).py()?;
        Ok(l.entries.iter().map(|e| (e.value, e.k, e.p)).collect())
    }

    /// `(value, error)` of the generating-set zeta function.
    fn zeta_s(&self, s: C64) -> PyResult<(C64, f64)> {
        let z = fs::zeta::zeta_s(s, &self.inner).py()?;
        Ok((z.value, z.error))
    }

    #[pyo3(signature = (s, n=0))]
    fn zeta_h(&self, s: C64, n: u32) -> PyResult<(C64, f64)> {
        let z = fs::zeta::zeta_h_n(&self.params, s, n, &self.inner).py()?;
        Ok((z.value, z.error))
    }

    /// With `direct_p` set, sums the orbit condition for `p <= direct_p` instead.
    #[pyo3(signature = (s, direct_p=None))]
    fn zeta_rho(&self, py: Python<'_>, s: C64, direct_p: Option<u32>) -> PyResult<(C64, f64)> {
        let mode = direct_p.map_or(RhoMode::Identity, |max_p| RhoMode::Direct { max_p });
        let z = py.detach(|| fs::zeta::zeta_rho(&self.params, s, &self.inner, mode)).py()?;
        Ok((z.value, z.error))
    }

    fn riemann_check<'py>(&self, py: Python<'py>, s: f64) -> PyResult<Bound<'py, PyDict>> {
        let r = fs::zeta::riemann_check(s, &self.inner).py()?;
        let d = PyDict::new(py);
        d.set_item("s", r.s)?;
        d.set_item("lhs", r.lhs)?;
        d.set_item("rhs", r.rhs)?;
        d.set_item("abs_err", r.abs_err)?;
        d.set_item("error_estimate", r.error_estimate)?;
        Ok(d)
    }
}

/// `(eigenvalue, multiplicity)` pairs of the level-m graph Laplacian.
#[pyfunction]
#[pyo3(signature = (level, method="decimation"))]
fn graph_spectrum(py: Python<'_>, level: usize, method: &str) -> PyResult<Vec<(f64, usize)>> {
    let s = py
        .detach(|| match method {
            "decimation" => fs::decimation::generate_graph_spectrum(level, false).map(|t| t.spectrum(level)),
            "dense" => fs::sg::build_level_graph(level).and_then(|g| g.dense_spectrum()),
            other => Err(fs::Error::InvalidArgument(format!("unknown method {other:?}"))),
        })
        .py()?;
    Ok(s.entries)
}

#[pyfunction]
fn harmonic_extend(boundary: [f64; 3], level: usize) -> PyResult<Vec<f64>> {
    Ok(fs::sg::harmonic_extend(boundary, level).py()?.values)
}

#[pyfunction]
#[pyo3(signature = (seed, m0, signs="", tol=1e-12))]
fn fractal_eigenvalue(seed: f64, m0: usize, signs: &str, tol: f64) -> PyResult<f64> {
    let seq = fs::decimation::EigenSequence::new(m0, seed, signs).py()?;
    fs::decimation::limit_eigenvalue(&seq, tol).py()
}

/// Entries `(a, b, c, d)` of the transfer matrix across `[0, 1]`.
#[pyfunction]
#[pyo3(signature = (alpha, lam, depth=18))]
fn propagator(py: Python<'_>, alpha: f64, lam: C64, depth: u32) -> PyResult<(C64, C64, C64, C64)> {
    let p = fs::sl::make_params(alpha).py()?;
    let m = py.detach(|| fs::sl::propagator(&p, lam, depth)).py()?.matrix;
    Ok((m.a, m.b, m.c, m.d))
}

#[pyfunction]
#[pyo3(signature = (alpha, lambdas, depth=18))]
fn functional_equation_residual(py: Python<'_>, alpha: f64, lambdas: Vec<f64>, depth: u32) -> PyResult<f64> {
    let p = fs::sl::make_params(alpha).py()?;
    py.detach(|| fs::sl::functional_equation_residual(&p, &lambdas, depth)).py()
}

/// `(u0', u1')` from the Schur complement over the level-one blow-up.
#[pyfunction]
fn trace_map(u0: C64, u1: C64) -> PyResult<(C64, C64)> {
    Ok(fs::lattice::trace_form(&fs::lattice::SymGForm::new(u0, u1)).py()?.coords)
}

#[pyfunction]
fn g_map(z0: C64, z1: C64) -> PyResult<(C64, C64)> {
    let [a, b] = fs::lattice::g_map(&fs::ProjPoint1::new(z0, z1).py()?).py()?.coords();
    Ok((a, b))
}

#[pyfunction]
fn conjugacy_checks<'py>(py: Python<'py>, z: C64) -> PyResult<Bound<'py, PyDict>> {
    let r = fs::lattice::conjugacy_checks(z).py()?;
    let d = PyDict::new(py);
    d.set_item("r1", r.r1)?;
    d.set_item("r2", r.r2)?;
    d.set_item("chart", r.chart)?;
    d.set_item("literal", r.literal)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (z0, s, depth=20))]
fn zeta_r(py: Python<'_>, z0: f64, s: C64, depth: u32) -> PyResult<(C64, f64)> {
    let z = py.detach(|| fs::zeta::zeta_r(z0, s, depth)).py()?;
    Ok((z.value, z.error))
}

#[pyfunction]
#[pyo3(signature = (s, depth=20))]
fn zeta_sg(py: Python<'_>, s: C64, depth: u32) -> PyResult<(C64, f64)> {
    let z = py.detach(|| fs::zeta::zeta_sg(s, depth)).py()?;
    Ok((z.value, z.error))
}

/// Poles `(s, n)` of `1/(1 - coefficient·base^{-s/2})` inside the window.
#[pyfunction]
fn pole_lattice(base: f64, coefficient: f64, window: (f64, f64, f64, f64)) -> PyResult<Vec<(C64, i64)>> {
    let f = fs::zeta::GeometricFactor::new(base, coefficient).py()?;
    let (re_min, re_max, im_min, im_max) = window;
    Ok(fs::zeta::pole_lattice(&f, &Window { re_min, re_max, im_min, im_max }).iter().map(|p| (p.s, p.n)).collect())
}

/// Pairing of the delta hyperfunction with `z^k`.
#[pyfunction]
#[pyo3(signature = (k, r_in=0.8, r_out=1.25, nodes=4096))]
fn delta_pairing_monomial(k: i32, r_in: f64, r_out: f64, nodes: usize) -> PyResult<C64> {
    fs::zeta::pairing(&fs::zeta::delta_hyperfunction(), |z| z.powi(k), r_in, r_out, nodes).py()
}

/// Rows `(module, check, passed, detail)` of the invariant suite.
#[pyfunction]
#[pyo3(signature = (quick=true))]
fn verify(py: Python<'_>, quick: bool) -> Vec<(String, String, bool, String)> {
    py.detach(|| fs::verify::run_suite(quick)).into_iter().map(|r| (r.module, r.check, r.passed, r.detail)).collect()
}

#[pymodule]
fn fractal_spectra(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FractalSpectraError", m.py().get_type::<FractalSpectraError>())?;
    m.add_class::<PySLParams>()?;
    m.add_class::<PyGeneratingSet>()?;
    m.add_function(wrap_pyfunction!(graph_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_extend, m)?)?;
    m.add_function(wrap_pyfunction!(fractal_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(propagator, m)?)?;
    m.add_function(wrap_pyfunction!(functional_equation_residual, m)?)?;
    m.add_function(wrap_pyfunction!(trace_map, m)?)?;
    m.add_function(wrap_pyfunction!(g_map, m)?)?;
    m.add_function(wrap_pyfunction!(conjugacy_checks, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_r, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_sg, m)?)?;
    m.add_function(wrap_pyfunction!(pole_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(delta_pairing_monomial, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
