//! Python bindings. Points are Python `complex` values; the point at
//! infinity is `None`. Windows are `(x_min, x_max, y_min, y_max)` tuples.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use expdyn::continuum::{self, BranchWord};
use expdyn::numerics::{self, Metric, MapValue};
use expdyn::rays::{self, Address};
use expdyn::render::{render_escape, RenderConfig, Schedule};
use expdyn::{Outcome, PointSet, Sign, SpherePoint};

fn err(e: expdyn::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn window(w: (f64, f64, f64, f64)) -> PyResult<expdyn::Window> {
    expdyn::Window::new(w.0, w.1, w.2, w.3).map_err(err)
}

fn sign(s: &str) -> PyResult<Sign> {
    s.parse().map_err(err)
}

fn sphere(p: Option<Complex64>) -> PyResult<SpherePoint> {
    match p {
        Some(z) => SpherePoint::from_complex(z).map_err(err),
        None => Ok(SpherePoint::Infinity),
    }
}

fn point_set(points: Vec<Option<Complex64>>) -> PyResult<PointSet> {
    Ok(PointSet::new(points.into_iter().map(sphere).collect::<PyResult<_>>()?))
}

fn points_out(set: &PointSet) -> Vec<Option<Complex64>> {
    set.points().iter().map(SpherePoint::finite).collect()
}

/// `f(z) = exp(z) + a`.
#[pyclass(name = "ExpMap", frozen)]
struct PyExpMap {
    inner: expdyn::ExpMap,
}

#[pymethods]
impl PyExpMap {
    /// `override_a` admits parameters `a <= -1`.
    #[new]
    #[pyo3(signature = (a, override_a = false, r_escape = None))]
    fn new(a: f64, override_a: bool, r_escape: Option<f64>) -> PyResult<Self> {
        let mut f = if override_a {
            expdyn::ExpMap::with_override(a)
        } else {
            expdyn::ExpMap::new(a)
        }
        .map_err(err)?;
        if let Some(r) = r_escape {
            f = f.with_escape_radius(r).map_err(err)?;
        }
        Ok(PyExpMap { inner: f })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    /// `f(z)`, or `None` when the value overflows.
    fn apply(&self, z: Complex64) -> Option<Complex64> {
        match self.inner.apply(z) {
            MapValue::Finite(w) => Some(w),
            _ => None,
        }
    }

    /// `(tag, n, iterates)` with tag `escaped`, `overflowed` or `bounded`.
    #[pyo3(signature = (z, n_max = 64))]
    fn orbit(&self, z: Complex64, n_max: usize) -> (String, usize, Vec<Complex64>) {
        let r = self.inner.orbit(z, n_max);
        let (tag, n) = match r.outcome {
            Outcome::Escaped { n } => ("escaped", n),
            Outcome::Overflowed { n, .. } => ("overflowed", n),
            Outcome::Bounded { n_max, .. } => ("bounded", n_max),
        };
        (tag.to_owned(), n, r.orbit)
    }

    /// Strip indices and the JSON-style termination reason.
    #[pyo3(signature = (z, n_max = 64))]
    fn itinerary(&self, z: Complex64, n_max: usize) -> PyResult<(Vec<i64>, String)> {
        let it = self.inner.itinerary(z, n_max);
        let reason = serde_json::to_string(&it.terminated_by).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((it.entries, reason))
    }

    fn inv_halfplane(&self, sign_: &str, w: Complex64) -> PyResult<Complex64> {
        self.inner.inv_halfplane(sign(sign_)?, w).map_err(err)
    }

    fn inv_strip(&self, k: i64, w: Complex64) -> PyResult<Complex64> {
        self.inner.inv_strip(k, w).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ExpMap(a={})", self.inner.a())
    }
}

#[pyfunction]
fn chordal_dist(p: Option<Complex64>, q: Option<Complex64>) -> PyResult<f64> {
    Ok(numerics::chordal_dist(sphere(p)?, sphere(q)?))
}

/// Index classes of the ε-chain partition.
#[pyfunction]
#[pyo3(signature = (points, eps, metric = "euclidean"))]
fn eps_components(points: Vec<Option<Complex64>>, eps: f64, metric: &str) -> PyResult<Vec<Vec<usize>>> {
    let metric = match metric {
        "euclidean" => Metric::Euclidean,
        "chordal" => Metric::Chordal,
        other => return Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
    };
    numerics::eps_components(&point_set(points)?, eps, metric).map_err(err)
}

/// Samples of one curve, in parameter order.
#[pyfunction]
fn build_gamma(
    f: &PyExpMap,
    sign_: &str,
    k: u32,
    delta: f64,
    window_: (f64, f64, f64, f64),
) -> PyResult<Vec<Option<Complex64>>> {
    let c = continuum::build_gamma(&f.inner, sign(sign_)?, k, delta, window(window_)?).map_err(err)?;
    Ok(c.points().map(|p| p.finite()).collect())
}

/// Chordal Hausdorff distance of each generation to the family.
#[pyfunction]
fn hausdorff_report(
    f: &PyExpMap,
    sign_: &str,
    k_max: u32,
    delta: f64,
    window_: (f64, f64, f64, f64),
) -> PyResult<Vec<(u32, f64)>> {
    let approx = continuum::build_continuum(&f.inner, sign(sign_)?, k_max, delta, window(window_)?).map_err(err)?;
    let r = continuum::hausdorff_report(&approx).map_err(err)?;
    Ok(r.entries.iter().map(|e| (e.k, e.distance)).collect())
}

/// Structural features of the family as a dict.
#[pyfunction]
fn family_summary<'py>(
    py: Python<'py>,
    f: &PyExpMap,
    sign_: &str,
    k_max: u32,
    delta: f64,
    window_: (f64, f64, f64, f64),
) -> PyResult<Bound<'py, PyDict>> {
    let approx = continuum::build_continuum(&f.inner, sign(sign_)?, k_max, delta, window(window_)?).map_err(err)?;
    let s = continuum::family_summary(&approx).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("real_ray", s.real_ray)?;
    d.set_item("pi_line", s.pi_line)?;
    d.set_item("folded", s.folded.clone())?;
    d.set_item("approach", s.approach.clone())?;
    d.set_item("folded_accumulating", s.folded_accumulating.clone())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (f, k_max, delta, window_, m = 1))]
fn build_y(f: &PyExpMap, k_max: u32, delta: f64, window_: (f64, f64, f64, f64), m: u32) -> PyResult<Vec<Option<Complex64>>> {
    Ok(points_out(&continuum::build_y(&f.inner, k_max, delta, window(window_)?, m).map_err(err)?))
}

/// `(depth, branch_word, z)` for every forest point.
#[pyfunction]
fn preimage_forest(
    f: &PyExpMap,
    roots: Vec<Complex64>,
    depth: usize,
    k_max: i64,
    window_: (f64, f64, f64, f64),
) -> PyResult<Vec<(usize, String, Complex64)>> {
    let y0 = PointSet::from_complex(roots).map_err(err)?;
    let forest = continuum::build_preimage_forest(&f.inner, &y0, depth, k_max, window(window_)?).map_err(err)?;
    Ok((0..forest.levels.len())
        .flat_map(|d| {
            let forest = &forest;
            (0..forest.levels[d].len()).map(move |i| {
                let w: BranchWord = forest.word(d, i);
                (d, w.to_string(), forest.levels[d][i].z)
            })
        })
        .collect())
}

/// `(eps, components, largest_share)`.
type ConnectivityRow = (f64, usize, f64);

/// `([(eps, components, largest_share)], c)`.
#[pyfunction]
#[pyo3(signature = (points, eps_list, window_, delta = None))]
fn connectivity_probe(
    points: Vec<Option<Complex64>>,
    eps_list: Vec<f64>,
    window_: (f64, f64, f64, f64),
    delta: Option<f64>,
) -> PyResult<(Vec<ConnectivityRow>, Option<f64>)> {
    let mut set = point_set(points)?;
    if let Some(d) = delta {
        set = set.with_resolution(d);
    }
    let r = continuum::connectivity_probe(&set, &eps_list, window(window_)?).map_err(err)?;
    Ok((r.entries.iter().map(|e| (e.eps, e.components, e.largest_share)).collect(), r.c))
}

/// Coverage fraction per depth.
#[pyfunction]
fn density_probe(
    f: &PyExpMap,
    seed: Complex64,
    depth: usize,
    k_max: i64,
    window_: (f64, f64, f64, f64),
    grid: usize,
) -> PyResult<Vec<f64>> {
    Ok(continuum::density_probe(&f.inner, seed, depth, k_max, window(window_)?, grid)
        .map_err(err)?
        .coverage)
}

/// `(t, z, depth, gap)` along the ray of `address`.
#[pyfunction]
#[pyo3(signature = (f, address, potentials, tol = rays::DEFAULT_RAY_TOL))]
fn trace_ray(f: &PyExpMap, address: &str, potentials: Vec<f64>, tol: f64) -> PyResult<Vec<(f64, Complex64, usize, f64)>> {
    let s: Address = address.parse().map_err(err)?;
    let trace = rays::trace_ray(&f.inner, &s, &potentials, tol).map_err(err)?;
    Ok(trace.points.iter().map(|p| (p.t, p.z, p.depth, p.gap)).collect())
}

/// Binary PPM bytes of the escape-time image.
#[pyfunction]
#[pyo3(signature = (f, window_, width, height, n_max = 64))]
fn render_ppm(f: &PyExpMap, window_: (f64, f64, f64, f64), width: usize, height: usize, n_max: usize) -> PyResult<Vec<u8>> {
    let mut cfg = RenderConfig::new(window(window_)?, width, height);
    cfg.n_max = n_max;
    Ok(render_escape(&f.inner, &cfg, Schedule::Tiled).map_err(err)?.to_ppm())
}

#[pymodule]
fn pyexpdyn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpMap>()?;
    m.add_function(wrap_pyfunction!(chordal_dist, m)?)?;
    m.add_function(wrap_pyfunction!(eps_components, m)?)?;
    m.add_function(wrap_pyfunction!(build_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_report, m)?)?;
    m.add_function(wrap_pyfunction!(family_summary, m)?)?;
    m.add_function(wrap_pyfunction!(build_y, m)?)?;
    m.add_function(wrap_pyfunction!(preimage_forest, m)?)?;
    m.add_function(wrap_pyfunction!(connectivity_probe, m)?)?;
    m.add_function(wrap_pyfunction!(density_probe, m)?)?;
    m.add_function(wrap_pyfunction!(trace_ray, m)?)?;
    m.add_function(wrap_pyfunction!(render_ppm, m)?)?;
    Ok(())
}
