//! Python bindings. Points are (x, u) pairs of float lists and tangent
//! vectors of TM are (h, v) pairs in base coordinates.

use nalgebra::DVector;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use sasakigeo::base_manifold::{ChartedManifold, ZooSpec};
use sasakigeo::cli;
use sasakigeo::conformal_fiber::{BundleState, ConformalFiberMetric, Phi2Spec};
use sasakigeo::coordinate_oracle::InducedChart;
use sasakigeo::output::to_json_string;
use sasakigeo::sasaki::{SplitTangentVector, TangentBundlePoint, WeightedSasakiMetric};
use sasakigeo::sphere_bundle::scan::{scan_positive_scalar, ScanConfig, ScanGrid};
use sasakigeo::GeoError;

type Split = (Vec<f64>, Vec<f64>);

fn err(e: GeoError) -> PyErr {
    match e {
        GeoError::Domain(_) | GeoError::Numeric(_) | GeoError::Geometry(_) | GeoError::Rank(_) | GeoError::Divergence { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn point(m: usize, x: Vec<f64>, u: Vec<f64>) -> PyResult<TangentBundlePoint> {
    if x.len() != m || u.len() != m {
        return Err(PyValueError::new_err(format!("x and u need {m} components")));
    }
    Ok(TangentBundlePoint::new(x, u))
}

fn split(m: usize, s: Split) -> PyResult<SplitTangentVector> {
    if s.0.len() != m || s.1.len() != m {
        return Err(PyValueError::new_err(format!("tangent vectors need {m} horizontal and {m} vertical components")));
    }
    Ok(SplitTangentVector::from_slices(&s.0, &s.1))
}

/// A chart of one of the test manifolds.
#[pyclass(frozen, module = "pysasakigeo")]
struct Manifold {
    spec: ZooSpec,
    inner: ChartedManifold,
}

impl Manifold {
    fn build(spec: ZooSpec) -> PyResult<Self> {
        let inner = spec.build().map_err(err)?;
        Ok(Self { spec, inner })
    }
}

#[pymethods]
impl Manifold {
    #[staticmethod]
    fn euclidean(dim: usize) -> PyResult<Self> {
        Self::build(ZooSpec::euclidean(dim))
    }

    #[staticmethod]
    fn constant_curvature(dim: usize, curvature: f64) -> PyResult<Self> {
        Self::build(ZooSpec::constant_curvature(dim, curvature))
    }

    #[staticmethod]
    fn product(first: &Manifold, second: &Manifold) -> PyResult<Self> {
        Self::build(ZooSpec::product(first.spec.clone(), second.spec.clone()))
    }

    #[staticmethod]
    fn perturbed(dim: usize, amplitude: f64) -> PyResult<Self> {
        Self::build(ZooSpec::perturbed(dim, amplitude))
    }

    /// From the JSON form used in run configurations.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: ZooSpec = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Self::build(spec)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn metric(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let g = self.inner.metric(&x).map_err(err)?;
        Ok(g.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    fn scalar_curvature(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.ricci_and_scalar(&x).map_err(err)?.1)
    }

    fn __repr__(&self) -> String {
        format!("Manifold({})", self.inner.label())
    }
}

/// g^{f1,f2} on TM with constant weights.
#[pyclass(frozen, module = "pysasakigeo")]
struct SasakiMetric {
    inner: WeightedSasakiMetric,
}

#[pymethods]
impl SasakiMetric {
    #[new]
    #[pyo3(signature = (manifold, f1 = 1.0, f2 = 1.0))]
    fn new(manifold: &Manifold, f1: f64, f2: f64) -> PyResult<Self> {
        Ok(Self { inner: WeightedSasakiMetric::new(manifold.inner.clone(), f1, f2).map_err(err)? })
    }

    /// G(R(X, Y)Z, W).
    fn curvature(&self, x: Vec<f64>, u: Vec<f64>, a: Split, b: Split, c: Split, d: Split) -> PyResult<f64> {
        let m = self.inner.dim();
        let at = self.inner.at(&point(m, x, u)?).map_err(err)?;
        Ok(at.curvature_rg4(&split(m, a)?, &split(m, b)?, &split(m, c)?, &split(m, d)?))
    }

    fn sectional(&self, x: Vec<f64>, u: Vec<f64>, a: Split, b: Split) -> PyResult<f64> {
        let m = self.inner.dim();
        let at = self.inner.at(&point(m, x, u)?).map_err(err)?;
        at.sectional_g(&split(m, a)?, &split(m, b)?).map_err(err)
    }

    fn ricci(&self, x: Vec<f64>, u: Vec<f64>, a: Split, b: Split) -> PyResult<f64> {
        let m = self.inner.dim();
        let at = self.inner.at(&point(m, x, u)?).map_err(err)?;
        Ok(at.ricci_g(&split(m, a)?, &split(m, b)?))
    }

    fn scalar(&self, x: Vec<f64>, u: Vec<f64>) -> PyResult<f64> {
        let m = self.inner.dim();
        Ok(self.inner.at(&point(m, x, u)?).map_err(err)?.scalar_g())
    }

    fn trace_free_ricci_norm(&self, x: Vec<f64>, u: Vec<f64>) -> PyResult<f64> {
        let m = self.inner.dim();
        Ok(self.inner.at(&point(m, x, u)?).map_err(err)?.trace_free_ricci_norm())
    }
}

/// Brute-force curvature of the bundle metric in coordinates (x, u).
#[pyclass(frozen, module = "pysasakigeo")]
struct Oracle {
    inner: InducedChart,
}

#[pymethods]
impl Oracle {
    #[new]
    #[pyo3(signature = (manifold, f1 = 1.0, f2 = 1.0))]
    fn new(manifold: &Manifold, f1: f64, f2: f64) -> PyResult<Self> {
        Ok(Self { inner: InducedChart::new(manifold.inner.clone(), f1, f2).map_err(err)? })
    }

    fn curvature(&self, x: Vec<f64>, u: Vec<f64>, a: Split, b: Split, c: Split, d: Split) -> PyResult<f64> {
        let m = self.inner.base().dim();
        let at = self.inner.evaluate(&point(m, x, u)?).map_err(err)?;
        at.rg4(&split(m, a)?, &split(m, b)?, &split(m, c)?, &split(m, d)?).map_err(err)
    }

    fn ricci(&self, x: Vec<f64>, u: Vec<f64>, a: Split, b: Split) -> PyResult<f64> {
        let m = self.inner.base().dim();
        let at = self.inner.evaluate(&point(m, x, u)?).map_err(err)?;
        at.ricci(&split(m, a)?, &split(m, b)?).map_err(err)
    }

    fn scalar(&self, x: Vec<f64>, u: Vec<f64>) -> PyResult<f64> {
        let m = self.inner.base().dim();
        Ok(self.inner.evaluate(&point(m, x, u)?).map_err(err)?.scalar)
    }
}

/// S_rM with constant radius r.
#[pyclass(frozen, module = "pysasakigeo")]
struct SphereBundle {
    inner: sasakigeo::sphere_bundle::SphereBundle,
}

#[pymethods]
impl SphereBundle {
    #[new]
    #[pyo3(signature = (manifold, radius, f1 = 1.0, f2 = 1.0))]
    fn new(manifold: &Manifold, radius: f64, f1: f64, f2: f64) -> PyResult<Self> {
        let metric = WeightedSasakiMetric::new(manifold.inner.clone(), f1, f2).map_err(err)?;
        Ok(Self { inner: sasakigeo::sphere_bundle::SphereBundle::constant(metric, radius).map_err(err)? })
    }

    /// The point (x, r·direction/|direction|).
    fn point_on_bundle(&self, x: Vec<f64>, direction: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let p = self.inner.point_on_bundle(&x, &DVector::from_vec(direction)).map_err(err)?;
        Ok((p.x, p.u.iter().copied().collect()))
    }

    /// Projects a tangent vector of TM onto T S_rM.
    fn project_tangent(&self, x: Vec<f64>, u: Vec<f64>, a: Split) -> PyResult<Split> {
        let m = self.inner.metric().dim();
        let at = self.inner.at(&point(m, x, u)?).map_err(err)?;
        let t = at.project_tangent(&split(m, a)?);
        Ok((t.h.iter().copied().collect(), t.v.iter().copied().collect()))
    }

    fn second_fundamental(&self, x: Vec<f64>, u: Vec<f64>, a: Split, b: Split) -> PyResult<f64> {
        let m = self.inner.metric().dim();
        let at = self.inner.at(&point(m, x, u)?).map_err(err)?;
        at.second_fundamental(&split(m, a)?, &split(m, b)?).map_err(err)
    }

    fn mean_curvature(&self, x: Vec<f64>, u: Vec<f64>) -> PyResult<f64> {
        let m = self.inner.metric().dim();
        self.inner.at(&point(m, x, u)?).map_err(err)?.mean_curvature().map_err(err)
    }

    fn sectional(&self, x: Vec<f64>, u: Vec<f64>, a: Split, b: Split) -> PyResult<f64> {
        let m = self.inner.metric().dim();
        let at = self.inner.at(&point(m, x, u)?).map_err(err)?;
        at.sectional_srm(&split(m, a)?, &split(m, b)?).map_err(err)
    }

    fn ricci(&self, x: Vec<f64>, u: Vec<f64>, a: Split, b: Split) -> PyResult<f64> {
        let m = self.inner.metric().dim();
        let at = self.inner.at(&point(m, x, u)?).map_err(err)?;
        at.ricci_srm(&split(m, a)?, &split(m, b)?).map_err(err)
    }

    fn scalar(&self, x: Vec<f64>, u: Vec<f64>) -> PyResult<f64> {
        let m = self.inner.metric().dim();
        self.inner.at(&point(m, x, u)?).map_err(err)?.scalar_srm().map_err(err)
    }
}

/// Flat base, f1 constant and f2 = e^{2φ2}; `phi2` is the JSON form of the exponent.
#[pyclass(frozen, module = "pysasakigeo")]
struct ConformalFiber {
    inner: ConformalFiberMetric,
}

#[pymethods]
impl ConformalFiber {
    #[new]
    fn new(dim: usize, f1: f64, phi2: &str) -> PyResult<Self> {
        let spec: Phi2Spec = serde_json::from_str(phi2).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner: ConformalFiberMetric::new(dim, f1, spec).map_err(err)? })
    }

    fn curvature(&self, x: Vec<f64>, a: Split, b: Split, c: Split, d: Split) -> PyResult<f64> {
        let m = self.inner.dim();
        let r = self.inner.curvature_conformal(&x, &split(m, a)?, &split(m, b)?, &split(m, c)?).map_err(err)?;
        Ok(self.inner.g_inner(&x, &r, &split(m, d)?))
    }

    fn sectional(&self, x: Vec<f64>, a: Split, b: Split) -> PyResult<f64> {
        let m = self.inner.dim();
        Ok(self.inner.sectional_conformal(&x, &split(m, a)?, &split(m, b)?).map_err(err)?.value)
    }

    /// Returns (times, g_speeds, final (x, u, x_dot, u_dot)).
    fn integrate_geodesic(
        &self,
        x: Vec<f64>,
        u: Vec<f64>,
        x_dot: Vec<f64>,
        u_dot: Vec<f64>,
        t_final: f64,
        dt: f64,
    ) -> PyResult<(Vec<f64>, Vec<f64>, (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>))> {
        let m = self.inner.dim();
        if [&x, &u, &x_dot, &u_dot].iter().any(|v| v.len() != m) {
            return Err(PyValueError::new_err(format!("state vectors need {m} components")));
        }
        let traj = self.inner.integrate_geodesic(&BundleState::new(x, u, x_dot, u_dot), t_final, dt).map_err(err)?;
        let s = traj.last();
        let list = |v: &DVector<f64>| v.iter().copied().collect::<Vec<f64>>();
        let last = (list(&s.x), list(&s.u), list(&s.x_dot), list(&s.u_dot));
        Ok((traj.times.clone(), traj.g_speeds.clone(), last))
    }
}

/// Positive-scalar-curvature scan; returns the summary as a JSON string.
#[pyfunction]
#[pyo3(signature = (manifold, f1, f2, r, samples = 64, seed = 42))]
fn scan(manifold: &Manifold, f1: Vec<f64>, f2: Vec<f64>, r: Vec<f64>, samples: usize, seed: u64) -> PyResult<String> {
    let cfg = ScanConfig { grid: ScanGrid { f1, f2, r }, samples, seed };
    let report = scan_positive_scalar(&manifold.inner, &cfg).map_err(err)?;
    to_json_string(&report.summary).map_err(err)
}

/// Runs the command-line front end; returns (exit code, stdout, stderr).
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let mut full = vec!["sasakigeo".to_string()];
    full.extend(args);
    let code = cli::run(full, &mut out, &mut errs);
    (code as i32, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&errs).into_owned())
}

#[pymodule]
fn pysasakigeo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Manifold>()?;
    m.add_class::<SasakiMetric>()?;
    m.add_class::<Oracle>()?;
    m.add_class::<SphereBundle>()?;
    m.add_class::<ConformalFiber>()?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
