//! The base Riemannian manifold (M, g) in a single chart, its Levi-Civita
//! curvature, and a zoo of test manifolds.
//!
//! Curvature convention: R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z and
//! R(X,Y,Z,W) = g(R(X,Y)Z, W), so the sectional curvature of a plane with
//! orthonormal basis X, Y is R(X,Y,Y,X) and round spheres are positive.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, GeoError, Result};
use crate::levi_civita::{
    christoffel_from_metric, covariant_derivative_riemann, inverse_metric, lower_riemann, raise_riemann,
    riemann_up_from_christoffel,
};
use crate::tensorkit::{finite_difference_derivative, gram_schmidt_frame, standard_basis, DenseTensor, FdScheme};

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type TensorFn = Arc<dyn Fn(&[f64]) -> DenseTensor + Send + Sync>;

/// Open coordinate box. Bounds may be infinite; sampling always uses a finite box.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    pub fn unbounded(dim: usize) -> Self {
        Self { lo: vec![f64::NEG_INFINITY; dim], hi: vec![f64::INFINITY; dim] }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (lo, hi))| v > lo && v < hi)
    }

    /// Shrinks a finite box by `margin` (a fraction of each side) on both ends.
    pub fn shrink(&self, margin: f64) -> Self {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for i in 0..lo.len() {
            let w = hi[i] - lo[i];
            if w.is_finite() {
                lo[i] += margin * w;
                hi[i] -= margin * w;
            }
        }
        Self { lo, hi }
    }

    fn concat(&self, other: &Domain) -> Domain {
        let mut lo = self.lo.clone();
        lo.extend_from_slice(&other.lo);
        let mut hi = self.hi.clone();
        hi.extend_from_slice(&other.hi);
        Domain { lo, hi }
    }
}

/// Base manifold in one chart.
#[derive(Clone)]
pub struct ChartedManifold {
    dim: usize,
    metric: MetricFn,
    domain: Domain,
    sample_box: Domain,
    analytic_christoffel: Option<TensorFn>,
    analytic_curvature: Option<TensorFn>,
    label: String,
    scheme: FdScheme,
    sample_margin: f64,
}

impl fmt::Debug for ChartedManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartedManifold")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("analytic", &self.analytic_christoffel.is_some())
            .finish()
    }
}

/// Curvature of the base at a point, both index positions.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub up: DenseTensor,
    pub down: DenseTensor,
}

impl ChartedManifold {
    /// Manifold with a finite-difference-only metric. `sample_box` must be
    /// a finite sub-box of `domain`.
    pub fn new(label: impl Into<String>, dim: usize, metric: MetricFn, domain: Domain, sample_box: Domain) -> Result<Self> {
        if dim < 2 {
            return Err(GeoError::Config(format!("manifold dimension must be >= 2, got {dim}")));
        }
        if domain.lo.len() != dim || sample_box.lo.len() != dim {
            return Err(GeoError::Config("domain dimension mismatch".into()));
        }
        if sample_box.lo.iter().chain(&sample_box.hi).any(|v| !v.is_finite()) {
            return Err(GeoError::Config("sampling box must be finite".into()));
        }
        Ok(Self {
            dim,
            metric,
            domain,
            sample_box,
            analytic_christoffel: None,
            analytic_curvature: None,
            label: label.into(),
            scheme: FdScheme::default(),
            sample_margin: 0.05,
        })
    }

    pub fn with_analytic(mut self, christoffel: TensorFn, curvature: Option<TensorFn>) -> Self {
        self.analytic_christoffel = Some(christoffel);
        self.analytic_curvature = curvature;
        self
    }

    /// Same manifold with the analytic shortcuts removed.
    pub fn finite_difference_only(&self) -> Self {
        let mut m = self.clone();
        m.analytic_christoffel = None;
        m.analytic_curvature = None;
        m
    }

    pub fn with_scheme(mut self, scheme: FdScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_sample_margin(mut self, margin: f64) -> Self {
        self.sample_margin = margin;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn scheme(&self) -> &FdScheme {
        &self.scheme
    }

    pub fn has_analytic(&self) -> bool {
        self.analytic_christoffel.is_some()
    }

    /// True when the metric is known to be flat (zero analytic curvature).
    pub fn is_flat_at(&self, x: &[f64]) -> Result<bool> {
        Ok(self.riemann(x)?.down.max_abs() < 1e-12)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(GeoError::Shape(format!("point has {} coordinates, manifold has dim {}", x.len(), self.dim)));
        }
        if !self.domain.contains(x) {
            return Err(GeoError::Domain(format!("{:?} not in chart of {}", x, self.label)));
        }
        Ok(())
    }

    pub fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let g = (self.metric)(x);
        ensure_finite(g.as_slice(), "metric components")?;
        Ok(g)
    }

    pub fn inverse_metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        inverse_metric(&self.metric(x)?)
    }

    pub fn inner(&self, x: &[f64], a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
        let g = self.metric(x)?;
        Ok((a.transpose() * g * b)[(0, 0)])
    }

    /// Γ^k_ij, index layout `[k, i, j]`.
    pub fn christoffel(&self, x: &[f64]) -> Result<DenseTensor> {
        self.check_point(x)?;
        match &self.analytic_christoffel {
            Some(f) => {
                let g = f(x);
                ensure_finite(g.data(), "christoffel symbols")?;
                Ok(g)
            }
            None => self.christoffel_fd(x),
        }
    }

    pub fn christoffel_fd(&self, x: &[f64]) -> Result<DenseTensor> {
        self.check_point(x)?;
        let metric = |p: &[f64]| self.metric(p);
        christoffel_from_metric(&metric, x, &self.scheme)
    }

    pub fn riemann(&self, x: &[f64]) -> Result<Curvature> {
        self.check_point(x)?;
        match &self.analytic_curvature {
            Some(f) => {
                let down = f(x);
                ensure_finite(down.data(), "curvature")?;
                let up = raise_riemann(&self.inverse_metric(x)?, &down);
                Ok(Curvature { up, down })
            }
            None => {
                let christoffel = |p: &[f64]| self.christoffel(p);
                let up = riemann_up_from_christoffel(&christoffel, x, &self.scheme)?;
                let down = lower_riemann(&self.metric(x)?, &up);
                Ok(Curvature { up, down })
            }
        }
    }

    /// Curvature from finite differences of the metric only.
    pub fn riemann_fd(&self, x: &[f64]) -> Result<Curvature> {
        let fd = self.finite_difference_only();
        fd.riemann(x)
    }

    /// (∇_a R)_ijkl, layout `[a, i, j, k, l]`.
    pub fn nabla_riemann(&self, x: &[f64]) -> Result<DenseTensor> {
        self.check_point(x)?;
        let gamma = self.christoffel(x)?;
        let down = self.riemann(x)?.down;
        let field = |p: &[f64]| self.riemann(p).map(|c| c.down);
        let d_down = finite_difference_derivative(&field, x, &self.scheme)?;
        Ok(covariant_derivative_riemann(&gamma, &down, &d_down))
    }

    pub fn orthonormal_frame(&self, x: &[f64]) -> Result<Vec<DVector<f64>>> {
        gram_schmidt_frame(&self.metric(x)?, &standard_basis(self.dim), None)
    }

    /// Ricci components ric_ab and scalar curvature, traced over the standard orthonormal frame.
    pub fn ricci_and_scalar(&self, x: &[f64]) -> Result<(DMatrix<f64>, f64)> {
        let frame = self.orthonormal_frame(x)?;
        self.ricci_and_scalar_with_frame(x, &frame)
    }

    /// ric(X,Y) = Σ_i R(X, e_i, e_i, Y) over the given g-orthonormal frame.
    pub fn ricci_and_scalar_with_frame(&self, x: &[f64], frame: &[DVector<f64>]) -> Result<(DMatrix<f64>, f64)> {
        let m = self.dim;
        let down = self.riemann(x)?.down;
        let mut ric = DMatrix::zeros(m, m);
        for e in frame {
            for a in 0..m {
                for b in 0..m {
                    let mut s = 0.0;
                    for p in 0..m {
                        for q in 0..m {
                            s += down.get(&[a, p, q, b]) * e[p] * e[q];
                        }
                    }
                    ric[(a, b)] += s;
                }
            }
        }
        let scalar = frame.iter().map(|e| (e.transpose() * &ric * e)[(0, 0)]).sum();
        Ok((ric, scalar))
    }

    /// Sectional curvature of span{X, Y}.
    pub fn sectional(&self, x: &[f64], a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
        let down = self.riemann(x)?.down;
        let g = self.metric(x)?;
        let num = contract4(&down, a, b, b, a);
        let aa = (a.transpose() * &g * a)[(0, 0)];
        let bb = (b.transpose() * &g * b)[(0, 0)];
        let ab = (a.transpose() * &g * b)[(0, 0)];
        let den = aa * bb - ab * ab;
        if den <= 0.0 {
            return Err(GeoError::Rank("degenerate plane".into()));
        }
        Ok(num / den)
    }

    /// Region used for random sampling: the sampling box shrunk by the configured margin.
    pub fn sampling_region(&self) -> Domain {
        self.sample_box.shrink(self.sample_margin)
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let region = self.sampling_region();
        region.lo.iter().zip(&region.hi).map(|(lo, hi)| rng.random_range(*lo..*hi)).collect()
    }

    fn metric_fn(&self) -> MetricFn {
        self.metric.clone()
    }
}

/// T(a, b, c, d) for a rank-4 tensor.
pub fn contract4(t: &DenseTensor, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>, d: &DVector<f64>) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if b[j] == 0.0 {
                continue;
            }
            for k in 0..n {
                if c[k] == 0.0 {
                    continue;
                }
                for l in 0..n {
                    s += t.get(&[i, j, k, l]) * a[i] * b[j] * c[k] * d[l];
                }
            }
        }
    }
    s
}

/// Declarative description of a test manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ZooSpec {
    Euclidean {
        dim: usize,
    },
    ConstantCurvature {
        dim: usize,
        curvature: f64,
    },
    Product {
        first: Box<ZooSpec>,
        second: Box<ZooSpec>,
    },
    /// Euclidean space with a Gaussian bump added to the metric:
    /// g = I + amplitude · exp(−|x − center|² / width²) · M, M fixed with unit
    /// diagonal and 0.3 off the diagonal.
    Perturbed {
        dim: usize,
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
}

impl ZooSpec {
    pub fn euclidean(dim: usize) -> Self {
        ZooSpec::Euclidean { dim }
    }

    pub fn constant_curvature(dim: usize, curvature: f64) -> Self {
        ZooSpec::ConstantCurvature { dim, curvature }
    }

    pub fn product(first: ZooSpec, second: ZooSpec) -> Self {
        ZooSpec::Product { first: Box::new(first), second: Box::new(second) }
    }

    pub fn perturbed(dim: usize, amplitude: f64) -> Self {
        ZooSpec::Perturbed { dim, amplitude, center: vec![0.0; dim], width: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            ZooSpec::Euclidean { dim } | ZooSpec::ConstantCurvature { dim, .. } | ZooSpec::Perturbed { dim, .. } => *dim,
            ZooSpec::Product { first, second } => first.dim() + second.dim(),
        }
    }

    pub fn build(&self) -> Result<ChartedManifold> {
        construct_zoo(self)
    }
}

/// Factor spaces in products may be one-dimensional lines.
fn factor_dim_ok(dim: usize, allow_line: bool) -> Result<()> {
    if dim >= 2 || (allow_line && dim == 1) {
        Ok(())
    } else {
        Err(GeoError::Config(format!("invalid dimension {dim}")))
    }
}

pub fn construct_zoo(spec: &ZooSpec) -> Result<ChartedManifold> {
    let raw = build_raw(spec, false)?;
    ChartedManifold::new(raw.label, raw.dim, raw.metric, raw.domain, raw.sample_box)
        .map(|m| match (raw.christoffel, raw.curvature) {
            (Some(c), k) => m.with_analytic(c, k),
            _ => m,
        })
        .and_then(|m| {
            if let ZooSpec::Perturbed { .. } = spec {
                check_positive_on_samples(&m)?;
            }
            Ok(m)
        })
}

struct RawManifold {
    label: String,
    dim: usize,
    metric: MetricFn,
    domain: Domain,
    sample_box: Domain,
    christoffel: Option<TensorFn>,
    curvature: Option<TensorFn>,
}

fn build_raw(spec: &ZooSpec, as_factor: bool) -> Result<RawManifold> {
    match spec {
        ZooSpec::Euclidean { dim } => {
            factor_dim_ok(*dim, as_factor)?;
            Ok(euclidean_raw(*dim))
        }
        ZooSpec::ConstantCurvature { dim, curvature } => {
            factor_dim_ok(*dim, false)?;
            if !curvature.is_finite() {
                return Err(GeoError::Config("curvature must be finite".into()));
            }
            if *curvature > 0.0 {
                Ok(sphere_raw(*dim, *curvature))
            } else if *curvature < 0.0 {
                Ok(hyperbolic_raw(*dim, *curvature))
            } else {
                Ok(euclidean_raw(*dim))
            }
        }
        ZooSpec::Product { first, second } => {
            let a = build_raw(first, true)?;
            let b = build_raw(second, true)?;
            Ok(product_raw(a, b))
        }
        ZooSpec::Perturbed { dim, amplitude, center, width } => {
            factor_dim_ok(*dim, false)?;
            if center.len() != *dim {
                return Err(GeoError::Config("bump center has wrong dimension".into()));
            }
            if !(*width > 0.0) || !amplitude.is_finite() {
                return Err(GeoError::Config("bump width must be positive and amplitude finite".into()));
            }
            Ok(perturbed_raw(*dim, *amplitude, center.clone(), *width))
        }
    }
}

fn euclidean_raw(dim: usize) -> RawManifold {
    RawManifold {
        label: format!("euclidean({dim})"),
        dim,
        metric: Arc::new(move |_| DMatrix::identity(dim, dim)),
        domain: Domain::unbounded(dim),
        sample_box: Domain::new(vec![-1.0; dim], vec![1.0; dim]),
        christoffel: Some(Arc::new(move |_| DenseTensor::zeros(&[dim, dim, dim]))),
        curvature: Some(Arc::new(move |_| DenseTensor::zeros(&[dim, dim, dim, dim]))),
    }
}

/// Christoffel symbols of a diagonal metric g = diag(d_k), given d and ∂_l d_k.
fn diagonal_christoffel(d: &[f64], dd: &DMatrix<f64>) -> DenseTensor {
    // dd[(l, k)] = ∂_l d_k
    let n = d.len();
    let mut gamma = DenseTensor::zeros(&[n, n, n]);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                if j == k {
                    v += dd[(i, k)];
                }
                if i == k {
                    v += dd[(j, k)];
                }
                if i == j {
                    v -= dd[(k, i)];
                }
                gamma.set(&[k, i, j], 0.5 * v / d[k]);
            }
        }
    }
    gamma
}

fn constant_curvature_tensor(g: &DMatrix<f64>, c: f64) -> DenseTensor {
    // R(X,Y)Z = c(<Y,Z>X − <X,Z>Y)  =>  R_ijkl = c(g_jk g_il − g_ik g_jl)
    let n = g.nrows();
    let mut r = DenseTensor::zeros(&[n, n, n, n]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    r.set(&[i, j, k, l], c * (g[(j, k)] * g[(i, l)] - g[(i, k)] * g[(j, l)]));
                }
            }
        }
    }
    r
}

/// Nested polar chart of the round sphere of curvature c:
/// g = (1/c)(dx₁² + sin²x₁ dx₂² + sin²x₁ sin²x₂ dx₃² + …).
fn sphere_raw(dim: usize, c: f64) -> RawManifold {
    let diag = move |x: &[f64]| -> Vec<f64> {
        let mut d = Vec::with_capacity(dim);
        let mut prod = 1.0 / c;
        for k in 0..dim {
            d.push(prod);
            prod *= x[k].sin().powi(2);
        }
        d
    };
    let metric: MetricFn = Arc::new(move |x| DMatrix::from_diagonal(&DVector::from_vec(diag(x))));
    let christoffel: TensorFn = Arc::new(move |x| {
        let d = diag(x);
        let mut dd = DMatrix::zeros(dim, dim);
        for l in 0..dim {
            let cot = x[l].cos() / x[l].sin();
            for k in (l + 1)..dim {
                dd[(l, k)] = 2.0 * cot * d[k];
            }
        }
        diagonal_christoffel(&d, &dd)
    });
    let curvature: TensorFn = Arc::new(move |x| {
        let g = DMatrix::from_diagonal(&DVector::from_vec(diag(x)));
        constant_curvature_tensor(&g, c)
    });
    let mut lo = vec![0.1; dim];
    let mut hi = vec![PI - 0.1; dim];
    lo[dim - 1] = -PI;
    hi[dim - 1] = PI;
    let domain = Domain::new(lo, hi);
    RawManifold {
        label: format!("constant_curvature({dim}, {c})"),
        dim,
        metric,
        sample_box: domain.clone(),
        domain,
        christoffel: Some(christoffel),
        curvature: Some(curvature),
    }
}

/// Poincaré half-space x_m > 0 of curvature c < 0: g = δ / (|c| x_m²).
fn hyperbolic_raw(dim: usize, c: f64) -> RawManifold {
    let k = -c;
    let last = dim - 1;
    let metric: MetricFn = Arc::new(move |x| DMatrix::identity(dim, dim) / (k * x[last] * x[last]));
    let christoffel: TensorFn = Arc::new(move |x| {
        let d = vec![1.0 / (k * x[last] * x[last]); dim];
        let mut dd = DMatrix::zeros(dim, dim);
        for kk in 0..dim {
            dd[(last, kk)] = -2.0 / (k * x[last].powi(3));
        }
        diagonal_christoffel(&d, &dd)
    });
    let curvature: TensorFn = Arc::new(move |x| {
        let g = DMatrix::identity(dim, dim) / (k * x[last] * x[last]);
        constant_curvature_tensor(&g, c)
    });
    let mut lo = vec![f64::NEG_INFINITY; dim];
    let hi = vec![f64::INFINITY; dim];
    lo[last] = 0.0;
    let mut slo = vec![-1.0; dim];
    let mut shi = vec![1.0; dim];
    slo[last] = 0.5;
    shi[last] = 2.0;
    RawManifold {
        label: format!("constant_curvature({dim}, {c})"),
        dim,
        metric,
        domain: Domain::new(lo, hi),
        sample_box: Domain::new(slo, shi),
        christoffel: Some(christoffel),
        curvature: Some(curvature),
    }
}

fn product_raw(a: RawManifold, b: RawManifold) -> RawManifold {
    let (da, db) = (a.dim, b.dim);
    let dim = da + db;
    let (ma, mb) = (a.metric.clone(), b.metric.clone());
    let metric: MetricFn = Arc::new(move |x| {
        let mut g = DMatrix::zeros(dim, dim);
        g.view_mut((0, 0), (da, da)).copy_from(&ma(&x[..da]));
        g.view_mut((da, da), (db, db)).copy_from(&mb(&x[da..]));
        g
    });
    let christoffel: Option<TensorFn> = match (a.christoffel, b.christoffel) {
        (Some(ca), Some(cb)) => Some(Arc::new(move |x| {
            let (ga, gb) = (ca(&x[..da]), cb(&x[da..]));
            let mut out = DenseTensor::zeros(&[dim, dim, dim]);
            for idx in ga.indices() {
                out.set(&idx, ga.get(&idx));
            }
            for idx in gb.indices() {
                out.set(&[idx[0] + da, idx[1] + da, idx[2] + da], gb.get(&idx));
            }
            out
        })),
        _ => None,
    };
    let curvature: Option<TensorFn> = match (a.curvature, b.curvature) {
        (Some(ra), Some(rb)) => Some(Arc::new(move |x| {
            let (ta, tb) = (ra(&x[..da]), rb(&x[da..]));
            let mut out = DenseTensor::zeros(&[dim, dim, dim, dim]);
            for idx in ta.indices() {
                out.set(&idx, ta.get(&idx));
            }
            for idx in tb.indices() {
                out.set(&[idx[0] + da, idx[1] + da, idx[2] + da, idx[3] + da], tb.get(&idx));
            }
            out
        })),
        _ => None,
    };
    RawManifold {
        label: format!("product({}, {})", a.label, b.label),
        dim,
        metric,
        domain: a.domain.concat(&b.domain),
        sample_box: a.sample_box.concat(&b.sample_box),
        christoffel: if curvature.is_some() { christoffel } else { None },
        curvature,
    }
}

fn perturbed_raw(dim: usize, amplitude: f64, center: Vec<f64>, width: f64) -> RawManifold {
    let shape = DMatrix::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { 0.3 });
    let metric: MetricFn = Arc::new(move |x| {
        let r2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
        let bump = (-r2 / (width * width)).exp();
        DMatrix::identity(dim, dim) + &shape * (amplitude * bump)
    });
    RawManifold {
        label: format!("perturbed({dim}, {amplitude})"),
        dim,
        metric,
        domain: Domain::unbounded(dim),
        sample_box: Domain::new(vec![-1.0; dim], vec![1.0; dim]),
        christoffel: None,
        curvature: None,
    }
}

fn check_positive_on_samples(m: &ChartedManifold) -> Result<()> {
    let region = m.sampling_region();
    // corners and center of the sampling box plus a coarse lattice
    let n = m.dim();
    let steps = 3usize;
    let total = steps.pow(n as u32);
    for t in 0..total {
        let mut rem = t;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let s = rem % steps;
                rem /= steps;
                region.lo[i] + (region.hi[i] - region.lo[i]) * s as f64 / (steps - 1) as f64
            })
            .collect();
        let g = (m.metric_fn())(&x);
        if g.cholesky().is_none() {
            return Err(GeoError::Config(format!("perturbed metric not positive-definite at {:?}", x)));
        }
    }
    Ok(())
}
