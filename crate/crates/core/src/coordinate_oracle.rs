//! Brute-force curvature of (TM, g^{f1,f2}) in induced coordinates (x, u).
//!
//! The bundle metric is written out as a 2m×2m matrix
//! G = f1 g_ij dx^i dx^j + f2 g_kl (du^k + Γ^k_ia u^a dx^i)(du^l + Γ^l_jb u^b dx^j)
//! and everything else comes from finite differences of that matrix. Nothing
//! here calls into the closed-form Sasaki code.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::base_manifold::{ChartedManifold, Curvature};
use crate::error::{GeoError, Result};
use crate::levi_civita::{christoffel_from_metric, inverse_metric, lower_riemann, riemann_up_from_christoffel, symmetry_defect};
use crate::sasaki::{SplitTangentVector, TangentBundlePoint};
use crate::tensorkit::{DenseTensor, FdOrder, FdScheme};

/// Weight of the vertical block; `Variable` carries f2(x).
#[derive(Clone)]
pub enum FiberWeight {
    Constant(f64),
    Variable(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl FiberWeight {
    pub fn at(&self, x: &[f64]) -> f64 {
        match self {
            FiberWeight::Constant(c) => *c,
            FiberWeight::Variable(f) => f(x),
        }
    }
}

impl fmt::Debug for FiberWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberWeight::Constant(c) => write!(f, "Constant({c})"),
            FiberWeight::Variable(_) => write!(f, "Variable(..)"),
        }
    }
}

/// Induced chart on TM over a charted base.
#[derive(Debug, Clone)]
pub struct InducedChart {
    base: ChartedManifold,
    f1: f64,
    f2: FiberWeight,
    christoffel_scheme: FdScheme,
    curvature_scheme: FdScheme,
}

/// Default step 10^-2.5 for both levels of differentiation.
pub const ORACLE_STEP: f64 = 3.162_277_660_168_379_5e-3;

impl InducedChart {
    pub fn new(base: ChartedManifold, f1: f64, f2: f64) -> Result<Self> {
        if !(f2 > 0.0 && f2.is_finite()) {
            return Err(GeoError::Config(format!("f2 must be positive, got {f2}")));
        }
        Self::with_fiber_weight(base, f1, FiberWeight::Constant(f2))
    }

    pub fn with_fiber_weight(base: ChartedManifold, f1: f64, f2: FiberWeight) -> Result<Self> {
        if !(f1 > 0.0 && f1.is_finite()) {
            return Err(GeoError::Config(format!("f1 must be positive, got {f1}")));
        }
        Ok(Self {
            base,
            f1,
            f2,
            christoffel_scheme: FdScheme { step: ORACLE_STEP, order: FdOrder::Fourth, richardson: false },
            curvature_scheme: FdScheme { step: ORACLE_STEP, order: FdOrder::Fourth, richardson: true },
        })
    }

    pub fn with_schemes(mut self, christoffel: FdScheme, curvature: FdScheme) -> Self {
        self.christoffel_scheme = christoffel;
        self.curvature_scheme = curvature;
        self
    }

    pub fn base(&self) -> &ChartedManifold {
        &self.base
    }

    pub fn dim(&self) -> usize {
        2 * self.base.dim()
    }

    fn split_point<'p>(&self, p: &'p [f64]) -> Result<(&'p [f64], &'p [f64])> {
        let m = self.base.dim();
        if p.len() != 2 * m {
            return Err(GeoError::Shape(format!("bundle point has {} coordinates, expected {}", p.len(), 2 * m)));
        }
        Ok(p.split_at(m))
    }

    /// The bundle metric in coordinates (x, u).
    pub fn metric_matrix_tm(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let (x, u) = self.split_point(p)?;
        let m = self.base.dim();
        let g = self.base.metric(x)?;
        let gamma = self.base.christoffel(x)?;
        let f2 = self.f2.at(x);
        if !(f2 > 0.0 && f2.is_finite()) {
            return Err(GeoError::Numeric(format!("fiber weight {f2} at {x:?}")));
        }
        // N^k_i = Γ^k_ia u^a, so du^k + N^k_i dx^i is the vertical coframe
        let n = DMatrix::from_fn(m, m, |k, i| (0..m).map(|a| gamma.get(&[k, i, a]) * u[a]).sum::<f64>());
        let gn = &g * &n;
        let mut out = DMatrix::zeros(2 * m, 2 * m);
        let xx = &g * self.f1 + n.transpose() * &gn * f2;
        let xu = n.transpose() * &g * f2;
        out.view_mut((0, 0), (m, m)).copy_from(&xx);
        out.view_mut((0, m), (m, m)).copy_from(&xu);
        out.view_mut((m, 0), (m, m)).copy_from(&xu.transpose());
        out.view_mut((m, m), (m, m)).copy_from(&(&g * f2));
        Ok(out)
    }

    /// Christoffel symbols of the bundle metric, layout `[C, A, B]`.
    pub fn christoffel_tm(&self, p: &[f64]) -> Result<DenseTensor> {
        let metric = |q: &[f64]| self.metric_matrix_tm(q);
        christoffel_from_metric(&metric, p, &self.christoffel_scheme)
    }

    /// Full curvature of the bundle metric by nested finite differences.
    pub fn curvature_tm_coordinates(&self, p: &[f64]) -> Result<Curvature> {
        let christoffel = |q: &[f64]| self.christoffel_tm(q);
        let up = riemann_up_from_christoffel(&christoffel, p, &self.curvature_scheme)?;
        let down = lower_riemann(&self.metric_matrix_tm(p)?, &up);
        crate::error::ensure_finite(down.data(), "bundle curvature")?;
        Ok(Curvature { up, down })
    }

    /// Ricci matrix (coordinate components) and scalar curvature.
    pub fn ricci_scalar_tm(&self, p: &[f64]) -> Result<(DMatrix<f64>, f64)> {
        let at = self.evaluate_coordinates(p)?;
        Ok((at.ricci.clone(), at.scalar))
    }

    /// Coordinate transform for the adapted frame at `point`, using `frame` (g-orthonormal).
    pub fn frame_change(&self, point: &TangentBundlePoint, frame: &[DVector<f64>]) -> Result<FrameChange> {
        let m = self.base.dim();
        if frame.len() != m || point.u.len() != m {
            return Err(GeoError::Shape("frame or fiber vector has wrong size".into()));
        }
        let gamma = self.base.christoffel(&point.x)?;
        let mut columns = Vec::with_capacity(2 * m);
        for e in frame {
            columns.push(SplitTangentVector::horizontal(e.clone()));
        }
        for e in frame {
            columns.push(SplitTangentVector::vertical(e.clone()));
        }
        let to_coord = |s: &SplitTangentVector| lift_to_coordinates(&gamma, &point.u, s);
        let matrix = DMatrix::from_columns(&columns.iter().map(to_coord).collect::<Vec<_>>());
        Ok(FrameChange { matrix, gamma, u: point.u.clone() })
    }

    /// Evaluates curvature, Ricci and scalar curvature at a bundle point,
    /// ready for repeated contractions with split vectors.
    pub fn evaluate(&self, point: &TangentBundlePoint) -> Result<OracleAt> {
        let mut coords = point.x.clone();
        coords.extend(point.u.iter());
        let mut at = self.evaluate_coordinates(&coords)?;
        let gamma = self.base.christoffel(&point.x)?;
        at.lift = Some((gamma, point.u.clone()));
        Ok(at)
    }

    fn evaluate_coordinates(&self, p: &[f64]) -> Result<OracleAt> {
        let metric = self.metric_matrix_tm(p)?;
        let inverse = inverse_metric(&metric)?;
        let curvature = self.curvature_tm_coordinates(p)?;
        let n = metric.nrows();
        let down = &curvature.down;
        // ric_AD = G^{BC} R_ABCD
        let ricci = DMatrix::from_fn(n, n, |a, d| {
            let mut s = 0.0;
            for b in 0..n {
                for c in 0..n {
                    s += inverse[(b, c)] * down.get(&[a, b, c, d]);
                }
            }
            s
        });
        let scalar = (&inverse.component_mul(&ricci)).sum();
        Ok(OracleAt { metric, inverse, curvature, ricci, scalar, lift: None })
    }

    /// R^G(X, Y, Z, W) from the coordinate curvature.
    pub fn curvature_in_adapted_frame(
        &self,
        point: &TangentBundlePoint,
        x: &SplitTangentVector,
        y: &SplitTangentVector,
        z: &SplitTangentVector,
        w: &SplitTangentVector,
    ) -> Result<f64> {
        self.evaluate(point)?.rg4(x, y, z, w)
    }
}

/// (h, v) ↦ (h, v − Γ(h, u)) in coordinates (ẋ, u̇).
fn lift_to_coordinates(gamma: &DenseTensor, u: &DVector<f64>, s: &SplitTangentVector) -> DVector<f64> {
    let m = u.len();
    let mut out = DVector::zeros(2 * m);
    for i in 0..m {
        out[i] = s.h[i];
    }
    for k in 0..m {
        let mut corr = 0.0;
        for i in 0..m {
            for j in 0..m {
                corr += gamma.get(&[k, i, j]) * s.h[i] * u[j];
            }
        }
        out[m + k] = s.v[k] - corr;
    }
    out
}

/// Columns are the coordinate images of (e_1,0)..(e_m,0),(0,e_1)..(0,e_m).
#[derive(Debug, Clone)]
pub struct FrameChange {
    pub matrix: DMatrix<f64>,
    gamma: DenseTensor,
    u: DVector<f64>,
}

impl FrameChange {
    pub fn to_coordinates(&self, s: &SplitTangentVector) -> DVector<f64> {
        lift_to_coordinates(&self.gamma, &self.u, s)
    }

    /// Components Mᵀ B M of a coordinate bilinear form in the adapted frame.
    pub fn bilinear_to_adapted(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.matrix.transpose() * b * &self.matrix
    }
}

/// Oracle quantities at one bundle point.
#[derive(Debug, Clone)]
pub struct OracleAt {
    pub metric: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub curvature: Curvature,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    lift: Option<(DenseTensor, DVector<f64>)>,
}

impl OracleAt {
    fn to_coords(&self, s: &SplitTangentVector) -> Result<DVector<f64>> {
        let (gamma, u) = self
            .lift
            .as_ref()
            .ok_or_else(|| GeoError::Precondition("evaluated from raw coordinates, no frame data".into()))?;
        if s.dim() != u.len() {
            return Err(GeoError::Shape("split vector has wrong size".into()));
        }
        Ok(lift_to_coordinates(gamma, u, s))
    }

    pub fn rg4(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector, w: &SplitTangentVector) -> Result<f64> {
        let (a, b, c, d) = (self.to_coords(x)?, self.to_coords(y)?, self.to_coords(z)?, self.to_coords(w)?);
        Ok(contract4_any(&self.curvature.down, &a, &b, &c, &d))
    }

    pub fn ricci(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> Result<f64> {
        let (a, b) = (self.to_coords(x)?, self.to_coords(y)?);
        Ok((a.transpose() * &self.ricci * b)[(0, 0)])
    }

    /// Largest violation of curvature symmetries and Bianchi, relative to the largest entry.
    pub fn relative_symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.curvature.down) / self.curvature.down.max_abs().max(1e-300)
    }

    /// Smallest eigenvalue of the bundle metric.
    pub fn min_metric_eigenvalue(&self) -> f64 {
        self.metric.clone().symmetric_eigen().eigenvalues.min()
    }
}

fn contract4_any(t: &DenseTensor, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>, d: &DVector<f64>) -> f64 {
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
                let w = a[i] * b[j] * c[k];
                for l in 0..n {
                    s += t.get(&[i, j, k, l]) * w * d[l];
                }
            }
        }
    }
    s
}
