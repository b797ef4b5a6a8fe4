//! The tangent sphere bundle S_rM = {|u| = r(x)} ⊂ TM with the metric induced
//! from g^{f1,f2}, f1 and f2 constant.
//!
//! Second fundamental form, mean curvature, and (for constant r) curvature,
//! Ricci and scalar curvature through the Gauss equation. The scanner in
//! [`scan`] sweeps (f1, f2, r) for positive scalar curvature.

pub mod scan;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::sasaki::{AdaptedFrame, SasakiAt, SplitTangentVector, TangentBundlePoint, WeightedSasakiMetric};

/// Radius of the sphere bundle as a function on the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusSpec {
    Constant { value: f64 },
    /// r = offset + gradient·x in base coordinates
    Affine { offset: f64, gradient: Vec<f64> },
}

impl RadiusSpec {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            RadiusSpec::Constant { value } => *value,
            RadiusSpec::Affine { offset, gradient } => offset + gradient.iter().zip(x).map(|(a, b)| a * b).sum::<f64>(),
        }
    }

    /// Coordinate partials ∂_i r.
    pub fn differential(&self, x: &[f64]) -> DVector<f64> {
        match self {
            RadiusSpec::Constant { .. } => DVector::zeros(x.len()),
            RadiusSpec::Affine { gradient, .. } => DVector::from_column_slice(gradient),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, RadiusSpec::Constant { .. })
    }
}

/// Coefficients of the unit normal U^G = a·grad r + b·ξ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalField {
    pub a: f64,
    pub b: f64,
}

/// S_rM with its ambient weighted Sasaki metric.
#[derive(Debug, Clone)]
pub struct SphereBundle {
    metric: WeightedSasakiMetric,
    radius: RadiusSpec,
}

impl SphereBundle {
    pub fn new(metric: WeightedSasakiMetric, radius: RadiusSpec) -> Result<Self> {
        match &radius {
            RadiusSpec::Constant { value } if !(*value > 0.0 && value.is_finite()) => {
                return Err(GeoError::Config(format!("radius must be positive, got {value}")));
            }
            RadiusSpec::Affine { offset, gradient } => {
                if gradient.len() != metric.dim() {
                    return Err(GeoError::Config("radius gradient has wrong dimension".into()));
                }
                if !offset.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
                    return Err(GeoError::Config("radius coefficients must be finite".into()));
                }
            }
            _ => {}
        }
        Ok(Self { metric, radius })
    }

    pub fn constant(metric: WeightedSasakiMetric, r: f64) -> Result<Self> {
        Self::new(metric, RadiusSpec::Constant { value: r })
    }

    pub fn metric(&self) -> &WeightedSasakiMetric {
        &self.metric
    }

    pub fn radius(&self) -> &RadiusSpec {
        &self.radius
    }

    /// n = m − 1, the fiber dimension.
    pub fn fiber_dim(&self) -> usize {
        self.metric.dim() - 1
    }

    fn radius_at(&self, x: &[f64]) -> Result<f64> {
        let r = self.radius.value(x);
        if !(r > 0.0 && r.is_finite()) {
            return Err(GeoError::Domain(format!("radius {r} at {x:?} is not positive")));
        }
        Ok(r)
    }

    /// The point (x, u) with u = r(x)·direction/|direction|.
    pub fn point_on_bundle(&self, x: &[f64], direction: &DVector<f64>) -> Result<TangentBundlePoint> {
        let g = self.metric.base().metric(x)?;
        let norm = (direction.transpose() * &g * direction)[(0, 0)].sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(GeoError::Rank("fiber direction is zero".into()));
        }
        let u = direction * (self.radius_at(x)? / norm);
        Ok(TangentBundlePoint { x: x.to_vec(), u })
    }

    /// Base point uniform in the sampling box, fiber point uniform on the
    /// sphere via a normalized Gaussian in an orthonormal frame.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TangentBundlePoint> {
        let x = self.metric.base().sample_point(rng);
        let dir = random_unit_direction(self.metric.base(), &x, rng)?;
        self.point_on_bundle(&x, &dir)
    }

    pub fn at(&self, p: &TangentBundlePoint) -> Result<SphereBundleAt<'_>> {
        let m = self.metric.dim();
        let r = self.radius_at(&p.x)?;
        let g = self.metric.base().metric(&p.x)?;
        if p.u.len() != m {
            return Err(GeoError::Shape(format!("fiber vector has {} components, expected {m}", p.u.len())));
        }
        let norm = (p.u.transpose() * &g * &p.u)[(0, 0)].sqrt();
        if (norm - r).abs() > 1e-8 * r.max(1.0) {
            return Err(GeoError::Precondition(format!("|u| = {norm} but r(x) = {r}: point is off the sphere bundle")));
        }
        let frame = AdaptedFrame::aligned_with(&g, &p.u)?;
        let sasaki = self.metric.at_with_frame(p, frame)?;
        let ginv = crate::levi_civita::inverse_metric(&g)?;
        let dr = self.radius.differential(&p.x);
        let grad_r = &ginv * &dr;
        // ∇_i ∂_j r = ∂_i∂_j r − Γ^k_ij ∂_k r, the radii used here have ∂²r = 0
        let hess_r = if self.radius.is_constant() {
            DMatrix::zeros(m, m)
        } else {
            let gamma = self.metric.base().christoffel(&p.x)?;
            let lower = DMatrix::from_fn(m, m, |i, j| -(0..m).map(|k| gamma.get(&[k, i, j]) * dr[k]).sum::<f64>());
            &ginv * lower
        };
        let tau = (grad_r.transpose() * &g * &grad_r)[(0, 0)].sqrt();
        let (f1, f2) = (self.metric.f1(), self.metric.f2());
        let delta = f2 / f1;
        let b = 1.0 / (r * (f2 + delta * f2 * tau * tau).sqrt());
        let normal = NormalField { a: -delta * b * r, b };
        Ok(SphereBundleAt { bundle: self, sasaki, r, grad_r, hess_r, tau, normal })
    }
}

pub(crate) fn random_unit_direction<R: Rng + ?Sized>(
    base: &crate::base_manifold::ChartedManifold,
    x: &[f64],
    rng: &mut R,
) -> Result<DVector<f64>> {
    let frame = base.orthonormal_frame(x)?;
    loop {
        let z: Vec<f64> = (0..frame.len()).map(|_| rng.sample(StandardNormal)).collect();
        let norm = z.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let mut dir = DVector::zeros(frame.len());
            for (c, e) in z.iter().zip(&frame) {
                dir += e * (c / norm);
            }
            return Ok(dir);
        }
    }
}

/// Scalar curvature of S_rM, constant r, from the base scalar curvature S
/// and Σ(ℛ_ijk)² at the point: S^G + n(n−1)/(f2 r²).
pub fn scalar_srm_from_parts(m: usize, f1: f64, f2: f64, r: f64, base_scalar: f64, script_r_square_sum: f64) -> f64 {
    let n = (m - 1) as f64;
    base_scalar / f1 - f2 / (4.0 * f1 * f1) * script_r_square_sum + n * (n - 1.0) / (f2 * r * r)
}

/// Geometry of S_rM at one of its points.
#[derive(Debug, Clone)]
pub struct SphereBundleAt<'a> {
    bundle: &'a SphereBundle,
    sasaki: SasakiAt<'a>,
    r: f64,
    grad_r: DVector<f64>,
    hess_r: DMatrix<f64>,
    tau: f64,
    normal: NormalField,
}

impl<'a> SphereBundleAt<'a> {
    pub fn sasaki(&self) -> &SasakiAt<'a> {
        &self.sasaki
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// τ = ‖grad r‖.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn unit_normal(&self) -> NormalField {
        self.normal
    }

    pub fn normal_vector(&self) -> SplitTangentVector {
        SplitTangentVector::new(&self.grad_r * self.normal.a, &self.sasaki.point().u * self.normal.b)
    }

    fn u(&self) -> &DVector<f64> {
        &self.sasaki.point().u
    }

    /// ⟨X^v, u⟩ − r·X(r); zero exactly on tangent vectors.
    pub fn tangency_defect(&self, x: &SplitTangentVector) -> f64 {
        self.sasaki.ip(&x.v, self.u()) - self.r * self.sasaki.ip(&x.h, &self.grad_r)
    }

    fn require_tangent(&self, vs: &[&SplitTangentVector]) -> Result<()> {
        for v in vs {
            let scale = self.sasaki.sasaki_inner(v, v).sqrt() * self.r.max(1.0);
            if self.tangency_defect(v).abs() > 1e-8 * scale.max(1.0) {
                return Err(GeoError::Precondition(format!("vector is not tangent to S_rM (defect {:.3e})", self.tangency_defect(v))));
            }
        }
        Ok(())
    }

    fn require_constant(&self) -> Result<()> {
        if !self.bundle.radius.is_constant() {
            return Err(GeoError::Precondition("operation requires a constant radius".into()));
        }
        Ok(())
    }

    /// X − G(X, U)U.
    pub fn project_tangent(&self, x: &SplitTangentVector) -> SplitTangentVector {
        let n = self.normal_vector();
        x.clone() - self.sasaki.g_inner(x, &n) * n
    }

    /// G-orthonormal frame of T S_rM: horizontal lifts of the adapted frame
    /// (e_m = u/r) and vertical lifts of e_1..e_n, with the normal projected out.
    pub fn tangent_frame(&self) -> Vec<SplitTangentVector> {
        let full = self.sasaki.g_orthonormal_frame();
        let m = self.sasaki.frame().e.len();
        let mut out: Vec<SplitTangentVector> = Vec::with_capacity(2 * m - 1);
        for v in full.into_iter().take(2 * m - 1) {
            let mut w = self.project_tangent(&v);
            for e in &out {
                w = w.clone() - self.sasaki.g_inner(&w, e) * e.clone();
            }
            let norm = self.sasaki.g_inner(&w, &w).sqrt();
            out.push((1.0 / norm) * w);
        }
        out
    }

    /// Symmetrized so that swapping the arguments gives the same bits.
    fn alpha(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> f64 {
        0.5 * (self.alpha_ordered(x, y) + self.alpha_ordered(y, x))
    }

    fn alpha_ordered(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> f64 {
        let s = &self.sasaki;
        let (f1, f2) = (s.metric().f1(), s.metric().f2());
        let NormalField { a, b } = self.normal;
        let a_r = s.ip(&s.tensor_a(x, y).h, &self.grad_r);
        let hess_term = s.ip(&y.h, &(&self.hess_r * &x.h));
        let (xr, yr) = (s.ip(&x.h, &self.grad_r), s.ip(&y.h, &self.grad_r));
        a * f1 * (a_r - hess_term) + b * f2 * (xr * yr - s.ip(&y.v, &x.v))
    }

    /// α(X, Y) = G(∇^G_X Y, U^G) for tangent X, Y.
    pub fn second_fundamental(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> Result<f64> {
        self.require_tangent(&[x, y])?;
        Ok(self.alpha(x, y))
    }

    /// α(X, Y) = −(√f2/r)⟨X^v, Y^v⟩, constant r only.
    pub fn second_fundamental_constant(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> Result<f64> {
        self.require_constant()?;
        self.require_tangent(&[x, y])?;
        Ok(self.alpha_constant(x, y))
    }

    fn alpha_constant(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> f64 {
        -self.sasaki.metric().f2().sqrt() / self.r * self.sasaki.ip(&x.v, &y.v)
    }

    /// Trace of α over a G-orthonormal tangent frame.
    pub fn mean_curvature_trace(&self) -> f64 {
        self.tangent_frame().iter().map(|e| self.alpha(e, e)).sum()
    }

    /// −n / (r√(f2 + δf2τ²)), valid when ∇dr = 0.
    pub fn mean_curvature(&self) -> Result<f64> {
        if self.hess_r.norm() >= 1e-8 {
            return Err(GeoError::Precondition("closed-form mean curvature needs a parallel radius gradient".into()));
        }
        let f2 = self.sasaki.metric().f2();
        let delta = self.sasaki.metric().delta();
        let n = self.bundle.fiber_dim() as f64;
        Ok(-n / (self.r * (f2 + delta * f2 * self.tau * self.tau).sqrt()))
    }

    fn gauss(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector, w: &SplitTangentVector) -> f64 {
        self.sasaki.curvature_rg4(x, y, z, w) - self.alpha_constant(x, z) * self.alpha_constant(y, w)
            + self.alpha_constant(y, z) * self.alpha_constant(x, w)
    }

    /// R̃(X, Y, Z, W) = R^G(X, Y, Z, W) − α(X, Z)α(Y, W) + α(Y, Z)α(X, W).
    pub fn curvature_srm(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector, w: &SplitTangentVector) -> Result<f64> {
        self.require_constant()?;
        self.require_tangent(&[x, y, z, w])?;
        Ok(self.gauss(x, y, z, w))
    }

    pub fn sectional_srm(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> Result<f64> {
        let s = &self.sasaki;
        let den = s.g_inner(x, x) * s.g_inner(y, y) - s.g_inner(x, y).powi(2);
        if den <= 1e-14 * (s.g_inner(x, x) * s.g_inner(y, y)).max(f64::MIN_POSITIVE) {
            return Err(GeoError::Rank("degenerate plane".into()));
        }
        Ok(self.curvature_srm(x, y, y, x)? / den)
    }

    /// r̃ic(X, Y) = ric^G(X, Y) + ((n − 1)/r²)⟨X^v, Y^v⟩.
    pub fn ricci_srm(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> Result<f64> {
        self.require_constant()?;
        self.require_tangent(&[x, y])?;
        let n = self.bundle.fiber_dim() as f64;
        Ok(self.sasaki.ricci_g(x, y) + (n - 1.0) / (self.r * self.r) * self.sasaki.ip(&x.v, &y.v))
    }

    /// Σ R̃(X, E, E, Y) over the tangent frame.
    pub fn ricci_srm_trace(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> Result<f64> {
        self.require_constant()?;
        self.require_tangent(&[x, y])?;
        Ok(self.tangent_frame().iter().map(|e| self.gauss(x, e, e, y)).sum())
    }

    /// S̃ = S^G + n(n − 1)/(f2 r²).
    pub fn scalar_srm(&self) -> Result<f64> {
        self.require_constant()?;
        let s = &self.sasaki;
        let (f1, f2) = (s.metric().f1(), s.metric().f2());
        let m = s.frame().e.len();
        Ok(scalar_srm_from_parts(m, f1, f2, self.r, s.base_scalar(), s.script_r_square_sum()))
    }

    /// Double trace of R̃ over the tangent frame.
    pub fn scalar_srm_trace(&self) -> Result<f64> {
        self.require_constant()?;
        let frame = self.tangent_frame();
        let mut total = 0.0;
        for a in &frame {
            for b in &frame {
                total += self.gauss(a, b, b, a);
            }
        }
        Ok(total)
    }
}
