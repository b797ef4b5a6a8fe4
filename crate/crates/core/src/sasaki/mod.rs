//! Weighted Sasaki metrics G = g^{f1,f2} = f1·π*g ⊕ f2·π*g on TM = H ⊕ V,
//! with f1, f2 constant.
//!
//! Tangent vectors of TM are handled in split form (horizontal part,
//! vertical part), each an m-vector in the base coordinate frame. `⟨·,·⟩`
//! below is the plain Sasaki pairing g(h, h') + g(v, v'); G multiplies the
//! two blocks by f1 and f2.
//!
//! All quantities at one bundle point are evaluated through [`SasakiAt`],
//! which caches the base metric, an orthonormal frame, R and ∇R.

mod assembly;
mod blocks;

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::base_manifold::ChartedManifold;
use crate::error::{GeoError, Result};
use crate::levi_civita::inverse_metric;
use crate::tensorkit::{gram_schmidt_frame, standard_basis, DenseTensor};

pub use blocks::Rg4Pattern;

/// A point (x, u) of TM.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBundlePoint {
    pub x: Vec<f64>,
    pub u: DVector<f64>,
}

impl TangentBundlePoint {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Self {
        Self { x, u: DVector::from_vec(u) }
    }
}

/// Element of T(TM) as (horizontal, vertical).
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTangentVector {
    pub h: DVector<f64>,
    pub v: DVector<f64>,
}

impl SplitTangentVector {
    pub fn new(h: DVector<f64>, v: DVector<f64>) -> Self {
        assert_eq!(h.len(), v.len());
        Self { h, v }
    }

    pub fn from_slices(h: &[f64], v: &[f64]) -> Self {
        Self::new(DVector::from_column_slice(h), DVector::from_column_slice(v))
    }

    pub fn zero(m: usize) -> Self {
        Self { h: DVector::zeros(m), v: DVector::zeros(m) }
    }

    pub fn horizontal(h: DVector<f64>) -> Self {
        let m = h.len();
        Self { h, v: DVector::zeros(m) }
    }

    pub fn vertical(v: DVector<f64>) -> Self {
        let m = v.len();
        Self { h: DVector::zeros(m), v }
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn h_part(&self) -> Self {
        Self::horizontal(self.h.clone())
    }

    pub fn v_part(&self) -> Self {
        Self::vertical(self.v.clone())
    }

    /// θ: H → V, V → 0.
    pub fn theta(&self) -> Self {
        Self::vertical(self.h.clone())
    }

    /// θᵗ: V → H, H → 0.
    pub fn theta_t(&self) -> Self {
        Self::horizontal(self.v.clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.h.amax().max(self.v.amax())
    }

    pub fn is_finite(&self) -> bool {
        self.h.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }
}

impl Add for SplitTangentVector {
    type Output = SplitTangentVector;
    fn add(self, o: Self) -> Self {
        Self { h: self.h + o.h, v: self.v + o.v }
    }
}

impl Sub for SplitTangentVector {
    type Output = SplitTangentVector;
    fn sub(self, o: Self) -> Self {
        Self { h: self.h - o.h, v: self.v - o.v }
    }
}

impl Neg for SplitTangentVector {
    type Output = SplitTangentVector;
    fn neg(self) -> Self {
        Self { h: -self.h, v: -self.v }
    }
}

impl Mul<SplitTangentVector> for f64 {
    type Output = SplitTangentVector;
    fn mul(self, o: SplitTangentVector) -> SplitTangentVector {
        SplitTangentVector { h: o.h * self, v: o.v * self }
    }
}

/// g-orthonormal frame e_1..e_m of T_xM, lifted to H as (e_i, 0) and to V as (0, e_i).
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub e: Vec<DVector<f64>>,
}

impl AdaptedFrame {
    /// Standard Gram–Schmidt frame of g at x.
    pub fn standard(g: &DMatrix<f64>) -> Result<Self> {
        Ok(Self { e: gram_schmidt_frame(g, &standard_basis(g.nrows()), None)? })
    }

    /// Frame whose last vector is u/|u|.
    pub fn aligned_with(g: &DMatrix<f64>, u: &DVector<f64>) -> Result<Self> {
        Ok(Self { e: gram_schmidt_frame(g, &standard_basis(g.nrows()), Some(u))? })
    }

    pub fn from_seed(g: &DMatrix<f64>, seed: &[DVector<f64>]) -> Result<Self> {
        Ok(Self { e: gram_schmidt_frame(g, seed, None)? })
    }

    pub fn horizontal(&self, i: usize) -> SplitTangentVector {
        SplitTangentVector::horizontal(self.e[i].clone())
    }

    pub fn vertical(&self, i: usize) -> SplitTangentVector {
        SplitTangentVector::vertical(self.e[i].clone())
    }
}

/// g^{f1,f2} over a base manifold, f1 and f2 positive constants.
#[derive(Debug, Clone)]
pub struct WeightedSasakiMetric {
    base: ChartedManifold,
    f1: f64,
    f2: f64,
    delta: f64,
}

impl WeightedSasakiMetric {
    pub fn new(base: ChartedManifold, f1: f64, f2: f64) -> Result<Self> {
        if !(f1 > 0.0 && f1.is_finite() && f2 > 0.0 && f2.is_finite()) {
            return Err(GeoError::Config(format!("weights must be positive and finite, got f1={f1}, f2={f2}")));
        }
        Ok(Self { base, f1, f2, delta: f2 / f1 })
    }

    pub fn sasaki(base: ChartedManifold) -> Self {
        Self::new(base, 1.0, 1.0).expect("unit weights are valid")
    }

    pub fn base(&self) -> &ChartedManifold {
        &self.base
    }

    pub fn f1(&self) -> f64 {
        self.f1
    }

    pub fn f2(&self) -> f64 {
        self.f2
    }

    /// δ = f2 / f1.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Evaluates the geometry at `p` using the standard orthonormal frame.
    pub fn at(&self, p: &TangentBundlePoint) -> Result<SasakiAt<'_>> {
        let g = self.base.metric(&p.x)?;
        let frame = AdaptedFrame::standard(&g)?;
        self.at_with_frame(p, frame)
    }

    /// Evaluates the geometry at `p` using a caller-supplied g-orthonormal frame.
    pub fn at_with_frame(&self, p: &TangentBundlePoint, frame: AdaptedFrame) -> Result<SasakiAt<'_>> {
        let m = self.dim();
        if p.u.len() != m {
            return Err(GeoError::Shape(format!("fiber vector has {} components, expected {m}", p.u.len())));
        }
        if frame.e.len() != m {
            return Err(GeoError::Shape("frame has wrong size".into()));
        }
        let g = self.base.metric(&p.x)?;
        let ginv = inverse_metric(&g)?;
        let curvature = self.base.riemann(&p.x)?;
        let nabla_down = self.base.nabla_riemann(&p.x)?;
        // raise the last index: (∇_a R)^l_ijk, layout [a, l, i, j, k]
        let mut nabla_up = DenseTensor::zeros(&[m, m, m, m, m]);
        for a in 0..m {
            for l in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            let v: f64 = (0..m).map(|q| ginv[(l, q)] * nabla_down.get(&[a, i, j, k, q])).sum();
                            nabla_up.set(&[a, l, i, j, k], v);
                        }
                    }
                }
            }
        }
        let (ric, scalar) = self.base.ricci_and_scalar_with_frame(&p.x, &frame.e)?;
        Ok(SasakiAt {
            metric: self,
            point: p.clone(),
            g,
            frame,
            r_up: curvature.up,
            r_down: curvature.down,
            nabla_up,
            base_ric: ric,
            base_scalar: scalar,
        })
    }
}

/// Cached geometry of (TM, G) at one bundle point.
#[derive(Debug, Clone)]
pub struct SasakiAt<'a> {
    metric: &'a WeightedSasakiMetric,
    point: TangentBundlePoint,
    g: DMatrix<f64>,
    frame: AdaptedFrame,
    r_up: DenseTensor,
    r_down: DenseTensor,
    nabla_up: DenseTensor,
    base_ric: DMatrix<f64>,
    base_scalar: f64,
}

impl<'a> SasakiAt<'a> {
    pub fn metric(&self) -> &WeightedSasakiMetric {
        self.metric
    }

    pub fn point(&self) -> &TangentBundlePoint {
        &self.point
    }

    pub fn frame(&self) -> &AdaptedFrame {
        &self.frame
    }

    pub fn base_metric(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn base_curvature(&self) -> &DenseTensor {
        &self.r_down
    }

    pub fn base_ricci(&self) -> &DMatrix<f64> {
        &self.base_ric
    }

    pub fn base_scalar(&self) -> f64 {
        self.base_scalar
    }

    fn dim(&self) -> usize {
        self.g.nrows()
    }

    fn f1(&self) -> f64 {
        self.metric.f1
    }

    fn f2(&self) -> f64 {
        self.metric.f2
    }

    fn delta(&self) -> f64 {
        self.metric.delta
    }

    fn u(&self) -> &DVector<f64> {
        &self.point.u
    }

    /// g(a, b) on the base.
    pub fn ip(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let m = self.dim();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += a[i] * self.g[(i, j)] * b[j];
            }
        }
        s
    }

    /// Sasaki pairing ⟨X, Y⟩ = g(X^h, Y^h) + g(X^v, Y^v).
    pub fn sasaki_inner(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> f64 {
        self.ip(&x.h, &y.h) + self.ip(&x.v, &y.v)
    }

    /// G(X, Y) = f1 g(X^h, Y^h) + f2 g(X^v, Y^v).
    pub fn g_inner(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> f64 {
        self.f1() * self.ip(&x.h, &y.h) + self.f2() * self.ip(&x.v, &y.v)
    }

    /// R(a, b)c on the base.
    pub fn base_r(&self, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> DVector<f64> {
        let m = self.dim();
        let mut out = DVector::zeros(m);
        for i in 0..m {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..m {
                    let w = a[i] * b[j] * c[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..m {
                        out[l] += self.r_up.get(&[l, i, j, k]) * w;
                    }
                }
            }
        }
        out
    }

    /// (∇_d R)(a, b)c on the base.
    pub fn base_nabla_r(&self, d: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> DVector<f64> {
        let m = self.dim();
        let mut out = DVector::zeros(m);
        for s in 0..m {
            if d[s] == 0.0 {
                continue;
            }
            for i in 0..m {
                if a[i] == 0.0 {
                    continue;
                }
                for j in 0..m {
                    if b[j] == 0.0 {
                        continue;
                    }
                    for k in 0..m {
                        let w = d[s] * a[i] * b[j] * c[k];
                        if w == 0.0 {
                            continue;
                        }
                        for l in 0..m {
                            out[l] += self.nabla_up.get(&[s, l, i, j, k]) * w;
                        }
                    }
                }
            }
        }
        out
    }

    /// ℛ(X, Y) = R(X^h, Y^h)u, a vertical vector.
    pub fn script_r(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> SplitTangentVector {
        SplitTangentVector::vertical(self.base_r(&x.h, &y.h, self.u()))
    }

    /// ⟨ℛ(X, Y), Z⟩ = g(R(X^h, Y^h)u, Z^v).
    fn script_r_pair(&self, x: &DVector<f64>, y: &DVector<f64>, z_v: &DVector<f64>) -> f64 {
        self.ip(&self.base_r(x, y, self.u()), z_v)
    }

    /// A(X, Y) = (δ/2) Σ_i (⟨ℛ(X,e_i),Y⟩ + ⟨ℛ(Y,e_i),X⟩) e_i, horizontal.
    pub fn tensor_a(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> SplitTangentVector {
        let m = self.dim();
        let mut h = DVector::zeros(m);
        for e in &self.frame.e {
            let c = self.script_r_pair(&x.h, e, &y.v) + self.script_r_pair(&y.h, e, &x.v);
            h += e * c;
        }
        SplitTangentVector::horizontal(h * (0.5 * self.delta()))
    }

    /// B(X, Y) = Y(φ2) X^v − δ⟨X^v, Y^v⟩ grad φ2; zero when f2 is constant.
    pub fn tensor_b(&self, grad_phi2: &DVector<f64>, x: &SplitTangentVector, y: &SplitTangentVector) -> SplitTangentVector {
        let y_phi = self.ip(&y.h, grad_phi2);
        let h = grad_phi2 * (-self.delta() * self.ip(&x.v, &y.v));
        SplitTangentVector::new(h, &x.v * y_phi)
    }

    /// (∇_D ℛ)(Y, Z) = (∇_{D^h} R)(Y^h, Z^h)u + R(Y^h, Z^h)D^v.
    pub fn nabla_script_r(&self, d: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector) -> SplitTangentVector {
        let v = self.base_nabla_r(&d.h, &y.h, &z.h, self.u()) + self.base_r(&y.h, &z.h, &d.v);
        SplitTangentVector::vertical(v)
    }

    /// A^{∇_D ℛ}(Y, Z), defined from ∇_D ℛ the way A is defined from ℛ.
    pub fn a_nabla_r(&self, d: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector) -> SplitTangentVector {
        let m = self.dim();
        let mut h = DVector::zeros(m);
        for (i, e) in self.frame.e.iter().enumerate() {
            let ei = self.frame.horizontal(i);
            let c = self.sasaki_inner(&self.nabla_script_r(d, y, &ei), z) + self.sasaki_inner(&self.nabla_script_r(d, z, &ei), y);
            h += e * c;
        }
        SplitTangentVector::horizontal(h * (0.5 * self.delta()))
    }

    /// G-orthonormal frame (e_i/√f1, 0), (0, e_i/√f2) of T(TM).
    pub fn g_orthonormal_frame(&self) -> Vec<SplitTangentVector> {
        let (s1, s2) = (self.f1().sqrt(), self.f2().sqrt());
        let mut out: Vec<SplitTangentVector> =
            self.frame.e.iter().map(|e| SplitTangentVector::horizontal(e / s1)).collect();
        out.extend(self.frame.e.iter().map(|e| SplitTangentVector::vertical(e / s2)));
        out
    }

    /// Sectional curvature of G on span{X, Y}.
    pub fn sectional_g(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> Result<f64> {
        let den = self.g_inner(x, x) * self.g_inner(y, y) - self.g_inner(x, y).powi(2);
        if den <= 1e-14 * (self.g_inner(x, x) * self.g_inner(y, y)).max(f64::MIN_POSITIVE) {
            return Err(GeoError::Rank("degenerate plane".into()));
        }
        Ok(self.curvature_rg4(x, y, y, x) / den)
    }

    /// Σ_{ijk} (ℛ_ijk)², ℛ_ijk = g(R(e_i, e_j)u, e_k).
    pub fn script_r_square_sum(&self) -> f64 {
        let mut s = 0.0;
        for a in &self.frame.e {
            for b in &self.frame.e {
                let r = self.base_r(a, b, self.u());
                for c in &self.frame.e {
                    s += self.ip(&r, c).powi(2);
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests;
