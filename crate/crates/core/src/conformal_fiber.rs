//! Flat base, f1 constant and f2 = e^{2φ2}: the connection, curvature,
//! sectional curvature and geodesics of g^{f1,f2} on TM = ℝ^m × ℝ^m.
//!
//! On a Euclidean base in Cartesian coordinates the splitting is the
//! coordinate one, so split vectors are plain (ẋ, u̇) pairs and the
//! pairing ⟨·,·⟩ is the dot product. δ = f2/f1 depends on the base point.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, GeoError, Result};
use crate::output::{csv_err, fmt17};
use crate::sasaki::SplitTangentVector;
use crate::tensorkit::{finite_difference_derivative, DenseTensor, FdScheme};

/// The conformal exponent φ2 as a closed-form function on ℝ^m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Phi2Spec {
    Constant { value: f64 },
    /// φ2 = offset + gradient·x
    Linear { gradient: Vec<f64>, #[serde(default)] offset: f64 },
    /// φ2 = amplitude·sin(wavevector·x + phase)
    Sinusoid { amplitude: f64, wavevector: Vec<f64>, #[serde(default)] phase: f64 },
}

impl Phi2Spec {
    pub fn linear_along_first(dim: usize, lambda: f64) -> Self {
        let mut gradient = vec![0.0; dim];
        gradient[0] = lambda;
        Phi2Spec::Linear { gradient, offset: 0.0 }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        let len = match self {
            Phi2Spec::Constant { .. } => dim,
            Phi2Spec::Linear { gradient, .. } => gradient.len(),
            Phi2Spec::Sinusoid { wavevector, .. } => wavevector.len(),
        };
        if len != dim {
            return Err(GeoError::Config(format!("phi2 has {len} components, base has dimension {dim}")));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Phi2Spec::Constant { value } => *value,
            Phi2Spec::Linear { gradient, offset } => offset + dot(gradient, x),
            Phi2Spec::Sinusoid { amplitude, wavevector, phase } => amplitude * (dot(wavevector, x) + phase).sin(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> DVector<f64> {
        match self {
            Phi2Spec::Constant { .. } => DVector::zeros(x.len()),
            Phi2Spec::Linear { gradient, .. } => DVector::from_column_slice(gradient),
            Phi2Spec::Sinusoid { amplitude, wavevector, phase } => {
                DVector::from_column_slice(wavevector) * (amplitude * (dot(wavevector, x) + phase).cos())
            }
        }
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let m = x.len();
        match self {
            Phi2Spec::Constant { .. } | Phi2Spec::Linear { .. } => DMatrix::zeros(m, m),
            Phi2Spec::Sinusoid { amplitude, wavevector, phase } => {
                let k = DVector::from_column_slice(wavevector);
                &k * k.transpose() * (-amplitude * (dot(wavevector, x) + phase).sin())
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// g^{f1, e^{2φ2}} over Euclidean ℝ^m.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFiberMetric {
    dim: usize,
    f1: f64,
    phi2: Phi2Spec,
}

/// How the horizontal geodesic equation is forced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizontalForcing {
    /// ẍ = δ|u̇|² grad φ2, the Euler–Lagrange equation of G.
    #[default]
    Delta,
    /// ẍ = f2|u̇|² grad φ2 as printed; agrees with `Delta` only when f1 = 1.
    LiteralF2,
}

/// State (x, u, ẋ, u̇) along a curve in TM.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleState {
    pub x: DVector<f64>,
    pub u: DVector<f64>,
    pub x_dot: DVector<f64>,
    pub u_dot: DVector<f64>,
}

impl BundleState {
    pub fn new(x: Vec<f64>, u: Vec<f64>, x_dot: Vec<f64>, u_dot: Vec<f64>) -> Self {
        Self {
            x: DVector::from_vec(x),
            u: DVector::from_vec(u),
            x_dot: DVector::from_vec(x_dot),
            u_dot: DVector::from_vec(u_dot),
        }
    }

    fn axpy(&self, h: f64, d: &BundleState) -> BundleState {
        BundleState {
            x: &self.x + &d.x * h,
            u: &self.u + &d.u * h,
            x_dot: &self.x_dot + &d.x_dot * h,
            u_dot: &self.u_dot + &d.u_dot * h,
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.x, &self.u, &self.x_dot, &self.u_dot].iter().all(|v| v.iter().all(|c| c.is_finite()))
    }

    pub fn distance(&self, other: &BundleState) -> f64 {
        ((&self.x - &other.x).norm_squared()
            + (&self.u - &other.u).norm_squared()
            + (&self.x_dot - &other.x_dot).norm_squared()
            + (&self.u_dot - &other.u_dot).norm_squared())
        .sqrt()
    }
}

/// Result of [`ConformalFiberMetric::sectional_conformal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionalValue {
    pub value: f64,
    /// The inputs were not G-orthonormal and were orthonormalized first.
    pub normalized: bool,
}

/// Integrated trajectory; `diverged_at` is set when a non-finite state stopped the run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BundleState>,
    pub g_speeds: Vec<f64>,
    pub diverged_at: Option<usize>,
}

impl Trajectory {
    /// max |s(t) − s(0)| / s(0) over the run.
    pub fn speed_drift(&self) -> f64 {
        let s0 = self.g_speeds[0];
        let scale = if s0 > 0.0 { s0 } else { 1.0 };
        self.g_speeds.iter().map(|s| (s - s0).abs()).fold(0.0, f64::max) / scale
    }

    pub fn last(&self) -> &BundleState {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// CSV with columns t, x1.., u1.., xdot1.., udot1.., g_speed.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let m = self.states[0].x.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        for prefix in ["x", "u", "xdot", "udot"] {
            header.extend((1..=m).map(|i| format!("{prefix}{i}")));
        }
        header.push("g_speed".into());
        w.write_record(&header).map_err(csv_err)?;
        for ((t, s), g) in self.times.iter().zip(&self.states).zip(&self.g_speeds) {
            let mut row = vec![fmt17(*t)];
            for v in [&s.x, &s.u, &s.x_dot, &s.u_dot] {
                row.extend(v.iter().map(|c| fmt17(*c)));
            }
            row.push(fmt17(*g));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Outcome of a step-halving study on the integrator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    /// |s(dt_i) − s(dt_{i+1})| for consecutive step sizes.
    pub differences: Vec<f64>,
    /// log2 of consecutive difference ratios.
    pub observed_orders: Vec<f64>,
}

impl ConformalFiberMetric {
    pub fn new(dim: usize, f1: f64, phi2: Phi2Spec) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::Config("dimension must be positive".into()));
        }
        if !(f1 > 0.0 && f1.is_finite()) {
            return Err(GeoError::Config(format!("f1 must be positive, got {f1}")));
        }
        phi2.check_dim(dim)?;
        let metric = Self { dim, f1, phi2 };
        let probe: Vec<f64> = (0..dim).map(|i| 0.1 * (i as f64 + 1.0)).collect();
        metric.check_consistency(&probe, 1e-6)?;
        Ok(metric)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn f1(&self) -> f64 {
        self.f1
    }

    pub fn phi2(&self) -> &Phi2Spec {
        &self.phi2
    }

    pub fn f2(&self, x: &[f64]) -> f64 {
        (2.0 * self.phi2.value(x)).exp()
    }

    pub fn delta(&self, x: &[f64]) -> f64 {
        self.f2(x) / self.f1
    }

    /// ε = ‖grad φ2‖.
    pub fn epsilon(&self, x: &[f64]) -> f64 {
        self.phi2.gradient(x).norm()
    }

    /// Compares the analytic gradient and Hessian with finite differences of φ2.
    pub fn check_consistency(&self, x: &[f64], tol: f64) -> Result<()> {
        let scheme = FdScheme::default();
        let value = |p: &[f64]| Ok(DenseTensor::scalar(self.phi2.value(p)));
        let grad_fd = finite_difference_derivative(&value, x, &scheme)?;
        let grad = self.phi2.gradient(x);
        let gradient = |p: &[f64]| Ok(DenseTensor::from_vector(&self.phi2.gradient(p)));
        let hess_fd = finite_difference_derivative(&gradient, x, &scheme)?;
        let hess = self.phi2.hessian(x);
        for i in 0..self.dim {
            if (grad_fd.get(&[i]) - grad[i]).abs() > tol * grad[i].abs().max(1.0) {
                return Err(GeoError::Config("phi2 gradient inconsistent with its values".into()));
            }
            for j in 0..self.dim {
                if (hess_fd.get(&[i, j]) - hess[(j, i)]).abs() > tol * hess[(j, i)].abs().max(1.0) {
                    return Err(GeoError::Config("phi2 Hessian inconsistent with its gradient".into()));
                }
            }
        }
        Ok(())
    }

    pub fn g_inner(&self, x: &[f64], a: &SplitTangentVector, b: &SplitTangentVector) -> f64 {
        self.f1 * a.h.dot(&b.h) + self.f2(x) * a.v.dot(&b.v)
    }

    fn check(&self, x: &[f64], vs: &[&SplitTangentVector]) -> Result<()> {
        if x.len() != self.dim || vs.iter().any(|v| v.dim() != self.dim) {
            return Err(GeoError::Shape(format!("expected {}-dimensional inputs", self.dim)));
        }
        Ok(())
    }

    /// C(X, Y) = X(φ2)Y^v + Y(φ2)X^v − δ⟨X^v, Y^v⟩ grad φ2, so that ∇^G = ∇ + C.
    pub fn connection_conformal(&self, x: &[f64], a: &SplitTangentVector, b: &SplitTangentVector) -> Result<SplitTangentVector> {
        self.check(x, &[a, b])?;
        let grad = self.phi2.gradient(x);
        let (ap, bp) = (a.h.dot(&grad), b.h.dot(&grad));
        let h = &grad * (-self.delta(x) * a.v.dot(&b.v));
        Ok(SplitTangentVector::new(h, &b.v * ap + &a.v * bp))
    }

    /// R^G(X, Y)Z.
    pub fn curvature_conformal(
        &self,
        x: &[f64],
        a: &SplitTangentVector,
        b: &SplitTangentVector,
        c: &SplitTangentVector,
    ) -> Result<SplitTangentVector> {
        self.check(x, &[a, b, c])?;
        let grad = self.phi2.gradient(x);
        let hess = self.phi2.hessian(x);
        let d = self.delta(x);
        let eps2 = grad.norm_squared();
        let (xp, yp, zp) = (a.h.dot(&grad), b.h.dot(&grad), c.h.dot(&grad));
        let hx = &hess * &a.h;
        let hy = &hess * &b.h;
        let (xz, yz) = (a.v.dot(&c.v), b.v.dot(&c.v));
        let cy = xp * zp + d * eps2 * xz + hx.dot(&c.h);
        let cx = yp * zp + d * eps2 * yz + hy.dot(&c.h);
        let v = &b.v * cy - &a.v * cx;
        let h = &grad * (-d * (xp * yz - yp * xz)) - hx * (d * yz) + hy * (d * xz);
        Ok(SplitTangentVector::new(h, v))
    }

    /// G(R^G(X, Y)Y, X) when ∇dφ2 = 0, without normalization:
    /// −f2|Y(φ2)X^v − X(φ2)Y^v|² − f2δε²(|X^v|²|Y^v|² − ⟨X^v, Y^v⟩²).
    pub fn curvature_form_conformal(&self, x: &[f64], a: &SplitTangentVector, b: &SplitTangentVector) -> Result<f64> {
        self.check(x, &[a, b])?;
        self.require_parallel_gradient(x)?;
        let grad = self.phi2.gradient(x);
        let (f2, d) = (self.f2(x), self.delta(x));
        let eps2 = grad.norm_squared();
        let w = &a.v * b.h.dot(&grad) - &b.v * a.h.dot(&grad);
        let gram = a.v.norm_squared() * b.v.norm_squared() - a.v.dot(&b.v).powi(2);
        Ok(-f2 * w.norm_squared() - f2 * d * eps2 * gram)
    }

    fn require_parallel_gradient(&self, x: &[f64]) -> Result<()> {
        let h = self.phi2.hessian(x);
        if h.norm() >= 1e-8 {
            return Err(GeoError::Precondition(format!("Hessian of phi2 is not zero (norm {:.3e})", h.norm())));
        }
        Ok(())
    }

    /// Sectional curvature of span{X, Y} when ∇dφ2 = 0. Inputs that are
    /// not G-orthonormal are orthonormalized and flagged.
    pub fn sectional_conformal(&self, x: &[f64], a: &SplitTangentVector, b: &SplitTangentVector) -> Result<SectionalValue> {
        self.check(x, &[a, b])?;
        self.require_parallel_gradient(x)?;
        let (aa, ab, bb) = (self.g_inner(x, a, a), self.g_inner(x, a, b), self.g_inner(x, b, b));
        let orthonormal = (aa - 1.0).abs() < 1e-10 && (bb - 1.0).abs() < 1e-10 && ab.abs() < 1e-10;
        let (e1, e2) = if orthonormal {
            (a.clone(), b.clone())
        } else {
            if aa <= 0.0 {
                return Err(GeoError::Rank("zero vector spans no plane".into()));
            }
            let e1 = (1.0 / aa.sqrt()) * a.clone();
            let w = b.clone() - self.g_inner(x, b, &e1) * e1.clone();
            let ww = self.g_inner(x, &w, &w);
            if ww <= 1e-14 * bb.max(f64::MIN_POSITIVE) {
                return Err(GeoError::Rank("degenerate plane".into()));
            }
            (e1, (1.0 / ww.sqrt()) * w)
        };
        // decompose along grad φ2: X = a·grad φ2 + X' + X^v
        let grad = self.phi2.gradient(x);
        let eps2 = grad.norm_squared();
        let (ca, cb) = if eps2 > 0.0 { (e1.h.dot(&grad) / eps2, e2.h.dot(&grad) / eps2) } else { (0.0, 0.0) };
        let (f2, d) = (self.f2(x), self.delta(x));
        let w = &e1.v * cb - &e2.v * ca;
        let gram = e1.v.norm_squared() * e2.v.norm_squared() - e1.v.dot(&e2.v).powi(2);
        let value = -f2 * eps2 * eps2 * w.norm_squared() - f2 * eps2 * d * gram;
        Ok(SectionalValue { value, normalized: !orthonormal })
    }

    /// Second fundamental form of the fiber T_xM in TM on vertical X, Y:
    /// the horizontal part of ∇^G_X Y, equal to −δ⟨X^v, Y^v⟩ grad φ2.
    pub fn fiber_second_fundamental_form(&self, x: &[f64], a: &DVector<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
        let c = self.connection_conformal(x, &SplitTangentVector::vertical(a.clone()), &SplitTangentVector::vertical(b.clone()))?;
        Ok(c.h)
    }

    /// Time derivative of the state under the geodesic equations.
    pub fn geodesic_rhs(&self, s: &BundleState) -> BundleState {
        self.geodesic_rhs_with(s, HorizontalForcing::Delta)
    }

    pub fn geodesic_rhs_with(&self, s: &BundleState, forcing: HorizontalForcing) -> BundleState {
        let x = s.x.as_slice();
        let grad = self.phi2.gradient(x);
        let coeff = match forcing {
            HorizontalForcing::Delta => self.delta(x),
            HorizontalForcing::LiteralF2 => self.f2(x),
        };
        BundleState {
            x: s.x_dot.clone(),
            u: s.u_dot.clone(),
            x_dot: &grad * (coeff * s.u_dot.norm_squared()),
            u_dot: &s.u_dot * (-2.0 * s.x_dot.dot(&grad)),
        }
    }

    /// ‖Θ̇‖_G = √(f1|ẋ|² + f2(x)|u̇|²).
    pub fn g_speed(&self, s: &BundleState) -> f64 {
        (self.f1 * s.x_dot.norm_squared() + self.f2(s.x.as_slice()) * s.u_dot.norm_squared()).sqrt()
    }

    fn rk4_step(&self, s: &BundleState, h: f64, forcing: HorizontalForcing) -> BundleState {
        let k1 = self.geodesic_rhs_with(s, forcing);
        let k2 = self.geodesic_rhs_with(&s.axpy(0.5 * h, &k1), forcing);
        let k3 = self.geodesic_rhs_with(&s.axpy(0.5 * h, &k2), forcing);
        let k4 = self.geodesic_rhs_with(&s.axpy(h, &k3), forcing);
        BundleState {
            x: &s.x + (&k1.x + &k2.x * 2.0 + &k3.x * 2.0 + &k4.x) * (h / 6.0),
            u: &s.u + (&k1.u + &k2.u * 2.0 + &k3.u * 2.0 + &k4.u) * (h / 6.0),
            x_dot: &s.x_dot + (&k1.x_dot + &k2.x_dot * 2.0 + &k3.x_dot * 2.0 + &k4.x_dot) * (h / 6.0),
            u_dot: &s.u_dot + (&k1.u_dot + &k2.u_dot * 2.0 + &k3.u_dot * 2.0 + &k4.u_dot) * (h / 6.0),
        }
    }

    /// Classical RK4 over [0, T] with ⌈T/dt⌉ steps; the last step is shortened to land on T.
    /// Stops early, with `diverged_at` set, on a non-finite state.
    pub fn integrate_geodesic_partial(&self, s0: &BundleState, t_end: f64, dt: f64, forcing: HorizontalForcing) -> Result<Trajectory> {
        if !(dt > 0.0 && dt.is_finite() && t_end.is_finite() && t_end >= dt) {
            return Err(GeoError::Config(format!("need dt > 0 and T >= dt, got dt={dt}, T={t_end}")));
        }
        let m = self.dim;
        if [&s0.x, &s0.u, &s0.x_dot, &s0.u_dot].iter().any(|v| v.len() != m) {
            return Err(GeoError::Shape(format!("state vectors must have {m} components")));
        }
        if !s0.is_finite() {
            return Err(GeoError::Numeric("initial state".into()));
        }
        let n = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
        let mut times = vec![0.0];
        let mut states = vec![s0.clone()];
        let mut g_speeds = vec![self.g_speed(s0)];
        let mut current = s0.clone();
        for k in 0..n {
            let t0 = k as f64 * dt;
            let t1 = if k + 1 == n { t_end } else { (k + 1) as f64 * dt };
            let next = self.rk4_step(&current, t1 - t0, forcing);
            let speed = self.g_speed(&next);
            if !next.is_finite() || !speed.is_finite() {
                return Ok(Trajectory { times, states, g_speeds, diverged_at: Some(k + 1) });
            }
            times.push(t1);
            states.push(next.clone());
            g_speeds.push(speed);
            current = next;
        }
        Ok(Trajectory { times, states, g_speeds, diverged_at: None })
    }

    /// As [`Self::integrate_geodesic_partial`], turning divergence into an error.
    pub fn integrate_geodesic(&self, s0: &BundleState, t_end: f64, dt: f64) -> Result<Trajectory> {
        let traj = self.integrate_geodesic_partial(s0, t_end, dt, HorizontalForcing::Delta)?;
        match traj.diverged_at {
            Some(steps) => Err(GeoError::Divergence { steps }),
            None => Ok(traj),
        }
    }

    /// Terminal-state differences for dt, dt/2, dt/4, ... (`levels` step sizes).
    pub fn convergence_study(&self, s0: &BundleState, t_end: f64, dt: f64, levels: usize) -> Result<ConvergenceStudy> {
        self.convergence_study_with(s0, t_end, dt, levels, HorizontalForcing::Delta)
    }

    pub fn convergence_study_with(
        &self,
        s0: &BundleState,
        t_end: f64,
        dt: f64,
        levels: usize,
        forcing: HorizontalForcing,
    ) -> Result<ConvergenceStudy> {
        if levels < 3 {
            return Err(GeoError::Config("a convergence study needs at least three step sizes".into()));
        }
        let steps: Vec<f64> = (0..levels).map(|i| dt / 2f64.powi(i as i32)).collect();
        let finals = steps
            .iter()
            .map(|&h| {
                let t = self.integrate_geodesic_partial(s0, t_end, h, forcing)?;
                match t.diverged_at {
                    Some(steps) => Err(GeoError::Divergence { steps }),
                    None => Ok(t.last().clone()),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let differences: Vec<f64> = finals.windows(2).map(|w| w[0].distance(&w[1])).collect();
        let observed_orders = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        ensure_finite(&differences, "convergence differences")?;
        Ok(ConvergenceStudy { steps, differences, observed_orders })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_manifold::ZooSpec;
    use crate::coordinate_oracle::{FiberWeight, InducedChart};
    use crate::sasaki::TangentBundlePoint;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
    }

    fn random_split<R: Rng>(rng: &mut R, m: usize) -> SplitTangentVector {
        let h: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        SplitTangentVector::from_slices(&h, &v)
    }

    fn linear(m: usize, f1: f64, lam: f64) -> ConformalFiberMetric {
        ConformalFiberMetric::new(m, f1, Phi2Spec::linear_along_first(m, lam)).unwrap()
    }

    fn sinusoid(f1: f64) -> ConformalFiberMetric {
        ConformalFiberMetric::new(3, f1, Phi2Spec::Sinusoid { amplitude: 0.4, wavevector: vec![0.7, -0.5, 0.3], phase: 0.2 }).unwrap()
    }

    fn oracle_for(c: &ConformalFiberMetric) -> InducedChart {
        let phi = c.phi2().clone();
        let weight = FiberWeight::Variable(Arc::new(move |x: &[f64]| (2.0 * phi.value(x)).exp()));
        InducedChart::with_fiber_weight(ZooSpec::euclidean(c.dim()).build().unwrap(), c.f1(), weight).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(ConformalFiberMetric::new(3, 0.0, Phi2Spec::Constant { value: 0.0 }).is_err());
        assert!(ConformalFiberMetric::new(3, 1.0, Phi2Spec::linear_along_first(2, 1.0)).is_err());
    }

    #[test]
    fn phi2_spec_json_round_trip() {
        let spec = Phi2Spec::linear_along_first(3, 0.3);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<Phi2Spec>(&s).unwrap(), spec);
        assert!(serde_json::from_str::<Phi2Spec>(r#"{"kind":"linear","gradient":[1],"slope":2}"#).is_err());
    }

    #[test]
    fn connection_examples() {
        let lam = 0.7;
        let c = linear(3, 2.0, lam);
        let x = [0.3, -0.1, 0.5];
        let zero = ConformalFiberMetric::new(3, 2.0, Phi2Spec::Constant { value: 0.4 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = (random_split(&mut rng, 3), random_split(&mut rng, 3));
        assert_eq!(zero.connection_conformal(&x, &a, &b).unwrap().max_abs(), 0.0);

        let w = DVector::from_vec(vec![0.2, 0.9, -0.4]);
        let e1 = SplitTangentVector::from_slices(&[1.0, 0.0, 0.0], &[0.0; 3]);
        let out = c.connection_conformal(&x, &e1, &SplitTangentVector::vertical(w.clone())).unwrap();
        assert!((out.clone() - SplitTangentVector::vertical(&w * lam)).max_abs() < 1e-15);

        let e2v = SplitTangentVector::from_slices(&[0.0; 3], &[0.0, 1.0, 0.0]);
        let out = c.connection_conformal(&x, &e2v, &e2v).unwrap();
        let expected = SplitTangentVector::from_slices(&[-c.delta(&x) * lam, 0.0, 0.0], &[0.0; 3]);
        assert!((out - expected).max_abs() < 1e-15);
        assert!((c.connection_conformal(&x, &a, &b).unwrap() - c.connection_conformal(&x, &b, &a).unwrap()).max_abs() == 0.0);
    }

    #[test]
    fn connection_is_levi_civita_of_g() {
        // metric compatibility: X(G(Y,Z)) = G(C(X,Y),Z) + G(Y,C(X,Z)) for coordinate-constant Y, Z
        let c = sinusoid(1.3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = [0.2, 0.4, -0.3];
        let (a, b, d) = (random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3));
        let h = 1e-5;
        let shift = |s: f64| -> Vec<f64> { x.iter().zip(a.h.iter()).map(|(p, q)| p + s * q).collect() };
        let lhs = (c.g_inner(&shift(h), &b, &d) - c.g_inner(&shift(-h), &b, &d)) / (2.0 * h);
        let rhs = c.g_inner(&x, &c.connection_conformal(&x, &a, &b).unwrap(), &d)
            + c.g_inner(&x, &b, &c.connection_conformal(&x, &a, &d).unwrap());
        assert!(rel_close(lhs, rhs, 1e-8), "{lhs} vs {rhs}");
    }

    #[test]
    fn curvature_vanishes_for_constant_phi_and_horizontal_linear() {
        let zero = ConformalFiberMetric::new(3, 2.0, Phi2Spec::Constant { value: -0.2 }).unwrap();
        let c = linear(3, 1.5, 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = [0.1, 0.2, 0.3];
        for _ in 0..5 {
            let (a, b, d) = (random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3));
            assert_eq!(zero.curvature_conformal(&x, &a, &b, &d).unwrap().max_abs(), 0.0);
            let v = c.curvature_conformal(&x, &a.h_part(), &b.h_part(), &d.h_part()).unwrap();
            assert_eq!(v.max_abs(), 0.0);
        }
    }

    #[test]
    fn vertical_example_against_oracle() {
        let lam = 0.3;
        let c = linear(3, 1.0, lam);
        let x = vec![0.4, 0.1, -0.2];
        let (e2, e3) = (
            SplitTangentVector::from_slices(&[0.0; 3], &[0.0, 1.0, 0.0]),
            SplitTangentVector::from_slices(&[0.0; 3], &[0.0, 0.0, 1.0]),
        );
        let r = c.curvature_conformal(&x, &e2, &e3, &e2).unwrap();
        // R(e2, e3)e2 = δλ²·e3
        let expected = SplitTangentVector::vertical(DVector::from_vec(vec![0.0, 0.0, c.delta(&x) * lam * lam]));
        assert!((r.clone() - expected).max_abs() < 1e-14);
        let oracle = oracle_for(&c);
        let p = TangentBundlePoint::new(x.clone(), vec![0.5, -0.3, 0.2]);
        let o = oracle.evaluate(&p).unwrap();
        for w in [&e2, &e3] {
            let got = o.rg4(&e2, &e3, &e2, w).unwrap();
            assert!(rel_close(got, c.g_inner(&x, &r, w), 1e-5), "{got}");
        }
    }

    #[test]
    fn curvature_matches_oracle_with_hessian() {
        let c = sinusoid(1.7);
        let oracle = oracle_for(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let u: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let o = oracle.evaluate(&TangentBundlePoint::new(x.clone(), u)).unwrap();
            for _ in 0..4 {
                let (a, b, d, w) =
                    (random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3));
                let formula = c.g_inner(&x, &c.curvature_conformal(&x, &a, &b, &d).unwrap(), &w);
                let brute = o.rg4(&a, &b, &d, &w).unwrap();
                assert!(rel_close(formula, brute, 1e-5), "{formula} vs {brute}");
            }
        }
    }

    #[test]
    fn sectional_requires_parallel_gradient() {
        let c = sinusoid(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b) = (random_split(&mut rng, 3), random_split(&mut rng, 3));
        assert!(matches!(c.sectional_conformal(&[0.1, 0.2, 0.3], &a, &b), Err(GeoError::Precondition(_))));
    }

    #[test]
    fn sectional_matches_curvature_path() {
        let lam = 0.9;
        let c = linear(3, 2.5, lam);
        let x = [0.2, -0.4, 0.1];
        let (f1, f2) = (c.f1(), c.f2(&x));
        // X = unit horizontal along grad φ2, Y = unit vertical
        let a = SplitTangentVector::from_slices(&[1.0 / f1.sqrt(), 0.0, 0.0], &[0.0; 3]);
        let w = DVector::from_vec(vec![0.6, 0.0, 0.8]) / f2.sqrt();
        let b = SplitTangentVector::vertical(w);
        let s = c.sectional_conformal(&x, &a, &b).unwrap();
        assert!(!s.normalized);
        let direct = c.g_inner(&x, &c.curvature_conformal(&x, &a, &b, &b).unwrap(), &a);
        assert!(rel_close(s.value, direct, 1e-8), "{} vs {direct}", s.value);
        assert!(s.value < 0.0);
    }

    #[test]
    fn fiber_plane_values() {
        let lam = 0.6;
        let c = linear(3, 1.8, lam);
        let x = [0.5, 0.0, 0.0];
        let (f2, d, eps) = (c.f2(&x), c.delta(&x), c.epsilon(&x));
        let a = SplitTangentVector::from_slices(&[0.0; 3], &[1.0, 0.0, 0.0]);
        let b = SplitTangentVector::from_slices(&[0.0; 3], &[0.0, 0.0, 1.0]);
        // g-unit vertical vectors: the unnormalized form gives −f2ε²δ
        let form = c.curvature_form_conformal(&x, &a, &b).unwrap();
        assert!(rel_close(form, -f2 * eps * eps * d, 1e-12));
        let direct = c.g_inner(&x, &c.curvature_conformal(&x, &a, &b, &b).unwrap(), &a);
        assert!(rel_close(form, direct, 1e-12));
        // as a true sectional curvature the plane has −ε²/f1
        let s = c.sectional_conformal(&x, &a, &b).unwrap();
        assert!(s.normalized);
        assert!(rel_close(s.value, -eps * eps / c.f1(), 1e-12));
    }

    #[test]
    fn fibers_are_umbilic_and_flat() {
        let c = linear(3, 1.4, 0.5);
        let x = [0.3, 0.2, -0.6];
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let grad = c.phi2().gradient(&x);
        for _ in 0..5 {
            let a = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let b = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let ii = c.fiber_second_fundamental_form(&x, &a, &b).unwrap();
            // umbilic: II(X,Y) = ⟨X,Y⟩ N with N = −δ grad φ2, not zero
            assert!((&ii - &grad * (-c.delta(&x) * a.dot(&b))).amax() < 1e-14);
            assert!(ii.norm() > 0.0 || a.dot(&b) == 0.0);
            // Gauss equation: intrinsic curvature of the fiber vanishes
            let (sa, sb) = (SplitTangentVector::vertical(a.clone()), SplitTangentVector::vertical(b.clone()));
            let ambient = c.g_inner(&x, &c.curvature_conformal(&x, &sa, &sb, &sb).unwrap(), &sa);
            let iaa = SplitTangentVector::horizontal(c.fiber_second_fundamental_form(&x, &a, &a).unwrap());
            let ibb = SplitTangentVector::horizontal(c.fiber_second_fundamental_form(&x, &b, &b).unwrap());
            let iab = SplitTangentVector::horizontal(ii);
            let intrinsic = ambient + c.g_inner(&x, &iaa, &ibb) - c.g_inner(&x, &iab, &iab);
            assert!(intrinsic.abs() < 1e-12, "{intrinsic}");
        }
    }

    #[test]
    fn straight_lines_without_forcing() {
        let zero = ConformalFiberMetric::new(2, 1.0, Phi2Spec::Constant { value: 0.3 }).unwrap();
        let s0 = BundleState::new(vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, -0.2], vec![0.1, 0.3]);
        let traj = zero.integrate_geodesic(&s0, 2.0, 0.01).unwrap();
        assert_eq!(traj.states.len(), 201);
        let last = traj.last();
        let t = 2.0;
        assert!((last.x[0] - 0.5 * t).abs() < 1e-12 && (last.x[1] - (1.0 - 0.2 * t)).abs() < 1e-12);
        assert!((last.u[1] - 0.3 * t).abs() < 1e-12);
        assert!(traj.speed_drift() < 1e-14);

        let c = linear(2, 1.0, 0.5);
        let s0 = BundleState::new(vec![0.0, 0.0], vec![1.0, 0.0], vec![0.4, 0.3], vec![0.0, 0.0]);
        let traj = c.integrate_geodesic(&s0, 1.0, 0.1).unwrap();
        assert!((traj.last().x_dot.clone() - s0.x_dot.clone()).amax() < 1e-14);
        assert!((traj.last().u.clone() - s0.u.clone()).amax() == 0.0);
    }

    #[test]
    fn vertical_start_accelerates_along_gradient() {
        let lam = 0.3;
        let c = linear(2, 1.0, lam);
        let s0 = BundleState::new(vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.5]);
        let rhs = c.geodesic_rhs(&s0);
        assert!(rel_close(rhs.x_dot[0], c.delta(&[0.0, 0.0]) * 1.25 * lam, 1e-14));
        assert_eq!(rhs.x_dot[1], 0.0);
        let traj = c.integrate_geodesic(&s0, 1.0, 0.01).unwrap();
        assert!(traj.last().x[0] > 0.0 && traj.last().u_dot.norm() < 1.25f64.sqrt());
    }

    #[test]
    fn speed_is_conserved() {
        let c = linear(3, 2.0, 0.3);
        let s0 = BundleState::new(vec![0.0; 3], vec![0.2, 0.1, 0.0], vec![0.3, -0.2, 0.1], vec![0.5, 0.4, -0.3]);
        let traj = c.integrate_geodesic(&s0, 5.0, 1e-3).unwrap();
        assert_eq!(traj.states.len(), 5001);
        assert!(traj.speed_drift() < 1e-6, "{}", traj.speed_drift());
    }

    #[test]
    fn literal_forcing_breaks_conservation_when_f1_differs_from_one() {
        let c = linear(3, 2.0, 0.3);
        let s0 = BundleState::new(vec![0.0; 3], vec![0.0; 3], vec![0.3, -0.2, 0.1], vec![0.5, 0.4, -0.3]);
        let traj = c.integrate_geodesic_partial(&s0, 5.0, 1e-2, HorizontalForcing::LiteralF2).unwrap();
        assert!(traj.speed_drift() > 1e-3);
        let unit = linear(3, 1.0, 0.3);
        let a = unit.integrate_geodesic_partial(&s0, 1.0, 1e-2, HorizontalForcing::LiteralF2).unwrap();
        let b = unit.integrate_geodesic_partial(&s0, 1.0, 1e-2, HorizontalForcing::Delta).unwrap();
        assert_eq!(a.last(), b.last());
    }

    #[test]
    fn fourth_order_convergence() {
        let c = linear(2, 1.5, 0.4);
        let s0 = BundleState::new(vec![0.0, 0.0], vec![0.1, 0.0], vec![0.4, 0.2], vec![0.6, -0.5]);
        let study = c.convergence_study(&s0, 2.0, 0.1, 4).unwrap();
        for order in &study.observed_orders {
            assert!(*order > 3.8, "{study:?}");
        }
    }

    #[test]
    fn divergence_is_reported_with_partial_trajectory() {
        let c = linear(1, 1.0, 3.0);
        let s0 = BundleState::new(vec![0.0], vec![0.0], vec![0.0], vec![50.0]);
        let traj = c.integrate_geodesic_partial(&s0, 10.0, 0.5, HorizontalForcing::Delta).unwrap();
        assert!(traj.diverged_at.is_some());
        assert!(!traj.states.is_empty() && traj.states.iter().all(|s| s.is_finite()));
        assert!(matches!(c.integrate_geodesic(&s0, 10.0, 0.5), Err(GeoError::Divergence { .. })));
    }

    #[test]
    fn trajectory_csv_layout() {
        let c = linear(2, 1.0, 0.3);
        let s0 = BundleState::new(vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]);
        let traj = c.integrate_geodesic(&s0, 0.2, 0.1).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x1,x2,u1,u2,xdot1,xdot2,udot1,udot2,g_speed");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_sectional_nonpositive(
            lam in -2.0f64..2.0, f1 in 0.2f64..5.0, seed in any::<u64>()
        ) {
            let c = ConformalFiberMetric::new(3, f1, Phi2Spec::Linear { gradient: vec![lam, 0.3 * lam, -0.5], offset: 0.1 }).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (a, b) = (random_split(&mut rng, 3), random_split(&mut rng, 3));
            if let Ok(s) = c.sectional_conformal(&x, &a, &b) {
                prop_assert!(s.value <= 1e-12);
                let den = c.g_inner(&x, &a, &a) * c.g_inner(&x, &b, &b) - c.g_inner(&x, &a, &b).powi(2);
                let form = c.curvature_form_conformal(&x, &a, &b).unwrap();
                prop_assert!(rel_close(s.value, form / den, 1e-8));
            }
        }

        #[test]
        fn prop_curvature_antisymmetric_and_bianchi(seed in any::<u64>()) {
            let c = sinusoid(1.2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (a, b, d, w) = (random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3));
            let r = |p: &SplitTangentVector, q: &SplitTangentVector, s: &SplitTangentVector, t: &SplitTangentVector| {
                c.g_inner(&x, &c.curvature_conformal(&x, p, q, s).unwrap(), t)
            };
            let v = r(&a, &b, &d, &w);
            prop_assert!(rel_close(v, -r(&b, &a, &d, &w), 1e-12));
            prop_assert!(rel_close(v, -r(&a, &b, &w, &d), 1e-10));
            prop_assert!(rel_close(v, r(&d, &w, &a, &b), 1e-10));
            let cyc = c.curvature_conformal(&x, &a, &b, &d).unwrap()
                + c.curvature_conformal(&x, &b, &d, &a).unwrap()
                + c.curvature_conformal(&x, &d, &a, &b).unwrap();
            prop_assert!(cyc.max_abs() < 1e-12);
        }
    }
}
