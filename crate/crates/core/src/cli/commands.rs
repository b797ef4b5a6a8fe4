//! The scan and geodesic commands.

use serde::Serialize;

use super::config::{RunConfig, Weights};
use crate::conformal_fiber::{BundleState, ConformalFiberMetric, ConvergenceStudy, Phi2Spec, Trajectory};
use crate::error::{GeoError, Result};
use crate::sphere_bundle::scan::{scan_positive_scalar, ScanConfig, ScanGrid, ScanReport, ScanSummary};

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummaryFile<'a> {
    pub kind: &'static str,
    #[serde(flatten)]
    pub summary: &'a ScanSummary,
}

pub fn run_scan(cfg: &RunConfig) -> Result<ScanReport> {
    let block = cfg.scan.as_ref().ok_or_else(|| GeoError::Config("config has no scan block".into()))?;
    let Weights::Constant(w) = &cfg.weights else {
        return Err(GeoError::Config("scan needs constant weights".into()));
    };
    let axis = |spec: &Option<super::config::AxisSpec>, fallback: Option<f64>, name: &str| -> Result<Vec<f64>> {
        match (spec, fallback) {
            (Some(s), _) => s.values(),
            (None, Some(v)) => Ok(vec![v]),
            (None, None) => Err(GeoError::Config(format!("scan needs an {name} grid or a top-level value"))),
        }
    };
    let grid = ScanGrid {
        f1: axis(&block.f1, Some(w.f1), "f1")?,
        f2: axis(&block.f2, Some(w.f2), "f2")?,
        r: axis(&block.r, cfg.radius, "r")?,
    };
    let base = cfg.manifold.build()?;
    scan_positive_scalar(&base, &ScanConfig { grid, samples: block.samples, seed: cfg.seed })
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicSummary {
    pub kind: &'static str,
    pub t_final: f64,
    pub dt: f64,
    pub steps: usize,
    pub initial_g_speed: f64,
    pub speed_drift: f64,
    pub drift_tolerance: f64,
    /// Whether |s(t) − s(0)| never decreases along the run.
    pub drift_monotone: bool,
    pub diverged_at: Option<usize>,
    pub convergence: Option<ConvergenceStudy>,
    pub pass: bool,
}

pub struct GeodesicRun {
    pub trajectory: Trajectory,
    pub summary: GeodesicSummary,
}

pub fn run_geodesic(cfg: &RunConfig) -> Result<GeodesicRun> {
    let block = cfg.geodesic.as_ref().ok_or_else(|| GeoError::Config("config has no geodesic block".into()))?;
    let m = cfg.manifold.dim();
    let (f1, phi2) = match &cfg.weights {
        Weights::Conformal(w) => (w.f1, w.phi2.clone()),
        Weights::Constant(w) => (w.f1, Phi2Spec::Constant { value: 0.5 * w.f2.ln() }),
    };
    let metric = ConformalFiberMetric::new(m, f1, phi2)?;
    let s0 = BundleState::new(block.x.clone(), block.u.clone(), block.x_dot.clone(), block.u_dot.clone());
    let trajectory = metric.integrate_geodesic_partial(&s0, block.t_final, block.dt, block.forcing)?;
    let convergence = match (block.convergence_levels, trajectory.diverged_at) {
        (Some(levels), None) => {
            let h = block.convergence_dt.unwrap_or(block.dt);
            Some(metric.convergence_study_with(&s0, block.t_final, h, levels, block.forcing)?)
        }
        _ => None,
    };
    let s0_speed = trajectory.g_speeds[0];
    let deviations: Vec<f64> = trajectory.g_speeds.iter().map(|s| (s - s0_speed).abs()).collect();
    let drift = trajectory.speed_drift();
    let summary = GeodesicSummary {
        kind: "geodesic_summary",
        t_final: block.t_final,
        dt: block.dt,
        steps: trajectory.times.len() - 1,
        initial_g_speed: s0_speed,
        speed_drift: drift,
        drift_tolerance: block.drift_tolerance,
        drift_monotone: deviations.windows(2).all(|w| w[1] >= w[0]),
        diverged_at: trajectory.diverged_at,
        convergence,
        pass: trajectory.diverged_at.is_none() && drift <= block.drift_tolerance,
    };
    Ok(GeodesicRun { trajectory, summary })
}
