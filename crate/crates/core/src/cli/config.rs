//! JSON run configuration. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::base_manifold::ZooSpec;
use crate::conformal_fiber::{HorizontalForcing, Phi2Spec};
use crate::error::{GeoError, Result};
use crate::sphere_bundle::scan::ScanGrid;

pub const DEFAULT_SEED: u64 = 42;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ZooSpec,
    #[serde(default)]
    pub weights: Weights,
    /// Constant fiber radius r of S_rM.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub verify: Option<VerifyBlock>,
    #[serde(default)]
    pub scan: Option<ScanBlock>,
    #[serde(default)]
    pub geodesic: Option<GeodesicBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weights {
    Constant(ConstantWeights),
    Conformal(ConformalWeights),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantWeights {
    pub f1: f64,
    pub f2: f64,
}

/// f2 = e^{2φ2} on a Euclidean base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalWeights {
    pub f1: f64,
    pub phi2: Phi2Spec,
}

impl Default for Weights {
    fn default() -> Self {
        Weights::Constant(ConstantWeights { f1: 1.0, f2: 1.0 })
    }
}

impl Weights {
    pub fn f1(&self) -> f64 {
        match self {
            Weights::Constant(w) => w.f1,
            Weights::Conformal(w) => w.f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub curvature: Option<f64>,
    pub ricci: Option<f64>,
    pub scalar: Option<f64>,
}

fn default_samples() -> usize {
    20
}

fn default_tuples() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBlock {
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Random vector tuples per sample point.
    #[serde(default = "default_tuples")]
    pub tuples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        Self { samples: default_samples(), tuples: default_tuples(), tolerances: Tolerances::default() }
    }
}

/// Grid axis: an explicit list, a stepped range or a count of evenly spaced points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    List(Vec<f64>),
    Step(StepAxis),
    Count(CountAxis),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepAxis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            AxisSpec::List(v) => Ok(v.clone()),
            AxisSpec::Step(StepAxis { start, stop, step }) => {
                if !(*step > 0.0 && step.is_finite() && stop >= start) {
                    return Err(GeoError::Config("range needs step > 0 and stop >= start".into()));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if n > 1_000_000 {
                    return Err(GeoError::Config("range has too many points".into()));
                }
                Ok((0..n).map(|i| start + step * i as f64).collect())
            }
            AxisSpec::Count(CountAxis { start, stop, count }) => Ok(ScanGrid::linspace(*start, *stop, *count)),
        }
    }
}

fn default_scan_samples() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    /// Defaults to the single value in `weights.f1`.
    #[serde(default)]
    pub f1: Option<AxisSpec>,
    #[serde(default)]
    pub f2: Option<AxisSpec>,
    /// Defaults to the single value in `radius`.
    #[serde(default)]
    pub r: Option<AxisSpec>,
    #[serde(default = "default_scan_samples")]
    pub samples: usize,
}

fn default_t_final() -> f64 {
    5.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_drift_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicBlock {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub x_dot: Vec<f64>,
    pub u_dot: Vec<f64>,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub forcing: HorizontalForcing,
    /// Number of step halvings for an order study; none when absent.
    #[serde(default)]
    pub convergence_levels: Option<usize>,
    /// Largest step of the order study; defaults to `dt`. Too small a step
    /// drives the differences into round-off.
    #[serde(default)]
    pub convergence_dt: Option<f64>,
    #[serde(default = "default_drift_tolerance")]
    pub drift_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Scan,
    Geodesic,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Scan => "scan",
            Command::Geodesic => "geodesic",
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| GeoError::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GeoError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The single command block present.
    pub fn command(&self) -> Command {
        match (&self.verify, &self.scan) {
            (Some(_), _) => Command::Verify,
            (_, Some(_)) => Command::Scan,
            _ => Command::Geodesic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let blocks = [self.verify.is_some(), self.scan.is_some(), self.geodesic.is_some()];
        if blocks.iter().filter(|b| **b).count() != 1 {
            return Err(GeoError::Config("exactly one of verify, scan, geodesic must be present".into()));
        }
        let f1 = self.weights.f1();
        if !(f1 > 0.0 && f1.is_finite()) {
            return Err(GeoError::Config(format!("f1 must be positive, got {f1}")));
        }
        if let Weights::Constant(w) = &self.weights {
            if !(w.f2 > 0.0 && w.f2.is_finite()) {
                return Err(GeoError::Config(format!("f2 must be positive, got {}", w.f2)));
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(GeoError::Config(format!("radius must be positive, got {r}")));
            }
        }
        let conformal = matches!(self.weights, Weights::Conformal(_));
        let euclidean = matches!(self.manifold, ZooSpec::Euclidean { .. });
        if conformal && !euclidean {
            return Err(GeoError::Config("conformal fiber weights need a euclidean base".into()));
        }
        if let Some(v) = &self.verify {
            if v.samples == 0 || v.tuples == 0 {
                return Err(GeoError::Config("verify needs at least one sample and one tuple".into()));
            }
            if conformal && self.radius.is_some() {
                return Err(GeoError::Config("radius is not used with conformal weights".into()));
            }
            for t in [v.tolerances.curvature, v.tolerances.ricci, v.tolerances.scalar].into_iter().flatten() {
                check_tolerance(t)?;
            }
        }
        if self.scan.is_some() && conformal {
            return Err(GeoError::Config("scan needs constant weights".into()));
        }
        if let Some(g) = &self.geodesic {
            if !euclidean {
                return Err(GeoError::Config("geodesic needs a euclidean base".into()));
            }
            let m = self.manifold.dim();
            if [&g.x, &g.u, &g.x_dot, &g.u_dot].iter().any(|v| v.len() != m) {
                return Err(GeoError::Config(format!("initial state vectors must have {m} components")));
            }
            if !(g.dt > 0.0 && g.t_final > 0.0 && g.dt.is_finite() && g.t_final.is_finite()) {
                return Err(GeoError::Config("geodesic needs dt > 0 and t_final > 0".into()));
            }
            check_tolerance(g.drift_tolerance)?;
            if g.convergence_dt.is_some_and(|h| !(h > 0.0 && h.is_finite())) {
                return Err(GeoError::Config("convergence_dt must be positive".into()));
            }
            if g.convergence_levels.is_some_and(|l| !(3..=12).contains(&l)) {
                return Err(GeoError::Config("convergence_levels must be between 3 and 12".into()));
            }
        }
        if let Some(out) = &self.output {
            let allowed: &[OutputFormat] = match self.command() {
                Command::Verify => &[OutputFormat::Json, OutputFormat::Csv, OutputFormat::Text],
                Command::Scan | Command::Geodesic => &[OutputFormat::Csv],
            };
            if let Some(f) = out.format {
                if !allowed.contains(&f) {
                    return Err(GeoError::Config(format!("output format {f:?} is not available for {}", self.command().name())));
                }
            }
        }
        Ok(())
    }

    pub fn output_format(&self) -> OutputFormat {
        match (self.output.as_ref().and_then(|o| o.format), self.command()) {
            (Some(f), _) => f,
            (None, Command::Verify) => OutputFormat::Json,
            (None, _) => OutputFormat::Csv,
        }
    }
}

pub(crate) fn check_tolerance(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(GeoError::Config(format!("tolerance must be positive, got {t}")))
    }
}
