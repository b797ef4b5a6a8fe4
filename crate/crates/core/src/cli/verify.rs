//! Closed forms against the coordinate oracle at random sample points.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{RunConfig, Weights};
use crate::base_manifold::ChartedManifold;
use crate::conformal_fiber::ConformalFiberMetric;
use crate::coordinate_oracle::{FiberWeight, InducedChart};
use crate::error::{GeoError, Result};
use crate::output::worker_pool;
use crate::sasaki::{SplitTangentVector, TangentBundlePoint, WeightedSasakiMetric};
use crate::sphere_bundle::SphereBundle;

/// Relative tolerance on oracle agreement for manifolds with analytic Christoffel symbols.
pub const ANALYTIC_TOLERANCE: f64 = 1e-5;
/// Same, when the base metric itself is only differentiated numerically.
pub const NUMERIC_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub sample: usize,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub quantity: String,
    pub formula: f64,
    pub oracle: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantitySummary {
    pub quantity: String,
    pub count: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub kind: &'static str,
    pub manifold: String,
    pub weights: Weights,
    pub radius: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub pass: bool,
    /// Set when a numeric failure cut the run short.
    pub error: Option<String>,
    pub summary: Vec<QuantitySummary>,
    pub records: Vec<VerifyRecord>,
}

/// |a − b| / max(1, |a|, |b|).
pub fn relative_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn record(sample: usize, p: &TangentBundlePoint, quantity: &str, formula: f64, oracle: f64) -> VerifyRecord {
    VerifyRecord {
        sample,
        x: p.x.clone(),
        u: p.u.iter().copied().collect(),
        quantity: quantity.into(),
        formula,
        oracle,
        abs_residual: (formula - oracle).abs(),
        rel_residual: relative_residual(formula, oracle),
    }
}

struct Draw {
    point: TangentBundlePoint,
    tuples: Vec<[SplitTangentVector; 4]>,
}

fn random_split<R: Rng>(rng: &mut R, m: usize) -> SplitTangentVector {
    let h: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    SplitTangentVector::from_slices(&h, &v)
}

/// Runs the comparison; `overrides` are the command-line sample count and tolerance.
pub fn run_verify(cfg: &RunConfig, samples: Option<usize>, tol: Option<f64>) -> Result<CurvatureReport> {
    let block = cfg.verify.clone().unwrap_or_default();
    let samples = samples.unwrap_or(block.samples);
    if samples == 0 {
        return Err(GeoError::Config("verify needs at least one sample".into()));
    }
    if let Some(t) = tol {
        super::config::check_tolerance(t)?;
    }
    let base = cfg.manifold.build()?;
    let m = base.dim();
    let default_tol = if base.has_analytic() { ANALYTIC_TOLERANCE } else { NUMERIC_TOLERANCE };
    let pick = |specific: Option<f64>| tol.or(specific).unwrap_or(default_tol);
    let tolerances = [
        ("curvature", pick(block.tolerances.curvature)),
        ("ricci", pick(block.tolerances.ricci)),
        ("scalar", pick(block.tolerances.scalar)),
    ];

    let bundle = match (&cfg.weights, cfg.radius) {
        (Weights::Constant(w), Some(r)) => Some(SphereBundle::constant(WeightedSasakiMetric::new(base.clone(), w.f1, w.f2)?, r)?),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let point = match &bundle {
            Some(b) => b.sample_point(&mut rng)?,
            None => {
                let x = base.sample_point(&mut rng);
                let u: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
                TangentBundlePoint::new(x, u)
            }
        };
        let tuples = (0..block.tuples)
            .map(|_| [random_split(&mut rng, m), random_split(&mut rng, m), random_split(&mut rng, m), random_split(&mut rng, m)])
            .collect();
        draws.push(Draw { point, tuples });
    }

    let pool = worker_pool()?;
    let results: Vec<Result<Vec<VerifyRecord>>> = match &cfg.weights {
        Weights::Constant(w) => {
            let metric = WeightedSasakiMetric::new(base.clone(), w.f1, w.f2)?;
            let oracle = InducedChart::new(base.clone(), w.f1, w.f2)?;
            pool.install(|| {
                draws
                    .par_iter()
                    .enumerate()
                    .map(|(i, d)| constant_sample(i, d, &metric, &oracle, bundle.as_ref()))
                    .collect()
            })
        }
        Weights::Conformal(w) => {
            let metric = ConformalFiberMetric::new(m, w.f1, w.phi2.clone())?;
            let oracle = conformal_oracle(&base, &metric)?;
            pool.install(|| draws.par_iter().enumerate().map(|(i, d)| conformal_sample(i, d, &metric, &oracle)).collect())
        }
    };

    let mut records = Vec::new();
    let mut error = None;
    let mut completed = 0;
    for r in results {
        match r {
            Ok(rs) => {
                records.extend(rs);
                completed += 1;
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }

    let mut names: Vec<&str> = Vec::new();
    for r in &records {
        if !names.contains(&r.quantity.as_str()) {
            names.push(&r.quantity);
        }
    }
    let summary: Vec<QuantitySummary> = names
        .iter()
        .map(|name| {
            let family = name.trim_end_matches("_srm");
            let tolerance = tolerances.iter().find(|(n, _)| *n == family).map(|(_, t)| *t).unwrap_or(default_tol);
            let of: Vec<&VerifyRecord> = records.iter().filter(|r| r.quantity == *name).collect();
            let max_abs = of.iter().map(|r| r.abs_residual).fold(0.0, f64::max);
            let max_rel = of.iter().map(|r| r.rel_residual).fold(0.0, f64::max);
            QuantitySummary {
                quantity: name.to_string(),
                count: of.len(),
                max_abs_residual: max_abs,
                max_rel_residual: max_rel,
                tolerance,
                pass: of.iter().all(|r| r.rel_residual <= tolerance),
            }
        })
        .collect();
    let pass = error.is_none() && summary.iter().all(|s| s.pass);
    Ok(CurvatureReport {
        kind: "verify_report",
        manifold: base.label().to_string(),
        weights: cfg.weights.clone(),
        radius: cfg.radius,
        seed: cfg.seed,
        samples: completed,
        pass,
        error,
        summary,
        records,
    })
}

fn constant_sample(
    i: usize,
    d: &Draw,
    metric: &WeightedSasakiMetric,
    oracle: &InducedChart,
    bundle: Option<&SphereBundle>,
) -> Result<Vec<VerifyRecord>> {
    let p = &d.point;
    let at = metric.at(p)?;
    let o = oracle.evaluate(p)?;
    let mut out = Vec::new();
    for [x, y, z, w] in &d.tuples {
        out.push(record(i, p, "curvature", at.curvature_rg4(x, y, z, w), o.rg4(x, y, z, w)?));
        out.push(record(i, p, "ricci", at.ricci_g(x, y), o.ricci(x, y)?));
    }
    out.push(record(i, p, "scalar", at.scalar_g(), o.scalar));
    if let Some(b) = bundle {
        // the sphere bundle is checked against its own Gauss-equation traces
        let s = b.at(p)?;
        for [x, y, ..] in &d.tuples {
            let (x, y) = (s.project_tangent(x), s.project_tangent(y));
            out.push(record(i, p, "ricci_srm", s.ricci_srm(&x, &y)?, s.ricci_srm_trace(&x, &y)?));
        }
        out.push(record(i, p, "scalar_srm", s.scalar_srm()?, s.scalar_srm_trace()?));
    }
    crate::error::ensure_finite(&out.iter().flat_map(|r| [r.formula, r.oracle]).collect::<Vec<_>>(), "verify residual")?;
    Ok(out)
}

fn conformal_oracle(base: &ChartedManifold, metric: &ConformalFiberMetric) -> Result<InducedChart> {
    let phi = metric.phi2().clone();
    let weight = FiberWeight::Variable(Arc::new(move |x: &[f64]| (2.0 * phi.value(x)).exp()));
    InducedChart::with_fiber_weight(base.clone(), metric.f1(), weight)
}

fn conformal_sample(i: usize, d: &Draw, metric: &ConformalFiberMetric, oracle: &InducedChart) -> Result<Vec<VerifyRecord>> {
    let p = &d.point;
    let o = oracle.evaluate(p)?;
    let mut out = Vec::new();
    for [x, y, z, w] in &d.tuples {
        let formula = metric.g_inner(&p.x, &metric.curvature_conformal(&p.x, x, y, z)?, w);
        out.push(record(i, p, "curvature", formula, o.rg4(x, y, z, w)?));
    }
    crate::error::ensure_finite(&out.iter().flat_map(|r| [r.formula, r.oracle]).collect::<Vec<_>>(), "verify residual")?;
    Ok(out)
}

impl CurvatureReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        use crate::output::{csv_err, fmt17};
        let m = self.records.first().map(|r| r.x.len()).unwrap_or(0);
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = vec!["sample".into(), "quantity".into()];
        header.extend((1..=m).map(|i| format!("x{i}")));
        header.extend((1..=m).map(|i| format!("u{i}")));
        header.extend(["formula", "oracle", "abs_residual", "rel_residual"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.records {
            let mut row = vec![r.sample.to_string(), r.quantity.clone()];
            row.extend(r.x.iter().chain(&r.u).map(|v| fmt17(*v)));
            row.extend([r.formula, r.oracle, r.abs_residual, r.rel_residual].map(fmt17));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn table(&self) -> String {
        let mut s = format!("verify {} (seed {}, {} samples)\n", self.manifold, self.seed, self.samples);
        s.push_str(&summary_table(&self.summary));
        if let Some(e) = &self.error {
            s.push_str(&format!("error: {e}\n"));
        }
        s.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        s
    }
}

pub(crate) fn summary_table(rows: &[QuantitySummary]) -> String {
    let mut s = format!("{:<12} {:>6} {:>12} {:>12} {:>10} {:>5}\n", "quantity", "count", "max_abs", "max_rel", "tol", "pass");
    for q in rows {
        s.push_str(&format!(
            "{:<12} {:>6} {:>12.3e} {:>12.3e} {:>10.1e} {:>5}\n",
            q.quantity,
            q.count,
            q.max_abs_residual,
            q.max_rel_residual,
            q.tolerance,
            if q.pass { "yes" } else { "no" }
        ));
    }
    s
}
