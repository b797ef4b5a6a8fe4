//! Sweep of (f1, f2, r) for positive scalar curvature of S_rM.
//!
//! Sample points are drawn once and shared by every grid cell, so the
//! per-cell minimum is a continuous function of the parameters and sign
//! changes can be refined by bisection on the same sample set.

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{random_unit_direction, scalar_srm_from_parts, SphereBundle};
use crate::base_manifold::ChartedManifold;
use crate::error::{GeoError, Result};
use crate::output::{csv_err, fmt17, to_json_string, worker_pool};
use crate::sasaki::{TangentBundlePoint, WeightedSasakiMetric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub r: Vec<f64>,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("f1", &self.f1), ("f2", &self.f2), ("r", &self.r)] {
            if axis.is_empty() {
                return Err(GeoError::Config(format!("{name} grid is empty")));
            }
            if axis.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(GeoError::Config(format!("{name} grid must hold positive finite values")));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GeoError::Config(format!("{name} grid must be strictly increasing")));
            }
        }
        Ok(())
    }

    /// `count` evenly spaced values from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        match count {
            0 => vec![],
            1 => vec![lo],
            _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
        }
    }

    fn cell_count(&self) -> usize {
        self.f1.len() * self.f2.len() * self.r.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    F1,
    F2,
    R,
}

/// One sampled base point with a unit fiber direction and the two
/// quantities the constant-radius scalar curvature depends on.
#[derive(Debug, Clone)]
struct Sample {
    x: Vec<f64>,
    direction: nalgebra::DVector<f64>,
    base_scalar: f64,
    /// Σ(ℛ_ijk)² at |u| = 1; it scales with r².
    script_r_unit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCell {
    pub f1: f64,
    pub f2: f64,
    pub r: f64,
    pub min_scalar: f64,
    pub argmin_x: Vec<f64>,
    pub argmin_u: Vec<f64>,
    pub positive: bool,
}

/// A sign change of the sampled minimum along one axis, the other two held fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub axis: Axis,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub r: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    /// Zero of the sampled minimum inside [lower, upper].
    pub estimate: f64,
    /// True when the minimum turns positive as the axis value increases.
    pub positive_above: bool,
}

impl Threshold {
    pub fn brackets(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Monotonicity {
    pub property: String,
    pub checked_pairs: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub manifold: String,
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub cells: usize,
    pub positive_cells: usize,
    pub all_positive: bool,
    pub sign_change: bool,
    pub message: String,
    pub thresholds: Vec<Threshold>,
    pub monotonicity: Vec<Monotonicity>,
    /// Largest |S̃ − S^G| over the samples; only for surfaces.
    pub dimension_two_max_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub summary: ScanSummary,
    pub cells: Vec<ScanCell>,
}

impl ScanReport {
    pub fn cell(&self, f1: f64, f2: f64, r: f64) -> Option<&ScanCell> {
        self.cells.iter().find(|c| c.f1 == f1 && c.f2 == f2 && c.r == r)
    }

    pub fn thresholds_along(&self, axis: Axis) -> impl Iterator<Item = &Threshold> {
        self.summary.thresholds.iter().filter(move |t| t.axis == axis)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let m = self.summary.dim;
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = ["f1", "f2", "r", "min_scalar"].iter().map(|s| s.to_string()).collect();
        header.extend((1..=m).map(|i| format!("argmin_x{i}")));
        header.extend((1..=m).map(|i| format!("argmin_u{i}")));
        header.push("positive".into());
        w.write_record(&header).map_err(csv_err)?;
        for c in &self.cells {
            let mut row = vec![fmt17(c.f1), fmt17(c.f2), fmt17(c.r), fmt17(c.min_scalar)];
            row.extend(c.argmin_x.iter().chain(&c.argmin_u).map(|v| fmt17(*v)));
            row.push(if c.positive { "1" } else { "0" }.into());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        to_json_string(&self.summary)
    }

    /// Writes `<stem>.csv` and `<stem>.json`.
    pub fn write_files(&self, csv_path: &Path, json_path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(csv_path)?)?;
        std::fs::write(json_path, self.summary_json()?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub grid: ScanGrid,
    pub samples: usize,
    pub seed: u64,
}

fn min_over(samples: &[Sample], m: usize, f1: f64, f2: f64, r: f64) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0);
    for (i, s) in samples.iter().enumerate() {
        let v = scalar_srm_from_parts(m, f1, f2, r, s.base_scalar, r * r * s.script_r_unit);
        if v < best.0 {
            best = (v, i);
        }
    }
    best
}

/// Minimum of S̃ over the sampled points of S_rM for each grid cell, with
/// sign-change brackets along every axis.
pub fn scan_positive_scalar(base: &ChartedManifold, config: &ScanConfig) -> Result<ScanReport> {
    config.grid.validate()?;
    if config.samples == 0 {
        return Err(GeoError::Config("scan needs at least one sample point".into()));
    }
    let m = base.dim();
    if m < 2 {
        return Err(GeoError::Config("scan needs a base of dimension at least 2".into()));
    }
    let pool = worker_pool()?;
    let unit = WeightedSasakiMetric::sasaki(base.clone());

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut draws = Vec::with_capacity(config.samples);
    for _ in 0..config.samples {
        let x = base.sample_point(&mut rng);
        let dir = random_unit_direction(base, &x, &mut rng)?;
        draws.push((x, dir));
    }
    let samples: Vec<Sample> = pool.install(|| {
        draws
            .into_par_iter()
            .map(|(x, direction)| {
                let at = unit.at(&TangentBundlePoint { x: x.clone(), u: direction.clone() })?;
                let sample = Sample { base_scalar: at.base_scalar(), script_r_unit: at.script_r_square_sum(), x, direction };
                crate::error::ensure_finite(&[sample.base_scalar, sample.script_r_unit], "scan sample")?;
                Ok(sample)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let grid = &config.grid;
    let params: Vec<(f64, f64, f64)> = grid
        .f1
        .iter()
        .flat_map(|&f1| grid.f2.iter().flat_map(move |&f2| grid.r.iter().map(move |&r| (f1, f2, r))))
        .collect();
    let cells: Vec<ScanCell> = pool.install(|| {
        params
            .par_iter()
            .map(|&(f1, f2, r)| {
                let (min_scalar, i) = min_over(&samples, m, f1, f2, r);
                let s = &samples[i];
                ScanCell {
                    f1,
                    f2,
                    r,
                    min_scalar,
                    argmin_x: s.x.clone(),
                    argmin_u: (&s.direction * r).iter().copied().collect(),
                    positive: min_scalar > 0.0,
                }
            })
            .collect()
    });
    if let Some(bad) = cells.iter().find(|c| !c.min_scalar.is_finite()) {
        return Err(GeoError::Numeric(format!("scalar curvature at f1={}, f2={}, r={}", bad.f1, bad.f2, bad.r)));
    }

    let index = |a: usize, b: usize, c: usize| (a * grid.f2.len() + b) * grid.r.len() + c;
    let positive_cells = cells.iter().filter(|c| c.positive).count();
    let all_positive = positive_cells == cells.len();

    let (thresholds, dimension_two_max_defect, message) = if m == 2 {
        let defect = surface_defect(base, &samples, grid)?;
        let note = format!(
            "dimension 2: S_rM and TM have the same Ricci and scalar curvature (max sampled defect {defect:.3e}); no positivity frontier"
        );
        (Vec::new(), Some(defect), note)
    } else {
        let thresholds = find_thresholds(&samples, m, grid, &cells, &index);
        let message = if thresholds.is_empty() {
            if all_positive {
                "no sign change; all positive".to_string()
            } else if positive_cells == 0 {
                "no sign change; all non-positive".to_string()
            } else {
                "no sign change along any axis".to_string()
            }
        } else {
            format!("{} sign change(s) bracketed", thresholds.len())
        };
        (thresholds, None, message)
    };
    let sign_change = !thresholds.is_empty();

    let monotonicity = monotonicity(grid, &cells, &index);
    Ok(ScanReport {
        summary: ScanSummary {
            manifold: base.label().to_string(),
            dim: m,
            samples: samples.len(),
            seed: config.seed,
            cells: grid.cell_count(),
            positive_cells,
            all_positive,
            sign_change,
            message,
            thresholds,
            monotonicity,
            dimension_two_max_defect,
        },
        cells,
    })
}

fn surface_defect(base: &ChartedManifold, samples: &[Sample], grid: &ScanGrid) -> Result<f64> {
    let (f1, f2, r) = (grid.f1[0], grid.f2[0], grid.r[0]);
    let bundle = SphereBundle::constant(WeightedSasakiMetric::new(base.clone(), f1, f2)?, r)?;
    let mut worst: f64 = 0.0;
    for s in samples {
        let p = bundle.point_on_bundle(&s.x, &s.direction)?;
        let at = bundle.at(&p)?;
        worst = worst.max((at.scalar_srm()? - at.sasaki().scalar_g()).abs());
    }
    Ok(worst)
}

fn find_thresholds(
    samples: &[Sample],
    m: usize,
    grid: &ScanGrid,
    cells: &[ScanCell],
    index: &dyn Fn(usize, usize, usize) -> usize,
) -> Vec<Threshold> {
    let mut out = Vec::new();
    let (n1, n2, nr) = (grid.f1.len(), grid.f2.len(), grid.r.len());
    // r varies fastest, then f2, then f1; thresholds follow the same order
    for a in 0..n1 {
        for b in 0..n2 {
            let line: Vec<usize> = (0..nr).map(|c| index(a, b, c)).collect();
            let eval = |t: f64| min_over(samples, m, grid.f1[a], grid.f2[b], t).0;
            push_brackets(&mut out, Axis::R, &grid.r, &line, cells, eval, (Some(grid.f1[a]), Some(grid.f2[b]), None));
        }
    }
    for b in 0..n2 {
        for c in 0..nr {
            let line: Vec<usize> = (0..n1).map(|a| index(a, b, c)).collect();
            let eval = |t: f64| min_over(samples, m, t, grid.f2[b], grid.r[c]).0;
            push_brackets(&mut out, Axis::F1, &grid.f1, &line, cells, eval, (None, Some(grid.f2[b]), Some(grid.r[c])));
        }
    }
    for a in 0..n1 {
        for c in 0..nr {
            let line: Vec<usize> = (0..n2).map(|b| index(a, b, c)).collect();
            let eval = |t: f64| min_over(samples, m, grid.f1[a], t, grid.r[c]).0;
            push_brackets(&mut out, Axis::F2, &grid.f2, &line, cells, eval, (Some(grid.f1[a]), None, Some(grid.r[c])));
        }
    }
    out
}

fn push_brackets(
    out: &mut Vec<Threshold>,
    axis: Axis,
    values: &[f64],
    line: &[usize],
    cells: &[ScanCell],
    eval: impl Fn(f64) -> f64,
    fixed: (Option<f64>, Option<f64>, Option<f64>),
) {
    for k in 1..line.len() {
        let (lo, hi) = (&cells[line[k - 1]], &cells[line[k]]);
        if lo.positive == hi.positive {
            continue;
        }
        let estimate = bisect(&eval, values[k - 1], values[k], lo.positive);
        out.push(Threshold {
            axis,
            f1: fixed.0,
            f2: fixed.1,
            r: fixed.2,
            lower: values[k - 1],
            upper: values[k],
            estimate,
            positive_above: hi.positive,
        });
    }
}

fn bisect(eval: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, lo_positive: bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (eval(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn monotonicity(grid: &ScanGrid, cells: &[ScanCell], index: &dyn Fn(usize, usize, usize) -> usize) -> Vec<Monotonicity> {
    let (n1, n2, nr) = (grid.f1.len(), grid.f2.len(), grid.r.len());
    let mut in_f1 = Monotonicity { property: "min scalar non-decreasing in f1 at fixed f2, r".into(), checked_pairs: 0, violations: 0 };
    let mut in_f2 = Monotonicity { property: "min scalar non-increasing in f2 at fixed f1, r".into(), checked_pairs: 0, violations: 0 };
    for b in 0..n2 {
        for c in 0..nr {
            for a in 1..n1 {
                in_f1.checked_pairs += 1;
                if cells[index(a, b, c)].min_scalar < cells[index(a - 1, b, c)].min_scalar {
                    in_f1.violations += 1;
                }
            }
        }
    }
    for a in 0..n1 {
        for c in 0..nr {
            for b in 1..n2 {
                in_f2.checked_pairs += 1;
                if cells[index(a, b, c)].min_scalar > cells[index(a, b - 1, c)].min_scalar {
                    in_f2.violations += 1;
                }
            }
        }
    }
    vec![in_f1, in_f2]
}
