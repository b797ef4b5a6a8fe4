//! Text tables from stored verify, scan and geodesic outputs. Nothing is recomputed.

use std::path::Path;

use serde_json::Value;

use crate::error::{GeoError, Result};

pub fn render(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| GeoError::Config(format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    if is_json {
        render_json(&text)
    } else {
        render_csv(&text)
    }
}

fn num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:.6e}"),
        None if v.is_null() => "-".into(),
        None => v.to_string(),
    }
}

fn render_json(text: &str) -> Result<String> {
    let v: Value = serde_json::from_str(text).map_err(|e| GeoError::Config(format!("report input: {e}")))?;
    match v.get("kind").and_then(Value::as_str) {
        Some("verify_report") => Ok(verify_table(&v)),
        Some("scan_summary") => Ok(scan_summary_table(&v)),
        Some("geodesic_summary") => Ok(geodesic_table(&v)),
        _ => Err(GeoError::Config("report input is not a verify, scan or geodesic summary".into())),
    }
}

fn verify_table(v: &Value) -> String {
    let mut s = format!(
        "verify {} (seed {}, {} samples)\n",
        v["manifold"].as_str().unwrap_or("?"),
        v["seed"],
        v["samples"]
    );
    s.push_str(&format!("{:<12} {:>6} {:>14} {:>14} {:>14} {:>5}\n", "quantity", "count", "max_abs", "max_rel", "tol", "pass"));
    for q in v["summary"].as_array().into_iter().flatten() {
        s.push_str(&format!(
            "{:<12} {:>6} {:>14} {:>14} {:>14} {:>5}\n",
            q["quantity"].as_str().unwrap_or("?"),
            q["count"],
            num(&q["max_abs_residual"]),
            num(&q["max_rel_residual"]),
            num(&q["tolerance"]),
            if q["pass"].as_bool() == Some(true) { "yes" } else { "no" }
        ));
    }
    if let Some(e) = v["error"].as_str() {
        s.push_str(&format!("error: {e}\n"));
    }
    s.push_str(if v["pass"].as_bool() == Some(true) { "PASS\n" } else { "FAIL\n" });
    s
}

fn scan_summary_table(v: &Value) -> String {
    let mut s = format!(
        "scan {} (dim {}, {} samples, {} cells, {} positive)\n{}\n",
        v["manifold"].as_str().unwrap_or("?"),
        v["dim"],
        v["samples"],
        v["cells"],
        v["positive_cells"],
        v["message"].as_str().unwrap_or("")
    );
    let thresholds = v["thresholds"].as_array().cloned().unwrap_or_default();
    if !thresholds.is_empty() {
        s.push_str(&format!("{:<5} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14}\n", "axis", "f1", "f2", "r", "lower", "upper", "estimate"));
        for t in thresholds {
            s.push_str(&format!(
                "{:<5} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14}\n",
                t["axis"].as_str().unwrap_or("?"),
                num(&t["f1"]),
                num(&t["f2"]),
                num(&t["r"]),
                num(&t["lower"]),
                num(&t["upper"]),
                num(&t["estimate"])
            ));
        }
    }
    for m in v["monotonicity"].as_array().into_iter().flatten() {
        s.push_str(&format!("{}: {} of {} pairs violate\n", m["property"].as_str().unwrap_or("?"), m["violations"], m["checked_pairs"]));
    }
    s
}

fn geodesic_table(v: &Value) -> String {
    let mut s = String::new();
    for key in ["t_final", "dt", "steps", "initial_g_speed", "speed_drift", "drift_tolerance", "drift_monotone", "diverged_at"] {
        s.push_str(&format!("{:<16} {}\n", key, num(&v[key])));
    }
    if let Some(orders) = v["convergence"]["observed_orders"].as_array() {
        let list: Vec<String> = orders.iter().map(|o| format!("{:.3}", o.as_f64().unwrap_or(f64::NAN))).collect();
        s.push_str(&format!("{:<16} {}\n", "observed_orders", list.join(" ")));
    }
    s.push_str(if v["pass"].as_bool() == Some(true) { "PASS\n" } else { "FAIL\n" });
    s
}

fn render_csv(text: &str) -> Result<String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = match reader.headers() {
        Ok(h) => h.iter().map(String::from).collect(),
        Err(_) => return Ok("no data\n".into()),
    };
    let rows: Vec<csv::StringRecord> =
        reader.records().collect::<std::result::Result<_, _>>().map_err(|e| GeoError::Config(format!("report input: {e}")))?;
    if rows.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Ok("no data\n".into());
    }
    let col = |name: &str| header.iter().position(|h| h == name);
    let value = |row: &csv::StringRecord, i: usize| -> Result<f64> {
        row.get(i)
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| GeoError::Config(format!("report input: bad value in column {}", header[i])))
    };
    if let (Some(f1), Some(f2), Some(r), Some(ms), Some(pos)) = (col("f1"), col("f2"), col("r"), col("min_scalar"), col("positive")) {
        let mut table: Vec<(f64, f64, f64, f64, bool)> = Vec::with_capacity(rows.len());
        for row in &rows {
            table.push((value(row, r)?, value(row, f1)?, value(row, f2)?, value(row, ms)?, row.get(pos) == Some("1")));
        }
        table.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
        let mut s = format!("{:>14} {:>14} {:>14} {:>14} {:>8} {:>8}\n", "r", "f1", "f2", "min_scalar", "positive", "frontier");
        for (k, (r, f1, f2, ms, positive)) in table.iter().enumerate() {
            // frontier: the sign differs from the previous radius at the same weights
            let prev = table[..k].iter().rev().find(|t| t.1 == *f1 && t.2 == *f2);
            let frontier = prev.is_some_and(|p| p.4 != *positive);
            s.push_str(&format!(
                "{:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>8} {:>8}\n",
                r,
                f1,
                f2,
                ms,
                if *positive { "1" } else { "0" },
                if frontier { "*" } else { "" }
            ));
        }
        return Ok(s);
    }
    if let (Some(t), Some(g)) = (col("t"), col("g_speed")) {
        let first = (value(&rows[0], t)?, value(&rows[0], g)?);
        let last = (value(&rows[rows.len() - 1], t)?, value(&rows[rows.len() - 1], g)?);
        let mut drift: f64 = 0.0;
        for row in &rows {
            drift = drift.max((value(row, g)? - first.1).abs());
        }
        return Ok(format!(
            "trajectory with {} rows\n{:<16} {:.6e} .. {:.6e}\n{:<16} {:.6e} .. {:.6e}\n{:<16} {:.6e}\n",
            rows.len(),
            "t",
            first.0,
            last.0,
            "g_speed",
            first.1,
            last.1,
            "max |ds|",
            drift
        ));
    }
    if let (Some(q), Some(rel)) = (col("quantity"), col("rel_residual")) {
        let mut names: Vec<String> = Vec::new();
        let mut worst: Vec<(usize, f64)> = Vec::new();
        for row in &rows {
            let name = row.get(q).unwrap_or("?").to_string();
            let v = value(row, rel)?;
            match names.iter().position(|n| *n == name) {
                Some(i) => {
                    worst[i].0 += 1;
                    worst[i].1 = worst[i].1.max(v);
                }
                None => {
                    names.push(name);
                    worst.push((1, v));
                }
            }
        }
        let mut s = format!("{:<12} {:>6} {:>14}\n", "quantity", "count", "max_rel");
        for (n, (c, w)) in names.iter().zip(worst) {
            s.push_str(&format!("{n:<12} {c:>6} {w:>14.6e}\n"));
        }
        return Ok(s);
    }
    Err(GeoError::Config("report input CSV has an unrecognized header".into()))
}
