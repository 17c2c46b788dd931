//! `udg bench`: stage timings over a size series.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::time::Instant;

use anyhow::{bail, Result};
use serde_json::json;

use udg_core::diameter::{approx_diameter, DiameterConfig};
use udg_core::generate::{generate_connected, GenConfig};
use udg_core::scaling::{loglog_slope, median};
use udg_core::shortest_paths::sssp;
use udg_core::verification::exact_diameter;
use udg_core::GridIndex;

use crate::{emit, BenchArgs, SCHEMA};

const STAGES: [&str; 7] = ["sssp", "clustering", "fields", "patterns", "farthest", "interior", "total"];

struct Row {
    n: usize,
    r: usize,
    /// Median milliseconds per stage, in `STAGES` order.
    ms: Vec<f64>,
    brute_ms: Option<f64>,
}

pub fn run(a: &BenchArgs, json: bool) -> Result<bool> {
    if a.sizes.is_empty() || a.repeats == 0 {
        bail!("need at least one size and one repeat");
    }
    let mut rows = Vec::new();
    for &n in &a.sizes {
        let (pts, _) = generate_connected(&GenConfig::uniform(n, a.seed), 100)?;
        let cfg = DiameterConfig { r: a.r, ..DiameterConfig::new(a.mode.into()) };
        let mut samples = vec![Vec::new(); STAGES.len()];
        let mut r = 0;
        for _ in 0..a.repeats {
            let t = Instant::now();
            let grid = GridIndex::new(&pts);
            sssp(&pts, &grid, 0)?;
            samples[0].push(t.elapsed().as_secs_f64() * 1e3);

            let t = Instant::now();
            let res = approx_diameter(&pts, &cfg)?;
            let total = t.elapsed();
            r = res.r;
            let tm = &res.times;
            for (i, d) in [tm.clustering, tm.fields, tm.patterns, tm.farthest, tm.interior, total].iter().enumerate() {
                samples[i + 1].push(d.as_secs_f64() * 1e3);
            }
        }
        let brute_ms = if n <= a.brute_max {
            let mut b = Vec::new();
            for _ in 0..a.repeats {
                let t = Instant::now();
                exact_diameter(&pts)?;
                b.push(t.elapsed().as_secs_f64() * 1e3);
            }
            median(&b)
        } else {
            None
        };
        let ms = samples.iter().map(|s| median(s).unwrap_or(0.0)).collect();
        rows.push(Row { n, r, ms, brute_ms });
    }

    let slopes: Vec<Option<f64>> = (0..STAGES.len())
        .map(|i| {
            let pts: Vec<(f64, f64)> = rows.iter().map(|row| (row.n as f64, row.ms[i])).collect();
            loglog_slope(&pts)
        })
        .collect();

    if json {
        let mut out = Vec::new();
        for row in &rows {
            for (i, stage) in STAGES.iter().enumerate() {
                out.push(json!({
                    "n": row.n, "stage": stage, "median_ms": row.ms[i], "r": row.r,
                    "slope": slopes[i], "brute_ms": row.brute_ms,
                }));
            }
        }
        let summary: BTreeMap<&str, Option<f64>> = STAGES.iter().copied().zip(slopes.iter().copied()).collect();
        emit(&json!({"schema": SCHEMA, "rows": out, "slopes": summary}))?;
        return Ok(true);
    }

    let mut out = io::stdout().lock();
    writeln!(out, "n,stage,median_ms,r,slope,brute_ms")?;
    let opt = |x: Option<f64>, prec: usize| x.map(|v| format!("{v:.prec$}")).unwrap_or_default();
    for row in &rows {
        for (i, stage) in STAGES.iter().enumerate() {
            writeln!(
                out,
                "{},{stage},{:.3},{},{},{}",
                row.n,
                row.ms[i],
                row.r,
                opt(slopes[i], 3),
                opt(row.brute_ms, 3)
            )?;
        }
    }
    Ok(true)
}
