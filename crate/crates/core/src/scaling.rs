//! Summaries for timing series.

/// Median of `xs`; the mean of the middle pair for even lengths.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// Least-squares slope of `ln t` against `ln n` over `(n, t)` samples.
/// `None` with fewer than two distinct sizes or a nonpositive value.
pub fn loglog_slope(samples: &[(f64, f64)]) -> Option<f64> {
    if samples.iter().any(|&(n, t)| !(n > 0.0 && t > 0.0)) {
        return None;
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(n, t)| (n.ln(), t.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
