use crate::diagnostics::{normalize_grid, DiagnosticSeries};
use crate::error::{HrvError, Result};

/// Hill plot on the tail-index scale: at each `k`, `α̂ = 1 / H_k` with
/// `H_k = (1/k) Σ_{i≤k} log x_(i) - log x_(k+1)` over the decreasing order statistics.
pub fn hill_series(x: &[f64], k_grid: &[usize]) -> Result<DiagnosticSeries> {
    let logs = sorted_logs_desc(x)?;
    let n = logs.len();
    let grid = normalize_grid(k_grid);
    if let Some(&k) = grid.last() {
        if k >= n {
            return Err(HrvError::Usage(format!(
                "Hill needs k < n, got k={k}, n={n}"
            )));
        }
    }
    if grid.first().is_some_and(|&k| k < 2) {
        return Err(HrvError::Usage("Hill series needs k >= 2".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut sum = 0.0;
    let mut used = 0;
    for k in grid {
        while used < k {
            sum += logs[used];
            used += 1;
        }
        let h = sum / k as f64 - logs[k];
        points.push((k, 1.0 / h));
    }
    DiagnosticSeries::new("hill", points)
}

/// Single Hill estimate `α̂` at `k` (1 ≤ k < n).
pub fn hill_at(x: &[f64], k: usize) -> Result<f64> {
    let logs = sorted_logs_desc(x)?;
    if k == 0 || k >= logs.len() {
        return Err(HrvError::Usage(format!(
            "Hill needs 1 <= k < n, got k={k}, n={}",
            logs.len()
        )));
    }
    let mean: f64 = logs[..k].iter().sum::<f64>() / k as f64;
    Ok(1.0 / (mean - logs[k]))
}

fn sorted_logs_desc(x: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = x.iter().find(|v| v.is_nan() || **v <= 0.0) {
        return Err(HrvError::Domain(format!(
            "Hill estimator needs positive data, found {bad}"
        )));
    }
    let mut logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    logs.sort_by(|a, b| b.total_cmp(a));
    Ok(logs)
}
