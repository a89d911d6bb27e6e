//! Hillish and Pickandsish statistics for checking a CEV model and whether
//! its limit is a product measure.

use crate::diagnostics::{normalize_grid, DiagnosticSeries};
use crate::error::{HrvError, Result};
use crate::transforms::ConcomitantTable;

/// `(1/k) Σ_{j≤k} log(k/j) · log(k/N_j^k)` over the concomitants of the top `k` ξ's.
///
/// Tends to 1 for both `η` and `-η` exactly when the CEV limit is a product measure.
/// The negated variant is obtained by passing `-η`.
pub fn hillish(xi: &[f64], eta: &[f64], k: usize) -> Result<f64> {
    let table = ConcomitantTable::new(xi, eta)?;
    hillish_from_table(&table, k)
}

pub fn hillish_series(xi: &[f64], eta: &[f64], k_grid: &[usize]) -> Result<DiagnosticSeries> {
    let table = ConcomitantTable::new(xi, eta)?;
    let points = normalize_grid(k_grid)
        .into_iter()
        .map(|k| Ok((k, hillish_from_table(&table, k)?)))
        .collect::<Result<Vec<_>>>()?;
    DiagnosticSeries::new("hillish", points)
}

fn hillish_from_table(table: &ConcomitantTable, k: usize) -> Result<f64> {
    if k < 2 || k > table.len() {
        return Err(HrvError::Usage(format!(
            "Hillish needs 2 <= k <= n, got k={k}, n={}",
            table.len()
        )));
    }
    let kf = k as f64;
    let ranks = table.ranks_within(k)?;
    let sum: f64 = ranks
        .iter()
        .enumerate()
        .map(|(j, &nj)| (kf / (j + 1) as f64).ln() * (kf / nj as f64).ln())
        .sum();
    Ok(sum / kf)
}

/// `(η*_{qk:k} - η*_{qk/2:k/2}) / (η*_{qk:k} - η*_{qk/2:k})` with `η*_{s:t} := η*_{⌈s⌉:⌈t⌉}`.
///
/// Tends to 0 exactly when the CEV limit is a product measure.
pub fn pickandsish(xi: &[f64], eta: &[f64], k: usize, q: f64) -> Result<f64> {
    let table = ConcomitantTable::new(xi, eta)?;
    pickandsish_from_table(&table, k, q)
}

pub fn pickandsish_series(
    xi: &[f64],
    eta: &[f64],
    k_grid: &[usize],
    q: f64,
) -> Result<DiagnosticSeries> {
    let table = ConcomitantTable::new(xi, eta)?;
    let points = normalize_grid(k_grid)
        .into_iter()
        .map(|k| Ok((k, pickandsish_from_table(&table, k, q)?)))
        .collect::<Result<Vec<_>>>()?;
    DiagnosticSeries::new(format!("pickandsish_q{q}"), points)
}

fn pickandsish_from_table(table: &ConcomitantTable, k: usize, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(HrvError::Config(format!(
            "Pickandsish needs 0 < q < 1, got {q}"
        )));
    }
    if k < 4 || k > table.len() {
        return Err(HrvError::Usage(format!(
            "Pickandsish needs 4 <= k <= n, got k={k}, n={}",
            table.len()
        )));
    }
    let kf = k as f64;
    let upper = table.order_stat(ceil_index(q * kf), k)?;
    let half = table.order_stat(ceil_index(q * kf / 2.0), ceil_index(kf / 2.0))?;
    let lower = table.order_stat(ceil_index(q * kf / 2.0), k)?;
    let denom = upper - lower;
    if denom == 0.0 {
        return Err(HrvError::DegenerateQuantile(format!(
            "eta*_(qk:k) equals eta*_(qk/2:k) at k={k}, q={q}"
        )));
    }
    Ok((upper - half) / denom)
}

/// `⌈x⌉` for a positive product like `q·k`, ignoring float noise just above an integer.
pub(crate) fn ceil_index(x: f64) -> usize {
    let guarded = x - 1e-9 * x.max(1.0);
    (guarded.ceil() as usize).max(1)
}
