use serde::{Deserialize, Serialize};

use crate::diagnostics::{normalize_grid, DiagnosticSeries};
use crate::error::{HrvError, Result};
use crate::generators::Pair;
use crate::transforms::{descending_order, gpolar_axes, top_k_indices, Larger};

/// Fraction of the top-`k` points by `A = min(first, second)` with `first > second`.
pub fn qhat_series(first: &[f64], second: &[f64], k_grid: &[usize]) -> Result<DiagnosticSeries> {
    if first.len() != second.len() {
        return Err(HrvError::Usage(format!(
            "q-hat needs equal lengths, got {} and {}",
            first.len(),
            second.len()
        )));
    }
    let n = first.len();
    let grid = normalize_grid(k_grid);
    if let Some(&k) = grid.last() {
        if k > n {
            return Err(HrvError::Usage(format!(
                "q-hat needs k <= n, got k={k}, n={n}"
            )));
        }
    }
    let a: Vec<f64> = first.iter().zip(second).map(|(x, y)| x.min(*y)).collect();
    let order = descending_order(&a);
    let mut points = Vec::with_capacity(grid.len());
    let mut hits = 0usize;
    let mut used = 0usize;
    for k in grid {
        while used < k {
            let i = order[used];
            if first[i] > second[i] {
                hits += 1;
            }
            used += 1;
        }
        points.push((k, hits as f64 / k as f64));
    }
    DiagnosticSeries::new("qhat", points)
}

/// Ratios of the `k` points with the largest minimum coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdedRatios {
    /// Indices of the selected points, by decreasing minimum.
    pub selected: Vec<usize>,
    /// `z1 / z2` for selected points with `z1 > z2`.
    pub theta_first: Vec<f64>,
    /// `z2 / z1` for selected points with `z2 > z1`.
    pub theta_second: Vec<f64>,
    /// `max(z1/z2, z2/z1)` for every selected point.
    pub theta_max: Vec<f64>,
}

pub fn thresholded_ratios(pairs: &[Pair], k: usize) -> Result<ThresholdedRatios> {
    if k > pairs.len() {
        return Err(HrvError::Usage(format!(
            "threshold k={k} exceeds sample size {}",
            pairs.len()
        )));
    }
    if let Some(p) = pairs.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(HrvError::Domain(format!(
            "ratios need strictly positive coordinates, found ({}, {})",
            p.0, p.1
        )));
    }
    let a: Vec<f64> = pairs.iter().map(|p| p.0.min(p.1)).collect();
    let selected = top_k_indices(&a, k);
    let mut out = ThresholdedRatios {
        theta_first: Vec::new(),
        theta_second: Vec::new(),
        theta_max: Vec::with_capacity(k),
        selected,
    };
    for &i in &out.selected {
        let g = gpolar_axes(pairs[i])?;
        match g.which_larger {
            Larger::First => out.theta_first.push(g.theta),
            Larger::Second => out.theta_second.push(g.theta),
            Larger::Tie => {}
        }
        out.theta_max.push(g.theta);
    }
    Ok(out)
}

/// Exponential QQ points: `(-log(1 - i/(m+1)), x_(i))` with `x` sorted ascending.
pub fn qq_exponential(x: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let m1 = (sorted.len() + 1) as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (-(1.0 - (i + 1) as f64 / m1).ln(), v))
        .collect()
}
