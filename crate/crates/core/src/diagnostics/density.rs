//! Gaussian kernel density estimates.

use std::f64::consts::{FRAC_2_PI, PI};

use serde::{Deserialize, Serialize};

use crate::error::{HrvError, Result};
use crate::generators::Pair;
use crate::transforms::top_k_indices;

/// Kernels are summed only within this many bandwidths of a grid point.
const CUTOFF: f64 = 8.0;
/// Bandwidth used for angular densities whose angles have no spread.
const ANGULAR_FALLBACK_BANDWIDTH: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityEstimate {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(g, d)| 0.5 * (g[1] - g[0]) * (d[0] + d[1]))
            .sum()
    }

    /// Linear interpolation of the density; 0 outside the grid.
    pub fn at(&self, x: f64) -> f64 {
        let i = self.grid.partition_point(|&g| g <= x);
        if i == 0 || i == self.grid.len() {
            return if self.grid.last() == Some(&x) {
                *self.density.last().unwrap()
            } else {
                0.0
            };
        }
        let (g0, g1) = (self.grid[i - 1], self.grid[i]);
        let t = (x - g0) / (g1 - g0);
        self.density[i - 1] * (1.0 - t) + self.density[i] * t
    }
}

/// Gaussian KDE on a grid spanning `[min - 3h, max + 3h]`.
///
/// The default bandwidth is Silverman's `0.9·min(sd, IQR/1.34)·n^(-1/5)`.
/// `grid_size` points are spread uniformly; when that spacing is coarser
/// than `h/4` (long-tailed data), each observation also gets a local
/// stencil at half-bandwidth spacing so the grid resolves every bump.
pub fn kde(x: &[f64], grid_size: usize, bandwidth: Option<f64>) -> Result<DensityEstimate> {
    if x.len() < 2 {
        return Err(HrvError::Usage(format!(
            "KDE needs at least 2 points, got {}",
            x.len()
        )));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(HrvError::Domain(format!("KDE input contains {v}")));
    }
    if grid_size < 2 {
        return Err(HrvError::Usage("KDE grid needs at least 2 points".into()));
    }
    let h = match bandwidth {
        Some(h) if h.is_finite() && h > 0.0 => h,
        Some(h) => {
            return Err(HrvError::Config(format!(
                "bandwidth must be positive, got {h}"
            )))
        }
        None => silverman(x)?,
    };

    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let lo = sorted[0] - 3.0 * h;
    let hi = sorted[sorted.len() - 1] + 3.0 * h;
    let step = (hi - lo) / (grid_size - 1) as f64;
    let mut grid: Vec<f64> = (0..grid_size).map(|i| lo + step * i as f64).collect();
    grid[grid_size - 1] = hi;
    if step > h / 4.0 {
        for &c in &sorted {
            for j in -16..=16 {
                let g = c + 0.5 * h * j as f64;
                if g > lo && g < hi {
                    grid.push(g);
                }
            }
        }
        grid.sort_by(|a, b| a.total_cmp(b));
        grid.dedup();
    }

    let norm = 1.0 / (sorted.len() as f64 * h * (2.0 * PI).sqrt());
    let density = grid
        .iter()
        .map(|&g| {
            let start = sorted.partition_point(|&v| v < g - CUTOFF * h);
            let end = sorted.partition_point(|&v| v <= g + CUTOFF * h);
            let s: f64 = sorted[start..end]
                .iter()
                .map(|&v| {
                    let u = (g - v) / h;
                    (-0.5 * u * u).exp()
                })
                .sum();
            s * norm
        })
        .collect();
    Ok(DensityEstimate {
        grid,
        density,
        bandwidth: h,
    })
}

fn silverman(x: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd.is_nan() || sd <= 0.0 {
        return Err(HrvError::DegenerateData(
            "KDE bandwidth undefined for data with zero variance".into(),
        ));
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * n.powf(-0.2))
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// KDE of normalized angles `(2/π)·atan2(z2, z1) ∈ [0, 1]` of the top `k` points by L1 norm.
/// 0 is the horizontal axis, 1 the vertical one.
pub fn angular_density(pairs: &[Pair], k: usize, grid_size: usize) -> Result<DensityEstimate> {
    if k > pairs.len() {
        return Err(HrvError::Usage(format!(
            "angular density needs k <= n, got k={k}, n={}",
            pairs.len()
        )));
    }
    let norms: Vec<f64> = pairs.iter().map(|p| p.0 + p.1).collect();
    let angles: Vec<f64> = top_k_indices(&norms, k)
        .into_iter()
        .map(|i| {
            let (z1, z2) = pairs[i];
            if z1 == 0.0 && z2 == 0.0 {
                Err(HrvError::Domain("angle undefined at (0, 0)".into()))
            } else {
                Ok(FRAC_2_PI * z2.atan2(z1))
            }
        })
        .collect::<Result<_>>()?;
    match kde(&angles, grid_size, None) {
        Err(HrvError::DegenerateData(_)) => {
            kde(&angles, grid_size, Some(ANGULAR_FALLBACK_BANDWIDTH))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{RngStream, ScalarLaw};

    fn std_normal(n: usize, seed: u64) -> Vec<f64> {
        // Box-Muller on the crate's uniforms
        let mut rng = RngStream::new(seed);
        (0..n)
            .map(|_| {
                let u1 = rng.uniform_open();
                let u2 = rng.uniform_open();
                (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
            })
            .collect()
    }

    #[test]
    fn normal_peak_and_mass() {
        let x = std_normal(10_000, 4);
        let d = kde(&x, 512, None).unwrap();
        let peak = d.at(0.0);
        assert!((peak - 0.398_942).abs() <= 0.03, "peak {peak}");
        assert!(
            (d.integral() - 1.0).abs() <= 0.01,
            "integral {}",
            d.integral()
        );
        assert!(d.density.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn two_points_symmetric() {
        let d = kde(&[0.0, 10.0], 401, None).unwrap();
        assert!((d.at(0.0) - d.at(10.0)).abs() < 1e-9);
        assert!(d.at(0.0) > d.at(5.0));
        assert!((d.integral() - 1.0).abs() <= 0.01);
    }

    #[test]
    fn heavy_tailed_mass_is_resolved() {
        let mut rng = RngStream::new(12);
        let law = ScalarLaw::pareto(0.5).unwrap();
        let x: Vec<f64> = (0..400).map(|_| law.draw(&mut rng)).collect();
        let d = kde(&x, 512, None).unwrap();
        assert!(
            (d.integral() - 1.0).abs() <= 0.01,
            "integral {}",
            d.integral()
        );
    }

    #[test]
    fn kde_errors() {
        assert!(matches!(kde(&[1.0], 10, None), Err(HrvError::Usage(_))));
        assert!(matches!(
            kde(&[2.0, 2.0, 2.0], 10, None),
            Err(HrvError::DegenerateData(_))
        ));
        assert!(kde(&[2.0, 2.0, 2.0], 10, Some(0.5)).is_ok());
        assert!(matches!(
            kde(&[1.0, 2.0], 10, Some(-1.0)),
            Err(HrvError::Config(_))
        ));
    }

    #[test]
    fn horizontal_axis_angles() {
        let pairs: Vec<Pair> = (1..=50).map(|i| (i as f64, 0.0)).collect();
        let d = angular_density(&pairs, 20, 256).unwrap();
        assert_eq!(d.bandwidth, ANGULAR_FALLBACK_BANDWIDTH);
        assert!(d.at(0.0) > 10.0 * d.at(0.2));
    }
}
