//! Detection report: every diagnostic of the MRV/HRV pipeline for one batch.
//!
//! Steps, in order:
//! 1. marginal Hill plots on the raw coordinates;
//! 2. rank transform per [`RankMode`];
//! 3. Hill plot of `A = min` of the transformed coordinates;
//! 4. GPOLAR relative to the axes, split into the branch where the first
//!    coordinate is larger `(A, θ₁)` and the one where the second is `(A, θ₂)`;
//!    Hillish (`θ` and `-θ`) and Pickandsish on each branch;
//! 5. q-hat over the order statistics of `A`;
//! 6. at each threshold: ratio Hill plots, exponential QQ points, ratio KDEs;
//! 7. angular density of the transformed pairs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    angular_density, hill_series, hillish_series, kde, pickandsish_series, qhat_series,
    qq_exponential, thresholded_ratios, DensityEstimate, DiagnosticSeries,
};
use crate::error::{HrvError, Result, ResultExt};
use crate::generators::{BatchMeta, Pair, SampleBatch};
use crate::transforms::{gpolar_axes, pareto_standardize, rank_transform, Larger};

pub const SCHEMA_VERSION: u32 = 1;

/// Series, QQ and density labels used in the report.
pub mod labels {
    pub const MARGINAL_HILL_1: &str = "marginal_hill_1";
    pub const MARGINAL_HILL_2: &str = "marginal_hill_2";
    pub const MIN_HILL: &str = "min_hill";
    pub const HILLISH_FIRST_POS: &str = "hillish_first_pos";
    pub const HILLISH_FIRST_NEG: &str = "hillish_first_neg";
    pub const HILLISH_SECOND_POS: &str = "hillish_second_pos";
    pub const HILLISH_SECOND_NEG: &str = "hillish_second_neg";
    pub const QHAT: &str = "qhat";
    pub const ANGULAR_DENSITY: &str = "angular_density";

    pub fn pickandsish(branch: &str, q: f64) -> String {
        format!("pickandsish_{branch}_q{q}")
    }
    pub fn ratio_tail_hill(which: &str, threshold: usize) -> String {
        format!("ratio_tail_hill_{which}_t{threshold}")
    }
    pub fn ratio_qq(which: &str, threshold: usize) -> String {
        format!("ratio_qq_{which}_t{threshold}")
    }
    pub fn ratio_kde(which: &str, threshold: usize) -> String {
        format!("ratio_kde_{which}_t{threshold}")
    }
}

/// How coordinates are transformed before the joint diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMode {
    /// `r_i = #{j : x_i >= x_j}`.
    #[default]
    Literal,
    /// `n / (n + 1 - r_i)`: ranks on a standard Pareto(1) scale.
    #[serde(alias = "pareto-standardized", alias = "pareto_standardized")]
    Pareto,
    /// No transform.
    Raw,
}

impl std::str::FromStr for RankMode {
    type Err = HrvError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(RankMode::Literal),
            "pareto" | "pareto-standardized" | "pareto_standardized" => Ok(RankMode::Pareto),
            "raw" => Ok(RankMode::Raw),
            other => Err(HrvError::Usage(format!(
                "unknown rank mode {other:?} (expected literal, pareto-standardized or raw)"
            ))),
        }
    }
}

/// Grid of `k` values: `k_min, k_min + step, …, ≤ k_max`, plus any `extra`
/// values. Unset fields default to `k_max = n/10` and `step = max(1, n/1000)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KGrid {
    pub k_min: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_step: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<usize>,
}

impl Default for KGrid {
    fn default() -> Self {
        KGrid {
            k_min: 10,
            k_max: None,
            k_step: None,
            extra: Vec::new(),
        }
    }
}

impl KGrid {
    pub fn resolve(&self, n: usize) -> Vec<usize> {
        let k_max = self.k_max.unwrap_or(n / 10);
        let step = self.k_step.unwrap_or((n / 1000).max(1)).max(1);
        let mut grid: Vec<usize> = (self.k_min.max(2)..=k_max).step_by(step).collect();
        grid.extend(self.extra.iter().copied().filter(|&k| k >= 2));
        grid.sort_unstable();
        grid.dedup();
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectConfig {
    pub k_grid: KGrid,
    pub q_list: Vec<f64>,
    pub thresholds: Vec<usize>,
    pub rank_mode: RankMode,
    /// Number of largest-norm points in the angular density; default `n/10`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angular_k: Option<usize>,
    pub kde_grid_size: usize,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            k_grid: KGrid::default(),
            q_list: vec![0.8],
            thresholds: vec![100, 400],
            rank_mode: RankMode::Literal,
            angular_k: None,
            kde_grid_size: 512,
        }
    }
}

impl DetectConfig {
    fn validate(&self, n: usize) -> Result<()> {
        if let Some(q) = self.q_list.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return Err(HrvError::Config(format!("q must lie in (0, 1), got {q}")));
        }
        let k_max = self.k_grid.resolve(n).last().copied().unwrap_or(0);
        let largest = self
            .thresholds
            .iter()
            .copied()
            .chain(self.angular_k)
            .chain(std::iter::once(k_max))
            .max()
            .unwrap_or(0);
        if largest > n {
            return Err(HrvError::Usage(format!(
                "configured k={largest} exceeds the sample size n={n}"
            )));
        }
        if let Some(t) = self.thresholds.iter().find(|t| **t < 3) {
            return Err(HrvError::Config(format!(
                "thresholds must be at least 3, got {t}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub schema_version: u32,
    pub tool_version: String,
    pub n: usize,
    /// Points with both transformed coordinates strictly positive.
    pub n_interior: usize,
    pub n_first_larger: usize,
    pub n_second_larger: usize,
    pub rank_mode: RankMode,
    pub k_grid: Vec<usize>,
    pub q_list: Vec<f64>,
    pub thresholds: Vec<usize>,
    pub angular_k: usize,
    pub source: BatchMeta,
    /// Diagnostics skipped because a subsample was too small.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub meta: ReportMeta,
    pub series: BTreeMap<String, DiagnosticSeries>,
    pub qq: BTreeMap<String, Vec<(f64, f64)>>,
    pub densities: BTreeMap<String, DensityEstimate>,
}

impl DetectionReport {
    pub fn series(&self, label: &str) -> Option<&DiagnosticSeries> {
        self.series.get(label)
    }

    pub fn value(&self, label: &str, k: usize) -> Option<f64> {
        self.series.get(label).and_then(|s| s.value_at(k))
    }

    /// Restores series labels after deserialization and checks every series invariant.
    pub fn finalize(mut self) -> Result<Self> {
        for (label, s) in self.series.iter_mut() {
            s.label = label.clone();
            s.check()?;
        }
        Ok(self)
    }
}

/// Runs the whole detection pipeline on `batch`. Pure in `(batch, config)`.
pub fn detect_report(batch: &SampleBatch, config: &DetectConfig) -> Result<DetectionReport> {
    let n = batch.len();
    config.validate(n)?;
    let grid = config.k_grid.resolve(n);
    let mut series = BTreeMap::new();
    let mut qq = BTreeMap::new();
    let mut densities = BTreeMap::new();
    let mut notes = Vec::new();

    let mut put = |label: String, mut s: DiagnosticSeries| {
        s.label = label.clone();
        series.insert(label, s);
    };

    // marginal tails on the raw scale
    for (label, values) in [
        (labels::MARGINAL_HILL_1, batch.first()),
        (labels::MARGINAL_HILL_2, batch.second()),
    ] {
        let positive: Vec<f64> = values.into_iter().filter(|v| *v > 0.0).collect();
        let s = hill_series(&positive, &below(&grid, positive.len())).context(label)?;
        put(label.to_string(), s);
    }

    let transformed = transform(&batch.pairs, config.rank_mode);
    let interior: Vec<Pair> = transformed
        .iter()
        .copied()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .collect();
    let m = interior.len();

    let mins: Vec<f64> = interior.iter().map(|p| p.0.min(p.1)).collect();
    put(
        labels::MIN_HILL.to_string(),
        hill_series(&mins, &below(&grid, m)).context(labels::MIN_HILL)?,
    );

    let mut branches: [(Vec<f64>, Vec<f64>); 2] = Default::default();
    for &p in &interior {
        let g = gpolar_axes(p)?;
        match g.which_larger {
            Larger::First => {
                branches[0].0.push(g.radius);
                branches[0].1.push(g.theta);
            }
            Larger::Second => {
                branches[1].0.push(g.radius);
                branches[1].1.push(g.theta);
            }
            Larger::Tie => {}
        }
    }
    for ((name, pos, neg), (a, theta)) in [
        (
            "first",
            labels::HILLISH_FIRST_POS,
            labels::HILLISH_FIRST_NEG,
        ),
        (
            "second",
            labels::HILLISH_SECOND_POS,
            labels::HILLISH_SECOND_NEG,
        ),
    ]
    .into_iter()
    .zip(&branches)
    {
        let size = a.len();
        let hgrid = within(&grid, 2, size);
        let neg_theta: Vec<f64> = theta.iter().map(|t| -t).collect();
        put(
            pos.to_string(),
            hillish_series(a, theta, &hgrid).context(pos)?,
        );
        put(
            neg.to_string(),
            hillish_series(a, &neg_theta, &hgrid).context(neg)?,
        );
        let pgrid = within(&grid, 4, size);
        for &q in &config.q_list {
            let label = labels::pickandsish(name, q);
            let s = pickandsish_series(a, theta, &pgrid, q).context(label.clone())?;
            put(label, s);
        }
    }

    let first: Vec<f64> = interior.iter().map(|p| p.0).collect();
    let second: Vec<f64> = interior.iter().map(|p| p.1).collect();
    put(
        labels::QHAT.to_string(),
        qhat_series(&first, &second, &within(&grid, 2, m)).context(labels::QHAT)?,
    );

    for &t in &config.thresholds {
        let ratios =
            thresholded_ratios(&interior, t).context(format!("thresholded ratios at {t}"))?;
        for (which, values) in [
            ("1", &ratios.theta_first),
            ("2", &ratios.theta_second),
            ("max", &ratios.theta_max),
        ] {
            let label = labels::ratio_tail_hill(which, t);
            let kgrid: Vec<usize> = (2..values.len()).collect();
            let s = hill_series(values, &kgrid).context(label.clone())?;
            put(label, s);

            // log-ratios for the branch ratios, raw max-ratio otherwise
            let qq_input: Vec<f64> = if which == "max" {
                values.clone()
            } else {
                values.iter().map(|v| v.ln()).collect()
            };
            if !qq_input.is_empty() {
                qq.insert(labels::ratio_qq(which, t), qq_exponential(&qq_input));
            }

            if which != "max" {
                let label = labels::ratio_kde(which, t);
                match kde(values, config.kde_grid_size, None) {
                    Ok(d) => {
                        densities.insert(label, d);
                    }
                    Err(HrvError::Usage(_)) | Err(HrvError::DegenerateData(_)) => {
                        notes.push(format!("{label}: skipped, {} ratios", values.len()));
                    }
                    Err(e) => return Err(e.context(label)),
                }
            }
        }
    }

    let angular_k = config.angular_k.unwrap_or(n / 10).min(n);
    if angular_k >= 2 {
        let d = angular_density(&transformed, angular_k, config.kde_grid_size)
            .context(labels::ANGULAR_DENSITY)?;
        densities.insert(labels::ANGULAR_DENSITY.to_string(), d);
    } else {
        notes.push(format!(
            "{}: skipped, k={angular_k}",
            labels::ANGULAR_DENSITY
        ));
    }

    Ok(DetectionReport {
        meta: ReportMeta {
            schema_version: SCHEMA_VERSION,
            tool_version: crate::TOOL_VERSION.to_string(),
            n,
            n_interior: m,
            n_first_larger: branches[0].0.len(),
            n_second_larger: branches[1].0.len(),
            rank_mode: config.rank_mode,
            k_grid: grid,
            q_list: config.q_list.clone(),
            thresholds: config.thresholds.clone(),
            angular_k,
            source: batch.meta.clone(),
            notes,
        },
        series,
        qq,
        densities,
    })
}

fn transform(pairs: &[Pair], mode: RankMode) -> Vec<Pair> {
    let first: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let second: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (a, b) = match mode {
        RankMode::Raw => return pairs.to_vec(),
        RankMode::Literal => (
            rank_transform(&first)
                .into_iter()
                .map(|r| r as f64)
                .collect::<Vec<_>>(),
            rank_transform(&second)
                .into_iter()
                .map(|r| r as f64)
                .collect::<Vec<_>>(),
        ),
        RankMode::Pareto => (
            pareto_standardize(&rank_transform(&first)),
            pareto_standardize(&rank_transform(&second)),
        ),
    };
    a.into_iter().zip(b).collect()
}

/// Grid values usable by a Hill plot on `size` points (`k < size`).
fn below(grid: &[usize], size: usize) -> Vec<usize> {
    grid.iter().copied().filter(|&k| k < size).collect()
}

fn within(grid: &[usize], lo: usize, size: usize) -> Vec<usize> {
    grid.iter()
        .copied()
        .filter(|&k| k >= lo && k <= size)
        .collect()
}
