//! Estimator kernels and the detection report.

mod cev;
mod density;
mod hill;
mod ratios;
mod report;

pub use cev::{hillish, hillish_series, pickandsish, pickandsish_series};
pub use density::{angular_density, kde, DensityEstimate};
pub use hill::{hill_at, hill_series};
pub use ratios::{qhat_series, qq_exponential, thresholded_ratios, ThresholdedRatios};
pub use report::{
    detect_report, labels, DetectConfig, DetectionReport, KGrid, RankMode, ReportMeta,
};

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HrvError, Result};

/// `(k, value)` pairs traced over the number of order statistics used.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticSeries {
    pub label: String,
    pub points: Vec<(usize, f64)>,
}

impl DiagnosticSeries {
    pub fn new(label: impl Into<String>, points: Vec<(usize, f64)>) -> Result<Self> {
        let s = DiagnosticSeries {
            label: label.into(),
            points,
        };
        s.check()?;
        Ok(s)
    }

    /// Checks `k` is strictly increasing and at least 2.
    pub fn check(&self) -> Result<()> {
        if let Some(&(k, _)) = self.points.first() {
            if k < 2 {
                return Err(HrvError::Usage(format!(
                    "series {}: k must be >= 2",
                    self.label
                )));
            }
        }
        if self.points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(HrvError::Usage(format!(
                "series {}: k must be strictly increasing",
                self.label
            )));
        }
        Ok(())
    }

    pub fn value_at(&self, k: usize) -> Option<f64> {
        self.points
            .binary_search_by_key(&k, |p| p.0)
            .ok()
            .map(|i| self.points[i].1)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

// On the wire a series is `[[k, value], ...]`; non-finite values become `null`.
impl Serialize for DiagnosticSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.points.len()))?;
        for &(k, v) in &self.points {
            let v = if v.is_finite() { Some(v) } else { None };
            seq.serialize_element(&(k, v))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for DiagnosticSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(usize, Option<f64>)> = Vec::deserialize(deserializer)?;
        Ok(DiagnosticSeries {
            label: String::new(),
            points: raw
                .into_iter()
                .map(|(k, v)| (k, v.unwrap_or(f64::NAN)))
                .collect(),
        })
    }
}

/// Sorted, deduplicated copy of a k-grid.
pub(crate) fn normalize_grid(k_grid: &[usize]) -> Vec<usize> {
    let mut g = k_grid.to_vec();
    g.sort_unstable();
    g.dedup();
    g
}
