//! Canned parameterizations of the additive-model examples and the
//! replication harness that summarizes their diagnostics.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{detect_report, labels, DetectConfig, DetectionReport, KGrid, RankMode};
use crate::error::{HrvError, Result, ResultExt};
use crate::generators::{
    generate, Additive, AdditiveV, AdditiveY, AxesY, GeneratorSpec, HiddenAngularSpec, HiddenE0,
    Regime,
};
use crate::sampling::{Probability, RngStream, ScalarLaw, TailIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "ex31-case1")]
    Ex31Case1,
    #[serde(rename = "ex31-case2")]
    Ex31Case2,
    #[serde(rename = "ex31-case3")]
    Ex31Case3,
    #[serde(rename = "ex32-case1")]
    Ex32Case1,
    #[serde(rename = "ex32-case2")]
    Ex32Case2,
    #[serde(rename = "ex32-case3")]
    Ex32Case3,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Ex31Case1,
        Experiment::Ex31Case2,
        Experiment::Ex31Case3,
        Experiment::Ex32Case1,
        Experiment::Ex32Case2,
        Experiment::Ex32Case3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Ex31Case1 => "ex31-case1",
            Experiment::Ex31Case2 => "ex31-case2",
            Experiment::Ex31Case3 => "ex31-case3",
            Experiment::Ex32Case1 => "ex32-case1",
            Experiment::Ex32Case2 => "ex32-case2",
            Experiment::Ex32Case3 => "ex32-case3",
        }
    }

    /// Axis-supported `Y` (Pareto(alpha), fair axis choice) plus a hidden `V`.
    pub fn spec(self) -> GeneratorSpec {
        let ti = |x: f64| TailIndex::new(x).expect("registry constant");
        let half = Probability::new(0.5).expect("registry constant");
        let y = |alpha: f64| {
            AdditiveY::Axes(AxesY {
                alpha: ti(alpha),
                axis_prob: half,
            })
        };
        let ex31 = |alpha: f64| Additive {
            y: y(alpha),
            v: AdditiveV::HiddenE0(HiddenE0 {
                alpha0: ti(2.0),
                angular: HiddenAngularSpec {
                    p: half,
                    g1: ScalarLaw::ShiftedUnitExponential,
                    g2: ScalarLaw::ShiftedUnitExponential,
                },
            }),
            regime: None,
        };
        let radial = |alpha0: f64, regime| Additive {
            y: y(0.5),
            v: AdditiveV::RadialRatio {
                alpha0: ti(alpha0),
                alpha_star: ti(1.0),
                p: half,
            },
            regime: Some(regime),
        };
        let add = match self {
            Experiment::Ex31Case1 => ex31(1.0),
            Experiment::Ex31Case2 => ex31(1.5),
            Experiment::Ex31Case3 => ex31(0.5),
            Experiment::Ex32Case1 => Additive {
                y: y(0.5),
                v: AdditiveV::IidParetoPair {
                    alpha_star: ti(1.0),
                },
                regime: Some(Regime::Case1),
            },
            Experiment::Ex32Case2 => radial(1.25, Regime::Case2),
            Experiment::Ex32Case3 => radial(1.5, Regime::Case3),
        };
        GeneratorSpec::Additive(add)
    }

    /// Ratio threshold of the example's figures: 100 for Ex. 3.1 QQ plots, 200 for Ex. 3.2 Hill plots.
    pub fn ratio_threshold(self) -> usize {
        match self {
            Experiment::Ex31Case1 | Experiment::Ex31Case2 | Experiment::Ex31Case3 => 100,
            _ => 200,
        }
    }

    /// Detection settings for the simulated examples: raw coordinates, one ratio threshold.
    pub fn detect_config(self) -> DetectConfig {
        let r = ReferencePoints::for_experiment(self);
        DetectConfig {
            k_grid: KGrid {
                extra: vec![r.marginal_k, r.min_k, r.cev_k, r.qhat_k],
                ..KGrid::default()
            },
            thresholds: vec![self.ratio_threshold()],
            rank_mode: RankMode::Raw,
            ..DetectConfig::default()
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HrvError;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                HrvError::Usage(format!(
                    "unknown experiment {s:?}; valid names: {}",
                    names.join(", ")
                ))
            })
    }
}

/// Where point estimates are read off the diagnostic series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoints {
    pub marginal_k: usize,
    pub min_k: usize,
    pub ratio_threshold: usize,
    pub ratio_k: usize,
    pub cev_k: usize,
    pub q: f64,
    pub qhat_k: usize,
}

impl ReferencePoints {
    pub fn for_experiment(e: Experiment) -> Self {
        let t = e.ratio_threshold();
        ReferencePoints {
            marginal_k: 500,
            min_k: 500,
            ratio_threshold: t,
            ratio_k: t / 2,
            cev_k: 1000,
            q: 0.8,
            qhat_k: 100,
        }
    }
}

/// Point estimates from one replication; `None` when the reference `k` is off-grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimates {
    pub marginal_alpha_1: Option<f64>,
    pub marginal_alpha_2: Option<f64>,
    pub min_alpha: Option<f64>,
    pub ratio_tail_alpha: Option<f64>,
    pub hillish_first_pos: Option<f64>,
    pub hillish_first_neg: Option<f64>,
    pub hillish_second_pos: Option<f64>,
    pub hillish_second_neg: Option<f64>,
    pub pickandsish_first: Option<f64>,
    pub pickandsish_second: Option<f64>,
    pub qhat: Option<f64>,
}

impl Estimates {
    pub fn from_report(report: &DetectionReport, r: &ReferencePoints) -> Self {
        Estimates {
            marginal_alpha_1: report.value(labels::MARGINAL_HILL_1, r.marginal_k),
            marginal_alpha_2: report.value(labels::MARGINAL_HILL_2, r.marginal_k),
            min_alpha: report.value(labels::MIN_HILL, r.min_k),
            ratio_tail_alpha: report.value(
                &labels::ratio_tail_hill("max", r.ratio_threshold),
                r.ratio_k,
            ),
            hillish_first_pos: report.value(labels::HILLISH_FIRST_POS, r.cev_k),
            hillish_first_neg: report.value(labels::HILLISH_FIRST_NEG, r.cev_k),
            hillish_second_pos: report.value(labels::HILLISH_SECOND_POS, r.cev_k),
            hillish_second_neg: report.value(labels::HILLISH_SECOND_NEG, r.cev_k),
            pickandsish_first: report.value(&labels::pickandsish("first", r.q), r.cev_k),
            pickandsish_second: report.value(&labels::pickandsish("second", r.q), r.cev_k),
            qhat: report.value(labels::QHAT, r.qhat_k),
        }
    }

    fn fields(&self) -> [Option<f64>; 11] {
        [
            self.marginal_alpha_1,
            self.marginal_alpha_2,
            self.min_alpha,
            self.ratio_tail_alpha,
            self.hillish_first_pos,
            self.hillish_first_neg,
            self.hillish_second_pos,
            self.hillish_second_neg,
            self.pickandsish_first,
            self.pickandsish_second,
            self.qhat,
        ]
    }

    fn from_fields(f: [Option<f64>; 11]) -> Self {
        Estimates {
            marginal_alpha_1: f[0],
            marginal_alpha_2: f[1],
            min_alpha: f[2],
            ratio_tail_alpha: f[3],
            hillish_first_pos: f[4],
            hillish_first_neg: f[5],
            hillish_second_pos: f[6],
            hillish_second_neg: f[7],
            pickandsish_first: f[8],
            pickandsish_second: f[9],
            qhat: f[10],
        }
    }

    /// Field-wise median over the replications that produced a value.
    pub fn median_of(reps: &[Estimates]) -> Estimates {
        let mut out = [None; 11];
        for (i, slot) in out.iter_mut().enumerate() {
            let vals: Vec<f64> = reps.iter().filter_map(|e| e.fields()[i]).collect();
            *slot = median(&vals);
        }
        Estimates::from_fields(out)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub seed: u64,
    pub estimates: Estimates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: Experiment,
    pub spec: GeneratorSpec,
    pub spec_fingerprint: String,
    pub n: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
    pub rng: String,
    pub tool_version: String,
    pub detect: DetectConfig,
    pub reference: ReferencePoints,
    pub per_replication: Vec<Replication>,
    pub medians: Estimates,
}

pub const DEFAULT_N: usize = 10_000;

/// Generates `replications` batches with seeds `base_seed + i`, detects, and summarizes.
pub fn run_experiment(
    experiment: Experiment,
    replications: usize,
    base_seed: u64,
    n: usize,
) -> Result<ExperimentSummary> {
    if replications == 0 {
        return Err(HrvError::Usage("replications must be at least 1".into()));
    }
    let spec = experiment.spec();
    let config = experiment.detect_config();
    let reference = ReferencePoints::for_experiment(experiment);
    let seeds: Vec<u64> = (0..replications as u64)
        .map(|i| base_seed.wrapping_add(i))
        .collect();
    let per_replication = seeds
        .par_iter()
        .map(|&seed| {
            let batch = generate(&spec, n, seed, 1)?;
            let report =
                detect_report(&batch, &config).context(format!("replication seed {seed}"))?;
            Ok(Replication {
                seed,
                estimates: Estimates::from_report(&report, &reference),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<Estimates> = per_replication
        .iter()
        .map(|r| r.estimates.clone())
        .collect();
    Ok(ExperimentSummary {
        experiment,
        spec_fingerprint: spec.fingerprint(),
        spec,
        n,
        replications,
        base_seed,
        seeds,
        rng: RngStream::ALGORITHM.to_string(),
        tool_version: crate::TOOL_VERSION.to_string(),
        detect: config,
        reference,
        medians: Estimates::median_of(&all),
        per_replication,
    })
}
