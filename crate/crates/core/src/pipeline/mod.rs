//! Run configuration and the three commands: generate, detect, experiment.

pub mod experiments;
pub mod io;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{detect_report, DetectConfig, DetectionReport};
use crate::error::{HrvError, Result};
use crate::generators::{generate, BatchMeta, GeneratorSpec, SampleBatch};
use crate::sampling::RngStream;

pub use experiments::{run_experiment, Experiment, ExperimentSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Generate,
    Detect,
    Experiment,
}

/// Everything one CLI invocation needs; loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detect: Option<DetectConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            generator: None,
            experiment: None,
            n: None,
            seed: 0,
            partitions: None,
            input: None,
            output: None,
            detect: None,
            replications: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| HrvError::Config(format!("{}: {e}", path.display())))
    }

    /// Checks that exactly the fields the command needs are present.
    pub fn validate(&self) -> Result<()> {
        let mut stray = Vec::new();
        let mut missing = Vec::new();
        let has = |b: bool, name: &'static str, list: &mut Vec<&'static str>| {
            if b {
                list.push(name)
            }
        };
        has(self.output.is_none(), "output", &mut missing);
        match self.command {
            Command::Generate => {
                if self.generator.is_some() == self.experiment.is_some() {
                    return Err(HrvError::Usage(
                        "generate needs exactly one of a generator spec or an experiment name"
                            .into(),
                    ));
                }
                has(self.n.is_none(), "n", &mut missing);
                has(self.input.is_some(), "input", &mut stray);
                has(self.detect.is_some(), "detect", &mut stray);
                has(self.replications.is_some(), "replications", &mut stray);
            }
            Command::Detect => {
                has(self.input.is_none(), "input", &mut missing);
                has(self.generator.is_some(), "generator", &mut stray);
                has(self.experiment.is_some(), "experiment", &mut stray);
                has(self.n.is_some(), "n", &mut stray);
                has(self.partitions.is_some(), "partitions", &mut stray);
                has(self.replications.is_some(), "replications", &mut stray);
            }
            Command::Experiment => {
                has(self.experiment.is_none(), "experiment", &mut missing);
                has(self.generator.is_some(), "generator", &mut stray);
                has(self.input.is_some(), "input", &mut stray);
                has(self.detect.is_some(), "detect", &mut stray);
                has(self.partitions.is_some(), "partitions", &mut stray);
            }
        }
        if !missing.is_empty() {
            return Err(HrvError::Usage(format!(
                "{:?} is missing: {}",
                self.command,
                missing.join(", ")
            )));
        }
        if !stray.is_empty() {
            return Err(HrvError::Usage(format!(
                "{:?} does not take: {}",
                self.command,
                stray.join(", ")
            )));
        }
        Ok(())
    }
}

/// Sidecar metadata written next to a generated CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateMeta {
    pub tool_version: String,
    pub rng: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    pub spec: GeneratorSpec,
    pub batch: BatchMeta,
}

/// Path of the metadata sidecar for a CSV output.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn run_generate(config: &RunConfig) -> Result<SampleBatch> {
    config.validate()?;
    let spec = match (&config.generator, config.experiment) {
        (Some(spec), _) => *spec,
        (None, Some(e)) => e.spec(),
        (None, None) => unreachable!("validated"),
    };
    let n = config.n.expect("validated");
    let out = config.output.as_deref().expect("validated");
    let batch = generate(&spec, n, config.seed, config.partitions.unwrap_or(1))?;
    io::write_batch_csv_file(&batch, out)?;
    let meta = GenerateMeta {
        tool_version: crate::TOOL_VERSION.to_string(),
        rng: RngStream::ALGORITHM.to_string(),
        experiment: config.experiment,
        spec,
        batch: batch.meta.clone(),
    };
    io::write_json(&meta, &sidecar_path(out))?;
    Ok(batch)
}

pub fn run_detect(config: &RunConfig) -> Result<DetectionReport> {
    config.validate()?;
    let input = config.input.as_deref().expect("validated");
    let out = config.output.as_deref().expect("validated");
    let mut batch = io::read_batch_csv_file(input)?;
    if let Ok(text) = std::fs::read_to_string(sidecar_path(input)) {
        if let Ok(meta) = serde_json::from_str::<GenerateMeta>(&text) {
            batch.meta = meta.batch;
        }
    }
    let detect = config.detect.clone().unwrap_or_default();
    let report = detect_report(&batch, &detect)?;
    io::write_report_dir(&report, out)?;
    Ok(report)
}

pub fn run_experiment_command(config: &RunConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let experiment = config.experiment.expect("validated");
    let summary = run_experiment(
        experiment,
        config.replications.unwrap_or(20),
        config.seed,
        config.n.unwrap_or(experiments::DEFAULT_N),
    )?;
    io::write_json(&summary, config.output.as_deref().expect("validated"))?;
    Ok(summary)
}

/// Dispatches on `config.command`.
pub fn run(config: &RunConfig) -> Result<()> {
    match config.command {
        Command::Generate => run_generate(config).map(|_| ()),
        Command::Detect => run_detect(config).map(|_| ()),
        Command::Experiment => run_experiment_command(config).map(|_| ()),
    }
}
