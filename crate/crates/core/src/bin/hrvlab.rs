use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hrvlab::diagnostics::{DetectConfig, RankMode};
use hrvlab::pipeline::{self, Command, Experiment, RunConfig};
use hrvlab::{GeneratorSpec, HrvError};

/// Generate and diagnose bivariate heavy-tailed samples.
#[derive(Parser, Debug)]
#[command(name = "hrvlab", version)]
struct Cli {
    /// RunConfig JSON; flags given on the command line override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a `z1,z2` CSV sample and a `.meta.json` sidecar.
    Generate(GenerateArgs),
    /// Run every diagnostic on a CSV sample; writes report.json and CSVs to a directory.
    Detect(DetectArgs),
    /// Replicate a canned example and summarize the estimates.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    experiment: Option<String>,
    /// Generator spec JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    partitions: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pickandsish levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// Ratio thresholds (number of largest minima), comma separated.
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<usize>>,
    /// literal, pareto-standardized or raw.
    #[arg(long)]
    rank_mode: Option<String>,
    #[arg(long)]
    k_step: Option<usize>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    angular_k: Option<usize>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(cli: Cli) -> Result<RunConfig, HrvError> {
    let base = cli.config.as_deref().map(RunConfig::load).transpose()?;
    let wanted = match &cli.command {
        Some(Cmd::Generate(_)) => Some(Command::Generate),
        Some(Cmd::Detect(_)) => Some(Command::Detect),
        Some(Cmd::Experiment(_)) => Some(Command::Experiment),
        None => None,
    };
    let mut cfg = match (base, wanted) {
        (Some(c), Some(w)) if c.command != w => {
            return Err(HrvError::Usage(format!(
                "config file is for {:?} but the {:?} subcommand was given",
                c.command, w
            )))
        }
        (Some(c), _) => c,
        (None, Some(w)) => RunConfig::new(w),
        (None, None) => {
            return Err(HrvError::Usage(
                "give a subcommand (generate, detect, experiment) or --config".into(),
            ))
        }
    };

    match cli.command {
        Some(Cmd::Generate(a)) => {
            if let Some(name) = a.experiment {
                cfg.experiment = Some(name.parse::<Experiment>()?);
            }
            if let Some(path) = a.spec {
                let text = std::fs::read_to_string(&path)?;
                let spec: GeneratorSpec = serde_json::from_str(&text)
                    .map_err(|e| HrvError::Config(format!("{}: {e}", path.display())))?;
                cfg.generator = Some(spec);
            }
            set(&mut cfg.n, a.n);
            set(&mut cfg.partitions, a.partitions);
            set(&mut cfg.output, a.out);
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
        }
        Some(Cmd::Detect(a)) => {
            set(&mut cfg.input, a.input);
            set(&mut cfg.output, a.out);
            let mut d = cfg.detect.take().unwrap_or_else(DetectConfig::default);
            if let Some(q) = a.q {
                d.q_list = q;
            }
            if let Some(t) = a.thresholds {
                d.thresholds = t;
            }
            if let Some(m) = a.rank_mode {
                d.rank_mode = m.parse::<RankMode>()?;
            }
            set(&mut d.k_grid.k_step, a.k_step);
            set(&mut d.k_grid.k_max, a.k_max);
            if let Some(k) = a.k_min {
                d.k_grid.k_min = k;
            }
            set(&mut d.angular_k, a.angular_k);
            cfg.detect = Some(d);
        }
        Some(Cmd::Experiment(a)) => {
            if let Some(name) = a.experiment {
                cfg.experiment = Some(name.parse::<Experiment>()?);
            }
            set(&mut cfg.replications, a.replications);
            set(&mut cfg.n, a.n);
            set(&mut cfg.output, a.out);
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
        }
        None => {}
    }
    Ok(cfg)
}

fn set<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build_config(cli).and_then(|cfg| pipeline::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hrvlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
