//! The published JSON schemas accept what the tool writes and reject what it refuses.

use std::path::PathBuf;

use hrvlab::diagnostics::{detect_report, DetectConfig, KGrid};
use hrvlab::generators::generate;
use hrvlab::pipeline::{Command, Experiment, RunConfig};
use jsonschema::{Retrieve, Uri, Validator};
use serde_json::{json, Value};

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_dir().join(format!("{name}.schema.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

// Resolves `urn:hrvlab:<name>` to schemas/<name>.schema.json.
struct Local;

impl Retrieve for Local {
    fn retrieve(
        &self,
        uri: &Uri<String>,
    ) -> Result<Value, Box<dyn std::error::Error + Send + Sync>> {
        let name = uri
            .as_str()
            .strip_prefix("urn:hrvlab:")
            .ok_or_else(|| format!("unexpected reference {}", uri.as_str()))?;
        Ok(load(name))
    }
}

fn validator(name: &str) -> Validator {
    jsonschema::options()
        .with_retriever(Local)
        .build(&load(name))
        .unwrap()
}

fn assert_valid(v: &Validator, doc: &Value) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn report_matches_schema() {
    let v = validator("report");
    for e in [Experiment::Ex31Case1, Experiment::Ex32Case1] {
        let batch = generate(&e.spec(), 3000, 2, 1).unwrap();
        let config = DetectConfig {
            k_grid: KGrid {
                k_max: Some(250),
                ..KGrid::default()
            },
            q_list: vec![0.7, 0.8],
            ..DetectConfig::default()
        };
        let report = detect_report(&batch, &config).unwrap();
        let doc = serde_json::to_value(&report).unwrap();
        for key in ["meta", "series", "qq", "densities"] {
            assert!(doc.get(key).is_some(), "missing {key}");
        }
        assert_valid(&v, &doc);
    }
    let mut broken = json!({"meta": {}, "series": {}, "qq": {}, "densities": {}});
    assert!(!v.is_valid(&broken));
    broken["extra"] = json!(1);
    assert!(!v.is_valid(&broken));
}

#[test]
fn experiment_specs_match_schema() {
    let v = validator("generator_spec");
    for e in Experiment::ALL {
        assert_valid(&v, &serde_json::to_value(e.spec()).unwrap());
    }
    assert!(!v.is_valid(&json!({"model": "axes_y", "alpha": -1.0, "axis_prob": 0.5})));
    assert!(!v.is_valid(&json!({"model": "spiral"})));
}

#[test]
fn run_configs_match_schema() {
    let v = validator("run_config");
    let mut generate = RunConfig::new(Command::Generate);
    generate.experiment = Some(Experiment::Ex32Case2);
    generate.n = Some(100);
    generate.output = Some("s.csv".into());
    let mut with_spec = generate.clone();
    with_spec.experiment = None;
    with_spec.generator = Some(Experiment::Ex31Case2.spec());
    let mut detect = RunConfig::new(Command::Detect);
    detect.input = Some("s.csv".into());
    detect.output = Some("out".into());
    detect.detect = Some(DetectConfig::default());
    let mut experiment = RunConfig::new(Command::Experiment);
    experiment.experiment = Some(Experiment::Ex31Case3);
    experiment.replications = Some(3);
    experiment.output = Some("x.json".into());
    for c in [&generate, &with_spec, &detect, &experiment] {
        c.validate().unwrap();
        assert_valid(&v, &serde_json::to_value(c).unwrap());
    }

    // what validate() rejects, the schema rejects too
    let mut stray = detect.clone();
    stray.n = Some(10);
    assert!(stray.validate().is_err());
    assert!(!v.is_valid(&serde_json::to_value(&stray).unwrap()));
    let mut both = generate.clone();
    both.generator = Some(Experiment::Ex31Case1.spec());
    assert!(both.validate().is_err());
    assert!(!v.is_valid(&serde_json::to_value(&both).unwrap()));
}
