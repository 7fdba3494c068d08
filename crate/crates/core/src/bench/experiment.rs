//! Batch experiments described by a TOML file.
//!
//! ```toml
//! name = "baseline"
//! seed = 7
//! count = 1000
//!
//! [[run]]
//! label = "n50"
//! n = 50
//! methods = ["all", "flash", "itlinq", "itlinq+", "greedy", "fplinq"]
//!
//! [run.params]
//! area_side = 500.0
//! ```
//!
//! Each run writes `<label>/{summary,per_layout,cdf}.csv` and `meta.json`;
//! the bundle root gets a combined `summary.csv`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{evaluate, write_report, EvalOptions, EvalReport, Method};
use crate::error::{LinqError, Result};
use crate::gnn::Agent;
use crate::heuristics::{HeuristicParams, EXHAUSTIVE_CAP};
use crate::network::{generate_layouts, ChannelMode, LayoutRecord, SystemParams};
use crate::optimizers::FpConfig;
use crate::rlcore::MdpConfig;

fn default_seed() -> u64 {
    7
}

fn default_count() -> usize {
    1000
}

fn default_k() -> usize {
    10
}

fn default_wmmse_iters() -> usize {
    100
}

fn default_cap() -> usize {
    EXHAUSTIVE_CAP
}

fn default_baseline() -> Method {
    Method::FpLinq
}

fn default_channel() -> ChannelMode {
    ChannelMode::PathLossOnly
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub label: String,
    pub n: usize,
    #[serde(default)]
    pub methods: Vec<Method>,
    /// Overrides the experiment-wide layout count and seed.
    pub count: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: SystemParams,
    #[serde(default = "default_channel")]
    pub channel: ChannelMode,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub heuristics: HeuristicParams,
    #[serde(default)]
    pub fp: FpConfig,
    #[serde(default = "default_wmmse_iters")]
    pub wmmse_iters: usize,
    #[serde(default = "default_cap")]
    pub exhaustive_cap: usize,
    /// Checkpoints, relative to the spec file.
    pub ls_model: Option<PathBuf>,
    pub pc_model: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_baseline")]
    pub baseline: Method,
    #[serde(default, rename = "run")]
    pub runs: Vec<RunSpec>,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LinqError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| LinqError::io(path, e))?;
        Self::from_toml(&text)
    }
}

#[derive(Serialize)]
struct BundleRow<'a> {
    run: &'a str,
    n: usize,
    method: &'a str,
    layouts: usize,
    mean_ratio: f64,
    mean_sum_rate: f64,
    mbps: f64,
}

/// Runs every entry of `spec`, writing the bundle under `out`. Relative
/// checkpoint paths resolve against `base`. Runs without methods are
/// skipped, so an empty spec yields a header-only summary.
pub fn run_experiment(
    spec: &ExperimentSpec,
    base: &Path,
    out: &Path,
) -> Result<Vec<(String, Vec<EvalReport>)>> {
    std::fs::create_dir_all(out).map_err(|e| LinqError::io(out, e))?;
    let mut results = Vec::new();
    let summary = out.join("summary.csv");
    let file = std::fs::File::create(&summary).map_err(|e| LinqError::io(&summary, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(std::io::BufWriter::new(file));
    w.write_record([
        "run",
        "n",
        "method",
        "layouts",
        "mean_ratio",
        "mean_sum_rate",
        "mbps",
    ])?;
    for run in &spec.runs {
        if run.methods.is_empty() {
            continue;
        }
        let load = |p: &Option<PathBuf>| -> Result<Option<Agent>> {
            p.as_ref().map(|p| Agent::load(base.join(p))).transpose()
        };
        let opts = EvalOptions {
            heuristics: run.heuristics.clone(),
            fp: run.fp.clone(),
            wmmse_iters: run.wmmse_iters,
            exhaustive_cap: run.exhaustive_cap,
            channel: run.channel,
            fading_seed: crate::derive_seed(run.seed.unwrap_or(spec.seed), u64::MAX),
            k: run.k,
            mdp: MdpConfig::default(),
            ls_agent: load(&run.ls_model)?,
            pc_agent: load(&run.pc_model)?,
            baseline: spec.baseline,
        };
        opts.check(&run.methods)?;
        let records: Vec<LayoutRecord> = generate_layouts(
            &run.params,
            run.n,
            run.count.unwrap_or(spec.count),
            run.seed.unwrap_or(spec.seed),
        )?
        .into_iter()
        .map(LayoutRecord::path_loss)
        .collect();
        let reports = evaluate(&run.methods, &records, &run.params, &opts)?;
        write_report(
            &out.join(&run.label),
            &reports,
            &records,
            &run.params,
            spec.baseline,
        )?;
        for r in &reports {
            w.serialize(BundleRow {
                run: &run.label,
                n: run.n,
                method: r.method.name(),
                layouts: r.ratios.len(),
                mean_ratio: r.mean_ratio,
                mean_sum_rate: r.mean_sum_rate,
                mbps: r.mbps(run.params.bandwidth),
            })?;
        }
        results.push((run.label.clone(), reports));
    }
    w.flush().map_err(|e| LinqError::io(&summary, e))?;
    let meta = serde_json::json!({ "name": spec.name, "spec": spec });
    let path = out.join("meta.json");
    std::fs::write(&path, serde_json::to_string_pretty(&meta)?)
        .map_err(|e| LinqError::io(&path, e))?;
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_gives_empty_report() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ExperimentSpec::from_toml("name = \"nothing\"\n[[run]]\nlabel = \"a\"\nn = 5\n")
            .unwrap();
        let r = run_experiment(&spec, dir.path(), dir.path()).unwrap();
        assert!(r.is_empty());
        let s = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(s, "run,n,method,layouts,mean_ratio,mean_sum_rate,mbps\n");
    }

    #[test]
    fn unknown_keys_and_methods_rejected() {
        assert!(ExperimentSpec::from_toml("bogus = 1").is_err());
        assert!(
            ExperimentSpec::from_toml("[[run]]\nlabel = \"a\"\nn = 5\nmethods = [\"nope\"]")
                .is_err()
        );
    }

    #[test]
    fn rerun_is_byte_identical() {
        let text = r#"
seed = 3
count = 4
[[run]]
label = "small"
n = 8
methods = ["greedy", "wmmse"]
[run.params]
area_side = 200.0
"#;
        let spec = ExperimentSpec::from_toml(text).unwrap();
        assert_eq!(spec.runs[0].params.area_side, 200.0);
        assert_eq!(spec.runs[0].params.d2d_max, 65.0);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_experiment(&spec, a.path(), a.path()).unwrap();
        run_experiment(&spec, b.path(), b.path()).unwrap();
        for f in [
            "summary.csv",
            "small/summary.csv",
            "small/per_layout.csv",
            "small/cdf.csv",
        ] {
            assert_eq!(
                std::fs::read(a.path().join(f)).unwrap(),
                std::fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
    }
}
