//! Evaluation harness: runs methods over layout sets, aggregates sum-rate
//! ratios against a baseline and writes plot-ready reports.

pub mod cli;
mod experiment;
mod timing;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LinqError, Result};
use crate::features::InputMode;
use crate::gnn::Agent;
use crate::heuristics::{
    all_scheduled, exhaustive_optimum, greedy_schedule, sequential_select, Criterion,
    HeuristicParams, EXHAUSTIVE_CAP,
};
use crate::network::{build_channel, ChannelMatrix, ChannelMode, LayoutRecord, SystemParams};
use crate::optimizers::{fplinq, wmmse, FpConfig, FpMode};
use crate::rates::{to_mbps, Activation, RateModel};
use crate::rlcore::{infer_joint, infer_power, infer_schedule, Instance, MdpConfig};

pub use experiment::{run_experiment, ExperimentSpec, RunSpec};
pub use timing::{timing_probe, TimingPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    AllScheduled,
    Flash,
    ItLinq,
    ItLinqPlus,
    Greedy,
    FpLinq,
    FpLinqPc,
    Wmmse,
    GrLinq,
    GrLinqPc,
    Joint,
    Exhaustive,
}

impl Method {
    pub const ALL: [Method; 12] = [
        Self::AllScheduled,
        Self::Flash,
        Self::ItLinq,
        Self::ItLinqPlus,
        Self::Greedy,
        Self::FpLinq,
        Self::FpLinqPc,
        Self::Wmmse,
        Self::GrLinq,
        Self::GrLinqPc,
        Self::Joint,
        Self::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::AllScheduled => "all",
            Self::Flash => "flash",
            Self::ItLinq => "itlinq",
            Self::ItLinqPlus => "itlinq+",
            Self::Greedy => "greedy",
            Self::FpLinq => "fplinq",
            Self::FpLinqPc => "fplinq-pc",
            Self::Wmmse => "wmmse",
            Self::GrLinq => "grlinq",
            Self::GrLinqPc => "grlinq-pc",
            Self::Joint => "joint",
            Self::Exhaustive => "exhaustive",
        }
    }

    /// Produces continuous power levels rather than a schedule.
    pub fn is_power_control(self) -> bool {
        matches!(
            self,
            Self::FpLinqPc | Self::Wmmse | Self::GrLinqPc | Self::Joint
        )
    }

    pub fn needs_ls_agent(self) -> bool {
        matches!(self, Self::GrLinq | Self::Joint)
    }

    pub fn needs_pc_agent(self) -> bool {
        matches!(self, Self::GrLinqPc | Self::Joint)
    }

    /// Parses a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = LinqError;
    fn from_str(s: &str) -> Result<Self> {
        if s == "all-scheduled" {
            return Ok(Self::AllScheduled);
        }
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| LinqError::Unknown {
                kind: "method",
                value: s.to_string(),
            })
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything a method may need besides the layout.
#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub heuristics: HeuristicParams,
    pub fp: FpConfig,
    pub wmmse_iters: usize,
    pub exhaustive_cap: usize,
    /// Channel used for layouts that carry no stored gains.
    pub channel: ChannelMode,
    /// Base seed of the per-layout fading draws in realistic mode.
    pub fading_seed: u64,
    /// Interference-graph degree for the learned agents.
    pub k: usize,
    pub mdp: MdpConfig,
    pub ls_agent: Option<Agent>,
    pub pc_agent: Option<Agent>,
    pub baseline: Method,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            heuristics: HeuristicParams::default(),
            fp: FpConfig::default(),
            wmmse_iters: 100,
            exhaustive_cap: EXHAUSTIVE_CAP,
            channel: ChannelMode::PathLossOnly,
            fading_seed: 0,
            k: 10,
            mdp: MdpConfig::default(),
            ls_agent: None,
            pc_agent: None,
            baseline: Method::FpLinq,
        }
    }
}

impl EvalOptions {
    /// Fails early when a learned method lacks its checkpoint.
    pub fn check(&self, methods: &[Method]) -> Result<()> {
        self.heuristics.validate()?;
        for &m in methods.iter().chain([&self.baseline]) {
            if m.needs_ls_agent() && self.ls_agent.is_none() {
                return Err(LinqError::Missing(format!(
                    "method {m} needs a scheduling checkpoint"
                )));
            }
            if m.needs_pc_agent() && self.pc_agent.is_none() {
                return Err(LinqError::Missing(format!(
                    "method {m} needs a power-control checkpoint"
                )));
            }
        }
        Ok(())
    }

    /// The channel a record is evaluated on.
    pub fn channel_for(
        &self,
        record: &LayoutRecord,
        index: usize,
        params: &SystemParams,
    ) -> Result<ChannelMatrix> {
        match (&record.gains, self.channel) {
            (Some(_), _) | (None, ChannelMode::PathLossOnly) => record.channel(params),
            (None, ChannelMode::Realistic) => build_channel(
                &record.layout,
                params,
                ChannelMode::Realistic,
                crate::derive_seed(self.fading_seed, index as u64),
            ),
        }
    }
}

/// One layout prepared for every method.
pub struct Prepared {
    pub channel: ChannelMatrix,
    /// Links by increasing length, the traversal order of the heuristics.
    order: Vec<usize>,
    ls: Option<Instance>,
    pc: Option<Instance>,
    tx_power: f64,
    weights: Vec<f64>,
}

impl Prepared {
    pub fn new(
        record: &LayoutRecord,
        index: usize,
        params: &SystemParams,
        opts: &EvalOptions,
        methods: &[Method],
    ) -> Result<Self> {
        let channel = opts.channel_for(record, index, params)?;
        let instance = |agent: &Option<Agent>, wanted: bool| -> Result<Option<Instance>> {
            match agent {
                Some(a) if wanted => {
                    let ch = (a.features.input_mode == InputMode::Csi).then(|| channel.clone());
                    Instance::with_channel(record.layout.clone(), params, opts.k, &a.features, ch)
                        .map(Some)
                }
                _ => Ok(None),
            }
        };
        let all = || methods.iter().chain([&opts.baseline]);
        let ls = instance(&opts.ls_agent, all().any(|m| m.needs_ls_agent()))?;
        let pc = instance(&opts.pc_agent, all().any(|m| m.needs_pc_agent()))?;
        Ok(Self {
            order: record.layout.order_by_length(),
            weights: params.weights_for(channel.n())?,
            tx_power: params.tx_power_watts(),
            channel,
            ls,
            pc,
        })
    }

    pub fn model(&self) -> Result<RateModel<'_, ChannelMatrix>> {
        RateModel::new(
            &self.channel,
            vec![self.tx_power; self.channel.n()],
            self.weights.clone(),
        )
    }

    /// Runs `method`, returning its activation vector.
    pub fn solve(&self, method: Method, opts: &EvalOptions) -> Result<Activation> {
        let m = self.model()?;
        let n = m.n();
        let order = || self.order.clone();
        let missing = || LinqError::Missing(format!("method {method} needs a checkpoint"));
        Ok(match method {
            Method::AllScheduled => all_scheduled(n),
            Method::Flash => sequential_select(&m, &opts.heuristics, Criterion::Flash, &order()),
            Method::ItLinq => sequential_select(&m, &opts.heuristics, Criterion::It, &order()),
            Method::ItLinqPlus => {
                sequential_select(&m, &opts.heuristics, Criterion::ItPlus, &order())
            }
            Method::Greedy => greedy_schedule(&m, &order()),
            Method::FpLinq => fplinq(&m, &opts.fp, FpMode::Binary)?,
            Method::FpLinqPc => fplinq(&m, &opts.fp, FpMode::Continuous)?,
            Method::Wmmse => wmmse(&m, opts.wmmse_iters)?,
            Method::Exhaustive => exhaustive_optimum(&m, opts.exhaustive_cap)?.0,
            Method::GrLinq => {
                let (a, i) = opts
                    .ls_agent
                    .as_ref()
                    .zip(self.ls.as_ref())
                    .ok_or_else(missing)?;
                infer_schedule(a, i, &opts.mdp)?.x
            }
            Method::GrLinqPc => {
                let (a, i) = opts
                    .pc_agent
                    .as_ref()
                    .zip(self.pc.as_ref())
                    .ok_or_else(missing)?;
                infer_power(a, i, None, &opts.mdp)?.x
            }
            Method::Joint => {
                let (la, li) = opts
                    .ls_agent
                    .as_ref()
                    .zip(self.ls.as_ref())
                    .ok_or_else(missing)?;
                let (pa, pi) = opts
                    .pc_agent
                    .as_ref()
                    .zip(self.pc.as_ref())
                    .ok_or_else(missing)?;
                infer_joint(la, li, pa, pi, &opts.mdp)?.x
            }
        })
    }
}

/// Per-method results over a layout set.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub method: Method,
    /// Weighted sum rate per layout, bit/s/Hz.
    pub sum_rates: Vec<f64>,
    /// Baseline weighted sum rate per layout.
    pub reference: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Mean of the per-layout ratios.
    pub mean_ratio: f64,
    pub mean_sum_rate: f64,
    pub cdf: Vec<(f64, f64)>,
    /// Wall-clock seconds per layout spent in the method.
    pub seconds: Vec<f64>,
}

impl EvalReport {
    fn build(method: Method, sum_rates: Vec<f64>, reference: Vec<f64>, seconds: Vec<f64>) -> Self {
        let ratios: Vec<f64> = sum_rates
            .iter()
            .zip(&reference)
            .map(|(s, r)| s / r)
            .collect();
        let n = ratios.len().max(1) as f64;
        Self {
            method,
            mean_ratio: ratios.iter().sum::<f64>() / n,
            mean_sum_rate: sum_rates.iter().sum::<f64>() / n,
            cdf: cdf_points(&ratios),
            ratios,
            sum_rates,
            reference,
            seconds,
        }
    }

    pub fn mean_reference(&self) -> f64 {
        self.reference.iter().sum::<f64>() / self.reference.len().max(1) as f64
    }

    /// Ratio column scaled to Mbps by the baseline's mean rate.
    pub fn mbps(&self, bandwidth: f64) -> f64 {
        self.mean_ratio * to_mbps(self.mean_reference(), bandwidth)
    }
}

/// Empirical CDF: sorted values paired with cumulative fractions i/n.
pub fn cdf_points(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.into_iter()
        .enumerate()
        .map(|(i, x)| (x, (i + 1) as f64 / n))
        .collect()
}

/// Evaluates every method on every layout against `opts.baseline`.
///
/// Layouts are processed in parallel; results are assembled in layout order,
/// so the output does not depend on the thread count.
pub fn evaluate(
    methods: &[Method],
    records: &[LayoutRecord],
    params: &SystemParams,
    opts: &EvalOptions,
) -> Result<Vec<EvalReport>> {
    opts.check(methods)?;
    if methods.is_empty() {
        return Ok(Vec::new());
    }
    let per_layout: Vec<(f64, Vec<(f64, f64)>)> = records
        .par_iter()
        .enumerate()
        .map(|(k, rec)| {
            let p = Prepared::new(rec, k, params, opts, methods)?;
            let m = p.model()?;
            let reference = m.weighted_sum_rate(&p.solve(opts.baseline, opts)?);
            if !(reference > 0.0) {
                return Err(LinqError::InvalidParam(format!(
                    "baseline {} has zero sum rate on layout {k}",
                    opts.baseline
                )));
            }
            let rows = methods
                .iter()
                .map(|&method| {
                    let t = Instant::now();
                    let x = p.solve(method, opts)?;
                    let secs = t.elapsed().as_secs_f64();
                    Ok((m.weighted_sum_rate(&x), secs))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((reference, rows))
        })
        .collect::<Result<_>>()?;
    let reference: Vec<f64> = per_layout.iter().map(|r| r.0).collect();
    Ok(methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let rates = per_layout.iter().map(|r| r.1[mi].0).collect();
            let secs = per_layout.iter().map(|r| r.1[mi].1).collect();
            EvalReport::build(method, rates, reference.clone(), secs)
        })
        .collect())
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    method: &'a str,
    layouts: usize,
    mean_ratio: f64,
    mean_sum_rate: f64,
    mbps: f64,
}

#[derive(Serialize)]
struct LayoutRow<'a> {
    layout: usize,
    seed: u64,
    method: &'a str,
    sum_rate: f64,
    reference: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct CdfRow<'a> {
    method: &'a str,
    ratio: f64,
    fraction: f64,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::io::BufWriter<std::fs::File>>> {
    let f = std::fs::File::create(path).map_err(|e| LinqError::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(std::io::BufWriter::new(f)))
}

fn finish(mut w: csv::Writer<std::io::BufWriter<std::fs::File>>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| LinqError::io(path, e))
}

/// Writes `summary.csv`, `per_layout.csv` and `cdf.csv` into `dir`, plus
/// `meta.json` with run metadata and wall-clock statistics. Only the JSON
/// carries timings, so the CSVs are byte-stable across reruns.
pub fn write_report(
    dir: &Path,
    reports: &[EvalReport],
    records: &[LayoutRecord],
    params: &SystemParams,
    baseline: Method,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| LinqError::io(dir, e))?;

    let path = dir.join("summary.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["method", "layouts", "mean_ratio", "mean_sum_rate", "mbps"])?;
    for r in reports {
        w.serialize(SummaryRow {
            method: r.method.name(),
            layouts: r.ratios.len(),
            mean_ratio: r.mean_ratio,
            mean_sum_rate: r.mean_sum_rate,
            mbps: r.mbps(params.bandwidth),
        })?;
    }
    finish(w, &path)?;

    let path = dir.join("per_layout.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["layout", "seed", "method", "sum_rate", "reference", "ratio"])?;
    for r in reports {
        for (k, rec) in records.iter().enumerate().take(r.ratios.len()) {
            w.serialize(LayoutRow {
                layout: k,
                seed: rec.layout.seed(),
                method: r.method.name(),
                sum_rate: r.sum_rates[k],
                reference: r.reference[k],
                ratio: r.ratios[k],
            })?;
        }
    }
    finish(w, &path)?;

    let path = dir.join("cdf.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["method", "ratio", "fraction"])?;
    for r in reports {
        for &(ratio, fraction) in &r.cdf {
            w.serialize(CdfRow {
                method: r.method.name(),
                ratio,
                fraction,
            })?;
        }
    }
    finish(w, &path)?;

    let timing: serde_json::Map<String, serde_json::Value> = reports
        .iter()
        .map(|r| {
            let total: f64 = r.seconds.iter().sum();
            let mean = total / r.seconds.len().max(1) as f64;
            (
                r.method.name().to_string(),
                serde_json::json!({ "total_s": total, "mean_s": mean }),
            )
        })
        .collect();
    let meta = serde_json::json!({
        "layouts": records.len(),
        "baseline": baseline.name(),
        "methods": reports.iter().map(|r| r.method.name()).collect::<Vec<_>>(),
        "threads": rayon::current_num_threads(),
        "params": params,
        "wall_clock": timing,
    });
    let path = dir.join("meta.json");
    std::fs::write(&path, serde_json::to_string_pretty(&meta)?).map_err(|e| LinqError::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::generate_layouts;

    fn records(n: usize, count: usize, seed: u64) -> Vec<LayoutRecord> {
        generate_layouts(&SystemParams::default(), n, count, seed)
            .unwrap()
            .into_iter()
            .map(LayoutRecord::path_loss)
            .collect()
    }

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!(
            Method::parse_list("all, itlinq+,fplinq").unwrap(),
            vec![Method::AllScheduled, Method::ItLinqPlus, Method::FpLinq]
        );
        assert!("fp".parse::<Method>().is_err());
    }

    #[test]
    fn baseline_self_ratio_is_one() {
        let recs = records(12, 6, 3);
        let r = evaluate(
            &[Method::FpLinq],
            &recs,
            &SystemParams::default(),
            &EvalOptions::default(),
        )
        .unwrap();
        assert!(r[0].ratios.iter().all(|&x| x == 1.0));
        assert_eq!(r[0].mean_ratio, 1.0);
    }

    #[test]
    fn exhaustive_dominates() {
        let recs = records(8, 5, 9);
        let methods = [
            Method::AllScheduled,
            Method::Flash,
            Method::Greedy,
            Method::FpLinq,
            Method::Exhaustive,
        ];
        let r = evaluate(
            &methods,
            &recs,
            &SystemParams::default(),
            &EvalOptions::default(),
        )
        .unwrap();
        let ex = &r[4];
        for rep in &r[..4] {
            for (a, b) in rep.sum_rates.iter().zip(&ex.sum_rates) {
                assert!(a <= &(b * (1.0 + 1e-12)));
            }
        }
    }

    #[test]
    fn learned_methods_need_checkpoints() {
        let recs = records(5, 1, 1);
        let e = evaluate(
            &[Method::GrLinq],
            &recs,
            &SystemParams::default(),
            &EvalOptions::default(),
        );
        assert!(matches!(e, Err(LinqError::Missing(_))));
    }

    #[test]
    fn cdf_basics() {
        assert_eq!(cdf_points(&[0.7]), vec![(0.7, 1.0)]);
        let v = [0.9, 0.3, 1.2, 0.5, 0.8];
        let c = cdf_points(&v);
        assert!(c.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 < w[1].1));
        assert_eq!(c.last().unwrap().1, 1.0);
        // median of an odd sample is the point whose fraction first reaches 1/2
        let med = c.iter().find(|p| p.1 >= 0.5).unwrap().0;
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        assert_eq!(med, s[2]);
    }

    #[test]
    fn mbps_is_ratio_times_baseline_rate() {
        let recs = records(10, 4, 5);
        let p = SystemParams::default();
        let r = evaluate(&[Method::Greedy], &recs, &p, &EvalOptions::default()).unwrap();
        let base = r[0].reference.iter().sum::<f64>() / 4.0 * p.bandwidth / 1e6;
        assert!((r[0].mbps(p.bandwidth) - r[0].mean_ratio * base).abs() < 1e-9);
    }

    #[test]
    fn report_files_are_stable() {
        let recs = records(10, 3, 2);
        let p = SystemParams::default();
        let methods = [Method::ItLinq, Method::Wmmse];
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for d in [&a, &b] {
            let r = evaluate(&methods, &recs, &p, &EvalOptions::default()).unwrap();
            write_report(d.path(), &r, &recs, &p, Method::FpLinq).unwrap();
        }
        for f in ["summary.csv", "per_layout.csv", "cdf.csv"] {
            let x = std::fs::read(a.path().join(f)).unwrap();
            assert_eq!(x, std::fs::read(b.path().join(f)).unwrap());
        }
        let per = std::fs::read_to_string(a.path().join("per_layout.csv")).unwrap();
        assert_eq!(per.lines().count(), 1 + 6);
    }
}
