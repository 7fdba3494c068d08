//! The `linq` command line.
//!
//! Every flag can also come from a TOML file given with `--config`. Top-level
//! keys apply to any subcommand that has a flag of that name; a table named
//! after a subcommand applies to that subcommand only. Flags on the command
//! line win over the file. `LINQ_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::{evaluate, timing_probe, write_report, EvalOptions, Method, Prepared};
use crate::error::{LinqError, Result};
use crate::features::{FeatureConfig, FeatureDesign, InputMode, Task};
use crate::gnn::{Agent, EdgeUpdate, GnnConfig};
use crate::heuristics::HeuristicParams;
use crate::network::{
    build_channel, generate_layouts, read_layouts, write_layouts, ChannelMode, LayoutRecord,
    SystemParams,
};
use crate::optimizers::FpConfig;
use crate::rates::to_mbps;
use crate::rlcore::{train_with, write_train_log, Instance, TrainConfig};

#[derive(Parser, Debug)]
#[command(
    name = "linq",
    version,
    about = "D2D link scheduling and power control toolkit"
)]
pub struct Cli {
    /// TOML file providing default flag values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Generate random layouts as JSON lines
    #[command(args_override_self = true)]
    Gen(GenArgs),
    /// Run a scheduling method on every layout
    #[command(args_override_self = true)]
    Schedule(SolveArgs),
    /// Run a power-control method on every layout
    #[command(args_override_self = true)]
    Power(SolveArgs),
    /// Train a GRLinQ agent with PPO
    #[command(args_override_self = true)]
    Train(TrainArgs),
    /// Compare methods against a baseline and write a report directory
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Time inference over growing network sizes
    #[command(args_override_self = true)]
    BenchTiming(TimingArgs),
    /// Run a batch experiment described by a TOML file
    #[command(args_override_self = true)]
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    PathLoss,
    Realistic,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Side of the square deployment area, m
    #[arg(long)]
    pub area: Option<f64>,
    /// Shortest Tx-Rx distance, m
    #[arg(long)]
    pub dmin: Option<f64>,
    /// Longest Tx-Rx distance, m
    #[arg(long)]
    pub dmax: Option<f64>,
    /// Carrier frequency, GHz
    #[arg(long)]
    pub freq_ghz: Option<f64>,
    /// Transmit power, dBm
    #[arg(long)]
    pub power_dbm: Option<f64>,
    /// Bandwidth, Hz
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Noise spectral density, dBm/Hz
    #[arg(long)]
    pub noise_dbm_hz: Option<f64>,
    /// Antenna height, m
    #[arg(long)]
    pub antenna_height: Option<f64>,
    /// Channel model for layouts without stored gains
    #[arg(long, value_enum, default_value = "path-loss")]
    pub channel: ChannelArg,
    /// Base seed of the realistic-channel draws
    #[arg(long, default_value_t = 0)]
    pub fading_seed: u64,
}

impl SystemArgs {
    pub fn params(&self) -> Result<SystemParams> {
        let mut p = SystemParams::default();
        if let Some(v) = self.area {
            p.area_side = v;
        }
        if let Some(v) = self.dmin {
            p.d2d_min = v;
        }
        if let Some(v) = self.dmax {
            p.d2d_max = v;
        }
        if let Some(v) = self.freq_ghz {
            p.carrier_freq = v * 1e9;
        }
        if let Some(v) = self.power_dbm {
            p.p_max = v;
        }
        if let Some(v) = self.bandwidth {
            p.bandwidth = v;
        }
        if let Some(v) = self.noise_dbm_hz {
            p.noise_density = v;
        }
        if let Some(v) = self.antenna_height {
            p.antenna_height = v;
        }
        p.validate()?;
        Ok(p)
    }

    fn mode(&self) -> ChannelMode {
        match self.channel {
            ChannelArg::PathLoss => ChannelMode::PathLossOnly,
            ChannelArg::Realistic => ChannelMode::Realistic,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct MethodArgs {
    /// FlashLinQ SIR threshold, dB
    #[arg(long, default_value_t = 24.0)]
    pub theta_db: f64,
    /// ITLinQ M, dB
    #[arg(long, default_value_t = 25.0)]
    pub m_db: f64,
    #[arg(long, default_value_t = 0.7)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.7)]
    pub eta_plus: f64,
    /// ITLinQ+ gamma
    #[arg(long, default_value_t = 0.1)]
    pub itlinq_gamma: f64,
    #[arg(long, default_value_t = 100)]
    pub fp_iters: usize,
    /// FPLinQ activates links whose power fraction exceeds this
    #[arg(long, default_value_t = 0.25)]
    pub fp_threshold: f64,
    #[arg(long, default_value_t = 100)]
    pub wmmse_iters: usize,
    /// Interference-graph degree for learned methods
    #[arg(long, default_value_t = 10)]
    pub k: usize,
}

impl MethodArgs {
    fn options(&self, sys: &SystemArgs) -> EvalOptions {
        EvalOptions {
            heuristics: HeuristicParams {
                theta: 10f64.powf(self.theta_db / 10.0),
                m_lin: 10f64.powf(self.m_db / 10.0),
                eta: self.eta,
                eta_plus: self.eta_plus,
                gamma: self.itlinq_gamma,
            },
            fp: FpConfig {
                iters: self.fp_iters,
                threshold: self.fp_threshold,
            },
            wmmse_iters: self.wmmse_iters,
            channel: sys.mode(),
            fading_seed: sys.fading_seed,
            k: self.k,
            ..EvalOptions::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Links per layout
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long)]
    pub layouts: PathBuf,
    /// Per-layout CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Checkpoint of the learned method (power-control agent for `joint`)
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Scheduling checkpoint for `joint`
    #[arg(long)]
    pub ls_model: Option<PathBuf>,
    /// Iterations of the iterative optimizers (sets both FPLinQ and WMMSE)
    #[arg(long)]
    pub iters: Option<usize>,
    #[command(flatten)]
    pub methods: MethodArgs,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long, default_value = "ls")]
    pub task: Task,
    #[arg(long, default_value = "it+")]
    pub features: FeatureDesign,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub layouts: PathBuf,
    #[arg(long, default_value_t = 5000)]
    pub updates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Checkpoint to continue from (e.g. trained on smaller networks)
    #[arg(long)]
    pub warm_start: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Training log CSV; defaults to the checkpoint path with `.log.csv`
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub layers: usize,
    #[arg(long, default_value_t = 128)]
    pub hidden: usize,
    #[arg(long, value_enum, default_value = "trivial")]
    pub edge_update: EdgeArg,
    #[arg(long, value_enum, default_value = "distance")]
    pub input_mode: InputArg,
    /// ITLinQ+ feature gamma
    #[arg(long, default_value_t = 0.1)]
    pub feature_gamma: f64,
    /// Multiplier on the normalized CSI strengths
    #[arg(long, default_value_t = 1.0)]
    pub csi_scale: f64,
    #[arg(long, default_value_t = 3e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 16)]
    pub episodes: usize,
    #[arg(long, default_value_t = 4)]
    pub epochs: usize,
    #[arg(long, default_value_t = 64)]
    pub minibatch: usize,
    #[arg(long, default_value_t = 0.2)]
    pub clip: f64,
    #[arg(long, default_value_t = 0.01)]
    pub ent_coef: f64,
    #[arg(long, default_value_t = 0.5)]
    pub vf_coef: f64,
    #[arg(long, default_value_t = 1.0)]
    pub discount: f64,
    #[arg(long, default_value_t = 0.95)]
    pub gae_lambda: f64,
    #[arg(long)]
    pub max_grad_norm: Option<f64>,
    /// Skip per-batch advantage normalization
    #[arg(long)]
    pub no_adv_norm: bool,
    /// Episode step limit
    #[arg(long, default_value_t = 32)]
    pub horizon: usize,
    /// No progress lines on stderr
    #[arg(long)]
    pub quiet: bool,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EdgeArg {
    Trivial,
    Mlp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputArg {
    Distance,
    Csi,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Comma-separated method names
    #[arg(long)]
    pub methods: String,
    #[arg(long)]
    pub layouts: PathBuf,
    #[arg(long, default_value = "fplinq")]
    pub baseline: Method,
    /// Report directory
    #[arg(long)]
    pub out: PathBuf,
    /// Scheduling checkpoint (grlinq, joint)
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Power-control checkpoint (grlinq-pc, joint)
    #[arg(long)]
    pub pc_model: Option<PathBuf>,
    #[command(flatten)]
    pub methods_cfg: MethodArgs,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Args, Debug)]
pub struct TimingArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Comma-separated network sizes
    #[arg(long, value_delimiter = ',', default_value = "100,1000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON file receiving the measurements
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub methods: MethodArgs,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Caps the global worker pool from `LINQ_THREADS`.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("LINQ_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        LinqError::Config(format!(
            "LINQ_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn toml_to_arg(v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(a) => a
            .iter()
            .map(toml_to_arg)
            .collect::<Result<Vec<_>>>()?
            .join(","),
        other => return Err(LinqError::Config(format!("unsupported value {other}"))),
    })
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Inserts flags from the `--config` file right after the subcommand name,
/// so that flags given on the command line override them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| LinqError::io(&path, e))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| LinqError::Config(e.to_string()))?;
    let cmd = Cli::command();
    let subs: Vec<String> = cmd
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect();
    let Some(pos) = args
        .iter()
        .position(|a| subs.iter().any(|s| a == s.as_str()))
    else {
        return Ok(args);
    };
    let active = cmd
        .find_subcommand(args[pos].to_string_lossy().as_ref())
        .expect("subcommand found above");
    let key = |k: &str| k.replace('_', "-");
    let render = |sub: &clap::Command, k: &str, v: &toml::Value| -> Result<Option<String>> {
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(k)) else {
            return Ok(None);
        };
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            return match v {
                toml::Value::Boolean(true) => Ok(Some(format!("--{k}"))),
                toml::Value::Boolean(false) => Ok(Some(String::new())),
                _ => Err(LinqError::Config(format!(
                    "`{k}` is a switch; use true or false"
                ))),
            };
        }
        Ok(Some(format!("--{k}={}", toml_to_arg(v)?)))
    };
    let mut injected = Vec::new();
    let mut sections = Vec::new();
    for (k, v) in &table {
        if let toml::Value::Table(t) = v {
            let name = key(k);
            if !subs.contains(&name) {
                return Err(LinqError::Config(format!("unknown section [{k}]")));
            }
            sections.push((name, t));
            continue;
        }
        let k = key(k);
        if k == "config" {
            return Err(LinqError::Config(
                "a config file cannot name another config file".into(),
            ));
        }
        match render(active, &k, v)? {
            Some(s) => injected.push(s),
            None => {
                if !cmd
                    .get_subcommands()
                    .any(|s| s.get_arguments().any(|a| a.get_long() == Some(k.as_str())))
                {
                    return Err(LinqError::Config(format!("unknown key `{k}`")));
                }
            }
        }
    }
    for (name, t) in sections {
        let sub = cmd.find_subcommand(&name).expect("checked above");
        for (k, v) in t {
            let k = key(k);
            let flag = render(sub, &k, v)?
                .ok_or_else(|| LinqError::Config(format!("unknown key `{k}` in [{name}]")))?;
            if name == active.get_name() {
                injected.push(flag);
            }
        }
    }
    let mut out = args[..=pos].to_vec();
    out.extend(
        injected
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(OsString::from),
    );
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn load_records(path: &Path, params: &SystemParams) -> Result<Vec<LayoutRecord>> {
    let recs = read_layouts(path, params.dense_cap)?;
    if recs.is_empty() {
        return Err(LinqError::InvalidParam(format!(
            "{} holds no layouts",
            path.display()
        )));
    }
    Ok(recs)
}

fn gen(a: &GenArgs) -> Result<()> {
    let params = a.system.params()?;
    let layouts = generate_layouts(&params, a.n, a.count, a.seed)?;
    let records = layouts
        .into_iter()
        .enumerate()
        .map(|(k, l)| {
            let gains = match a.system.mode() {
                ChannelMode::PathLossOnly => None,
                ChannelMode::Realistic => {
                    let seed = crate::derive_seed(a.system.fading_seed, k as u64);
                    Some(
                        build_channel(&l, &params, ChannelMode::Realistic, seed)?
                            .as_slice()
                            .to_vec(),
                    )
                }
            };
            Ok(LayoutRecord { layout: l, gains })
        })
        .collect::<Result<Vec<_>>>()?;
    write_layouts(&a.out, &records)?;
    println!(
        "wrote {} layouts of {} links to {}",
        records.len(),
        a.n,
        a.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct RateRow<'a> {
    layout: usize,
    seed: u64,
    n: usize,
    method: &'a str,
    sum_rate: f64,
    mbps: f64,
    active: usize,
    x: String,
}

fn solve(a: &SolveArgs, power: bool) -> Result<()> {
    if a.method.is_power_control() != power {
        let want = if power {
            "a power-control"
        } else {
            "a scheduling"
        };
        return Err(LinqError::InvalidParam(format!(
            "{} is not {want} method",
            a.method
        )));
    }
    let params = a.system.params()?;
    let mut opts = a.methods.options(&a.system);
    if let Some(it) = a.iters {
        opts.fp.iters = it;
        opts.wmmse_iters = it;
    }
    match a.method {
        Method::GrLinq => opts.ls_agent = a.model.as_ref().map(Agent::load).transpose()?,
        Method::GrLinqPc => opts.pc_agent = a.model.as_ref().map(Agent::load).transpose()?,
        Method::Joint => {
            opts.pc_agent = a.model.as_ref().map(Agent::load).transpose()?;
            opts.ls_agent = a.ls_model.as_ref().map(Agent::load).transpose()?;
        }
        _ => {}
    }
    opts.baseline = a.method;
    opts.check(&[a.method])?;
    let recs = load_records(&a.layouts, &params)?;
    use rayon::prelude::*;
    let rows = recs
        .par_iter()
        .enumerate()
        .map(|(k, r)| {
            let p = Prepared::new(r, k, &params, &opts, &[a.method])?;
            let x = p.solve(a.method, &opts)?;
            let rate = p.model()?.weighted_sum_rate(&x);
            Ok((k, r.layout.seed(), x, rate))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = std::fs::File::create(&a.out).map_err(|e| LinqError::io(&a.out, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(f));
    if rows.is_empty() {
        w.write_record([
            "layout", "seed", "n", "method", "sum_rate", "mbps", "active", "x",
        ])?;
    }
    let mut total = 0.0;
    for (k, seed, x, rate) in rows {
        total += rate;
        w.serialize(RateRow {
            layout: k,
            seed,
            n: x.len(),
            method: a.method.name(),
            sum_rate: rate,
            mbps: to_mbps(rate, params.bandwidth),
            active: x.iter().filter(|&&v| v > 0.0).count(),
            x: x.iter().map(f64::to_string).collect::<Vec<_>>().join(" "),
        })?;
    }
    w.flush().map_err(|e| LinqError::io(&a.out, e))?;
    println!(
        "{}: mean sum rate {:.4} bit/s/Hz over {} layouts -> {}",
        a.method,
        total / recs.len() as f64,
        recs.len(),
        a.out.display()
    );
    Ok(())
}

fn train_cmd(a: &TrainArgs) -> Result<()> {
    let params = a.system.params()?;
    let features = FeatureConfig {
        design: a.features,
        gamma: a.feature_gamma,
        input_mode: match a.input_mode {
            InputArg::Distance => InputMode::Distance,
            InputArg::Csi => InputMode::Csi,
        },
        csi_scale: a.csi_scale,
    };
    let mut cfg = TrainConfig::new(a.task, features.clone());
    cfg.k = a.k;
    cfg.gnn = GnnConfig {
        layers: a.layers,
        hidden: a.hidden,
        edge_update: match a.edge_update {
            EdgeArg::Trivial => EdgeUpdate::Trivial,
            EdgeArg::Mlp => EdgeUpdate::Mlp,
        },
        actions: 0,
        node_dim: 0,
        seed: a.seed,
    };
    cfg.ppo.updates = a.updates;
    cfg.ppo.seed = a.seed;
    cfg.ppo.lr = a.lr;
    cfg.ppo.episodes_per_update = a.episodes;
    cfg.ppo.epochs = a.epochs;
    cfg.ppo.minibatch = a.minibatch;
    cfg.ppo.clip = a.clip;
    cfg.ppo.ent_coef = a.ent_coef;
    cfg.ppo.vf_coef = a.vf_coef;
    cfg.ppo.gamma = a.discount;
    cfg.ppo.lambda = a.gae_lambda;
    cfg.ppo.max_grad_norm = a.max_grad_norm;
    cfg.ppo.normalize_advantages = !a.no_adv_norm;
    cfg.mdp.horizon = a.horizon;
    let eval = EvalOptions {
        channel: a.system.mode(),
        fading_seed: a.system.fading_seed,
        ..EvalOptions::default()
    };
    let recs = load_records(&a.layouts, &params)?;
    let instances = recs
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Instance::with_channel(
                r.layout.clone(),
                &params,
                a.k,
                &features,
                Some(eval.channel_for(r, i, &params)?),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let warm = match &a.warm_start {
        Some(p) => Some(Agent::load_expecting(p, a.task, a.features)?),
        None => None,
    };
    let every = (a.updates / 20).max(1);
    let (agent, log) = train_with(&instances, &cfg, warm, |r| {
        if !a.quiet && (r.update % every == 0 || r.update + 1 == a.updates) {
            eprintln!(
                "update {:>5}  return {:>9.4}  policy {:>9.4}  value {:>9.4}  entropy {:.4}",
                r.update, r.mean_return, r.policy_loss, r.value_loss, r.entropy
            );
        }
    })?;
    agent.save(&a.out)?;
    let log_path = a
        .log
        .clone()
        .unwrap_or_else(|| a.out.with_extension("log.csv"));
    write_train_log(&log_path, &log)?;
    println!("saved {} and {}", a.out.display(), log_path.display());
    Ok(())
}

fn eval_cmd(a: &EvalArgs) -> Result<()> {
    let params = a.system.params()?;
    let methods = Method::parse_list(&a.methods)?;
    let mut opts = a.methods_cfg.options(&a.system);
    opts.baseline = a.baseline;
    opts.ls_agent = a.model.as_ref().map(Agent::load).transpose()?;
    opts.pc_agent = a.pc_model.as_ref().map(Agent::load).transpose()?;
    let recs = load_records(&a.layouts, &params)?;
    let reports = evaluate(&methods, &recs, &params, &opts)?;
    write_report(&a.out, &reports, &recs, &params, a.baseline)?;
    for r in &reports {
        println!(
            "{:<11} ratio {:.4}  sum rate {:.4} bit/s/Hz",
            r.method.name(),
            r.mean_ratio,
            r.mean_sum_rate
        );
    }
    Ok(())
}

fn timing_cmd(a: &TimingArgs) -> Result<()> {
    let params = a.system.params()?;
    let mut opts = a.methods.options(&a.system);
    let agent = a.model.as_ref().map(Agent::load).transpose()?;
    match a.method {
        Method::GrLinq => opts.ls_agent = agent,
        Method::GrLinqPc => opts.pc_agent = agent,
        _ => {}
    }
    let points = timing_probe(a.method, &a.sizes, &params, &opts, a.repeats, a.seed)?;
    for p in &points {
        println!("n {:>7}  {:.6} s", p.n, p.seconds);
    }
    if let Some(out) = &a.out {
        let meta = serde_json::json!({ "method": a.method, "k": a.methods.k, "timing": points });
        std::fs::write(out, serde_json::to_string_pretty(&meta)?)
            .map_err(|e| LinqError::io(out, e))?;
    }
    Ok(())
}

fn experiment_cmd(a: &ExperimentArgs) -> Result<()> {
    let spec = super::ExperimentSpec::load(&a.spec)?;
    let base = a.spec.parent().unwrap_or(Path::new("."));
    let results = super::run_experiment(&spec, base, &a.out)?;
    for (label, reports) in &results {
        for r in reports {
            println!(
                "{label:<16} {:<11} ratio {:.4}",
                r.method.name(),
                r.mean_ratio
            );
        }
    }
    println!("bundle written to {}", a.out.display());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Cmd::Gen(a) => gen(a),
        Cmd::Schedule(a) => solve(a, false),
        Cmd::Power(a) => solve(a, true),
        Cmd::Train(a) => train_cmd(a),
        Cmd::Eval(a) => eval_cmd(a),
        Cmd::BenchTiming(a) => timing_cmd(a),
        Cmd::Experiment(a) => experiment_cmd(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> ExitCode {
    let report = |e: LinqError| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    };
    if let Err(e) = configure_threads() {
        return report(e);
    }
    let args = match expand_config(args.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => return report(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn config_keys_come_before_user_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(
            &cfg,
            "seed = 5\n[gen]\nn = 20\ncount = 3\narea = 250.0\n[train]\nquiet = true\n",
        )
        .unwrap();
        let c = cfg.to_str().unwrap();
        let args = expand_config(os(&[
            "linq", "--config", c, "gen", "--count", "7", "--out", "x.jsonl",
        ]))
        .unwrap();
        let cli = Cli::try_parse_from(args).unwrap();
        let Cmd::Gen(g) = cli.command else { panic!() };
        assert_eq!(
            (g.n, g.count, g.seed, g.system.area),
            (20, 7, 5, Some(250.0))
        );
    }

    #[test]
    fn config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        for bad in [
            "nonsense = 1\n",
            "[gen]\nupdates = 3\n",
            "[nope]\na = 1\n",
            "[train]\nquiet = 3\n",
        ] {
            std::fs::write(&cfg, bad).unwrap();
            let args = os(&[
                "linq",
                "gen",
                "--config",
                cfg.to_str().unwrap(),
                "--n",
                "3",
                "--out",
                "o",
            ]);
            assert!(
                matches!(expand_config(args), Err(LinqError::Config(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn solve_rejects_wrong_family() {
        let cli = Cli::try_parse_from(os(&[
            "linq",
            "power",
            "--method",
            "greedy",
            "--layouts",
            "a",
            "--out",
            "b",
        ]))
        .unwrap();
        assert!(matches!(execute(&cli), Err(LinqError::InvalidParam(_))));
    }
}
