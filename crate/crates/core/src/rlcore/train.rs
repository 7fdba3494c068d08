//! Rollout collection and the PPO training loop.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::env::{Episode, MdpConfig, LS_KEEP, PC_KEEP};
use super::gae::compute_gae;
use super::ppo::{log_softmax_rows, ppo_update, Optimizers, PpoConfig, Transition};
use super::Instance;
use crate::error::{LinqError, Result};
use crate::features::{FeatureConfig, Task};
use crate::gnn::{Agent, GnnConfig};
use crate::{derive_seed, seeded_rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub task: Task,
    pub features: FeatureConfig,
    /// Neighbors per node in the interference graph.
    pub k: usize,
    pub gnn: GnnConfig,
    pub ppo: PpoConfig,
    pub mdp: MdpConfig,
}

impl TrainConfig {
    pub fn new(task: Task, features: FeatureConfig) -> Self {
        Self {
            task,
            features,
            k: 10,
            gnn: GnnConfig::new(0, 0),
            ppo: PpoConfig::default(),
            mdp: MdpConfig::default(),
        }
    }
}

/// One line of the training log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub update: usize,
    pub mean_return: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
}

fn sample(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    probs.len() - 1
}

/// Runs one stochastic episode on `instances[idx]`. Returns the transitions,
/// with advantages and returns filled in, and the undiscounted return.
pub fn rollout(
    agent: &Agent,
    instances: &[Instance],
    idx: usize,
    mdp: &MdpConfig,
    ppo: &PpoConfig,
    rng: &mut impl Rng,
) -> Result<(Vec<Transition>, f64)> {
    let inst = &instances[idx];
    let model = inst
        .model()
        .ok_or_else(|| LinqError::Missing("training instances need a channel".into()))??;
    let n = inst.n();
    let mut ep = match agent.task {
        Task::Ls => Episode::ls(n, Some(&model), mdp),
        Task::Pc => Episode::pc(vec![0.5; n], Some(&model), mdp)?,
    };
    let na = agent.config().actions;
    let keep = match agent.task {
        Task::Ls => LS_KEEP,
        Task::Pc => PC_KEEP,
    };
    let mut out = Vec::new();
    while !ep.is_done() {
        let nodes = inst
            .ctx
            .node_features(ep.state().view(), ep.t(), mdp.horizon);
        let x = inst.input(&nodes);
        let f = agent.policy.forward(&x)?;
        let value = agent.value.forward(&x)?.output[0];
        let logp = log_softmax_rows(&f.logits, na);
        let mut actions = vec![keep; n];
        let mut acting = Vec::new();
        let mut chosen = Vec::new();
        let mut joint = 0.0;
        for (i, on) in ep.acting().into_iter().enumerate() {
            if !on {
                continue;
            }
            let a = sample(&f.output[i * na..(i + 1) * na], rng);
            actions[i] = a;
            acting.push(i);
            chosen.push(a);
            joint += logp[i * na + a];
        }
        let step = ep.step(&actions)?;
        if !step.reward.is_finite() {
            return Err(LinqError::NonFinite("reward"));
        }
        out.push(Transition {
            instance: idx,
            nodes,
            acting,
            actions: chosen,
            logp: joint,
            value,
            reward: step.reward,
            advantage: 0.0,
            ret: 0.0,
        });
    }
    let rewards: Vec<f64> = out.iter().map(|t| t.reward).collect();
    let values: Vec<f64> = out.iter().map(|t| t.value).collect();
    let (adv, ret) = compute_gae(&rewards, &values, 0.0, ppo.gamma, ppo.lambda);
    for (t, (a, r)) in out.iter_mut().zip(adv.into_iter().zip(ret)) {
        t.advantage = a;
        t.ret = r;
    }
    Ok((out, rewards.iter().sum()))
}

/// Trains an agent on `instances`; see [`train_with`].
pub fn train(
    instances: &[Instance],
    cfg: &TrainConfig,
    warm_start: Option<Agent>,
) -> Result<(Agent, Vec<LogRow>)> {
    train_with(instances, cfg, warm_start, |_| {})
}

/// Trains an agent, calling `on_update` after every PPO update.
///
/// A warm start keeps its own network shape; it must match the task and the
/// feature design of `cfg`.
pub fn train_with(
    instances: &[Instance],
    cfg: &TrainConfig,
    warm_start: Option<Agent>,
    mut on_update: impl FnMut(&LogRow),
) -> Result<(Agent, Vec<LogRow>)> {
    if instances.is_empty() {
        return Err(LinqError::InvalidParam(
            "training needs at least one layout".into(),
        ));
    }
    cfg.ppo.validate()?;
    if cfg.mdp.horizon == 0 {
        return Err(LinqError::InvalidParam("horizon must be positive".into()));
    }
    if let Some(i) = instances
        .iter()
        .position(|x| x.ctx.design() != cfg.features.design)
    {
        return Err(LinqError::InvalidParam(format!(
            "instance {i} was built for another feature design"
        )));
    }
    let mut agent = match warm_start {
        Some(a) => {
            a.expect(cfg.task, cfg.features.design)?;
            a
        }
        None => Agent::new(cfg.task, cfg.features.clone(), cfg.gnn.clone())?,
    };
    let mut opt = Optimizers::new(&agent, cfg.ppo.lr);
    let mut log = Vec::with_capacity(cfg.ppo.updates);
    let episodes = cfg.ppo.episodes_per_update as u64;
    for u in 0..cfg.ppo.updates {
        let base = derive_seed(cfg.ppo.seed, u as u64);
        let snapshot = &agent;
        let collected: Vec<(Vec<Transition>, f64)> = (0..episodes)
            .into_par_iter()
            .map(|e| {
                let mut rng = seeded_rng(derive_seed(base, e));
                let idx = rng.random_range(0..instances.len());
                rollout(snapshot, instances, idx, &cfg.mdp, &cfg.ppo, &mut rng)
            })
            .collect::<Result<_>>()?;
        let mean_return = collected.iter().map(|c| c.1).sum::<f64>() / episodes as f64;
        let mut batch: Vec<Transition> = collected.into_iter().flat_map(|c| c.0).collect();
        let mut rng = seeded_rng(derive_seed(base, u64::MAX));
        let d = ppo_update(
            &mut agent, &mut opt, &mut batch, instances, &cfg.ppo, &mut rng,
        )?;
        let row = LogRow {
            update: u,
            mean_return,
            policy_loss: d.policy_loss,
            value_loss: d.value_loss,
            entropy: d.entropy,
        };
        on_update(&row);
        log.push(row);
    }
    Ok((agent, log))
}

/// Writes the training log as CSV.
pub fn write_train_log(path: impl AsRef<Path>, rows: &[LogRow]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| LinqError::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(std::io::BufWriter::new(file));
    w.write_record([
        "update",
        "mean_return",
        "policy_loss",
        "value_loss",
        "entropy",
    ])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| LinqError::io(path, e))?;
    Ok(())
}
