//! Clipped-surrogate PPO over the per-node factorized policy.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Instance;
use crate::error::{LinqError, Result};
use crate::gnn::{Agent, Tensor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PpoConfig {
    pub clip: f64,
    pub epochs: usize,
    pub minibatch: usize,
    pub lr: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub ent_coef: f64,
    pub vf_coef: f64,
    pub episodes_per_update: usize,
    pub updates: usize,
    pub seed: u64,
    pub normalize_advantages: bool,
    /// Rescale each network's gradient to at most this global norm.
    pub max_grad_norm: Option<f64>,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            clip: 0.2,
            epochs: 4,
            minibatch: 64,
            lr: 3e-4,
            gamma: 1.0,
            lambda: 0.95,
            ent_coef: 0.01,
            vf_coef: 0.5,
            episodes_per_update: 16,
            updates: 5000,
            seed: 1,
            normalize_advantages: true,
            max_grad_norm: None,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.clip > 0.0
            && self.clip < 1.0
            && self.gamma > 0.0
            && self.gamma <= 1.0
            && (0.0..=1.0).contains(&self.lambda)
            && self.epochs >= 1
            && self.minibatch >= 1
            && self.episodes_per_update >= 1
            && self.lr > 0.0;
        if ok {
            Ok(())
        } else {
            Err(LinqError::InvalidParam(format!(
                "PPO configuration out of range: {self:?}"
            )))
        }
    }
}

/// Adam with bias correction.
#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: i32,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(lr: f64, params: &[Tensor]) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: params.iter().map(|p| vec![0.0; p.data.len()]).collect(),
            v: params.iter().map(|p| vec![0.0; p.data.len()]).collect(),
        }
    }

    pub fn step(&mut self, params: &mut [Tensor], grads: &[Tensor]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            for (i, (w, &gi)) in p.data.iter_mut().zip(&g.data).enumerate() {
                let m = &mut self.m[k][i];
                let v = &mut self.v[k][i];
                *m = self.beta1 * *m + (1.0 - self.beta1) * gi;
                *v = self.beta2 * *v + (1.0 - self.beta2) * gi * gi;
                *w -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
            }
        }
    }
}

/// One environment step as seen by the learner.
#[derive(Clone, Debug)]
pub struct Transition {
    pub instance: usize,
    /// Node features the action was drawn from.
    pub nodes: Vec<f64>,
    /// Nodes whose action entered the environment.
    pub acting: Vec<usize>,
    /// Action of each acting node.
    pub actions: Vec<usize>,
    /// Joint log-probability at collection time.
    pub logp: f64,
    pub value: f64,
    pub reward: f64,
    pub advantage: f64,
    pub ret: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
}

/// Row-wise log-softmax.
pub fn log_softmax_rows(logits: &[f64], cols: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(logits.len());
    for row in logits.chunks(cols) {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|z| (z - m).exp()).sum::<f64>().ln();
        out.extend(row.iter().map(|z| z - lse));
    }
    out
}

pub struct Optimizers {
    pub policy: Adam,
    pub value: Adam,
}

impl Optimizers {
    pub fn new(agent: &Agent, lr: f64) -> Self {
        Self {
            policy: Adam::new(lr, agent.policy.tensors()),
            value: Adam::new(lr, agent.value.tensors()),
        }
    }
}

fn clip_norm(grads: &mut [Tensor], max: Option<f64>) {
    let Some(max) = max else { return };
    let norm = grads
        .iter()
        .flat_map(|t| &t.data)
        .map(|g| g * g)
        .sum::<f64>()
        .sqrt();
    if norm > max {
        let s = max / norm;
        for g in grads.iter_mut().flat_map(|t| t.data.iter_mut()) {
            *g *= s;
        }
    }
}

fn all_finite(grads: &[Tensor]) -> bool {
    grads.iter().all(|t| t.data.iter().all(|v| v.is_finite()))
}

/// Several epochs of minibatch PPO on `batch`, whose advantages and returns
/// must already be filled in.
pub fn ppo_update<R: rand::Rng>(
    agent: &mut Agent,
    opt: &mut Optimizers,
    batch: &mut [Transition],
    instances: &[Instance],
    cfg: &PpoConfig,
    rng: &mut R,
) -> Result<Diagnostics> {
    if batch.is_empty() {
        return Ok(Diagnostics::default());
    }
    if cfg.normalize_advantages {
        let n = batch.len() as f64;
        let mean = batch.iter().map(|t| t.advantage).sum::<f64>() / n;
        let sd = (batch
            .iter()
            .map(|t| (t.advantage - mean).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        for t in batch.iter_mut() {
            t.advantage = (t.advantage - mean) / (sd + 1e-8);
        }
    }
    let na = agent.config().actions;
    let mut order: Vec<usize> = (0..batch.len()).collect();
    let mut diag = Diagnostics::default();
    let mut seen = 0usize;
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(cfg.minibatch) {
            let b = chunk.len() as f64;
            let mut gp = agent.policy.zero_grads();
            let mut gv = agent.value.zero_grads();
            for &ti in chunk {
                let tr = &batch[ti];
                let inst = &instances[tr.instance];
                let x = inst.input(&tr.nodes);
                let f = agent.policy.forward(&x)?;
                let logp = log_softmax_rows(&f.logits, na);
                let new_logp: f64 = tr
                    .acting
                    .iter()
                    .zip(&tr.actions)
                    .map(|(&i, &a)| logp[i * na + a])
                    .sum();
                let ratio = (new_logp - tr.logp).exp();
                let adv = tr.advantage;
                let clipped = ratio.clamp(1.0 - cfg.clip, 1.0 + cfg.clip);
                let surrogate = (ratio * adv).min(clipped * adv);
                let live =
                    (adv > 0.0 && ratio < 1.0 + cfg.clip) || (adv < 0.0 && ratio > 1.0 - cfg.clip);
                let g_logp = if live { -ratio * adv / b } else { 0.0 };
                let mut ent = 0.0;
                let mut dlogits = vec![0.0; f.logits.len()];
                let k = tr.acting.len().max(1) as f64;
                let g_ent = -cfg.ent_coef / b / k;
                for (&i, &a) in tr.acting.iter().zip(&tr.actions) {
                    let p = &f.output[i * na..(i + 1) * na];
                    let lp = &logp[i * na..(i + 1) * na];
                    let h: f64 = -p.iter().zip(lp).map(|(pk, lk)| pk * lk).sum::<f64>();
                    ent += h;
                    let row = &mut dlogits[i * na..(i + 1) * na];
                    for c in 0..na {
                        let onehot = if c == a { 1.0 } else { 0.0 };
                        row[c] += g_logp * (onehot - p[c]);
                        row[c] += g_ent * (-p[c] * (lp[c] + h));
                    }
                }
                agent.policy.backward_into(&x, &f, &dlogits, &mut gp)?;
                let fv = agent.value.forward(&x)?;
                let err = fv.output[0] - tr.ret;
                agent
                    .value
                    .backward_into(&x, &fv, &[cfg.vf_coef * 2.0 * err / b], &mut gv)?;
                let loss = -surrogate;
                if !loss.is_finite() || !err.is_finite() {
                    return Err(LinqError::NonFinite("PPO loss"));
                }
                diag.policy_loss += loss;
                diag.value_loss += err * err;
                diag.entropy += ent / k;
                seen += 1;
            }
            if !all_finite(&gp) || !all_finite(&gv) {
                return Err(LinqError::NonFinite("PPO gradient"));
            }
            clip_norm(&mut gp, cfg.max_grad_norm);
            clip_norm(&mut gv, cfg.max_grad_norm);
            opt.policy.step(agent.policy.tensors_mut(), &gp);
            opt.value.step(agent.value.tensors_mut(), &gv);
        }
    }
    let s = seen as f64;
    Ok(Diagnostics {
        policy_loss: diag.policy_loss / s,
        value_loss: diag.value_loss / s,
        entropy: diag.entropy / s,
    })
}
