//! Deterministic (argmax) rollouts of a trained agent.

use super::env::{Episode, MdpConfig, LS_KEEP, PC_KEEP};
use super::Instance;
use crate::error::{LinqError, Result};
use crate::features::Task;
use crate::gnn::Agent;
use crate::network::ChannelMatrix;
use crate::rates::Activation;

#[derive(Clone, Debug, PartialEq)]
pub struct Inference {
    pub x: Activation,
    /// Environment steps taken.
    pub steps: usize,
    /// Multiply-accumulates spent in the policy network.
    pub macs: u64,
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (a, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = a;
        }
    }
    best
}

fn run(
    agent: &Agent,
    inst: &Instance,
    mut ep: Episode<'_, ChannelMatrix>,
    mdp: &MdpConfig,
) -> Result<Inference> {
    if inst.ctx.design() != agent.features.design {
        return Err(LinqError::CheckpointMismatch(format!(
            "instance features are {}, agent expects {}",
            inst.ctx.design(),
            agent.features.design
        )));
    }
    let na = agent.config().actions;
    let keep = match agent.task {
        Task::Ls => LS_KEEP,
        Task::Pc => PC_KEEP,
    };
    let mut macs = 0;
    while !ep.is_done() {
        let nodes = inst
            .ctx
            .node_features(ep.state().view(), ep.t(), mdp.horizon);
        let f = agent.policy.forward(&inst.input(&nodes))?;
        macs += f.macs;
        let acting = ep.acting();
        let mut actions: Vec<usize> = acting
            .iter()
            .enumerate()
            .map(|(i, &on)| {
                if on {
                    argmax(&f.logits[i * na..(i + 1) * na])
                } else {
                    keep
                }
            })
            .collect();
        // A scheduling step in which every pending link waits is a fixed point
        // of the argmax policy; decide those links between active and inactive.
        if agent.task == Task::Ls && actions.iter().all(|&a| a == LS_KEEP) {
            for (i, a) in actions.iter_mut().enumerate() {
                if acting[i] {
                    *a = argmax(&f.logits[i * na..i * na + 2]);
                }
            }
        }
        ep.step(&actions)?;
    }
    Ok(Inference {
        x: Activation::new(ep.state().activation())?,
        steps: ep.t(),
        macs,
    })
}

/// Binary schedule from a scheduling agent.
pub fn infer_schedule(agent: &Agent, inst: &Instance, mdp: &MdpConfig) -> Result<Inference> {
    agent.expect(Task::Ls, agent.features.design)?;
    run(agent, inst, Episode::ls(inst.n(), None, mdp), mdp)
}

/// Power levels from a power-control agent starting at `init` (0.5 per link
/// when `None`).
pub fn infer_power(
    agent: &Agent,
    inst: &Instance,
    init: Option<Vec<f64>>,
    mdp: &MdpConfig,
) -> Result<Inference> {
    agent.expect(Task::Pc, agent.features.design)?;
    let init = init.unwrap_or_else(|| vec![0.5; inst.n()]);
    if init.len() != inst.n() {
        return Err(LinqError::Shape(format!(
            "{} initial powers for {} links",
            init.len(),
            inst.n()
        )));
    }
    run(agent, inst, Episode::pc(init, None, mdp)?, mdp)
}

/// Scheduling followed by power control warm-started from the schedule.
/// Each agent gets the instance built for its own feature design.
pub fn infer_joint(
    ls: &Agent,
    ls_inst: &Instance,
    pc: &Agent,
    pc_inst: &Instance,
    mdp: &MdpConfig,
) -> Result<Inference> {
    let first = infer_schedule(ls, ls_inst, mdp)?;
    let second = infer_power(pc, pc_inst, Some(first.x.to_vec()), mdp)?;
    Ok(Inference {
        x: second.x,
        steps: first.steps + second.steps,
        macs: first.macs + second.macs,
    })
}
