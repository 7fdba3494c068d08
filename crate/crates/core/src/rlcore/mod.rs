//! The GRLinQ agents: MDP environments, PPO training and greedy inference.

mod env;
mod gae;
mod infer;
mod ppo;
mod train;

use crate::error::{LinqError, Result};
use crate::features::{FeatureConfig, FeatureContext, InputMode};
use crate::gnn::GraphInput;
use crate::igraph::{build_k_nearest, build_k_strongest, InterferenceGraph};
use crate::network::{build_channel, ChannelMatrix, ChannelMode, NetworkLayout, SystemParams};
use crate::rates::RateModel;

pub use env::{Episode, EpisodeState, MdpConfig, StepOutcome, LS_ACTIONS, LS_KEEP, PC_KEEP};
pub use gae::compute_gae;
pub use infer::{infer_joint, infer_power, infer_schedule, Inference};
pub use ppo::{log_softmax_rows, ppo_update, Adam, Diagnostics, Optimizers, PpoConfig, Transition};
pub use train::{rollout, train, train_with, write_train_log, LogRow, TrainConfig};

/// A layout prepared for the agents: interference graph, feature constants
/// and, when rewards are needed, the channel.
pub struct Instance {
    pub layout: NetworkLayout,
    pub graph: InterferenceGraph,
    pub ctx: FeatureContext,
    pub channel: Option<ChannelMatrix>,
    tx_power: f64,
    weights: Option<Vec<f64>>,
}

impl Instance {
    /// Distance-mode instance. With `with_channel`, path-loss gains are built
    /// so rewards can be computed.
    pub fn new(
        layout: NetworkLayout,
        params: &SystemParams,
        k: usize,
        features: &FeatureConfig,
        with_channel: bool,
    ) -> Result<Self> {
        let channel = if with_channel {
            Some(build_channel(
                &layout,
                params,
                ChannelMode::PathLossOnly,
                0,
            )?)
        } else {
            None
        };
        Self::with_channel(layout, params, k, features, channel)
    }

    /// Uses the given channel for rewards. In CSI mode the graph and the
    /// features are derived from it, so it is required.
    pub fn with_channel(
        layout: NetworkLayout,
        params: &SystemParams,
        k: usize,
        features: &FeatureConfig,
        channel: Option<ChannelMatrix>,
    ) -> Result<Self> {
        let (graph, ctx) = match features.input_mode {
            InputMode::Distance => {
                let g = build_k_nearest(&layout, k);
                let c = FeatureContext::from_layout(&layout, &g, features);
                (g, c)
            }
            InputMode::Csi => {
                let ch = channel.as_ref().ok_or_else(|| {
                    LinqError::Missing("CSI features need a channel matrix".into())
                })?;
                let g = build_k_strongest(ch, k);
                let c = FeatureContext::from_channel(ch, &g, features);
                (g, c)
            }
        };
        Ok(Self {
            layout,
            graph,
            ctx,
            channel,
            tx_power: params.tx_power_watts(),
            weights: params.weights.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.layout.n_links()
    }

    pub fn input<'a>(&'a self, nodes: &'a [f64]) -> GraphInput<'a> {
        GraphInput {
            graph: &self.graph,
            nodes,
            edges: self.ctx.edge_features(),
        }
    }

    /// Objective on this instance's channel, if it has one.
    pub fn model(&self) -> Option<Result<RateModel<'_, ChannelMatrix>>> {
        let ch = self.channel.as_ref()?;
        let n = self.n();
        let weights = match &self.weights {
            Some(w) if w.len() == n => w.clone(),
            Some(w) => {
                return Some(Err(LinqError::Shape(format!(
                    "{} weights for {n} links",
                    w.len()
                ))));
            }
            None => vec![1.0; n],
        };
        Some(RateModel::new(ch, vec![self.tx_power; n], weights))
    }
}
