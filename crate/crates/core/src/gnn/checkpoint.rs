//! Versioned JSON checkpoints holding a policy/value pair and its metadata.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GnnConfig, Head, Mpgnn};
use crate::error::{LinqError, Result};
use crate::features::{feature_dim, FeatureConfig, FeatureDesign, InputMode, Task};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Policy and value networks trained for one task and feature design.
#[derive(Clone, Debug, PartialEq)]
pub struct Agent {
    pub task: Task,
    pub features: FeatureConfig,
    pub policy: Mpgnn,
    pub value: Mpgnn,
}

#[derive(Serialize, Deserialize)]
struct MetaConfig {
    #[serde(flatten)]
    gnn: GnnConfig,
    gamma: f64,
    input_mode: InputMode,
    #[serde(default = "unit")]
    csi_scale: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct File {
    version: u32,
    config: MetaConfig,
    feature_design: FeatureDesign,
    task: Task,
    tensors: BTreeMap<String, (Vec<usize>, Vec<f64>)>,
}

impl Agent {
    /// Fresh networks; `gnn.node_dim` and `gnn.actions` are derived from the
    /// task and feature design.
    pub fn new(task: Task, features: FeatureConfig, mut gnn: GnnConfig) -> Result<Self> {
        features.validate()?;
        gnn.node_dim = feature_dim(features.design, task);
        gnn.actions = match task {
            Task::Ls => 3,
            Task::Pc => 7,
        };
        let policy = Mpgnn::new(gnn.clone(), Head::Policy, crate::derive_seed(gnn.seed, 0))?;
        let value = Mpgnn::new(gnn.clone(), Head::Value, crate::derive_seed(gnn.seed, 1))?;
        Ok(Self {
            task,
            features,
            policy,
            value,
        })
    }

    pub fn config(&self) -> &GnnConfig {
        self.policy.config()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut tensors = BTreeMap::new();
        for (prefix, net) in [("policy", &self.policy), ("value", &self.value)] {
            for t in net.tensors() {
                tensors.insert(
                    format!("{prefix}.{}", t.name),
                    (t.shape.clone(), t.data.clone()),
                );
            }
        }
        let file = File {
            version: CHECKPOINT_VERSION,
            config: MetaConfig {
                gnn: self.config().clone(),
                gamma: self.features.gamma,
                input_mode: self.features.input_mode,
                csi_scale: self.features.csi_scale,
            },
            feature_design: self.features.design,
            task: self.task,
            tensors,
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut file: File = serde_json::from_str(text)?;
        if file.version != CHECKPOINT_VERSION {
            return Err(LinqError::CheckpointMismatch(format!(
                "unsupported checkpoint version {}",
                file.version
            )));
        }
        let features = FeatureConfig {
            design: file.feature_design,
            gamma: file.config.gamma,
            input_mode: file.config.input_mode,
            csi_scale: file.config.csi_scale,
        };
        features
            .validate()
            .map_err(|e| LinqError::CheckpointMismatch(e.to_string()))?;
        let gnn = file.config.gnn;
        if gnn.node_dim != feature_dim(features.design, file.task) {
            return Err(LinqError::CheckpointMismatch(format!(
                "node_dim {} does not fit design {} for task {}",
                gnn.node_dim, features.design, file.task
            )));
        }
        let mut nets = Vec::new();
        for (prefix, head) in [("policy", Head::Policy), ("value", Head::Value)] {
            let mut net = Mpgnn::zeros(gnn.clone(), head)?;
            for t in net.tensors_mut() {
                let key = format!("{prefix}.{}", t.name);
                let (shape, data) = file.tensors.remove(&key).ok_or_else(|| {
                    LinqError::CheckpointMismatch(format!("missing tensor {key}"))
                })?;
                if shape != t.shape || data.len() != t.data.len() {
                    return Err(LinqError::CheckpointMismatch(format!(
                        "tensor {key}: expected shape {:?}, found {shape:?} with {} values",
                        t.shape,
                        data.len()
                    )));
                }
                if data.iter().any(|v| !v.is_finite()) {
                    return Err(LinqError::NonFinite("checkpoint tensor"));
                }
                t.data = data;
            }
            nets.push(net);
        }
        if let Some(k) = file.tensors.keys().next() {
            return Err(LinqError::CheckpointMismatch(format!(
                "unexpected tensor {k}"
            )));
        }
        let value = nets.pop().expect("two networks");
        let policy = nets.pop().expect("two networks");
        Ok(Self {
            task: file.task,
            features,
            policy,
            value,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| LinqError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| LinqError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Loads and checks that the checkpoint was trained for `task` with `design`.
    pub fn load_expecting(
        path: impl AsRef<Path>,
        task: Task,
        design: FeatureDesign,
    ) -> Result<Self> {
        let a = Self::load(path)?;
        a.expect(task, design)?;
        Ok(a)
    }

    pub fn expect(&self, task: Task, design: FeatureDesign) -> Result<()> {
        if self.task != task || self.features.design != design {
            return Err(LinqError::CheckpointMismatch(format!(
                "checkpoint is {}/{}, expected {task}/{design}",
                self.task, self.features.design
            )));
        }
        Ok(())
    }
}
