//! Message-passing GNN used for both the policy and the value network.
//!
//! Layer l:
//!   e_ji <- f_e(e_ji)                     (identity in trivial mode)
//!   a_i  <- (1/|N(i)|) sum over j in N(i) of e_ji * v_j
//!   v_i  <- ReLU(W2 ReLU(W1 [v_i | a_i] + b1) + b2)
//! The policy head maps each v_i to action logits and a softmax; the value
//! head sum-pools the node vectors and applies a two-layer MLP.

mod checkpoint;
pub mod kernels;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{LinqError, Result};
use crate::igraph::InterferenceGraph;
use kernels::{
    linear, linear_backward, order_free_column_sum, relu_backward, relu_in_place, softmax_rows,
};

pub use checkpoint::{Agent, CHECKPOINT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeUpdate {
    Trivial,
    Mlp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnnConfig {
    pub layers: usize,
    pub hidden: usize,
    pub edge_update: EdgeUpdate,
    /// Actions per node: 3 for scheduling, 7 for power control.
    pub actions: usize,
    pub node_dim: usize,
    pub seed: u64,
}

impl GnnConfig {
    pub fn new(node_dim: usize, actions: usize) -> Self {
        Self {
            layers: 4,
            hidden: 128,
            edge_update: EdgeUpdate::Trivial,
            actions,
            node_dim,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.hidden == 0 || self.node_dim == 0 {
            return Err(LinqError::InvalidParam(
                "layers, hidden and node_dim must be positive".into(),
            ));
        }
        if self.actions != 3 && self.actions != 7 {
            return Err(LinqError::InvalidParam(format!(
                "action arity must be 3 or 7, got {}",
                self.actions
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Head {
    Policy,
    Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(name: impl Into<String>, shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            name: name.into(),
            shape,
            data: vec![0.0; len],
        }
    }
}

/// A graph plus its input features.
#[derive(Clone, Copy, Debug)]
pub struct GraphInput<'a> {
    pub graph: &'a InterferenceGraph,
    /// Row-major N x node_dim.
    pub nodes: &'a [f64],
    /// One scalar per edge, in [`InterferenceGraph::edges`] order.
    pub edges: &'a [f64],
}

struct LayerCache {
    v_in: Vec<f64>,
    e_in: Vec<f64>,
    e_hidden: Vec<f64>,
    e: Vec<f64>,
    z: Vec<f64>,
    h1: Vec<f64>,
    v_out: Vec<f64>,
}

/// Forward outputs plus everything backward needs.
pub struct Forward {
    /// Policy: row-major N x A probabilities. Value: a single scalar.
    pub output: Vec<f64>,
    /// Policy logits (empty for the value head).
    pub logits: Vec<f64>,
    /// Multiply-adds performed by message passing and node updates.
    pub macs: u64,
    layers: Vec<LayerCache>,
    pooled: Vec<f64>,
    readout_hidden: Vec<f64>,
}

impl Forward {
    /// Which ReLU units were active. Finite differences are only meaningful
    /// when this pattern is unchanged by the perturbation.
    pub fn relu_pattern(&self) -> Vec<bool> {
        let mut p = Vec::new();
        for c in &self.layers {
            for v in c.e_hidden.iter().chain(&c.h1).chain(&c.v_out) {
                p.push(*v > 0.0);
            }
        }
        p.extend(self.readout_hidden.iter().map(|v| *v > 0.0));
        p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mpgnn {
    config: GnnConfig,
    head: Head,
    tensors: Vec<Tensor>,
}

// tensor slots inside one layer
const N_W1: usize = 0;
const N_B1: usize = 1;
const N_W2: usize = 2;
const N_B2: usize = 3;
const E_W1: usize = 4;
const E_B1: usize = 5;
const E_W2: usize = 6;
const E_B2: usize = 7;

impl Mpgnn {
    /// Glorot-uniform weights, zero biases.
    pub fn new(config: GnnConfig, head: Head, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut net = Self::zeros(config, head)?;
        let mut rng = crate::seeded_rng(seed);
        for t in &mut net.tensors {
            if t.shape.len() == 2 {
                let a = (6.0 / (t.shape[0] + t.shape[1]) as f64).sqrt();
                for v in &mut t.data {
                    *v = rng.random_range(-a..a);
                }
            }
        }
        Ok(net)
    }

    pub fn zeros(config: GnnConfig, head: Head) -> Result<Self> {
        config.validate()?;
        let h = config.hidden;
        let mut tensors = Vec::new();
        for l in 0..config.layers {
            let d = if l == 0 { config.node_dim } else { h };
            tensors.push(Tensor::zeros(format!("n{l}.w1"), vec![2 * d, h]));
            tensors.push(Tensor::zeros(format!("n{l}.b1"), vec![h]));
            tensors.push(Tensor::zeros(format!("n{l}.w2"), vec![h, h]));
            tensors.push(Tensor::zeros(format!("n{l}.b2"), vec![h]));
            if config.edge_update == EdgeUpdate::Mlp {
                tensors.push(Tensor::zeros(format!("e{l}.w1"), vec![1, h]));
                tensors.push(Tensor::zeros(format!("e{l}.b1"), vec![h]));
                tensors.push(Tensor::zeros(format!("e{l}.w2"), vec![h, 1]));
                tensors.push(Tensor::zeros(format!("e{l}.b2"), vec![1]));
            }
        }
        match head {
            Head::Policy => {
                tensors.push(Tensor::zeros("head.w", vec![h, config.actions]));
                tensors.push(Tensor::zeros("head.b", vec![config.actions]));
            }
            Head::Value => {
                tensors.push(Tensor::zeros("readout.w1", vec![h, h]));
                tensors.push(Tensor::zeros("readout.b1", vec![h]));
                tensors.push(Tensor::zeros("readout.w2", vec![h, 1]));
                tensors.push(Tensor::zeros("readout.b2", vec![1]));
            }
        }
        Ok(Self {
            config,
            head,
            tensors,
        })
    }

    pub fn config(&self) -> &GnnConfig {
        &self.config
    }

    pub fn head(&self) -> Head {
        self.head
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    /// Zero tensors shaped like the parameters.
    pub fn zero_grads(&self) -> Vec<Tensor> {
        self.tensors
            .iter()
            .map(|t| Tensor::zeros(t.name.clone(), t.shape.clone()))
            .collect()
    }

    pub fn n_params(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    fn stride(&self) -> usize {
        match self.config.edge_update {
            EdgeUpdate::Trivial => 4,
            EdgeUpdate::Mlp => 8,
        }
    }

    fn p(&self, layer: usize, slot: usize) -> &[f64] {
        &self.tensors[layer * self.stride() + slot].data
    }

    fn head_base(&self) -> usize {
        self.config.layers * self.stride()
    }

    fn check(&self, x: &GraphInput<'_>) -> Result<usize> {
        let n = x.graph.n();
        if x.nodes.len() != n * self.config.node_dim {
            return Err(LinqError::Shape(format!(
                "expected {n} x {} node features, got {} values",
                self.config.node_dim,
                x.nodes.len()
            )));
        }
        if x.edges.len() != x.graph.n_edges() {
            return Err(LinqError::Shape(format!(
                "graph has {} edges but {} edge features were given",
                x.graph.n_edges(),
                x.edges.len()
            )));
        }
        Ok(n)
    }

    pub fn forward(&self, x: &GraphInput<'_>) -> Result<Forward> {
        let n = self.check(x)?;
        let h = self.config.hidden;
        let g = x.graph;
        let mut macs = 0u64;
        let mut v = x.nodes.to_vec();
        let mut e = x.edges.to_vec();
        let mut caches = Vec::with_capacity(self.config.layers);
        for l in 0..self.config.layers {
            let d = if l == 0 { self.config.node_dim } else { h };
            let e_in = e.clone();
            let mut e_hidden = Vec::new();
            if self.config.edge_update == EdgeUpdate::Mlp {
                linear(
                    &e_in,
                    e_in.len(),
                    1,
                    self.p(l, E_W1),
                    self.p(l, E_B1),
                    &mut e_hidden,
                );
                relu_in_place(&mut e_hidden);
                linear(
                    &e_hidden,
                    e_in.len(),
                    h,
                    self.p(l, E_W2),
                    self.p(l, E_B2),
                    &mut e,
                );
            }
            // z = [v_i | a_i]
            let mut z = vec![0.0; n * 2 * d];
            for i in 0..n {
                z[i * 2 * d..i * 2 * d + d].copy_from_slice(&v[i * d..(i + 1) * d]);
                let off = g.in_offset(i);
                let (_, agg) = z[i * 2 * d..(i + 1) * 2 * d].split_at_mut(d);
                let nb = g.in_neighbors(i);
                let s = 1.0 / nb.len().max(1) as f64;
                for (k, &j) in nb.iter().enumerate() {
                    let w = s * e[off + k];
                    for (a, vj) in agg.iter_mut().zip(&v[j * d..(j + 1) * d]) {
                        *a += w * vj;
                    }
                }
            }
            macs += (g.n_edges() * d) as u64;
            let mut h1 = Vec::new();
            macs += linear(&z, n, 2 * d, self.p(l, N_W1), self.p(l, N_B1), &mut h1);
            relu_in_place(&mut h1);
            let mut v_out = Vec::new();
            macs += linear(&h1, n, h, self.p(l, N_W2), self.p(l, N_B2), &mut v_out);
            relu_in_place(&mut v_out);
            let v_in = std::mem::replace(&mut v, v_out.clone());
            caches.push(LayerCache {
                v_in,
                e_in,
                e_hidden,
                e: e.clone(),
                z,
                h1,
                v_out,
            });
        }
        let base = self.head_base();
        let t = &self.tensors;
        match self.head {
            Head::Policy => {
                let mut logits = Vec::new();
                linear(&v, n, h, &t[base].data, &t[base + 1].data, &mut logits);
                let output = softmax_rows(&logits, self.config.actions);
                Ok(Forward {
                    output,
                    logits,
                    macs,
                    layers: caches,
                    pooled: Vec::new(),
                    readout_hidden: Vec::new(),
                })
            }
            Head::Value => {
                let pooled = order_free_column_sum(&v, n, h);
                let mut r = Vec::new();
                linear(&pooled, 1, h, &t[base].data, &t[base + 1].data, &mut r);
                relu_in_place(&mut r);
                let mut out = Vec::new();
                linear(&r, 1, h, &t[base + 2].data, &t[base + 3].data, &mut out);
                Ok(Forward {
                    output: out,
                    logits: Vec::new(),
                    macs,
                    layers: caches,
                    pooled,
                    readout_hidden: r,
                })
            }
        }
    }

    /// Gradients of a scalar loss given its gradient at the head output:
    /// N x A logit gradients for the policy, one scalar for the value.
    pub fn backward(
        &self,
        x: &GraphInput<'_>,
        fwd: &Forward,
        grad_out: &[f64],
    ) -> Result<Vec<Tensor>> {
        let mut grads = self.zero_grads();
        self.backward_into(x, fwd, grad_out, &mut grads)?;
        Ok(grads)
    }

    /// As [`Self::backward`], accumulating into existing gradient tensors.
    pub fn backward_into(
        &self,
        x: &GraphInput<'_>,
        fwd: &Forward,
        grad_out: &[f64],
        grads: &mut [Tensor],
    ) -> Result<()> {
        let n = self.check(x)?;
        let h = self.config.hidden;
        let g = x.graph;
        let base = self.head_base();
        let last = &fwd.layers[self.config.layers - 1].v_out;
        let mut dv = Vec::new();
        match self.head {
            Head::Policy => {
                if grad_out.len() != n * self.config.actions {
                    return Err(LinqError::Shape(
                        "policy output gradient must be N x A".into(),
                    ));
                }
                let (gw, rest) = grads[base..].split_at_mut(1);
                linear_backward(
                    last,
                    n,
                    h,
                    &self.tensors[base].data,
                    grad_out,
                    &mut gw[0].data,
                    &mut rest[0].data,
                    Some(&mut dv),
                );
            }
            Head::Value => {
                if grad_out.len() != 1 {
                    return Err(LinqError::Shape(
                        "value output gradient must be a scalar".into(),
                    ));
                }
                let mut dr = Vec::new();
                {
                    let (a, b) = grads[base + 2..].split_at_mut(1);
                    linear_backward(
                        &fwd.readout_hidden,
                        1,
                        h,
                        &self.tensors[base + 2].data,
                        grad_out,
                        &mut a[0].data,
                        &mut b[0].data,
                        Some(&mut dr),
                    );
                }
                relu_backward(&fwd.readout_hidden, &mut dr);
                let mut dpool = Vec::new();
                {
                    let (a, b) = grads[base..].split_at_mut(1);
                    linear_backward(
                        &fwd.pooled,
                        1,
                        h,
                        &self.tensors[base].data,
                        &dr,
                        &mut a[0].data,
                        &mut b[0].data,
                        Some(&mut dpool),
                    );
                }
                dv = dpool.repeat(n);
            }
        }
        let stride = self.stride();
        let mut de_next: Option<Vec<f64>> = None;
        for l in (0..self.config.layers).rev() {
            let c = &fwd.layers[l];
            let d = if l == 0 { self.config.node_dim } else { h };
            let gl = &mut grads[l * stride..(l + 1) * stride];
            relu_backward(&c.v_out, &mut dv);
            let mut dh1 = Vec::new();
            {
                let (a, b) = gl[N_W2..].split_at_mut(1);
                linear_backward(
                    &c.h1,
                    n,
                    h,
                    self.p(l, N_W2),
                    &dv,
                    &mut a[0].data,
                    &mut b[0].data,
                    Some(&mut dh1),
                );
            }
            relu_backward(&c.h1, &mut dh1);
            let mut dz = Vec::new();
            {
                let (a, b) = gl[N_W1..].split_at_mut(1);
                linear_backward(
                    &c.z,
                    n,
                    2 * d,
                    self.p(l, N_W1),
                    &dh1,
                    &mut a[0].data,
                    &mut b[0].data,
                    Some(&mut dz),
                );
            }
            let mut dv_in = vec![0.0; n * d];
            let mut de = de_next.take().unwrap_or_else(|| vec![0.0; c.e.len()]);
            for i in 0..n {
                let row = &dz[i * 2 * d..(i + 1) * 2 * d];
                for (a, b) in dv_in[i * d..(i + 1) * d].iter_mut().zip(&row[..d]) {
                    *a += b;
                }
            }
            for i in 0..n {
                let da = &dz[i * 2 * d + d..(i + 1) * 2 * d];
                let off = g.in_offset(i);
                let nb = g.in_neighbors(i);
                let s = 1.0 / nb.len().max(1) as f64;
                for (k, &j) in nb.iter().enumerate() {
                    let w = s * c.e[off + k];
                    let vj = &c.v_in[j * d..(j + 1) * d];
                    let mut dot = 0.0;
                    for ((dvj, &a), &vv) in dv_in[j * d..(j + 1) * d].iter_mut().zip(da).zip(vj) {
                        *dvj += w * a;
                        dot += a * vv;
                    }
                    de[off + k] += s * dot;
                }
            }
            if self.config.edge_update == EdgeUpdate::Mlp {
                let m = c.e_in.len();
                let mut deh = Vec::new();
                {
                    let (a, b) = gl[E_W2..].split_at_mut(1);
                    linear_backward(
                        &c.e_hidden,
                        m,
                        h,
                        self.p(l, E_W2),
                        &de,
                        &mut a[0].data,
                        &mut b[0].data,
                        Some(&mut deh),
                    );
                }
                relu_backward(&c.e_hidden, &mut deh);
                let mut de_in = Vec::new();
                {
                    let (a, b) = gl[E_W1..].split_at_mut(1);
                    linear_backward(
                        &c.e_in,
                        m,
                        1,
                        self.p(l, E_W1),
                        &deh,
                        &mut a[0].data,
                        &mut b[0].data,
                        Some(&mut de_in),
                    );
                }
                de = de_in;
            }
            de_next = Some(de);
            dv = dv_in;
        }
        Ok(())
    }
}

/// Gradient of the mean softmax cross-entropy over rows w.r.t. the logits.
pub fn cross_entropy_grad(probs: &[f64], actions: usize, targets: &[usize]) -> Vec<f64> {
    let rows = targets.len();
    let mut g = probs.to_vec();
    for (r, &t) in targets.iter().enumerate() {
        g[r * actions + t] -= 1.0;
    }
    for v in &mut g {
        *v /= rows as f64;
    }
    g
}
