#![allow(dead_code)]

use linq::features::LinkState;
use linq::gnn::GraphInput;
use linq::igraph::{EdgeKey, InterferenceGraph};
use linq::network::{ChannelMatrix, Gains};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weighted TIN sum rate computed straight from the gain array.
pub fn tin_sum_rate(c: &ChannelMatrix, power: f64, w: &[f64], x: &[f64]) -> f64 {
    let n = c.n();
    let g = c.as_slice();
    let noise = c.noise_power();
    let mut total = 0.0;
    for i in 0..n {
        if x[i] == 0.0 {
            continue;
        }
        let mut interf = noise;
        for j in 0..n {
            if j != i {
                interf += x[j] * power * g[j * n + i];
            }
        }
        total += w[i] * (1.0 + x[i] * power * g[i * n + i] / interf).log2();
    }
    total
}

/// Best binary schedule by enumerating all 2^n subsets.
pub fn brute_force(c: &ChannelMatrix, power: f64, w: &[f64]) -> (Vec<f64>, f64) {
    let n = c.n();
    assert!(n <= 16);
    let mut best = (vec![0.0; n], 0.0);
    for mask in 0u32..(1 << n) {
        let x: Vec<f64> = (0..n).map(|i| f64::from((mask >> i) & 1)).collect();
        let v = tin_sum_rate(c, power, w, &x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random graph with features: each node gets 1..=k distinct in-neighbors.
pub struct RandomGraph {
    pub graph: InterferenceGraph,
    pub lists: Vec<Vec<usize>>,
    pub nodes: Vec<f64>,
    pub edges: Vec<f64>,
    pub dim: usize,
}

impl RandomGraph {
    pub fn new(n: usize, k: usize, dim: usize, seed: u64) -> Self {
        let mut r = rng(seed);
        let mut lists = Vec::with_capacity(n);
        for i in 0..n {
            let mut pool: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let deg = r.random_range(1..=k.min(n - 1));
            let mut l = Vec::with_capacity(deg);
            for _ in 0..deg {
                let at = r.random_range(0..pool.len());
                l.push(pool.swap_remove(at));
            }
            lists.push(l);
        }
        let graph = InterferenceGraph::from_in_neighbors(lists.clone(), EdgeKey::Distance);
        let nodes = (0..n * dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let edges = (0..graph.n_edges())
            .map(|_| r.random_range(0.0..2.0))
            .collect();
        Self {
            graph,
            lists,
            nodes,
            edges,
            dim,
        }
    }

    pub fn input(&self) -> GraphInput<'_> {
        GraphInput {
            graph: &self.graph,
            nodes: &self.nodes,
            edges: &self.edges,
        }
    }

    /// Relabels node i as perm[i]; neighbor order inside each list is kept.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.lists.len();
        let mut lists = vec![Vec::new(); n];
        let mut edge_of = vec![Vec::new(); n];
        let mut off = 0;
        for (i, l) in self.lists.iter().enumerate() {
            lists[perm[i]] = l.iter().map(|&j| perm[j]).collect();
            edge_of[perm[i]] = self.edges[off..off + l.len()].to_vec();
            off += l.len();
        }
        let mut nodes = vec![0.0; self.nodes.len()];
        for i in 0..n {
            nodes[perm[i] * self.dim..(perm[i] + 1) * self.dim]
                .copy_from_slice(&self.nodes[i * self.dim..(i + 1) * self.dim]);
        }
        Self {
            graph: InterferenceGraph::from_in_neighbors(lists.clone(), EdgeKey::Distance),
            lists,
            nodes,
            edges: edge_of.concat(),
            dim: self.dim,
        }
    }
}

pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut r = rng(seed);
    for i in (1..n).rev() {
        p.swap(i, r.random_range(0..=i));
    }
    p
}

pub fn is_decided(s: LinkState) -> bool {
    s != LinkState::Pending
}
