//! GNN input features built from normalized distances (or normalized gains).
//!
//! Every formula is written in terms of a log-strength `l_ji`: `-ln d'_ji` in
//! distance mode, the offset z-scored dB gain in CSI mode. Node `i` only looks
//! at its in/out neighbors, so one pass over all nodes costs O(N K^2).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LinqError, Result};
use crate::igraph::InterferenceGraph;
use crate::network::{ChannelMatrix, NetworkLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureDesign {
    #[serde(rename = "pd")]
    PureData,
    #[serde(rename = "fl")]
    Flash,
    #[serde(rename = "it")]
    It,
    #[serde(rename = "it+")]
    ItPlus,
}

impl FeatureDesign {
    pub const ALL: [FeatureDesign; 4] = [Self::PureData, Self::Flash, Self::It, Self::ItPlus];

    pub fn name(self) -> &'static str {
        match self {
            Self::PureData => "pd",
            Self::Flash => "fl",
            Self::It => "it",
            Self::ItPlus => "it+",
        }
    }
}

impl fmt::Display for FeatureDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureDesign {
    type Err = LinqError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| LinqError::Unknown {
                kind: "feature design",
                value: s.to_string(),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "ls")]
    Ls,
    #[serde(rename = "pc")]
    Pc,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ls => "ls",
            Self::Pc => "pc",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = LinqError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ls" => Ok(Self::Ls),
            "pc" => Ok(Self::Pc),
            _ => Err(LinqError::Unknown {
                kind: "task",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputMode {
    Distance,
    Csi,
}

/// Scheduling state of one link during an episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkState {
    Active,
    Inactive,
    Pending,
}

impl LinkState {
    fn one_hot(self) -> [f64; 3] {
        match self {
            Self::Active => [1.0, 0.0, 0.0],
            Self::Inactive => [0.0, 1.0, 0.0],
            Self::Pending => [0.0, 0.0, 1.0],
        }
    }
}

/// Per-node state handed to the feature builder.
#[derive(Clone, Copy, Debug)]
pub enum StateView<'a> {
    Ls(&'a [LinkState]),
    Pc(&'a [f64]),
}

impl StateView<'_> {
    pub fn task(&self) -> Task {
        match self {
            Self::Ls(_) => Task::Ls,
            Self::Pc(_) => Task::Pc,
        }
    }

    fn len(&self) -> usize {
        match self {
            Self::Ls(s) => s.len(),
            Self::Pc(s) => s.len(),
        }
    }

    fn counts(&self, j: usize) -> bool {
        match self {
            Self::Ls(s) => s[j] != LinkState::Inactive,
            Self::Pc(s) => s[j] > 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub design: FeatureDesign,
    pub gamma: f64,
    pub input_mode: InputMode,
    /// Multiplier on the normalized CSI strengths; 1 keeps the plain z-score.
    #[serde(default = "unit")]
    pub csi_scale: f64,
}

fn unit() -> f64 {
    1.0
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            design: FeatureDesign::ItPlus,
            gamma: 0.1,
            input_mode: InputMode::Distance,
            csi_scale: 1.0,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(LinqError::InvalidParam(format!(
                "feature gamma {} outside [0, 1)",
                self.gamma
            )));
        }
        if !(self.csi_scale.is_finite() && self.csi_scale > 0.0) {
            return Err(LinqError::InvalidParam(format!(
                "csi scale {} must be positive",
                self.csi_scale
            )));
        }
        Ok(())
    }
}

/// Node feature width for a design and task.
pub fn feature_dim(design: FeatureDesign, task: Task) -> usize {
    let state = match task {
        Task::Ls => 3,
        Task::Pc => 1,
    };
    let terms = match design {
        FeatureDesign::PureData => 1,
        _ => 3,
    };
    state + 1 + terms
}

/// Full distance matrix divided by its maximum entry.
pub fn normalize_distances(layout: &NetworkLayout) -> Vec<f64> {
    let n = layout.n_links();
    let d: Vec<f64> = match layout.dist_matrix() {
        Some(d) => d.to_vec(),
        None => (0..n * n).map(|k| layout.distance(k / n, k % n)).collect(),
    };
    let m = d.iter().copied().fold(0.0, f64::max);
    d.into_iter().map(|v| v / m).collect()
}

/// Z-scored dB gain matrix shifted so that its minimum is 0.
///
/// A constant matrix maps to all zeros.
pub fn csi_features(channel: &ChannelMatrix) -> Vec<f64> {
    let db: Vec<f64> = channel
        .as_slice()
        .iter()
        .map(|g| 10.0 * g.log10())
        .collect();
    let n = db.len() as f64;
    let mean = db.iter().sum::<f64>() / n;
    let var = db.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var == 0.0 {
        return vec![0.0; db.len()];
    }
    let sd = var.sqrt();
    let z: Vec<f64> = db.iter().map(|v| (v - mean) / sd).collect();
    let lo = z.iter().copied().fold(f64::INFINITY, f64::min);
    z.into_iter().map(|v| v - lo).collect()
}

/// Per-layout constants needed to emit features at any MDP step.
#[derive(Clone, Debug)]
pub struct FeatureContext {
    n: usize,
    design: FeatureDesign,
    gamma: f64,
    /// Own-link term of the pure-data design: d'_ii, or the CSI strength.
    own_raw: Vec<f64>,
    /// l_ii.
    own: Vec<f64>,
    // candidate set of each node: union of in- and out-neighbors, ascending
    cand_off: Vec<usize>,
    cand: Vec<usize>,
    /// l_ji (interference from candidate j at i).
    cand_in: Vec<f64>,
    /// l_ij (interference from i at candidate j).
    cand_out: Vec<f64>,
    /// l_jj of each candidate.
    cand_own: Vec<f64>,
    // row-major c x c block per node: l_jk for candidates j, k
    pair_off: Vec<usize>,
    pair: Vec<f64>,
    edges: Vec<f64>,
}

impl FeatureContext {
    /// Distance mode: strengths are -ln(d / d_max).
    pub fn from_layout(
        layout: &NetworkLayout,
        graph: &InterferenceGraph,
        cfg: &FeatureConfig,
    ) -> Self {
        let dmax = layout.max_distance();
        let strength = |j: usize, i: usize| -(layout.distance(j, i) / dmax).ln();
        let own_raw = (0..layout.n_links())
            .map(|i| layout.link_length(i) / dmax)
            .collect();
        Self::build(graph, cfg, own_raw, strength)
    }

    /// CSI mode: strengths are the normalized dB gains times `csi_scale`.
    pub fn from_channel(
        channel: &ChannelMatrix,
        graph: &InterferenceGraph,
        cfg: &FeatureConfig,
    ) -> Self {
        let n = channel.n();
        let mut g = csi_features(channel);
        if cfg.csi_scale != 1.0 {
            g.iter_mut().for_each(|v| *v *= cfg.csi_scale);
        }
        let own_raw = (0..n).map(|i| g[i * n + i]).collect();
        Self::build(graph, cfg, own_raw, |j, i| g[j * n + i])
    }

    fn build(
        graph: &InterferenceGraph,
        cfg: &FeatureConfig,
        own_raw: Vec<f64>,
        strength: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let n = graph.n();
        let own: Vec<f64> = (0..n).map(|i| strength(i, i)).collect();
        let mut cand_off = vec![0];
        let mut cand = Vec::new();
        let mut pair_off = vec![0];
        let mut pair = Vec::new();
        let need_pairs = cfg.design == FeatureDesign::ItPlus;
        for i in 0..n {
            let mut c: Vec<usize> = graph
                .in_neighbors(i)
                .iter()
                .chain(graph.out_neighbors(i))
                .copied()
                .collect();
            c.sort_unstable();
            c.dedup();
            if need_pairs {
                for &j in &c {
                    for &k in &c {
                        pair.push(if j == k { 0.0 } else { strength(j, k) });
                    }
                }
            }
            pair_off.push(pair.len());
            cand.extend_from_slice(&c);
            cand_off.push(cand.len());
        }
        let cand_in = (0..n)
            .flat_map(|i| {
                cand[cand_off[i]..cand_off[i + 1]]
                    .iter()
                    .map(move |&j| (j, i))
            })
            .map(|(j, i)| strength(j, i))
            .collect();
        let cand_out = (0..n)
            .flat_map(|i| {
                cand[cand_off[i]..cand_off[i + 1]]
                    .iter()
                    .map(move |&j| (j, i))
            })
            .map(|(j, i)| strength(i, j))
            .collect();
        let cand_own = cand.iter().map(|&j| own[j]).collect();
        let edges = graph.edges().map(|(j, i)| strength(j, i)).collect();
        Self {
            n,
            design: cfg.design,
            gamma: cfg.gamma,
            own_raw,
            own,
            cand_off,
            cand,
            cand_in,
            cand_out,
            cand_own,
            pair_off,
            pair,
            edges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn design(&self) -> FeatureDesign {
        self.design
    }

    pub fn dim(&self, task: Task) -> usize {
        feature_dim(self.design, task)
    }

    /// Edge inputs in [`InterferenceGraph::edges`] order.
    pub fn edge_features(&self) -> &[f64] {
        &self.edges
    }

    /// Row-major N x dim node features at step `t` of `horizon`.
    pub fn node_features(&self, state: StateView<'_>, t: usize, horizon: usize) -> Vec<f64> {
        self.node_features_counted(state, t, horizon).0
    }

    /// As [`Self::node_features`], also returning the number of
    /// neighbor-term evaluations performed.
    pub fn node_features_counted(
        &self,
        state: StateView<'_>,
        t: usize,
        horizon: usize,
    ) -> (Vec<f64>, u64) {
        assert_eq!(state.len(), self.n, "state length");
        let task = state.task();
        let dim = self.dim(task);
        let tn = t as f64 / horizon as f64;
        let mut out = Vec::with_capacity(self.n * dim);
        let mut ops = 0u64;
        let mut sel: Vec<usize> = Vec::new();
        for i in 0..self.n {
            match state {
                StateView::Ls(s) => out.extend_from_slice(&s[i].one_hot()),
                StateView::Pc(s) => out.push(s[i]),
            }
            out.push(tn);
            if self.design == FeatureDesign::PureData {
                out.push(self.own_raw[i]);
                continue;
            }
            out.push(-self.own[i]);
            let (lo, hi) = (self.cand_off[i], self.cand_off[i + 1]);
            // positions within the candidate block that form S
            sel.clear();
            sel.extend(
                (lo..hi)
                    .filter(|&p| state.counts(self.cand[p]))
                    .map(|p| p - lo),
            );
            if sel.is_empty() {
                sel.extend(0..hi - lo);
            }
            if sel.is_empty() {
                out.extend_from_slice(&[0.0, 0.0]);
                continue;
            }
            let a = |p: usize| self.cand_in[lo + p];
            let b = |p: usize| self.cand_out[lo + p];
            match self.design {
                FeatureDesign::Flash => {
                    let mut worst = f64::INFINITY;
                    let mut top = f64::NEG_INFINITY;
                    for &p in &sel {
                        worst = worst.min(self.cand_own[lo + p] - b(p));
                        top = top.max(a(p));
                    }
                    let mut acc = 0.0;
                    for &p in &sel {
                        acc += (a(p) - top).exp();
                    }
                    ops += 2 * sel.len() as u64;
                    out.push(worst);
                    out.push(self.own[i] - (top + acc.ln()));
                }
                FeatureDesign::It => {
                    let (mut f1, mut f2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                    for &p in &sel {
                        f1 = f1.max(a(p));
                        f2 = f2.max(b(p));
                    }
                    ops += sel.len() as u64;
                    out.push(f1);
                    out.push(f2);
                }
                FeatureDesign::ItPlus => {
                    let c = hi - lo;
                    let block = &self.pair[self.pair_off[i]..self.pair_off[i + 1]];
                    let (mut f1, mut f2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                    for &p in &sel {
                        let (mut mo, mut mi) = (f64::INFINITY, f64::INFINITY);
                        for &q in &sel {
                            if q != p {
                                mo = mo.min(block[p * c + q]);
                                mi = mi.min(block[q * c + p]);
                            }
                        }
                        ops += sel.len() as u64;
                        let po = if mo.is_finite() { self.gamma * mo } else { 0.0 };
                        let pi = if mi.is_finite() { self.gamma * mi } else { 0.0 };
                        f1 = f1.max(a(p) - po);
                        f2 = f2.max(b(p) - pi);
                    }
                    out.push(f1);
                    out.push(f2);
                }
                FeatureDesign::PureData => unreachable!(),
            }
        }
        (out, ops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::igraph::build_k_nearest;
    use crate::network::{build_channel, generate_layout, ChannelMode, SystemParams};

    fn ctx(
        n: usize,
        k: usize,
        seed: u64,
        design: FeatureDesign,
        gamma: f64,
    ) -> (NetworkLayout, InterferenceGraph, FeatureContext) {
        let l = generate_layout(&SystemParams::default(), n, seed).unwrap();
        let g = build_k_nearest(&l, k);
        let cfg = FeatureConfig {
            design,
            gamma,
            input_mode: InputMode::Distance,
            ..Default::default()
        };
        let c = FeatureContext::from_layout(&l, &g, &cfg);
        (l, g, c)
    }

    #[test]
    fn dims() {
        assert_eq!(feature_dim(FeatureDesign::PureData, Task::Ls), 5);
        assert_eq!(feature_dim(FeatureDesign::ItPlus, Task::Ls), 7);
        assert_eq!(feature_dim(FeatureDesign::PureData, Task::Pc), 3);
        assert_eq!(feature_dim(FeatureDesign::Flash, Task::Pc), 5);
        assert_eq!(
            "it+".parse::<FeatureDesign>().unwrap(),
            FeatureDesign::ItPlus
        );
        assert!("xx".parse::<FeatureDesign>().is_err());
    }

    #[test]
    fn normalization_preserves_ratios() {
        let l = generate_layout(&SystemParams::default(), 9, 2).unwrap();
        let d = l.dist_matrix().unwrap();
        let dn = normalize_distances(&l);
        assert_eq!(dn.iter().copied().fold(0.0, f64::max), 1.0);
        for a in 0..81 {
            for b in [0usize, 17, 80] {
                assert!((dn[a] / dn[b] - d[a] / d[b]).abs() <= 1e-12 * (d[a] / d[b]));
            }
        }
        let same = NetworkLayout::new(vec![[0.0, 0.0]; 2], vec![[3.0, 4.0]; 2], 0, 10).unwrap();
        assert!(normalize_distances(&same).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn features_do_not_depend_on_the_dense_cap() {
        let dense = SystemParams::default();
        let sparse = SystemParams {
            dense_cap: 0,
            ..SystemParams::default()
        };
        for seed in 0..5 {
            let a = generate_layout(&dense, 40, seed).unwrap();
            let b = generate_layout(&sparse, 40, seed).unwrap();
            assert!(b.dist_matrix().is_none());
            let cfg = FeatureConfig::default();
            let ga = build_k_nearest(&a, 6);
            let ca = FeatureContext::from_layout(&a, &ga, &cfg);
            let cb = FeatureContext::from_layout(&b, &build_k_nearest(&b, 6), &cfg);
            assert_eq!(ca.edge_features(), cb.edge_features());
            let st = vec![LinkState::Pending; 40];
            assert_eq!(
                ca.node_features(StateView::Ls(&st), 1, 32),
                cb.node_features(StateView::Ls(&st), 1, 32)
            );
        }
    }

    #[test]
    fn pure_data_initial_row() {
        let (l, g, c) = ctx(6, 3, 1, FeatureDesign::PureData, 0.1);
        let st = vec![LinkState::Pending; 6];
        let f = c.node_features(StateView::Ls(&st), 0, 32);
        let _ = g;
        let dmax = l.dist_matrix().unwrap().iter().copied().fold(0.0, f64::max);
        assert_eq!(dmax, l.max_distance());
        for i in 0..6 {
            assert_eq!(&f[i * 5..i * 5 + 4], &[0.0, 0.0, 1.0, 0.0]);
            assert_eq!(f[i * 5 + 4], l.link_length(i) / dmax);
        }
    }

    #[test]
    fn edge_feature_values() {
        let (l, g, c) = ctx(12, 4, 3, FeatureDesign::It, 0.1);
        let dn = normalize_distances(&l);
        for ((j, i), e) in g.edges().zip(c.edge_features()) {
            assert!((e - (1.0 / dn[j * 12 + i]).ln()).abs() < 1e-12);
        }
        // monotone: nearer interferer, larger feature
        for i in 0..12 {
            let nb = g.in_neighbors(i);
            let off = g.in_offset(i);
            for w in 0..nb.len() - 1 {
                assert!(c.edge_features()[off + w] >= c.edge_features()[off + w + 1]);
            }
        }
    }

    #[test]
    fn it_plus_with_zero_gamma_matches_it() {
        for seed in 0..10 {
            let (_, _, a) = ctx(30, 5, seed, FeatureDesign::ItPlus, 0.0);
            let (_, _, b) = ctx(30, 5, seed, FeatureDesign::It, 0.1);
            let st: Vec<f64> = (0..30).map(|i| (i % 3) as f64 * 0.3).collect();
            let fa = a.node_features(StateView::Pc(&st), 5, 32);
            let fb = b.node_features(StateView::Pc(&st), 5, 32);
            assert_eq!(fa, fb);
        }
    }

    #[test]
    fn flash_hand_instance() {
        let tx = vec![[0.0, 0.0], [10.0, 0.0], [0.0, 20.0]];
        let rx = vec![[3.0, 0.0], [10.0, 5.0], [4.0, 20.0]];
        let l = NetworkLayout::new(tx, rx, 0, 10).unwrap();
        let g = build_k_nearest(&l, 2);
        let cfg = FeatureConfig {
            design: FeatureDesign::Flash,
            ..Default::default()
        };
        let c = FeatureContext::from_layout(&l, &g, &cfg);
        let st = [LinkState::Pending, LinkState::Active, LinkState::Inactive];
        let f = c.node_features(StateView::Ls(&st), 8, 32);
        let dn = normalize_distances(&l);
        let d = |j: usize, i: usize| dn[j * 3 + i];
        // node 0: S = {1} (node 2 is inactive)
        let row = &f[0..7];
        assert_eq!(&row[..4], &[0.0, 0.0, 1.0, 0.25]);
        assert!((row[4] - d(0, 0).ln()).abs() < 1e-12);
        assert!((row[5] - (d(0, 1).ln() - d(1, 1).ln())).abs() < 1e-12);
        assert!((row[6] - ((1.0 / d(0, 0)).ln() - (1.0 / d(1, 0)).ln())).abs() < 1e-12);
        // node 1: S = {0}
        let row = &f[7..14];
        let s: f64 = 1.0 / d(0, 1);
        assert!((row[6] - ((1.0 / d(1, 1)).ln() - s.ln())).abs() < 1e-12);
        // node 2: everyone else counts
        let row = &f[14..21];
        let s: f64 = 1.0 / d(0, 2) + 1.0 / d(1, 2);
        assert!((row[6] - ((1.0 / d(2, 2)).ln() - s.ln())).abs() < 1e-12);
        let m = (d(2, 0).ln() - d(0, 0).ln()).min(d(2, 1).ln() - d(1, 1).ln());
        assert!((row[5] - m).abs() < 1e-12);
    }

    #[test]
    fn inactive_neighborhood_falls_back_to_all() {
        let (_, _, c) = ctx(10, 3, 4, FeatureDesign::It, 0.1);
        let all_off = vec![LinkState::Inactive; 10];
        let all_on = vec![LinkState::Pending; 10];
        let a = c.node_features(StateView::Ls(&all_off), 0, 32);
        let b = c.node_features(StateView::Ls(&all_on), 0, 32);
        for i in 0..10 {
            assert_eq!(a[i * 7 + 5..i * 7 + 7], b[i * 7 + 5..i * 7 + 7]);
        }
    }

    #[test]
    fn csi_normalization() {
        let p = SystemParams::default();
        let l = generate_layout(&p, 8, 1).unwrap();
        let ch = build_channel(&l, &p, ChannelMode::Realistic, 3).unwrap();
        let z = csi_features(&ch);
        assert_eq!(z.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let sd = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!((sd - 1.0).abs() < 1e-9);
        // shift equals minus the smallest z-score
        let db: Vec<f64> = ch.as_slice().iter().map(|g| 10.0 * g.log10()).collect();
        let m0 = db.iter().sum::<f64>() / n;
        let s0 = (db.iter().map(|v| (v - m0).powi(2)).sum::<f64>() / n).sqrt();
        let zmin = db
            .iter()
            .map(|v| (v - m0) / s0)
            .fold(f64::INFINITY, f64::min);
        assert!((mean + zmin).abs() < 1e-9);

        let flat =
            ChannelMatrix::from_gains(2, vec![1e-9; 4], 1.0, ChannelMode::Realistic, None).unwrap();
        assert_eq!(csi_features(&flat), vec![0.0; 4]);
    }

    #[test]
    fn csi_scale_multiplies_strengths() {
        let p = SystemParams::default();
        let l = generate_layout(&p, 12, 2).unwrap();
        let ch = build_channel(&l, &p, ChannelMode::Realistic, 5).unwrap();
        let g = crate::igraph::build_k_strongest(&ch, 4);
        let base = FeatureConfig {
            design: FeatureDesign::It,
            input_mode: InputMode::Csi,
            ..Default::default()
        };
        let half = FeatureConfig {
            csi_scale: 0.5,
            ..base.clone()
        };
        let a = FeatureContext::from_channel(&ch, &g, &base);
        let b = FeatureContext::from_channel(&ch, &g, &half);
        for (x, y) in a.edge_features().iter().zip(b.edge_features()) {
            assert_eq!(x * 0.5, *y);
        }
        for bad in [0.0, -1.0, f64::NAN] {
            let c = FeatureConfig {
                csi_scale: bad,
                ..base.clone()
            };
            assert!(c.validate().is_err());
        }
        let g1 = FeatureConfig {
            gamma: 1.0,
            ..base
        };
        assert!(g1.validate().is_err());
    }

    #[test]
    fn op_count_is_linear_in_n() {
        let mut per_node = Vec::new();
        for n in [200usize, 800, 3200] {
            let p = SystemParams {
                area_side: 500.0 * (n as f64 / 50.0).sqrt(),
                ..SystemParams::default()
            };
            let l = generate_layout(&p, n, 9).unwrap();
            let g = build_k_nearest(&l, 10);
            let c = FeatureContext::from_layout(&l, &g, &FeatureConfig::default());
            let st = vec![LinkState::Pending; n];
            let (_, ops) = c.node_features_counted(StateView::Ls(&st), 0, 32);
            per_node.push(ops as f64 / n as f64);
        }
        let (lo, hi) = per_node
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo < 1.3, "{per_node:?}");
    }
}
