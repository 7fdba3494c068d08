//! K-nearest interference graphs.
//!
//! Node `i` receives an edge from each of the K transmitters that interfere
//! most with its receiver: the nearest ones in distance mode, the strongest
//! ones when the channel is known.

use serde::{Deserialize, Serialize};

use crate::network::{Gains, NetworkLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKey {
    Distance,
    Gain,
}

/// Directed graph in compressed adjacency form.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceGraph {
    n: usize,
    k: usize,
    edge_key: EdgeKey,
    in_offsets: Vec<usize>,
    in_adj: Vec<usize>,
    out_offsets: Vec<usize>,
    out_adj: Vec<usize>,
}

impl InterferenceGraph {
    /// Builds a graph from explicit in-neighbor lists (nearest-first order).
    pub fn from_in_neighbors(lists: Vec<Vec<usize>>, edge_key: EdgeKey) -> Self {
        let n = lists.len();
        let k = lists.iter().map(Vec::len).max().unwrap_or(0);
        let mut in_offsets = Vec::with_capacity(n + 1);
        let mut in_adj = Vec::new();
        in_offsets.push(0);
        for l in &lists {
            debug_assert!(l.iter().all(|&j| j < n));
            in_adj.extend_from_slice(l);
            in_offsets.push(in_adj.len());
        }
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, l) in lists.iter().enumerate() {
            for &j in l {
                out[j].push(i);
            }
        }
        let mut out_offsets = Vec::with_capacity(n + 1);
        let mut out_adj = Vec::with_capacity(in_adj.len());
        out_offsets.push(0);
        for l in &out {
            out_adj.extend_from_slice(l);
            out_offsets.push(out_adj.len());
        }
        Self {
            n,
            k,
            edge_key,
            in_offsets,
            in_adj,
            out_offsets,
            out_adj,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Requested in-degree after clamping to N - 1.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_key(&self) -> EdgeKey {
        self.edge_key
    }

    /// N(i), strongest interferer first.
    #[inline]
    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_adj[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    /// Receivers `i` with `j` in N(i), ascending.
    #[inline]
    pub fn out_neighbors(&self, j: usize) -> &[usize] {
        &self.out_adj[self.out_offsets[j]..self.out_offsets[j + 1]]
    }

    pub fn n_edges(&self) -> usize {
        self.in_adj.len()
    }

    /// Edges as (source j, target i) pairs grouped by target, in adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.in_neighbors(i).iter().map(move |&j| (j, i)))
    }

    /// Offset of the first edge into node `i` within [`Self::edges`] order.
    #[inline]
    pub fn in_offset(&self, i: usize) -> usize {
        self.in_offsets[i]
    }
}

/// K-nearest graph keyed by Tx-Rx distance. Ties go to the lower index.
pub fn build_k_nearest(layout: &NetworkLayout, k: usize) -> InterferenceGraph {
    let n = layout.n_links();
    let k = k.min(n.saturating_sub(1));
    let grid = TxGrid::new(layout);
    let lists = (0..n).map(|i| grid.nearest(layout, i, k)).collect();
    InterferenceGraph::from_in_neighbors(lists, EdgeKey::Distance)
}

/// K-nearest graph keyed by channel gain (CSI mode). Ties go to the lower index.
pub fn build_k_strongest<G: Gains + ?Sized>(channel: &G, k: usize) -> InterferenceGraph {
    let n = channel.n_links();
    let k = k.min(n.saturating_sub(1));
    let lists = (0..n)
        .map(|i| {
            let mut c: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (channel.gain(j, i), j))
                .collect();
            c.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            c.truncate(k);
            c.into_iter().map(|(_, j)| j).collect()
        })
        .collect();
    InterferenceGraph::from_in_neighbors(lists, EdgeKey::Gain)
}

/// Uniform bucket grid over transmitter positions.
struct TxGrid {
    origin: [f64; 2],
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<usize>>,
}

impl TxGrid {
    fn new(layout: &NetworkLayout) -> Self {
        let tx = layout.tx();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in tx {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        // about two transmitters per cell
        let per_side = ((tx.len() as f64 / 2.0).sqrt().ceil() as usize).max(1);
        let cell = span / per_side as f64;
        let cols = per_side + 1;
        let rows = per_side + 1;
        let mut buckets = vec![Vec::new(); cols * rows];
        let mut g = Self {
            origin: lo,
            cell,
            cols,
            rows,
            buckets: Vec::new(),
        };
        for (j, p) in tx.iter().enumerate() {
            let (c, r) = g.cell_of(*p);
            buckets[r * cols + c].push(j);
        }
        g.buckets = buckets;
        g
    }

    fn cell_of(&self, p: [f64; 2]) -> (usize, usize) {
        let f = |v: f64, o: f64, max: usize| {
            (((v - o) / self.cell).floor().max(0.0) as usize).min(max - 1)
        };
        (
            f(p[0], self.origin[0], self.cols),
            f(p[1], self.origin[1], self.rows),
        )
    }

    fn nearest(&self, layout: &NetworkLayout, i: usize, k: usize) -> Vec<usize> {
        if k == 0 {
            return Vec::new();
        }
        let rx = layout.rx()[i];
        // Receivers may sit outside the transmitter bounding box; clamp the home cell.
        let (cx, cy) = self.cell_of(rx);
        let mut cand: Vec<(f64, usize)> = Vec::new();
        let max_ring = self.cols.max(self.rows);
        // distance from rx to the home cell's box, to keep the stop rule valid when clamped
        let home_lo = [
            self.origin[0] + cx as f64 * self.cell,
            self.origin[1] + cy as f64 * self.cell,
        ];
        let outside = [
            (home_lo[0] - rx[0])
                .max(rx[0] - (home_lo[0] + self.cell))
                .max(0.0),
            (home_lo[1] - rx[1])
                .max(rx[1] - (home_lo[1] + self.cell))
                .max(0.0),
        ];
        let offset = outside[0].max(outside[1]);
        for r in 0..=max_ring {
            let (x0, x1) = (cx as isize - r as isize, cx as isize + r as isize);
            let (y0, y1) = (cy as isize - r as isize, cy as isize + r as isize);
            for y in y0..=y1 {
                if y < 0 || y as usize >= self.rows {
                    continue;
                }
                let on_edge_row = y == y0 || y == y1;
                let step = if on_edge_row {
                    1
                } else {
                    (x1 - x0).max(1) as usize
                };
                let mut x = x0;
                while x <= x1 {
                    if x >= 0 && (x as usize) < self.cols {
                        for &j in &self.buckets[y as usize * self.cols + x as usize] {
                            if j != i {
                                cand.push((layout.distance(j, i), j));
                            }
                        }
                    }
                    x += step as isize;
                }
            }
            if cand.len() >= k {
                cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                cand.truncate(k);
                // anything not yet scanned is at least this far away
                let reach = r as f64 * self.cell - offset;
                if cand[k - 1].0 < reach {
                    break;
                }
            }
        }
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        cand.truncate(k);
        cand.into_iter().map(|(_, j)| j).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_channel, generate_layout, ChannelMode, SystemParams};

    fn brute(layout: &NetworkLayout, k: usize) -> Vec<Vec<usize>> {
        let n = layout.n_links();
        (0..n)
            .map(|i| {
                let mut c: Vec<(f64, usize)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (layout.distance(j, i), j))
                    .collect();
                c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                c.into_iter().take(k).map(|(_, j)| j).collect()
            })
            .collect()
    }

    #[test]
    fn k_equal_n_minus_one_is_complete() {
        let l = generate_layout(&SystemParams::default(), 5, 4).unwrap();
        let g = build_k_nearest(&l, 4);
        for i in 0..5 {
            let mut nb = g.in_neighbors(i).to_vec();
            assert_eq!(nb.len(), 4);
            nb.sort();
            let want: Vec<usize> = (0..5).filter(|&j| j != i).collect();
            assert_eq!(nb, want);
        }
        assert_eq!(g.n_edges(), 20);
        // oversized k clamps
        assert_eq!(build_k_nearest(&l, 99), g);
    }

    #[test]
    fn collinear_nearest_interferer() {
        let tx = vec![[0.0, 0.0], [10.0, 0.0], [100.0, 0.0]];
        let rx = vec![[1.0, 0.0], [12.0, 0.0], [104.0, 0.0]];
        let l = NetworkLayout::new(tx, rx, 0, 100).unwrap();
        let g = build_k_nearest(&l, 1);
        assert_eq!(g.in_neighbors(0), &[1]);
        assert_eq!(g.in_neighbors(1), &[0]);
        assert_eq!(g.in_neighbors(2), &[1]);
        assert_eq!(g.out_neighbors(1), &[0, 2]);
    }

    #[test]
    fn matches_full_sort_oracle() {
        let p = SystemParams::default();
        for seed in 0..30 {
            for &(n, k) in &[(5, 2), (40, 10), (120, 7)] {
                let l = generate_layout(&p, n, seed).unwrap();
                let g = build_k_nearest(&l, k);
                let want = brute(&l, k);
                for i in 0..n {
                    assert_eq!(
                        g.in_neighbors(i),
                        &want[i][..],
                        "seed {seed} n {n} node {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn sparse_layout_matches_oracle() {
        let p = SystemParams {
            area_side: 3000.0,
            dense_cap: 10,
            ..SystemParams::default()
        };
        let l = generate_layout(&p, 400, 5).unwrap();
        assert!(l.dist_matrix().is_none());
        let g = build_k_nearest(&l, 10);
        let want = brute(&l, 10);
        for i in 0..400 {
            assert_eq!(g.in_neighbors(i), &want[i][..]);
        }
    }

    #[test]
    fn distance_and_path_loss_gain_graphs_agree() {
        let p = SystemParams::default();
        let l = generate_layout(&p, 30, 11).unwrap();
        let c = build_channel(&l, &p, ChannelMode::PathLossOnly, 0).unwrap();
        let a = build_k_nearest(&l, 6);
        let b = build_k_strongest(&c, 6);
        for i in 0..30 {
            assert_eq!(a.in_neighbors(i), b.in_neighbors(i));
        }
        assert_eq!(b.edge_key(), EdgeKey::Gain);
    }

    #[test]
    fn single_node_has_no_edges() {
        let l = generate_layout(&SystemParams::default(), 1, 0).unwrap();
        let g = build_k_nearest(&l, 10);
        assert!(g.in_neighbors(0).is_empty());
        assert_eq!(g.k(), 0);
    }
}
