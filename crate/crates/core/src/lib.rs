//! Device-to-device spectrum sharing toolkit.
//!
//! The crate simulates D2D wireless layouts under a distance-driven path-loss
//! channel and solves the joint link scheduling / power control problem
//! (maximize the weighted sum of TIN rates) with two families of methods:
//!
//! * model-based baselines: FlashLinQ, ITLinQ, ITLinQ+, greedy, all-active,
//!   exhaustive enumeration ([`heuristics`]) and the iterative FPLinQ,
//!   FPLinQ-pc and WMMSE optimizers ([`optimizers`]);
//! * graph reinforcement learning agents (GRLinQ, GRLinQ-pc): a
//!   message-passing GNN ([`gnn`]) over the K-nearest interference graph
//!   ([`igraph`]) with distance-derived, TIN-inspired node features
//!   ([`features`]), trained with PPO on two MDPs ([`rlcore`]).
//!
//! [`bench`] glues everything into evaluation reports, experiment bundles and
//! the `linq` command line tool. See `examples/` for one runnable program per
//! capability.

pub mod bench;
pub mod error;
pub mod features;
pub mod gnn;
pub mod heuristics;
pub mod igraph;
pub mod network;
pub mod optimizers;
pub mod rates;
pub mod rlcore;

pub use error::{LinqError, Result};

/// Seeded generator used everywhere randomness is needed. ChaCha keeps
/// streams stable across platforms and crate versions.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a base seed and a stream index.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
