//! Build a policy/value pair, run a forward and backward pass, then save and
//! reload the versioned JSON checkpoint.
//!
//! cargo run --example gnn_checkpoint

use linq::features::{FeatureConfig, FeatureContext, LinkState, StateView, Task};
use linq::gnn::{Agent, GnnConfig, GraphInput};
use linq::igraph::build_k_nearest;
use linq::network::{generate_layout, SystemParams};

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let layout = generate_layout(&params, 25, 8)?;
    let graph = build_k_nearest(&layout, 10);
    let fc = FeatureConfig::default();
    let ctx = FeatureContext::from_layout(&layout, &graph, &fc);

    let mut gnn = GnnConfig::new(0, 0);
    gnn.hidden = 32;
    let agent = Agent::new(Task::Ls, fc, gnn)?;
    println!("policy parameters: {}", agent.policy.n_params());

    let nodes = ctx.node_features(StateView::Ls(&vec![LinkState::Pending; 25]), 0, 32);
    let x = GraphInput {
        graph: &graph,
        nodes: &nodes,
        edges: ctx.edge_features(),
    };
    let f = agent.policy.forward(&x)?;
    println!(
        "node 0 action probabilities {:?}, {} MACs",
        &f.output[..3],
        f.macs
    );
    let v = agent.value.forward(&x)?;
    println!("value estimate {:.4}", v.output[0]);

    // gradient of the log-probability of "active" at node 0
    let mut g = vec![0.0; f.logits.len()];
    for a in 0..3 {
        g[a] = if a == 0 { 1.0 } else { 0.0 } - f.output[a];
    }
    let grads = agent.policy.backward(&x, &f, &g)?;
    let norm: f64 = grads
        .iter()
        .flat_map(|t| &t.data)
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    println!("gradient norm {norm:.4}");

    let path = std::env::temp_dir().join("linq-example-agent.json");
    agent.save(&path)?;
    let back = Agent::load(&path)?;
    assert_eq!(back, agent);
    println!("checkpoint round-trip ok: {}", path.display());
    Ok(())
}
