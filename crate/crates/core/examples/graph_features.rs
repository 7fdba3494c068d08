//! K-nearest interference graph and the node/edge features fed to the GNN
//! for each feature design.
//!
//! cargo run --example graph_features

use linq::features::{
    feature_dim, FeatureConfig, FeatureContext, FeatureDesign, LinkState, StateView, Task,
};
use linq::igraph::build_k_nearest;
use linq::network::{generate_layout, SystemParams};

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let layout = generate_layout(&params, 30, 5)?;
    let graph = build_k_nearest(&layout, 10);
    println!("{} nodes, {} directed edges", graph.n(), graph.n_edges());
    println!("node 0 hears from {:?}", graph.in_neighbors(0));

    let mut state = vec![LinkState::Pending; 30];
    state[3] = LinkState::Active;
    state[7] = LinkState::Inactive;
    for design in FeatureDesign::ALL {
        let cfg = FeatureConfig {
            design,
            ..Default::default()
        };
        let ctx = FeatureContext::from_layout(&layout, &graph, &cfg);
        let d = feature_dim(design, Task::Ls);
        let x = ctx.node_features(StateView::Ls(&state), 4, 32);
        let row: Vec<String> = x[..d].iter().map(|v| format!("{v:.3}")).collect();
        println!("{:<3} dim {d}  node 0: [{}]", design.name(), row.join(", "));
    }
    Ok(())
}
