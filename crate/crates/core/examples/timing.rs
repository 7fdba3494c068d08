//! Inference wall time versus network size for a learned policy and FPLinQ.
//!
//! cargo run --release --example timing

use linq::bench::{timing_probe, EvalOptions, Method};
use linq::features::{FeatureConfig, Task};
use linq::gnn::{Agent, GnnConfig};
use linq::network::SystemParams;

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let mut gnn = GnnConfig::new(0, 0);
    gnn.hidden = 32;
    let opts = EvalOptions {
        ls_agent: Some(Agent::new(Task::Ls, FeatureConfig::default(), gnn)?),
        ..EvalOptions::default()
    };
    for method in [Method::GrLinq, Method::FpLinq] {
        let pts = timing_probe(method, &[100, 300, 1000], &params, &opts, 3, 1)?;
        for p in &pts {
            println!("{:<7} n {:>5}  {:.4} s", method.name(), p.n, p.seconds);
        }
        println!(
            "{:<7} t(1000)/t(100) = {:.1}",
            method.name(),
            pts[2].seconds / pts[0].seconds
        );
    }
    Ok(())
}
