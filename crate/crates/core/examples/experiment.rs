//! Run a batch experiment from a TOML spec. Defaults to a tiny inline spec;
//! pass a path (e.g. `experiments/power_sweep.toml`) to run a real one.
//!
//! cargo run --release --example experiment -- experiments/power_sweep.toml

use std::path::PathBuf;

use linq::bench::{run_experiment, ExperimentSpec};

const INLINE: &str = r#"
name = "inline"
seed = 11
count = 20

[[run]]
label = "n20"
n = 20
methods = ["greedy", "fplinq-pc", "wmmse"]

[[run]]
label = "n20-dense"
n = 20
methods = ["greedy", "fplinq-pc", "wmmse"]
[run.params]
area_side = 150.0
"#;

fn main() -> linq::Result<()> {
    let (spec, base) = match std::env::args().nth(1) {
        Some(p) => {
            let p = PathBuf::from(p);
            (
                ExperimentSpec::load(&p)?,
                p.parent().map(PathBuf::from).unwrap_or_default(),
            )
        }
        None => (ExperimentSpec::from_toml(INLINE)?, PathBuf::from(".")),
    };
    let out = std::env::temp_dir().join(format!("linq-experiment-{}", spec.name));
    for (label, reports) in run_experiment(&spec, &base, &out)? {
        for r in reports {
            println!("{label:<12} {:<10} {:.4}", r.method.name(), r.mean_ratio);
        }
    }
    println!("bundle in {}", out.display());
    Ok(())
}
