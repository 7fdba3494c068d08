//! Evaluate several methods against FPLinQ and write a report directory
//! (summary, per-layout rates, CDF points, metadata).
//!
//! cargo run --release --example evaluate

use linq::bench::{evaluate, write_report, EvalOptions, Method};
use linq::network::{generate_layouts, LayoutRecord, SystemParams};

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let records: Vec<LayoutRecord> = generate_layouts(&params, 50, 40, 7)?
        .into_iter()
        .map(LayoutRecord::path_loss)
        .collect();
    let methods = Method::parse_list("all,flash,itlinq,itlinq+,greedy,fplinq,fplinq-pc,wmmse")?;
    let reports = evaluate(&methods, &records, &params, &EvalOptions::default())?;
    for r in &reports {
        let median = r.cdf.iter().find(|p| p.1 >= 0.5).map_or(f64::NAN, |p| p.0);
        println!(
            "{:<10} mean ratio {:.3}  median {:.3}  {:.1} Mbps",
            r.method.name(),
            r.mean_ratio,
            median,
            r.mbps(params.bandwidth)
        );
    }
    let out = std::env::temp_dir().join("linq-eval-example");
    write_report(&out, &reports, &records, &params, Method::FpLinq)?;
    println!("report in {}", out.display());
    Ok(())
}
