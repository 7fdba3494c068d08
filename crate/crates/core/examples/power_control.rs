//! Continuous power control with FPLinQ-pc and WMMSE, including WMMSE's
//! per-iteration objective.
//!
//! cargo run --example power_control

use linq::network::{build_channel, generate_layout, ChannelMode, SystemParams};
use linq::optimizers::{fplinq, wmmse, FpConfig, FpMode, WmmseState};
use linq::rates::RateModel;

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let layout = generate_layout(&params, 50, 4)?;
    let channel = build_channel(&layout, &params, ChannelMode::PathLossOnly, 0)?;
    let m = RateModel::full_power(&channel, &params)?;

    let mut st = WmmseState::full_power(&m);
    for it in 0..=100 {
        if it % 20 == 0 {
            println!(
                "wmmse iter {it:>3}: {:.4} bit/s/Hz",
                m.weighted_sum_rate(&st.fractions(&m))
            );
        }
        st.step(&m)?;
    }

    let fp_sched = fplinq(&m, &FpConfig::default(), FpMode::Binary)?;
    let fp_pc = fplinq(&m, &FpConfig::default(), FpMode::Continuous)?;
    let w = wmmse(&m, 100)?;
    let base = m.weighted_sum_rate(&fp_sched);
    for (name, x) in [("fplinq", &fp_sched), ("fplinq-pc", &fp_pc), ("wmmse", &w)] {
        let r = m.weighted_sum_rate(x);
        let mean_p = x.iter().sum::<f64>() / x.len() as f64;
        println!(
            "{name:<10} {r:>8.3} bit/s/Hz  ratio {:.3}  mean power fraction {mean_p:.2}",
            r / base
        );
    }
    Ok(())
}
