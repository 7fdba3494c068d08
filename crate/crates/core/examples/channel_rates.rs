//! Path loss, channel gains and the TIN sum rate of a few schedules.
//!
//! cargo run --example channel_rates

use linq::network::{build_channel, generate_layout, ChannelMode, SystemParams};
use linq::rates::{to_mbps, Activation, RateModel};

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let itu = params.path_loss_model();
    println!(
        "breakpoint {:.2} m, loss at breakpoint {:.2} dB",
        itu.r_bp, itu.l_bp
    );
    for d in [2.0, 10.0, 65.0, 200.0] {
        println!("  loss({d:>5} m) = {:.2} dB", itu.loss_db(d));
    }

    let layout = generate_layout(&params, 20, 3)?;
    let channel = build_channel(&layout, &params, ChannelMode::PathLossOnly, 0)?;
    let model = RateModel::full_power(&channel, &params)?;
    println!("link 0: SNR {:.1} dB", 10.0 * model.snr(0).log10());

    let half: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
    for (name, x) in [
        ("all on", Activation::ones(20)),
        ("every other", Activation::from_bools(&half)),
        (
            "single",
            Activation::from_bools(&[true].into_iter().chain([false; 19]).collect::<Vec<_>>()),
        ),
    ] {
        let w = model.weighted_sum_rate(&x);
        println!(
            "{name:<12} {w:>8.3} bit/s/Hz  {:>8.2} Mbps",
            to_mbps(w, params.bandwidth)
        );
    }

    let realistic = build_channel(&layout, &params, ChannelMode::Realistic, 11)?;
    let m2 = RateModel::full_power(&realistic, &params)?;
    println!(
        "realistic channel, all on: {:.3} bit/s/Hz",
        m2.weighted_sum_rate(&Activation::ones(20))
    );
    Ok(())
}
