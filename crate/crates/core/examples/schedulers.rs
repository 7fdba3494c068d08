//! Model-based link scheduling: FlashLinQ, ITLinQ, ITLinQ+, greedy, FPLinQ
//! and brute force on one small network.
//!
//! cargo run --example schedulers

use linq::heuristics::{
    all_scheduled, exhaustive_optimum, greedy_schedule, sequential_select, Criterion,
    HeuristicParams,
};
use linq::network::{build_channel, generate_layout, ChannelMode, SystemParams};
use linq::optimizers::{fplinq, FpConfig, FpMode};
use linq::rates::RateModel;

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let layout = generate_layout(&params, 14, 21)?;
    let channel = build_channel(&layout, &params, ChannelMode::PathLossOnly, 0)?;
    let m = RateModel::full_power(&channel, &params)?;
    let order = layout.order_by_length();
    let hp = HeuristicParams::default();

    let (best, opt) = exhaustive_optimum(&m, 20)?;
    let runs = [
        ("all", all_scheduled(14)),
        (
            "flashlinq",
            sequential_select(&m, &hp, Criterion::Flash, &order),
        ),
        ("itlinq", sequential_select(&m, &hp, Criterion::It, &order)),
        (
            "itlinq+",
            sequential_select(&m, &hp, Criterion::ItPlus, &order),
        ),
        ("greedy", greedy_schedule(&m, &order)),
        ("fplinq", fplinq(&m, &FpConfig::default(), FpMode::Binary)?),
        ("exhaustive", best),
    ];
    for (name, x) in runs {
        let w = m.weighted_sum_rate(&x);
        println!(
            "{name:<11} active {:>2}/14  {w:>7.3} bit/s/Hz  {:>5.1}% of optimum",
            x.active_count(),
            100.0 * w / opt
        );
    }
    Ok(())
}
