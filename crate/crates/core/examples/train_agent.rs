//! Train a small GRLinQ scheduling agent with PPO and compare its greedy
//! schedules with the baselines on held-out layouts.
//!
//! cargo run --release --example train_agent

use linq::features::{FeatureConfig, Task};
use linq::heuristics::{all_scheduled, greedy_schedule};
use linq::network::{generate_layouts, SystemParams};
use linq::optimizers::{fplinq, FpConfig, FpMode};
use linq::rlcore::{infer_schedule, train_with, Instance, TrainConfig};

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let fc = FeatureConfig::default();
    let build = |count, seed| -> linq::Result<Vec<Instance>> {
        generate_layouts(&params, 10, count, seed)?
            .into_iter()
            .map(|l| Instance::new(l, &params, 10, &fc, true))
            .collect()
    };
    let train = build(50, 100)?;
    let test = build(100, 999)?;

    let mut cfg = TrainConfig::new(Task::Ls, fc.clone());
    cfg.gnn.hidden = 32;
    cfg.ppo.updates = 300;
    cfg.ppo.episodes_per_update = 32;
    cfg.ppo.ent_coef = 0.05;
    cfg.ppo.seed = 2;
    cfg.gnn.seed = 2;
    let (agent, log) = train_with(&train, &cfg, None, |r| {
        if r.update % 50 == 0 {
            println!(
                "update {:>3}  mean return {:.3}  entropy {:.3}",
                r.update, r.mean_return, r.entropy
            );
        }
    })?;
    println!(
        "final mean return {:.3}",
        log.last().map_or(f64::NAN, |r| r.mean_return)
    );

    let (mut rl, mut gr, mut fp) = (0.0, 0.0, 0.0);
    for inst in &test {
        let m = inst.model().expect("test instances carry a channel")?;
        let all = m.weighted_sum_rate(&all_scheduled(inst.n()));
        rl += m.weighted_sum_rate(&infer_schedule(&agent, inst, &cfg.mdp)?.x) / all;
        gr += m.weighted_sum_rate(&greedy_schedule(&m, &inst.layout.order_by_length())) / all;
        fp += m.weighted_sum_rate(&fplinq(&m, &FpConfig::default(), FpMode::Binary)?) / all;
    }
    let k = test.len() as f64;
    println!(
        "sum rate vs all-scheduled: grlinq {:.3}  greedy {:.3}  fplinq {:.3}",
        rl / k,
        gr / k,
        fp / k
    );
    Ok(())
}
