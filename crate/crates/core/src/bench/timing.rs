//! Wall-clock inference probes over growing network sizes.

use std::time::Instant;

use serde::Serialize;

use super::{EvalOptions, Method, Prepared};
use crate::error::{LinqError, Result};
use crate::features::InputMode;
use crate::network::{generate_layout, LayoutRecord, SystemParams};
use crate::rlcore::{infer_power, infer_schedule, Instance};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingPoint {
    pub n: usize,
    /// Median over the timed repeats, seconds.
    pub seconds: f64,
    pub repeats: Vec<f64>,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Times one inference per size after a warm-up run.
///
/// Learned methods time graph construction, feature preparation and the
/// rollout on a coordinates-only layout; they never build an N x N matrix,
/// so they also run above the dense cap. Model-based methods time channel
/// construction plus the solver.
pub fn timing_probe(
    method: Method,
    sizes: &[usize],
    params: &SystemParams,
    opts: &EvalOptions,
    repeats: usize,
    seed: u64,
) -> Result<Vec<TimingPoint>> {
    if repeats == 0 {
        return Err(LinqError::InvalidParam(
            "at least one timed repeat is needed".into(),
        ));
    }
    opts.check(&[method])?;
    let mut out = Vec::with_capacity(sizes.len());
    let learned = matches!(method, Method::GrLinq | Method::GrLinqPc);
    let coords_only = SystemParams {
        dense_cap: 0,
        ..params.clone()
    };
    for &n in sizes {
        let lp = if learned { &coords_only } else { params };
        let layout = generate_layout(lp, n, crate::derive_seed(seed, n as u64))?;
        let once = || -> Result<f64> {
            let t = Instant::now();
            match method {
                Method::GrLinq | Method::GrLinqPc => {
                    let agent = if method == Method::GrLinq {
                        &opts.ls_agent
                    } else {
                        &opts.pc_agent
                    };
                    let agent = agent.as_ref().ok_or_else(|| {
                        LinqError::Missing(format!("{method} needs a checkpoint"))
                    })?;
                    if agent.features.input_mode == InputMode::Csi {
                        return Err(LinqError::InvalidParam(
                            "timing probes use distance-input agents".into(),
                        ));
                    }
                    let inst =
                        Instance::new(layout.clone(), params, opts.k, &agent.features, false)?;
                    let r = if method == Method::GrLinq {
                        infer_schedule(agent, &inst, &opts.mdp)?
                    } else {
                        infer_power(agent, &inst, None, &opts.mdp)?
                    };
                    std::hint::black_box(r);
                }
                _ => {
                    let rec = LayoutRecord::path_loss(layout.clone());
                    let p = Prepared::new(&rec, 0, params, opts, &[method])?;
                    std::hint::black_box(p.solve(method, opts)?);
                }
            }
            Ok(t.elapsed().as_secs_f64())
        };
        once()?;
        let runs = (0..repeats).map(|_| once()).collect::<Result<Vec<_>>>()?;
        out.push(TimingPoint {
            n,
            seconds: median(&runs),
            repeats: runs,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn probe_reports_each_size() {
        let p = SystemParams::default();
        let r = timing_probe(Method::Greedy, &[10, 20], &p, &EvalOptions::default(), 2, 1).unwrap();
        assert_eq!(r.iter().map(|t| t.n).collect::<Vec<_>>(), vec![10, 20]);
        assert!(r.iter().all(|t| t.seconds >= 0.0 && t.repeats.len() == 2));
        assert!(timing_probe(Method::GrLinq, &[10], &p, &EvalOptions::default(), 1, 1).is_err());
    }
}
