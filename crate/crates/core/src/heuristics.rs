//! Sequential-selection schedulers, greedy, all-on, and brute force.

use serde::{Deserialize, Serialize};

use crate::error::{LinqError, Result};
use crate::network::Gains;
use crate::rates::{Activation, RateModel};

/// Largest N accepted by [`exhaustive_optimum`] by default.
pub const EXHAUSTIVE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicParams {
    /// FlashLinQ SIR threshold, linear.
    pub theta: f64,
    /// ITLinQ M, linear.
    pub m_lin: f64,
    pub eta: f64,
    pub eta_plus: f64,
    pub gamma: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self {
            theta: 10f64.powf(2.4),
            m_lin: 10f64.powf(2.5),
            eta: 0.7,
            eta_plus: 0.7,
            gamma: 0.1,
        }
    }
}

impl HeuristicParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.theta > 0.0
            && self.m_lin > 0.0
            && self.eta > 0.0
            && self.eta <= 1.0
            && self.eta_plus > 0.0
            && self.eta_plus <= 1.0
            && (0.0..1.0).contains(&self.gamma);
        if ok {
            Ok(())
        } else {
            Err(LinqError::InvalidParam(format!(
                "heuristic parameters out of range: {self:?}"
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    Flash,
    It,
    ItPlus,
}

/// Candidate `i` neither suffers nor causes SIR below theta against `s`.
pub fn flash_check<G: Gains + ?Sized>(
    m: &RateModel<G>,
    p: &HeuristicParams,
    i: usize,
    s: &[usize],
) -> bool {
    if s.is_empty() {
        return true;
    }
    let mut interf = 0.0;
    for &j in s {
        if m.sir(i, j) < p.theta {
            return false;
        }
        interf += m.cross(j, i);
    }
    m.signal(i) / interf >= p.theta
}

pub fn itlinq_check<G: Gains + ?Sized>(
    m: &RateModel<G>,
    p: &HeuristicParams,
    i: usize,
    s: &[usize],
) -> bool {
    let lhs = p.m_lin * m.snr(i).powf(p.eta);
    s.iter().all(|&j| lhs >= m.inr(j, i) && lhs >= m.inr(i, j))
}

/// Direct evaluation; an inner minimum over an empty set counts as 1.
pub fn itlinq_plus_check<G: Gains + ?Sized>(
    m: &RateModel<G>,
    p: &HeuristicParams,
    i: usize,
    s: &[usize],
) -> bool {
    let lhs = m.snr(i).powf(p.eta_plus);
    s.iter().all(|&j| {
        let min_out = s
            .iter()
            .filter(|&&k| k != j)
            .map(|&k| m.inr(j, k))
            .fold(f64::INFINITY, f64::min);
        let min_in = s
            .iter()
            .filter(|&&k| k != j)
            .map(|&k| m.inr(k, j))
            .fold(f64::INFINITY, f64::min);
        let a = if min_out.is_finite() { min_out } else { 1.0 };
        let b = if min_in.is_finite() { min_in } else { 1.0 };
        lhs >= m.inr(j, i) / a.powf(p.gamma) && lhs >= m.inr(i, j) / b.powf(p.gamma)
    })
}

/// Running minima for ITLinQ+, so each check costs O(|S|).
struct PlusState {
    members: Vec<usize>,
    // min over other members k of INR_{jk}, INR_{kj}
    min_out: Vec<f64>,
    min_in: Vec<f64>,
}

impl PlusState {
    fn check<G: Gains + ?Sized>(&self, m: &RateModel<G>, p: &HeuristicParams, i: usize) -> bool {
        let lhs = m.snr(i).powf(p.eta_plus);
        self.members.iter().enumerate().all(|(t, &j)| {
            let a = if self.min_out[t].is_finite() {
                self.min_out[t]
            } else {
                1.0
            };
            let b = if self.min_in[t].is_finite() {
                self.min_in[t]
            } else {
                1.0
            };
            lhs >= m.inr(j, i) / a.powf(p.gamma) && lhs >= m.inr(i, j) / b.powf(p.gamma)
        })
    }

    fn insert<G: Gains + ?Sized>(&mut self, m: &RateModel<G>, i: usize) {
        let (mut out_i, mut in_i) = (f64::INFINITY, f64::INFINITY);
        for (t, &j) in self.members.iter().enumerate() {
            self.min_out[t] = self.min_out[t].min(m.inr(j, i));
            self.min_in[t] = self.min_in[t].min(m.inr(i, j));
            out_i = out_i.min(m.inr(i, j));
            in_i = in_i.min(m.inr(j, i));
        }
        self.members.push(i);
        self.min_out.push(out_i);
        self.min_in.push(in_i);
    }
}

/// Visits `order` once, admitting each link whose criterion holds against the
/// links admitted so far.
pub fn sequential_select<G: Gains + ?Sized>(
    m: &RateModel<G>,
    p: &HeuristicParams,
    criterion: Criterion,
    order: &[usize],
) -> Activation {
    let mut on = vec![false; m.n()];
    let mut plus = PlusState {
        members: Vec::new(),
        min_out: Vec::new(),
        min_in: Vec::new(),
    };
    let mut s = Vec::new();
    for &i in order {
        let pass = match criterion {
            Criterion::Flash => flash_check(m, p, i, &s),
            Criterion::It => itlinq_check(m, p, i, &s),
            Criterion::ItPlus => plus.check(m, p, i),
        };
        if pass {
            s.push(i);
            if criterion == Criterion::ItPlus {
                plus.insert(m, i);
            }
            on[i] = true;
        }
    }
    Activation::from_bools(&on)
}

/// Activates links in `order`, keeping each only if the objective strictly grows.
pub fn greedy_schedule<G: Gains + ?Sized>(m: &RateModel<G>, order: &[usize]) -> Activation {
    let n = m.n();
    let sigma2 = m.noise_power();
    let mut on = vec![false; n];
    let mut active: Vec<usize> = Vec::new();
    let mut interf = vec![0.0; n];
    let mut current = 0.0;
    let rate = |i: usize, interference: f64| {
        (m.signal(i) / (interference + sigma2)).ln_1p() / std::f64::consts::LN_2
    };
    for &i in order {
        let mut trial = m.weights()[i] * rate(i, interf[i]);
        for &k in &active {
            trial += m.weights()[k] * rate(k, interf[k] + m.cross(i, k));
        }
        if trial > current {
            current = trial;
            for (k, v) in interf.iter_mut().enumerate() {
                if k != i {
                    *v += m.cross(i, k);
                }
            }
            active.push(i);
            on[i] = true;
        }
    }
    Activation::from_bools(&on)
}

pub fn all_scheduled(n: usize) -> Activation {
    Activation::ones(n)
}

/// Best binary schedule by enumeration; ties resolve to the lexicographically
/// smallest vector.
pub fn exhaustive_optimum<G: Gains + ?Sized>(
    m: &RateModel<G>,
    cap: usize,
) -> Result<(Activation, f64)> {
    let n = m.n();
    if n > cap {
        return Err(LinqError::SizeCap {
            what: "exhaustive search",
            n,
            cap,
        });
    }
    let mut best_mask = 0u64;
    let mut best = 0.0;
    let mut x = vec![0.0; n];
    // x_0 is the most significant bit, so counting up is lexicographic order
    for mask in 1u64..(1u64 << n) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = ((mask >> (n - 1 - i)) & 1) as f64;
        }
        let w = m.weighted_sum_rate(&x);
        if w > best {
            best = w;
            best_mask = mask;
        }
    }
    let bits: Vec<bool> = (0..n)
        .map(|i| (best_mask >> (n - 1 - i)) & 1 == 1)
        .collect();
    Ok((Activation::from_bools(&bits), best))
}
