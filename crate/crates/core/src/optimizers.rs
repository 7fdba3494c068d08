//! Iterative model-based optimizers: FPLinQ (quadratic transform) and WMMSE.
//!
//! Every inner sum runs in increasing index order so results are bitwise
//! reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{LinqError, Result};
use crate::network::Gains;
use crate::rates::{Activation, RateModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FpMode {
    /// Round the relaxed solution to a schedule.
    Binary,
    /// Keep x as transmit-power fractions.
    Continuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FpConfig {
    pub iters: usize,
    /// Binary mode activates link i iff x_i > threshold.
    pub threshold: f64,
}

impl Default for FpConfig {
    fn default() -> Self {
        // 0.25 on power is 0.5 on amplitude
        Self {
            iters: 100,
            threshold: 0.25,
        }
    }
}

/// Iterate of the quadratic-transform updates.
#[derive(Clone, Debug)]
pub struct FpState {
    pub x: Vec<f64>,
    pub gamma: Vec<f64>,
    pub y: Vec<f64>,
    pub iter: usize,
}

impl FpState {
    pub fn new(x0: Vec<f64>) -> Self {
        let n = x0.len();
        Self {
            x: x0,
            gamma: vec![0.0; n],
            y: vec![0.0; n],
            iter: 0,
        }
    }

    pub fn step<G: Gains + ?Sized>(&mut self, m: &RateModel<G>) -> Result<()> {
        let n = m.n();
        let sigma2 = m.noise_power();
        let w = m.weights();
        let interf = m.interference(&self.x);
        for i in 0..n {
            let s = m.signal(i) * self.x[i];
            let total = interf[i] + sigma2 + s;
            self.gamma[i] = s / (interf[i] + sigma2);
            self.y[i] = (w[i] * (1.0 + self.gamma[i]) * s).sqrt() / total;
        }
        for i in 0..n {
            let num = self.y[i] * (w[i] * (1.0 + self.gamma[i]) * m.signal(i)).sqrt();
            if num == 0.0 {
                self.x[i] = 0.0;
                continue;
            }
            let mut den = 0.0;
            for j in 0..n {
                if self.y[j] != 0.0 {
                    den += self.y[j] * self.y[j] * m.cross(i, j);
                }
            }
            let v = (num / den).powi(2);
            if !v.is_finite() {
                return Err(LinqError::NonFinite("fplinq update"));
            }
            self.x[i] = v.clamp(0.0, 1.0);
        }
        self.iter += 1;
        Ok(())
    }
}

/// FPLinQ from the all-ones start.
pub fn fplinq<G: Gains + ?Sized>(
    m: &RateModel<G>,
    cfg: &FpConfig,
    mode: FpMode,
) -> Result<Activation> {
    if cfg.iters == 0 {
        return Err(LinqError::InvalidParam(
            "fplinq needs at least one iteration".into(),
        ));
    }
    let mut st = FpState::new(vec![1.0; m.n()]);
    for _ in 0..cfg.iters {
        st.step(m)?;
    }
    match mode {
        FpMode::Continuous => Activation::new(st.x),
        FpMode::Binary => Ok(Activation::from_bools(
            &st.x.iter().map(|&v| v > cfg.threshold).collect::<Vec<_>>(),
        )),
    }
}

/// Block-coordinate iterate of scalar real WMMSE.
#[derive(Clone, Debug)]
pub struct WmmseState {
    /// Transmit amplitudes, 0 <= v_i <= sqrt(p_i).
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    /// MMSE weights, >= 1.
    pub mw: Vec<f64>,
    pub iter: usize,
}

impl WmmseState {
    pub fn full_power<G: Gains + ?Sized>(m: &RateModel<G>) -> Self {
        let n = m.n();
        Self {
            v: m.power().iter().map(|p| p.sqrt()).collect(),
            u: vec![0.0; n],
            mw: vec![1.0; n],
            iter: 0,
        }
    }

    pub fn step<G: Gains + ?Sized>(&mut self, m: &RateModel<G>) -> Result<()> {
        let n = m.n();
        let sigma2 = m.noise_power();
        let g = m.gains();
        let w = m.weights();
        for i in 0..n {
            let mut rx = sigma2;
            for j in 0..n {
                if self.v[j] != 0.0 {
                    rx += g.gain(j, i) * self.v[j] * self.v[j];
                }
            }
            let aii = g.gain(i, i).sqrt();
            self.u[i] = aii * self.v[i] / rx;
            self.mw[i] = 1.0 / (1.0 - self.u[i] * aii * self.v[i]);
        }
        for i in 0..n {
            let num = w[i] * self.mw[i] * self.u[i] * g.gain(i, i).sqrt();
            if num == 0.0 {
                self.v[i] = 0.0;
                continue;
            }
            let mut den = 0.0;
            for j in 0..n {
                if self.u[j] != 0.0 {
                    den += w[j] * self.mw[j] * self.u[j] * self.u[j] * g.gain(i, j);
                }
            }
            let v = num / den;
            if !v.is_finite() {
                return Err(LinqError::NonFinite("wmmse update"));
            }
            self.v[i] = v.clamp(0.0, m.power()[i].sqrt());
        }
        self.iter += 1;
        Ok(())
    }

    /// Power fractions v_i^2 / p_i.
    pub fn fractions<G: Gains + ?Sized>(&self, m: &RateModel<G>) -> Vec<f64> {
        self.v
            .iter()
            .zip(m.power())
            .map(|(v, p)| (v * v / p).clamp(0.0, 1.0))
            .collect()
    }
}

/// WMMSE from full power.
pub fn wmmse<G: Gains + ?Sized>(m: &RateModel<G>, iters: usize) -> Result<Activation> {
    if iters == 0 {
        return Err(LinqError::InvalidParam(
            "wmmse needs at least one iteration".into(),
        ));
    }
    let mut st = WmmseState::full_power(m);
    for _ in 0..iters {
        st.step(m)?;
    }
    Activation::new(st.fractions(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::exhaustive_optimum;
    use crate::network::{
        build_channel, generate_layout, ChannelMatrix, ChannelMode, SystemParams,
    };

    fn instance(n: usize, seed: u64) -> (ChannelMatrix, SystemParams) {
        let p = SystemParams::default();
        let l = generate_layout(&p, n, seed).unwrap();
        (
            build_channel(&l, &p, ChannelMode::PathLossOnly, 0).unwrap(),
            p,
        )
    }

    #[test]
    fn single_link_goes_full_power() {
        let (c, p) = instance(1, 3);
        let m = RateModel::full_power(&c, &p).unwrap();
        assert_eq!(
            &*fplinq(&m, &FpConfig::default(), FpMode::Binary).unwrap(),
            &[1.0]
        );
        assert_eq!(
            &*fplinq(&m, &FpConfig::default(), FpMode::Continuous).unwrap(),
            &[1.0]
        );
        let x = wmmse(&m, 100).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wmmse_is_monotone() {
        for seed in 0..10 {
            let (c, p) = instance(20, seed);
            let m = RateModel::full_power(&c, &p).unwrap();
            let mut st = WmmseState::full_power(&m);
            let mut prev = m.weighted_sum_rate(&st.fractions(&m));
            for _ in 0..100 {
                st.step(&m).unwrap();
                let cur = m.weighted_sum_rate(&st.fractions(&m));
                assert!(cur >= prev * (1.0 - 1e-9), "seed {seed}: {prev} -> {cur}");
                prev = cur;
            }
        }
    }

    #[test]
    fn outputs_stay_in_bounds() {
        let (c, p) = instance(30, 4);
        let m = RateModel::full_power(&c, &p).unwrap();
        let xc = fplinq(&m, &FpConfig::default(), FpMode::Continuous).unwrap();
        assert!(xc.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(fplinq(&m, &FpConfig::default(), FpMode::Binary)
            .unwrap()
            .is_binary());
        let xw = wmmse(&m, 100).unwrap();
        assert!(xw.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn fplinq_close_to_exhaustive_on_small_instances() {
        let mut ratio = 0.0;
        for seed in 0..20 {
            let (c, p) = instance(8, 100 + seed);
            let m = RateModel::full_power(&c, &p).unwrap();
            let x = fplinq(&m, &FpConfig::default(), FpMode::Binary).unwrap();
            let (_, best) = exhaustive_optimum(&m, 20).unwrap();
            ratio += m.weighted_sum_rate(&x) / best;
        }
        assert!(ratio / 20.0 >= 0.95, "{}", ratio / 20.0);
    }

    #[test]
    fn zero_iterations_rejected() {
        let (c, p) = instance(2, 0);
        let m = RateModel::full_power(&c, &p).unwrap();
        let cfg = FpConfig {
            iters: 0,
            ..Default::default()
        };
        assert!(fplinq(&m, &cfg, FpMode::Binary).is_err());
        assert!(wmmse(&m, 0).is_err());
    }
}
