//! TIN rates and the weighted sum-rate objective.

use std::ops::Deref;

use crate::error::{LinqError, Result};
use crate::network::{Gains, SystemParams};

/// Per-link activation (binary schedule) or power fraction, each in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct Activation(Vec<f64>);

impl Activation {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(LinqError::InvalidParam(
                "activation entries must lie in [0, 1]".into(),
            ));
        }
        Ok(Self(x))
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_bools(b: &[bool]) -> Self {
        Self(b.iter().map(|&on| if on { 1.0 } else { 0.0 }).collect())
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    pub fn active_count(&self) -> usize {
        self.0.iter().filter(|&&v| v > 0.0).count()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Activation {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Objective of the scheduling / power control problem on one channel.
pub struct RateModel<'a, G: Gains + ?Sized> {
    gains: &'a G,
    power: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a, G: Gains + ?Sized> RateModel<'a, G> {
    pub fn new(gains: &'a G, power: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let n = gains.n_links();
        if power.len() != n || weights.len() != n {
            return Err(LinqError::Shape(format!(
                "{n} links but {} powers and {} weights",
                power.len(),
                weights.len()
            )));
        }
        if power.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(LinqError::InvalidParam(
                "transmit powers must be positive".into(),
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(LinqError::InvalidParam(
                "link weights must be positive".into(),
            ));
        }
        Ok(Self {
            gains,
            power,
            weights,
        })
    }

    /// Every transmitter at `p_max`, weights from `params`.
    pub fn full_power(gains: &'a G, params: &SystemParams) -> Result<Self> {
        let n = gains.n_links();
        Self::new(
            gains,
            vec![params.tx_power_watts(); n],
            params.weights_for(n)?,
        )
    }

    pub fn n(&self) -> usize {
        self.power.len()
    }

    pub fn gains(&self) -> &'a G {
        self.gains
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn noise_power(&self) -> f64 {
        self.gains.noise_power()
    }

    /// Received signal power G[i][i] p_i at full activation.
    #[inline]
    pub fn signal(&self, i: usize) -> f64 {
        self.gains.gain(i, i) * self.power[i]
    }

    /// Received interference power G[j][i] p_j at full activation.
    #[inline]
    pub fn cross(&self, j: usize, i: usize) -> f64 {
        self.gains.gain(j, i) * self.power[j]
    }

    pub fn snr(&self, i: usize) -> f64 {
        self.signal(i) / self.noise_power()
    }

    pub fn inr(&self, j: usize, i: usize) -> f64 {
        self.cross(j, i) / self.noise_power()
    }

    pub fn sir(&self, j: usize, i: usize) -> f64 {
        self.signal(i) / self.cross(j, i)
    }

    /// Interference at each receiver, sum over j != i of G[j][i] p_j x_j.
    ///
    /// Summation runs in increasing j for every receiver.
    pub fn interference(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        debug_assert_eq!(x.len(), n);
        let mut acc = vec![0.0; n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let pj = self.power[j] * xj;
            for (i, a) in acc.iter_mut().enumerate() {
                if i != j {
                    *a += self.gains.gain(j, i) * pj;
                }
            }
        }
        acc
    }

    fn rate_given(&self, i: usize, x: &[f64], interference: f64) -> f64 {
        if x[i] == 0.0 {
            return 0.0;
        }
        (self.signal(i) * x[i] / (interference + self.noise_power())).ln_1p()
            / std::f64::consts::LN_2
    }

    /// Spectral efficiency of link `i`, bit/s/Hz.
    pub fn link_rate(&self, i: usize, x: &[f64]) -> f64 {
        let n = self.n();
        let mut interf = 0.0;
        for j in 0..n {
            if j != i && x[j] != 0.0 {
                interf += self.gains.gain(j, i) * self.power[j] * x[j];
            }
        }
        self.rate_given(i, x, interf)
    }

    pub fn link_rates(&self, x: &[f64]) -> Vec<f64> {
        let interf = self.interference(x);
        (0..self.n())
            .map(|i| self.rate_given(i, x, interf[i]))
            .collect()
    }

    /// Sum of w_i R_i(x), bit/s/Hz.
    pub fn weighted_sum_rate(&self, x: &[f64]) -> f64 {
        self.link_rates(x)
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * r)
            .sum()
    }
}

/// Converts a spectral efficiency to Mbps over `bandwidth` Hz.
pub fn to_mbps(bits_per_hz: f64, bandwidth: f64) -> f64 {
    bits_per_hz * bandwidth / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ChannelMatrix, ChannelMode};
    use approx::assert_relative_eq;

    fn chan(n: usize, g: Vec<f64>, noise: f64) -> ChannelMatrix {
        ChannelMatrix::from_gains(n, g, noise, ChannelMode::PathLossOnly, None).unwrap()
    }

    #[test]
    fn unit_snr() {
        let c = chan(1, vec![2.0], 4.0);
        let m = RateModel::new(&c, vec![2.0], vec![1.0]).unwrap();
        assert_eq!(m.snr(0), 1.0);
        assert_relative_eq!(m.link_rate(0, &[1.0]), 1.0, epsilon = 1e-15);
        assert_eq!(m.link_rate(0, &[0.0]), 0.0);
        assert_relative_eq!(m.weighted_sum_rate(&[1.0]), m.link_rate(0, &[1.0]));
    }

    #[test]
    fn two_link_hand_value() {
        // signal 4 sigma^2, one interferer at sigma^2
        let c = chan(2, vec![4.0, 1.0, 1.0, 4.0], 1.0);
        let m = RateModel::new(&c, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(m.link_rate(0, &[1.0, 1.0]), 3f64.log2(), epsilon = 1e-14);
        assert!((m.link_rate(0, &[1.0, 1.0]) - 1.585).abs() < 1e-3);
        assert_eq!(m.weighted_sum_rate(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn ratio_identities_on_random_channel() {
        let mut rng = crate::seeded_rng(5);
        use rand::Rng;
        let g: Vec<f64> = (0..9).map(|_| rng.random_range(1e-9..1e-6)).collect();
        let c = chan(3, g.clone(), 1e-12);
        let p = vec![2.0, 3.0, 5.0];
        let m = RateModel::new(&c, p.clone(), vec![1.0; 3]).unwrap();
        for i in 0..3 {
            assert_relative_eq!(m.snr(i), g[i * 3 + i] * p[i] / 1e-12, max_relative = 1e-14);
            for j in 0..3 {
                assert_relative_eq!(
                    m.inr(j, i),
                    g[j * 3 + i] * p[j] / 1e-12,
                    max_relative = 1e-14
                );
                assert_relative_eq!(m.sir(j, i), m.snr(i) / m.inr(j, i), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn bad_inputs_rejected() {
        let c = chan(2, vec![1.0; 4], 1.0);
        assert!(RateModel::new(&c, vec![1.0], vec![1.0, 1.0]).is_err());
        assert!(RateModel::new(&c, vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Activation::new(vec![0.5, 1.5]).is_err());
        assert!(Activation::new(vec![0.0, 1.0]).unwrap().is_binary());
    }
}
