//! Link-scheduling and power-control MDPs.

use serde::{Deserialize, Serialize};

use crate::error::{LinqError, Result};
use crate::features::{LinkState, StateView, Task};
use crate::network::Gains;
use crate::rates::RateModel;

/// Scheduling actions, in one-hot feature order.
pub const LS_ACTIONS: [LinkState; 3] = [LinkState::Active, LinkState::Inactive, LinkState::Pending];

/// Index of the "keep pending" scheduling action.
pub const LS_KEEP: usize = 2;

/// Index of the zero power-control delta.
pub const PC_KEEP: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MdpConfig {
    /// Step limit T; the per-step penalty is 1/T.
    pub horizon: usize,
    pub pc_actions: [f64; 7],
    pub pc_early_stop_eps: f64,
}

impl Default for MdpConfig {
    fn default() -> Self {
        Self {
            horizon: 32,
            pc_actions: [-0.1, -0.01, -0.001, 0.0, 0.001, 0.01, 0.1],
            pc_early_stop_eps: 1e-3,
        }
    }
}

impl MdpConfig {
    pub fn alpha(&self) -> f64 {
        1.0 / self.horizon as f64
    }

    pub fn actions(&self, task: Task) -> usize {
        match task {
            Task::Ls => LS_ACTIONS.len(),
            Task::Pc => self.pc_actions.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EpisodeState {
    Ls(Vec<LinkState>),
    Pc(Vec<f64>),
}

impl EpisodeState {
    pub fn view(&self) -> StateView<'_> {
        match self {
            Self::Ls(s) => StateView::Ls(s),
            Self::Pc(s) => StateView::Pc(s),
        }
    }

    /// Activation vector: active -> 1, anything else -> 0; PC states as-is.
    pub fn activation(&self) -> Vec<f64> {
        match self {
            Self::Ls(s) => s
                .iter()
                .map(|&v| if v == LinkState::Active { 1.0 } else { 0.0 })
                .collect(),
            Self::Pc(s) => s.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    /// W(x') - W(x) - alpha; NaN when the episode does not track rewards.
    pub reward: f64,
    pub done: bool,
}

/// One episode. Without a rate model, rewards are not computed (inference).
pub struct Episode<'m, G: Gains + ?Sized> {
    cfg: MdpConfig,
    model: Option<&'m RateModel<'m, G>>,
    state: EpisodeState,
    t: usize,
    done: bool,
    w: f64,
}

impl<'m, G: Gains + ?Sized> Episode<'m, G> {
    /// Scheduling episode, every link pending.
    pub fn ls(n: usize, model: Option<&'m RateModel<'m, G>>, cfg: &MdpConfig) -> Self {
        Self::start(EpisodeState::Ls(vec![LinkState::Pending; n]), model, cfg)
    }

    /// Power-control episode from `init` (0.5 everywhere in training).
    pub fn pc(
        init: Vec<f64>,
        model: Option<&'m RateModel<'m, G>>,
        cfg: &MdpConfig,
    ) -> Result<Self> {
        if init.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(LinqError::InvalidParam(
                "power-control states must lie in [0, 1]".into(),
            ));
        }
        Ok(Self::start(EpisodeState::Pc(init), model, cfg))
    }

    fn start(state: EpisodeState, model: Option<&'m RateModel<'m, G>>, cfg: &MdpConfig) -> Self {
        let w = model.map_or(f64::NAN, |m| m.weighted_sum_rate(&state.activation()));
        Self {
            cfg: cfg.clone(),
            model,
            state,
            t: 0,
            done: false,
            w,
        }
    }

    pub fn state(&self) -> &EpisodeState {
        &self.state
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Cached objective of the current activation.
    pub fn objective(&self) -> f64 {
        self.w
    }

    pub fn task(&self) -> Task {
        match self.state {
            EpisodeState::Ls(_) => Task::Ls,
            EpisodeState::Pc(_) => Task::Pc,
        }
    }

    /// Nodes whose action matters this step: pending links, or every link in PC.
    pub fn acting(&self) -> Vec<bool> {
        match &self.state {
            EpisodeState::Ls(s) => s.iter().map(|&v| v == LinkState::Pending).collect(),
            EpisodeState::Pc(s) => vec![true; s.len()],
        }
    }

    /// Applies one action index per node.
    pub fn step(&mut self, actions: &[usize]) -> Result<StepOutcome> {
        if self.done {
            return Err(LinqError::EpisodeDone);
        }
        let n = match &self.state {
            EpisodeState::Ls(s) => s.len(),
            EpisodeState::Pc(s) => s.len(),
        };
        if actions.len() != n {
            return Err(LinqError::Shape(format!(
                "{n} nodes but {} actions",
                actions.len()
            )));
        }
        let na = self.cfg.actions(self.task());
        if actions.iter().any(|&a| a >= na) {
            return Err(LinqError::InvalidParam(format!(
                "action index out of range 0..{na}"
            )));
        }
        self.t += 1;
        let at_limit = self.t >= self.cfg.horizon;
        match &mut self.state {
            EpisodeState::Ls(s) => {
                for (v, &a) in s.iter_mut().zip(actions) {
                    if *v == LinkState::Pending {
                        *v = LS_ACTIONS[a];
                    }
                }
                let pending = s.iter().any(|&v| v == LinkState::Pending);
                if at_limit && pending {
                    for v in s.iter_mut() {
                        if *v == LinkState::Pending {
                            *v = LinkState::Inactive;
                        }
                    }
                }
                self.done = at_limit || !pending;
            }
            EpisodeState::Pc(s) => {
                let mut moved: f64 = 0.0;
                for (v, &a) in s.iter_mut().zip(actions) {
                    let next = (*v + self.cfg.pc_actions[a]).clamp(0.0, 1.0);
                    moved = moved.max((next - *v).abs());
                    *v = next;
                }
                let idle = actions.iter().all(|&a| a == PC_KEEP);
                // the tiny margin keeps a 1e-3 step from passing as "below 1e-3"
                let stalled = moved + 1e-12 < self.cfg.pc_early_stop_eps;
                self.done = at_limit || idle || stalled;
            }
        }
        let reward = match self.model {
            Some(m) => {
                let w = m.weighted_sum_rate(&self.state.activation());
                let r = w - self.w - self.cfg.alpha();
                self.w = w;
                r
            }
            None => f64::NAN,
        };
        Ok(StepOutcome {
            reward,
            done: self.done,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ChannelMatrix, ChannelMode};

    fn unit_snr() -> ChannelMatrix {
        ChannelMatrix::from_gains(1, vec![1.0], 1.0, ChannelMode::PathLossOnly, None).unwrap()
    }

    #[test]
    fn keep_pending_costs_alpha() {
        let c = unit_snr();
        let m = RateModel::new(&c, vec![1.0], vec![1.0]).unwrap();
        let cfg = MdpConfig::default();
        let mut e = Episode::ls(1, Some(&m), &cfg);
        let o = e.step(&[LS_KEEP]).unwrap();
        assert_eq!(o.reward, -1.0 / 32.0);
        assert!(!o.done);
    }

    #[test]
    fn activating_single_link() {
        let c = unit_snr();
        let m = RateModel::new(&c, vec![1.0], vec![1.0]).unwrap();
        let mut e = Episode::ls(1, Some(&m), &MdpConfig::default());
        let o = e.step(&[0]).unwrap();
        assert_eq!(o.reward, 1.0 - 1.0 / 32.0);
        assert!(o.done);
        assert!(matches!(e.step(&[0]), Err(LinqError::EpisodeDone)));
    }

    #[test]
    fn decided_links_are_frozen_and_horizon_forces_inactive() {
        let c = ChannelMatrix::from_gains(
            2,
            vec![1.0, 0.1, 0.1, 1.0],
            1.0,
            ChannelMode::PathLossOnly,
            None,
        )
        .unwrap();
        let m = RateModel::new(&c, vec![1.0; 2], vec![1.0; 2]).unwrap();
        let cfg = MdpConfig {
            horizon: 3,
            ..Default::default()
        };
        let mut e = Episode::ls(2, Some(&m), &cfg);
        e.step(&[0, LS_KEEP]).unwrap();
        e.step(&[1, LS_KEEP]).unwrap();
        assert_eq!(
            e.state(),
            &EpisodeState::Ls(vec![LinkState::Active, LinkState::Pending])
        );
        let o = e.step(&[1, LS_KEEP]).unwrap();
        assert!(o.done);
        assert_eq!(
            e.state(),
            &EpisodeState::Ls(vec![LinkState::Active, LinkState::Inactive])
        );
    }

    #[test]
    fn pc_clip_and_early_stop() {
        let c = unit_snr();
        let m = RateModel::new(&c, vec![1.0], vec![1.0]).unwrap();
        let cfg = MdpConfig::default();
        let mut e = Episode::pc(vec![0.05], Some(&m), &cfg).unwrap();
        let w0 = e.objective();
        let o = e.step(&[0]).unwrap();
        assert_eq!(e.state(), &EpisodeState::Pc(vec![0.0]));
        assert!((o.reward - (0.0 - w0 - 1.0 / 32.0)).abs() < 1e-15);
        assert!(!o.done);

        let mut e = Episode::pc(vec![0.5], Some(&m), &cfg).unwrap();
        let o = e.step(&[PC_KEEP]).unwrap();
        assert_eq!(o.reward, -1.0 / 32.0);
        assert!(o.done);

        let mut e = Episode::pc(vec![0.5], Some(&m), &cfg).unwrap();
        assert!(!e.step(&[4]).unwrap().done);
        assert!(Episode::<ChannelMatrix>::pc(vec![1.5], None, &cfg).is_err());
    }
}
