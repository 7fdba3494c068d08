/// Generalized advantage estimates for one episode.
///
/// `values` holds V(s_0..s_{T-1}); `bootstrap` is V(s_T), 0 for a terminal
/// state. Returns (advantages, returns = advantages + values).
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    bootstrap: f64,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(rewards.len(), values.len());
    let n = rewards.len();
    let mut adv = vec![0.0; n];
    let mut acc = 0.0;
    for t in (0..n).rev() {
        let next = if t + 1 < n { values[t + 1] } else { bootstrap };
        let delta = rewards[t] + gamma * next - values[t];
        acc = delta + gamma * lambda * acc;
        adv[t] = acc;
    }
    let ret = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    (adv, ret)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn lambda_zero_is_one_step_td() {
        let r = [1.0, -0.5, 2.0];
        let v = [0.3, 0.1, 0.7];
        let (a, ret) = compute_gae(&r, &v, 0.0, 1.0, 0.0);
        assert_eq!(a, vec![1.0 + 0.1 - 0.3, -0.5 + 0.7 - 0.1, 2.0 - 0.7]);
        for t in 0..3 {
            assert_eq!(ret[t], a[t] + v[t]);
        }
    }

    #[test]
    fn lambda_one_is_monte_carlo() {
        let r = [1.0, -0.5, 2.0];
        let v = [0.3, 0.1, 0.7];
        let (a, _) = compute_gae(&r, &v, 0.0, 1.0, 1.0);
        let want = [2.5 - 0.3, 1.5 - 0.1, 2.0 - 0.7];
        for t in 0..3 {
            assert!((a[t] - want[t]).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_sum() {
        let mut rng = crate::seeded_rng(1);
        let n = 20;
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (g, l, boot) = (0.97, 0.9, 0.4);
        let (a, _) = compute_gae(&r, &v, boot, g, l);
        for t in 0..n {
            let mut want = 0.0;
            for k in t..n {
                let next = if k + 1 < n { v[k + 1] } else { boot };
                let delta = r[k] + g * next - v[k];
                want += (g * l as f64).powi((k - t) as i32) * delta;
            }
            assert!((a[t] - want).abs() < 1e-12);
        }
    }
}
