//! Random D2D layouts and channel power gains.
//!
//! Transmitters are dropped uniformly over a square; each receiver sits at a
//! uniformly drawn pairing distance and angle from its transmitter. Gains
//! follow the median line-of-sight ITU-R P.1411 short-range model, optionally
//! multiplied by antenna gain, log-normal shadowing and Rayleigh fading.

mod io;

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LinqError, Result};

pub use io::{read_layouts, write_layouts, LayoutRecord};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Maximum number of angle draws when placing a receiver inside the area.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Extra impairments applied on top of path loss in realistic mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RealisticChannel {
    /// Antenna gain at each end of a link, dBi.
    pub antenna_gain_dbi: f64,
    /// Standard deviation of log-normal shadowing, dB.
    pub shadowing_std_db: f64,
    /// Multiply by a unit-mean exponential power factor.
    pub rayleigh: bool,
}

impl Default for RealisticChannel {
    fn default() -> Self {
        Self {
            antenna_gain_dbi: 2.5,
            shadowing_std_db: 8.0,
            rayleigh: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemParams {
    /// Side of the square deployment area, meters.
    pub area_side: f64,
    /// Tx-Rx pairing distance bounds, meters.
    pub d2d_min: f64,
    pub d2d_max: f64,
    /// Hz.
    pub bandwidth: f64,
    /// dBm/Hz.
    pub noise_density: f64,
    /// Hz.
    pub carrier_freq: f64,
    /// Tx and Rx antenna height, meters.
    pub antenna_height: f64,
    /// Per-transmitter full power, dBm.
    pub p_max: f64,
    /// Per-link priorities; `None` means all ones.
    pub weights: Option<Vec<f64>>,
    pub realistic: RealisticChannel,
    /// Largest N for which N x N distance and gain matrices are materialized.
    pub dense_cap: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            area_side: 500.0,
            d2d_min: 2.0,
            d2d_max: 65.0,
            bandwidth: 5e6,
            noise_density: -169.0,
            carrier_freq: 2.4e9,
            antenna_height: 1.5,
            p_max: 40.0,
            weights: None,
            realistic: RealisticChannel::default(),
            dense_cap: 4096,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(LinqError::InvalidParam(msg.to_string()));
        if !(self.d2d_min > 0.0 && self.d2d_min <= self.d2d_max && self.d2d_max < self.area_side) {
            return bad("need 0 < d2d_min <= d2d_max < area_side");
        }
        if !(self.bandwidth > 0.0 && self.carrier_freq > 0.0 && self.antenna_height > 0.0) {
            return bad("bandwidth, carrier frequency and antenna height must be positive");
        }
        if !(self.noise_density.is_finite() && self.p_max.is_finite()) {
            return bad("noise density and transmit power must be finite");
        }
        if let Some(w) = &self.weights {
            if w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return bad("link weights must be positive");
            }
        }
        if self.realistic.shadowing_std_db < 0.0 {
            return bad("shadowing std must be non-negative");
        }
        Ok(())
    }

    /// Thermal noise power over the whole band, watts.
    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_density + 10.0 * self.bandwidth.log10())
    }

    pub fn tx_power_watts(&self) -> f64 {
        dbm_to_watts(self.p_max)
    }

    /// Link weights for an `n`-link network.
    pub fn weights_for(&self, n: usize) -> Result<Vec<f64>> {
        match &self.weights {
            None => Ok(vec![1.0; n]),
            Some(w) if w.len() == n => Ok(w.clone()),
            Some(w) => Err(LinqError::Shape(format!(
                "{} link weights configured for a {n}-link network",
                w.len()
            ))),
        }
    }

    pub fn path_loss_model(&self) -> Itu1411 {
        Itu1411::new(self.carrier_freq, self.antenna_height)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Median line-of-sight ITU-R P.1411 loss with a two-slope breakpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Itu1411 {
    /// Breakpoint distance, meters.
    pub r_bp: f64,
    /// Basic transmission loss at the breakpoint, dB.
    pub l_bp: f64,
}

impl Itu1411 {
    pub fn new(carrier_freq: f64, antenna_height: f64) -> Self {
        let lambda = SPEED_OF_LIGHT / carrier_freq;
        let h2 = antenna_height * antenna_height;
        let r_bp = 4.0 * h2 / lambda;
        let l_bp = (20.0 * (lambda * lambda / (8.0 * std::f64::consts::PI * h2)).log10()).abs();
        Self { r_bp, l_bp }
    }

    /// Loss in dB at distance `d` (meters). `d` must be positive.
    #[inline]
    pub fn loss_db(&self, d: f64) -> f64 {
        let slope = if d <= self.r_bp { 20.0 } else { 40.0 };
        self.l_bp + 6.0 + slope * (d / self.r_bp).log10()
    }

    #[inline]
    pub fn gain(&self, d: f64) -> f64 {
        10f64.powf(-self.loss_db(d) / 10.0)
    }
}

/// Path loss at distance `d` under `params`, dB.
pub fn path_loss_itu1411(d: f64, params: &SystemParams) -> Result<f64> {
    if !(d > 0.0) {
        return Err(LinqError::NonPositiveDistance(d));
    }
    Ok(params.path_loss_model().loss_db(d))
}

pub type Point = [f64; 2];

#[inline]
fn euclid(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Convex hull by monotone chain. Points are dropped only when clearly
/// inside, so near-collinear boundary points are kept.
fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let scale = p
        .iter()
        .fold(0.0f64, |m, q| m.max(q[0].abs()).max(q[1].abs()))
        .max(1.0);
    let tol = 1e-9 * scale * scale;
    let cross = |o: Point, a: Point, b: Point| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<Point> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) < -tol
            {
                hull.pop();
            }
            hull.push(q);
        }
    }
    hull
}

/// Transmitter/receiver positions of one network drop.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkLayout {
    tx: Vec<Point>,
    rx: Vec<Point>,
    seed: u64,
    /// Row-major `dist[j * n + i]` = |Tx_j - Rx_i|, present when n <= dense cap.
    dist: Option<Vec<f64>>,
}

impl NetworkLayout {
    pub fn new(tx: Vec<Point>, rx: Vec<Point>, seed: u64, dense_cap: usize) -> Result<Self> {
        if tx.len() != rx.len() || tx.is_empty() {
            return Err(LinqError::Shape(format!(
                "layout needs equally many (>=1) transmitters and receivers, got {} and {}",
                tx.len(),
                rx.len()
            )));
        }
        if tx
            .iter()
            .chain(&rx)
            .any(|p| !(p[0].is_finite() && p[1].is_finite()))
        {
            return Err(LinqError::NonFinite("layout coordinates"));
        }
        let n = tx.len();
        let dist = (n <= dense_cap).then(|| {
            let mut d = Vec::with_capacity(n * n);
            for t in &tx {
                d.extend(rx.iter().map(|r| euclid(*t, *r)));
            }
            d
        });
        Ok(Self { tx, rx, seed, dist })
    }

    pub fn n_links(&self) -> usize {
        self.tx.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tx(&self) -> &[Point] {
        &self.tx
    }

    pub fn rx(&self) -> &[Point] {
        &self.rx
    }

    /// Distance Tx_`tx` -> Rx_`rx`.
    #[inline]
    pub fn distance(&self, tx: usize, rx: usize) -> f64 {
        match &self.dist {
            Some(d) => d[tx * self.tx.len() + rx],
            None => euclid(self.tx[tx], self.rx[rx]),
        }
    }

    #[inline]
    pub fn link_length(&self, i: usize) -> f64 {
        self.distance(i, i)
    }

    /// Largest Tx-Rx distance over all N x N pairs.
    ///
    /// The farthest pair between two point sets is attained at vertices of
    /// their convex hulls, so only hull points are compared.
    pub fn max_distance(&self) -> f64 {
        let (a, b) = (convex_hull(&self.tx), convex_hull(&self.rx));
        let mut m: f64 = 0.0;
        for p in &a {
            for q in &b {
                m = m.max(euclid(*p, *q));
            }
        }
        m
    }

    /// The materialized distance matrix, if the layout is small enough.
    pub fn dist_matrix(&self) -> Option<&[f64]> {
        self.dist.as_deref()
    }

    /// Link indices sorted by increasing Tx-Rx length, ties by index.
    pub fn order_by_length(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n_links()).collect();
        order.sort_by(|&a, &b| {
            self.link_length(a)
                .total_cmp(&self.link_length(b))
                .then(a.cmp(&b))
        });
        order
    }

    /// Checks the layout against the geometric invariants of `params`.
    pub fn check_consistent(&self, params: &SystemParams) -> Result<()> {
        let side = params.area_side;
        let inside = |p: &Point| (0.0..=side).contains(&p[0]) && (0.0..=side).contains(&p[1]);
        if !self.tx.iter().chain(&self.rx).all(inside) {
            return Err(LinqError::InvalidParam(
                "layout has nodes outside the area".into(),
            ));
        }
        let slack = 1e-9;
        for i in 0..self.n_links() {
            let d = self.link_length(i);
            if d < params.d2d_min - slack || d > params.d2d_max + slack {
                return Err(LinqError::InvalidParam(format!(
                    "link {i} length {d} outside [{}, {}]",
                    params.d2d_min, params.d2d_max
                )));
            }
        }
        Ok(())
    }
}

/// Draws one layout. Fixed `seed` gives a bit-identical result.
///
/// The pairing distance is drawn once per link; only the angle is redrawn when
/// the receiver falls outside the area, so link lengths stay exactly uniform.
pub fn generate_layout(params: &SystemParams, n: usize, seed: u64) -> Result<NetworkLayout> {
    params.validate()?;
    if n == 0 {
        return Err(LinqError::InvalidParam(
            "a layout needs at least one link".into(),
        ));
    }
    let mut rng = crate::seeded_rng(seed);
    let side = params.area_side;
    let tx: Vec<Point> = (0..n)
        .map(|_| [rng.random::<f64>() * side, rng.random::<f64>() * side])
        .collect();
    let mut rx = Vec::with_capacity(n);
    for (i, t) in tx.iter().enumerate() {
        let d = params.d2d_min + (params.d2d_max - params.d2d_min) * rng.random::<f64>();
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let a = std::f64::consts::TAU * rng.random::<f64>();
            let p = [t[0] + d * a.cos(), t[1] + d * a.sin()];
            if (0.0..=side).contains(&p[0]) && (0.0..=side).contains(&p[1]) {
                placed = Some(p);
                break;
            }
        }
        match placed {
            Some(p) => rx.push(p),
            None => {
                return Err(LinqError::PlacementFailed {
                    link: i,
                    attempts: MAX_PLACEMENT_ATTEMPTS,
                })
            }
        }
    }
    NetworkLayout::new(tx, rx, seed, params.dense_cap)
}

/// Generates `count` layouts; layout `k` uses seed `derive_seed(seed, k)`.
pub fn generate_layouts(
    params: &SystemParams,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<NetworkLayout>> {
    (0..count)
        .into_par_iter()
        .map(|k| generate_layout(params, n, crate::derive_seed(seed, k as u64)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMode {
    PathLossOnly,
    Realistic,
}

/// Anything that can report the power gain between a transmitter and a receiver.
pub trait Gains: Sync {
    fn n_links(&self) -> usize;
    /// Linear power gain Tx_`tx` -> Rx_`rx`.
    fn gain(&self, tx: usize, rx: usize) -> f64;
    /// Noise power, watts.
    fn noise_power(&self) -> f64;
}

/// Dense N x N channel power gains.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    n: usize,
    /// Row-major, `gains[j * n + i]` = G[j][i] (Tx_j -> Rx_i).
    gains: Vec<f64>,
    noise_power: f64,
    mode: ChannelMode,
    fading_seed: Option<u64>,
}

impl ChannelMatrix {
    pub fn from_gains(
        n: usize,
        gains: Vec<f64>,
        noise_power: f64,
        mode: ChannelMode,
        fading_seed: Option<u64>,
    ) -> Result<Self> {
        if gains.len() != n * n || n == 0 {
            return Err(LinqError::Shape(format!(
                "expected {n}x{n} gains, got {}",
                gains.len()
            )));
        }
        if gains.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(LinqError::InvalidParam(
                "channel gains must be positive and finite".into(),
            ));
        }
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(LinqError::InvalidParam(
                "noise power must be positive".into(),
            ));
        }
        Ok(Self {
            n,
            gains,
            noise_power,
            mode,
            fading_seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> ChannelMode {
        self.mode
    }

    pub fn fading_seed(&self) -> Option<u64> {
        self.fading_seed
    }

    /// Row-major gains, G[j][i] at `j * n + i`.
    pub fn as_slice(&self) -> &[f64] {
        &self.gains
    }

    /// Gains from Tx_`tx` to every receiver.
    #[inline]
    pub fn row(&self, tx: usize) -> &[f64] {
        &self.gains[tx * self.n..(tx + 1) * self.n]
    }

    /// Same channel with every gain and the noise scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.gains.iter_mut().for_each(|g| *g *= factor);
        out.noise_power *= factor;
        out
    }
}

impl Gains for ChannelMatrix {
    fn n_links(&self) -> usize {
        self.n
    }

    #[inline]
    fn gain(&self, tx: usize, rx: usize) -> f64 {
        self.gains[tx * self.n + rx]
    }

    fn noise_power(&self) -> f64 {
        self.noise_power
    }
}

/// Path-loss gains evaluated on demand; used when N is too large for a dense matrix.
pub struct PathLossField<'a> {
    layout: &'a NetworkLayout,
    model: Itu1411,
    noise_power: f64,
}

impl<'a> PathLossField<'a> {
    pub fn new(layout: &'a NetworkLayout, params: &SystemParams) -> Self {
        Self {
            layout,
            model: params.path_loss_model(),
            noise_power: params.noise_power(),
        }
    }
}

impl Gains for PathLossField<'_> {
    fn n_links(&self) -> usize {
        self.layout.n_links()
    }

    #[inline]
    fn gain(&self, tx: usize, rx: usize) -> f64 {
        self.model.gain(self.layout.distance(tx, rx))
    }

    fn noise_power(&self) -> f64 {
        self.noise_power
    }
}

/// Builds the dense channel of a layout.
///
/// Realistic mode multiplies each path-loss gain by the two-ended antenna
/// gain, a log-normal shadowing term and (optionally) a unit-mean exponential
/// fast-fading power factor, all drawn from `fading_seed`.
pub fn build_channel(
    layout: &NetworkLayout,
    params: &SystemParams,
    mode: ChannelMode,
    fading_seed: u64,
) -> Result<ChannelMatrix> {
    params.validate()?;
    let n = layout.n_links();
    if n > params.dense_cap {
        return Err(LinqError::SizeCap {
            what: "dense channel",
            n,
            cap: params.dense_cap,
        });
    }
    let model = params.path_loss_model();
    let mut gains = Vec::with_capacity(n * n);
    for j in 0..n {
        gains.extend((0..n).map(|i| model.gain(layout.distance(j, i))));
    }
    let seed = match mode {
        ChannelMode::PathLossOnly => None,
        ChannelMode::Realistic => {
            let rc = &params.realistic;
            let mut rng = crate::seeded_rng(fading_seed);
            let shadow = Normal::new(0.0, rc.shadowing_std_db)
                .map_err(|e| LinqError::InvalidParam(e.to_string()))?;
            let antenna_db = 2.0 * rc.antenna_gain_dbi;
            for g in gains.iter_mut() {
                let db = antenna_db + shadow.sample(&mut rng);
                *g *= 10f64.powf(db / 10.0);
                if rc.rayleigh {
                    *g *= fading_power_factor(&mut rng);
                }
            }
            Some(fading_seed)
        }
    };
    ChannelMatrix::from_gains(n, gains, params.noise_power(), mode, seed)
}

/// One Rayleigh fast-fading power draw (unit-mean exponential).
pub fn fading_power_factor<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    let v: f64 = Exp1.sample(rng);
    // Exp1 can return exactly 0 with vanishing probability; gains must stay positive.
    v.max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_link_length_within_bounds() {
        let p = SystemParams::default();
        for seed in 0..50 {
            let l = generate_layout(&p, 1, seed).unwrap();
            let d = l.link_length(0);
            assert!((2.0..=65.0).contains(&d), "{d}");
        }
    }

    #[test]
    fn layouts_are_deterministic() {
        let p = SystemParams::default();
        let a = generate_layout(&p, 30, 99).unwrap();
        let b = generate_layout(&p, 30, 99).unwrap();
        assert_eq!(a, b);
        let c = generate_layout(&p, 30, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mean_link_length_matches_uniform_law() {
        // Monte-Carlo oracle: lengths are U[2, 65], mean 33.5.
        let p = SystemParams::default();
        let layouts = generate_layouts(&p, 50, 10_000, 7).unwrap();
        let lens: Vec<f64> = layouts
            .iter()
            .flat_map(|l| (0..50).map(move |i| l.link_length(i)))
            .collect();
        let n = lens.len() as f64;
        let mean = lens.iter().sum::<f64>() / n;
        let var = lens.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!((mean - 33.5).abs() <= 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn impossible_geometry_is_rejected() {
        let p = SystemParams {
            d2d_max: 600.0,
            ..SystemParams::default()
        };
        assert!(matches!(
            generate_layout(&p, 3, 1),
            Err(LinqError::InvalidParam(_))
        ));
        assert!(generate_layout(&SystemParams::default(), 0, 1).is_err());
    }

    #[test]
    fn breakpoint_loss_is_lbp_plus_six() {
        let m = Itu1411::new(2.4e9, 1.5);
        assert_eq!(m.loss_db(m.r_bp), m.l_bp + 6.0);
    }

    #[test]
    fn breakpoint_constants_at_default_band() {
        let m = SystemParams::default().path_loss_model();
        assert!((m.r_bp - 72.05).abs() < 0.01, "{}", m.r_bp);
        assert!((m.l_bp - 71.17).abs() < 0.02, "{}", m.l_bp);
        let step = m.loss_db(2.0 * m.r_bp) - m.loss_db(m.r_bp);
        assert_relative_eq!(step, 40.0 * 2f64.log10(), epsilon = 1e-9);
        assert!((step - 12.04).abs() < 0.005);
    }

    #[test]
    fn non_positive_distance_errors() {
        let p = SystemParams::default();
        assert!(matches!(
            path_loss_itu1411(0.0, &p),
            Err(LinqError::NonPositiveDistance(_))
        ));
        assert!(path_loss_itu1411(-1.0, &p).is_err());
        assert!(path_loss_itu1411(f64::NAN, &p).is_err());
    }

    #[test]
    fn dbm_conversions() {
        assert_relative_eq!(dbm_to_watts(40.0), 10.0, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(0.0), 1e-3, max_relative = 1e-15);
        assert_relative_eq!(watts_to_dbm(10.0), 40.0, epsilon = 1e-12);
        let p = SystemParams::default();
        let noise_dbm = watts_to_dbm(p.noise_power());
        assert!((noise_dbm - (-102.0103)).abs() < 1e-4, "{noise_dbm}");
        assert!((p.noise_power() - 6.29e-14).abs() < 0.01e-14);
    }

    #[test]
    fn path_loss_channel_matches_db_definition() {
        let p = SystemParams::default();
        let l = generate_layout(&p, 12, 3).unwrap();
        let c1 = build_channel(&l, &p, ChannelMode::PathLossOnly, 0).unwrap();
        let c2 = build_channel(&l, &p, ChannelMode::PathLossOnly, 5).unwrap();
        assert_eq!(c1, c2);
        for j in 0..12 {
            for i in 0..12 {
                let want = -path_loss_itu1411(l.distance(j, i), &p).unwrap();
                assert!((10.0 * c1.gain(j, i).log10() - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fading_factor_has_unit_mean() {
        let mut rng = crate::seeded_rng(2024);
        let n = 1_000_000;
        let mean = (0..n).map(|_| fading_power_factor(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn realistic_channel_fading_only_averages_to_path_loss() {
        let mut p = SystemParams::default();
        p.realistic = RealisticChannel {
            antenna_gain_dbi: 0.0,
            shadowing_std_db: 0.0,
            rayleigh: true,
        };
        let l = generate_layout(&p, 1000, 8).unwrap();
        let pl = build_channel(&l, &p, ChannelMode::PathLossOnly, 0).unwrap();
        let re = build_channel(&l, &p, ChannelMode::Realistic, 77).unwrap();
        let ratio_mean = pl
            .as_slice()
            .iter()
            .zip(re.as_slice())
            .map(|(a, b)| b / a)
            .sum::<f64>()
            / 1e6;
        assert!((ratio_mean - 1.0).abs() < 0.01, "{ratio_mean}");
        assert_eq!(re.fading_seed(), Some(77));
        let again = build_channel(&l, &p, ChannelMode::Realistic, 77).unwrap();
        assert_eq!(re, again);
    }

    #[test]
    fn hull_max_distance_is_exact() {
        let p = SystemParams::default();
        for n in [1, 2, 3, 7, 50, 300] {
            for seed in 0..4 {
                let l = generate_layout(&p, n, seed).unwrap();
                let brute = l.dist_matrix().unwrap().iter().copied().fold(0.0, f64::max);
                assert_eq!(l.max_distance(), brute, "n {n} seed {seed}");
            }
        }
        // duplicates and collinear points
        let tx = vec![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [2.0, 2.0], [3.0, 3.0]];
        let rx = vec![[5.0, 0.0], [5.0, 1.0], [5.0, 2.0], [5.0, 2.0], [5.0, 3.0]];
        let l = NetworkLayout::new(tx, rx, 0, 10).unwrap();
        let brute = l.dist_matrix().unwrap().iter().copied().fold(0.0, f64::max);
        assert_eq!(l.max_distance(), brute);
    }

    #[test]
    fn dense_cap_switches_to_on_demand_distances() {
        let p = SystemParams {
            dense_cap: 4,
            ..SystemParams::default()
        };
        let l = generate_layout(&p, 6, 1).unwrap();
        assert!(l.dist_matrix().is_none());
        assert!(matches!(
            build_channel(&l, &p, ChannelMode::PathLossOnly, 0),
            Err(LinqError::SizeCap { .. })
        ));
        let field = PathLossField::new(&l, &p);
        let m = p.path_loss_model();
        assert_eq!(field.gain(2, 3), m.gain(l.distance(2, 3)));
    }
}
