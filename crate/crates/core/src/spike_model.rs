//! Discrete-time integrate-and-fire model of a spike camera pixel array.
//!
//! Each pixel integrates `alpha * I` per frame into a hidden accumulator and
//! emits a spike on the frame where the accumulator reaches `theta`. Hard
//! reset returns the accumulator to zero; soft reset subtracts `theta`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scene::SceneSource;
use crate::stream::{SpikeStream, StreamError};

/// Relative slack on the threshold comparison. Accumulating decimal
/// luminances in binary floating point drifts by a few ulps, which would
/// otherwise delay a spike whose exact-arithmetic accumulation lands on
/// `theta`.
pub const FIRE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("theta must be positive and finite, got {0}")]
    InvalidTheta(f64),
    #[error("initial state {value} is outside [0, theta={theta})")]
    InitialState { value: f64, theta: f64 },
    #[error("scene has no frames")]
    EmptyScene,
    #[error("expected ISI is infinite for zero luminance")]
    ZeroLuminance,
    #[error("luminance {0} is outside [0, 1]")]
    Luminance(f64),
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ResetMode {
    Hard,
    #[default]
    Soft,
}

impl ResetMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ResetMode::Hard => "hard",
            ResetMode::Soft => "soft",
        }
    }
}

impl std::str::FromStr for ResetMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hard" => Ok(ResetMode::Hard),
            "soft" => Ok(ResetMode::Soft),
            other => Err(format!("unknown reset mode '{other}' (expected hard|soft)")),
        }
    }
}

/// Initial accumulator state of every pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitPolicy {
    Constant(f64),
    /// Uniform in `[0, theta)`, drawn from a per-pixel substream of `seed`.
    UniformRandom(u64),
}

impl Default for InitPolicy {
    fn default() -> Self {
        InitPolicy::Constant(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatorConfig {
    alpha: f64,
    theta: f64,
    reset: ResetMode,
    init: InitPolicy,
}

impl Default for SimulatorConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            theta: 2.0,
            reset: ResetMode::Soft,
            init: InitPolicy::Constant(0.0),
        }
    }
}

impl SimulatorConfig {
    pub fn new(
        alpha: f64,
        theta: f64,
        reset: ResetMode,
        init: InitPolicy,
    ) -> Result<Self, ModelError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(ModelError::InvalidTheta(theta));
        }
        if let InitPolicy::Constant(v) = init {
            if !(0.0..theta).contains(&v) {
                return Err(ModelError::InitialState { value: v, theta });
            }
        }
        Ok(Self {
            alpha,
            theta,
            reset,
            init,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn reset(&self) -> ResetMode {
        self.reset
    }

    pub fn init(&self) -> InitPolicy {
        self.init
    }

    pub fn with_reset(self, reset: ResetMode) -> Self {
        Self { reset, ..self }
    }

    pub fn with_init(self, init: InitPolicy) -> Result<Self, ModelError> {
        Self::new(self.alpha, self.theta, self.reset, init)
    }

    /// Initial accumulator value of `pixel` under this config's policy.
    pub fn initial_state(&self, pixel: usize) -> f64 {
        match self.init {
            InitPolicy::Constant(v) => v,
            InitPolicy::UniformRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(pixel as u64);
                rng.gen::<f64>() * self.theta
            }
        }
    }

    #[inline]
    fn fire_level(&self) -> f64 {
        self.theta * (1.0 - FIRE_TOLERANCE)
    }
}

/// One frame of integration, threshold test and reset.
#[inline]
pub fn step(tau: f64, luminance: f64, cfg: &SimulatorConfig) -> (f64, bool) {
    let mid = tau + cfg.alpha * luminance;
    if mid < cfg.fire_level() {
        return (mid, false);
    }
    let next = match cfg.reset {
        ResetMode::Hard => 0.0,
        ResetMode::Soft => {
            // Planes are binary: an overshoot beyond one threshold still
            // yields a single spike this frame.
            let mut t = mid - cfg.theta;
            while t >= cfg.theta {
                t -= cfg.theta;
            }
            t.max(0.0)
        }
    };
    (next, true)
}

/// Runs the integrate-and-fire model over every frame of `scene`.
pub fn simulate<S: SceneSource + ?Sized>(
    scene: &S,
    cfg: &SimulatorConfig,
) -> Result<SpikeStream, ModelError> {
    let (w, h, n) = (scene.width(), scene.height(), scene.n_frames());
    if n == 0 {
        return Err(ModelError::EmptyScene);
    }
    let pixels = w * h;
    let mut taus: Vec<f64> = (0..pixels).map(|p| cfg.initial_state(p)).collect();
    simulate_from(scene, cfg, &mut taus, 0..n)
}

/// Simulates frames `range` of `scene` starting from the given accumulator
/// states, which are left holding the final states.
pub(crate) fn simulate_from<S: SceneSource + ?Sized>(
    scene: &S,
    cfg: &SimulatorConfig,
    taus: &mut [f64],
    range: std::ops::Range<usize>,
) -> Result<SpikeStream, ModelError> {
    let pixels = scene.width() * scene.height();
    let mut out = SpikeStream::zeros(scene.width(), scene.height(), 0)?;
    let mut lum = vec![0.0; pixels];
    for n in range {
        scene.fill_frame(n, &mut lum);
        let mut plane = out.empty_plane();
        let words = plane.words_mut();
        for (wi, word) in words.iter_mut().enumerate() {
            let base = wi << 6;
            let end = (base + 64).min(pixels);
            let mut bits = 0u64;
            for p in base..end {
                let (t, fired) = step(taus[p], lum[p], cfg);
                taus[p] = t;
                bits |= (fired as u64) << (p - base);
            }
            *word = bits;
        }
        out.push_plane(plane);
    }
    Ok(out)
}

/// Single-pixel trace: accumulator value after each frame and the fired bit.
pub fn simulate_trace(luminance: &[f64], tau0: f64, cfg: &SimulatorConfig) -> Vec<(f64, bool)> {
    let mut tau = tau0;
    luminance
        .iter()
        .map(|&i| {
            let (t, fired) = step(tau, i, cfg);
            tau = t;
            (t, fired)
        })
        .collect()
}

/// Mean inter-spike interval, in frames, for a constant luminance.
pub fn expected_isi(luminance: f64, cfg: &SimulatorConfig) -> Result<f64, ModelError> {
    if !(0.0..=1.0).contains(&luminance) {
        return Err(ModelError::Luminance(luminance));
    }
    if luminance == 0.0 {
        return Err(ModelError::ZeroLuminance);
    }
    Ok(cfg.theta / (cfg.alpha * luminance))
}

/// Mean spikes per frame for a constant luminance; linear in luminance.
pub fn expected_firing_rate(luminance: f64, cfg: &SimulatorConfig) -> f64 {
    cfg.alpha / cfg.theta * luminance
}

/// Flips each zero bit to one with probability `p`; existing spikes stay.
pub fn inject_spurious_spikes(
    stream: &SpikeStream,
    p: f64,
    seed: u64,
) -> Result<SpikeStream, ModelError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ModelError::Probability(p));
    }
    let mut out = stream.clone();
    if p == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 0..out.n_frames() {
        for px in 0..out.pixels() {
            if !out.get(n, px) && rng.gen_bool(p) {
                out.set(n, px, true);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{ConstantScene, FnScene};
    use proptest::prelude::*;

    fn cfg(reset: ResetMode) -> SimulatorConfig {
        SimulatorConfig::new(1.0, 2.0, reset, InitPolicy::Constant(0.0)).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(1.7, 0.5, &cfg(ResetMode::Hard)), (0.0, true));
        let (t, f) = step(1.7, 0.5, &cfg(ResetMode::Soft));
        assert!(f);
        assert!((t - 0.2).abs() < 1e-12);
        for mode in [ResetMode::Hard, ResetMode::Soft] {
            let (t, f) = step(0.3, 0.1, &cfg(mode));
            assert!(!f);
            assert!((t - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn equality_fires() {
        assert_eq!(step(1.5, 0.5, &cfg(ResetMode::Hard)), (0.0, true));
        assert_eq!(step(1.5, 0.5, &cfg(ResetMode::Soft)), (0.0, true));
    }

    #[test]
    fn soft_overshoot_fires_once() {
        let c = SimulatorConfig::new(5.0, 2.0, ResetMode::Soft, InitPolicy::Constant(0.0)).unwrap();
        let (t, f) = step(1.0, 1.0, &c);
        assert!(f);
        assert!(t.abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            SimulatorConfig::new(0.0, 2.0, ResetMode::Hard, InitPolicy::Constant(0.0)),
            Err(ModelError::InvalidAlpha(0.0))
        );
        assert_eq!(
            SimulatorConfig::new(1.0, -1.0, ResetMode::Hard, InitPolicy::Constant(0.0)),
            Err(ModelError::InvalidTheta(-1.0))
        );
        assert!(matches!(
            SimulatorConfig::new(1.0, 2.0, ResetMode::Hard, InitPolicy::Constant(2.0)),
            Err(ModelError::InitialState { .. })
        ));
    }

    #[test]
    fn constant_half_fires_every_fourth_frame() {
        let scene = ConstantScene {
            width: 3,
            height: 2,
            n_frames: 40,
            luminance: 0.5,
        };
        let s = simulate(&scene, &cfg(ResetMode::Hard)).unwrap();
        for p in 0..6 {
            let expected: Vec<usize> = (3..40).step_by(4).collect();
            assert_eq!(s.spike_times(p), expected);
        }
    }

    #[test]
    fn zero_luminance_never_fires() {
        let scene = ConstantScene {
            width: 4,
            height: 4,
            n_frames: 50,
            luminance: 0.0,
        };
        let c = cfg(ResetMode::Soft)
            .with_init(InitPolicy::UniformRandom(3))
            .unwrap();
        assert_eq!(simulate(&scene, &c).unwrap().spike_count(), 0);
    }

    #[test]
    fn empty_scene_rejected() {
        let scene = ConstantScene {
            width: 1,
            height: 1,
            n_frames: 0,
            luminance: 0.5,
        };
        assert_eq!(
            simulate(&scene, &cfg(ResetMode::Soft)),
            Err(ModelError::EmptyScene)
        );
    }

    /// Exact-arithmetic oracle: accumulate in integer hundredths.
    fn brute_force_soft_count(lum_hundredths: u64, theta_hundredths: u64, frames: u64) -> u64 {
        let mut acc = 0u64;
        let mut count = 0;
        for _ in 0..frames {
            acc += lum_hundredths;
            if acc >= theta_hundredths {
                acc -= theta_hundredths;
                count += 1;
            }
        }
        count
    }

    #[test]
    fn soft_count_matches_integer_oracle() {
        let oracle = brute_force_soft_count(37, 200, 1000);
        assert_eq!(oracle, 185);
        let scene = ConstantScene {
            width: 2,
            height: 2,
            n_frames: 1000,
            luminance: 0.37,
        };
        let s = simulate(&scene, &cfg(ResetMode::Soft)).unwrap();
        for p in 0..4 {
            assert_eq!(s.pixel_spike_count(p) as u64, oracle);
        }
    }

    #[test]
    fn expectation_formulas() {
        let c = cfg(ResetMode::Soft);
        assert_eq!(expected_isi(0.5, &c).unwrap(), 4.0);
        assert_eq!(expected_isi(1.0, &c).unwrap(), 2.0);
        let half =
            SimulatorConfig::new(0.5, 2.0, ResetMode::Soft, InitPolicy::Constant(0.0)).unwrap();
        assert_eq!(expected_isi(0.2, &half).unwrap(), 20.0);
        assert_eq!(expected_isi(0.0, &c), Err(ModelError::ZeroLuminance));
        assert_eq!(expected_firing_rate(0.5, &c), 0.25);
        assert_eq!(expected_firing_rate(0.0, &c), 0.0);
        let c24 =
            SimulatorConfig::new(2.0, 4.0, ResetMode::Soft, InitPolicy::Constant(0.0)).unwrap();
        assert_eq!(expected_firing_rate(1.0, &c24), 0.5);
    }

    #[test]
    fn spurious_injection_extremes() {
        let s = SpikeStream::zeros(10, 10, 100).unwrap();
        assert_eq!(inject_spurious_spikes(&s, 0.0, 1).unwrap(), s);
        let all = inject_spurious_spikes(&s, 1.0, 1).unwrap();
        assert_eq!(all.spike_count(), 10 * 10 * 100);
        assert_eq!(
            inject_spurious_spikes(&s, 1.5, 1),
            Err(ModelError::Probability(1.5))
        );
    }

    #[test]
    fn spurious_injection_binomial_bound() {
        let s = SpikeStream::zeros(100, 100, 100).unwrap();
        let noisy = inject_spurious_spikes(&s, 0.01, 42).unwrap();
        // n = 1e6, p = 0.01: mean 10000, sd ~ 99.5; 3 sd is well inside.
        let c = noisy.spike_count();
        assert!((9700..=10300).contains(&c), "count {c}");
    }

    #[test]
    fn spurious_injection_keeps_existing_spikes() {
        let scene = ConstantScene {
            width: 5,
            height: 5,
            n_frames: 60,
            luminance: 0.4,
        };
        let s = simulate(&scene, &cfg(ResetMode::Soft)).unwrap();
        let noisy = inject_spurious_spikes(&s, 0.3, 9).unwrap();
        for n in 0..s.n_frames() {
            for p in 0..s.pixels() {
                if s.get(n, p) {
                    assert!(noisy.get(n, p));
                }
            }
        }
    }

    #[test]
    fn random_init_is_order_independent() {
        let c = cfg(ResetMode::Soft)
            .with_init(InitPolicy::UniformRandom(77))
            .unwrap();
        let forward: Vec<f64> = (0..50).map(|p| c.initial_state(p)).collect();
        let backward: Vec<f64> = (0..50).rev().map(|p| c.initial_state(p)).collect();
        assert!(forward.iter().eq(backward.iter().rev()));
        assert!(forward.iter().all(|&t| (0.0..2.0).contains(&t)));
    }

    proptest! {
        #[test]
        fn hard_reset_isi_is_ceiling(lum in 0.05f64..=1.0) {
            let c = cfg(ResetMode::Hard);
            let trace = simulate_trace(&vec![lum; 400], 0.0, &c);
            let times: Vec<usize> = trace.iter().enumerate().filter_map(|(i, t)| t.1.then_some(i)).collect();
            let expected = (2.0 / lum * (1.0 - FIRE_TOLERANCE)).ceil() as usize;
            for w in times.windows(2) {
                prop_assert_eq!(w[1] - w[0], expected);
            }
        }

        #[test]
        fn soft_reset_count_converges(lum in 0.0f64..=1.0, tau0 in 0.0f64..2.0, frames in 1usize..3000) {
            let c = cfg(ResetMode::Soft);
            let trace = simulate_trace(&vec![lum; frames], tau0, &c);
            let count = trace.iter().filter(|t| t.1).count() as f64;
            let ideal = frames as f64 * lum / 2.0;
            prop_assert!((count - ideal).abs() <= 1.0 + 1e-6, "count {} ideal {}", count, ideal);
        }

        #[test]
        fn brighter_scene_never_fires_less(base in proptest::collection::vec(0.0f64..0.9, 64), bump in 0.0f64..0.1) {
            let c = cfg(ResetMode::Soft);
            let dim = FnScene { width: 8, height: 1, n_frames: 8, f: |n: usize, x: usize, _y: usize| base[n * 8 + x] };
            let bright = FnScene { width: 8, height: 1, n_frames: 8, f: |n: usize, x: usize, _y: usize| base[n * 8 + x] + bump };
            let a = simulate(&dim, &c).unwrap();
            let b = simulate(&bright, &c).unwrap();
            for p in 0..8 {
                prop_assert!(b.pixel_spike_count(p) >= a.pixel_spike_count(p));
            }
        }

        #[test]
        fn simulation_is_deterministic(seed in any::<u64>()) {
            let c = cfg(ResetMode::Hard).with_init(InitPolicy::UniformRandom(seed)).unwrap();
            let scene = FnScene { width: 6, height: 5, n_frames: 30, f: |n: usize, x: usize, y: usize| ((n + x * 3 + y * 7) % 11) as f64 / 10.0 };
            prop_assert_eq!(simulate(&scene, &c).unwrap(), simulate(&scene, &c).unwrap());
        }
    }
}
