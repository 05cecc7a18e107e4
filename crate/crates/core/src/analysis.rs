//! Spatial predictability of spike, ISI and scene grids, ISI distribution
//! statistics, and initial-state sweeps of a single pixel.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::registry::{no_argument, Registry, RegistryError};
use crate::representation::{
    firing_rate, isi_at_frame, reconstruct_tfp, IsiField, ReprError, ISI_UNDEFINED,
    TFI_FALLBACK_WINDOW,
};
use crate::scene::SceneFrame;
use crate::spike_model::{simulate_trace, SimulatorConfig};
use crate::stream::SpikeStream;

pub const DEFAULT_VALUE_BINS: usize = 32;
pub const DEFAULT_COND_BINS: usize = 32;
/// Spike grids are binary, so only two value bins are meaningful.
pub const SPIKE_VALUE_BINS: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("grid {width}x{height} is too small for radius {radius}")]
    GridTooSmall {
        width: usize,
        height: usize,
        radius: usize,
    },
    #[error("radius must be at least 1")]
    Radius,
    #[error("bin counts must be at least 2, got {0}")]
    Bins(usize),
    #[error("grid has {got} values, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("initial state {value} is outside [0, theta={theta})")]
    InitialState { value: f64, theta: f64 },
    #[error(transparent)]
    Repr(#[from] ReprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReprKind {
    Spike,
    Isi,
    Scene,
}

impl ReprKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReprKind::Spike => "spike",
            ReprKind::Isi => "isi",
            ReprKind::Scene => "scene",
        }
    }

    pub fn default_value_bins(self) -> usize {
        match self {
            ReprKind::Spike => SPIKE_VALUE_BINS,
            _ => DEFAULT_VALUE_BINS,
        }
    }
}

/// A single 2D grid normalized to `[0, 1]`, tagged with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationGrid {
    width: usize,
    height: usize,
    values: Vec<f64>,
    kind: ReprKind,
    normalization: &'static str,
}

impl RepresentationGrid {
    pub fn new(
        width: usize,
        height: usize,
        values: Vec<f64>,
        kind: ReprKind,
        normalization: &'static str,
    ) -> Result<Self, AnalysisError> {
        if values.len() != width * height {
            return Err(AnalysisError::Length {
                expected: width * height,
                got: values.len(),
            });
        }
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(Self {
            width,
            height,
            values,
            kind,
            normalization,
        })
    }

    pub fn from_scene(frame: &SceneFrame) -> Self {
        Self {
            width: frame.width(),
            height: frame.height(),
            values: frame.data().to_vec(),
            kind: ReprKind::Scene,
            normalization: "luminance",
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ReprKind {
        self.kind
    }

    /// How raw values were mapped into `[0, 1]`.
    pub fn normalization(&self) -> &'static str {
        self.normalization
    }

    pub fn transposed(&self) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                values[x * self.height + y] = self.values[y * self.width + x];
            }
        }
        Self {
            width: self.height,
            height: self.width,
            values,
            ..*self
        }
    }
}

/// Turns one frame of a spike stream into a grid of a given representation.
pub trait RepresentationExtractor: Send + Sync {
    fn kind(&self) -> ReprKind;
    fn extract(
        &self,
        stream: &SpikeStream,
        k: usize,
        cfg: &SimulatorConfig,
    ) -> Result<RepresentationGrid, AnalysisError>;
}

struct SpikeExtractor;
struct IsiExtractor;
struct SceneExtractor {
    window: usize,
}

fn check_frame(stream: &SpikeStream, k: usize) -> Result<(), AnalysisError> {
    if k >= stream.n_frames() {
        return Err(ReprError::FrameIndex {
            k,
            n_frames: stream.n_frames(),
        }
        .into());
    }
    Ok(())
}

impl RepresentationExtractor for SpikeExtractor {
    fn kind(&self) -> ReprKind {
        ReprKind::Spike
    }

    fn extract(
        &self,
        stream: &SpikeStream,
        k: usize,
        _cfg: &SimulatorConfig,
    ) -> Result<RepresentationGrid, AnalysisError> {
        check_frame(stream, k)?;
        let plane = stream.plane(k);
        let values = (0..stream.pixels())
            .map(|p| if plane.get(p) { 1.0 } else { 0.0 })
            .collect();
        RepresentationGrid::new(
            stream.width(),
            stream.height(),
            values,
            ReprKind::Spike,
            "binary",
        )
    }
}

impl RepresentationExtractor for IsiExtractor {
    fn kind(&self) -> ReprKind {
        ReprKind::Isi
    }

    fn extract(
        &self,
        stream: &SpikeStream,
        k: usize,
        _cfg: &SimulatorConfig,
    ) -> Result<RepresentationGrid, AnalysisError> {
        check_frame(stream, k)?;
        isi_grid(stream.width(), stream.height(), &isi_at_frame(stream, k))
    }
}

impl RepresentationExtractor for SceneExtractor {
    fn kind(&self) -> ReprKind {
        ReprKind::Scene
    }

    fn extract(
        &self,
        stream: &SpikeStream,
        k: usize,
        cfg: &SimulatorConfig,
    ) -> Result<RepresentationGrid, AnalysisError> {
        let frame = reconstruct_tfp(stream, k, self.window, cfg)?;
        Ok(RepresentationGrid::from_scene(&frame))
    }
}

/// ISI values normalized as firing rate `1/ISI`; undefined positions map to 0.
pub fn isi_grid(
    width: usize,
    height: usize,
    isi: &[u32],
) -> Result<RepresentationGrid, AnalysisError> {
    let values = isi
        .iter()
        .map(|&v| {
            if v == ISI_UNDEFINED {
                0.0
            } else {
                1.0 / v as f64
            }
        })
        .collect();
    RepresentationGrid::new(width, height, values, ReprKind::Isi, "firing_rate")
}

/// Registry of representation extractors: `spike`, `isi`, `scene[:W]`.
pub fn representations() -> &'static Registry<dyn RepresentationExtractor> {
    static REGISTRY: OnceLock<Registry<dyn RepresentationExtractor>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn RepresentationExtractor> = Registry::new("representation");
        r.register("spike", "binary spike plane", |a| {
            no_argument("spike", a)?;
            Ok(Box::new(SpikeExtractor))
        })
        .expect("fresh registry");
        r.register("isi", "enclosing ISI as firing rate 1/ISI", |a| {
            no_argument("isi", a)?;
            Ok(Box::new(IsiExtractor))
        })
        .expect("fresh registry");
        r.register("scene", "windowed firing-rate scene, scene:W", |a| {
            let window = match a {
                None => TFI_FALLBACK_WINDOW,
                Some(s) => s
                    .parse()
                    .ok()
                    .filter(|w: &usize| w % 2 == 1)
                    .ok_or_else(|| RegistryError::BadArgument {
                        name: "scene".into(),
                        reason: format!("window '{s}' must be an odd positive integer"),
                    })?,
            };
            Ok(Box::new(SceneExtractor { window }))
        })
        .expect("fresh registry");
        r
    })
}

/// Summed-area table with a zero border row and column.
struct Integral {
    stride: usize,
    sums: Vec<f64>,
}

impl Integral {
    fn new(grid: &RepresentationGrid) -> Self {
        let stride = grid.width + 1;
        let mut sums = vec![0.0; stride * (grid.height + 1)];
        for y in 0..grid.height {
            let mut row = 0.0;
            for x in 0..grid.width {
                row += grid.values[y * grid.width + x];
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Self { stride, sums }
    }

    /// Sum over the inclusive box `[x0, x1] x [y0, y1]`.
    fn box_sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
        let s = self.stride;
        self.sums[(y1 + 1) * s + x1 + 1] - self.sums[y0 * s + x1 + 1] - self.sums[(y1 + 1) * s + x0]
            + self.sums[y0 * s + x0]
    }
}

/// Neighborhood-mean prediction for every interior pixel, paired with the
/// pixel's own value.
fn neighborhood_pairs(
    grid: &RepresentationGrid,
    radius: usize,
    include_center: bool,
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if radius == 0 {
        return Err(AnalysisError::Radius);
    }
    let side = 2 * radius + 1;
    if grid.width < side || grid.height < side {
        return Err(AnalysisError::GridTooSmall {
            width: grid.width,
            height: grid.height,
            radius,
        });
    }
    let integral = Integral::new(grid);
    let full = (side * side) as f64;
    let mut out = Vec::with_capacity((grid.width - 2 * radius) * (grid.height - 2 * radius));
    for y in radius..grid.height - radius {
        for x in radius..grid.width - radius {
            let v = grid.values[y * grid.width + x];
            let s = integral.box_sum(x - radius, y - radius, x + radius, y + radius);
            let pred = if include_center {
                s / full
            } else {
                (s - v) / (full - 1.0)
            };
            out.push((pred, v));
        }
    }
    Ok(out)
}

/// Pairwise summation, fixed order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Mean squared error of predicting each interior pixel by the mean of its
/// `(2r+1)^2 - 1` neighbors.
pub fn neighborhood_variance(
    grid: &RepresentationGrid,
    radius: usize,
) -> Result<f64, AnalysisError> {
    neighborhood_variance_with(grid, radius, false)
}

/// As [`neighborhood_variance`], optionally folding the center into the mean.
pub fn neighborhood_variance_with(
    grid: &RepresentationGrid,
    radius: usize,
    include_center: bool,
) -> Result<f64, AnalysisError> {
    let pairs = neighborhood_pairs(grid, radius, include_center)?;
    let sq: Vec<f64> = pairs.iter().map(|(p, v)| (p - v) * (p - v)).collect();
    Ok(pairwise_sum(&sq) / sq.len() as f64)
}

#[inline]
fn bin(v: f64, bins: usize) -> usize {
    ((v * bins as f64) as usize).min(bins - 1)
}

fn entropy_bits(counts: impl Iterator<Item = u64>, total: u64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

/// `H(X | C)` in bits, where `X` is the quantized pixel value and `C` the
/// quantized neighborhood mean, over interior pixels.
pub fn conditional_entropy(
    grid: &RepresentationGrid,
    radius: usize,
    value_bins: usize,
    cond_bins: usize,
) -> Result<f64, AnalysisError> {
    for b in [value_bins, cond_bins] {
        if b < 2 {
            return Err(AnalysisError::Bins(b));
        }
    }
    let pairs = neighborhood_pairs(grid, radius, false)?;
    let mut joint = vec![0u64; value_bins * cond_bins];
    for &(pred, v) in &pairs {
        joint[bin(pred, cond_bins) * value_bins + bin(v, value_bins)] += 1;
    }
    let total = pairs.len() as u64;
    let h = joint
        .chunks(value_bins)
        .map(|row| {
            let n: u64 = row.iter().sum();
            if n == 0 {
                0.0
            } else {
                n as f64 / total as f64 * entropy_bits(row.iter().copied(), n)
            }
        })
        .sum();
    Ok(h)
}

/// Entropy of quantized interior pixel values, the unconditional
/// counterpart of [`conditional_entropy`].
pub fn quantized_entropy(
    grid: &RepresentationGrid,
    radius: usize,
    value_bins: usize,
) -> Result<f64, AnalysisError> {
    if value_bins < 2 {
        return Err(AnalysisError::Bins(value_bins));
    }
    let pairs = neighborhood_pairs(grid, radius, false)?;
    let mut counts = vec![0u64; value_bins];
    for &(_, v) in &pairs {
        counts[bin(v, value_bins)] += 1;
    }
    Ok(entropy_bits(counts.into_iter(), pairs.len() as u64))
}

/// Predictability metrics of one grid at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub kind: ReprKind,
    pub normalization: &'static str,
    pub radius: usize,
    pub value_bins: usize,
    pub cond_bins: usize,
    pub variance: f64,
    pub conditional_entropy: f64,
    pub entropy: f64,
}

impl GridReport {
    /// Conditioning never increases entropy.
    pub fn entropy_consistent(&self) -> bool {
        self.conditional_entropy <= self.entropy + 1e-9
    }

    /// Spike conditional entropy is bounded by its binary alphabet and is
    /// not comparable to the other representations.
    pub fn entropy_comparable(&self) -> bool {
        self.kind != ReprKind::Spike
    }
}

pub fn grid_report(
    grid: &RepresentationGrid,
    radius: usize,
    value_bins: usize,
    cond_bins: usize,
) -> Result<GridReport, AnalysisError> {
    let report = GridReport {
        kind: grid.kind,
        normalization: grid.normalization,
        radius,
        value_bins,
        cond_bins,
        variance: neighborhood_variance(grid, radius)?,
        conditional_entropy: conditional_entropy(grid, radius, value_bins, cond_bins)?,
        entropy: quantized_entropy(grid, radius, value_bins)?,
    };
    debug_assert!(report.entropy_consistent());
    Ok(report)
}

/// Distribution of inter-spike intervals, each pixel-interval counted once.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiStats {
    pub histogram: BTreeMap<u32, u64>,
    pub count: u64,
    /// `(q1, median, q3)`; `None` when no interval is defined.
    pub quartiles: Option<(f64, f64, f64)>,
}

pub fn isi_distribution(field: &IsiField) -> IsiStats {
    let mut frames_per_value: BTreeMap<u32, u64> = BTreeMap::new();
    for &v in field.values() {
        if v != ISI_UNDEFINED {
            *frames_per_value.entry(v).or_default() += 1;
        }
    }
    // An interval of length v occupies exactly v frames of its pixel.
    let histogram: BTreeMap<u32, u64> = frames_per_value
        .into_iter()
        .map(|(v, frames)| (v, frames / v as u64))
        .collect();
    stats_from_histogram(histogram)
}

pub fn stats_from_histogram(histogram: BTreeMap<u32, u64>) -> IsiStats {
    let count: u64 = histogram.values().sum();
    let quartiles = (count > 0).then(|| {
        (
            quantile(&histogram, count, 0.25),
            quantile(&histogram, count, 0.5),
            quantile(&histogram, count, 0.75),
        )
    });
    IsiStats {
        histogram,
        count,
        quartiles,
    }
}

/// Linear interpolation between order statistics at position `q (n - 1)`.
fn quantile(hist: &BTreeMap<u32, u64>, n: u64, q: f64) -> f64 {
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as u64;
    let hi = pos.ceil() as u64;
    let order_stat = |i: u64| -> f64 {
        let mut seen = 0;
        for (&v, &c) in hist {
            seen += c;
            if i < seen {
                return v as f64;
            }
        }
        unreachable!("index within count")
    };
    let (a, b) = (order_stat(lo), order_stat(hi));
    a + (b - a) * (pos - lo as f64)
}

/// One pixel's response to a luminance trace from a given initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrace {
    pub tau0: f64,
    pub hidden: Vec<f64>,
    pub fired: Vec<bool>,
    /// Enclosing ISI per frame, 0 where undefined.
    pub isi: Vec<u32>,
}

impl StateTrace {
    pub fn spike_times(&self) -> Vec<usize> {
        self.fired
            .iter()
            .enumerate()
            .filter_map(|(n, &f)| f.then_some(n))
            .collect()
    }

    /// Intervals between consecutive spikes.
    pub fn intervals(&self) -> Vec<u32> {
        self.spike_times()
            .windows(2)
            .map(|w| (w[1] - w[0]) as u32)
            .collect()
    }
}

pub fn initial_state_sweep(
    luminance: &[f64],
    cfg: &SimulatorConfig,
    taus: &[f64],
) -> Result<Vec<StateTrace>, AnalysisError> {
    taus.iter()
        .map(|&tau0| {
            if !(0.0..cfg.theta()).contains(&tau0) {
                return Err(AnalysisError::InitialState {
                    value: tau0,
                    theta: cfg.theta(),
                });
            }
            let trace = simulate_trace(luminance, tau0, cfg);
            let fired: Vec<bool> = trace.iter().map(|t| t.1).collect();
            let mut isi = vec![ISI_UNDEFINED; luminance.len()];
            let times: Vec<usize> = fired
                .iter()
                .enumerate()
                .filter_map(|(n, &f)| f.then_some(n))
                .collect();
            for w in times.windows(2) {
                isi[w[0]..w[1]].fill((w[1] - w[0]) as u32);
            }
            Ok(StateTrace {
                tau0,
                hidden: trace.iter().map(|t| t.0).collect(),
                fired,
                isi,
            })
        })
        .collect()
}

/// Firing-rate grid from a full ISI field frame.
pub fn firing_rate_grid(field: &IsiField, k: usize) -> Result<RepresentationGrid, AnalysisError> {
    let fr = firing_rate(field);
    RepresentationGrid::new(
        field.width(),
        field.height(),
        fr.frame(k).to_vec(),
        ReprKind::Isi,
        "firing_rate",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::spikes_to_isi;
    use crate::spike_model::{InitPolicy, ResetMode};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(w: usize, h: usize, mut f: impl FnMut(usize, usize) -> f64) -> RepresentationGrid {
        let values = (0..w * h).map(|i| f(i % w, i / w)).collect();
        RepresentationGrid::new(w, h, values, ReprKind::Scene, "luminance").unwrap()
    }

    /// Direct double loop over the neighborhood, no summed-area table.
    fn brute_variance(g: &RepresentationGrid, r: usize) -> f64 {
        let (w, h) = (g.width(), g.height());
        let mut acc = 0.0;
        let mut n = 0;
        for y in r..h - r {
            for x in r..w - r {
                let mut s = 0.0;
                for yy in y - r..=y + r {
                    for xx in x - r..=x + r {
                        if (xx, yy) != (x, y) {
                            s += g.values()[yy * w + xx];
                        }
                    }
                }
                let p = s / ((2 * r + 1) * (2 * r + 1) - 1) as f64;
                let v = g.values()[y * w + x];
                acc += (p - v) * (p - v);
                n += 1;
            }
        }
        acc / n as f64
    }

    #[test]
    fn constant_grid_is_perfectly_predictable() {
        let g = grid(9, 7, |_, _| 0.3);
        for r in 1..=3 {
            assert!(neighborhood_variance(&g, r).unwrap() < 1e-20);
            assert_eq!(conditional_entropy(&g, r, 32, 32).unwrap(), 0.0);
        }
    }

    #[test]
    fn checkerboard_variance() {
        // Four edge neighbors are 1 - x, four diagonal neighbors equal x,
        // so the predictor is always 0.5.
        let g = grid(10, 10, |x, y| ((x + y) % 2) as f64);
        assert!((brute_variance(&g, 1) - 0.25).abs() < 1e-12);
        assert!((neighborhood_variance(&g, 1).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn too_small_grid_rejected() {
        let g = grid(4, 4, |_, _| 0.0);
        assert!(matches!(
            neighborhood_variance(&g, 2),
            Err(AnalysisError::GridTooSmall { .. })
        ));
        assert!(matches!(
            conditional_entropy(&g, 2, 2, 2),
            Err(AnalysisError::GridTooSmall { .. })
        ));
        assert_eq!(
            conditional_entropy(&g, 1, 1, 2),
            Err(AnalysisError::Bins(1))
        );
    }

    #[test]
    fn independent_noise_has_one_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = grid(512, 512, |_, _| rng.gen::<f64>());
        let h = conditional_entropy(&g, 1, 2, 2).unwrap();
        assert!((h - 1.0).abs() < 0.02, "h = {h}");
    }

    #[test]
    fn center_switch_changes_predictor() {
        let g = grid(10, 10, |x, y| ((x * 7 + y * 3) % 5) as f64 / 4.0);
        let ex = neighborhood_variance_with(&g, 1, false).unwrap();
        let inc = neighborhood_variance_with(&g, 1, true).unwrap();
        assert!(inc < ex);
    }

    #[test]
    fn isi_distribution_examples() {
        let s =
            SpikeStream::from_spike_times(2, 1, 40, &[(3..40).step_by(4).collect(), vec![1, 5, 9]])
                .unwrap();
        let stats = isi_distribution(&spikes_to_isi(&s));
        assert_eq!(stats.histogram.get(&4), Some(&(9 + 2)));
        assert_eq!(stats.quartiles, Some((4.0, 4.0, 4.0)));
        let empty = isi_distribution(&spikes_to_isi(&SpikeStream::zeros(3, 3, 9).unwrap()));
        assert_eq!(empty.count, 0);
        assert_eq!(empty.quartiles, None);
    }

    #[test]
    fn quartiles_interpolate() {
        let hist: BTreeMap<u32, u64> = [(1, 1), (2, 1), (3, 1), (4, 1)].into_iter().collect();
        let s = stats_from_histogram(hist);
        assert_eq!(s.quartiles, Some((1.75, 2.5, 3.25)));
    }

    #[test]
    fn sweep_examples() {
        let cfg =
            SimulatorConfig::new(1.0, 2.0, ResetMode::Hard, InitPolicy::Constant(0.0)).unwrap();
        let t = initial_state_sweep(&[0.5; 40], &cfg, &[0.0]).unwrap();
        let defined: Vec<u32> = t[0].isi.iter().copied().filter(|&v| v != 0).collect();
        assert!(!defined.is_empty());
        assert!(defined.iter().all(|&v| v == 4));

        let t = initial_state_sweep(&[0.0; 40], &cfg, &[0.2, 1.0]).unwrap();
        assert!(t
            .iter()
            .all(|tr| tr.intervals().is_empty() && tr.isi.iter().all(|&v| v == 0)));

        assert!(matches!(
            initial_state_sweep(&[0.5; 4], &cfg, &[2.0]),
            Err(AnalysisError::InitialState { .. })
        ));
    }

    #[test]
    fn sweep_hard_reset_constant_intervals_identical() {
        let cfg =
            SimulatorConfig::new(1.0, 2.0, ResetMode::Hard, InitPolicy::Constant(0.0)).unwrap();
        let taus = [0.2, 1.0, 1.8];
        let traces = initial_state_sweep(&[0.3; 200], &cfg, &taus).unwrap();
        let firsts: Vec<usize> = traces.iter().map(|t| t.spike_times()[0]).collect();
        assert!(firsts.windows(2).any(|w| w[0] != w[1]));
        for t in &traces[1..] {
            let a = &traces[0].intervals();
            let b = &t.intervals();
            let n = a.len().min(b.len());
            assert_eq!(a[..n], b[..n]);
        }
    }

    #[test]
    fn representation_registry() {
        let s = SpikeStream::from_spike_times(3, 3, 20, &vec![vec![2, 6, 10]; 9]).unwrap();
        let cfg = SimulatorConfig::default();
        let spike = representations()
            .create("spike")
            .unwrap()
            .extract(&s, 6, &cfg)
            .unwrap();
        assert!(spike.values().iter().all(|&v| v == 1.0));
        let isi = representations()
            .create("isi")
            .unwrap()
            .extract(&s, 6, &cfg)
            .unwrap();
        assert!(isi.values().iter().all(|&v| v == 0.25));
        let scene = representations()
            .create("scene:5")
            .unwrap()
            .extract(&s, 6, &cfg)
            .unwrap();
        assert_eq!(scene.kind(), ReprKind::Scene);
        assert!(representations().create("scene:4").is_err());
        assert!(representations().create("voxel").is_err());
    }

    proptest! {
        #[test]
        fn variance_matches_brute_force(seed in any::<u64>(), w in 5usize..14, h in 5usize..14, r in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = grid(w, h, |_, _| rng.gen::<f64>());
            prop_assert!((neighborhood_variance(&g, r).unwrap() - brute_variance(&g, r)).abs() < 1e-12);
        }

        #[test]
        fn transposition_invariance(seed in any::<u64>(), w in 5usize..20, h in 5usize..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = grid(w, h, |_, _| rng.gen::<f64>());
            let t = g.transposed();
            prop_assert!((neighborhood_variance(&g, 1).unwrap() - neighborhood_variance(&t, 1).unwrap()).abs() < 1e-12);
            prop_assert!((conditional_entropy(&g, 2, 8, 8).unwrap() - conditional_entropy(&t, 2, 8, 8).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn conditioning_never_increases_entropy(seed in any::<u64>(), bins in 2usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = grid(24, 24, |x, _| (x as f64 / 24.0 + rng.gen::<f64>() * 0.2).min(1.0));
            let report = grid_report(&g, 1, bins, bins).unwrap();
            prop_assert!(report.entropy_consistent());
        }
    }
}
