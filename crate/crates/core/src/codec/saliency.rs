//! Temporal-activity saliency used to steer per-block quantization.

use super::CodecError;
use crate::spike_model::SimulatorConfig;
use crate::stream::SpikeStream;

/// Luminance change (in `[0, 1]` units) that maps to full saliency.
pub const SALIENCY_CAP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SaliencyMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, CodecError> {
        if values.len() != width * height {
            return Err(CodecError::DimensionMismatch {
                expected: (width, height),
                got: (values.len(), 1),
            });
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(CodecError::Corrupt("saliency outside [0, 1]".into()));
        }
        Ok(Self {
            width,
            height,
            values,
        })
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

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Firing-rate estimate of one pixel over a window, with its resolution.
#[derive(Clone, Copy)]
struct RateEstimate {
    rate: f64,
    resolution: f64,
}

/// Over frames `[lo, hi]`: the mean-interval rate when at least two spikes
/// fall in the window, otherwise the spike count over the window length,
/// whose resolution is one spike per window.
fn window_rates(times: &[Vec<usize>], lo: usize, hi: usize) -> Vec<RateEstimate> {
    let len = (hi + 1 - lo) as f64;
    times
        .iter()
        .map(|ts| {
            let start = ts.partition_point(|&t| t < lo);
            let end = ts.partition_point(|&t| t <= hi);
            let inside = &ts[start..end];
            match inside {
                [first, .., last] => RateEstimate {
                    rate: (inside.len() - 1) as f64 / (last - first) as f64,
                    resolution: 0.0,
                },
                _ => RateEstimate {
                    rate: inside.len() as f64 / len,
                    resolution: 1.0 / len,
                },
            }
        })
        .collect()
}

/// Saliency at keyframe `k`: absolute firing-rate change between the
/// `window` frames before `k` and the `window` frames from `k` on, in
/// luminance units and capped at [`SALIENCY_CAP`]. Differences within the
/// resolution of a sparse window's estimate count as zero.
pub fn activity_map(
    stream: &SpikeStream,
    k: usize,
    window: usize,
    cfg: &SimulatorConfig,
) -> SaliencyMap {
    let (w, h) = (stream.width(), stream.height());
    let n = stream.n_frames();
    if n == 0 || window == 0 || k == 0 || k >= n {
        return SaliencyMap {
            width: w,
            height: h,
            values: vec![0.0; w * h],
        };
    }
    let times = stream.all_spike_times();
    let before = window_rates(&times, k.saturating_sub(window), k - 1);
    let after = window_rates(&times, k, (k + window - 1).min(n - 1));
    let gain = cfg.theta() / cfg.alpha() / SALIENCY_CAP;
    let values = before
        .iter()
        .zip(&after)
        .map(|(b, a)| {
            let slack = b.resolution.max(a.resolution);
            (((a.rate - b.rate).abs() - slack).max(0.0) * gain).min(1.0)
        })
        .collect();
    SaliencyMap {
        width: w,
        height: h,
        values,
    }
}
