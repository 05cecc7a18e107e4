//! Inter-spike interval views of a spike stream.

use super::ReprError;
use crate::stream::SpikeStream;

/// Per-frame, per-pixel enclosing interval. `0` marks frames before a
/// pixel's first spike and at/after its last spike.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsiField {
    width: usize,
    height: usize,
    n_frames: usize,
    values: Vec<u32>,
}

pub const ISI_UNDEFINED: u32 = 0;

impl IsiField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    /// Row-major values of frame `n`.
    pub fn frame(&self, n: usize) -> &[u32] {
        let px = self.pixels();
        &self.values[n * px..(n + 1) * px]
    }

    pub fn get(&self, n: usize, pixel: usize) -> u32 {
        self.values[n * self.pixels() + pixel]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != ISI_UNDEFINED).count()
    }
}

/// Elementwise reciprocal of an [`IsiField`]; `0.0` where the ISI is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct FiringRateField {
    width: usize,
    height: usize,
    n_frames: usize,
    values: Vec<f64>,
}

impl FiringRateField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn frame(&self, n: usize) -> &[f64] {
        let px = self.width * self.height;
        &self.values[n * px..(n + 1) * px]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Lossless interval encoding of one pixel.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PixelIsi {
    pub first_spike: Option<u32>,
    pub intervals: Vec<u32>,
}

/// Lossless interval encoding of a whole stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsiRepr {
    pub width: usize,
    pub height: usize,
    pub n_frames: usize,
    pub pixels: Vec<PixelIsi>,
}

fn fill_pixel(values: &mut [u32], pixels: usize, pixel: usize, times: &[usize]) {
    for w in times.windows(2) {
        let gap = (w[1] - w[0]) as u32;
        for n in w[0]..w[1] {
            values[n * pixels + pixel] = gap;
        }
    }
}

pub fn spikes_to_isi(stream: &SpikeStream) -> IsiField {
    let px = stream.pixels();
    let mut values = vec![ISI_UNDEFINED; px * stream.n_frames()];
    for (p, times) in stream.all_spike_times().iter().enumerate() {
        fill_pixel(&mut values, px, p, times);
    }
    IsiField {
        width: stream.width(),
        height: stream.height(),
        n_frames: stream.n_frames(),
        values,
    }
}

/// Enclosing ISI of every pixel at a single frame, without building the
/// full field.
pub fn isi_at_frame(stream: &SpikeStream, k: usize) -> Vec<u32> {
    (0..stream.pixels())
        .map(|p| {
            let prev = (0..=k).rev().find(|&n| stream.get(n, p));
            let next = (k + 1..stream.n_frames()).find(|&n| stream.get(n, p));
            match (prev, next) {
                (Some(a), Some(b)) => (b - a) as u32,
                _ => ISI_UNDEFINED,
            }
        })
        .collect()
}

pub fn firing_rate(field: &IsiField) -> FiringRateField {
    FiringRateField {
        width: field.width,
        height: field.height,
        n_frames: field.n_frames,
        values: field
            .values
            .iter()
            .map(|&v| {
                if v == ISI_UNDEFINED {
                    0.0
                } else {
                    1.0 / v as f64
                }
            })
            .collect(),
    }
}

pub fn spikes_to_isi_repr(stream: &SpikeStream) -> IsiRepr {
    let pixels = stream
        .all_spike_times()
        .into_iter()
        .map(|times| PixelIsi {
            first_spike: times.first().map(|&t| t as u32),
            intervals: times.windows(2).map(|w| (w[1] - w[0]) as u32).collect(),
        })
        .collect();
    IsiRepr {
        width: stream.width(),
        height: stream.height(),
        n_frames: stream.n_frames(),
        pixels,
    }
}

pub fn isi_repr_to_spikes(repr: &IsiRepr) -> Result<SpikeStream, ReprError> {
    let expected = repr.width * repr.height;
    if repr.pixels.len() != expected {
        return Err(ReprError::PixelCount {
            expected,
            got: repr.pixels.len(),
        });
    }
    let mut out = SpikeStream::zeros(repr.width, repr.height, repr.n_frames)?;
    for (p, px) in repr.pixels.iter().enumerate() {
        let Some(first) = px.first_spike else {
            if !px.intervals.is_empty() {
                return Err(ReprError::IntervalsWithoutFirstSpike { pixel: p });
            }
            continue;
        };
        let mut t = first as u64;
        if t >= repr.n_frames as u64 {
            return Err(ReprError::SpikePastEnd { pixel: p, frame: t });
        }
        out.set(t as usize, p, true);
        for &gap in &px.intervals {
            if gap == 0 {
                return Err(ReprError::ZeroInterval { pixel: p });
            }
            t += gap as u64;
            if t >= repr.n_frames as u64 {
                return Err(ReprError::SpikePastEnd { pixel: p, frame: t });
            }
            out.set(t as usize, p, true);
        }
    }
    Ok(out)
}
