//! Binary spike planes, bit-packed.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StreamError {
    #[error("spike stream dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("plane {index} has {got} pixels, expected {expected}")]
    PlaneSize {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("frame range {start}..{end} exceeds stream length {len}")]
    FrameRange {
        start: usize,
        end: usize,
        len: usize,
    },
}

/// One `width x height` binary grid, stored as 64-bit words over the
/// row-major pixel index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpikePlane {
    words: Vec<u64>,
}

impl SpikePlane {
    fn zeroed(pixels: usize) -> Self {
        Self {
            words: vec![0; pixels.div_ceil(64)],
        }
    }

    #[inline]
    pub fn get(&self, pixel: usize) -> bool {
        (self.words[pixel >> 6] >> (pixel & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pixel: usize, value: bool) {
        let mask = 1u64 << (pixel & 63);
        if value {
            self.words[pixel >> 6] |= mask;
        } else {
            self.words[pixel >> 6] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }
}

/// A sequence of spike planes over a fixed pixel grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpikeStream {
    width: usize,
    height: usize,
    planes: Vec<SpikePlane>,
}

impl SpikeStream {
    pub fn zeros(width: usize, height: usize, n_frames: usize) -> Result<Self, StreamError> {
        if width == 0 || height == 0 {
            return Err(StreamError::EmptyDimensions { width, height });
        }
        Ok(Self {
            width,
            height,
            planes: vec![SpikePlane::zeroed(width * height); n_frames],
        })
    }

    /// Builds a stream from per-frame row-major boolean grids.
    pub fn from_bool_planes(
        width: usize,
        height: usize,
        planes: &[Vec<bool>],
    ) -> Result<Self, StreamError> {
        let mut s = Self::zeros(width, height, planes.len())?;
        for (index, bits) in planes.iter().enumerate() {
            if bits.len() != width * height {
                return Err(StreamError::PlaneSize {
                    index,
                    expected: width * height,
                    got: bits.len(),
                });
            }
            for (p, &b) in bits.iter().enumerate() {
                if b {
                    s.planes[index].set(p, true);
                }
            }
        }
        Ok(s)
    }

    /// Builds a stream where pixel `p` spikes at each frame listed in `times[p]`.
    pub fn from_spike_times(
        width: usize,
        height: usize,
        n_frames: usize,
        times: &[Vec<usize>],
    ) -> Result<Self, StreamError> {
        let mut s = Self::zeros(width, height, n_frames)?;
        for (p, ts) in times.iter().enumerate() {
            for &t in ts {
                s.set(t, p, true);
            }
        }
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn n_frames(&self) -> usize {
        self.planes.len()
    }

    pub fn planes(&self) -> &[SpikePlane] {
        &self.planes
    }

    pub fn plane(&self, n: usize) -> &SpikePlane {
        &self.planes[n]
    }

    pub(crate) fn push_plane(&mut self, plane: SpikePlane) {
        debug_assert_eq!(plane.words.len(), self.pixels().div_ceil(64));
        self.planes.push(plane);
    }

    pub(crate) fn empty_plane(&self) -> SpikePlane {
        SpikePlane::zeroed(self.pixels())
    }

    #[inline]
    pub fn get(&self, frame: usize, pixel: usize) -> bool {
        self.planes[frame].get(pixel)
    }

    #[inline]
    pub fn get_xy(&self, frame: usize, x: usize, y: usize) -> bool {
        self.planes[frame].get(y * self.width + x)
    }

    #[inline]
    pub fn set(&mut self, frame: usize, pixel: usize, value: bool) {
        self.planes[frame].set(pixel, value);
    }

    pub fn spike_count(&self) -> usize {
        self.planes.iter().map(SpikePlane::count_ones).sum()
    }

    pub fn pixel_spike_count(&self, pixel: usize) -> usize {
        self.planes.iter().filter(|p| p.get(pixel)).count()
    }

    /// Frame indices at which `pixel` fired, ascending.
    pub fn spike_times(&self, pixel: usize) -> Vec<usize> {
        self.planes
            .iter()
            .enumerate()
            .filter_map(|(n, p)| p.get(pixel).then_some(n))
            .collect()
    }

    /// Spike times for every pixel, gathered in one pass over the planes.
    pub fn all_spike_times(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.pixels()];
        for (n, plane) in self.planes.iter().enumerate() {
            for (wi, &w) in plane.words.iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    out[(wi << 6) + b].push(n);
                    bits &= bits - 1;
                }
            }
        }
        out
    }

    /// Copy of frames `start..end`.
    pub fn slice_frames(&self, start: usize, end: usize) -> Result<Self, StreamError> {
        if start > end || end > self.planes.len() {
            return Err(StreamError::FrameRange {
                start,
                end,
                len: self.planes.len(),
            });
        }
        Ok(Self {
            width: self.width,
            height: self.height,
            planes: self.planes[start..end].to_vec(),
        })
    }

    /// Number of differing bits; `None` when shapes differ.
    pub fn hamming_distance(&self, other: &Self) -> Option<usize> {
        if self.width != other.width
            || self.height != other.height
            || self.planes.len() != other.planes.len()
        {
            return None;
        }
        Some(
            self.planes
                .iter()
                .zip(&other.planes)
                .flat_map(|(a, b)| a.words.iter().zip(&b.words))
                .map(|(a, b)| (a ^ b).count_ones() as usize)
                .sum(),
        )
    }
}
