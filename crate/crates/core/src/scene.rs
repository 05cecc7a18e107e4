//! Luminance frames and sequences.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("frame dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("frame data length {got} does not match {width}x{height}")]
    LengthMismatch {
        width: usize,
        height: usize,
        got: usize,
    },
    #[error("luminance {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("frame {index} is {got_w}x{got_h}, sequence is {width}x{height}")]
    ShapeMismatch {
        index: usize,
        width: usize,
        height: usize,
        got_w: usize,
        got_h: usize,
    },
    #[error("scene sequence has no frames")]
    NoFrames,
}

/// A single luminance grid, row-major, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFrame {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl SceneFrame {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, SceneError> {
        if width == 0 || height == 0 {
            return Err(SceneError::EmptyDimensions { width, height });
        }
        if data.len() != width * height {
            return Err(SceneError::LengthMismatch {
                width,
                height,
                got: data.len(),
            });
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(SceneError::OutOfRange { index, value });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a frame, clamping every value into `[0, 1]` (NaN maps to 0).
    pub fn from_clamped(
        width: usize,
        height: usize,
        mut data: Vec<f64>,
    ) -> Result<Self, SceneError> {
        for v in &mut data {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, SceneError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Anything that can hand out luminance frames one at a time.
///
/// The simulator pulls frames through this trait so long or synthetic
/// sequences never need to be materialized in full.
pub trait SceneSource {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn n_frames(&self) -> usize;
    /// Writes frame `n` into `out` (length `width * height`).
    fn fill_frame(&self, n: usize, out: &mut [f64]);
}

/// An ordered list of equally sized luminance frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSequence {
    width: usize,
    height: usize,
    frames: Vec<SceneFrame>,
}

impl SceneSequence {
    pub fn new(frames: Vec<SceneFrame>) -> Result<Self, SceneError> {
        let first = frames.first().ok_or(SceneError::NoFrames)?;
        let (width, height) = (first.width, first.height);
        for (index, f) in frames.iter().enumerate() {
            if f.width != width || f.height != height {
                return Err(SceneError::ShapeMismatch {
                    index,
                    width,
                    height,
                    got_w: f.width,
                    got_h: f.height,
                });
            }
        }
        Ok(Self {
            width,
            height,
            frames,
        })
    }

    pub fn frames(&self) -> &[SceneFrame] {
        &self.frames
    }

    pub fn frame(&self, n: usize) -> &SceneFrame {
        &self.frames[n]
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

impl SceneSource for SceneSequence {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn n_frames(&self) -> usize {
        self.frames.len()
    }

    fn fill_frame(&self, n: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.frames[n].data);
    }
}

/// The same luminance at every pixel and every frame.
#[derive(Debug, Clone, Copy)]
pub struct ConstantScene {
    pub width: usize,
    pub height: usize,
    pub n_frames: usize,
    pub luminance: f64,
}

impl SceneSource for ConstantScene {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn n_frames(&self) -> usize {
        self.n_frames
    }

    fn fill_frame(&self, _n: usize, out: &mut [f64]) {
        out.fill(self.luminance);
    }
}

/// Scene generated on demand by a closure `(frame, x, y) -> luminance`.
pub struct FnScene<F> {
    pub width: usize,
    pub height: usize,
    pub n_frames: usize,
    pub f: F,
}

impl<F: Fn(usize, usize, usize) -> f64> SceneSource for FnScene<F> {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn n_frames(&self) -> usize {
        self.n_frames
    }

    fn fill_frame(&self, n: usize, out: &mut [f64]) {
        for y in 0..self.height {
            for x in 0..self.width {
                out[y * self.width + x] = (self.f)(n, x, y).clamp(0.0, 1.0);
            }
        }
    }
}
