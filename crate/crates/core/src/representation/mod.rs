//! Conversions between spike, interval, firing-rate and scene views, and
//! keyframe scheduling.

mod isi;
mod reconstruct;
mod schedule;

use thiserror::Error;

pub use isi::{
    firing_rate, isi_at_frame, isi_repr_to_spikes, spikes_to_isi, spikes_to_isi_repr,
    FiringRateField, IsiField, IsiRepr, PixelIsi, ISI_UNDEFINED,
};
pub use reconstruct::{
    reconstruct_tfi, reconstruct_tfp, reconstructors, ReconstructionKind, SceneReconstructor, Tfi,
    Tfp, TFI_FALLBACK_WINDOW,
};
pub use schedule::{keyframe_schedule, KeyframeSchedule};

use crate::scene::SceneError;
use crate::stream::StreamError;

#[derive(Debug, Error, PartialEq)]
pub enum ReprError {
    #[error("representation has {got} pixels, expected {expected}")]
    PixelCount { expected: usize, got: usize },
    #[error("pixel {pixel}: reconstructed spike at frame {frame} is past the end of the stream")]
    SpikePastEnd { pixel: usize, frame: u64 },
    #[error("pixel {pixel}: intervals must be at least 1")]
    ZeroInterval { pixel: usize },
    #[error("pixel {pixel}: intervals given without a first spike")]
    IntervalsWithoutFirstSpike { pixel: usize },
    #[error("window length {0} must be odd and positive")]
    Window(usize),
    #[error("frame {k} is outside a stream of {n_frames} frames")]
    FrameIndex { k: usize, n_frames: usize },
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}
