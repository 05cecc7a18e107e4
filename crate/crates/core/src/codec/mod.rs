//! Scene-mediated spike compression: keyframe reconstruction, transform
//! coding of the keyframe scenes, decoder-side spike regeneration, plus a
//! lossless context-coded baseline.

mod container;
mod frame;
mod lossless;
mod pipeline;
mod range_coder;
mod saliency;

use thiserror::Error;

pub use container::{CodecConfig, CompressedContainer, Payload, CONTAINER_VERSION, HEADER_LEN};
pub use frame::{decode_frame, encode_frame, quality_step, BASE_STEP};
pub use lossless::{decode_spikes_lossless, encode_spikes_lossless};
pub use pipeline::{compress, decompress, Decompressed, KeyframeInterpolation};
pub use range_coder::{
    rc_decode, rc_encode, BitModel, FrequencyModel, ModelSpec, RangeDecoder, RangeEncoder,
};
pub use saliency::{activity_map, SaliencyMap, SALIENCY_CAP};

use crate::registry::RegistryError;
use crate::representation::ReprError;
use crate::scene::SceneError;
use crate::spike_model::ModelError;
use crate::stream::StreamError;

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("input ends before the stream is complete")]
    Truncated,
    #[error("corrupt data: {0}")]
    Corrupt(String),
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported container version {0}")]
    BadVersion(u16),
    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u64, alphabet: usize },
    #[error("expected {expected} symbols but the stream holds {stored}")]
    CountMismatch { expected: usize, stored: usize },
    #[error("{0} unread bytes after the end of the coded data")]
    TrailingData(usize),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("quality {0} outside 1..=100")]
    Quality(u8),
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("schedule empty: {n_frames} frames is below the minimum of {min_frames} for d={d}, s={s}, r={r}")]
    EmptySchedule {
        n_frames: usize,
        min_frames: usize,
        d: usize,
        s: usize,
        r: usize,
    },
    #[error("invalid codec parameter: {0}")]
    Parameter(String),
    #[error("keyframes {got:?} do not match the schedule {expected:?}")]
    KeyframeMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Repr(#[from] ReprError),
    #[error(transparent)]
    Sim(#[from] ModelError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}
