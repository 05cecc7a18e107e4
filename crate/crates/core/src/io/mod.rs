//! File formats: `SPK1` spike files, binary PGM frames, numbered scene
//! directories and CSV tables.

mod csv;
mod pgm;
mod spk;

use std::path::PathBuf;

use thiserror::Error;

pub use csv::{
    grid_report_csv, initial_state_csv, isi_stats_csv, parse_rd_csv, rd_csv, RD_CSV_HEADER,
};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, read_scene_dir, write_pgm, write_scene_dir};
pub use spk::{
    decode_spike_file, encode_spike_file, read_spike_file, write_spike_file, SPK_HEADER_LEN,
};

use crate::scene::SceneError;
use crate::stream::StreamError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad magic bytes (expected {expected})")]
    BadMagic { expected: &'static str },
    #[error("file truncated: {got} bytes, need at least {need}")]
    Truncated { got: usize, need: usize },
    #[error("length mismatch: header implies {expected} bytes, file has {got}")]
    LengthMismatch { expected: u64, got: usize },
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),
    #[error("unsupported PGM maxval {0} (only 255)")]
    UnsupportedMaxval(u32),
    #[error("scene directory: {0}")]
    SceneDir(String),
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

impl IoError {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::File {
            path: path.into(),
            source,
        }
    }
}
