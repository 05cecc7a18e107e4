//! Scene reconstruction strategies.
//!
//! `tfi` inverts the ISI–luminance relation on the interval enclosing the
//! target frame; `tfp:W` scales the spike count of a `W`-frame window.

use std::sync::OnceLock;

use super::isi::{isi_at_frame, ISI_UNDEFINED};
use super::ReprError;
use crate::registry::{no_argument, Registry, RegistryError};
use crate::scene::SceneFrame;
use crate::spike_model::SimulatorConfig;
use crate::stream::SpikeStream;

/// Window used by TFI for pixels without an enclosing interval.
pub const TFI_FALLBACK_WINDOW: usize = 31;

pub trait SceneReconstructor: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn kind(&self) -> ReconstructionKind;
    fn reconstruct(
        &self,
        stream: &SpikeStream,
        k: usize,
        cfg: &SimulatorConfig,
    ) -> Result<SceneFrame, ReprError>;
}

/// Wire-level identity of a reconstruction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReconstructionKind {
    Tfi,
    Tfp { window: u16 },
}

impl Default for ReconstructionKind {
    fn default() -> Self {
        ReconstructionKind::Tfp {
            window: TFI_FALLBACK_WINDOW as u16,
        }
    }
}

impl ReconstructionKind {
    pub fn code(self) -> u8 {
        match self {
            ReconstructionKind::Tfi => 0,
            ReconstructionKind::Tfp { .. } => 1,
        }
    }

    pub fn window(self) -> u16 {
        match self {
            ReconstructionKind::Tfi => 0,
            ReconstructionKind::Tfp { window } => window,
        }
    }

    pub fn from_code(code: u8, window: u16) -> Option<Self> {
        match code {
            0 => Some(ReconstructionKind::Tfi),
            1 => Some(ReconstructionKind::Tfp { window }),
            _ => None,
        }
    }

    /// Spec string understood by [`reconstructors`].
    pub fn spec(self) -> String {
        match self {
            ReconstructionKind::Tfi => "tfi".to_string(),
            ReconstructionKind::Tfp { window } => format!("tfp:{window}"),
        }
    }

    pub fn build(self) -> Result<Box<dyn SceneReconstructor>, RegistryError> {
        reconstructors().create(&self.spec())
    }
}

impl std::str::FromStr for ReconstructionKind {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(reconstructors().create(s)?.kind())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tfi;

#[derive(Debug, Clone, Copy)]
pub struct Tfp {
    window: usize,
}

impl Tfp {
    pub fn new(window: usize) -> Result<Self, ReprError> {
        if window == 0 || window.is_multiple_of(2) || window > u16::MAX as usize {
            return Err(ReprError::Window(window));
        }
        Ok(Self { window })
    }
}

impl SceneReconstructor for Tfi {
    fn name(&self) -> &'static str {
        "tfi"
    }

    fn kind(&self) -> ReconstructionKind {
        ReconstructionKind::Tfi
    }

    fn reconstruct(
        &self,
        stream: &SpikeStream,
        k: usize,
        cfg: &SimulatorConfig,
    ) -> Result<SceneFrame, ReprError> {
        reconstruct_tfi(stream, k, cfg)
    }
}

impl SceneReconstructor for Tfp {
    fn name(&self) -> &'static str {
        "tfp"
    }

    fn kind(&self) -> ReconstructionKind {
        ReconstructionKind::Tfp {
            window: self.window as u16,
        }
    }

    fn reconstruct(
        &self,
        stream: &SpikeStream,
        k: usize,
        cfg: &SimulatorConfig,
    ) -> Result<SceneFrame, ReprError> {
        reconstruct_tfp(stream, k, self.window, cfg)
    }
}

/// Registry of available reconstruction strategies.
pub fn reconstructors() -> &'static Registry<dyn SceneReconstructor> {
    static REGISTRY: OnceLock<Registry<dyn SceneReconstructor>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn SceneReconstructor> = Registry::new("reconstruction");
        r.register(
            "tfi",
            "luminance from the enclosing inter-spike interval",
            |arg| {
                no_argument("tfi", arg)?;
                Ok(Box::new(Tfi))
            },
        )
        .expect("fresh registry");
        r.register(
            "tfp",
            "luminance from the spike count of an odd window, tfp:W",
            |arg| {
                let bad = |reason: String| RegistryError::BadArgument {
                    name: "tfp".into(),
                    reason,
                };
                let w = match arg {
                    None => TFI_FALLBACK_WINDOW,
                    Some(a) => a
                        .parse::<usize>()
                        .map_err(|_| bad(format!("window '{a}' is not an integer")))?,
                };
                Ok(Box::new(Tfp::new(w).map_err(|e| bad(e.to_string()))?))
            },
        )
        .expect("fresh registry");
        r
    })
}

fn check_frame(stream: &SpikeStream, k: usize) -> Result<(), ReprError> {
    if k >= stream.n_frames() {
        return Err(ReprError::FrameIndex {
            k,
            n_frames: stream.n_frames(),
        });
    }
    Ok(())
}

/// Per-pixel spike counts over frames `[lo, hi]`.
pub(crate) fn window_counts(stream: &SpikeStream, lo: usize, hi: usize) -> Vec<u32> {
    let mut counts = vec![0u32; stream.pixels()];
    for n in lo..=hi {
        for (wi, &w) in stream.plane(n).words().iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                counts[(wi << 6) + bits.trailing_zeros() as usize] += 1;
                bits &= bits - 1;
            }
        }
    }
    counts
}

fn window_bounds(n_frames: usize, k: usize, w: usize) -> (usize, usize) {
    let half = (w - 1) / 2;
    (k.saturating_sub(half), (k + half).min(n_frames - 1))
}

pub fn reconstruct_tfi(
    stream: &SpikeStream,
    k: usize,
    cfg: &SimulatorConfig,
) -> Result<SceneFrame, ReprError> {
    check_frame(stream, k)?;
    let isi = isi_at_frame(stream, k);
    let scale = cfg.theta() / cfg.alpha();
    let fallback = if isi.contains(&ISI_UNDEFINED) {
        Some(reconstruct_tfp(stream, k, TFI_FALLBACK_WINDOW, cfg)?)
    } else {
        None
    };
    let data = isi
        .iter()
        .enumerate()
        .map(|(p, &v)| match (v, &fallback) {
            (ISI_UNDEFINED, Some(f)) => f.data()[p],
            _ => (scale / v as f64).clamp(0.0, 1.0),
        })
        .collect();
    Ok(SceneFrame::new(stream.width(), stream.height(), data)?)
}

pub fn reconstruct_tfp(
    stream: &SpikeStream,
    k: usize,
    w: usize,
    cfg: &SimulatorConfig,
) -> Result<SceneFrame, ReprError> {
    if w == 0 || w.is_multiple_of(2) {
        return Err(ReprError::Window(w));
    }
    check_frame(stream, k)?;
    let (lo, hi) = window_bounds(stream.n_frames(), k, w);
    let effective = (hi - lo + 1) as f64;
    let scale = cfg.theta() / (cfg.alpha() * effective);
    let data = window_counts(stream, lo, hi)
        .into_iter()
        .map(|c| (c as f64 * scale).clamp(0.0, 1.0))
        .collect();
    Ok(SceneFrame::new(stream.width(), stream.height(), data)?)
}
