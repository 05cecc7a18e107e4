//! Quality sweeps producing rate-distortion points.

use rayon::prelude::*;

use super::bd::{RdCurve, RdPoint};
use super::{bpp, domain_psnr, psnr, Domain, EvalError};
use crate::codec::{compress, decompress, CodecConfig};
use crate::representation::{reconstruct_tfp, TFI_FALLBACK_WINDOW};
use crate::scene::{SceneFrame, SceneSequence};
use crate::stream::SpikeStream;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Successful points in the order the qualities were given.
    pub points: Vec<RdPoint>,
    /// Qualities whose pipeline failed, with the error message.
    pub failures: Vec<(u8, String)>,
}

impl SweepReport {
    /// Adjacent quality pairs whose bpp does not strictly increase.
    pub fn violations(&self) -> Vec<(u8, u8)> {
        self.points
            .windows(2)
            .filter(|w| w[1].bpp <= w[0].bpp)
            .map(|w| (w[0].quality, w[1].quality))
            .collect()
    }

    pub fn curve(&self) -> Result<RdCurve, EvalError> {
        RdCurve::new(self.points.clone())
    }
}

/// Scene PSNR uses the windowed-count reconstruction of `stream` at each
/// keyframe as the reference.
pub fn rd_sweep(stream: &SpikeStream, base: &CodecConfig, qualities: &[u8]) -> SweepReport {
    sweep(stream, base, qualities, None)
}

/// Scene PSNR uses frame `k` of `truth` as the reference at keyframe `k`.
pub fn rd_sweep_with_truth(
    stream: &SpikeStream,
    base: &CodecConfig,
    qualities: &[u8],
    truth: &SceneSequence,
) -> SweepReport {
    sweep(stream, base, qualities, Some(truth))
}

fn sweep(
    stream: &SpikeStream,
    base: &CodecConfig,
    qualities: &[u8],
    truth: Option<&SceneSequence>,
) -> SweepReport {
    let results: Vec<(u8, Result<RdPoint, EvalError>)> = qualities
        .par_iter()
        .map(|&q| (q, point(stream, &base.with_quality(q), truth)))
        .collect();
    let mut report = SweepReport {
        points: Vec::new(),
        failures: Vec::new(),
    };
    for (q, r) in results {
        match r {
            Ok(p) => report.points.push(p),
            Err(e) => report.failures.push((q, e.to_string())),
        }
    }
    report
}

fn reference(
    stream: &SpikeStream,
    k: usize,
    cfg: &CodecConfig,
    truth: Option<&SceneSequence>,
) -> Result<SceneFrame, EvalError> {
    match truth {
        Some(t) if k < t.len() => Ok(t.frame(k).clone()),
        Some(t) => Err(EvalError::InvalidPoint(format!(
            "keyframe {k} beyond {} reference frames",
            t.len()
        ))),
        None => Ok(reconstruct_tfp(stream, k, TFI_FALLBACK_WINDOW, &cfg.sim)
            .map_err(crate::codec::CodecError::from)?),
    }
}

fn point(
    stream: &SpikeStream,
    cfg: &CodecConfig,
    truth: Option<&SceneSequence>,
) -> Result<RdPoint, EvalError> {
    let container = compress(stream, cfg)?;
    let out = decompress(&container)?;
    let mut reference_px = Vec::new();
    let mut decoded_px = Vec::new();
    for (i, &k) in out.keyframes.iter().enumerate() {
        reference_px.extend_from_slice(reference(stream, k, cfg, truth)?.data());
        decoded_px.extend_from_slice(out.scenes.frame(i).data());
    }
    Ok(RdPoint {
        quality: cfg.quality,
        bpp: bpp(&container)?,
        psnr_scene: Some(psnr(&reference_px, &decoded_px, 1.0)?),
        psnr_isi: domain_psnr(stream, &out.regenerated, out.offset, Domain::Isi).ok(),
        psnr_fr: domain_psnr(stream, &out.regenerated, out.offset, Domain::FiringRate).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::ConstantScene;
    use crate::spike_model::{simulate, SimulatorConfig};

    #[test]
    fn constant_stream_sweep() {
        let s = simulate(
            &ConstantScene {
                width: 32,
                height: 32,
                n_frames: 80,
                luminance: 0.5,
            },
            &SimulatorConfig::default(),
        )
        .unwrap();
        let r = rd_sweep(&s, &CodecConfig::default(), &[20, 40, 60, 80]);
        assert!(r.failures.is_empty());
        assert_eq!(
            r.points.iter().map(|p| p.quality).collect::<Vec<_>>(),
            vec![20, 40, 60, 80]
        );
        assert!(r.points.windows(2).all(|w| w[1].bpp >= w[0].bpp));
        for p in &r.points {
            assert!(p.psnr_scene.unwrap() > 40.0, "{p:?}");
            assert!(p.psnr_fr.unwrap() > 35.0, "{p:?}");
        }
    }

    #[test]
    fn failures_are_reported_per_point() {
        let s = SpikeStream::zeros(8, 8, 100).unwrap();
        let r = rd_sweep(&s, &CodecConfig::default(), &[0, 50]);
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].0, 0);
        assert!(matches!(r.curve().unwrap().len(), 1));
    }
}
