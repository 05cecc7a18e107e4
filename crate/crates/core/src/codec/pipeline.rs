//! Compression pipeline: keyframe scene reconstruction, frame coding, and
//! decoder-side spike regeneration from interpolated scenes.

use rayon::prelude::*;

use super::container::{CodecConfig, CompressedContainer, Payload};
use super::frame::{decode_frame, encode_frame};
use super::saliency::activity_map;
use super::CodecError;
use crate::representation::KeyframeSchedule;
use crate::scene::{SceneFrame, SceneSequence, SceneSource};
use crate::spike_model::{simulate, InitPolicy};
use crate::stream::SpikeStream;

pub fn compress(
    stream: &SpikeStream,
    cfg: &CodecConfig,
) -> Result<CompressedContainer, CodecError> {
    cfg.validate()?;
    let n = stream.n_frames();
    let schedule = cfg.schedule(n);
    if schedule.is_empty() {
        return Err(CodecError::EmptySchedule {
            n_frames: n,
            min_frames: KeyframeSchedule::min_frames(schedule.d, schedule.s, schedule.r),
            d: schedule.d,
            s: schedule.s,
            r: schedule.r,
        });
    }
    let reconstructor = cfg.reconstruction.build()?;
    let hw = cfg.half_window();
    let payloads = schedule
        .keyframes
        .par_iter()
        .map(|&k| {
            let scene = reconstructor.reconstruct(stream, k, &cfg.sim)?;
            let saliency = cfg.roi.then(|| activity_map(stream, k, hw, &cfg.sim));
            Ok(Payload {
                keyframe: k,
                bytes: encode_frame(&scene, cfg.quality, saliency.as_ref())?,
            })
        })
        .collect::<Result<Vec<_>, CodecError>>()?;
    // The decoder regenerates from a fixed zero state, so the initial-state
    // policy is not part of the stream.
    let config = CodecConfig {
        sim: cfg.sim.with_init(InitPolicy::Constant(0.0))?,
        ..*cfg
    };
    Ok(CompressedContainer {
        width: stream.width(),
        height: stream.height(),
        n_frames: n,
        config,
        payloads,
    })
}

/// Full-rate luminance synthesized from decoded keyframes: linear between
/// consecutive keyframes, held constant outside them. Frame `n` of the
/// source is absolute frame `n + offset`.
#[derive(Debug, Clone)]
pub struct KeyframeInterpolation {
    keyframes: Vec<usize>,
    frames: Vec<SceneFrame>,
    offset: usize,
    len: usize,
}

impl KeyframeInterpolation {
    pub fn new(
        keyframes: Vec<usize>,
        frames: Vec<SceneFrame>,
        offset: usize,
        len: usize,
    ) -> Result<Self, CodecError> {
        if keyframes.is_empty() || keyframes.len() != frames.len() {
            return Err(CodecError::Parameter(format!(
                "{} keyframes with {} frames",
                keyframes.len(),
                frames.len()
            )));
        }
        if keyframes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(CodecError::Parameter(
                "keyframes must be strictly increasing".into(),
            ));
        }
        let dims = (frames[0].width(), frames[0].height());
        if let Some(f) = frames.iter().find(|f| (f.width(), f.height()) != dims) {
            return Err(CodecError::DimensionMismatch {
                expected: dims,
                got: (f.width(), f.height()),
            });
        }
        Ok(Self {
            keyframes,
            frames,
            offset,
            len,
        })
    }
}

impl SceneSource for KeyframeInterpolation {
    fn width(&self) -> usize {
        self.frames[0].width()
    }

    fn height(&self) -> usize {
        self.frames[0].height()
    }

    fn n_frames(&self) -> usize {
        self.len
    }

    fn fill_frame(&self, n: usize, out: &mut [f64]) {
        let t = n + self.offset;
        let next = self.keyframes.partition_point(|&k| k <= t);
        if next == 0 {
            out.copy_from_slice(self.frames[0].data());
        } else if next == self.keyframes.len() {
            out.copy_from_slice(self.frames[next - 1].data());
        } else {
            let (k0, k1) = (self.keyframes[next - 1], self.keyframes[next]);
            let wt = (t - k0) as f64 / (k1 - k0) as f64;
            let (a, b) = (self.frames[next - 1].data(), self.frames[next].data());
            for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
                *o = x + wt * (y - x);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decompressed {
    pub keyframes: Vec<usize>,
    /// Decoded scene at each keyframe.
    pub scenes: SceneSequence,
    /// Spikes regenerated over `offset..offset + regenerated.n_frames()`.
    pub regenerated: SpikeStream,
    pub offset: usize,
}

pub fn decompress(container: &CompressedContainer) -> Result<Decompressed, CodecError> {
    let cfg = &container.config;
    cfg.validate()?;
    let schedule = cfg.schedule(container.n_frames);
    let keyframes = container.keyframes();
    if keyframes != schedule.keyframes || keyframes.is_empty() {
        return Err(CodecError::KeyframeMismatch {
            expected: schedule.keyframes,
            got: keyframes,
        });
    }
    let dims = (container.width, container.height);
    let frames = container
        .payloads
        .par_iter()
        .map(|p| {
            let f = decode_frame(&p.bytes)?;
            if (f.width(), f.height()) != dims {
                return Err(CodecError::DimensionMismatch {
                    expected: dims,
                    got: (f.width(), f.height()),
                });
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>, CodecError>>()?;
    let (lo, hi) = schedule.coverage().expect("non-empty schedule");
    let source = KeyframeInterpolation::new(keyframes.clone(), frames.clone(), lo, hi + 1 - lo)?;
    let sim = cfg.sim.with_init(InitPolicy::Constant(0.0))?;
    let regenerated = simulate(&source, &sim)?;
    Ok(Decompressed {
        keyframes,
        scenes: SceneSequence::new(frames)?,
        regenerated,
        offset: lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::quality_step;
    use crate::scene::{ConstantScene, FnScene};
    use crate::spike_model::SimulatorConfig;

    fn constant(lum: f64, n: usize) -> SpikeStream {
        simulate(
            &ConstantScene {
                width: 16,
                height: 16,
                n_frames: n,
                luminance: lum,
            },
            &SimulatorConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_keyframe_constant_round_trip() {
        let s = constant(0.5, 41 + 7);
        let cfg = CodecConfig::default();
        let c = compress(&s, &cfg).unwrap();
        assert_eq!(c.keyframes(), vec![21]);
        let out = decompress(&c).unwrap();
        let step = quality_step(cfg.quality);
        assert!(out
            .scenes
            .frame(0)
            .data()
            .iter()
            .all(|v| (v - 0.5).abs() <= step));
        assert_eq!(out.offset, 1);
        assert_eq!(out.regenerated.n_frames(), 41);
        for p in 0..256 {
            let rate = out.regenerated.pixel_spike_count(p) as f64 / 41.0;
            assert!((rate - 0.25).abs() <= step + 1.0 / 41.0, "rate {rate}");
        }
    }

    #[test]
    fn short_stream_gives_empty_schedule() {
        let s = constant(0.5, 41);
        assert!(matches!(
            compress(&s, &CodecConfig::default()),
            Err(CodecError::EmptySchedule {
                n_frames: 41,
                min_frames: 42,
                ..
            })
        ));
    }

    #[test]
    fn interpolation_is_linear_and_held_at_ends() {
        let a = SceneFrame::filled(1, 1, 0.2).unwrap();
        let b = SceneFrame::filled(1, 1, 0.6).unwrap();
        let src = KeyframeInterpolation::new(vec![10, 14], vec![a, b], 8, 10).unwrap();
        let mut out = [0.0];
        let vals: Vec<f64> = (0..10)
            .map(|n| {
                src.fill_frame(n, &mut out);
                out[0]
            })
            .collect();
        let want = [0.2, 0.2, 0.2, 0.3, 0.4, 0.5, 0.6, 0.6, 0.6, 0.6];
        assert!(
            vals.iter().zip(want).all(|(v, w)| (v - w).abs() < 1e-12),
            "{vals:?}"
        );
    }

    #[test]
    fn payloads_grow_with_quality_and_round_trip_is_stable() {
        let s = simulate(
            &FnScene {
                width: 24,
                height: 24,
                n_frames: 90,
                f: |t: usize, x: usize, y: usize| {
                    0.3 + 0.5 * (((x + t / 8) as f64 / 5.0).sin() * (y as f64 / 7.0).cos()).abs()
                },
            },
            &SimulatorConfig::default(),
        )
        .unwrap();
        let base = CodecConfig::default();
        let mut last = 0;
        for q in [10, 20, 40, 80, 100] {
            let c = compress(&s, &base.with_quality(q)).unwrap();
            assert!(c.payload_bytes() >= last, "quality {q}");
            last = c.payload_bytes();
        }
        let first = compress(&s, &base).unwrap();
        let regen = decompress(&first).unwrap().regenerated;
        let second = compress(&regen, &base).unwrap();
        let (a, b) = (
            first.payloads[0].bytes.len() as f64,
            second.payloads[0].bytes.len() as f64,
        );
        assert!((a - b).abs() <= 0.1 * a, "{a} vs {b}");
    }

    #[test]
    fn mismatched_payloads_rejected() {
        let s = constant(0.5, 60);
        let mut c = compress(&s, &CodecConfig::default()).unwrap();
        c.payloads[0].keyframe += 1;
        assert!(matches!(
            decompress(&c),
            Err(CodecError::KeyframeMismatch { .. })
        ));
        let mut c = compress(&s, &CodecConfig::default()).unwrap();
        c.width = 8;
        assert!(matches!(
            decompress(&c),
            Err(CodecError::DimensionMismatch { .. })
        ));
    }
}
