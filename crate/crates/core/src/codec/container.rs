//! Codec parameters and the `SPKC` container.

use super::frame::check_quality;
use super::CodecError;
use crate::representation::{keyframe_schedule, KeyframeSchedule, ReconstructionKind, Tfp};
use crate::spike_model::{InitPolicy, ResetMode, SimulatorConfig};

const MAGIC: &[u8; 4] = b"SPKC";
pub const CONTAINER_VERSION: u16 = 1;
/// Fixed header size in bytes, up to and including the keyframe count.
pub const HEADER_LEN: usize = 50;
const PAYLOAD_PREFIX: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecConfig {
    pub d: u16,
    pub s: u16,
    pub r: u16,
    /// 1..=100; higher is finer.
    pub quality: u8,
    pub roi: bool,
    pub sim: SimulatorConfig,
    pub reconstruction: ReconstructionKind,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self {
            d: 7,
            s: 6,
            r: 2,
            quality: 50,
            roi: false,
            sim: SimulatorConfig::default(),
            reconstruction: ReconstructionKind::default(),
        }
    }
}

impl CodecConfig {
    pub fn validate(&self) -> Result<(), CodecError> {
        check_quality(self.quality)?;
        if self.d == 0 {
            return Err(CodecError::Parameter("d must be at least 1".into()));
        }
        if let ReconstructionKind::Tfp { window } = self.reconstruction {
            Tfp::new(window as usize)?;
        }
        Ok(())
    }

    pub fn half_window(&self) -> usize {
        self.r as usize * self.d as usize + self.s as usize
    }

    pub fn schedule(&self, n_frames: usize) -> KeyframeSchedule {
        keyframe_schedule(n_frames, self.d as usize, self.s as usize, self.r as usize)
    }

    pub fn with_quality(self, quality: u8) -> Self {
        Self { quality, ..self }
    }

    pub fn with_roi(self, roi: bool) -> Self {
        Self { roi, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Payload {
    pub keyframe: usize,
    pub bytes: Vec<u8>,
}

/// Self-contained compressed stream. Payloads follow the schedule the
/// header implies, in keyframe order.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedContainer {
    pub width: usize,
    pub height: usize,
    pub n_frames: usize,
    pub config: CodecConfig,
    pub payloads: Vec<Payload>,
}

fn u32_field(name: &str, v: usize) -> Result<u32, CodecError> {
    u32::try_from(v).map_err(|_| CodecError::Parameter(format!("{name} {v} exceeds u32")))
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).ok_or(CodecError::Truncated)?;
        let out = self.data.get(self.pos..end).ok_or(CodecError::Truncated)?;
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_le_bytes(
            self.take(2)?.try_into().expect("2 bytes"),
        ))
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64, CodecError> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
}

impl CompressedContainer {
    pub fn keyframes(&self) -> Vec<usize> {
        self.payloads.iter().map(|p| p.keyframe).collect()
    }

    pub fn payload_bytes(&self) -> usize {
        self.payloads.iter().map(|p| p.bytes.len()).sum()
    }

    /// Serialized size in bytes.
    pub fn byte_len(&self) -> usize {
        HEADER_LEN + self.payloads.len() * PAYLOAD_PREFIX + self.payload_bytes()
    }

    pub fn total_bits(&self) -> u64 {
        8 * self.byte_len() as u64
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CodecError> {
        let cfg = &self.config;
        let mut out = Vec::with_capacity(self.byte_len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&CONTAINER_VERSION.to_le_bytes());
        out.extend_from_slice(&u32_field("width", self.width)?.to_le_bytes());
        out.extend_from_slice(&u32_field("height", self.height)?.to_le_bytes());
        out.extend_from_slice(&u32_field("frame count", self.n_frames)?.to_le_bytes());
        for v in [cfg.d, cfg.s, cfg.r] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&cfg.sim.alpha().to_le_bytes());
        out.extend_from_slice(&cfg.sim.theta().to_le_bytes());
        out.push(match cfg.sim.reset() {
            ResetMode::Hard => 0,
            ResetMode::Soft => 1,
        });
        out.push(cfg.reconstruction.code());
        out.extend_from_slice(&cfg.reconstruction.window().to_le_bytes());
        out.push(cfg.quality);
        out.push(cfg.roi as u8);
        out.extend_from_slice(&u32_field("keyframe count", self.payloads.len())?.to_le_bytes());
        debug_assert_eq!(out.len(), HEADER_LEN);
        for p in &self.payloads {
            out.extend_from_slice(&u32_field("keyframe", p.keyframe)?.to_le_bytes());
            out.extend_from_slice(&u32_field("payload length", p.bytes.len())?.to_le_bytes());
            out.extend_from_slice(&p.bytes);
        }
        Ok(out)
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, CodecError> {
        let mut rd = Reader { data, pos: 0 };
        if rd.take(4)? != MAGIC {
            return Err(CodecError::BadMagic);
        }
        let version = rd.u16()?;
        if version != CONTAINER_VERSION {
            return Err(CodecError::BadVersion(version));
        }
        let width = rd.u32()? as usize;
        let height = rd.u32()? as usize;
        let n_frames = rd.u32()? as usize;
        let (d, s, r) = (rd.u16()?, rd.u16()?, rd.u16()?);
        let alpha = rd.f64()?;
        let theta = rd.f64()?;
        let reset = match rd.u8()? {
            0 => ResetMode::Hard,
            1 => ResetMode::Soft,
            other => return Err(CodecError::Corrupt(format!("reset mode {other}"))),
        };
        let code = rd.u8()?;
        let window = rd.u16()?;
        let reconstruction = ReconstructionKind::from_code(code, window)
            .ok_or_else(|| CodecError::Corrupt(format!("reconstruction code {code}")))?;
        let quality = rd.u8()?;
        let roi = match rd.u8()? {
            0 => false,
            1 => true,
            other => return Err(CodecError::Corrupt(format!("roi flag {other}"))),
        };
        let count = rd.u32()? as usize;
        if width == 0 || height == 0 {
            return Err(CodecError::Corrupt(format!(
                "frame dimensions {width}x{height}"
            )));
        }
        let sim = SimulatorConfig::new(alpha, theta, reset, InitPolicy::Constant(0.0))?;
        let config = CodecConfig {
            d,
            s,
            r,
            quality,
            roi,
            sim,
            reconstruction,
        };
        config.validate()?;

        let expected = config.schedule(n_frames).keyframes;
        if count != expected.len() {
            return Err(CodecError::KeyframeMismatch {
                expected,
                got: Vec::new(),
            });
        }
        let mut payloads = Vec::with_capacity(count);
        for _ in 0..count {
            let keyframe = rd.u32()? as usize;
            let len = rd.u32()? as usize;
            let bytes = rd.take(len)?.to_vec();
            payloads.push(Payload { keyframe, bytes });
        }
        if rd.pos != data.len() {
            return Err(CodecError::TrailingData(data.len() - rd.pos));
        }
        let got: Vec<usize> = payloads.iter().map(|p| p.keyframe).collect();
        if got != expected {
            return Err(CodecError::KeyframeMismatch { expected, got });
        }
        Ok(Self {
            width,
            height,
            n_frames,
            config,
            payloads,
        })
    }
}
