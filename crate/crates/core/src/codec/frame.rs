//! Block-transform still-frame codec: 8x8 orthonormal DCT, uniform scalar
//! quantization, zigzag scan, adaptive range coding.

use std::sync::OnceLock;

use super::range_coder::{FrequencyModel, ModelSpec, RangeDecoder, RangeEncoder};
use super::saliency::SaliencyMap;
use super::CodecError;
use crate::scene::SceneFrame;

const BLOCK: usize = 8;
const COEFFS: usize = BLOCK * BLOCK;
const MAGIC: &[u8; 2] = b"SF";
const HEADER_LEN: usize = 2 + 4 + 4 + 1 + 1;

/// Quantizer step at quality 50, in orthonormal DCT coefficient units.
pub const BASE_STEP: f64 = 0.03;
/// The DC coefficient uses a finer step than AC: block means drive firing
/// rates directly.
const DC_STEP_RATIO: f64 = 0.25;
/// ROI scale factors are sent in steps of 1/16 over `[0.5, 1.5]`.
const SCALE_LEVELS: usize = 17;
/// Magnitude categories: 0 for zero, else the bit length of `|v|`.
const CATEGORIES: usize = 32;
const AC_BANDS: usize = 3;

/// Quantizer step for a quality in `1..=100`; halves every 10 quality points.
pub fn quality_step(quality: u8) -> f64 {
    BASE_STEP * 2f64.powf((50.0 - quality as f64) / 10.0)
}

pub fn check_quality(quality: u8) -> Result<(), CodecError> {
    if !(1..=100).contains(&quality) {
        return Err(CodecError::Quality(quality));
    }
    Ok(())
}

struct Dct {
    basis: [[f64; BLOCK]; BLOCK],
}

fn dct() -> &'static Dct {
    static DCT: OnceLock<Dct> = OnceLock::new();
    DCT.get_or_init(|| {
        let mut basis = [[0.0; BLOCK]; BLOCK];
        for (u, row) in basis.iter_mut().enumerate() {
            let c = if u == 0 {
                (1.0 / BLOCK as f64).sqrt()
            } else {
                (2.0 / BLOCK as f64).sqrt()
            };
            for (x, v) in row.iter_mut().enumerate() {
                *v = c
                    * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / (2 * BLOCK) as f64)
                        .cos();
            }
        }
        Dct { basis }
    })
}

impl Dct {
    fn forward(&self, block: &[f64; COEFFS]) -> [f64; COEFFS] {
        let b = &self.basis;
        let mut tmp = [0.0; COEFFS];
        for y in 0..BLOCK {
            for u in 0..BLOCK {
                tmp[y * BLOCK + u] = (0..BLOCK).map(|x| b[u][x] * block[y * BLOCK + x]).sum();
            }
        }
        let mut out = [0.0; COEFFS];
        for v in 0..BLOCK {
            for u in 0..BLOCK {
                out[v * BLOCK + u] = (0..BLOCK).map(|y| b[v][y] * tmp[y * BLOCK + u]).sum();
            }
        }
        out
    }

    fn inverse(&self, coef: &[f64; COEFFS]) -> [f64; COEFFS] {
        let b = &self.basis;
        let mut tmp = [0.0; COEFFS];
        for y in 0..BLOCK {
            for u in 0..BLOCK {
                tmp[y * BLOCK + u] = (0..BLOCK).map(|v| b[v][y] * coef[v * BLOCK + u]).sum();
            }
        }
        let mut out = [0.0; COEFFS];
        for y in 0..BLOCK {
            for x in 0..BLOCK {
                out[y * BLOCK + x] = (0..BLOCK).map(|u| b[u][x] * tmp[y * BLOCK + u]).sum();
            }
        }
        out
    }
}

/// Raster index of the i-th coefficient in zigzag order.
fn zigzag() -> &'static [usize; COEFFS] {
    static ZZ: OnceLock<[usize; COEFFS]> = OnceLock::new();
    ZZ.get_or_init(|| {
        let mut order = [0; COEFFS];
        let mut i = 0;
        for s in 0..(2 * BLOCK - 1) {
            let range: Vec<usize> = (0..=s).filter(|&a| a < BLOCK && s - a < BLOCK).collect();
            // Even diagonals run bottom-left to top-right.
            let iter: Box<dyn Iterator<Item = &usize>> = if s % 2 == 0 {
                Box::new(range.iter().rev())
            } else {
                Box::new(range.iter())
            };
            for &row in iter {
                order[i] = row * BLOCK + (s - row);
                i += 1;
            }
        }
        order
    })
}

fn band(i: usize) -> usize {
    match i {
        0..=5 => 0,
        6..=20 => 1,
        _ => 2,
    }
}

struct Models {
    scale: FrequencyModel,
    dc: FrequencyModel,
    eob: FrequencyModel,
    ac: Vec<FrequencyModel>,
}

impl Models {
    fn new() -> Self {
        let m = |n| FrequencyModel::new(ModelSpec::new(n)).expect("static model spec");
        Self {
            scale: m(SCALE_LEVELS),
            dc: m(CATEGORIES),
            eob: m(COEFFS),
            ac: (0..AC_BANDS).map(|_| m(CATEGORIES)).collect(),
        }
    }
}

fn encode_signed(
    enc: &mut RangeEncoder,
    model: &mut FrequencyModel,
    v: i64,
) -> Result<(), CodecError> {
    let mag = v.unsigned_abs();
    let cat = (64 - mag.leading_zeros()) as usize;
    if cat >= CATEGORIES {
        return Err(CodecError::Corrupt(format!("coefficient {v} too large")));
    }
    model.encode(enc, cat)?;
    if cat > 0 {
        enc.encode_raw((v < 0) as u32, 1);
        let mut rest = mag - (1 << (cat - 1));
        let mut bits = cat as u32 - 1;
        while bits > 0 {
            let chunk = bits.min(16);
            bits -= chunk;
            enc.encode_raw((rest >> bits) as u32, chunk);
            rest &= (1 << bits) - 1;
        }
    }
    Ok(())
}

fn decode_signed(
    dec: &mut RangeDecoder<'_>,
    model: &mut FrequencyModel,
) -> Result<i64, CodecError> {
    let cat = model.decode(dec)?;
    if cat == 0 {
        return Ok(0);
    }
    let negative = dec.decode_raw(1)? == 1;
    let mut mag: u64 = 1;
    let mut bits = cat as u32 - 1;
    while bits > 0 {
        let chunk = bits.min(16);
        bits -= chunk;
        mag = (mag << chunk) | dec.decode_raw(chunk)? as u64;
    }
    Ok(if negative { -(mag as i64) } else { mag as i64 })
}

fn scale_index(block_saliency: f64) -> usize {
    let factor = (1.0 - 0.5 * block_saliency).clamp(0.5, 1.5);
    ((factor - 0.5) * 16.0).round() as usize
}

fn scale_factor(index: usize) -> f64 {
    0.5 + index as f64 / 16.0
}

/// Gathers the 8x8 block at block coordinates `(bx, by)`, replicating edges.
fn gather(data: &[f64], w: usize, h: usize, bx: usize, by: usize) -> [f64; COEFFS] {
    let mut out = [0.0; COEFFS];
    for y in 0..BLOCK {
        for x in 0..BLOCK {
            let sx = (bx * BLOCK + x).min(w - 1);
            let sy = (by * BLOCK + y).min(h - 1);
            out[y * BLOCK + x] = data[sy * w + sx];
        }
    }
    out
}

fn block_mean(map: &SaliencyMap, bx: usize, by: usize) -> f64 {
    let (w, h) = (map.width(), map.height());
    let mut s = 0.0;
    let mut n = 0;
    for y in by * BLOCK..((by + 1) * BLOCK).min(h) {
        for x in bx * BLOCK..((bx + 1) * BLOCK).min(w) {
            s += map.values()[y * w + x];
            n += 1;
        }
    }
    s / n as f64
}

pub fn encode_frame(
    frame: &SceneFrame,
    quality: u8,
    saliency: Option<&SaliencyMap>,
) -> Result<Vec<u8>, CodecError> {
    check_quality(quality)?;
    let (w, h) = (frame.width(), frame.height());
    if let Some(map) = saliency {
        if map.width() != w || map.height() != h {
            return Err(CodecError::DimensionMismatch {
                expected: (w, h),
                got: (map.width(), map.height()),
            });
        }
    }
    let (bw, bh) = (w.div_ceil(BLOCK), h.div_ceil(BLOCK));
    let base = quality_step(quality);
    let dct = dct();
    let zz = zigzag();
    let mut models = Models::new();
    let mut enc = RangeEncoder::new();

    let scales: Vec<usize> = match saliency {
        Some(map) => (0..bh)
            .flat_map(|by| (0..bw).map(move |bx| (bx, by)))
            .map(|(bx, by)| scale_index(block_mean(map, bx, by)))
            .collect(),
        None => Vec::new(),
    };
    for &s in &scales {
        models.scale.encode(&mut enc, s)?;
    }

    let mut prev_dc = 0.0;
    for by in 0..bh {
        for bx in 0..bw {
            let bi = by * bw + bx;
            let step = base * scales.get(bi).map_or(1.0, |&s| scale_factor(s));
            let coef = dct.forward(&gather(frame.data(), w, h, bx, by));
            let dc_step = step * DC_STEP_RATIO;
            let mut levels: Vec<i64> = zz
                .iter()
                .map(|&r| (coef[r] / step).round() as i64)
                .collect();
            levels[0] = (coef[0] / dc_step).round() as i64;
            let pred = (prev_dc / dc_step).round() as i64;
            encode_signed(&mut enc, &mut models.dc, levels[0] - pred)?;
            prev_dc = levels[0] as f64 * dc_step;
            let eob = levels
                .iter()
                .rposition(|&l| l != 0)
                .filter(|&i| i > 0)
                .unwrap_or(0);
            models.eob.encode(&mut enc, eob)?;
            for (i, &l) in levels.iter().enumerate().take(eob + 1).skip(1) {
                encode_signed(&mut enc, &mut models.ac[band(i)], l)?;
            }
        }
    }

    let mut out = Vec::with_capacity(HEADER_LEN + 64);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    out.push(quality);
    out.push(saliency.is_some() as u8);
    out.extend(enc.finish());
    Ok(out)
}

pub fn decode_frame(bytes: &[u8]) -> Result<SceneFrame, CodecError> {
    if bytes.len() < HEADER_LEN {
        return Err(CodecError::Truncated);
    }
    if &bytes[..2] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    let w = u32::from_le_bytes(bytes[2..6].try_into().expect("4 bytes")) as usize;
    let h = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
    let quality = bytes[10];
    let roi = match bytes[11] {
        0 => false,
        1 => true,
        other => return Err(CodecError::Corrupt(format!("roi flag {other}"))),
    };
    if w == 0 || h == 0 || w.saturating_mul(h) > 1 << 28 {
        return Err(CodecError::Corrupt(format!("frame dimensions {w}x{h}")));
    }
    check_quality(quality)?;

    let (bw, bh) = (w.div_ceil(BLOCK), h.div_ceil(BLOCK));
    let base = quality_step(quality);
    let dct = dct();
    let zz = zigzag();
    let mut models = Models::new();
    let mut dec = RangeDecoder::new(&bytes[HEADER_LEN..])?;

    let scales: Vec<usize> = if roi {
        (0..bw * bh)
            .map(|_| models.scale.decode(&mut dec))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };

    let mut data = vec![0.0; w * h];
    let mut prev_dc = 0.0;
    for by in 0..bh {
        for bx in 0..bw {
            let bi = by * bw + bx;
            let step = base * scales.get(bi).map_or(1.0, |&s| scale_factor(s));
            let mut coef = [0.0; COEFFS];
            let dc_step = step * DC_STEP_RATIO;
            let pred = (prev_dc / dc_step).round() as i64;
            let dc = decode_signed(&mut dec, &mut models.dc)? + pred;
            coef[0] = dc as f64 * dc_step;
            prev_dc = coef[0];
            let eob = models.eob.decode(&mut dec)?;
            for i in 1..=eob {
                coef[zz[i]] = decode_signed(&mut dec, &mut models.ac[band(i)])? as f64 * step;
            }
            let px = dct.inverse(&coef);
            for y in 0..BLOCK {
                for x in 0..BLOCK {
                    let (sx, sy) = (bx * BLOCK + x, by * BLOCK + y);
                    if sx < w && sy < h {
                        data[sy * w + sx] = px[y * BLOCK + x];
                    }
                }
            }
        }
    }
    if !dec.is_exhausted() {
        return Err(CodecError::TrailingData(
            bytes.len() - HEADER_LEN - dec.position(),
        ));
    }
    Ok(SceneFrame::from_clamped(w, h, data)?)
}
