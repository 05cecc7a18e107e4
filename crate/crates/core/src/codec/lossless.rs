//! Lossless spike-stream coder: one adaptive binary model per 3-bit context
//! (same pixel in the previous plane, left neighbor, top neighbor).
//!
//! Layout: `SPKL`, width u32 LE, height u32 LE, frame count u32 LE,
//! CRC-32 of the packed planes u32 LE, range-coded body.

use super::range_coder::{BitModel, RangeDecoder, RangeEncoder};
use super::CodecError;
use crate::stream::SpikeStream;

const MAGIC: &[u8; 4] = b"SPKL";
const HEADER_LEN: usize = 20;

fn checksum(stream: &SpikeStream) -> u32 {
    let mut h = crc32fast::Hasher::new();
    for plane in stream.planes() {
        for w in plane.words() {
            h.update(&w.to_le_bytes());
        }
    }
    h.finalize()
}

#[inline]
fn context(prev: bool, left: bool, top: bool) -> usize {
    (prev as usize) << 2 | (left as usize) << 1 | top as usize
}

pub fn encode_spikes_lossless(stream: &SpikeStream) -> Vec<u8> {
    let (w, h, n) = (stream.width(), stream.height(), stream.n_frames());
    let mut models = [BitModel::default(); 8];
    let mut enc = RangeEncoder::new();
    for f in 0..n {
        let plane = stream.plane(f);
        let prev = f.checked_sub(1).map(|p| stream.plane(p));
        for y in 0..h {
            for x in 0..w {
                let p = y * w + x;
                let ctx = context(
                    prev.is_some_and(|pl| pl.get(p)),
                    x > 0 && plane.get(p - 1),
                    y > 0 && plane.get(p - w),
                );
                enc.encode_bit(&mut models[ctx], plane.get(p));
            }
        }
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 16);
    out.extend_from_slice(MAGIC);
    for v in [w, h, n] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&checksum(stream).to_le_bytes());
    out.extend(enc.finish());
    out
}

pub fn decode_spikes_lossless(bytes: &[u8]) -> Result<SpikeStream, CodecError> {
    if bytes.len() < HEADER_LEN {
        return Err(CodecError::Truncated);
    }
    if &bytes[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let (w, h, n) = (word(4) as usize, word(8) as usize, word(12) as usize);
    let crc = word(16);
    // Every coded bit costs at least a few millibits, so a tiny body cannot
    // hold an enormous stream; reject absurd sizes before allocating.
    let body = &bytes[HEADER_LEN..];
    let bits = w as u128 * h as u128 * n as u128;
    if bits > (body.len() as u128 + 16) * 8 * 4096 {
        return Err(CodecError::Corrupt(format!(
            "{w}x{h}x{n} stream cannot fit in {} bytes",
            body.len()
        )));
    }
    let mut stream = SpikeStream::zeros(w, h, n)?;
    let mut models = [BitModel::default(); 8];
    let mut dec = RangeDecoder::new(body)?;
    for f in 0..n {
        for y in 0..h {
            for x in 0..w {
                let p = y * w + x;
                let ctx = context(
                    f > 0 && stream.get(f - 1, p),
                    x > 0 && stream.get(f, p - 1),
                    y > 0 && stream.get(f, p - w),
                );
                if dec.decode_bit(&mut models[ctx])? {
                    stream.set(f, p, true);
                }
            }
        }
    }
    if !dec.is_exhausted() {
        return Err(CodecError::TrailingData(body.len() - dec.position()));
    }
    if checksum(&stream) != crc {
        return Err(CodecError::Corrupt("checksum mismatch".into()));
    }
    Ok(stream)
}
