//! `SPK1` spike files: magic, width, height and frame count as u32 LE, then
//! one bit-packed plane per frame. Rows are packed 8 pixels per byte with
//! the leftmost pixel in bit 0 and padded to a whole byte.

use std::path::Path;

use super::IoError;
use crate::stream::SpikeStream;

const MAGIC: &[u8; 4] = b"SPK1";
pub const SPK_HEADER_LEN: usize = 16;

pub fn encode_spike_file(stream: &SpikeStream) -> Vec<u8> {
    let (w, h, n) = (stream.width(), stream.height(), stream.n_frames());
    let row_bytes = w.div_ceil(8);
    let mut out = Vec::with_capacity(SPK_HEADER_LEN + n * h * row_bytes);
    out.extend_from_slice(MAGIC);
    for v in [w, h, n] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for plane in stream.planes() {
        for y in 0..h {
            let mut row = vec![0u8; row_bytes];
            for x in 0..w {
                if plane.get(y * w + x) {
                    row[x / 8] |= 1 << (x % 8);
                }
            }
            out.extend_from_slice(&row);
        }
    }
    out
}

pub fn decode_spike_file(bytes: &[u8]) -> Result<SpikeStream, IoError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        if bytes.len() < 4 && MAGIC.starts_with(bytes) {
            return Err(IoError::Truncated {
                got: bytes.len(),
                need: SPK_HEADER_LEN,
            });
        }
        return Err(IoError::BadMagic { expected: "SPK1" });
    }
    if bytes.len() < SPK_HEADER_LEN {
        return Err(IoError::Truncated {
            got: bytes.len(),
            need: SPK_HEADER_LEN,
        });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    let (w, h, n) = (word(4), word(8), word(12));
    let row_bytes = w.div_ceil(8);
    let expected = SPK_HEADER_LEN as u64 + n as u64 * h as u64 * row_bytes as u64;
    if (bytes.len() as u64) < expected {
        return Err(IoError::Truncated {
            got: bytes.len(),
            need: expected as usize,
        });
    }
    if bytes.len() as u64 != expected {
        return Err(IoError::LengthMismatch {
            expected,
            got: bytes.len(),
        });
    }
    let mut stream = SpikeStream::zeros(w, h, n)?;
    let mut pos = SPK_HEADER_LEN;
    for f in 0..n {
        for y in 0..h {
            let row = &bytes[pos..pos + row_bytes];
            for x in 0..w {
                if row[x / 8] >> (x % 8) & 1 == 1 {
                    stream.set(f, y * w + x, true);
                }
            }
            pos += row_bytes;
        }
    }
    Ok(stream)
}

pub fn read_spike_file(path: impl AsRef<Path>) -> Result<SpikeStream, IoError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| IoError::file(path, e))?;
    decode_spike_file(&bytes)
}

pub fn write_spike_file(stream: &SpikeStream, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, encode_spike_file(stream)).map_err(|e| IoError::file(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_spike_file() {
        let mut s = SpikeStream::zeros(1, 1, 1).unwrap();
        s.set(0, 0, true);
        let b = encode_spike_file(&s);
        assert_eq!(b.len(), 17);
        assert_eq!(b[16], 0x01);
        assert_eq!(&b[..4], b"SPK1");
        assert_eq!(decode_spike_file(&b).unwrap(), s);
    }

    #[test]
    fn width_nine_rows_take_two_bytes() {
        let mut s = SpikeStream::zeros(9, 2, 1).unwrap();
        s.set(0, 8, true);
        let b = encode_spike_file(&s);
        assert_eq!(b.len(), 16 + 2 * 2);
        assert_eq!(&b[16..], &[0, 1, 0, 0]);
    }

    #[test]
    fn distinct_errors() {
        let s = SpikeStream::zeros(3, 3, 2).unwrap();
        let b = encode_spike_file(&s);
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(
            decode_spike_file(&bad),
            Err(IoError::BadMagic { .. })
        ));
        assert!(matches!(
            decode_spike_file(&b[..10]),
            Err(IoError::Truncated { .. })
        ));
        assert!(matches!(
            decode_spike_file(&b[..b.len() - 1]),
            Err(IoError::Truncated { .. })
        ));
        let mut long = b.clone();
        long.push(0);
        assert!(matches!(
            decode_spike_file(&long),
            Err(IoError::LengthMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip(w in 1usize..20, h in 1usize..6, n in 0usize..6, bits in proptest::collection::vec(any::<bool>(), 0..720)) {
            let mut s = SpikeStream::zeros(w, h, n).unwrap();
            for (i, &b) in bits.iter().enumerate().take(w * h * n) {
                s.set(i / (w * h), i % (w * h), b);
            }
            let bytes = encode_spike_file(&s);
            prop_assert_eq!(bytes.len(), 16 + n * h * w.div_ceil(8));
            let back = decode_spike_file(&bytes).unwrap();
            prop_assert_eq!(encode_spike_file(&back), bytes);
            prop_assert_eq!(back, s);
        }
    }
}
