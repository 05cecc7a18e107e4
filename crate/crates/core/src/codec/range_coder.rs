//! Byte-oriented range coder with carry propagation, plus the adaptive
//! models that drive it.

use super::CodecError;

const TOP: u32 = 1 << 24;
/// Probabilities of binary models are 16-bit fixed point.
const PROB_BITS: u32 = 16;
const PROB_ONE: u32 = 1 << PROB_BITS;
const BIT_ADAPT_SHIFT: u32 = 5;

pub struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        Self {
            low: 0,
            range: u32::MAX,
            cache: 0,
            cache_size: 1,
            out: Vec::new(),
        }
    }

    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || (self.low >> 32) != 0 {
            let carry = (self.low >> 32) as u8;
            let mut temp = self.cache;
            loop {
                self.out.push(temp.wrapping_add(carry));
                temp = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    #[inline]
    fn normalize(&mut self) {
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    /// Encodes the interval `[cum, cum + freq)` out of `total` (`total <= 2^16`).
    pub fn encode(&mut self, cum: u32, freq: u32, total: u32) {
        debug_assert!(freq > 0 && cum + freq <= total && total <= PROB_ONE);
        let r = self.range / total;
        self.low += r as u64 * cum as u64;
        self.range = r * freq;
        self.normalize();
    }

    /// Encodes `bits` (at most 16) equiprobable bits of `value`.
    pub fn encode_raw(&mut self, value: u32, bits: u32) {
        debug_assert!(bits <= 16);
        if bits > 0 {
            self.encode(value & ((1 << bits) - 1), 1, 1 << bits);
        }
    }

    pub fn encode_bit(&mut self, model: &mut BitModel, bit: bool) {
        let bound = (self.range >> PROB_BITS) * model.p0 as u32;
        if bit {
            self.low += bound as u64;
            self.range -= bound;
        } else {
            self.range = bound;
        }
        model.update(bit);
        self.normalize();
    }

    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

pub struct RangeDecoder<'a> {
    data: &'a [u8],
    pos: usize,
    code: u32,
    range: u32,
    /// Range divided by the last total handed to `decode_freq`.
    pending: u32,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(data: &'a [u8]) -> Result<Self, CodecError> {
        let mut d = Self {
            data,
            pos: 0,
            code: 0,
            range: u32::MAX,
            pending: 0,
        };
        if d.next_byte()? != 0 {
            return Err(CodecError::Corrupt(
                "range coder stream must start with 0".into(),
            ));
        }
        for _ in 0..4 {
            d.code = (d.code << 8) | d.next_byte()? as u32;
        }
        Ok(d)
    }

    fn next_byte(&mut self) -> Result<u8, CodecError> {
        let b = *self.data.get(self.pos).ok_or(CodecError::Truncated)?;
        self.pos += 1;
        Ok(b)
    }

    #[inline]
    fn normalize(&mut self) -> Result<(), CodecError> {
        while self.range < TOP {
            self.code = (self.code << 8) | self.next_byte()? as u32;
            self.range <<= 8;
        }
        Ok(())
    }

    /// Returns the cumulative frequency the next symbol falls in; follow with
    /// [`RangeDecoder::consume`].
    pub fn decode_freq(&mut self, total: u32) -> Result<u32, CodecError> {
        self.pending = self.range / total;
        let v = self.code / self.pending;
        if v >= total {
            return Err(CodecError::Corrupt(
                "range coder value out of bounds".into(),
            ));
        }
        Ok(v)
    }

    pub fn consume(&mut self, cum: u32, freq: u32) -> Result<(), CodecError> {
        self.code -= self.pending * cum;
        self.range = self.pending * freq;
        self.normalize()
    }

    pub fn decode_raw(&mut self, bits: u32) -> Result<u32, CodecError> {
        if bits == 0 {
            return Ok(0);
        }
        let v = self.decode_freq(1 << bits)?;
        self.consume(v, 1)?;
        Ok(v)
    }

    pub fn decode_bit(&mut self, model: &mut BitModel) -> Result<bool, CodecError> {
        let bound = (self.range >> PROB_BITS) * model.p0 as u32;
        let bit = if self.code < bound {
            self.range = bound;
            false
        } else {
            self.code -= bound;
            self.range -= bound;
            true
        };
        model.update(bit);
        self.normalize()?;
        Ok(bit)
    }

    /// Bytes consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn is_exhausted(&self) -> bool {
        self.pos == self.data.len()
    }
}

/// Adaptive probability of a zero bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitModel {
    p0: u16,
}

impl Default for BitModel {
    fn default() -> Self {
        Self {
            p0: (PROB_ONE / 2) as u16,
        }
    }
}

impl BitModel {
    #[inline]
    fn update(&mut self, bit: bool) {
        // Stays within [31, 65505], never reaching 0 or 2^16.
        if bit {
            self.p0 -= self.p0 >> BIT_ADAPT_SHIFT;
        } else {
            self.p0 += ((PROB_ONE - self.p0 as u32) >> BIT_ADAPT_SHIFT) as u16;
        }
    }
}

/// Parameters shared by encoder and decoder of an adaptive frequency model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub alphabet: usize,
    pub increment: u32,
    /// Frequencies are halved once their total exceeds this.
    pub limit: u32,
}

impl ModelSpec {
    pub fn new(alphabet: usize) -> Self {
        Self {
            alphabet,
            increment: 32,
            limit: 1 << 16,
        }
    }

    fn validate(&self) -> Result<(), CodecError> {
        if self.alphabet == 0
            || self.alphabet as u64 * 2 > self.limit as u64
            || self.increment == 0
            || self.limit > PROB_ONE
        {
            return Err(CodecError::Model(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Adaptive multi-symbol frequency model; every frequency starts at 1.
#[derive(Debug, Clone)]
pub struct FrequencyModel {
    freqs: Vec<u32>,
    total: u32,
    increment: u32,
    limit: u32,
}

impl FrequencyModel {
    pub fn new(spec: ModelSpec) -> Result<Self, CodecError> {
        spec.validate()?;
        Ok(Self {
            freqs: vec![1; spec.alphabet],
            total: spec.alphabet as u32,
            increment: spec.increment,
            limit: spec.limit,
        })
    }

    pub fn alphabet(&self) -> usize {
        self.freqs.len()
    }

    fn update(&mut self, s: usize) {
        self.freqs[s] += self.increment;
        self.total += self.increment;
        if self.total > self.limit {
            self.total = 0;
            for f in &mut self.freqs {
                *f = (*f).div_ceil(2);
                self.total += *f;
            }
        }
    }

    pub fn encode(&mut self, enc: &mut RangeEncoder, s: usize) -> Result<(), CodecError> {
        if s >= self.freqs.len() {
            return Err(CodecError::SymbolOutOfRange {
                symbol: s as u64,
                alphabet: self.freqs.len(),
            });
        }
        let cum: u32 = self.freqs[..s].iter().sum();
        enc.encode(cum, self.freqs[s], self.total);
        self.update(s);
        Ok(())
    }

    pub fn decode(&mut self, dec: &mut RangeDecoder<'_>) -> Result<usize, CodecError> {
        let target = dec.decode_freq(self.total)?;
        let mut cum = 0;
        for (s, &f) in self.freqs.iter().enumerate() {
            if target < cum + f {
                dec.consume(cum, f)?;
                self.update(s);
                return Ok(s);
            }
            cum += f;
        }
        Err(CodecError::Corrupt("symbol beyond model total".into()))
    }
}

/// Codes a symbol sequence with one adaptive model. The output carries the
/// symbol count as a 4-byte little-endian prefix.
pub fn rc_encode(symbols: &[u32], spec: ModelSpec) -> Result<Vec<u8>, CodecError> {
    let mut model = FrequencyModel::new(spec)?;
    let count =
        u32::try_from(symbols.len()).map_err(|_| CodecError::Model("too many symbols".into()))?;
    let mut enc = RangeEncoder::new();
    for &s in symbols {
        model.encode(&mut enc, s as usize)?;
    }
    let mut out = count.to_le_bytes().to_vec();
    out.extend(enc.finish());
    Ok(out)
}

pub fn rc_decode(bytes: &[u8], n: usize, spec: ModelSpec) -> Result<Vec<u32>, CodecError> {
    let head: [u8; 4] = bytes
        .get(..4)
        .ok_or(CodecError::Truncated)?
        .try_into()
        .expect("4 bytes");
    let stored = u32::from_le_bytes(head) as usize;
    if stored != n {
        return Err(CodecError::CountMismatch {
            expected: n,
            stored,
        });
    }
    let mut model = FrequencyModel::new(spec)?;
    let mut dec = RangeDecoder::new(&bytes[4..])?;
    let out = (0..n)
        .map(|_| model.decode(&mut dec).map(|s| s as u32))
        .collect::<Result<Vec<_>, _>>()?;
    if !dec.is_exhausted() {
        return Err(CodecError::TrailingData(bytes.len() - 4 - dec.position()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_sequence() {
        let spec = ModelSpec::new(256);
        let bytes = rc_encode(&[], spec).unwrap();
        assert_eq!(rc_decode(&bytes, 0, spec).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn repeated_symbol_is_nearly_free() {
        let spec = ModelSpec::new(256);
        let n = 100_000;
        let symbols = vec![17u32; n];
        let bytes = rc_encode(&symbols, spec).unwrap();
        // Zero-entropy source: budget 0.02 bits/symbol plus a fixed overhead
        // covering model warm-up, the count prefix and the coder flush.
        let budget_bits = 0.02 * n as f64 + 8.0 * 64.0;
        assert!(
            ((bytes.len() * 8) as f64) < budget_bits,
            "{} bytes",
            bytes.len()
        );
        assert_eq!(rc_decode(&bytes, n, spec).unwrap(), symbols);
    }

    #[test]
    fn truncation_and_count_mismatch_fail() {
        let spec = ModelSpec::new(16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let symbols: Vec<u32> = (0..500).map(|_| rng.gen_range(0..16)).collect();
        let bytes = rc_encode(&symbols, spec).unwrap();
        assert_eq!(
            rc_decode(&bytes[..bytes.len() - 3], 500, spec),
            Err(CodecError::Truncated)
        );
        assert!(matches!(
            rc_decode(&bytes, 499, spec),
            Err(CodecError::CountMismatch { .. })
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(
            rc_decode(&extra, 500, spec),
            Err(CodecError::TrailingData(1))
        ));
    }

    #[test]
    fn out_of_alphabet_rejected() {
        assert!(matches!(
            rc_encode(&[3, 9], ModelSpec::new(8)),
            Err(CodecError::SymbolOutOfRange { symbol: 9, .. })
        ));
    }

    #[test]
    fn carry_propagation_mixed_streams() {
        // Interleaves skewed binary decisions with raw bits to exercise
        // carries through runs of 0xFF.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let ops: Vec<(bool, u32)> = (0..20_000)
            .map(|_| (rng.gen_bool(0.97), rng.gen_range(0..1 << 12)))
            .collect();
        let mut enc = RangeEncoder::new();
        let mut m = BitModel::default();
        for &(b, raw) in &ops {
            enc.encode_bit(&mut m, b);
            if !b {
                enc.encode_raw(raw, 12);
            }
        }
        let bytes = enc.finish();
        let mut dec = RangeDecoder::new(&bytes).unwrap();
        let mut m = BitModel::default();
        for &(b, raw) in &ops {
            assert_eq!(dec.decode_bit(&mut m).unwrap(), b);
            if !b {
                assert_eq!(dec.decode_raw(12).unwrap(), raw);
            }
        }
        assert!(dec.is_exhausted());
    }

    proptest! {
        #[test]
        fn round_trip(seed in any::<u64>(), alphabet in 1usize..300, len in 0usize..2000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let skew = rng.gen_range(1..=alphabet);
            let symbols: Vec<u32> = (0..len).map(|_| rng.gen_range(0..skew) as u32).collect();
            let spec = ModelSpec::new(alphabet);
            let bytes = rc_encode(&symbols, spec).unwrap();
            prop_assert_eq!(rc_decode(&bytes, len, spec).unwrap(), symbols);
        }
    }
}
