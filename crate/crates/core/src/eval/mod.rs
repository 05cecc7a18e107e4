//! Fidelity and rate metrics: PSNR in scene, interval and firing-rate
//! domains, bits per pixel, Bjøntegaard delta rate, and quality sweeps.

mod bd;
mod sweep;

use thiserror::Error;

pub use bd::{bd_rate, RdCurve, RdMetric, RdPoint};
pub use sweep::{rd_sweep, rd_sweep_with_truth, SweepReport};

use crate::codec::{CodecError, CompressedContainer};
use crate::representation::spikes_to_isi;
use crate::stream::SpikeStream;

/// Reported in place of infinity when the error is exactly zero.
pub const PSNR_CAP: f64 = 99.0;
/// Intervals are clipped to this before ISI-domain comparison, which also
/// serves as the peak.
pub const ISI_CAP: u32 = 255;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("shape mismatch: {0} vs {1} samples")]
    Shape(usize, usize),
    #[error("no samples to compare")]
    Empty,
    #[error("no position is defined in both streams")]
    EmptyIntersection,
    #[error("reconstruction covers frames {offset}..{end} but the raw stream has {raw_frames}")]
    FrameRange {
        offset: usize,
        end: usize,
        raw_frames: usize,
    },
    #[error("container has no keyframes")]
    NoKeyframes,
    #[error("curve needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("bpp must increase strictly along the curve: quality {0} and {1} violate it")]
    NotIncreasing(u8, u8),
    #[error("invalid rate point: {0}")]
    InvalidPoint(String),
    #[error("point at quality {0} lacks the requested metric")]
    MissingMetric(u8),
    #[error("PSNR ranges [{0:.3}, {1:.3}] and [{2:.3}, {3:.3}] do not overlap")]
    NoOverlap(f64, f64, f64, f64),
    #[error("least-squares fit failed")]
    Fit,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

pub fn psnr(a: &[f64], b: &[f64], peak: f64) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::Shape(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    let mse = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64;
    Ok(psnr_from_mse(mse, peak))
}

pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse <= 0.0 {
        return PSNR_CAP;
    }
    (10.0 * (peak * peak / mse).log10()).min(PSNR_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Isi,
    FiringRate,
}

/// PSNR between the interval (or firing-rate) fields of `raw` restricted to
/// frames `offset..offset + recon.n_frames()` and of `recon`, over positions
/// defined in both.
pub fn domain_psnr(
    raw: &SpikeStream,
    recon: &SpikeStream,
    offset: usize,
    domain: Domain,
) -> Result<f64, EvalError> {
    if (raw.width(), raw.height()) != (recon.width(), recon.height()) {
        return Err(EvalError::Shape(raw.pixels(), recon.pixels()));
    }
    let end = offset + recon.n_frames();
    if end > raw.n_frames() {
        return Err(EvalError::FrameRange {
            offset,
            end,
            raw_frames: raw.n_frames(),
        });
    }
    let raw = raw
        .slice_frames(offset, end)
        .map_err(|_| EvalError::FrameRange {
            offset,
            end,
            raw_frames: raw.n_frames(),
        })?;
    let (a, b) = (spikes_to_isi(&raw), spikes_to_isi(recon));
    let mut sse = 0.0;
    let mut count = 0usize;
    for (&x, &y) in a.values().iter().zip(b.values()) {
        if x == 0 || y == 0 {
            continue;
        }
        let e = match domain {
            Domain::Isi => x.min(ISI_CAP) as f64 - y.min(ISI_CAP) as f64,
            Domain::FiringRate => 1.0 / x as f64 - 1.0 / y as f64,
        };
        sse += e * e;
        count += 1;
    }
    if count == 0 {
        return Err(EvalError::EmptyIntersection);
    }
    let peak = match domain {
        Domain::Isi => ISI_CAP as f64,
        Domain::FiringRate => 1.0,
    };
    Ok(psnr_from_mse(sse / count as f64, peak))
}

/// Container bits per pixel per coded keyframe.
pub fn bpp(container: &CompressedContainer) -> Result<f64, EvalError> {
    let k = container.payloads.len();
    if k == 0 {
        return Err(EvalError::NoKeyframes);
    }
    Ok(container.total_bits() as f64 / (container.width * container.height * k) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{compress, CodecConfig, Payload};
    use crate::scene::ConstantScene;
    use crate::spike_model::{simulate, SimulatorConfig};

    fn periodic(w: usize, n: usize, period: usize, phase: usize) -> SpikeStream {
        let times: Vec<Vec<usize>> = (0..w)
            .map(|_| (phase..n).step_by(period).collect())
            .collect();
        SpikeStream::from_spike_times(w, 1, n, &times).unwrap()
    }

    #[test]
    fn psnr_examples() {
        assert_eq!(psnr(&[0.3, 0.4], &[0.3, 0.4], 1.0).unwrap(), PSNR_CAP);
        assert!((psnr(&[0.0; 4], &[0.1; 4], 1.0).unwrap() - 20.0).abs() < 1e-9);
        let a = vec![10.0; 9];
        let b = vec![11.0; 9];
        assert!((psnr(&a, &b, 255.0).unwrap() - 48.130803608679).abs() < 1e-9);
        assert_eq!(psnr(&[0.0], &[0.0, 1.0], 1.0), Err(EvalError::Shape(1, 2)));
    }

    #[test]
    fn psnr_falls_with_noise_amplitude() {
        let a: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let noise: Vec<f64> = (0..100)
            .map(|i| ((i * 7919 % 101) as f64 / 101.0) - 0.5)
            .collect();
        let mut last = f64::INFINITY;
        for amp in [0.01, 0.02, 0.05, 0.1, 0.2] {
            let b: Vec<f64> = a.iter().zip(&noise).map(|(x, n)| x + amp * n).collect();
            let p = psnr(&a, &b, 1.0).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn domain_psnr_examples() {
        let s = periodic(3, 40, 4, 1);
        assert_eq!(domain_psnr(&s, &s, 0, Domain::Isi).unwrap(), PSNR_CAP);
        let t = periodic(3, 40, 5, 1);
        let p = domain_psnr(&s, &t, 0, Domain::Isi).unwrap();
        assert!((p - 48.130803608679).abs() < 1e-9);
        assert_eq!(p, domain_psnr(&t, &s, 0, Domain::Isi).unwrap());
        let fr = domain_psnr(&s, &t, 0, Domain::FiringRate).unwrap();
        assert!((fr - 10.0 * (1.0f64 / 0.05 / 0.05).log10()).abs() < 1e-9);

        let a = SpikeStream::from_spike_times(2, 1, 20, &[vec![2, 6], vec![]]).unwrap();
        let b = SpikeStream::from_spike_times(2, 1, 20, &[vec![], vec![3, 9]]).unwrap();
        assert_eq!(
            domain_psnr(&a, &b, 0, Domain::Isi),
            Err(EvalError::EmptyIntersection)
        );
    }

    #[test]
    fn domain_psnr_on_sub_range() {
        let s = periodic(2, 60, 4, 3);
        let sub = s.slice_frames(10, 50).unwrap();
        assert_eq!(domain_psnr(&s, &sub, 10, Domain::Isi).unwrap(), PSNR_CAP);
        assert!(matches!(
            domain_psnr(&s, &sub, 30, Domain::Isi),
            Err(EvalError::FrameRange { .. })
        ));
    }

    #[test]
    fn bpp_counts_header_and_payloads() {
        let s = simulate(
            &ConstantScene {
                width: 64,
                height: 64,
                n_frames: 100,
                luminance: 0.5,
            },
            &SimulatorConfig::default(),
        )
        .unwrap();
        let mut c = compress(&s, &CodecConfig::default()).unwrap();
        assert!(bpp(&c).unwrap() < 0.1);
        let fill = 1024 - crate::codec::HEADER_LEN - 8;
        assert_eq!(c.payloads.len(), 9);
        c.payloads = vec![Payload {
            keyframe: 21,
            bytes: vec![0; fill],
        }];
        assert_eq!(bpp(&c).unwrap(), 2.0);
        c.payloads.clear();
        assert_eq!(bpp(&c), Err(EvalError::NoKeyframes));
    }
}
