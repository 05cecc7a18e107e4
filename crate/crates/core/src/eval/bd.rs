//! Rate-distortion points, curves and the Bjøntegaard delta rate.

use nalgebra::{DMatrix, DVector};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub quality: u8,
    pub bpp: f64,
    pub psnr_scene: Option<f64>,
    pub psnr_isi: Option<f64>,
    pub psnr_fr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RdMetric {
    Scene,
    Isi,
    FiringRate,
}

impl RdMetric {
    pub fn of(self, p: &RdPoint) -> Option<f64> {
        match self {
            RdMetric::Scene => p.psnr_scene,
            RdMetric::Isi => p.psnr_isi,
            RdMetric::FiringRate => p.psnr_fr,
        }
    }
}

impl std::fmt::Display for RdMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RdMetric::Scene => "scene",
            RdMetric::Isi => "isi",
            RdMetric::FiringRate => "fr",
        })
    }
}

impl std::str::FromStr for RdMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scene" => Ok(RdMetric::Scene),
            "isi" => Ok(RdMetric::Isi),
            "fr" | "firing_rate" => Ok(RdMetric::FiringRate),
            other => Err(format!(
                "unknown metric `{other}` (expected scene, isi or fr)"
            )),
        }
    }
}

/// Points ordered by strictly increasing bpp.
#[derive(Debug, Clone, PartialEq)]
pub struct RdCurve {
    points: Vec<RdPoint>,
}

impl RdCurve {
    pub fn new(points: Vec<RdPoint>) -> Result<Self, EvalError> {
        for p in &points {
            if !(p.bpp.is_finite() && p.bpp > 0.0) {
                return Err(EvalError::InvalidPoint(format!(
                    "bpp {} at quality {}",
                    p.bpp, p.quality
                )));
            }
            for v in [p.psnr_scene, p.psnr_isi, p.psnr_fr].into_iter().flatten() {
                if !v.is_finite() {
                    return Err(EvalError::InvalidPoint(format!(
                        "PSNR {v} at quality {}",
                        p.quality
                    )));
                }
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[1].bpp <= w[0].bpp) {
            return Err(EvalError::NotIncreasing(w[0].quality, w[1].quality));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[RdPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

const MIN_POINTS: usize = 4;
const DEGREE: usize = 3;

/// Least-squares polynomial coefficients (ascending powers) of `y` on `x`.
fn polyfit(x: &[f64], y: &[f64]) -> Result<Vec<f64>, EvalError> {
    let a = DMatrix::from_fn(x.len(), DEGREE + 1, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|_| EvalError::Fit)?;
    Ok(coef.iter().copied().collect())
}

/// Definite integral of the polynomial over `[lo, hi]`.
fn integrate(coef: &[f64], lo: f64, hi: f64) -> f64 {
    let antideriv = |x: f64| {
        coef.iter()
            .enumerate()
            .map(|(j, c)| c * x.powi(j as i32 + 1) / (j + 1) as f64)
            .sum::<f64>()
    };
    antideriv(hi) - antideriv(lo)
}

fn samples(curve: &RdCurve, metric: RdMetric) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    if curve.len() < MIN_POINTS {
        return Err(EvalError::TooFewPoints {
            needed: MIN_POINTS,
            got: curve.len(),
        });
    }
    curve
        .points()
        .iter()
        .map(|p| {
            metric
                .of(p)
                .map(|q| (q, p.bpp.log10()))
                .ok_or(EvalError::MissingMetric(p.quality))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|v| v.into_iter().unzip())
}

/// Average rate difference of `test` against `anchor` at equal quality, in
/// percent; negative means `test` needs fewer bits.
pub fn bd_rate(anchor: &RdCurve, test: &RdCurve, metric: RdMetric) -> Result<f64, EvalError> {
    let (qa, ra) = samples(anchor, metric)?;
    let (qt, rt) = samples(test, metric)?;
    let range = |q: &[f64]| {
        q.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    };
    let (alo, ahi) = range(&qa);
    let (tlo, thi) = range(&qt);
    let (lo, hi) = (alo.max(tlo), ahi.min(thi));
    if lo >= hi {
        return Err(EvalError::NoOverlap(alo, ahi, tlo, thi));
    }
    // Fit in a centered, scaled variable for conditioning.
    let center = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);
    let norm = |q: &[f64]| q.iter().map(|v| (v - center) / scale).collect::<Vec<_>>();
    let pa = polyfit(&norm(&qa), &ra)?;
    let pt = polyfit(&norm(&qt), &rt)?;
    let avg = (integrate(&pt, -1.0, 1.0) - integrate(&pa, -1.0, 1.0)) / 2.0;
    Ok((10f64.powf(avg) - 1.0) * 100.0)
}
