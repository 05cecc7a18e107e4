//! Deterministic synthetic content shared by the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spikecodec::{FnScene, SceneFrame, SceneSequence};

/// Smooth random field: bilinear interpolation of a coarse random lattice.
fn value_noise(w: usize, h: usize, cell: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gw = w / cell + 2;
    let gh = h / cell + 2;
    let lattice: Vec<f64> = (0..gw * gh).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (fx, fy) = (x as f64 / cell as f64, y as f64 / cell as f64);
            let (ix, iy) = (fx as usize, fy as usize);
            let (tx, ty) = (fx - ix as f64, fy - iy as f64);
            let (sx, sy) = (tx * tx * (3.0 - 2.0 * tx), ty * ty * (3.0 - 2.0 * ty));
            let at = |i: usize, j: usize| lattice[j * gw + i];
            let top = at(ix, iy) * (1.0 - sx) + at(ix + 1, iy) * sx;
            let bot = at(ix, iy + 1) * (1.0 - sx) + at(ix + 1, iy + 1) * sx;
            out[y * w + x] = top * (1.0 - sy) + bot * sy;
        }
    }
    out
}

/// Natural-looking still: multi-octave smooth noise with 1/f amplitudes,
/// a few flat-shaded discs and rectangles with hard edges, mapped into
/// `[0.08, 0.92]`.
pub fn natural_image(w: usize, h: usize, seed: u64) -> SceneFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = vec![0.0; w * h];
    let mut cell = w.max(h) / 2;
    let mut amp = 0.5;
    while cell >= 4 {
        let layer = value_noise(w, h, cell, &mut rng);
        img.iter_mut().zip(&layer).for_each(|(v, l)| *v += amp * l);
        cell /= 2;
        amp *= 0.5;
    }
    for _ in 0..6 {
        let (cx, cy) = (rng.gen_range(0..w) as f64, rng.gen_range(0..h) as f64);
        let r = rng.gen_range(w as f64 / 16.0..w as f64 / 5.0);
        let shade = rng.gen_range(-0.3..0.3);
        let disc = rng.gen_bool(0.5);
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                let inside = if disc {
                    dx * dx + dy * dy < r * r
                } else {
                    dx.abs() < r && dy.abs() < 0.6 * r
                };
                if inside {
                    img[y * w + x] += shade;
                }
            }
        }
    }
    let (lo, hi) = img
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let data = img
        .iter()
        .map(|v| 0.08 + 0.84 * (v - lo) / (hi - lo))
        .collect();
    SceneFrame::new(w, h, data).unwrap()
}

/// Static sequence of `n` copies of a natural still.
pub fn static_sequence(w: usize, h: usize, n: usize, seed: u64) -> SceneSequence {
    let f = natural_image(w, h, seed);
    SceneSequence::new(vec![f; n]).unwrap()
}

/// A natural still translating right by one pixel every `frames_per_px`
/// frames, edges clamped.
pub fn panning_scene(
    w: usize,
    h: usize,
    n: usize,
    frames_per_px: usize,
    seed: u64,
) -> FnScene<impl Fn(usize, usize, usize) -> f64> {
    let pad = n / frames_per_px + 1;
    let big = natural_image(w + pad, h, seed);
    FnScene {
        width: w,
        height: h,
        n_frames: n,
        f: move |t: usize, x: usize, y: usize| big.get(x + pad - t / frames_per_px, y),
    }
}

/// Bright bar of width 4 sliding right one pixel every 10 frames over a
/// dim textured background.
pub fn moving_bar(
    w: usize,
    h: usize,
    n: usize,
    seed: u64,
) -> FnScene<impl Fn(usize, usize, usize) -> f64> {
    let bg = natural_image(w, h, seed);
    FnScene {
        width: w,
        height: h,
        n_frames: n,
        f: move |t: usize, x: usize, y: usize| {
            let bx = (w / 8 + t / 10) % w;
            if x >= bx && x < bx + 4 {
                0.95
            } else {
                0.1 + 0.3 * bg.get(x, y)
            }
        },
    }
}
