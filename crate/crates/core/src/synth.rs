//! Deterministic synthetic test sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::video_io::{Frame, FramePair};

/// Uniform random frame.
pub fn random_frame(width: usize, height: usize, rng: &mut impl Rng) -> Result<Frame> {
    Frame::new(width, height, (0..width * height).map(|_| rng.random()).collect())
}

/// Two independent uniform random frames.
pub fn random_pair(width: usize, height: usize, seed: u64) -> Result<FramePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FramePair::new(random_frame(width, height, &mut rng)?, random_frame(width, height, &mut rng)?)
}

/// Slow motion: a Gaussian blob drifting over a smooth shaded background.
pub fn moving_blob(width: usize, height: usize, frames: usize, seed: u64) -> Result<Vec<Frame>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);
    let (mut cx, mut cy) = (rng.random_range(0.3..0.5) * w, rng.random_range(0.3..0.5) * h);
    let (vx, vy) = (rng.random_range(0.5..1.5), rng.random_range(0.2..0.8));
    let sigma = w.min(h) / 8.0;
    (0..frames)
        .map(|_| {
            let values: Vec<f64> = (0..height)
                .flat_map(|y| (0..width).map(move |x| (x as f64, y as f64)))
                .map(|(x, y)| {
                    let bg = 70.0
                        + 35.0 * (2.0 * std::f64::consts::PI * x / w).sin() * (std::f64::consts::PI * y / h).cos();
                    let r2 = (x - cx).powi(2) + (y - cy).powi(2);
                    bg + 140.0 * (-r2 / (2.0 * sigma * sigma)).exp()
                })
                .collect();
            cx += vx;
            cy += vy;
            Frame::from_f64(width, height, &values)
        })
        .collect()
}

/// Bilinear value noise: a `cells`×`cells` lattice of random values.
fn value_noise(width: usize, height: usize, cells: usize, rng: &mut impl Rng) -> Vec<f64> {
    let lattice: Vec<f64> = (0..(cells + 1) * (cells + 1)).map(|_| rng.random_range(-1.0..1.0)).collect();
    let at = |i: usize, j: usize| lattice[(j % (cells + 1)) * (cells + 1) + i % (cells + 1)];
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        let fy = y as f64 * cells as f64 / height as f64;
        let (j, ty) = (fy as usize, fy.fract());
        for x in 0..width {
            let fx = x as f64 * cells as f64 / width as f64;
            let (i, tx) = (fx as usize, fx.fract());
            let top = at(i, j) * (1.0 - tx) + at(i + 1, j) * tx;
            let bottom = at(i, j + 1) * (1.0 - tx) + at(i + 1, j + 1) * tx;
            out.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    out
}

/// High motion: a multi-octave texture translated by a random walk of up to
/// four pixels per frame in each direction.
pub fn random_walk_texture(width: usize, height: usize, frames: usize, seed: u64) -> Result<Vec<Frame>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tex = vec![128.0; width * height];
    for (cells, amp) in [(4, 60.0), (8, 25.0), (16, 10.0)] {
        for (t, n) in tex.iter_mut().zip(value_noise(width, height, cells, &mut rng)) {
            *t += amp * n;
        }
    }
    let (mut ox, mut oy) = (0i64, 0i64);
    (0..frames)
        .map(|_| {
            let values: Vec<f64> = (0..height as i64)
                .flat_map(|y| (0..width as i64).map(move |x| (x, y)))
                .map(|(x, y)| {
                    let sx = (x + ox).rem_euclid(width as i64) as usize;
                    let sy = (y + oy).rem_euclid(height as i64) as usize;
                    tex[sy * width + sx]
                })
                .collect();
            ox += rng.random_range(-4..=4);
            oy += rng.random_range(-4..=4);
            Frame::from_f64(width, height, &values)
        })
        .collect()
}

/// Named sequences used by the report and the end-to-end checks.
pub fn corpus(width: usize, height: usize, frames: usize, seed: u64) -> Result<Vec<(String, Vec<Frame>)>> {
    Ok(vec![
        ("blob".to_string(), moving_blob(width, height, frames, seed)?),
        ("texture".to_string(), random_walk_texture(width, height, frames, seed.wrapping_add(1))?),
    ])
}
