//! Quality and rate figures.

use crate::error::{ensure, Result};
use crate::video_io::Frame;

const MODULE: &str = "metrics";

/// PSNR in dB over all samples of equally sized frame sequences; infinite
/// when identical.
pub fn psnr_frames(a: &[Frame], b: &[Frame]) -> Result<f64> {
    ensure!(
        a.len() == b.len() && !a.is_empty(),
        MODULE,
        "cannot compare {} frames with {}",
        a.len(),
        b.len()
    );
    let mut sse = 0.0;
    let mut count = 0usize;
    for (x, y) in a.iter().zip(b) {
        ensure!(
            x.width() == y.width() && x.height() == y.height(),
            MODULE,
            "frame size {}x{} differs from {}x{}",
            x.width(),
            x.height(),
            y.width(),
            y.height()
        );
        sse += x
            .samples()
            .iter()
            .zip(y.samples())
            .map(|(&p, &q)| (f64::from(p) - f64::from(q)).powi(2))
            .sum::<f64>();
        count += x.samples().len();
    }
    if sse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0f64 * 255.0 / (sse / count as f64)).log10())
}

pub fn psnr(a: &Frame, b: &Frame) -> Result<f64> {
    psnr_frames(std::slice::from_ref(a), std::slice::from_ref(b))
}

/// Original bits over coded bits.
pub fn compression_ratio(original_bytes: usize, coded_bytes: usize) -> Result<f64> {
    ensure!(coded_bytes > 0, MODULE, "coded size is zero");
    Ok(original_bytes as f64 / coded_bytes as f64)
}

/// Column-block vector length and block count of a measured band at
/// `level`: blocks of `2^level` columns, so every vector has `height`
/// samples.
pub fn band_blocks(width: usize, level: usize) -> usize {
    width >> (2 * level)
}

/// Check that a `width`×`height` frame supports `levels` of decomposition
/// with the column-block layout.
pub fn check_geometry(width: usize, height: usize, levels: usize) -> Result<()> {
    ensure!((1..=3).contains(&levels), MODULE, "levels must be 1..=3, got {levels}");
    let wq = 1usize << (2 * levels);
    let hq = 1usize << (levels + 1);
    ensure!(
        width % wq == 0 && width >= wq,
        MODULE,
        "width {width} must be a positive multiple of {wq} for {levels} level(s)"
    );
    ensure!(
        height % hq == 0 && height >= 8,
        MODULE,
        "height {height} must be a multiple of {hq} and at least 8 for {levels} level(s)"
    );
    Ok(())
}

/// Share of samples sent before entropy coding: LLL coefficients plus `m`
/// measurements per column block of every other band, over both frames.
pub fn measurement_percentage(width: usize, height: usize, m: usize, levels: usize) -> Result<f64> {
    check_geometry(width, height, levels)?;
    let lll = (width >> levels) * (height >> levels);
    let mut blocks = band_blocks(width, levels);
    for level in 1..=levels {
        blocks += 6 * band_blocks(width, level);
    }
    Ok(100.0 * (lll + m * blocks) as f64 / (2 * width * height) as f64)
}
