//! Separable 2-D 9/7 DWT per frame, Haar across a frame pair, and the
//! sub-band bookkeeping the CS stage needs.
//!
//! Float mode runs the lifting cascade in `f64` with the exact constants.
//! Fixed mode runs the bit-true integer datapath ([`FixedArith`]); its
//! coefficients are reported as `f64` and are exact multiples of 1/16. The
//! inverse is always floating point, with constants matched to the forward
//! datapath.

use std::fmt;

use crate::arith::{FixedArith, FloatArith, LiftArith};
use crate::error::{ensure, Error, Result};
use crate::lifting::{forward_97_with, forward_haar_with, inverse_97, inverse_haar_with, CoeffMode, LiftingCoeffs};
use crate::video_io::{Frame, FramePair};

const MODULE: &str = "dwt3d";

/// A rectangular block of coefficients, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Band<T = f64> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

impl<T: Copy + Default> Band<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Band {
            width,
            height,
            data: vec![T::default(); width * height],
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: T) {
        self.data[row * self.width + col] = v;
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> Band<U> {
        Band {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    LL,
    /// Horizontal low, vertical high.
    LH,
    /// Horizontal high, vertical low.
    HL,
    HH,
}

impl Orientation {
    pub const DETAILS: [Orientation; 3] = [Orientation::LH, Orientation::HL, Orientation::HH];
}

/// Spatial sub-bands of one frame. `details[l]` holds level `l + 1` as
/// (LH, HL, HH); only the deepest LL is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandGrid<T = f64> {
    pub width: usize,
    pub height: usize,
    pub details: Vec<[Band<T>; 3]>,
    pub ll: Band<T>,
}

impl<T: Copy + Default> SubbandGrid<T> {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn band(&self, level: usize, o: Orientation) -> Option<&Band<T>> {
        match o {
            Orientation::LL => (level == self.levels()).then_some(&self.ll),
            _ => self.details.get(level.checked_sub(1)?).map(|d| &d[detail_index(o)]),
        }
    }

    pub fn band_mut(&mut self, level: usize, o: Orientation) -> Option<&mut Band<T>> {
        match o {
            Orientation::LL => (level == self.details.len()).then_some(&mut self.ll),
            _ => self
                .details
                .get_mut(level.checked_sub(1)?)
                .map(|d| &mut d[detail_index(o)]),
        }
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U + Copy) -> SubbandGrid<U> {
        SubbandGrid {
            width: self.width,
            height: self.height,
            details: self
                .details
                .iter()
                .map(|[a, b, c]| [a.map(f), b.map(f), c.map(f)])
                .collect(),
            ll: self.ll.map(f),
        }
    }

    pub fn coefficient_count(&self) -> usize {
        self.ll.data.len() + self.details.iter().flatten().map(|b| b.data.len()).sum::<usize>()
    }

    fn zeros(width: usize, height: usize, levels: usize) -> Self {
        let details = (1..=levels)
            .map(|l| {
                let (w, h) = (width >> l, height >> l);
                [Band::zeros(w, h), Band::zeros(w, h), Band::zeros(w, h)]
            })
            .collect();
        SubbandGrid {
            width,
            height,
            details,
            ll: Band::zeros(width >> levels, height >> levels),
        }
    }
}

impl SubbandGrid<f64> {
    pub fn energy(&self) -> f64 {
        self.ll.data.iter().chain(self.details.iter().flatten().flat_map(|b| b.data.iter())).map(|v| v * v).sum()
    }
}

fn detail_index(o: Orientation) -> usize {
    match o {
        Orientation::LH => 0,
        Orientation::HL => 1,
        Orientation::HH => 2,
        Orientation::LL => unreachable!("LL is not a detail band"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemporalBand {
    L,
    H,
}

/// Names one sub-band of a [`Gof3D`]. Levels count from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BandId {
    pub temporal: TemporalBand,
    pub level: usize,
    pub orientation: Orientation,
}

impl BandId {
    pub fn new(temporal: TemporalBand, level: usize, orientation: Orientation) -> Self {
        BandId {
            temporal,
            level,
            orientation,
        }
    }

    /// The LLL band: deepest LL of the L-frame.
    pub fn lll(levels: usize) -> Self {
        BandId::new(TemporalBand::L, levels, Orientation::LL)
    }

    pub fn is_lll(&self, levels: usize) -> bool {
        *self == BandId::lll(levels)
    }
}

impl fmt::Display for BandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}-{:?}", self.temporal, self.level, self.orientation)
    }
}

/// All bands except LLL in stream order: L-frame detail bands from the
/// deepest level up (LH, HL, HH), then the H-frame LL followed by its detail
/// bands in the same order.
pub fn measured_bands(levels: usize) -> Vec<BandId> {
    let mut out = Vec::with_capacity(1 + 6 * levels);
    for t in [TemporalBand::L, TemporalBand::H] {
        if t == TemporalBand::H {
            out.push(BandId::new(t, levels, Orientation::LL));
        }
        for level in (1..=levels).rev() {
            for o in Orientation::DETAILS {
                out.push(BandId::new(t, level, o));
            }
        }
    }
    out
}

/// Spatio-temporal sub-bands of a frame pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Gof3D {
    pub l_frame: SubbandGrid,
    pub h_frame: SubbandGrid,
    /// Hard threshold applied so far (0 before [`sparsify`]).
    pub threshold: f64,
}

impl Gof3D {
    pub fn zeros(width: usize, height: usize, levels: usize) -> Self {
        Gof3D {
            l_frame: SubbandGrid::zeros(width, height, levels),
            h_frame: SubbandGrid::zeros(width, height, levels),
            threshold: 0.0,
        }
    }

    pub fn levels(&self) -> usize {
        self.l_frame.levels()
    }

    pub fn width(&self) -> usize {
        self.l_frame.width
    }

    pub fn height(&self) -> usize {
        self.l_frame.height
    }

    fn grid(&self, t: TemporalBand) -> &SubbandGrid {
        match t {
            TemporalBand::L => &self.l_frame,
            TemporalBand::H => &self.h_frame,
        }
    }

    pub fn band(&self, id: BandId) -> Result<&Band> {
        self.grid(id.temporal)
            .band(id.level, id.orientation)
            .ok_or_else(|| Error::validation(MODULE, format!("no band {id} in a {}-level GOF", self.levels())))
    }

    pub fn band_mut(&mut self, id: BandId) -> Result<&mut Band> {
        let levels = self.levels();
        let grid = match id.temporal {
            TemporalBand::L => &mut self.l_frame,
            TemporalBand::H => &mut self.h_frame,
        };
        grid.band_mut(id.level, id.orientation)
            .ok_or_else(|| Error::validation(MODULE, format!("no band {id} in a {levels}-level GOF")))
    }

    pub fn coefficient_count(&self) -> usize {
        self.l_frame.coefficient_count() + self.h_frame.coefficient_count()
    }

    pub fn energy(&self) -> f64 {
        self.l_frame.energy() + self.h_frame.energy()
    }
}

fn check_levels(width: usize, height: usize, levels: usize) -> Result<()> {
    ensure!(levels >= 1, MODULE, "levels must be at least 1");
    ensure!(levels < 16, MODULE, "levels {levels} is unreasonably deep");
    let d = 1usize << levels;
    ensure!(
        width % d == 0 && height % d == 0,
        MODULE,
        "{width}x{height} frame is not divisible by 2^{levels} = {d}"
    );
    Ok(())
}

/// One analysis level: rows first, then columns. Returns (LL, LH, HL, HH).
fn analyze_level<A: LiftArith>(ar: &A, plane: &Band<A::Word>) -> [Band<A::Word>; 4] {
    let (w, h) = (plane.width, plane.height);
    let (hw, hh) = (w / 2, h / 2);
    let mut rows = Band::zeros(w, h);
    for r in 0..h {
        let (lo, hi) = forward_97_with(ar, &plane.data[r * w..(r + 1) * w]);
        rows.data[r * w..r * w + hw].copy_from_slice(&lo);
        rows.data[r * w + hw..(r + 1) * w].copy_from_slice(&hi);
    }
    let mut out = [Band::zeros(hw, hh), Band::zeros(hw, hh), Band::zeros(hw, hh), Band::zeros(hw, hh)];
    let mut col = vec![A::Word::default(); h];
    for c in 0..w {
        for (r, v) in col.iter_mut().enumerate() {
            *v = rows.get(r, c);
        }
        let (lo, hi) = forward_97_with(ar, &col);
        let (lo_band, hi_band, cc) = if c < hw { (0, 1, c) } else { (2, 3, c - hw) };
        for r in 0..hh {
            out[lo_band].set(r, cc, lo[r]);
            out[hi_band].set(r, cc, hi[r]);
        }
    }
    out
}

/// Multi-level forward 2-D transform over any datapath arithmetic.
pub fn forward_2d_with<A: LiftArith>(ar: &A, plane: Band<A::Word>, levels: usize) -> SubbandGrid<A::Word> {
    let (width, height) = (plane.width, plane.height);
    let mut ll = plane;
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let [a, lh, hl, hh] = analyze_level(ar, &ll);
        details.push([lh, hl, hh]);
        ll = a;
    }
    SubbandGrid {
        width,
        height,
        details,
        ll,
    }
}

/// Constants the floating-point inverse must use to undo `coeffs`' forward
/// datapath.
pub fn synthesis_coeffs(coeffs: &LiftingCoeffs) -> LiftingCoeffs {
    match coeffs.mode {
        CoeffMode::FloatExact => *coeffs,
        CoeffMode::FixedAdopted => coeffs.quantized(),
    }
}

/// Forward 2-D transform of a sample plane.
pub fn forward_2d_f64(
    width: usize,
    height: usize,
    samples: &[f64],
    levels: usize,
    coeffs: &LiftingCoeffs,
) -> Result<SubbandGrid> {
    check_levels(width, height, levels)?;
    ensure!(samples.len() == width * height, MODULE, "plane has {} samples, expected {}", samples.len(), width * height);
    Ok(match coeffs.mode {
        CoeffMode::FloatExact => {
            let ar = FloatArith::new(coeffs);
            forward_2d_with(&ar, Band { width, height, data: samples.to_vec() }, levels)
        }
        CoeffMode::FixedAdopted => {
            let ar = FixedArith::new(coeffs);
            let data = samples.iter().map(|&v| ar.from_f64(v)).collect();
            forward_2d_with(&ar, Band { width, height, data }, levels).map(|w| ar.to_f64(w))
        }
    })
}

pub fn forward_2d(frame: &Frame, levels: usize, coeffs: &LiftingCoeffs) -> Result<SubbandGrid> {
    forward_2d_f64(frame.width(), frame.height(), &frame.to_f64(), levels, coeffs)
}

fn synthesize_level(parts: [&Band; 4], c: &LiftingCoeffs) -> Result<Band> {
    let [ll, lh, hl, hh] = parts;
    let (hw, hh_) = (ll.width, ll.height);
    let (w, h) = (2 * hw, 2 * hh_);
    let mut rows = Band::zeros(w, h);
    let mut lo = vec![0.0; hh_];
    let mut hi = vec![0.0; hh_];
    for col in 0..w {
        let (lb, hb, cc) = if col < hw { (ll, lh, col) } else { (hl, hh, col - hw) };
        for r in 0..hh_ {
            lo[r] = lb.get(r, cc);
            hi[r] = hb.get(r, cc);
        }
        let x = inverse_97(&lo, &hi, c)?;
        for (r, v) in x.into_iter().enumerate() {
            rows.set(r, col, v);
        }
    }
    let mut out = Band::zeros(w, h);
    for r in 0..h {
        let row = &rows.data[r * w..(r + 1) * w];
        let x = inverse_97(&row[..hw], &row[hw..], c)?;
        out.data[r * w..(r + 1) * w].copy_from_slice(&x);
    }
    Ok(out)
}

fn check_grid(grid: &SubbandGrid) -> Result<()> {
    let levels = grid.levels();
    check_levels(grid.width, grid.height, levels)?;
    for (i, d) in grid.details.iter().enumerate() {
        let (w, h) = (grid.width >> (i + 1), grid.height >> (i + 1));
        for b in d {
            ensure!(
                b.width == w && b.height == h && b.data.len() == w * h,
                MODULE,
                "level {} band is {}x{}, expected {w}x{h}",
                i + 1,
                b.width,
                b.height
            );
        }
    }
    let (w, h) = (grid.width >> levels, grid.height >> levels);
    ensure!(
        grid.ll.width == w && grid.ll.height == h && grid.ll.data.len() == w * h,
        MODULE,
        "LL band is {}x{}, expected {w}x{h}",
        grid.ll.width,
        grid.ll.height
    );
    Ok(())
}

/// Inverse 2-D transform. Returns the sample plane, unclamped.
pub fn inverse_2d(grid: &SubbandGrid, coeffs: &LiftingCoeffs) -> Result<Vec<f64>> {
    check_grid(grid)?;
    let c = synthesis_coeffs(coeffs);
    let mut ll = grid.ll.clone();
    for d in grid.details.iter().rev() {
        ll = synthesize_level([&ll, &d[0], &d[1], &d[2]], &c)?;
    }
    Ok(ll.data)
}

fn haar_grids<A: LiftArith>(
    ar: &A,
    a: &SubbandGrid<A::Word>,
    b: &SubbandGrid<A::Word>,
) -> (SubbandGrid<A::Word>, SubbandGrid<A::Word>) {
    let mut l = SubbandGrid::zeros(a.width, a.height, a.levels());
    let mut h = SubbandGrid::zeros(a.width, a.height, a.levels());
    let pairs = a
        .details
        .iter()
        .flatten()
        .chain(std::iter::once(&a.ll))
        .zip(b.details.iter().flatten().chain(std::iter::once(&b.ll)));
    let outs = l
        .details
        .iter_mut()
        .flatten()
        .chain(std::iter::once(&mut l.ll))
        .zip(h.details.iter_mut().flatten().chain(std::iter::once(&mut h.ll)));
    for ((ba, bb), (bl, bh)) in pairs.zip(outs) {
        for i in 0..ba.data.len() {
            let (lo, hi) = forward_haar_with(ar, ba.data[i], bb.data[i]);
            bl.data[i] = lo;
            bh.data[i] = hi;
        }
    }
    (l, h)
}

/// Spatial transform of each frame followed by Haar across the pair,
/// coefficient by coefficient.
pub fn forward_3d_f64(
    width: usize,
    height: usize,
    first: &[f64],
    second: &[f64],
    levels: usize,
    coeffs: &LiftingCoeffs,
) -> Result<Gof3D> {
    check_levels(width, height, levels)?;
    let n = width * height;
    ensure!(
        first.len() == n && second.len() == n,
        MODULE,
        "frame sizes {} and {} do not match {width}x{height}",
        first.len(),
        second.len()
    );
    let (l_frame, h_frame) = match coeffs.mode {
        CoeffMode::FloatExact => {
            let ar = FloatArith::new(coeffs);
            let plane = |s: &[f64]| Band { width, height, data: s.to_vec() };
            let a = forward_2d_with(&ar, plane(first), levels);
            let b = forward_2d_with(&ar, plane(second), levels);
            haar_grids(&ar, &a, &b)
        }
        CoeffMode::FixedAdopted => {
            let ar = FixedArith::new(coeffs);
            let plane = |s: &[f64]| Band {
                width,
                height,
                data: s.iter().map(|&v| ar.from_f64(v)).collect(),
            };
            let a = forward_2d_with(&ar, plane(first), levels);
            let b = forward_2d_with(&ar, plane(second), levels);
            let (l, h) = haar_grids(&ar, &a, &b);
            (l.map(|w| ar.to_f64(w)), h.map(|w| ar.to_f64(w)))
        }
    };
    Ok(Gof3D {
        l_frame,
        h_frame,
        threshold: 0.0,
    })
}

pub fn forward_3d(pair: &FramePair, levels: usize, coeffs: &LiftingCoeffs) -> Result<Gof3D> {
    forward_3d_f64(
        pair.width(),
        pair.height(),
        &pair.first.to_f64(),
        &pair.second.to_f64(),
        levels,
        coeffs,
    )
}

/// Inverse of [`forward_3d`]; returns both sample planes, unclamped.
pub fn inverse_3d(gof: &Gof3D, coeffs: &LiftingCoeffs) -> Result<(Vec<f64>, Vec<f64>)> {
    let (l, h) = (&gof.l_frame, &gof.h_frame);
    ensure!(
        l.width == h.width && l.height == h.height && l.levels() == h.levels(),
        MODULE,
        "L-frame and H-frame structures differ"
    );
    check_grid(l)?;
    check_grid(h)?;
    let c = synthesis_coeffs(coeffs);
    let mut a = l.clone();
    let mut b = h.clone();
    let bands_a = a.details.iter_mut().flatten().chain(std::iter::once(&mut a.ll));
    let bands_b = b.details.iter_mut().flatten().chain(std::iter::once(&mut b.ll));
    for (ba, bb) in bands_a.zip(bands_b) {
        for (x, y) in ba.data.iter_mut().zip(bb.data.iter_mut()) {
            let (x0, x1) = inverse_haar_with(&c, *x, *y);
            *x = x0;
            *y = x1;
        }
    }
    Ok((inverse_2d(&a, coeffs)?, inverse_2d(&b, coeffs)?))
}

/// Reconstruct a frame pair, rounding and clamping samples.
pub fn inverse_3d_frames(gof: &Gof3D, coeffs: &LiftingCoeffs) -> Result<FramePair> {
    let (a, b) = inverse_3d(gof, coeffs)?;
    let (w, h) = (gof.width(), gof.height());
    FramePair::new(Frame::from_f64(w, h, &a)?, Frame::from_f64(w, h, &b)?)
}

/// Hard-threshold every band except LLL: coefficients with magnitude below
/// `threshold` become zero.
pub fn sparsify(gof: &Gof3D, threshold: f64) -> Result<Gof3D> {
    ensure!(threshold >= 0.0, MODULE, "threshold must be non-negative, got {threshold}");
    let mut out = gof.clone();
    let kill = |b: &mut Band| {
        for v in &mut b.data {
            if v.abs() < threshold {
                *v = 0.0;
            }
        }
    };
    out.l_frame.details.iter_mut().flatten().for_each(kill);
    out.h_frame.details.iter_mut().flatten().for_each(kill);
    kill(&mut out.h_frame.ll);
    out.threshold = threshold;
    Ok(out)
}

/// Cut a band into vectors of `p` adjacent columns. Within a vector the
/// columns are interleaved row by row: `x[r*p + j] = band[r][b*p + j]`.
pub fn column_stream(gof: &Gof3D, band: BandId, p: usize) -> Result<Vec<Vec<f64>>> {
    column_blocks(gof.band(band)?, p)
}

pub fn column_blocks(band: &Band, p: usize) -> Result<Vec<Vec<f64>>> {
    ensure!(
        p >= 1 && band.width % p == 0,
        MODULE,
        "block width {p} does not divide band width {}",
        band.width
    );
    Ok((0..band.width / p)
        .map(|b| {
            let mut x = Vec::with_capacity(p * band.height);
            for r in 0..band.height {
                x.extend_from_slice(&band.data[r * band.width + b * p..r * band.width + (b + 1) * p]);
            }
            x
        })
        .collect())
}

/// Inverse of [`column_blocks`]: write vector `b` back into its columns.
pub fn scatter_block(band: &mut Band, p: usize, b: usize, x: &[f64]) -> Result<()> {
    ensure!(
        x.len() == p * band.height && (b + 1) * p <= band.width,
        MODULE,
        "block {b} of width {p} does not fit a {}x{} band",
        band.width,
        band.height
    );
    for r in 0..band.height {
        let start = r * band.width + b * p;
        band.data[start..start + p].copy_from_slice(&x[r * p..(r + 1) * p]);
    }
    Ok(())
}
