//! Encoder and decoder pipelines.
//!
//! Per GOF the encoder runs the 3-D transform, hard-thresholds every band
//! but LLL, sends LLL directly and sends `M` Bernoulli measurements for each
//! non-zero column block of every other band. A band at level `ℓ` is cut
//! into blocks of `2^ℓ` columns so every measured vector has `height`
//! samples and one `M×N` matrix serves all bands.

use rayon::prelude::*;

use crate::bitstream::{pack, read_segment, unpack, write_segment, BitReader, BitWriter, Container, Header, HEADER_LEN};
use crate::cs::{self, gen_phi, MeasurementVector, PhiMatrix};
use crate::dwt3d::{column_blocks, forward_3d, inverse_3d_frames, measured_bands, scatter_block, sparsify, BandId, Gof3D};
use crate::error::{ensure, Error, Result};
use crate::lifting::{CoeffMode, LiftingCoeffs};
use crate::metrics::{check_geometry, compression_ratio, measurement_percentage, psnr_frames};
use crate::recovery::{Operator, SolverConfig, SolverRegistry};
use crate::strip_sim::SUPPORTED_P;
use crate::video_io::{group_pairs, ungroup_pairs, Frame, FramePair};

const MODULE: &str = "codec";

pub const DEFAULT_SEED: u64 = 0x5EED_C0DE;
pub const DEFAULT_THRESHOLD: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeConfig {
    pub levels: usize,
    pub threshold: f64,
    pub mode: CoeffMode,
    pub seed: u64,
    /// Datapath parallelism the geometry must suit, if any.
    pub par: Option<usize>,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        EncodeConfig {
            levels: 1,
            threshold: DEFAULT_THRESHOLD,
            mode: CoeffMode::FixedAdopted,
            seed: DEFAULT_SEED,
            par: None,
        }
    }
}

impl EncodeConfig {
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        check_geometry(width, height, self.levels)?;
        ensure!(
            self.threshold >= 0.0,
            MODULE,
            "threshold must be non-negative, got {}",
            self.threshold
        );
        if let Some(p) = self.par {
            ensure!(SUPPORTED_P.contains(&p), MODULE, "P={p} is not one of {SUPPORTED_P:?}");
            ensure!(width % (2 * p) == 0, MODULE, "width {width} is not a multiple of 2P={}", 2 * p);
            ensure!(
                height >= 2 * (2 * p + 1),
                MODULE,
                "height {height} is below the strip minimum {} for P={p}",
                2 * (2 * p + 1)
            );
        }
        Ok(())
    }
}

/// Sparsity figures for one band across all GOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStats {
    pub band: String,
    pub blocks: usize,
    pub sent: usize,
    pub k_max: usize,
    pub k_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeSummary {
    pub config: EncodeConfig,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub m: usize,
    pub n: usize,
    pub bytes: usize,
    /// Payload bytes only: no header and no segment length fields.
    pub payload_bytes: usize,
    pub cr: f64,
    pub cr_no_header: f64,
    pub pct_measurements: f64,
    /// Like `pct_measurements` but counting only blocks actually sent.
    pub pct_sent: f64,
    pub saturations: usize,
    pub bands: Vec<BandStats>,
}

struct BlockInfo {
    k: usize,
    sent: bool,
}

struct EncodedGof {
    segments: Vec<Vec<u8>>,
    blocks: Vec<Vec<BlockInfo>>,
    saturations: usize,
}

/// Width of a column block for `band`.
pub fn block_width(band: BandId) -> usize {
    1 << band.level
}

fn lll_values(gof: &Gof3D) -> Vec<i32> {
    let ll = &gof.l_frame.ll;
    let mut out = Vec::with_capacity(ll.data.len());
    let mut prev = 0;
    for c in 0..ll.width {
        for r in 0..ll.height {
            let v = ll.get(r, c).round() as i32;
            out.push(v - prev);
            prev = v;
        }
    }
    out
}

fn measure_block(x: &[f64], phi: &PhiMatrix, mode: CoeffMode) -> Result<MeasurementVector> {
    match mode {
        CoeffMode::FixedAdopted => {
            let xi: Vec<i16> = x.iter().map(|&v| cs::data_in(v)).collect();
            cs::measure(&xi, phi)
        }
        CoeffMode::FloatExact => Ok(cs::quantize_measurements(&cs::measure_float(x, phi)?)),
    }
}

fn encode_gof(pair: &FramePair, cfg: &EncodeConfig, coeffs: &LiftingCoeffs, phi: &PhiMatrix) -> Result<EncodedGof> {
    let gof = sparsify(&forward_3d(pair, cfg.levels, coeffs)?, cfg.threshold)?;
    let mut segments = Vec::with_capacity(2 + 6 * cfg.levels);
    let mut w = BitWriter::new();
    write_segment(&mut w, &lll_values(&gof))?;
    segments.push(w.finish());

    let mut blocks = Vec::new();
    let mut saturations = 0;
    for id in measured_bands(cfg.levels) {
        let vectors = column_blocks(gof.band(id)?, block_width(id))?;
        let mut w = BitWriter::new();
        let mut values = Vec::new();
        let mut info = Vec::with_capacity(vectors.len());
        for x in &vectors {
            let k = cs::estimate_sparsity(x);
            w.bit(k > 0);
            if k > 0 {
                let y = measure_block(x, phi, cfg.mode)?;
                saturations += y.saturation_count();
                let mut prev = 0i32;
                for &v in &y.values {
                    values.push(i32::from(v) - prev);
                    prev = i32::from(v);
                }
            }
            info.push(BlockInfo { k, sent: k > 0 });
        }
        write_segment(&mut w, &values)?;
        segments.push(w.finish());
        blocks.push(info);
    }
    Ok(EncodedGof {
        segments,
        blocks,
        saturations,
    })
}

/// Encode a frame sequence into a `CSW1` stream.
pub fn encode(frames: &[Frame], cfg: &EncodeConfig) -> Result<(Vec<u8>, EncodeSummary)> {
    let grouped = group_pairs(frames)?;
    let (width, height) = (frames[0].width(), frames[0].height());
    cfg.validate(width, height)?;
    let n = height;
    let choice = cs::choose_m(n, None)?;
    let phi = gen_phi(cfg.seed, choice.m, n)?;
    let coeffs = LiftingCoeffs::for_mode(cfg.mode);

    let encoded: Vec<EncodedGof> = grouped
        .pairs
        .par_iter()
        .map(|pair| encode_gof(pair, cfg, &coeffs, &phi))
        .collect::<Result<_>>()?;

    let bands = measured_bands(cfg.levels);
    let mut stats: Vec<BandStats> = bands
        .iter()
        .map(|b| BandStats {
            band: b.to_string(),
            blocks: 0,
            sent: 0,
            k_max: 0,
            k_mean: 0.0,
        })
        .collect();
    let mut k_sum = vec![0usize; bands.len()];
    for g in &encoded {
        for (i, info) in g.blocks.iter().enumerate() {
            let s = &mut stats[i];
            s.blocks += info.len();
            s.sent += info.iter().filter(|b| b.sent).count();
            s.k_max = s.k_max.max(info.iter().map(|b| b.k).max().unwrap_or(0));
            k_sum[i] += info.iter().map(|b| b.k).sum::<usize>();
        }
    }
    for (s, sum) in stats.iter_mut().zip(k_sum) {
        s.k_mean = if s.blocks == 0 { 0.0 } else { sum as f64 / s.blocks as f64 };
    }
    let k_max = stats.iter().map(|s| s.k_max).max().unwrap_or(0);
    cs::choose_m(n, Some(k_max))?;

    let header = Header {
        width: width as u32,
        height: height as u32,
        frame_count: frames.len() as u32,
        gof_count: grouped.pairs.len() as u32,
        levels: cfg.levels as u8,
        coeff_mode: cfg.mode,
        duplicated: grouped.duplicated,
        threshold_q16: Header::threshold_to_q16(cfg.threshold),
        phi_seed: cfg.seed,
        m: choice.m as u32,
        n: n as u32,
    };
    let saturations = encoded.iter().map(|g| g.saturations).sum();
    let container = Container {
        header,
        gofs: encoded.into_iter().map(|g| g.segments).collect(),
    };
    let bytes = pack(&container)?;
    let payload_bytes: usize = container.gofs.iter().flatten().map(Vec::len).sum();
    let original = frames.len() * width * height;

    let lll = (width >> cfg.levels) * (height >> cfg.levels);
    let sent_blocks: usize = stats.iter().map(|s| s.sent).sum();
    let pairs = container.gofs.len();
    let pct_sent = 100.0 * (pairs * lll + choice.m * sent_blocks) as f64 / (pairs * 2 * width * height) as f64;

    let summary = EncodeSummary {
        config: cfg.clone(),
        width,
        height,
        frames: frames.len(),
        m: choice.m,
        n,
        bytes: bytes.len(),
        payload_bytes,
        cr: compression_ratio(original, bytes.len())?,
        cr_no_header: compression_ratio(original, payload_bytes.max(1))?,
        pct_measurements: measurement_percentage(width, height, choice.m, cfg.levels)?,
        pct_sent,
        saturations,
        bands: stats,
    };
    Ok((bytes, summary))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOptions {
    pub solver: SolverConfig,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecodeStats {
    pub columns: usize,
    pub converged: usize,
    pub iterations: usize,
}

impl DecodeStats {
    fn add(&mut self, o: &DecodeStats) {
        self.columns += o.columns;
        self.converged += o.converged;
        self.iterations += o.iterations;
    }

    pub fn mean_iterations(&self) -> f64 {
        if self.columns == 0 {
            0.0
        } else {
            self.iterations as f64 / self.columns as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub header: Header,
    pub frames: Vec<Frame>,
    pub stats: DecodeStats,
}

/// Everything a GOF decoder needs besides its segments.
pub struct DecoderContext<'a> {
    pub header: &'a Header,
    pub operator: Operator,
    pub solver: &'a dyn crate::recovery::SparseSolver,
    pub config: &'a SolverConfig,
}

impl<'a> DecoderContext<'a> {
    pub fn new(header: &'a Header, registry: &'a SolverRegistry, config: &'a SolverConfig) -> Result<Self> {
        ensure!(
            header.n == header.height && header.m >= 1 && header.m <= header.n,
            MODULE,
            "header declares an unusable {}x{} measurement matrix for height {}",
            header.m,
            header.n,
            header.height
        );
        check_geometry(header.width as usize, header.height as usize, usize::from(header.levels))?;
        let phi = gen_phi(header.phi_seed, header.m as usize, header.n as usize)?;
        Ok(DecoderContext {
            header,
            operator: Operator::from_phi(&phi),
            solver: registry.get(&config.solver)?,
            config,
        })
    }
}

/// Rebuild one frame pair from its segments; `offsets[s]` is the absolute
/// byte offset of segment `s`, used in error reports.
pub fn decode_gof(ctx: &DecoderContext, segments: &[Vec<u8>], offsets: &[usize]) -> Result<(FramePair, DecodeStats)> {
    let h = ctx.header;
    let levels = usize::from(h.levels);
    let (w, hh) = (h.width as usize, h.height as usize);
    let m = h.m as usize;
    let mut gof = Gof3D::zeros(w, hh, levels);

    let mut r = BitReader::new(&segments[0], offsets[0]);
    let diffs = read_segment(&mut r, (w >> levels) * (hh >> levels))?;
    let ll = &mut gof.l_frame.ll;
    let mut prev = 0i64;
    let mut it = diffs.iter();
    for c in 0..ll.width {
        for row in 0..ll.height {
            prev += i64::from(*it.next().unwrap());
            ll.set(row, c, prev as f64);
        }
    }

    let mut stats = DecodeStats::default();
    for (i, id) in measured_bands(levels).into_iter().enumerate() {
        let p = block_width(id);
        let band = gof.band_mut(id)?;
        let nblocks = band.width / p;
        let mut r = BitReader::new(&segments[i + 1], offsets[i + 1]);
        let mut present = Vec::with_capacity(nblocks);
        for _ in 0..nblocks {
            present.push(r.bit()?);
        }
        let sent = present.iter().filter(|&&b| b).count();
        let values = read_segment(&mut r, sent * m)?;
        let ys: Vec<Vec<f64>> = values
            .chunks(m.max(1))
            .map(|c| {
                let mut acc = 0i64;
                c.iter()
                    .map(|&d| {
                        acc += i64::from(d);
                        acc as f64
                    })
                    .collect()
            })
            .collect();
        let recovered = ys
            .par_iter()
            .map(|y| ctx.solver.recover(y, &ctx.operator, ctx.config))
            .collect::<Result<Vec<_>>>()?;
        let mut rec = recovered.into_iter();
        for (b, &p_on) in present.iter().enumerate() {
            if p_on {
                let x = rec.next().unwrap();
                stats.columns += 1;
                stats.converged += usize::from(x.converged);
                stats.iterations += x.iterations;
                scatter_block(band, p, b, &x.x)?;
            }
        }
    }
    let coeffs = LiftingCoeffs::for_mode(h.coeff_mode);
    Ok((inverse_3d_frames(&gof, &coeffs)?, stats))
}

/// Decode a `CSW1` stream.
pub fn decode(bytes: &[u8], opts: &DecodeOptions) -> Result<Decoded> {
    opts.solver.validate()?;
    let container = unpack(bytes)?;
    let registry = SolverRegistry::default();
    let ctx = DecoderContext::new(&container.header, &registry, &opts.solver)?;
    let results: Vec<(FramePair, DecodeStats)> = container
        .gofs
        .par_iter()
        .enumerate()
        .map(|(g, segs)| {
            let offsets: Vec<usize> = (0..segs.len()).map(|s| container.segment_offset(g, s)).collect();
            decode_gof(&ctx, segs, &offsets)
        })
        .collect::<Result<_>>()?;
    let mut stats = DecodeStats::default();
    let mut pairs = Vec::with_capacity(results.len());
    for (p, s) in results {
        stats.add(&s);
        pairs.push(p);
    }
    Ok(Decoded {
        header: container.header.clone(),
        frames: ungroup_pairs(pairs, container.header.duplicated),
        stats,
    })
}

/// Encode then decode, returning the summary, decoded frames and PSNR.
pub fn round_trip(
    frames: &[Frame],
    cfg: &EncodeConfig,
    opts: &DecodeOptions,
) -> Result<(EncodeSummary, Decoded, f64)> {
    let (bytes, summary) = encode(frames, cfg)?;
    let decoded = decode(&bytes, opts)?;
    let psnr = psnr_frames(frames, &decoded.frames)?;
    Ok((summary, decoded, psnr))
}

/// Size of the stream framing: header plus one length field per segment.
pub fn framing_bytes(header: &Header) -> usize {
    HEADER_LEN + 4 * header.segments_per_gof() * header.gof_count as usize
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(MODULE, format!("cannot read {}", path.display()), e))
}

pub(crate) fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(MODULE, format!("cannot write {}", path.display()), e))
}

/// Encode frames and write the stream to `path`.
pub fn encode_to_file(frames: &[Frame], cfg: &EncodeConfig, path: &std::path::Path) -> Result<EncodeSummary> {
    let (bytes, summary) = encode(frames, cfg)?;
    write_file(path, &bytes)?;
    Ok(summary)
}

pub fn decode_file(path: &std::path::Path, opts: &DecodeOptions) -> Result<Decoded> {
    decode(&read_file(path)?, opts)
}
