//! Cycle-level model of the encoder datapath.
//!
//! Two spatial processors (SPs) run in lockstep, one per frame of the pair.
//! Each SP has a row processor (RP) and a column processor (CP) of `P`
//! five-stage processing units. The RP scans the frame in vertical strips of
//! `2P+1` columns, reading one strip row per cycle; PU `i` of strip `j` owns
//! odd column `2Pj+2i+1` and, because of the flipping skew, emits row-DWT
//! pair `Pj+i-1`. Partial results of the strip's last PU are kept in three
//! row memories (alpha, beta, gama) for the next strip. After the last strip
//! one extra pass (the flush strip) drains the right image edge.
//!
//! CP PU `i` consumes RP PU `i`'s (L, H) stream one row per cycle. A transpose
//! register holds the last even and odd row, so every cycle the PU issues one
//! column token: the L column on odd rows, the H column on even rows. Length-2
//! shift registers carry the previous same-column intermediates. The token
//! with `m = 0` finishes the bottom edge of the previous strip's column.
//! A rearrange register pairs (LL, LH) with the following (HL, HH), and four
//! temporal processors (one per sub-band, `P` lanes, two stages) combine the
//! two SPs with Haar.
//!
//! Every stage evaluates exactly the expressions of
//! [`forward_97_with`](crate::lifting::forward_97_with) and
//! [`forward_haar_with`](crate::lifting::forward_haar_with), so in fixed mode
//! the output is bit-identical to the reference transform.
//!
//! Timing conventions: slot `s` is read by the RP during cycle `s`; a value
//! computed during cycle `c` is visible at the start of `c + 1`. A result
//! "emerges" at cycle `c` when it is visible at the start of `c`. Latencies
//! are measured from the slot that issued a quad's H-column token to the
//! cycle the quad (2-D) or its Haar pair (3-D) emerges.

use crate::arith::{FixedArith, FloatArith, LiftArith, Multiplier};
use crate::dwt3d::{Band, Gof3D, SubbandGrid};
use crate::error::{ensure, Result};
use crate::lifting::{CoeffMode, LiftingCoeffs};
use crate::video_io::FramePair;

const MODULE: &str = "strip_sim";

pub const SUPPORTED_P: [usize; 5] = [2, 4, 8, 16, 32];
pub const PU_STAGES: usize = 5;
/// Modelled critical path per pipeline stage, in adder delays.
pub const STAGE_ADDER_DELAYS: usize = 2;
pub const TP_STAGES: usize = 2;

/// On-chip data words, itemized per spatial processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StorageLedger {
    /// Memory alpha + beta + gama, one word per image row each.
    pub row_memory_words: usize,
    /// 5 stages x 2 words per RP PU.
    pub rp_latch_words: usize,
    /// 5 stages x 2 words per CP PU.
    pub cp_latch_words: usize,
    /// Three length-2 shift registers per CP PU.
    pub cp_shift_register_words: usize,
    /// Even/odd (L, H) rows per CP PU.
    pub transpose_register_words: usize,
    /// Held (LL, LH) pair per CP PU.
    pub rearrange_words: usize,
    /// Half of the 4 TPs x P lanes x 2 stages x 2 words shared by both SPs.
    pub tp_pipeline_words: usize,
    pub spatial_processors: usize,
}

impl StorageLedger {
    pub fn per_sp_words(&self) -> usize {
        self.row_memory_words + self.register_words()
    }

    /// Everything except the row memories; 40P by construction.
    pub fn register_words(&self) -> usize {
        self.rp_latch_words
            + self.cp_latch_words
            + self.cp_shift_register_words
            + self.transpose_register_words
            + self.rearrange_words
            + self.tp_pipeline_words
    }

    pub fn total_words(&self) -> usize {
        self.spatial_processors * self.per_sp_words()
    }
}

/// Storage of the two-SP encoder for an image with `n` rows.
pub fn storage_ledger(n: usize, p: usize) -> StorageLedger {
    StorageLedger {
        row_memory_words: 3 * n,
        rp_latch_words: PU_STAGES * 2 * p,
        cp_latch_words: PU_STAGES * 2 * p,
        cp_shift_register_words: 3 * 2 * p,
        transpose_register_words: 4 * p,
        rearrange_words: 2 * p,
        tp_pipeline_words: 4 * p * TP_STAGES * 2 / 2,
        spatial_processors: 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    L,
    H,
}

/// A CP column token: one vertical lifting pair of one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Token {
    kind: ColumnKind,
    strip: usize,
    m: usize,
    /// RP slot whose arrival issued the token.
    origin: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct QuadTag {
    /// Column pair and row of the sub-band coefficient.
    col: usize,
    row: usize,
    origin: usize,
}

/// Pixels read by the RP in one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowRead {
    pub strip: usize,
    pub row: usize,
    pub first_col: usize,
    pub last_col: usize,
}

/// What happened during one clock cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleEvents {
    pub cycle: usize,
    pub read: Option<RowRead>,
    /// Busy PU stages in both row processors.
    pub rp_busy: usize,
    /// Busy PU stages in both column processors.
    pub cp_busy: usize,
    /// Busy TP lane stages.
    pub tp_busy: usize,
    /// 3-D coefficients emerging this cycle.
    pub outputs: usize,
}

#[derive(Debug, Clone)]
pub struct SimReport {
    /// Cycle at which the last coefficient emerges; cycle 0 reads the first row.
    pub total_cycles: usize,
    /// `total_cycles - (W*H/(2P) + latency_3d)`.
    pub slack: i64,
    pub latency_2d: usize,
    pub latency_3d: usize,
    pub first_output_cycle: usize,
    /// Coefficients per cycle over the third strip's output window.
    pub outputs_per_cycle_steady: f64,
    pub ledger: StorageLedger,
    /// Data words the simulator actually allocated.
    pub allocated_words: usize,
    pub strips: usize,
    pub output: Gof3D,
    pub events: Vec<CycleEvents>,
}

#[derive(Debug, Clone, Copy, Default)]
struct RpPu<W> {
    latch: [[W; 2]; PU_STAGES],
}

#[derive(Debug, Clone, Copy, Default)]
struct CpPu<W> {
    latch: [[W; 2]; PU_STAGES],
    sr_alpha: [W; 2],
    sr_beta: [W; 2],
    sr_gamma: [W; 2],
    /// [Le, He, Lo, Ho]
    transpose: [W; 4],
    hold: [W; 2],
}

#[derive(Debug, Clone)]
struct Sp<W> {
    mem_alpha: Vec<W>,
    mem_beta: Vec<W>,
    mem_gama: Vec<W>,
    rp: Vec<RpPu<W>>,
    cp: Vec<CpPu<W>>,
}

impl<W: Copy + Default> Sp<W> {
    fn new(rows: usize, p: usize) -> Self {
        Sp {
            mem_alpha: vec![W::default(); rows],
            mem_beta: vec![W::default(); rows],
            mem_gama: vec![W::default(); rows],
            rp: vec![RpPu::default(); p],
            cp: vec![CpPu::default(); p],
        }
    }

    fn data_words(&self) -> usize {
        let rp = self.rp.iter().map(|pu| pu.latch.len() * 2).sum::<usize>();
        let cp = self
            .cp
            .iter()
            .map(|pu| {
                pu.latch.len() * 2
                    + pu.sr_alpha.len()
                    + pu.sr_beta.len()
                    + pu.sr_gamma.len()
                    + pu.transpose.len()
                    + pu.hold.len()
            })
            .sum::<usize>();
        self.mem_alpha.len() + self.mem_beta.len() + self.mem_gama.len() + rp + cp
    }
}

/// Temporal processor for one sub-band: `P` lanes of two stages.
#[derive(Debug, Clone)]
struct Tp<W> {
    stage1: Vec<[W; 2]>,
    stage2: Vec<[W; 2]>,
}

/// Cycle-level simulator state.
pub struct StripSim<'a, A: LiftArith> {
    ar: &'a A,
    width: usize,
    rows: usize,
    p: usize,
    strips: usize,
    frames: [&'a [A::Word]; 2],
    sp: [Sp<A::Word>; 2],
    tp: [Tp<A::Word>; 4],
    rp_tag: [Option<usize>; PU_STAGES],
    cp_tag: [Option<Token>; PU_STAGES],
    tp_tag: [Option<QuadTag>; TP_STAGES],
    cycle: usize,
    out: [SubbandGrid<A::Word>; 2],
    latency_2d: Vec<usize>,
    latency_3d: Vec<usize>,
    /// (cycle, coefficient count) of every cycle with 3-D output.
    emitted: Vec<(usize, usize)>,
}

impl<'a, A: LiftArith> StripSim<'a, A> {
    pub fn new(ar: &'a A, width: usize, rows: usize, p: usize, first: &'a [A::Word], second: &'a [A::Word]) -> Result<Self> {
        validate(width, rows, p)?;
        ensure!(
            first.len() == width * rows && second.len() == width * rows,
            MODULE,
            "frames must hold {} samples",
            width * rows
        );
        let zero_grid = || SubbandGrid {
            width,
            height: rows,
            details: vec![[
                Band::zeros(width / 2, rows / 2),
                Band::zeros(width / 2, rows / 2),
                Band::zeros(width / 2, rows / 2),
            ]],
            ll: Band::zeros(width / 2, rows / 2),
        };
        let tp = || Tp {
            stage1: vec![[A::Word::default(); 2]; p],
            stage2: vec![[A::Word::default(); 2]; p],
        };
        Ok(StripSim {
            ar,
            width,
            rows,
            p,
            strips: width / (2 * p),
            frames: [first, second],
            sp: [Sp::new(rows, p), Sp::new(rows, p)],
            tp: [tp(), tp(), tp(), tp()],
            rp_tag: [None; PU_STAGES],
            cp_tag: [None; PU_STAGES],
            tp_tag: [None; TP_STAGES],
            cycle: 0,
            out: [zero_grid(), zero_grid()],
            latency_2d: Vec::new(),
            latency_3d: Vec::new(),
            emitted: Vec::new(),
        })
    }

    /// Data words held in registers and row memories.
    pub fn allocated_words(&self) -> usize {
        let tp: usize = self.tp.iter().map(|t| (t.stage1.len() + t.stage2.len()) * 2).sum();
        self.sp.iter().map(Sp::data_words).sum::<usize>() + tp
    }

    /// RP slots including the flush strip and the three drain slots that
    /// issue the last column tokens.
    fn slot_count(&self) -> usize {
        (self.strips + 1) * self.rows + 3
    }

    pub fn last_cycle(&self) -> usize {
        self.slot_count() - 1 + 2 * PU_STAGES + TP_STAGES
    }

    fn strip_row(&self, slot: usize) -> (usize, usize) {
        (slot / self.rows, slot % self.rows)
    }

    /// Row-DWT column pair handled by PU `i` in strip `j`, if it exists.
    fn pair_of(&self, j: usize, i: usize) -> Option<usize> {
        let n = (self.p * j + i).checked_sub(1)?;
        (n < self.width / 2).then_some(n)
    }

    fn token_for_slot(&self, slot: usize) -> Option<Token> {
        let (j, r) = self.strip_row(slot);
        let half = self.rows / 2;
        let (kind, strip, m) = if r % 2 == 1 {
            (ColumnKind::L, j, (r - 1) / 2)
        } else if r >= 2 {
            (ColumnKind::H, j, r / 2 - 1)
        } else {
            (ColumnKind::H, j.checked_sub(1)?, half - 1)
        };
        Some(Token {
            kind,
            strip,
            m,
            origin: slot,
        })
    }

    /// Column pair and row whose result a token produces.
    fn token_output(&self, t: &Token, i: usize) -> Option<(usize, usize)> {
        if t.m >= 1 {
            Some((self.pair_of(t.strip, i)?, t.m - 1))
        } else {
            Some((self.pair_of(t.strip.checked_sub(1)?, i)?, self.rows / 2 - 1))
        }
    }

    pub fn is_done(&self) -> bool {
        self.cycle > self.last_cycle()
    }

    /// Advance one clock cycle.
    pub fn step(&mut self) -> CycleEvents {
        let c = self.cycle;
        let outputs = self.emit(c);

        let old_sp = [self.sp[0].clone_regs(), self.sp[1].clone_regs()];
        let old_rp_tag = self.rp_tag;
        let old_cp_tag = self.cp_tag;

        self.step_tp();
        for f in 0..2 {
            self.step_cp(f, &old_sp[f], &old_rp_tag, &old_cp_tag);
            self.step_rp(f, &old_sp[f], &old_rp_tag);
        }

        // advance tags
        let first_rp = (c < self.slot_count()).then_some(c);
        self.rp_tag = [first_rp, old_rp_tag[0], old_rp_tag[1], old_rp_tag[2], old_rp_tag[3]];
        let issued = old_rp_tag[PU_STAGES - 1].and_then(|s| self.token_for_slot(s));
        self.cp_tag = [issued, old_cp_tag[0], old_cp_tag[1], old_cp_tag[2], old_cp_tag[3]];

        let read = first_rp.and_then(|s| {
            let (j, r) = self.strip_row(s);
            (j < self.strips).then(|| RowRead {
                strip: j,
                row: r,
                first_col: 2 * self.p * j,
                last_col: (2 * self.p * (j + 1)).min(self.width - 1),
            })
        });
        let events = CycleEvents {
            cycle: c,
            read,
            rp_busy: 2 * (0..PU_STAGES).map(|k| self.rp_busy(old_rp_tag, first_rp, k)).sum::<usize>(),
            cp_busy: 2 * (0..PU_STAGES).map(|k| self.cp_busy(if k == 0 { issued } else { old_cp_tag[k - 1] })).sum::<usize>(),
            tp_busy: 4 * self.tp_tag.iter().flatten().map(|&q| (0..self.p).filter(|&i| self.quad_position(q, i).is_some()).count()).sum::<usize>(),
            outputs,
        };
        self.cycle += 1;
        events
    }

    fn rp_busy(&self, old: [Option<usize>; PU_STAGES], first: Option<usize>, k: usize) -> usize {
        let slot = if k == 0 { first } else { old[k - 1] };
        match slot.map(|s| self.strip_row(s).0) {
            Some(j) if j < self.strips => self.p,
            Some(j) if j == self.strips && k >= 3 => 1,
            _ => 0,
        }
    }

    fn cp_busy(&self, t: Option<Token>) -> usize {
        t.map_or(0, |t| (0..self.p).filter(|&i| self.token_output(&t, i).is_some()).count())
    }

    /// Record results emerging at the start of cycle `c`.
    fn emit(&mut self, c: usize) -> usize {
        // 2-D quads: an H-token result in CP latch 5 completes a quad
        if let Some(t) = self.cp_tag[PU_STAGES - 1] {
            if t.kind == ColumnKind::H && (0..self.p).any(|i| self.token_output(&t, i).is_some()) {
                self.latency_2d.push(c - t.origin);
            }
        }
        let Some(q) = self.tp_tag[TP_STAGES - 1] else { return 0 };
        let mut count = 0;
        for i in 0..self.p {
            let Some((col, row)) = self.quad_position(q, i) else { continue };
            for b in 0..4 {
                let [l, h] = self.tp[b].stage2[i];
                band_of(&mut self.out[0], b).set(row, col, l);
                band_of(&mut self.out[1], b).set(row, col, h);
                count += 2;
            }
        }
        if count > 0 {
            self.latency_3d.push(c - q.origin);
            self.emitted.push((c, count));
        }
        count
    }

    fn quad_position(&self, q: QuadTag, i: usize) -> Option<(usize, usize)> {
        // QuadTag stores the column of lane 0 shifted by one; lane i adds i
        let col = (q.col + i).checked_sub(1)?;
        (col < self.width / 2).then_some((col, q.row))
    }

    fn step_tp(&mut self) {
        let ar = self.ar;
        // stage 2 from stage 1
        for tp in &mut self.tp {
            for i in 0..self.p {
                let [s, d] = tp.stage1[i];
                tp.stage2[i] = [ar.mul(Multiplier::Sqrt2, s), ar.mul(Multiplier::InvSqrt2, d)];
            }
        }
        self.tp_tag[1] = self.tp_tag[0];
        self.tp_tag[0] = None;
        // stage 1 from the two SPs' quads emerging this cycle
        let Some(t) = self.cp_tag[PU_STAGES - 1] else { return };
        if t.kind != ColumnKind::H {
            return;
        }
        let Some((base, row)) = self.token_base(&t) else { return };
        for i in 0..self.p {
            let quad = |sp: &Sp<A::Word>| {
                let pu = &sp.cp[i];
                [pu.hold[0], pu.hold[1], pu.latch[4][0], pu.latch[4][1]]
            };
            let (q0, q1) = (quad(&self.sp[0]), quad(&self.sp[1]));
            for b in 0..4 {
                let d = ar.sub(q1[b], q0[b]);
                let s = ar.add(q0[b], ar.half(d));
                self.tp[b].stage1[i] = [s, d];
            }
        }
        self.tp_tag[0] = Some(QuadTag {
            col: base,
            row,
            origin: t.origin,
        });
    }

    /// `(column pair of lane 0) + 1` and output row of a token; lane `i`
    /// writes column `base + i - 1`.
    fn token_base(&self, t: &Token) -> Option<(usize, usize)> {
        if t.m >= 1 {
            Some((self.p * t.strip, t.m - 1))
        } else {
            Some((self.p * t.strip.checked_sub(1)?, self.rows / 2 - 1))
        }
    }

    fn step_cp(&mut self, f: usize, old: &SpRegs<A::Word>, rp_tag: &[Option<usize>; PU_STAGES], cp_tag: &[Option<Token>; PU_STAGES]) {
        let ar = self.ar;
        let half = self.rows / 2;
        let arriving = rp_tag[PU_STAGES - 1];
        let issued = arriving.and_then(|s| self.token_for_slot(s));
        let arriving_row = arriving.and_then(|s| {
            let (j, r) = self.strip_row(s);
            (j <= self.strips).then_some(r)
        });
        for i in 0..self.p {
            let o = &old.cp[i];
            let rp_out = old.rp[i].latch[4];
            let [le, he, lo, ho] = o.transpose;
            let mut n = *o;

            // stage 1
            if let Some(t) = issued {
                n.latch[0] = match t.kind {
                    ColumnKind::L => [ar.mul(Multiplier::A, rp_out[0]), le],
                    ColumnKind::H => [ar.mul(Multiplier::A, ho), he],
                };
            }
            // stage 2
            if let Some(t) = cp_tag[0] {
                let l = o.latch[0];
                let right = if t.m == half - 1 {
                    l[1]
                } else {
                    match t.kind {
                        ColumnKind::L => rp_out[0],
                        ColumnKind::H => he,
                    }
                };
                n.latch[1] = [ar.add(ar.add(l[0], right), l[1]), ar.mul(Multiplier::B, l[1])];
            }
            // stage 3
            if let Some(t) = cp_tag[1] {
                let [h1, pb] = o.latch[1];
                let h1_prev = if t.m == 0 { h1 } else { o.sr_alpha[1] };
                n.latch[2] = [o.sr_alpha[1], ar.add(ar.add(pb, h1_prev), h1)];
            }
            // stage 4
            if let Some(t) = cp_tag[2] {
                let [h1_prev, l1] = o.latch[2];
                let l1_next = if t.m == 0 { o.sr_beta[1] } else { l1 };
                n.latch[3] = [o.sr_beta[1], ar.lift(Multiplier::C, h1_prev, o.sr_beta[1], l1_next)];
            }
            // stage 5
            if let Some(t) = cp_tag[3] {
                let [l1_prev, h2] = o.latch[3];
                let h2_prev = if t.m == 1 { h2 } else { o.sr_gamma[1] };
                let l2 = ar.lift(Multiplier::D, l1_prev, h2_prev, h2);
                n.latch[4] = [ar.mul(Multiplier::K1, l2), ar.mul(Multiplier::K0, h2)];
            }
            n.sr_alpha = [o.latch[1][0], o.sr_alpha[0]];
            n.sr_beta = [o.latch[2][1], o.sr_beta[0]];
            n.sr_gamma = [o.latch[3][1], o.sr_gamma[0]];
            if let Some(r) = arriving_row {
                if r % 2 == 0 {
                    n.transpose = [rp_out[0], rp_out[1], lo, ho];
                } else {
                    n.transpose = [le, he, rp_out[0], rp_out[1]];
                }
            }
            // rearrange: keep (LL, LH) of an L token until its H partner
            if cp_tag[PU_STAGES - 1].is_some_and(|t| t.kind == ColumnKind::L) {
                n.hold = o.latch[4];
            }
            self.sp[f].cp[i] = n;
        }
    }

    fn step_rp(&mut self, f: usize, old: &SpRegs<A::Word>, rp_tag: &[Option<usize>; PU_STAGES]) {
        let ar = self.ar;
        let (p, s_count) = (self.p, self.strips);
        let c = self.cycle;
        let x = self.frames[f];
        let w = self.width;
        let sp = &mut self.sp[f];
        let mut alpha_write = None;
        let mut beta_gama_write = None;

        for i in 0..p {
            let o = &old.rp[i].latch;
            let mut n = old.rp[i].latch;

            // stage 1: read X[r][c-1..=c+1] for odd column c
            if c < (s_count + 1) * self.rows {
                let (j, r) = (c / self.rows, c % self.rows);
                if j < s_count {
                    let col = 2 * p * j + 2 * i + 1;
                    let px = |k: usize| x[r * w + k];
                    let right = if col + 1 == w { px(col - 1) } else { px(col + 1) };
                    n[0] = [ar.add(ar.mul(Multiplier::A, px(col)), right), px(col - 1)];
                }
            }
            let strip_row = |k: usize| rp_tag[k - 1].map(|s| (s / self.rows, s % self.rows));
            // stage 2
            if let Some((j, _)) = strip_row(1) {
                if j < s_count {
                    n[1] = [ar.add(o[0][0], o[0][1]), ar.mul(Multiplier::B, o[0][1])];
                }
            }
            // stage 3
            if let Some((j, r)) = strip_row(2) {
                if j < s_count {
                    let [h1, pb] = o[1];
                    let h1_left = if i > 0 {
                        old.rp[i - 1].latch[1][0]
                    } else if j == 0 {
                        h1
                    } else {
                        sp.mem_alpha[r]
                    };
                    n[2] = [h1, ar.add(ar.add(pb, h1_left), h1)];
                }
            }
            // stage 4
            if let Some((j, r)) = strip_row(3) {
                if j < s_count {
                    let [h1_nb, l1_nb] = if i > 0 {
                        old.rp[i - 1].latch[2]
                    } else {
                        [sp.mem_alpha[r], sp.mem_beta[r]]
                    };
                    let l1_own = o[2][1];
                    n[3] = [l1_own, ar.lift(Multiplier::C, h1_nb, l1_nb, l1_own)];
                    if i == p - 1 {
                        alpha_write = Some((r, o[2][0]));
                    }
                } else if j == s_count && i == 0 {
                    let (a, b) = (sp.mem_alpha[r], sp.mem_beta[r]);
                    n[3] = [b, ar.lift(Multiplier::C, a, b, b)];
                }
            }
            // stage 5
            if let Some((j, r)) = strip_row(4) {
                if j < s_count || (j == s_count && i == 0) {
                    let [l1_own, h2] = o[3];
                    let [l1_nb, h2_nb] = if i > 0 {
                        let nb = old.rp[i - 1].latch[3];
                        if j == 0 && i == 1 {
                            [nb[0], h2]
                        } else {
                            nb
                        }
                    } else {
                        [sp.mem_beta[r], sp.mem_gama[r]]
                    };
                    let l2 = ar.lift(Multiplier::D, l1_nb, h2_nb, h2);
                    n[4] = [ar.mul(Multiplier::K1, l2), ar.mul(Multiplier::K0, h2)];
                    if i == p - 1 && j < s_count {
                        beta_gama_write = Some((r, l1_own, h2));
                    }
                }
            }
            sp.rp[i].latch = n;
        }
        // row memories commit at the end of the cycle
        if let Some((r, a)) = alpha_write {
            sp.mem_alpha[r] = a;
        }
        if let Some((r, b, g)) = beta_gama_write {
            sp.mem_beta[r] = b;
            sp.mem_gama[r] = g;
        }
    }
}

struct SpRegs<W> {
    rp: Vec<RpPu<W>>,
    cp: Vec<CpPu<W>>,
}

impl<W: Copy> Sp<W> {
    fn clone_regs(&self) -> SpRegs<W> {
        SpRegs {
            rp: self.rp.clone(),
            cp: self.cp.clone(),
        }
    }
}

fn band_of<W>(g: &mut SubbandGrid<W>, b: usize) -> &mut Band<W> {
    match b {
        0 => &mut g.ll,
        1 => &mut g.details[0][0],
        2 => &mut g.details[0][1],
        _ => &mut g.details[0][2],
    }
}

fn validate(width: usize, rows: usize, p: usize) -> Result<()> {
    ensure!(SUPPORTED_P.contains(&p), MODULE, "unsupported parallelism P={p} (expected one of {SUPPORTED_P:?})");
    ensure!(
        width % (2 * p) == 0,
        MODULE,
        "width {width} is not divisible by 2P = {}",
        2 * p
    );
    let min = 2 * (2 * p + 1);
    ensure!(
        width >= min && rows >= min && rows % 2 == 0,
        MODULE,
        "{width}x{rows} frame is too small for P={p} (need even dimensions of at least {min})"
    );
    Ok(())
}

/// Run the simulator to completion over arbitrary datapath words.
pub fn simulate_with<A: LiftArith>(
    ar: &A,
    width: usize,
    rows: usize,
    p: usize,
    first: &[A::Word],
    second: &[A::Word],
    record_events: bool,
) -> Result<(SimReport, [SubbandGrid<A::Word>; 2])> {
    let mut sim = StripSim::new(ar, width, rows, p, first, second)?;
    let ledger = storage_ledger(rows, p);
    let allocated = sim.allocated_words();
    ensure!(
        allocated == ledger.total_words(),
        MODULE,
        "simulator allocates {allocated} data words but the ledger itemizes {}",
        ledger.total_words()
    );
    let mut events = Vec::new();
    while !sim.is_done() {
        let e = sim.step();
        if record_events {
            events.push(e);
        }
    }
    let all_equal = |v: &[usize]| v.first().filter(|f| v.iter().all(|x| x == *f)).copied();
    let latency_2d = all_equal(&sim.latency_2d);
    let latency_3d = all_equal(&sim.latency_3d);
    ensure!(
        latency_2d.is_some() && latency_3d.is_some(),
        MODULE,
        "pipeline latency is not constant"
    );
    let (latency_2d, latency_3d) = (latency_2d.unwrap(), latency_3d.unwrap());
    let total_cycles = sim.emitted.last().expect("no outputs").0;
    let first_output_cycle = sim.emitted[0].0;

    // steady window: results whose issuing slots lie in the third strip
    let window = (2 * rows + latency_3d)..(3 * rows + latency_3d);
    let in_window: usize = sim.emitted.iter().filter(|(c, _)| window.contains(c)).map(|(_, n)| n).sum();
    let steady = in_window as f64 / rows as f64;

    let ideal = (width * rows / (2 * p) + latency_3d) as i64;
    let report = SimReport {
        total_cycles,
        slack: total_cycles as i64 - ideal,
        latency_2d,
        latency_3d,
        first_output_cycle,
        outputs_per_cycle_steady: steady,
        ledger,
        allocated_words: allocated,
        strips: sim.strips,
        output: Gof3D::zeros(width, rows, 1),
        events,
    };
    let [l, h] = sim.out;
    Ok((report, [l, h]))
}

/// Simulate one level of the 3-D transform of a frame pair.
pub fn simulate_pair(pair: &FramePair, p: usize, coeffs: &LiftingCoeffs) -> Result<SimReport> {
    simulate_pair_opts(pair, p, coeffs, false)
}

pub fn simulate_pair_opts(pair: &FramePair, p: usize, coeffs: &LiftingCoeffs, record_events: bool) -> Result<SimReport> {
    let (w, h) = (pair.width(), pair.height());
    let (a, b) = (pair.first.to_f64(), pair.second.to_f64());
    match coeffs.mode {
        CoeffMode::FloatExact => {
            let ar = FloatArith::new(coeffs);
            let (mut rep, [l, hf]) = simulate_with(&ar, w, h, p, &a, &b, record_events)?;
            rep.output = Gof3D {
                l_frame: l,
                h_frame: hf,
                threshold: 0.0,
            };
            Ok(rep)
        }
        CoeffMode::FixedAdopted => {
            let ar = FixedArith::new(coeffs);
            let conv = |v: &[f64]| v.iter().map(|&x| ar.from_f64(x)).collect::<Vec<_>>();
            let (wa, wb) = (conv(&a), conv(&b));
            let (mut rep, [l, hf]) = simulate_with(&ar, w, h, p, &wa, &wb, record_events)?;
            rep.output = Gof3D {
                l_frame: l.map(|x| ar.to_f64(x)),
                h_frame: hf.map(|x| ar.to_f64(x)),
                threshold: 0.0,
            };
            Ok(rep)
        }
    }
}
