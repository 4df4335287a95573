mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use csvc::codec::{self, DecodeOptions, EncodeConfig, DEFAULT_SEED, DEFAULT_THRESHOLD};
use csvc::lifting::{CoeffMode, LiftingCoeffs};
use csvc::metrics::psnr_frames;
use csvc::recovery::SolverConfig;
use csvc::strip_sim::simulate_pair;
use csvc::video_io::{load_frames, write_frames, FormatRegistry, Frame, FramePair};
use csvc::{dwt3d, synth, Error};

#[derive(Parser)]
#[command(name = "csvc", version, about = "Wavelet + compressed-sensing video codec")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a grayscale sequence into a CSW1 stream.
    Encode(EncodeArgs),
    /// Decode a CSW1 stream back to frames.
    Decode(DecodeArgs),
    /// Run the cycle-level datapath model on one frame pair.
    Simulate(SimulateArgs),
    /// Merge CSV result files into one table.
    Report(ReportArgs),
    /// Write a synthetic test sequence.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Geometry {
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 2)]
    frames: usize,
    /// Frame file format: raw or pgm.
    #[arg(long, default_value = "raw")]
    format: String,
}

#[derive(Args)]
struct SolverArgs {
    /// Recovery algorithm: amp or iht.
    #[arg(long, default_value = "amp")]
    solver: String,
    #[arg(long, default_value_t = SolverConfig::default().max_iterations)]
    max_iter: usize,
}

impl SolverArgs {
    fn options(&self) -> DecodeOptions {
        DecodeOptions {
            solver: SolverConfig {
                solver: self.solver.clone(),
                max_iterations: self.max_iter,
                ..Default::default()
            },
        }
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    geometry: Geometry,
    #[arg(long, default_value_t = 1)]
    levels: usize,
    /// Hard threshold; `inf` keeps only the LLL band.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Datapath parallelism P the geometry must suit.
    #[arg(long = "par")]
    par: Option<usize>,
    #[arg(long, default_value = "fixed")]
    mode: CoeffMode,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Append a result row to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Sequence name for the CSV row; defaults to the input file stem.
    #[arg(long)]
    sequence: Option<String>,
    /// Also decode and report PSNR.
    #[arg(long)]
    eval: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value = "raw")]
    format: String,
    /// Original frames to compute PSNR against, in the output format.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long = "par", default_value_t = 2)]
    par: usize,
    #[arg(long, default_value = "fixed")]
    mode: CoeffMode,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Use the first two frames of this file instead of random frames.
    #[arg(short, long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "raw")]
    format: String,
}

#[derive(Args)]
struct ReportArgs {
    /// CSV files written by `encode --csv`.
    inputs: Vec<PathBuf>,
    /// Also write the merged rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// blob (slow motion) or texture (fast motion).
    #[arg(long, default_value = "blob")]
    kind: String,
    #[command(flatten)]
    geometry: Geometry,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

fn load(path: &Path, g: &Geometry) -> Result<Vec<Frame>, Error> {
    let formats = FormatRegistry::default();
    load_frames(path, formats.get(&g.format)?, g.width, g.height, g.frames)
}

fn kv(key: &str, value: impl std::fmt::Display) {
    println!("{key}={value}");
}

fn encode(a: &EncodeArgs) -> Result<(), Error> {
    let frames = load(&a.input, &a.geometry)?;
    let cfg = EncodeConfig {
        levels: a.levels,
        threshold: a.threshold,
        mode: a.mode,
        seed: a.seed,
        par: a.par,
    };
    let (bytes, s) = codec::encode(&frames, &cfg)?;
    std::fs::write(&a.output, &bytes)
        .map_err(|e| Error::io("codec", format!("cannot write {}", a.output.display()), e))?;

    kv("input", a.input.display());
    kv("output", a.output.display());
    kv("width", s.width);
    kv("height", s.height);
    kv("frames", s.frames);
    kv("levels", cfg.levels);
    kv("threshold", cfg.threshold);
    kv("mode", cfg.mode);
    kv("seed", cfg.seed);
    kv("par", cfg.par.map_or("none".to_string(), |p| p.to_string()));
    kv("m", s.m);
    kv("n", s.n);
    kv("bytes", s.bytes);
    kv("cr", format!("{:.4}", s.cr));
    kv("cr_no_header", format!("{:.4}", s.cr_no_header));
    kv("pct_measurements", format!("{:.4}", s.pct_measurements));
    kv("pct_sent", format!("{:.4}", s.pct_sent));
    kv("saturations", s.saturations);
    for b in &s.bands {
        kv(
            &format!("band.{}", b.band),
            format!("blocks={} sent={} k_max={} k_mean={:.2}", b.blocks, b.sent, b.k_max, b.k_mean),
        );
    }

    let psnr = if a.eval {
        let d = codec::decode(&bytes, &a.solver.options())?;
        let p = psnr_frames(&frames, &d.frames)?;
        kv("psnr", format!("{p:.4}"));
        kv("columns_recovered", d.stats.columns);
        kv("columns_converged", d.stats.converged);
        Some(p)
    } else {
        None
    };

    if let Some(path) = &a.csv {
        let sequence = a.sequence.clone().unwrap_or_else(|| {
            a.input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        report::append_row(
            path,
            &report::Row {
                sequence,
                level: cfg.levels,
                threshold: cfg.threshold,
                mode: cfg.mode.name().to_string(),
                psnr,
                cr: s.cr,
                cr_no_header: s.cr_no_header,
                pct_measurements: s.pct_measurements,
                pct_sent: s.pct_sent,
                bytes: s.bytes,
                saturations: s.saturations,
            },
        )?;
    }
    Ok(())
}

fn decode(a: &DecodeArgs) -> Result<(), Error> {
    let formats = FormatRegistry::default();
    let fmt = formats.get(&a.format)?;
    let d = codec::decode_file(&a.input, &a.solver.options())?;
    let written = write_frames(&d.frames, &a.output, fmt)?;
    kv("input", a.input.display());
    kv("output", a.output.display());
    kv("width", d.header.width);
    kv("height", d.header.height);
    kv("frames", d.frames.len());
    kv("levels", d.header.levels);
    kv("mode", d.header.coeff_mode);
    kv("solver", &a.solver.solver);
    kv("bytes_written", written);
    kv("columns_recovered", d.stats.columns);
    kv("columns_converged", d.stats.converged);
    kv("mean_iterations", format!("{:.2}", d.stats.mean_iterations()));
    if let Some(r) = &a.reference {
        let reference = load_frames(
            r,
            fmt,
            d.header.width as usize,
            d.header.height as usize,
            d.frames.len(),
        )?;
        let p = psnr_frames(&reference, &d.frames)?;
        kv("psnr", if p.is_infinite() { "inf".to_string() } else { format!("{p:.4}") });
    }
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<(), Error> {
    let pair = match &a.input {
        Some(path) => {
            let f = load_frames(path, FormatRegistry::default().get(&a.format)?, a.width, a.height, 2)?;
            FramePair::new(f[0].clone(), f[1].clone())?
        }
        None => synth::random_pair(a.width, a.height, a.seed)?,
    };
    let coeffs = LiftingCoeffs::for_mode(a.mode);
    let rep = simulate_pair(&pair, a.par, &coeffs)?;
    let reference = dwt3d::forward_3d(&pair, 1, &coeffs)?;
    kv("width", a.width);
    kv("height", a.height);
    kv("par", a.par);
    kv("mode", a.mode);
    kv("total_cycles", rep.total_cycles);
    kv("slack", rep.slack);
    kv("strips", rep.strips);
    kv("latency_2d", rep.latency_2d);
    kv("latency_3d", rep.latency_3d);
    kv("first_output_cycle", rep.first_output_cycle);
    kv("outputs_per_cycle_steady", rep.outputs_per_cycle_steady);
    kv("ledger_words", rep.ledger.total_words());
    kv("allocated_words", rep.allocated_words);
    kv("matches_reference", rep.output == reference);
    Ok(())
}

fn report_cmd(a: &ReportArgs) -> Result<(), Error> {
    let paths: Vec<&Path> = a.inputs.iter().map(PathBuf::as_path).collect();
    let rows = report::merge(&paths)?;
    print!("{}", report::render(&rows));
    if let Some(out) = &a.csv {
        if out.exists() {
            std::fs::remove_file(out)
                .map_err(|e| Error::io("report", format!("cannot replace {}", out.display()), e))?;
        }
        for r in &rows {
            report::append_row(out, r)?;
        }
    }
    Ok(())
}

fn synth_cmd(a: &SynthArgs) -> Result<(), Error> {
    let g = &a.geometry;
    let frames = match a.kind.as_str() {
        "blob" => synth::moving_blob(g.width, g.height, g.frames, a.seed)?,
        "texture" => synth::random_walk_texture(g.width, g.height, g.frames, a.seed)?,
        other => {
            return Err(Error::validation(
                "synth",
                format!("unknown sequence kind {other:?} (blob or texture)"),
            ))
        }
    };
    kv(
        "bytes_written",
        write_frames(&frames, &a.output, FormatRegistry::default().get(&g.format)?)?,
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Simulate(a) => simulate(a),
        Command::Report(a) => report_cmd(a),
        Command::Synth(a) => synth_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
