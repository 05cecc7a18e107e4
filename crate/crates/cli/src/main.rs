//! Command-line front end: simulate, encode, decode, analyze, eval, sweep.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spikecodec::analysis::{grid_report, initial_state_sweep, isi_distribution, representations};
use spikecodec::codec::{compress, decompress, CodecConfig, CompressedContainer};
use spikecodec::eval::{
    bd_rate, domain_psnr, rd_sweep, rd_sweep_with_truth, Domain, RdCurve, RdMetric,
};
use spikecodec::io::{
    encode_pgm, encode_spike_file, grid_report_csv, initial_state_csv, isi_stats_csv, parse_rd_csv,
    rd_csv, read_scene_dir, read_spike_file,
};
use spikecodec::representation::{keyframe_schedule, spikes_to_isi, ReconstructionKind};
use spikecodec::spike_model::simulate;
use spikecodec::{InitPolicy, ResetMode, SimulatorConfig, SpikeStream};

/// Usage errors are reported by clap with status 2.
const EXIT_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(
    name = "spikecodec",
    version,
    about = "Spike-camera simulation, compression and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a spike stream from a directory of numbered PGM frames.
    Simulate(SimulateArgs),
    /// Compress a spike stream into a container.
    Encode(EncodeArgs),
    /// Decode a container and regenerate spikes.
    Decode(DecodeArgs),
    /// Neighborhood predictability of one frame's representation.
    Analyze(AnalyzeArgs),
    /// ISI- and firing-rate-domain PSNR between raw and regenerated spikes.
    Eval(EvalArgs),
    /// Rate-distortion sweep over qualities.
    Sweep(SweepArgs),
    /// One pixel's response to constant luminance from several initial states.
    InitSweep(InitSweepArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenes: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    #[arg(long, default_value = "soft")]
    reset: ResetMode,
    /// Initial accumulator state: a number in [0, theta) or `rand`.
    #[arg(long, default_value = "0")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct ScheduleArgs {
    #[arg(long, default_value_t = 7)]
    d: u16,
    #[arg(long, default_value_t = 6)]
    s: u16,
    #[arg(long, default_value_t = 2)]
    r: u16,
    /// Enable saliency-driven quantization.
    #[arg(long)]
    roi: bool,
    /// Keyframe reconstruction: `tfi` or `tfp:W` with odd W.
    #[arg(long, default_value = "tfp:31")]
    recon: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    #[arg(long, default_value = "soft")]
    reset: ResetMode,
}

impl ScheduleArgs {
    fn config(&self, quality: u8) -> Result<CodecConfig, String> {
        let reconstruction: ReconstructionKind = self.recon.parse().map_err(err)?;
        let sim = SimulatorConfig::new(
            self.alpha,
            self.theta,
            self.reset,
            InitPolicy::Constant(0.0),
        )
        .map_err(err)?;
        let cfg = CodecConfig {
            d: self.d,
            s: self.s,
            r: self.r,
            quality,
            roi: self.roi,
            sim,
            reconstruction,
        };
        cfg.validate().map_err(err)?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 50)]
    quality: u8,
    #[command(flatten)]
    codec: ScheduleArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_spikes: PathBuf,
    /// Also write decoded keyframe scenes as `<frame>.pgm`.
    #[arg(long)]
    out_scenes: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Representation: `spike`, `isi` or `scene[:W]`.
    #[arg(long, default_value = "isi")]
    repr: String,
    #[arg(long, default_value_t = 1)]
    radius: usize,
    /// Frame to analyze; defaults to the middle frame.
    #[arg(long)]
    frame: Option<usize>,
    #[arg(long)]
    value_bins: Option<usize>,
    #[arg(long, default_value_t = spikecodec::analysis::DEFAULT_COND_BINS)]
    cond_bins: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    #[arg(long)]
    csv: PathBuf,
    /// Also write the stream's ISI histogram.
    #[arg(long)]
    isi_csv: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    raw: PathBuf,
    #[arg(long)]
    recon: PathBuf,
    /// First raw frame covered by the regenerated stream. Defaults to the
    /// start of the keyframe coverage for `--d/--s/--r`.
    #[arg(long)]
    offset: Option<usize>,
    #[arg(long, default_value_t = 7)]
    d: usize,
    #[arg(long, default_value_t = 6)]
    s: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    csv: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "20,40,60,80")]
    qualities: Vec<u8>,
    #[command(flatten)]
    codec: ScheduleArgs,
    /// Ground-truth scene directory for the scene-domain PSNR.
    #[arg(long)]
    scenes: Option<PathBuf>,
    #[arg(long)]
    csv: PathBuf,
    /// Anchor RD CSV; prints the BD-rate of this sweep against it.
    #[arg(long)]
    bd_against: Option<PathBuf>,
    /// Distortion for the BD-rate: `scene`, `isi` or `fr`.
    #[arg(long, default_value = "scene")]
    metric: RdMetric,
}

#[derive(Args)]
struct InitSweepArgs {
    #[arg(long)]
    luminance: f64,
    #[arg(long, default_value_t = 100)]
    frames: usize,
    /// Initial states as fractions of theta.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,0.9")]
    taus: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    #[arg(long, default_value = "soft")]
    reset: ResetMode,
    #[arg(long)]
    csv: PathBuf,
}

fn err(e: impl Display) -> String {
    e.to_string()
}

/// Writes through a temporary file in the target directory, so a failed
/// command never leaves partial output behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let ctx = |e: std::io::Error| format!("{}: {e}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(ctx)?;
    tmp.write_all(bytes).map_err(ctx)?;
    tmp.persist(path).map_err(|e| ctx(e.error))?;
    Ok(())
}

fn load_spikes(path: &Path) -> Result<SpikeStream, String> {
    read_spike_file(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_init(init: &str, seed: u64) -> Result<InitPolicy, String> {
    if init == "rand" {
        return Ok(InitPolicy::UniformRandom(seed));
    }
    init.parse()
        .map(InitPolicy::Constant)
        .map_err(|_| format!("invalid --init '{init}' (expected a number or 'rand')"))
}

fn run_simulate(a: SimulateArgs) -> Result<(), String> {
    let init = parse_init(&a.init, a.seed)?;
    let cfg = SimulatorConfig::new(a.alpha, a.theta, a.reset, init).map_err(err)?;
    let scenes = read_scene_dir(&a.scenes).map_err(err)?;
    let stream = simulate(&scenes, &cfg).map_err(err)?;
    write_atomic(&a.out, &encode_spike_file(&stream))
}

fn run_encode(a: EncodeArgs) -> Result<(), String> {
    let cfg = a.codec.config(a.quality)?;
    let stream = load_spikes(&a.input)?;
    let container = compress(&stream, &cfg).map_err(err)?;
    write_atomic(&a.out, &container.to_bytes().map_err(err)?)
}

fn run_decode(a: DecodeArgs) -> Result<(), String> {
    let bytes = std::fs::read(&a.input).map_err(|e| format!("{}: {e}", a.input.display()))?;
    let container = CompressedContainer::from_bytes(&bytes)
        .map_err(|e| format!("{}: {e}", a.input.display()))?;
    let out = decompress(&container).map_err(err)?;
    let spikes = encode_spike_file(&out.regenerated);
    let frames: Vec<(PathBuf, Vec<u8>)> = match &a.out_scenes {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            out.keyframes
                .iter()
                .zip(out.scenes.frames())
                .map(|(k, f)| (dir.join(format!("{k:06}.pgm")), encode_pgm(f)))
                .collect()
        }
        None => Vec::new(),
    };
    for (path, data) in &frames {
        write_atomic(path, data)?;
    }
    write_atomic(&a.out_spikes, &spikes)
}

fn run_analyze(a: AnalyzeArgs) -> Result<(), String> {
    let cfg = SimulatorConfig::new(a.alpha, a.theta, ResetMode::Soft, InitPolicy::Constant(0.0))
        .map_err(err)?;
    let extractor = representations().create(&a.repr).map_err(err)?;
    let stream = load_spikes(&a.input)?;
    if stream.n_frames() == 0 {
        return Err(format!("{}: stream has no frames", a.input.display()));
    }
    let k = a.frame.unwrap_or(stream.n_frames() / 2);
    let grid = extractor.extract(&stream, k, &cfg).map_err(err)?;
    let value_bins = a
        .value_bins
        .unwrap_or(extractor.kind().default_value_bins());
    let report = grid_report(&grid, a.radius, value_bins, a.cond_bins).map_err(err)?;
    let isi = a.isi_csv.as_ref().map(|path| {
        (
            path,
            isi_stats_csv(&isi_distribution(&spikes_to_isi(&stream))),
        )
    });
    write_atomic(&a.csv, grid_report_csv(&[report]).as_bytes())?;
    if let Some((path, text)) = isi {
        write_atomic(path, text.as_bytes())?;
    }
    Ok(())
}

fn run_eval(a: EvalArgs) -> Result<(), String> {
    let raw = load_spikes(&a.raw)?;
    let recon = load_spikes(&a.recon)?;
    let offset = match a.offset {
        Some(o) => o,
        None if recon.n_frames() == raw.n_frames() => 0,
        None => keyframe_schedule(raw.n_frames(), a.d, a.s, a.r)
            .coverage()
            .map(|(lo, _)| lo)
            .ok_or_else(|| {
                "schedule empty for the raw stream; pass --offset explicitly".to_string()
            })?,
    };
    let isi = domain_psnr(&raw, &recon, offset, Domain::Isi).map_err(err)?;
    let fr = domain_psnr(&raw, &recon, offset, Domain::FiringRate).map_err(err)?;
    let text = format!(
        "offset,frames,psnr_isi,psnr_fr\n{offset},{},{isi:.6},{fr:.6}\n",
        recon.n_frames()
    );
    write_atomic(&a.csv, text.as_bytes())
}

fn meta_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

fn run_sweep(a: SweepArgs) -> Result<(), String> {
    let base = a.codec.config(50)?;
    let stream = load_spikes(&a.input)?;
    let anchor = match &a.bd_against {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let points = parse_rd_csv(&text).map_err(|e| format!("{}: {e}", p.display()))?;
            Some(RdCurve::new(points).map_err(|e| format!("{}: {e}", p.display()))?)
        }
        None => None,
    };
    let report = match &a.scenes {
        Some(dir) => {
            let truth = read_scene_dir(dir).map_err(err)?;
            rd_sweep_with_truth(&stream, &base, &a.qualities, &truth)
        }
        None => rd_sweep(&stream, &base, &a.qualities),
    };
    if let Some((q, msg)) = report.failures.first() {
        return Err(format!("quality {q}: {msg}"));
    }
    let bd = match &anchor {
        Some(anchor) => {
            let curve = report.curve().map_err(err)?;
            Some(bd_rate(anchor, &curve, a.metric).map_err(err)?)
        }
        None => None,
    };
    let schedule = base.schedule(stream.n_frames());
    let meta = format!(
        "width={}\nheight={}\nn_frames={}\nkeyframes={}\nbpp_denominator=width*height*keyframes\nd={}\ns={}\nr={}\nroi={}\nrecon={}\nscene_reference={}\n",
        stream.width(),
        stream.height(),
        stream.n_frames(),
        schedule.keyframes.len(),
        base.d,
        base.s,
        base.r,
        base.roi,
        base.reconstruction.spec(),
        if a.scenes.is_some() { "ground_truth" } else { "tfp:31" },
    );
    write_atomic(&a.csv, rd_csv(&report.points).as_bytes())?;
    write_atomic(&meta_path(&a.csv), meta.as_bytes())?;
    for (lo, hi) in report.violations() {
        eprintln!("warning: scene PSNR decreases from quality {lo} to {hi}");
    }
    if let Some(v) = bd {
        // Avoids printing a negative zero for rounding-level differences.
        let v = (v * 1e4).round() / 1e4 + 0.0;
        println!("BD-rate ({}): {v:.4}%", a.metric);
    }
    Ok(())
}

fn run_init_sweep(a: InitSweepArgs) -> Result<(), String> {
    let cfg =
        SimulatorConfig::new(a.alpha, a.theta, a.reset, InitPolicy::Constant(0.0)).map_err(err)?;
    let trace = vec![a.luminance; a.frames];
    let taus: Vec<f64> = a.taus.iter().map(|t| t * a.theta).collect();
    let traces = initial_state_sweep(&trace, &cfg, &taus).map_err(err)?;
    write_atomic(&a.csv, initial_state_csv(&traces).as_bytes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Encode(a) => run_encode(a),
        Command::Decode(a) => run_decode(a),
        Command::Analyze(a) => run_analyze(a),
        Command::Eval(a) => run_eval(a),
        Command::Sweep(a) => run_sweep(a),
        Command::InitSweep(a) => run_init_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {}", msg.lines().next().unwrap_or("unknown failure"));
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
