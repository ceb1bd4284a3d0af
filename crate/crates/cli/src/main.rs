//! `ced` command-line tool: detect keypoints, evaluate repeatability, sweep
//! thresholds, benchmark, and generate synthetic scenes.

use std::fs::File;
use std::hash::{BuildHasher, Hasher};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use ced_core::detector::{DEFAULT_MIN_NEIGHBORS, DEFAULT_T_C, DEFAULT_T_G, MAX_T_C, MAX_T_G};
use ced_core::eval::{write_ablation_csv, write_repeatability_csv, write_runtime_csv};
use ced_core::export::{keypoints_to_cloud_bytes, write_keypoints_csv};
use ced_core::{
    ablation_sweep, detect_detailed, evaluate_repeatability, generate_scene, measure_runtime,
    read_cloud_file, write_cloud, CedDetector, CloudFormat, ColoredPointCloud, DetectorParams, KeypointDetector,
    Mode, RandomDetector, RepeatabilityConfig, SceneKind, SceneSpec,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ced", version, about = "Centroid-distance keypoints for colored point clouds")]
struct Cli {
    /// Worker threads (default: all cores). `bench` always uses one.
    #[arg(long, global = true, value_parser = positive_usize)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect keypoints; writes CSV, or a cloud file with --format.
    Detect(DetectCmd),
    /// Repeatability over random rigid transforms; writes CSV.
    Repeat(RepeatCmd),
    /// Threshold sweep; writes CSV.
    Ablate(AblateCmd),
    /// Single-thread runtime; writes CSV.
    Bench(BenchCmd),
    /// Generate a synthetic scene.
    Synth(SynthCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Ply,
    PlyBin,
    Pcd,
}

impl From<FormatArg> for CloudFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Ply => CloudFormat::PlyAscii,
            FormatArg::PlyBin => CloudFormat::PlyBinaryLe,
            FormatArg::Pcd => CloudFormat::PcdAscii,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Ced,
    Ced3d,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Seed {
    Fixed(u64),
    Random,
}

impl FromStr for Seed {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "random" {
            return Ok(Seed::Random);
        }
        s.parse()
            .map(Seed::Fixed)
            .map_err(|_| format!("expected an unsigned integer or 'random', got '{s}'"))
    }
}

impl Seed {
    fn resolve(self) -> u64 {
        match self {
            Seed::Fixed(s) => s,
            Seed::Random => {
                let s = std::collections::hash_map::RandomState::new().build_hasher().finish();
                eprintln!("using seed {s}");
                s
            }
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got '{s}'")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got '{s}'")),
    }
}

fn in_range(s: &str, max: f64) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=max).contains(&v) => Ok(v),
        Ok(v) => Err(format!("{v} is outside the valid range [0, {max}]")),
        Err(_) => Err(format!("expected a number, got '{s}'")),
    }
}

fn t_g(s: &str) -> Result<f64, String> {
    in_range(s, MAX_T_G)
}

fn t_c(s: &str) -> Result<f64, String> {
    in_range(s, MAX_T_C)
}

/// Detector flags shared by every subcommand that runs a detector.
#[derive(Args, Debug)]
struct DetectorArgs {
    /// Support radius in meters [default: 5 × cloud resolution]
    #[arg(long, value_parser = positive)]
    radius: Option<f64>,
    /// Detector [default: ced for colored clouds, ced3d otherwise]
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Smallest support for which saliency is defined.
    #[arg(long, default_value_t = DEFAULT_MIN_NEIGHBORS, value_parser = positive_usize)]
    min_neighbors: usize,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    /// Geometric threshold, as a fraction of the radius, in [0, 1].
    #[arg(long, default_value_t = DEFAULT_T_G, value_parser = t_g)]
    tg: f64,
    /// Photometric threshold in [0, 3].
    #[arg(long, default_value_t = DEFAULT_T_C, value_parser = t_c)]
    tc: f64,
}

#[derive(Args, Debug)]
struct InputArg {
    /// Input cloud (PLY or PCD; format detected from the header).
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct OutputArg {
    /// Output file [default: standard output]
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    /// Match distance in meters [default: 2 × resolution]
    #[arg(long, value_parser = positive)]
    epsilon: Option<f64>,
    /// Noise standard deviation in meters [default: resolution / 2]
    #[arg(long, value_parser = non_negative)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = ced_core::eval::DEFAULT_TRIALS, value_parser = positive_usize)]
    trials: usize,
    /// Base seed, or `random`.
    #[arg(long, default_value = "1")]
    seed: Seed,
    /// Leave out timing columns so seeded runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct DetectCmd {
    #[command(flatten)]
    input: InputArg,
    #[command(flatten)]
    output: OutputArg,
    /// Write the keypoints as a cloud of this format instead of CSV.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[command(flatten)]
    detector: DetectorArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Number of points for `--mode random` [default: as many as ced finds]
    #[arg(long)]
    count: Option<usize>,
    /// Seed for `--mode random`, or `random`.
    #[arg(long, default_value = "1")]
    seed: Seed,
}

#[derive(Args, Debug)]
struct RepeatCmd {
    #[command(flatten)]
    input: InputArg,
    #[command(flatten)]
    output: OutputArg,
    #[command(flatten)]
    detector: DetectorArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Number of points for `--mode random` [default: as many as ced finds]
    #[arg(long)]
    count: Option<usize>,
    #[command(flatten)]
    protocol: ProtocolArgs,
}

#[derive(Args, Debug)]
struct AblateCmd {
    #[command(flatten)]
    input: InputArg,
    #[command(flatten)]
    output: OutputArg,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Comma-separated geometric thresholds.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5", value_parser = t_g)]
    tg: Vec<f64>,
    /// Comma-separated photometric thresholds.
    #[arg(long, value_delimiter = ',', default_value = "0.1", value_parser = t_c)]
    tc: Vec<f64>,
    /// Match distance in meters [default: 2 × resolution]
    #[arg(long, value_parser = positive)]
    epsilon: Option<f64>,
    /// Noise standard deviation in meters.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    sigma: f64,
    #[arg(long, default_value_t = ced_core::eval::DEFAULT_TRIALS, value_parser = positive_usize)]
    trials: usize,
    /// Base seed, or `random`.
    #[arg(long, default_value = "1")]
    seed: Seed,
    /// Leave out the runtime column.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct BenchCmd {
    #[command(flatten)]
    input: InputArg,
    #[command(flatten)]
    output: OutputArg,
    #[command(flatten)]
    detector: DetectorArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Number of points for `--mode random` [default: as many as ced finds]
    #[arg(long)]
    count: Option<usize>,
    /// Timed runs (at least 3).
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
}

#[derive(Args, Debug)]
struct SynthCmd {
    #[arg(long, value_enum, default_value = "room-composite")]
    kind: KindArg,
    /// Side length in meters [default: 1, or 0.7 for the room]
    #[arg(long, value_parser = positive)]
    extent: Option<f64>,
    /// Grid spacing in meters.
    #[arg(long, default_value_t = 0.01, value_parser = positive)]
    pitch: f64,
    /// Checker tile side in meters [default: 0.2, or 0.35 for the room]
    #[arg(long, value_parser = positive)]
    tile: Option<f64>,
    /// In-surface jitter as a fraction of the pitch, below 0.5.
    #[arg(long)]
    jitter: Option<f64>,
    /// Color noise standard deviation in 8-bit levels.
    #[arg(long, value_parser = non_negative)]
    color_noise: Option<f64>,
    #[arg(long, default_value = "7")]
    seed: Seed,
    /// Output file (required).
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "ply")]
    format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Plane,
    BoxCorner,
    CheckerFloor,
    RoomComposite,
}

impl From<KindArg> for SceneKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Plane => SceneKind::Plane,
            KindArg::BoxCorner => SceneKind::BoxCorner,
            KindArg::CheckerFloor => SceneKind::CheckerFloor,
            KindArg::RoomComposite => SceneKind::RoomComposite,
        }
    }
}

fn load(input: &InputArg) -> Result<ColoredPointCloud> {
    let cloud = read_cloud_file(&input.input).with_context(|| format!("reading {}", input.input.display()))?;
    log::info!(
        "{}: {} points, resolution {}",
        input.input.display(),
        cloud.len(),
        cloud.resolution()
    );
    Ok(cloud)
}

fn sink(output: &OutputArg) -> Result<Box<dyn Write>> {
    Ok(match &output.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// CED parameters from the flags; `random` mode ranks with `ced`.
fn params_for(cloud: &ColoredPointCloud, det: &DetectorArgs, t_g: f64, t_c: f64) -> Result<DetectorParams> {
    let mut params = DetectorParams::for_cloud(cloud).with_thresholds(t_g, t_c);
    if let Some(r) = det.radius {
        params.radius = r;
    }
    params.min_neighbors = det.min_neighbors;
    match det.mode {
        Some(ModeArg::Ced) => {
            if !cloud.has_color() {
                bail!("--mode ced needs a colored cloud; use --mode ced3d");
            }
            params.mode = Mode::Ced;
        }
        Some(ModeArg::Ced3d) => params.mode = Mode::Ced3d,
        Some(ModeArg::Random) | None => {}
    }
    params.validate()?;
    Ok(params)
}

fn detector_for(
    cloud: &ColoredPointCloud,
    det: &DetectorArgs,
    thresholds: &ThresholdArgs,
    count: Option<usize>,
) -> Result<Box<dyn KeypointDetector>> {
    let params = params_for(cloud, det, thresholds.tg, thresholds.tc)?;
    let ced = CedDetector::new(params);
    if det.mode != Some(ModeArg::Random) {
        return Ok(Box::new(ced));
    }
    let count = match count {
        Some(c) => c,
        None => {
            let c = ced_core::eval::random_matching_count(cloud, &ced)?;
            log::info!("random baseline draws {c} points, as many as {} finds", params.mode);
            c
        }
    };
    if count > cloud.len() {
        bail!("--count {count} exceeds the {} points of the cloud", cloud.len());
    }
    Ok(Box::new(RandomDetector { count }))
}

fn protocol(cloud: &ColoredPointCloud, epsilon: Option<f64>, sigma: f64, trials: usize, seed: Seed) -> RepeatabilityConfig {
    let base = seed.resolve();
    let mut config = RepeatabilityConfig::for_resolution(cloud.resolution())
        .with_sigma(sigma)
        .with_trials(trials);
    if let Some(e) = epsilon {
        config.epsilon = e;
    }
    config.transform_seed = base;
    config.noise_seed = base.wrapping_add(1);
    config.detector_seed = base.wrapping_add(2);
    config
}

fn run_detect(cmd: &DetectCmd) -> Result<()> {
    let cloud = load(&cmd.input)?;
    let (keypoints, geometric, photometric) = if cmd.detector.mode == Some(ModeArg::Random) {
        let det = detector_for(&cloud, &cmd.detector, &cmd.thresholds, cmd.count)?;
        (det.detect(&cloud, cmd.seed.resolve())?, None, None)
    } else {
        let params = params_for(&cloud, &cmd.detector, cmd.thresholds.tg, cmd.thresholds.tc)?;
        let d = detect_detailed(&cloud, &params)?;
        (d.keypoints, Some(d.geometric), d.photometric)
    };
    eprintln!("{} keypoints", keypoints.len());
    let mut out = sink(&cmd.output)?;
    match cmd.format {
        Some(format) => {
            if keypoints.is_empty() {
                bail!("no keypoints to write as a cloud");
            }
            out.write_all(&keypoints_to_cloud_bytes(&cloud, &keypoints, format.into())?)?;
        }
        None => write_keypoints_csv(&mut out, &cloud, &keypoints, geometric.as_ref(), photometric.as_ref())?,
    }
    out.flush()?;
    Ok(())
}

fn run_repeat(cmd: &RepeatCmd) -> Result<()> {
    let cloud = load(&cmd.input)?;
    let p = &cmd.protocol;
    let sigma = p.sigma.unwrap_or(0.5 * cloud.resolution());
    let config = protocol(&cloud, p.epsilon, sigma, p.trials, p.seed);
    let det = detector_for(&cloud, &cmd.detector, &cmd.thresholds, cmd.count)?;
    let report = evaluate_repeatability(&cloud, det.as_ref(), &config)?;
    if report.empty {
        eprintln!("warning: no keypoints on the input cloud; repeatability reported as 0");
    }
    eprintln!(
        "{}: repeatability {:.4} over {} trials",
        det.name(),
        report.relative_repeatability,
        config.trials
    );
    let mut out = sink(&cmd.output)?;
    write_repeatability_csv(&mut out, &det.name(), &report, !p.no_timing)?;
    out.flush()?;
    Ok(())
}

fn run_ablate(cmd: &AblateCmd) -> Result<()> {
    if cmd.detector.mode == Some(ModeArg::Random) {
        bail!("ablate sweeps detector thresholds; --mode random has none");
    }
    let cloud = load(&cmd.input)?;
    let fixed = params_for(&cloud, &cmd.detector, cmd.tg[0], cmd.tc[0])?;
    let config = protocol(&cloud, cmd.epsilon, cmd.sigma, cmd.trials, cmd.seed);
    let rows = ablation_sweep(&cloud, &cmd.tg, &cmd.tc, &fixed, &config)?;
    let mut out = sink(&cmd.output)?;
    write_ablation_csv(&mut out, &rows, !cmd.no_timing)?;
    out.flush()?;
    Ok(())
}

fn run_bench(cmd: &BenchCmd) -> Result<()> {
    let cloud = load(&cmd.input)?;
    let det = detector_for(&cloud, &cmd.detector, &cmd.thresholds, cmd.count)?;
    let stats = measure_runtime(&cloud, det.as_ref(), cmd.repetitions)?;
    eprintln!(
        "{} on {} points: mean {:.4} s, median {:.4} s, min {:.4} s",
        det.name(),
        cloud.len(),
        stats.mean,
        stats.median,
        stats.min
    );
    let mut out = sink(&cmd.output)?;
    write_runtime_csv(&mut out, &det.name(), cloud.len(), &stats)?;
    out.flush()?;
    Ok(())
}

fn run_synth(cmd: &SynthCmd) -> Result<()> {
    let mut spec = SceneSpec::new(cmd.kind.into());
    spec.pitch = cmd.pitch;
    if let Some(v) = cmd.extent {
        spec.extent = v;
    }
    if let Some(v) = cmd.tile {
        spec.tile = v;
    }
    if let Some(v) = cmd.jitter {
        spec.jitter = v;
    }
    if let Some(v) = cmd.color_noise {
        spec.color_noise = v;
    }
    spec.seed = cmd.seed.resolve();
    let cloud = generate_scene(&spec)?;
    write_file(&cmd.output, &write_cloud(&cloud, cmd.format.into())?)?;
    eprintln!("{} points written to {}", cloud.len(), cmd.output.display());
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    let threads = match cli.command {
        Command::Bench(_) => Some(1),
        _ => cli.threads,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Detect(c) => run_detect(c),
        Command::Repeat(c) => run_repeat(c),
        Command::Ablate(c) => run_ablate(c),
        Command::Bench(c) => run_bench(c),
        Command::Synth(c) => run_synth(c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CED_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
