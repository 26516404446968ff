use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use depthsr::eval::{fit_time_model, BenchRecord, TimeModel};
use depthsr::geom::DistanceMode;
use depthsr::io;
use depthsr::pipeline::{self, merge_json, PipelineConfig};
use depthsr::prep::Connectivity;
use depthsr::synth::{ObjectKind, SceneConfig};
use depthsr::{Error, Result};

#[derive(Parser)]
#[command(name = "dsr", version, about = "Depth super-resolution data preparation and evaluation")]
struct Cli {
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON file whose values override the command-line flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic corpus.
    Synth(SynthArgs),
    /// Fill, downsample and extract object maps in place.
    Prepare(PrepareArgs),
    /// Score a predicted HR depth map against a sample.
    Evaluate(EvaluateArgs),
    /// Time pipeline stages, or extrapolate timings.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// box, sphere or superellipsoid; implies --fixed.
    #[arg(long)]
    kind: Option<ObjectKind>,
    #[arg(long)]
    ground_depth: Option<f64>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    border_margin: Option<usize>,
    #[arg(long)]
    scale: Option<usize>,
    /// Keep object kind, size and pose; only the seed varies.
    #[arg(long)]
    fixed: bool,
}

#[derive(Args)]
struct PrepareArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    scale: Option<usize>,
    #[arg(long)]
    tau: Option<f32>,
    /// Depth of background holes in mm (default: corpus maximum).
    #[arg(long)]
    background: Option<f32>,
    /// 4 or 8.
    #[arg(long)]
    connectivity: Option<u8>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    sample: PathBuf,
    /// Also compare point clouds and write a colored PLY.
    #[arg(long)]
    pcl: bool,
    /// PLY output path (default: prediction path with a .ply extension).
    #[arg(long)]
    ply: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    ratio: Option<f64>,
    /// Measure distances in both directions.
    #[arg(long)]
    symmetric: bool,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct BenchArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "fill,downsample,objectmap")]
    stages: String,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[command(subcommand)]
    command: Option<BenchCommand>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Fit a quadratic time model and predict the time at another resolution.
    Extrapolate(ExtrapolateArgs),
}

#[derive(Args)]
struct ExtrapolateArgs {
    /// Target resolution, WxH.
    #[arg(long)]
    at: String,
    /// Known timing, WxH=SECONDS; repeatable.
    #[arg(long = "point")]
    points: Vec<String>,
    /// Bench output to fit, one model per stage.
    #[arg(long)]
    records: Option<PathBuf>,
}

fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("expected WxH, got `{s}`"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?))
}

fn parse_point(s: &str) -> Result<(f64, f64)> {
    let (dims, secs) = s
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("expected WxH=SECONDS, got `{s}`")))?;
    let (w, h) = parse_dims(dims)?;
    let t = secs
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad time in `{s}`")))?;
    Ok(((w * h) as f64, t))
}

/// Apply `--config` on top of a flag-derived value. `section` picks a nested
/// object of the file; `skip` drops keys that belong to other commands.
fn with_overrides<T>(value: T, file: Option<&Path>, section: Option<&str>, skip: &[&str]) -> Result<T>
where
    T: Serialize + serde::de::DeserializeOwned,
{
    let Some(path) = file else { return Ok(value) };
    let mut overrides: Value = io::read_json(path)?;
    if let Some(key) = section {
        overrides = overrides.get(key).cloned().unwrap_or(Value::Null);
    }
    if let Value::Object(map) = &mut overrides {
        for k in skip {
            map.remove(*k);
        }
    } else if !overrides.is_null() {
        return Err(Error::InvalidParameter(format!("{}: config must be a JSON object", path.display())));
    }
    let mut base = serde_json::to_value(value)?;
    if !overrides.is_null() {
        merge_json(&mut base, &overrides);
    }
    serde_json::from_value(base).map_err(|e| Error::from(e).at(path))
}

fn print<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn synth(args: SynthArgs, config: Option<&Path>) -> Result<bool> {
    let d = SceneConfig::default();
    let base = SceneConfig {
        width: args.width.unwrap_or(d.width),
        height: args.height.unwrap_or(d.height),
        object_kind: args.kind.unwrap_or(d.object_kind),
        ground_depth: args.ground_depth.unwrap_or(d.ground_depth),
        noise_sigma: args.noise_sigma.unwrap_or(d.noise_sigma),
        border_margin: args.border_margin.unwrap_or(d.border_margin),
        scale: args.scale.unwrap_or(d.scale),
        ..d
    };
    let base = with_overrides(base, config, Some("scene"), &[])?;
    let manifest = pipeline::synth_corpus(&args.out, args.count, args.seed, &base, !(args.fixed || args.kind.is_some()))?;
    print(&json!({ "out": args.out, "count": manifest.samples.len() }))?;
    Ok(true)
}

fn prepare(args: PrepareArgs, config: Option<&Path>) -> Result<bool> {
    let d = PipelineConfig::default();
    let connectivity = match args.connectivity {
        Some(c) => Connectivity::try_from(c).map_err(Error::InvalidParameter)?,
        None => d.connectivity,
    };
    let cfg = PipelineConfig {
        scale: args.scale.unwrap_or(d.scale),
        tau: args.tau.unwrap_or(d.tau),
        background: args.background.or(d.background),
        connectivity,
        ..d
    };
    let cfg = with_overrides(cfg, config, None, &["scene"])?;
    let report = pipeline::prepare_corpus(&args.input, &cfg)?;
    print(&report)?;
    Ok(report.failures() == 0)
}

fn evaluate(args: EvaluateArgs, config: Option<&Path>) -> Result<bool> {
    let mut cfg = PipelineConfig::default();
    cfg.outliers.k_neighbors = args.k.unwrap_or(cfg.outliers.k_neighbors);
    cfg.outliers.std_ratio = args.ratio.unwrap_or(cfg.outliers.std_ratio);
    if args.symmetric {
        cfg.distance_mode = DistanceMode::Symmetric;
    }
    let cfg = with_overrides(cfg, config, None, &["scene"])?;
    let sample = io::read_sample(&args.sample)?;
    let pred = io::pfm::read_depth(&args.pred)?;
    let ply = args.pcl.then(|| args.ply.clone().unwrap_or_else(|| args.pred.with_extension("ply")));
    let report = pipeline::evaluate(&pred, &sample, &cfg, ply.as_deref()).map_err(|e| e.at(&args.pred))?;
    print(&report)?;
    Ok(true)
}

#[derive(Serialize)]
struct Extrapolation {
    stage: String,
    w: usize,
    h: usize,
    seconds: f64,
    model: TimeModel,
}

fn extrapolate(args: ExtrapolateArgs) -> Result<bool> {
    let (w, h) = parse_dims(&args.at)?;
    let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    if !args.points.is_empty() {
        let pts = args.points.iter().map(|p| parse_point(p)).collect::<Result<Vec<_>>>()?;
        groups.push(("points".to_string(), pts));
    }
    if let Some(path) = &args.records {
        let records: Vec<BenchRecord> = io::read_json(path)?;
        for r in records {
            let pt = ((r.w * r.h) as f64, r.seconds);
            match groups.iter_mut().find(|g| g.0 == r.stage) {
                Some(g) => g.1.push(pt),
                None => groups.push((r.stage, vec![pt])),
            }
        }
    }
    if groups.is_empty() {
        return Err(Error::InvalidParameter("give --point or --records".into()));
    }
    let out = groups
        .into_iter()
        .map(|(stage, pts)| {
            let model = fit_time_model(&pts)?;
            Ok(Extrapolation {
                stage,
                w,
                h,
                seconds: model.predict((w * h) as f64),
                model,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    print(&out)?;
    Ok(true)
}

fn bench(args: BenchArgs, config: Option<&Path>) -> Result<bool> {
    if let Some(BenchCommand::Extrapolate(x)) = args.command {
        return extrapolate(x);
    }
    let stages = pipeline::parse_stages(&args.stages)?;
    let input = args
        .input
        .ok_or_else(|| Error::InvalidParameter("bench needs --in DIR".into()))?;
    let cfg = with_overrides(PipelineConfig::default(), config, None, &["scene"])?;
    print(&pipeline::bench_corpus(&input, &stages, args.reps, &cfg)?)?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    let config = cli.config.as_deref();
    match cli.command {
        Command::Synth(a) => synth(a, config),
        Command::Prepare(a) => prepare(a, config),
        Command::Evaluate(a) => evaluate(a, config),
        Command::Bench(a) => bench(a, config),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
