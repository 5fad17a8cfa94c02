//! `gamma` command-line tool.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gamma_core::config::{Ablation, EngineConfig};
use gamma_core::dataset::{load_dataset, write_heterogeneous, TrajectoryDataset};
use gamma_core::engine::{simulate, Engine, Scenario};
use gamma_core::eval::{
    evaluate, predict_at, write_prediction_samples, write_predictions, write_summary, write_traces,
    Mode, SceneSummary,
};
use gamma_core::kinematics::{parse_specs, write_profiles, KinematicProfile, ProfileSet};
use gamma_core::{GammaError, Result};

#[derive(Parser, Debug)]
#[command(
    name = "gamma",
    version,
    about = "Velocity-space motion prediction for heterogeneous traffic"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Engine config file (`key = value` lines). For estimate-kinematics, the
    /// kinematic spec file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Kinematic profile file (defaults to the built-in profiles).
    #[arg(long, global = true)]
    profiles: Option<PathBuf>,
    /// Prediction mode: det or bestN (e.g. best20).
    #[arg(long, global = true, default_value = "det")]
    mode: String,
    /// Comma-separated factors to disable: kinematics, polygons, intention,
    /// attention, responsibility.
    #[arg(long, global = true, value_name = "FACTOR,...")]
    ablate: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file or, for evaluate, output directory. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate trackable velocity sets from a kinematic spec file.
    EstimateKinematics,
    /// Filter a dataset up to a frame and predict every agent present there.
    Predict {
        dataset: PathBuf,
        /// Last observed frame (defaults to the last frame of the dataset).
        #[arg(long)]
        frame: Option<i64>,
    },
    /// Sliding-window ADE/FDE over one or more scenes.
    Evaluate {
        /// Scene files, or directories whose `.txt` files are scenes.
        #[arg(required = true)]
        scenes: Vec<PathBuf>,
    },
    /// Generate a noisy trajectory dataset from a scenario file.
    Simulate {
        scenario: PathBuf,
        #[arg(long, default_value_t = 40)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(GammaError::InvalidArgument("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| GammaError::InvalidArgument(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::EstimateKinematics => estimate_kinematics(&g),
        Command::Predict { dataset, frame } => predict(&g, &dataset, frame),
        Command::Evaluate { scenes } => evaluate_scenes(&g, &scenes),
        Command::Simulate { scenario, steps } => simulate_scenario(&g, &scenario, steps),
    }
}

fn engine_config(g: &Global) -> Result<EngineConfig> {
    let mut config = match &g.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    if let Some(p) = &g.profiles {
        config.profiles = Some(p.clone());
    }
    if let Some(list) = &g.ablate {
        for f in Ablation::parse_list(list)? {
            config.ablation.disable(f);
        }
    }
    if let Some(seed) = g.seed {
        config.seed = seed;
    }
    if g.threads.is_some() {
        config.threads = g.threads;
    }
    config.validate()?;
    Ok(config)
}

fn engine(g: &Global) -> Result<Engine> {
    Engine::from_config(engine_config(g)?)
}

fn mode(g: &Global, config: &EngineConfig) -> Result<Mode> {
    Mode::parse(&g.mode, config.sample_sigma)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| GammaError::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| GammaError::io("<stdout>", e)),
    }
}

fn estimate_kinematics(g: &Global) -> Result<()> {
    let path = g.config.as_ref().ok_or_else(|| {
        GammaError::InvalidArgument("estimate-kinematics needs --config <spec file>".into())
    })?;
    let text = fs::read_to_string(path).map_err(|e| GammaError::io(path, e))?;
    let specs = parse_specs(&text).map_err(|e| e.with_path(path))?;
    if specs.is_empty() {
        return Err(GammaError::InvalidArgument(format!(
            "{}: no agent types specified",
            path.display()
        )));
    }
    let mut set = ProfileSet::new();
    let mut failed = Vec::new();
    for spec in specs {
        let t = spec.agent_type;
        let start = Instant::now();
        match KinematicProfile::estimate(spec) {
            Ok(p) => {
                log::info!(
                    "{t}: {} vertices in {:.2} s",
                    p.trackable_set.len(),
                    start.elapsed().as_secs_f64()
                );
                set.insert(p);
            }
            Err(e) => {
                eprintln!("error: {e}");
                failed.push(t.to_string());
            }
        }
    }
    if !set.is_empty() {
        emit(g.out.as_deref(), &write_profiles(&set))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(GammaError::InvalidArgument(format!(
            "estimation failed for {}",
            failed.join(", ")
        )))
    }
}

fn predict(g: &Global, path: &Path, frame: Option<i64>) -> Result<()> {
    let engine = engine(g)?;
    let mode = mode(g, engine.config())?;
    let dataset = load_dataset(path)?;
    let frame = match frame {
        Some(f) => f,
        None => *dataset.frame_ids().last().ok_or_else(|| {
            GammaError::InvalidArgument(format!("{}: empty dataset", path.display()))
        })?,
    };
    let samples = predict_at(&dataset, &engine, frame, mode, engine.config().seed)?;
    let text = match mode {
        Mode::Deterministic => write_predictions(&samples[0]),
        Mode::BestOfN { .. } => write_prediction_samples(&samples),
    };
    emit(g.out.as_deref(), &text)
}

fn scene_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| GammaError::io(p, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "txt"))
                .collect();
            if found.is_empty() {
                return Err(GammaError::InvalidArgument(format!(
                    "{}: no .txt scene files",
                    p.display()
                )));
            }
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn scene_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn evaluate_scenes(g: &Global, paths: &[PathBuf]) -> Result<()> {
    let engine = engine(g)?;
    let mode = mode(g, engine.config())?;
    let files = scene_files(paths)?;
    if let Some(dir) = &g.out {
        fs::create_dir_all(dir.join("traces")).map_err(|e| GammaError::io(dir, e))?;
    }
    let mut summaries = Vec::new();
    for file in &files {
        let dataset: TrajectoryDataset = load_dataset(file)?;
        let start = Instant::now();
        let ev = evaluate(&dataset, &engine, mode, engine.config().seed)?;
        let name = scene_name(file);
        let summary = SceneSummary::new(name.clone(), &ev, start.elapsed().as_secs_f64());
        log::info!("{name}: ade {:.4} fde {:.4}", summary.ade, summary.fde);
        if let Some(dir) = &g.out {
            let trace = dir.join("traces").join(format!("{name}_{mode}.tsv"));
            fs::write(&trace, write_traces(&ev)).map_err(|e| GammaError::io(&trace, e))?;
        }
        summaries.push(summary);
    }
    let text = write_summary(&summaries);
    match &g.out {
        Some(dir) => {
            let path = dir.join("summary.tsv");
            fs::write(&path, &text).map_err(|e| GammaError::io(&path, e))?;
            emit(None, &text)
        }
        None => emit(None, &text),
    }
}

fn simulate_scenario(g: &Global, path: &Path, steps: usize) -> Result<()> {
    let engine = engine(g)?;
    let scenario = Scenario::load(path)?;
    let seed = g.seed.or(scenario.seed).unwrap_or(engine.config().seed);
    let dataset = simulate(&engine, &scenario, steps, seed)?;
    emit(g.out.as_deref(), &write_heterogeneous(&dataset))
}
