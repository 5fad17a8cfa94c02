//! Sliding-window ADE/FDE benchmarks.
//!
//! Summary files hold one tab-separated record per scene under the header
//! `scene mode ade fde windows agents wall_time_s`. Trace files hold one row
//! per predicted point under `window start_frame agent step x y truth_x truth_y`.
//! Prediction files hold `agent step x y` rows, or `sample agent step x y`
//! rows for sampled predictions.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::dataset::TrajectoryDataset;
use crate::engine::{AgentPlan, BehaviorFilter, Engine, WorldState};
use crate::error::{GammaError, Result};
use crate::geometry::Vec2;

pub const OBSERVED_FRAMES: usize = 8;
pub const PREDICTED_FRAMES: usize = 12;

/// Average and final displacement error.
pub fn ade_fde(predicted: &[Vec2], truth: &[Vec2]) -> Result<(f64, f64)> {
    if predicted.len() != truth.len() {
        return Err(GammaError::LengthMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(GammaError::InvalidArgument("empty trajectories".into()));
    }
    let d: Vec<f64> = predicted
        .iter()
        .zip(truth)
        .map(|(p, t)| p.distance(*t))
        .collect();
    Ok((d.iter().sum::<f64>() / d.len() as f64, d[d.len() - 1]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Deterministic,
    /// Best of `n` rollouts with reference positions perturbed by N(0, sigma²).
    BestOfN {
        n: usize,
        sigma: f64,
    },
}

impl Mode {
    /// `det`, or `bestN` (e.g. `best20`) with noise `sigma`.
    pub fn parse(text: &str, sigma: f64) -> Result<Self> {
        match text {
            "det" | "deterministic" => Ok(Mode::Deterministic),
            _ => text
                .strip_prefix("best")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|n| *n > 0)
                .map(|n| Mode::BestOfN { n, sigma })
                .ok_or_else(|| {
                    GammaError::InvalidArgument(format!(
                        "unknown mode '{text}' (expected det or bestN)"
                    ))
                }),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Deterministic => f.write_str("det"),
            Mode::BestOfN { n, .. } => write!(f, "best{n}"),
        }
    }
}

impl FromStr for Mode {
    type Err = GammaError;

    fn from_str(s: &str) -> Result<Self> {
        Mode::parse(s, 0.5)
    }
}

/// Contiguous frames with the agents present in every one of them.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalWindow {
    pub frames: Vec<i64>,
    pub agents: Vec<u64>,
}

impl EvalWindow {
    pub fn observed(&self) -> &[i64] {
        &self.frames[..OBSERVED_FRAMES]
    }

    pub fn future(&self) -> &[i64] {
        &self.frames[OBSERVED_FRAMES..]
    }
}

/// All complete windows, sliding by one frame.
pub fn windows(dataset: &TrajectoryDataset) -> Vec<EvalWindow> {
    let len = OBSERVED_FRAMES + PREDICTED_FRAMES;
    let step = dataset.frame_step();
    let ids = dataset.frame_ids();
    let mut out = Vec::new();
    for w in ids.windows(len) {
        if w.windows(2).any(|p| p[1] - p[0] != step) {
            continue;
        }
        let first = dataset.frame(w[0]).unwrap_or(&[]);
        let agents: Vec<u64> = first
            .iter()
            .map(|o| o.id)
            .filter(|&id| w.iter().all(|&f| dataset.observation(f, id).is_some()))
            .collect();
        if !agents.is_empty() {
            out.push(EvalWindow {
                frames: w.to_vec(),
                agents,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentResult {
    pub window: usize,
    pub start_frame: i64,
    pub agent: u64,
    pub ade: f64,
    pub fde: f64,
    pub predicted: Vec<Vec2>,
    pub truth: Vec<Vec2>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub mode: Mode,
    pub windows: usize,
    pub results: Vec<AgentResult>,
    /// Mean over all agent-windows.
    pub ade: f64,
    pub fde: f64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sample `k` in window `window`; independent of the sample count,
/// so the samples of a smaller `n` are a prefix of those of a larger one.
pub fn sample_seed(seed: u64, window: usize, k: usize) -> u64 {
    mix(mix(mix(seed) ^ window as u64) ^ k as u64)
}

/// Copies `plans` with each moving agent's reference position shifted by
/// isotropic Gaussian noise of spread `sigma`.
pub fn perturbed_plans(
    world: &WorldState,
    plans: &[AgentPlan],
    sigma: f64,
    seed: u64,
) -> Result<Vec<AgentPlan>> {
    let mut sampled = plans.to_vec();
    if sigma == 0.0 {
        return Ok(sampled);
    }
    let noise = Normal::new(0.0, sigma)
        .map_err(|e| GammaError::InvalidArgument(format!("sample sigma: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (plan, agent) in sampled.iter_mut().zip(&world.agents) {
        if !agent.is_static() {
            let dx = noise.sample(&mut rng);
            let dy = noise.sample(&mut rng);
            plan.reference.position += Vec2::new(dx, dy);
        }
    }
    Ok(sampled)
}

/// Filters the frames of `dataset` up to and including `frame` and predicts
/// every agent present there. Best-of-N modes return one map per sample.
pub fn predict_at(
    dataset: &TrajectoryDataset,
    engine: &Engine,
    frame: i64,
    mode: Mode,
    seed: u64,
) -> Result<Vec<BTreeMap<u64, Vec<Vec2>>>> {
    if dataset.frame(frame).is_none() {
        return Err(GammaError::UnknownFrame(frame));
    }
    let frames: Vec<i64> = dataset
        .frame_ids()
        .into_iter()
        .filter(|&f| f <= frame)
        .collect();
    let filter = BehaviorFilter::run_frames(engine, dataset, &frames)?;
    let world = filter.world()?;
    let plans = engine.map_plans(&world);
    let steps = engine.config().t_pred_steps;
    let ids: Vec<u64> = world.agents.iter().map(|a| a.id).collect();
    let tracks = |plans: &[AgentPlan]| -> Result<BTreeMap<u64, Vec<Vec2>>> {
        Ok(ids
            .iter()
            .copied()
            .zip(engine.rollout(&world, plans, steps)?)
            .collect())
    };
    match mode {
        Mode::Deterministic => Ok(vec![tracks(&plans)?]),
        Mode::BestOfN { n, sigma } => (0..n)
            .map(|k| {
                tracks(&perturbed_plans(
                    &world,
                    &plans,
                    sigma,
                    sample_seed(seed, 0, k),
                )?)
            })
            .collect(),
    }
}

fn evaluate_window(
    dataset: &TrajectoryDataset,
    engine: &Engine,
    mode: Mode,
    seed: u64,
    index: usize,
    window: &EvalWindow,
) -> Result<Vec<AgentResult>> {
    let filter = BehaviorFilter::run_frames(engine, dataset, window.observed())?;
    let world = filter.world()?;
    let plans = engine.map_plans(&world);
    let truth: Vec<Vec<Vec2>> = window
        .agents
        .iter()
        .map(|&id| {
            window
                .future()
                .iter()
                .map(|&f| {
                    dataset
                        .observation(f, id)
                        .expect("window agent in every frame")
                        .position
                })
                .collect()
        })
        .collect();
    let slots: Vec<usize> = window
        .agents
        .iter()
        .map(|&id| {
            world
                .index_of(id)
                .expect("window agent in last observed frame")
        })
        .collect();
    let score = |tracks: &[Vec<Vec2>]| -> Result<Vec<(f64, f64, Vec<Vec2>)>> {
        slots
            .iter()
            .zip(&truth)
            .map(|(&i, t)| ade_fde(&tracks[i], t).map(|(a, f)| (a, f, tracks[i].clone())))
            .collect()
    };
    let best = match mode {
        Mode::Deterministic => score(&engine.rollout(&world, &plans, PREDICTED_FRAMES)?)?,
        Mode::BestOfN { n, sigma } => {
            let mut best: Option<Vec<(f64, f64, Vec<Vec2>)>> = None;
            for k in 0..n {
                let sampled = perturbed_plans(&world, &plans, sigma, sample_seed(seed, index, k))?;
                let scored = score(&engine.rollout(&world, &sampled, PREDICTED_FRAMES)?)?;
                match best.as_mut() {
                    None => best = Some(scored),
                    Some(best) => {
                        for (b, s) in best.iter_mut().zip(scored) {
                            if s.0 < b.0 {
                                *b = s;
                            }
                        }
                    }
                }
            }
            best.expect("n > 0")
        }
    };
    Ok(window
        .agents
        .iter()
        .zip(best)
        .zip(truth)
        .map(|((&agent, (ade, fde, predicted)), truth)| AgentResult {
            window: index,
            start_frame: window.frames[0],
            agent,
            ade,
            fde,
            predicted,
            truth,
        })
        .collect())
}

/// Runs every complete window of `dataset`. Each window filters its
/// observed frames from uniform priors, then predicts the window agents.
pub fn evaluate(
    dataset: &TrajectoryDataset,
    engine: &Engine,
    mode: Mode,
    seed: u64,
) -> Result<Evaluation> {
    let all = windows(dataset);
    if all.is_empty() {
        return Err(GammaError::InvalidArgument(format!(
            "dataset has no complete window of {} frames",
            OBSERVED_FRAMES + PREDICTED_FRAMES
        )));
    }
    if (dataset.frame_period - engine.config().dt).abs() > 1e-9 {
        log::warn!(
            "frame period {} s differs from engine step {} s",
            dataset.frame_period,
            engine.config().dt
        );
    }
    let per_window: Vec<Vec<AgentResult>> = all
        .par_iter()
        .enumerate()
        .map(|(i, w)| evaluate_window(dataset, engine, mode, seed, i, w))
        .collect::<Result<_>>()?;
    let results: Vec<AgentResult> = per_window.into_iter().flatten().collect();
    let n = results.len() as f64;
    Ok(Evaluation {
        mode,
        windows: all.len(),
        ade: results.iter().map(|r| r.ade).sum::<f64>() / n,
        fde: results.iter().map(|r| r.fde).sum::<f64>() / n,
        results,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneSummary {
    pub scene: String,
    pub mode: String,
    pub ade: f64,
    pub fde: f64,
    pub windows: usize,
    pub agents: usize,
    pub wall_time_s: f64,
}

impl SceneSummary {
    pub fn new(scene: impl Into<String>, evaluation: &Evaluation, wall_time_s: f64) -> Self {
        SceneSummary {
            scene: scene.into(),
            mode: evaluation.mode.to_string(),
            ade: evaluation.ade,
            fde: evaluation.fde,
            windows: evaluation.windows,
            agents: evaluation.results.len(),
            wall_time_s,
        }
    }
}

pub const SUMMARY_HEADER: &str = "scene\tmode\tade\tfde\twindows\tagents\twall_time_s";
pub const TRACE_HEADER: &str = "window\tstart_frame\tagent\tstep\tx\ty\ttruth_x\ttruth_y";

pub fn write_summary(records: &[SceneSummary]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}\t{}\t{}\t{:.3}",
            r.scene, r.mode, r.ade, r.fde, r.windows, r.agents, r.wall_time_s
        );
    }
    out
}

pub fn parse_summary(text: &str) -> Result<Vec<SceneSummary>> {
    let mut out = Vec::new();
    for (idx, row) in text.lines().enumerate().skip(1) {
        if row.trim().is_empty() {
            continue;
        }
        let line = idx + 1;
        let f: Vec<&str> = row.split('\t').collect();
        if f.len() != 7 {
            return Err(GammaError::parse(
                line,
                format!("expected 7 fields, found {}", f.len()),
            ));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| GammaError::parse(line, format!("bad number '{s}'")))
        };
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| GammaError::parse(line, format!("bad count '{s}'")))
        };
        out.push(SceneSummary {
            scene: f[0].to_string(),
            mode: f[1].to_string(),
            ade: num(f[2])?,
            fde: num(f[3])?,
            windows: int(f[4])?,
            agents: int(f[5])?,
            wall_time_s: num(f[6])?,
        });
    }
    Ok(out)
}

pub fn write_traces(evaluation: &Evaluation) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for r in &evaluation.results {
        for (k, (p, t)) in r.predicted.iter().zip(&r.truth).enumerate() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.window,
                r.start_frame,
                r.agent,
                k + 1,
                p.x,
                p.y,
                t.x,
                t.y
            );
        }
    }
    out
}

/// `agent step x y` rows; steps count from 1.
pub fn write_predictions(predictions: &BTreeMap<u64, Vec<Vec2>>) -> String {
    let mut out = String::from("agent\tstep\tx\ty\n");
    for (id, track) in predictions {
        for (k, p) in track.iter().enumerate() {
            let _ = writeln!(out, "{id}\t{}\t{}\t{}", k + 1, p.x, p.y);
        }
    }
    out
}

/// `sample agent step x y` rows for sampled predictions.
pub fn write_prediction_samples(samples: &[BTreeMap<u64, Vec<Vec2>>]) -> String {
    let mut out = String::from("sample\tagent\tstep\tx\ty\n");
    for (s, predictions) in samples.iter().enumerate() {
        for (id, track) in predictions {
            for (k, p) in track.iter().enumerate() {
                let _ = writeln!(out, "{s}\t{id}\t{}\t{}\t{}", k + 1, p.x, p.y);
            }
        }
    }
    out
}

pub fn parse_predictions(text: &str) -> Result<BTreeMap<u64, Vec<Vec2>>> {
    let mut out: BTreeMap<u64, Vec<Vec2>> = BTreeMap::new();
    for (idx, row) in text.lines().enumerate().skip(1) {
        if row.trim().is_empty() {
            continue;
        }
        let line = idx + 1;
        let f: Vec<&str> = row.split_whitespace().collect();
        if f.len() != 4 {
            return Err(GammaError::parse(
                line,
                format!("expected 4 fields, found {}", f.len()),
            ));
        }
        let bad = |s: &str| GammaError::parse(line, format!("bad value '{s}'"));
        let id: u64 = f[0].parse().map_err(|_| bad(f[0]))?;
        let step: usize = f[1].parse().map_err(|_| bad(f[1]))?;
        let x: f64 = f[2].parse().map_err(|_| bad(f[2]))?;
        let y: f64 = f[3].parse().map_err(|_| bad(f[3]))?;
        let track = out.entry(id).or_default();
        if step != track.len() + 1 {
            return Err(GammaError::parse(
                line,
                format!("agent {id}: step {step} out of order"),
            ));
        }
        track.push(Vec2::new(x, y));
    }
    Ok(out)
}
