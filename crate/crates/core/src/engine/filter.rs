use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::behavior::{
    log_likelihood, AgentHistory, BehaviorConstraints, BehaviorPosterior, Intention,
};
use crate::dataset::{Observation, TrajectoryDataset};
use crate::error::Result;
use crate::geometry::{ConvexPolygon, Vec2};
use crate::tolerance::HEADING_SPEED_THRESHOLD;

use super::{AgentState, Engine, WorldState};

#[derive(Clone, Debug)]
struct Track {
    history: AgentHistory,
    last: Observation,
    last_frame: i64,
    heading: f64,
}

/// Observed agents and their recent history, turned into world snapshots
/// the same way for filtering, prediction and simulation.
#[derive(Clone, Debug)]
pub struct Tracks {
    capacity: usize,
    tracks: BTreeMap<u64, Track>,
    last_frame: Option<i64>,
    time: f64,
}

impl Tracks {
    pub fn new(capacity: usize) -> Self {
        Tracks {
            capacity,
            tracks: BTreeMap::new(),
            last_frame: None,
            time: 0.0,
        }
    }

    pub fn last_frame(&self) -> Option<i64> {
        self.last_frame
    }

    /// Ids seen in the latest frame.
    pub fn active_ids(&self) -> Vec<u64> {
        self.tracks
            .iter()
            .filter(|(_, t)| Some(t.last_frame) == self.last_frame)
            .map(|(id, _)| *id)
            .collect()
    }

    /// History length of an agent seen in the latest frame.
    pub fn history_len(&self, id: u64) -> usize {
        self.tracks
            .get(&id)
            .filter(|t| Some(t.last_frame) == self.last_frame)
            .map_or(0, |t| t.history.len())
    }

    /// Appends a frame. Agents that skipped the previous frame restart their history.
    pub fn push_frame(&mut self, frame: i64, time: f64, rows: &[Observation]) -> Result<()> {
        let previous = self.last_frame;
        for obs in rows {
            let capacity = self.capacity;
            let track = self.tracks.entry(obs.id).or_insert_with(|| Track {
                history: AgentHistory::new(capacity),
                last: *obs,
                last_frame: frame,
                heading: obs.heading.unwrap_or(0.0),
            });
            if previous.is_some() && Some(track.last_frame) != previous && track.last_frame != frame
            {
                track.history = AgentHistory::new(capacity);
            }
            track.history.push(frame, time, obs.position)?;
            track.last = *obs;
            track.last_frame = frame;
            track.heading = match obs.heading {
                Some(h) => h,
                None => track
                    .history
                    .heading(HEADING_SPEED_THRESHOLD)
                    .unwrap_or(track.heading),
            };
        }
        self.last_frame = Some(frame);
        self.time = time;
        Ok(())
    }

    /// Snapshot of the agents seen in the latest frame, with posteriors from `posterior`.
    pub fn world(
        &self,
        engine: &Engine,
        obstacles: &[ConvexPolygon],
        posterior: impl Fn(u64, &Observation) -> BehaviorPosterior,
    ) -> Result<WorldState> {
        let mut world = engine.world();
        world.obstacles = obstacles.to_vec();
        world.time = self.time;
        for (&id, t) in &self.tracks {
            if Some(t.last_frame) != self.last_frame {
                continue;
            }
            let velocity = t.history.velocity().unwrap_or(Vec2::ZERO);
            let agent = AgentState::new(
                id,
                t.last.agent_type,
                t.last.position,
                velocity,
                t.heading,
                t.last.footprint()?,
            )
            .with_history(t.history.clone())
            .with_posterior(posterior(id, &t.last));
            world.agents.push(agent);
        }
        Ok(world)
    }
}

/// Recursive Bayesian estimate of every observed agent's behavior.
pub struct BehaviorFilter<'e> {
    engine: &'e Engine,
    tracks: Tracks,
    posteriors: BTreeMap<u64, BehaviorPosterior>,
    obstacles: Vec<ConvexPolygon>,
    fixed: BTreeSet<u64>,
    updates: usize,
}

impl<'e> BehaviorFilter<'e> {
    pub fn new(engine: &'e Engine, obstacles: Vec<ConvexPolygon>) -> Self {
        BehaviorFilter {
            engine,
            tracks: Tracks::new(engine.config().t_hist),
            posteriors: BTreeMap::new(),
            obstacles,
            fixed: BTreeSet::new(),
            updates: 0,
        }
    }

    /// Filters over all frames of `dataset` in order.
    pub fn run(engine: &'e Engine, dataset: &TrajectoryDataset) -> Result<Self> {
        let mut f = BehaviorFilter::new(engine, dataset.obstacles.clone());
        for (frame, rows) in dataset.frames() {
            f.observe(frame, dataset.time_of(frame), rows)?;
        }
        Ok(f)
    }

    /// Filters over the given frames only, starting from uniform priors.
    pub fn run_frames(
        engine: &'e Engine,
        dataset: &TrajectoryDataset,
        frames: &[i64],
    ) -> Result<Self> {
        let mut f = BehaviorFilter::new(engine, dataset.obstacles.clone());
        for &frame in frames {
            let rows = dataset.frame(frame).unwrap_or(&[]);
            f.observe(frame, dataset.time_of(frame), rows)?;
        }
        Ok(f)
    }

    /// Treats agent `id` as having a known behavior; it is never updated.
    pub fn fix(&mut self, id: u64, behavior: BehaviorConstraints) {
        self.fixed.insert(id);
        self.posteriors
            .insert(id, BehaviorPosterior::known(behavior));
    }

    pub fn posterior(&self, id: u64) -> Option<&BehaviorPosterior> {
        self.posteriors.get(&id)
    }

    pub fn posteriors(&self) -> &BTreeMap<u64, BehaviorPosterior> {
        &self.posteriors
    }

    /// Number of Bayes updates applied so far, over all agents.
    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn tracks(&self) -> &Tracks {
        &self.tracks
    }

    /// Snapshot at the latest frame with the current posteriors.
    pub fn world(&self) -> Result<WorldState> {
        self.tracks.world(self.engine, &self.obstacles, |id, obs| {
            self.posteriors
                .get(&id)
                .cloned()
                .unwrap_or_else(|| self.engine.prior(obs.agent_type))
        })
    }

    /// Incorporates one frame: every agent seen in both this and the previous
    /// frame with enough history gets a Bayes update, computed against the
    /// previous snapshot; then the frame is appended.
    pub fn observe(&mut self, frame: i64, time: f64, rows: &[Observation]) -> Result<()> {
        if self.tracks.last_frame().is_some() {
            let world = self.world()?;
            let sigma = self.engine.config().sigma;
            let targets: Vec<(usize, Vec2)> = rows
                .iter()
                .filter_map(|obs| {
                    let idx = world.index_of(obs.id)?;
                    let agent = &world.agents[idx];
                    (!agent.is_static()
                        && agent.history.len() >= 2
                        && !self.fixed.contains(&obs.id))
                    .then_some((idx, obs.position))
                })
                .collect();
            let updates: Vec<(u64, Vec<f64>)> = targets
                .par_iter()
                .map(|&(idx, observed)| {
                    let predictions = candidate_predictions(self.engine, &world, idx)?;
                    let logs = predictions
                        .iter()
                        .map(|p| log_likelihood(observed, *p, sigma))
                        .collect();
                    Ok((world.agents[idx].id, logs))
                })
                .collect::<Result<_>>()?;
            for (id, logs) in updates {
                let agent_type = world.agent(id).expect("target is in snapshot").agent_type;
                self.posteriors
                    .entry(id)
                    .or_insert_with(|| self.engine.prior(agent_type))
                    .update_log(&logs);
                self.updates += 1;
            }
        }
        for obs in rows {
            if !self.posteriors.contains_key(&obs.id) {
                self.posteriors
                    .insert(obs.id, self.engine.prior(obs.agent_type));
            }
        }
        self.tracks.push_frame(frame, time, rows)
    }
}

/// One-step predicted position of agent `idx` under each of its posterior's
/// candidates. Candidates with the same intention, attended set and
/// (where it matters) responsibility share one solve.
pub fn candidate_predictions(engine: &Engine, world: &WorldState, idx: usize) -> Result<Vec<Vec2>> {
    let agent = &world.agents[idx];
    let candidates = agent.posterior.candidates();
    let ablation = engine.config().ablation;
    let reach = if ablation.infer_attention {
        candidates
            .iter()
            .map(|c| c.r_front.max(c.r_rear))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let neighbor_behavior = |j: usize| *world.agents[j].posterior.map();
    let prepared = engine.prepare(world, idx, &neighbor_behavior, reach)?;
    let mut cache: HashMap<(Intention, Vec<usize>, u64, u64), Vec2> = HashMap::new();
    candidates
        .iter()
        .map(|c| {
            let (attended, any_agent) = prepared.attended(c, !ablation.infer_attention);
            let responsive = any_agent && ablation.infer_responsibility;
            let intention = if ablation.infer_intention {
                c.intention
            } else {
                Intention::KeepVelocity
            };
            let key = (
                intention,
                attended,
                if responsive { c.c1.to_bits() } else { 0 },
                if responsive { c.c2.to_bits() } else { 0 },
            );
            if let Some(p) = cache.get(&key) {
                return Ok(*p);
            }
            let plan = engine.plan(agent, *c);
            let p = engine.solve_prepared(&prepared, &plan)?.position;
            cache.insert(key, p);
            Ok(p)
        })
        .collect()
}
