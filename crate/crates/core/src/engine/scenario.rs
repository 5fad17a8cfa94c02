//! Scenario files and the forward simulator.
//!
//! ```text
//! noise = 0.05
//! seed = 7
//! obstacle 4 -1, 6 -1, 6 1, 4 1
//! agent id=1 type=pedestrian x=0 y=0 heading=0 speed=1.2 intention=keep_velocity r_front=4 r_rear=2 c1=0 c2=0.5
//! agent id=2 type=car x=-10 y=3 speed=5 length=4.5 width=1.8
//! ```
//!
//! Agent keys other than `id`, `type`, `x` and `y` are optional. Behavior
//! keys default to `keep_velocity`, 4, 2, 0, 0.5; dimensions default to the
//! type's nominal footprint.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::behavior::{BehaviorConstraints, BehaviorPosterior};
use crate::dataset::{Observation, TrajectoryDataset};
use crate::error::{GammaError, Result};
use crate::geometry::{ConvexPolygon, Vec2};
use crate::kinematics::AgentType;

use super::{Engine, Tracks};

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioAgent {
    pub id: u64,
    pub agent_type: AgentType,
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub behavior: BehaviorConstraints,
    pub dims: (f64, f64),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scenario {
    pub agents: Vec<ScenarioAgent>,
    pub obstacles: Vec<ConvexPolygon>,
    /// Standard deviation of the position noise (m).
    pub noise: f64,
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| GammaError::io(path, e))?;
        parse_scenario(&text).map_err(|e| e.with_path(path))
    }
}

fn value<T: std::str::FromStr>(key: &str, text: &str, line: usize) -> Result<T> {
    text.parse::<T>()
        .map_err(|_| GammaError::parse(line, format!("'{key}' has invalid value '{text}'")))
}

fn finite(key: &str, text: &str, line: usize) -> Result<f64> {
    let v: f64 = value(key, text, line)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GammaError::parse(line, format!("'{key}' must be finite")))
    }
}

fn parse_agent(rest: &str, line: usize) -> Result<ScenarioAgent> {
    let mut id = None;
    let mut agent_type = None;
    let mut x = None;
    let mut y = None;
    let mut heading = 0.0;
    let mut speed = 0.0;
    let mut behavior = BehaviorConstraints::default();
    let mut length = None;
    let mut width = None;
    for pair in rest.split_whitespace() {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| GammaError::parse(line, format!("expected key=value, got '{pair}'")))?;
        match k {
            "id" => id = Some(value::<u64>(k, v, line)?),
            "type" => {
                agent_type = Some(
                    v.parse::<AgentType>()
                        .map_err(|e| GammaError::parse(line, e.to_string()))?,
                )
            }
            "x" => x = Some(finite(k, v, line)?),
            "y" => y = Some(finite(k, v, line)?),
            "heading" => heading = finite(k, v, line)?,
            "speed" => speed = finite(k, v, line)?,
            "intention" => {
                behavior.intention = v
                    .parse()
                    .map_err(|e: GammaError| GammaError::parse(line, e.to_string()))?
            }
            "r_front" => behavior.r_front = value(k, v, line)?,
            "r_rear" => behavior.r_rear = value(k, v, line)?,
            "c1" => behavior.c1 = finite(k, v, line)?,
            "c2" => behavior.c2 = finite(k, v, line)?,
            "length" => length = Some(finite(k, v, line)?),
            "width" => width = Some(finite(k, v, line)?),
            _ => return Err(GammaError::parse(line, format!("unknown agent key '{k}'"))),
        }
    }
    let missing = |name: &str| GammaError::parse(line, format!("agent is missing '{name}'"));
    let agent_type = agent_type.ok_or_else(|| missing("type"))?;
    behavior
        .validate()
        .map_err(|e| GammaError::parse(line, e.to_string()))?;
    let (dl, dw) = agent_type.default_dimensions();
    let dims = (length.unwrap_or(dl), width.unwrap_or(dw));
    if !(dims.0 > 0.0 && dims.1 > 0.0) {
        return Err(GammaError::parse(line, "length and width must be positive"));
    }
    Ok(ScenarioAgent {
        id: id.ok_or_else(|| missing("id"))?,
        agent_type,
        position: Vec2::new(
            x.ok_or_else(|| missing("x"))?,
            y.ok_or_else(|| missing("y"))?,
        ),
        heading,
        speed,
        behavior,
        dims,
    })
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut scenario = Scenario::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.split('#').next().unwrap_or("").trim();
        if row.is_empty() {
            continue;
        }
        if let Some(rest) = row.strip_prefix("agent ") {
            let agent = parse_agent(rest, line)?;
            if scenario.agents.iter().any(|a| a.id == agent.id) {
                return Err(GammaError::parse(
                    line,
                    format!("duplicate agent id {}", agent.id),
                ));
            }
            scenario.agents.push(agent);
        } else if let Some(rest) = row.strip_prefix("obstacle ") {
            let vertices = rest
                .split(',')
                .map(|pt| {
                    let c: Vec<&str> = pt.split_whitespace().collect();
                    match c.as_slice() {
                        [x, y] => Ok(Vec2::new(finite("x", x, line)?, finite("y", y, line)?)),
                        _ => Err(GammaError::parse(
                            line,
                            format!("expected 'x y' vertex, got '{}'", pt.trim()),
                        )),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let poly =
                ConvexPolygon::new(vertices).map_err(|e| GammaError::parse(line, e.to_string()))?;
            scenario.obstacles.push(poly);
        } else if let Some((k, v)) = row.split_once('=') {
            let (k, v) = (k.trim(), v.trim());
            match k {
                "noise" => {
                    scenario.noise = finite(k, v, line)?;
                    if scenario.noise < 0.0 {
                        return Err(GammaError::parse(line, "noise must be >= 0"));
                    }
                }
                "seed" => scenario.seed = Some(value(k, v, line)?),
                _ => {
                    return Err(GammaError::parse(
                        line,
                        format!("unknown scenario key '{k}'"),
                    ))
                }
            }
        } else {
            return Err(GammaError::parse(
                line,
                format!("unrecognized line '{row}'"),
            ));
        }
    }
    Ok(scenario)
}

/// Simulates `n_steps` steps after the initial frame. Frame 1 follows the
/// agents' initial velocities; from frame 2 on every agent moves by one
/// engine step under its assigned behavior, computed from the snapshot of
/// the frames emitted so far, and each emitted position receives Gaussian
/// noise drawn from a generator seeded with `seed`.
pub fn simulate(
    engine: &Engine,
    scenario: &Scenario,
    n_steps: usize,
    seed: u64,
) -> Result<TrajectoryDataset> {
    let dt = engine.config().dt;
    let mut dataset = TrajectoryDataset::new(dt);
    dataset.obstacles = scenario.obstacles.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, scenario.noise)
        .map_err(|e| GammaError::InvalidArgument(format!("noise: {e}")))?;
    let mut jitter = |p: Vec2| {
        if scenario.noise > 0.0 {
            let dx = noise.sample(&mut rng);
            let dy = noise.sample(&mut rng);
            p + Vec2::new(dx, dy)
        } else {
            p
        }
    };
    let obs = |a: &ScenarioAgent, position: Vec2, heading: f64| Observation {
        id: a.id,
        agent_type: a.agent_type,
        position,
        heading: Some(heading),
        dims: Some(a.dims),
    };
    let behaviors: std::collections::BTreeMap<u64, BehaviorConstraints> =
        scenario.agents.iter().map(|a| (a.id, a.behavior)).collect();

    let mut tracks = Tracks::new(engine.config().t_hist);
    let mut frames: Vec<Vec<Observation>> = Vec::new();
    let first: Vec<Observation> = scenario
        .agents
        .iter()
        .map(|a| obs(a, jitter(a.position), a.heading))
        .collect();
    frames.push(first);
    if n_steps >= 1 {
        let second: Vec<Observation> = scenario
            .agents
            .iter()
            .map(|a| {
                let moving = a.agent_type != AgentType::StaticObstacle;
                let v = if moving {
                    Vec2::from_angle(a.heading) * a.speed
                } else {
                    Vec2::ZERO
                };
                obs(a, jitter(a.position + v * dt), a.heading)
            })
            .collect();
        frames.push(second);
    }
    for (k, rows) in frames.iter().enumerate() {
        tracks.push_frame(k as i64, k as f64 * dt, rows)?;
    }
    for k in 2..=n_steps {
        let world = tracks.world(engine, &scenario.obstacles, |id, _| {
            BehaviorPosterior::known(behaviors[&id])
        })?;
        let plans: Vec<_> = world
            .agents
            .iter()
            .map(|a| engine.plan(a, behaviors[&a.id]))
            .collect();
        let results = engine.step_world(&world, &plans)?;
        let rows: Vec<Observation> = scenario
            .agents
            .iter()
            .zip(&results)
            .map(|(a, r)| {
                let p = if a.agent_type == AgentType::StaticObstacle {
                    r.position
                } else {
                    jitter(r.position)
                };
                obs(a, p, r.heading)
            })
            .collect();
        tracks.push_frame(k as i64, k as f64 * dt, &rows)?;
        frames.push(rows);
    }
    for (k, rows) in frames.into_iter().enumerate() {
        dataset.touch_frame(k as i64);
        for o in rows {
            dataset.insert(k as i64, o)?;
        }
    }
    Ok(dataset)
}
