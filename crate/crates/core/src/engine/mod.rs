//! Per-agent velocity selection, multi-agent rollouts, behavior filtering and
//! forward simulation.

mod filter;
mod scenario;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::behavior::{
    in_attention, normalize_pair, reference_position, responsibility, AgentHistory,
    BehaviorConstraints, BehaviorPosterior, Intention, Reference,
};
use crate::config::EngineConfig;
use crate::error::{GammaError, Result};
use crate::geometry::{minkowski_difference, pairwise_correction, ConvexPolygon, HalfPlane, Vec2};
use crate::kinematics::{track_velocity, AgentType, KinematicModel, Pose, ProfileSet};
use crate::lp::VelocityProgram;
use crate::tolerance::HEADING_SPEED_THRESHOLD;

pub use filter::{BehaviorFilter, Tracks};
pub use scenario::{parse_scenario, simulate, Scenario, ScenarioAgent};

/// Sides of the polygons standing in for discs (bounding footprints).
const DISC_SIDES: usize = 16;
/// Sides of the holonomic speed polygon used when kinematics are ablated.
const SPEED_DISC_SIDES: usize = 72;
/// Obstacles closer than this multiple of the agent's circumradius are
/// always considered.
const OBSTACLE_EXEMPT_FACTOR: f64 = 1.5;

#[derive(Clone, Debug, PartialEq)]
pub struct AgentState {
    pub id: u64,
    pub agent_type: AgentType,
    pub position: Vec2,
    /// Current velocity, also the optimization velocity of the pairwise constraints.
    pub velocity: Vec2,
    pub heading: f64,
    /// Body-frame footprint (+x = heading).
    pub footprint: ConvexPolygon,
    pub history: AgentHistory,
    pub posterior: BehaviorPosterior,
}

impl AgentState {
    pub fn new(
        id: u64,
        agent_type: AgentType,
        position: Vec2,
        velocity: Vec2,
        heading: f64,
        footprint: ConvexPolygon,
    ) -> Self {
        AgentState {
            id,
            agent_type,
            position,
            velocity,
            heading,
            footprint,
            history: AgentHistory::new(8),
            posterior: BehaviorPosterior::known(BehaviorConstraints::default()),
        }
    }

    pub fn with_posterior(mut self, posterior: BehaviorPosterior) -> Self {
        self.posterior = posterior;
        self
    }

    pub fn with_history(mut self, history: AgentHistory) -> Self {
        self.history = history;
        self
    }

    pub fn world_footprint(&self) -> ConvexPolygon {
        self.footprint.placed(self.position, self.heading)
    }

    pub fn is_static(&self) -> bool {
        self.agent_type == AgentType::StaticObstacle
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub agents: Vec<AgentState>,
    /// World-frame static obstacles.
    pub obstacles: Vec<ConvexPolygon>,
    pub dt: f64,
    pub tau: f64,
    pub t_pred_steps: usize,
    /// Seconds.
    pub time: f64,
}

impl WorldState {
    pub fn new(config: &EngineConfig) -> Self {
        WorldState {
            agents: Vec::new(),
            obstacles: Vec::new(),
            dt: config.dt,
            tau: config.tau,
            t_pred_steps: config.t_pred_steps,
            time: 0.0,
        }
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.agents.iter().position(|a| a.id == id)
    }

    pub fn agent(&self, id: u64) -> Option<&AgentState> {
        self.agents.iter().find(|a| a.id == id)
    }
}

/// Behavior and frozen reference an agent follows during one computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentPlan {
    pub behavior: BehaviorConstraints,
    pub reference: Reference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    /// Velocity chosen by the program (committed velocity).
    pub velocity: Vec2,
    pub position: Vec2,
    pub heading: f64,
    pub preferred: Vec2,
    /// `false` when the avoidance constraints had to be relaxed.
    pub feasible: bool,
    /// Controller poses over the step, starting with the initial pose.
    pub trajectory: Vec<Pose>,
}

#[derive(Clone, Copy, Debug)]
enum Neighbor {
    Agent { alpha: f64 },
    Static,
    Obstacle { exempt: bool },
}

#[derive(Clone, Copy, Debug)]
struct Term {
    closest: Vec2,
    center_distance: f64,
    u: Vec2,
    normal: Vec2,
    neighbor: Neighbor,
}

/// Neighbor geometry of one agent against a snapshot, shared by every
/// behavior candidate evaluated for it.
#[derive(Clone, Debug)]
pub struct PreparedStep {
    position: Vec2,
    velocity: Vec2,
    heading: f64,
    movable: bool,
    model: Option<KinematicModel>,
    kinematic: Option<ConvexPolygon>,
    terms: Vec<Term>,
    dt: f64,
}

impl PreparedStep {
    /// Indices into this step's neighbor list attended under `behavior`,
    /// plus whether any of them is a responsive agent.
    fn attended(&self, behavior: &BehaviorConstraints, all: bool) -> (Vec<usize>, bool) {
        let mut idx = Vec::new();
        let mut any_agent = false;
        for (i, t) in self.terms.iter().enumerate() {
            let seen = all
                || matches!(t.neighbor, Neighbor::Obstacle { exempt: true })
                || in_attention(
                    self.position,
                    self.heading,
                    t.closest,
                    behavior.r_front,
                    behavior.r_rear,
                );
            if seen {
                any_agent |= matches!(t.neighbor, Neighbor::Agent { .. });
                idx.push(i);
            }
        }
        (idx, any_agent)
    }
}

pub struct Engine {
    config: EngineConfig,
    profiles: ProfileSet,
}

impl Engine {
    pub fn new(config: EngineConfig, profiles: ProfileSet) -> Result<Self> {
        config.validate()?;
        Ok(Engine { config, profiles })
    }

    /// Loads profiles from the configured path, or uses the built-in set.
    pub fn from_config(config: EngineConfig) -> Result<Self> {
        let profiles = match &config.profiles {
            Some(path) => ProfileSet::load(path)?,
            None => ProfileSet::builtin(),
        };
        Engine::new(config, profiles)
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn profiles(&self) -> &ProfileSet {
        &self.profiles
    }

    /// Empty world with this engine's time settings.
    pub fn world(&self) -> WorldState {
        WorldState::new(&self.config)
    }

    /// Behavior candidates for a type after ablation.
    pub fn candidates(&self, agent_type: AgentType) -> Vec<BehaviorConstraints> {
        self.config.effective_grid().candidates(agent_type)
    }

    /// Uniform prior over the type's candidates.
    pub fn prior(&self, agent_type: AgentType) -> BehaviorPosterior {
        if agent_type == AgentType::StaticObstacle {
            return BehaviorPosterior::known(BehaviorConstraints::default());
        }
        BehaviorPosterior::uniform(self.candidates(agent_type))
    }

    /// Controller model used for `agent_type`.
    pub fn model(&self, agent_type: AgentType) -> Result<KinematicModel> {
        let model = self.profiles.get(agent_type)?.model().clone();
        Ok(if self.config.ablation.use_kinematics {
            model
        } else {
            model.holonomic_equivalent()
        })
    }

    /// World-frame trackable set; `None` for static agents.
    pub fn trackable_set(&self, agent: &AgentState) -> Result<Option<ConvexPolygon>> {
        if agent.is_static() {
            return Ok(None);
        }
        let profile = self.profiles.get(agent.agent_type)?;
        if self.config.ablation.use_kinematics {
            Ok(Some(profile.world_trackable_set(agent.heading)))
        } else {
            let s = profile.model().max_speed();
            ConvexPolygon::regular(SPEED_DISC_SIDES, s, Vec2::ZERO, agent.heading).map(Some)
        }
    }

    /// World-frame footprint, replaced by a bounding disc when polygons are ablated.
    pub fn footprint(&self, agent: &AgentState) -> Result<ConvexPolygon> {
        if self.config.ablation.use_polygons {
            Ok(agent.world_footprint())
        } else {
            let r = agent.footprint.circumradius(Vec2::ZERO);
            ConvexPolygon::circumscribed_disc(DISC_SIDES, r, agent.position)
        }
    }

    /// Reference position for `behavior` from the agent's history, or from
    /// its current velocity when history is too short.
    pub fn plan(&self, agent: &AgentState, behavior: BehaviorConstraints) -> AgentPlan {
        let intention = if self.config.ablation.infer_intention {
            behavior.intention
        } else {
            Intention::KeepVelocity
        };
        let horizon = self.config.horizon();
        let reference = if agent.is_static() {
            None
        } else if agent.history.len() >= 2 {
            reference_position(&agent.history, intention, horizon)
        } else {
            Some(Reference {
                position: agent.position + agent.velocity * horizon,
                speed: agent.velocity.length(),
            })
        };
        AgentPlan {
            behavior,
            reference: reference.unwrap_or(Reference {
                position: agent.position,
                speed: 0.0,
            }),
        }
    }

    /// Plans from each agent's most probable behavior.
    pub fn map_plans(&self, world: &WorldState) -> Vec<AgentPlan> {
        world
            .agents
            .iter()
            .map(|a| self.plan(a, *a.posterior.map()))
            .collect()
    }

    /// Computes the neighbor geometry of agent `idx` against `world`.
    /// Neighbors whose nearest footprint point is further than `reach` are
    /// skipped (nearby obstacles are always kept).
    pub fn prepare(
        &self,
        world: &WorldState,
        idx: usize,
        neighbor_behavior: &(dyn Fn(usize) -> BehaviorConstraints + Sync),
        reach: f64,
    ) -> Result<PreparedStep> {
        let agent = world
            .agents
            .get(idx)
            .ok_or(GammaError::InvalidArgument(format!(
                "agent index {idx} out of range"
            )))?;
        let movable = !agent.is_static();
        let mut prepared = PreparedStep {
            position: agent.position,
            velocity: if movable { agent.velocity } else { Vec2::ZERO },
            heading: agent.heading,
            movable,
            model: None,
            kinematic: None,
            terms: Vec::new(),
            dt: world.dt,
        };
        if !movable {
            return Ok(prepared);
        }
        prepared.model = Some(self.model(agent.agent_type)?);
        prepared.kinematic = self.trackable_set(agent)?;
        let own = self.footprint(agent)?;
        let exempt_radius = OBSTACLE_EXEMPT_FACTOR * own.circumradius(agent.position);
        let v_a = prepared.velocity;

        for (j, other) in world.agents.iter().enumerate() {
            if j == idx {
                continue;
            }
            let shape = self.footprint(other)?;
            let closest = shape.closest_point(agent.position);
            if closest.distance(agent.position) > reach {
                continue;
            }
            let center_distance = other.position.distance(agent.position);
            let (v_b, neighbor) = if other.is_static() {
                (Vec2::ZERO, Neighbor::Static)
            } else {
                let b = neighbor_behavior(j);
                (
                    other.velocity,
                    Neighbor::Agent {
                        alpha: responsibility(center_distance, b.c1, b.c2),
                    },
                )
            };
            let rel = minkowski_difference(&shape, &own)?;
            let (u, normal) = pairwise_correction(&rel, v_a, v_b, world.tau, world.dt)?;
            prepared.terms.push(Term {
                closest,
                center_distance,
                u,
                normal,
                neighbor,
            });
        }
        for obstacle in &world.obstacles {
            let closest = obstacle.closest_point(agent.position);
            let d = if obstacle.contains(agent.position, 0.0) {
                0.0
            } else {
                closest.distance(agent.position)
            };
            let exempt = d <= exempt_radius;
            if d > reach && !exempt {
                continue;
            }
            let rel = minkowski_difference(obstacle, &own)?;
            let (u, normal) = pairwise_correction(&rel, v_a, Vec2::ZERO, world.tau, world.dt)?;
            prepared.terms.push(Term {
                closest,
                center_distance: obstacle.centroid().distance(agent.position),
                u,
                normal,
                neighbor: Neighbor::Obstacle { exempt },
            });
        }
        prepared
            .terms
            .sort_by(|a, b| a.center_distance.total_cmp(&b.center_distance));
        Ok(prepared)
    }

    /// Solves the velocity program for a prepared agent under `plan` and
    /// tracks the result for one step.
    pub fn solve_prepared(&self, prepared: &PreparedStep, plan: &AgentPlan) -> Result<StepResult> {
        let start = Pose::new(
            prepared.position,
            prepared.heading,
            prepared.velocity.length(),
        );
        if !prepared.movable {
            return Ok(StepResult {
                velocity: Vec2::ZERO,
                position: prepared.position,
                heading: prepared.heading,
                preferred: Vec2::ZERO,
                feasible: true,
                trajectory: vec![start],
            });
        }
        let ablation = &self.config.ablation;
        let preferred = plan
            .reference
            .preferred_velocity(prepared.position, prepared.dt);
        let (attended, _) = prepared.attended(&plan.behavior, !ablation.infer_attention);
        let mut planes = Vec::with_capacity(attended.len());
        for &i in &attended {
            let t = &prepared.terms[i];
            let alpha = match t.neighbor {
                Neighbor::Agent { alpha: alpha_b } => {
                    if ablation.infer_responsibility {
                        let alpha_a = plan.behavior.responsibility(t.center_distance);
                        normalize_pair(alpha_a, alpha_b).0
                    } else {
                        0.5
                    }
                }
                Neighbor::Static | Neighbor::Obstacle { .. } => 1.0,
            };
            planes.push(HalfPlane::new(prepared.velocity + t.u * alpha, t.normal)?);
        }
        let kinematic = prepared
            .kinematic
            .clone()
            .ok_or(GammaError::EmptyKinematicSet)?;
        let solution = VelocityProgram::new(preferred, planes, kinematic).solve()?;
        let v = solution.velocity;
        let model = prepared
            .model
            .as_ref()
            .expect("movable agents have a model");
        let (position, heading, trajectory) = match model {
            KinematicModel::Holonomic {
                max_accel: None, ..
            } => {
                let end = prepared.position + v * prepared.dt;
                let heading = if v.length() > HEADING_SPEED_THRESHOLD {
                    v.angle()
                } else {
                    prepared.heading
                };
                (
                    end,
                    heading,
                    vec![start, Pose::new(end, heading, v.length())],
                )
            }
            _ => {
                let r = track_velocity(model, start, v, prepared.dt, self.config.control_dt);
                let heading = if model.is_holonomic() {
                    if v.length() > HEADING_SPEED_THRESHOLD {
                        v.angle()
                    } else {
                        prepared.heading
                    }
                } else {
                    r.final_pose.heading
                };
                (r.final_pose.position, heading, r.trajectory)
            }
        };
        Ok(StepResult {
            velocity: v,
            position,
            heading,
            preferred,
            feasible: solution.feasible,
            trajectory,
        })
    }

    /// One step of agent `idx` against the snapshot `world`. Neighbors'
    /// responsibilities come from `neighbor_behavior`.
    pub fn step_agent(
        &self,
        world: &WorldState,
        idx: usize,
        plan: &AgentPlan,
        neighbor_behavior: &(dyn Fn(usize) -> BehaviorConstraints + Sync),
    ) -> Result<StepResult> {
        let reach = if self.config.ablation.infer_attention {
            plan.behavior.r_front.max(plan.behavior.r_rear)
        } else {
            f64::INFINITY
        };
        let prepared = self.prepare(world, idx, neighbor_behavior, reach)?;
        self.solve_prepared(&prepared, plan)
    }

    /// Steps every agent against the same snapshot.
    pub fn step_world(&self, world: &WorldState, plans: &[AgentPlan]) -> Result<Vec<StepResult>> {
        if plans.len() != world.agents.len() {
            return Err(GammaError::InvalidArgument(format!(
                "{} plans for {} agents",
                plans.len(),
                world.agents.len()
            )));
        }
        let behavior = |j: usize| plans[j].behavior;
        (0..world.agents.len())
            .into_par_iter()
            .map(|i| self.step_agent(world, i, &plans[i], &behavior))
            .collect()
    }

    /// Rolls all agents forward `steps` times with frozen plans and
    /// simultaneous commits. Returns positions per agent, index aligned with
    /// `world.agents`.
    pub fn rollout(
        &self,
        world: &WorldState,
        plans: &[AgentPlan],
        steps: usize,
    ) -> Result<Vec<Vec<Vec2>>> {
        let mut state = world.clone();
        let mut out = vec![Vec::with_capacity(steps); state.agents.len()];
        for _ in 0..steps {
            let results = self.step_world(&state, plans)?;
            for ((agent, r), track) in state.agents.iter_mut().zip(results).zip(out.iter_mut()) {
                agent.position = r.position;
                agent.velocity = r.velocity;
                agent.heading = r.heading;
                track.push(r.position);
            }
            state.time += state.dt;
        }
        Ok(out)
    }

    /// Predicts `steps` positions for every agent from its MAP behavior.
    pub fn predict(&self, world: &WorldState, steps: usize) -> Result<BTreeMap<u64, Vec<Vec2>>> {
        let plans = self.map_plans(world);
        let tracks = self.rollout(world, &plans, steps)?;
        Ok(world.agents.iter().map(|a| a.id).zip(tracks).collect())
    }
}
