//! Kinematic models, low-level tracking controllers and the offline estimate
//! of each agent type's kinematically trackable velocity set.

mod controller;
mod profile_io;
mod trackable;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{GammaError, Result};
use crate::geometry::{ConvexPolygon, Vec2};

pub use controller::{track_velocity, Pose, TrackingResult};
pub use profile_io::{load_profiles, parse_profiles, parse_specs, save_profiles, write_profiles};
pub use trackable::{estimate_trackable_set, DiscretizationGrid, ESTIMATION_DT};

/// Traffic-agent category. Agents of one type share kinematics and controller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentType {
    Pedestrian,
    Bicycle,
    Motorbike,
    Car,
    Van,
    Bus,
    GyroScooter,
    Truck,
    StaticObstacle,
}

impl AgentType {
    pub const ALL: [AgentType; 9] = [
        AgentType::Pedestrian,
        AgentType::Bicycle,
        AgentType::Motorbike,
        AgentType::Car,
        AgentType::Van,
        AgentType::Bus,
        AgentType::GyroScooter,
        AgentType::Truck,
        AgentType::StaticObstacle,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            AgentType::Pedestrian => "pedestrian",
            AgentType::Bicycle => "bicycle",
            AgentType::Motorbike => "motorbike",
            AgentType::Car => "car",
            AgentType::Van => "van",
            AgentType::Bus => "bus",
            AgentType::GyroScooter => "gyro_scooter",
            AgentType::Truck => "truck",
            AgentType::StaticObstacle => "static_obstacle",
        }
    }

    /// Pedestrians use their own responsibility candidates; everything else
    /// uses the vehicle set.
    pub fn is_pedestrian(self) -> bool {
        self == AgentType::Pedestrian
    }

    /// Footprint used when a dataset gives no dimensions (length, width in m).
    pub fn default_dimensions(self) -> (f64, f64) {
        match self {
            AgentType::Pedestrian => (0.4, 0.4),
            AgentType::Bicycle => (1.8, 0.6),
            AgentType::Motorbike => (2.0, 0.8),
            AgentType::Car => (4.5, 1.8),
            AgentType::Van => (5.0, 2.0),
            AgentType::Bus => (12.0, 2.5),
            AgentType::GyroScooter => (0.8, 0.6),
            AgentType::Truck => (10.0, 2.5),
            AgentType::StaticObstacle => (1.0, 1.0),
        }
    }
}

impl fmt::Display for AgentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for AgentType {
    type Err = GammaError;

    fn from_str(s: &str) -> Result<Self> {
        AgentType::ALL
            .iter()
            .copied()
            .find(|t| t.tag() == s)
            .ok_or_else(|| GammaError::UnknownAgentType {
                tag: s.to_string(),
                valid: AgentType::ALL.map(AgentType::tag).join(", "),
            })
    }
}

/// Kinematics plus the parameters of the type's low-level controller.
#[derive(Clone, Debug, PartialEq)]
pub enum KinematicModel {
    /// Moves in any direction. `max_accel = None` tracks any target instantly.
    Holonomic {
        max_speed: f64,
        max_accel: Option<f64>,
    },
    /// Kinematic bicycle (rear-axle reference) driven by pure pursuit.
    CarLike {
        wheelbase: f64,
        max_steer: f64,
        max_speed: f64,
        max_accel: f64,
    },
}

impl KinematicModel {
    pub fn max_speed(&self) -> f64 {
        match *self {
            KinematicModel::Holonomic { max_speed, .. } => max_speed,
            KinematicModel::CarLike { max_speed, .. } => max_speed,
        }
    }

    pub fn is_holonomic(&self) -> bool {
        matches!(self, KinematicModel::Holonomic { .. })
    }

    /// Holonomic model with the same speed limit.
    pub fn holonomic_equivalent(&self) -> KinematicModel {
        KinematicModel::Holonomic {
            max_speed: self.max_speed(),
            max_accel: None,
        }
    }

    /// Largest path curvature the model can realize (1/m).
    pub fn max_curvature(&self) -> f64 {
        match *self {
            KinematicModel::Holonomic { .. } => f64::INFINITY,
            KinematicModel::CarLike {
                wheelbase,
                max_steer,
                ..
            } => max_steer.tan() / wheelbase,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            KinematicModel::Holonomic {
                max_speed,
                max_accel,
            } => max_speed >= 0.0 && max_accel.is_none_or(|a| a > 0.0),
            KinematicModel::CarLike {
                wheelbase,
                max_steer,
                max_speed,
                max_accel,
            } => {
                wheelbase > 0.0
                    && max_steer > 0.0
                    && max_steer < std::f64::consts::FRAC_PI_2
                    && max_speed >= 0.0
                    && max_accel > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(GammaError::InvalidArgument(format!(
                "invalid kinematic model parameters: {self:?}"
            )))
        }
    }
}

/// Everything about a type except its trackable set.
#[derive(Clone, Debug, PartialEq)]
pub struct KinematicSpec {
    pub agent_type: AgentType,
    pub model: KinematicModel,
    /// Maximum tolerated tracking error (m).
    pub epsilon_max: f64,
    /// Tracking horizon (s).
    pub tau: f64,
    /// Optional grid override used by offline estimation.
    pub grid: Option<DiscretizationGrid>,
}

impl KinematicSpec {
    pub fn new(
        agent_type: AgentType,
        model: KinematicModel,
        epsilon_max: f64,
        tau: f64,
    ) -> Result<Self> {
        model.validate()?;
        if !(epsilon_max >= 0.0 && tau > 0.0) {
            return Err(GammaError::InvalidArgument(format!(
                "epsilon_max must be >= 0 and tau > 0, got {epsilon_max}, {tau}"
            )));
        }
        Ok(KinematicSpec {
            agent_type,
            model,
            epsilon_max,
            tau,
            grid: None,
        })
    }

    pub fn grid(&self) -> DiscretizationGrid {
        self.grid
            .clone()
            .unwrap_or_else(|| DiscretizationGrid::default_for(&self.model))
    }
}

/// A type's kinematics with its estimated trackable set `K̂` in the body
/// frame (+x = heading).
#[derive(Clone, Debug, PartialEq)]
pub struct KinematicProfile {
    pub spec: KinematicSpec,
    pub trackable_set: ConvexPolygon,
}

impl KinematicProfile {
    pub fn agent_type(&self) -> AgentType {
        self.spec.agent_type
    }

    pub fn model(&self) -> &KinematicModel {
        &self.spec.model
    }

    /// Estimates the trackable set for `spec` with its grid.
    pub fn estimate(spec: KinematicSpec) -> Result<Self> {
        let grid = spec.grid();
        let trackable_set = estimate_trackable_set(&spec, &grid)?;
        Ok(KinematicProfile {
            spec,
            trackable_set,
        })
    }

    /// Trackable set rotated into the world frame for the given heading.
    pub fn world_trackable_set(&self, heading: f64) -> ConvexPolygon {
        self.trackable_set.rotated(heading)
    }
}

/// Profiles keyed by agent type.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProfileSet {
    profiles: BTreeMap<AgentType, KinematicProfile>,
}

const BUILTIN_PROFILES: &str = include_str!("../../data/default_profiles.txt");
const BUILTIN_SPECS: &str = include_str!("../../data/default_specs.txt");

impl ProfileSet {
    pub fn new() -> Self {
        ProfileSet::default()
    }

    /// Profiles shipped with the crate (`data/default_profiles.txt`).
    pub fn builtin() -> Self {
        parse_profiles(BUILTIN_PROFILES).expect("embedded profile file is valid")
    }

    /// Specs the built-in profiles were estimated from.
    pub fn builtin_specs() -> Vec<KinematicSpec> {
        parse_specs(BUILTIN_SPECS).expect("embedded spec file is valid")
    }

    pub fn insert(&mut self, profile: KinematicProfile) {
        self.profiles.insert(profile.agent_type(), profile);
    }

    pub fn get(&self, agent_type: AgentType) -> Result<&KinematicProfile> {
        self.profiles
            .get(&agent_type)
            .ok_or(GammaError::MissingProfile(agent_type))
    }

    pub fn iter(&self) -> impl Iterator<Item = &KinematicProfile> {
        self.profiles.values()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        load_profiles(path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        save_profiles(self, path)
    }
}

impl FromIterator<KinematicProfile> for ProfileSet {
    fn from_iter<I: IntoIterator<Item = KinematicProfile>>(iter: I) -> Self {
        let mut set = ProfileSet::new();
        for p in iter {
            set.insert(p);
        }
        set
    }
}

/// `true` when `v` (body frame) lies in the profile's trackable set.
pub fn is_trackable(profile: &KinematicProfile, v: Vec2, tol: f64) -> bool {
    profile.trackable_set.contains(v, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agent_type_tags_round_trip() {
        for t in AgentType::ALL {
            assert_eq!(t.tag().parse::<AgentType>().unwrap(), t);
        }
        let err = "tram".parse::<AgentType>().unwrap_err().to_string();
        assert!(err.contains("pedestrian") && err.contains("truck"));
    }

    #[test]
    fn builtin_profiles_cover_moving_types() {
        let set = ProfileSet::builtin();
        let ped = set.get(AgentType::Pedestrian).unwrap();
        assert_eq!(ped.model().max_speed(), 1.8);
        match set.get(AgentType::Car).unwrap().model() {
            KinematicModel::CarLike { wheelbase, .. } => assert_eq!(*wheelbase, 2.5),
            other => panic!("car should be car-like, got {other:?}"),
        }
        assert!(set.get(AgentType::StaticObstacle).is_err());
        for p in set.iter() {
            assert!(p.trackable_set.contains(Vec2::ZERO, 1e-9));
        }
    }
}
