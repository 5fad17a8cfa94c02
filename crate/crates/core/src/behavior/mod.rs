//! Hidden behavioral constraints: intention, attention radii and
//! responsibility, with a discrete Bayesian posterior over them.

mod attention;
mod history;
mod posterior;

use std::fmt;
use std::str::FromStr;

use crate::error::{GammaError, Result};
use crate::geometry::Vec2;
use crate::kinematics::AgentType;

pub use attention::{attention_set, in_attention};
pub use history::{AgentHistory, HistorySample};
pub use posterior::BehaviorPosterior;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Intention {
    KeepVelocity,
    KeepAcceleration,
}

impl Intention {
    pub const ALL: [Intention; 2] = [Intention::KeepVelocity, Intention::KeepAcceleration];

    pub fn tag(self) -> &'static str {
        match self {
            Intention::KeepVelocity => "keep_velocity",
            Intention::KeepAcceleration => "keep_acceleration",
        }
    }
}

impl fmt::Display for Intention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Intention {
    type Err = GammaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keep_velocity" | "velocity" | "kv" => Ok(Intention::KeepVelocity),
            "keep_acceleration" | "acceleration" | "ka" => Ok(Intention::KeepAcceleration),
            _ => Err(GammaError::InvalidArgument(format!(
                "unknown intention '{s}' (expected keep_velocity or keep_acceleration)"
            ))),
        }
    }
}

/// One behavior hypothesis `(intention, r_front, r_rear, C1, C2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BehaviorConstraints {
    pub intention: Intention,
    /// Attention radius ahead of the agent (m).
    pub r_front: f64,
    /// Attention radius behind the agent (m).
    pub r_rear: f64,
    /// Responsibility slope (1/m).
    pub c1: f64,
    /// Responsibility at zero distance.
    pub c2: f64,
}

impl BehaviorConstraints {
    pub fn new(intention: Intention, r_front: f64, r_rear: f64, c1: f64, c2: f64) -> Result<Self> {
        let b = BehaviorConstraints {
            intention,
            r_front,
            r_rear,
            c1,
            c2,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_rear >= 0.0 && self.r_rear <= self.r_front) {
            return Err(GammaError::InvalidArgument(format!(
                "attention radii need 0 <= r_rear <= r_front, got r_front {} r_rear {}",
                self.r_front, self.r_rear
            )));
        }
        if !((0.0..=1.0).contains(&self.c2) && self.c1.is_finite()) {
            return Err(GammaError::InvalidArgument(format!(
                "responsibility needs finite C1 and C2 in [0, 1], got C1 {} C2 {}",
                self.c1, self.c2
            )));
        }
        Ok(())
    }

    /// Responsibility at center distance `d`.
    pub fn responsibility(&self, d: f64) -> f64 {
        responsibility(d, self.c1, self.c2)
    }
}

impl Default for BehaviorConstraints {
    fn default() -> Self {
        BehaviorConstraints {
            intention: Intention::KeepVelocity,
            r_front: 4.0,
            r_rear: 2.0,
            c1: 0.0,
            c2: 0.5,
        }
    }
}

impl fmt::Display for BehaviorConstraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} r_front={} r_rear={} c1={} c2={}",
            self.intention, self.r_front, self.r_rear, self.c1, self.c2
        )
    }
}

/// `clamp(C1·d + C2, 0, 1)`.
pub fn responsibility(d: f64, c1: f64, c2: f64) -> f64 {
    (c1 * d + c2).clamp(0.0, 1.0)
}

/// Scales a responsibility pair to sum to one; `(0.5, 0.5)` when both are 0.
pub fn normalize_pair(a: f64, b: f64) -> (f64, f64) {
    let sum = a + b;
    if sum > 0.0 {
        (a / sum, b / sum)
    } else {
        (0.5, 0.5)
    }
}

/// Normal density of the distance between an observation and a prediction.
pub fn likelihood(observed: Vec2, predicted: Vec2, sigma: f64) -> f64 {
    log_likelihood(observed, predicted, sigma).exp()
}

pub fn log_likelihood(observed: Vec2, predicted: Vec2, sigma: f64) -> f64 {
    let e = observed.distance(predicted);
    -0.5 * (e / sigma).powi(2) - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Reference position the agent drives toward and the speed it keeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reference {
    pub position: Vec2,
    pub speed: f64,
}

impl Reference {
    /// Direction to the reference at the kept speed, slowed so it is not
    /// overshot within `dt`.
    pub fn preferred_velocity(&self, from: Vec2, dt: f64) -> Vec2 {
        let offset = self.position - from;
        let dist = offset.length();
        match offset.normalized() {
            Some(dir) if dist > 1e-12 => dir * self.speed.min(dist / dt),
            _ => Vec2::ZERO,
        }
    }
}

/// Reference position `p + vT` or `p + vT + aT²/2` from the latest history.
/// KeepAcceleration falls back to KeepVelocity with fewer than three
/// samples. `None` with fewer than two samples.
pub fn reference_position(
    history: &AgentHistory,
    intention: Intention,
    horizon: f64,
) -> Option<Reference> {
    let p = history.last()?.position;
    let v = history.velocity()?;
    let mut target = p + v * horizon;
    if intention == Intention::KeepAcceleration {
        if let Some(a) = history.acceleration() {
            target += a * (0.5 * horizon * horizon);
        }
    }
    Some(Reference {
        position: target,
        speed: v.length(),
    })
}

/// Unit direction to the reference position scaled by the current speed.
pub fn preferred_velocity(history: &AgentHistory, intention: Intention, horizon: f64) -> Vec2 {
    let Some(reference) = reference_position(history, intention, horizon) else {
        return Vec2::ZERO;
    };
    let p = history.last().expect("reference implies a sample").position;
    match (reference.position - p).normalized() {
        Some(dir) => dir * reference.speed,
        None => Vec2::ZERO,
    }
}

/// Factor grids whose Cartesian product forms the candidate set.
#[derive(Clone, Debug, PartialEq)]
pub struct BehaviorGrid {
    pub intentions: Vec<Intention>,
    pub r_front: Vec<f64>,
    pub r_rear: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2_pedestrian: Vec<f64>,
    pub c2_vehicle: Vec<f64>,
}

impl Default for BehaviorGrid {
    fn default() -> Self {
        BehaviorGrid {
            intentions: Intention::ALL.to_vec(),
            r_front: vec![2.0, 4.0, 8.0],
            r_rear: vec![1.0, 2.0],
            c1: vec![-0.05, 0.0, 0.05],
            c2_pedestrian: vec![0.5, 0.7],
            c2_vehicle: vec![0.3, 0.5],
        }
    }
}

impl BehaviorGrid {
    /// Candidates for `agent_type`, intention varying slowest and C2 fastest.
    /// Radius pairs with `r_rear > r_front` are skipped.
    pub fn candidates(&self, agent_type: AgentType) -> Vec<BehaviorConstraints> {
        let c2s = if agent_type.is_pedestrian() {
            &self.c2_pedestrian
        } else {
            &self.c2_vehicle
        };
        let mut out = Vec::new();
        for &intention in &self.intentions {
            for &r_front in &self.r_front {
                for &r_rear in &self.r_rear {
                    if r_rear > r_front {
                        continue;
                    }
                    for &c1 in &self.c1 {
                        for &c2 in c2s {
                            out.push(BehaviorConstraints {
                                intention,
                                r_front,
                                r_rear,
                                c1,
                                c2,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let lists: [(&str, usize); 6] = [
            ("intentions", self.intentions.len()),
            ("r_front", self.r_front.len()),
            ("r_rear", self.r_rear.len()),
            ("c1", self.c1.len()),
            ("c2_pedestrian", self.c2_pedestrian.len()),
            ("c2_vehicle", self.c2_vehicle.len()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, n)| *n == 0) {
            return Err(GammaError::InvalidArgument(format!(
                "candidate grid '{name}' is empty"
            )));
        }
        for c in self
            .candidates(AgentType::Pedestrian)
            .iter()
            .chain(&self.candidates(AgentType::Car))
        {
            c.validate()?;
        }
        if self.candidates(AgentType::Pedestrian).is_empty() {
            return Err(GammaError::InvalidArgument(
                "candidate grid has no radius pair with r_rear <= r_front".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn responsibility_clamps() {
        assert_eq!(responsibility(3.0, 0.0, 0.7), 0.7);
        assert_eq!(responsibility(100.0, 0.05, 0.5), 1.0);
        assert_eq!(responsibility(100.0, -0.05, 0.5), 0.0);
        assert!((responsibility(2.0, 0.05, 0.5) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn pair_normalization() {
        let (a, b) = normalize_pair(0.3, 0.9);
        assert!((a - 0.25).abs() < 1e-15 && (b - 0.75).abs() < 1e-15);
        assert_eq!(normalize_pair(0.0, 0.0), (0.5, 0.5));
        assert_eq!(normalize_pair(0.4, 0.0), (1.0, 0.0));
    }

    #[test]
    fn density_mode_and_one_sigma() {
        let sigma = 0.1;
        let mode = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        assert!((likelihood(Vec2::ZERO, Vec2::ZERO, sigma) - mode).abs() < 1e-10);
        let one = likelihood(Vec2::new(0.0, sigma), Vec2::ZERO, sigma);
        assert!((one - mode * (-0.5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn default_grid_has_72_candidates() {
        let grid = BehaviorGrid::default();
        let peds = grid.candidates(AgentType::Pedestrian);
        assert_eq!(peds.len(), 72);
        assert!(peds.iter().all(|c| c.r_rear <= c.r_front));
        assert!(grid.candidates(AgentType::Car).iter().all(|c| c.c2 <= 0.5));
        grid.validate().unwrap();
    }

    #[test]
    fn constraint_validation() {
        assert!(BehaviorConstraints::new(Intention::KeepVelocity, 1.0, 2.0, 0.0, 0.5).is_err());
        assert!(BehaviorConstraints::new(Intention::KeepVelocity, 2.0, 1.0, 0.0, 1.5).is_err());
        assert!(BehaviorConstraints::new(
            Intention::KeepVelocity,
            f64::INFINITY,
            f64::INFINITY,
            0.0,
            0.5
        )
        .is_ok());
    }

    fn straight_history(v: Vec2, n: usize) -> AgentHistory {
        let mut h = AgentHistory::new(8);
        for k in 0..n {
            h.push(k as i64, k as f64 * 0.4, v * (k as f64 * 0.4))
                .unwrap();
        }
        h
    }

    #[test]
    fn straight_history_keeps_velocity() {
        let h = straight_history(Vec2::new(1.0, 0.0), 5);
        for intention in Intention::ALL {
            let v = preferred_velocity(&h, intention, 4.8);
            assert!((v - Vec2::new(1.0, 0.0)).length() < 1e-12);
        }
        let still = straight_history(Vec2::ZERO, 5);
        assert_eq!(
            preferred_velocity(&still, Intention::KeepAcceleration, 4.8),
            Vec2::ZERO
        );
    }

    #[test]
    fn reference_speed_limited_near_target() {
        let r = Reference {
            position: Vec2::new(0.2, 0.0),
            speed: 1.0,
        };
        let v = r.preferred_velocity(Vec2::ZERO, 0.4);
        assert!((v - Vec2::new(0.5, 0.0)).length() < 1e-12);
        assert_eq!(r.preferred_velocity(Vec2::new(0.2, 0.0), 0.4), Vec2::ZERO);
    }
}
