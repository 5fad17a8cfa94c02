use rayon::prelude::*;

use crate::error::{GammaError, Result};
use crate::geometry::{convex_hull, ConvexPolygon, Vec2};

use super::controller::{track_velocity, Pose};
use super::{KinematicModel, KinematicSpec};

/// Integration step of the offline estimation (s).
pub const ESTIMATION_DT: f64 = 0.01;

/// Speeds and heading deviations tried by the offline estimation.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizationGrid {
    pub speeds: Vec<f64>,
    /// Deviations from the heading, radians, increasing.
    pub deviations: Vec<f64>,
}

impl DiscretizationGrid {
    /// Speeds `0, Δs, …, s_max` and deviations `−φ_max, …, φ_max` in steps of `Δφ`.
    pub fn new(speed_step: f64, max_speed: f64, angle_step: f64, max_angle: f64) -> Result<Self> {
        if !(speed_step > 0.0 && max_speed >= 0.0 && angle_step > 0.0 && max_angle >= 0.0) {
            return Err(GammaError::InvalidArgument(format!(
                "bad discretization: speed step {speed_step}, max speed {max_speed}, angle step {angle_step}, max angle {max_angle}"
            )));
        }
        let speeds = stepped(max_speed, speed_step);
        let halves = stepped(max_angle.min(std::f64::consts::PI), angle_step);
        let mut deviations: Vec<f64> = halves.iter().rev().map(|a| -a).collect();
        deviations.extend(halves.iter().skip(1));
        if let (Some(&first), Some(&last)) = (deviations.first(), deviations.last()) {
            if deviations.len() > 1 && (last - first - std::f64::consts::TAU).abs() < 1e-9 {
                deviations.pop();
            }
        }
        Ok(DiscretizationGrid { speeds, deviations })
    }

    /// 0.1 m/s and 5 degree steps; full circle for holonomic types, ±90 degrees
    /// otherwise.
    pub fn default_for(model: &KinematicModel) -> Self {
        let max_angle = if model.is_holonomic() { 180.0 } else { 90.0 };
        DiscretizationGrid::new(
            0.1,
            model.max_speed(),
            5f64.to_radians(),
            f64::to_radians(max_angle),
        )
        .expect("default grid parameters are valid")
    }
}

fn stepped(max: f64, step: f64) -> Vec<f64> {
    let n = (max / step + 1e-9).floor() as usize;
    let mut values: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    if max - values[n] > 1e-9 {
        values.push(max);
    } else {
        values[n] = max;
    }
    values
}

/// Largest speed per heading deviation whose tracking error stays within
/// `epsilon_max` over `tau`, reduced to the convex hull of those points and
/// the origin.
pub fn estimate_trackable_set(
    spec: &KinematicSpec,
    grid: &DiscretizationGrid,
) -> Result<ConvexPolygon> {
    let fail = |reason: String| GammaError::EstimationFailed {
        agent_type: spec.agent_type,
        reason,
    };
    if grid.speeds.is_empty() || grid.deviations.is_empty() {
        return Err(fail("empty discretization grid".into()));
    }
    let points: Vec<Vec2> = grid
        .deviations
        .par_iter()
        .filter_map(|&phi| {
            let dir = Vec2::from_angle(phi);
            grid.speeds
                .iter()
                .copied()
                .filter(|&s| s > 0.0)
                .filter(|&s| {
                    let start = Pose::new(Vec2::ZERO, 0.0, s);
                    track_velocity(&spec.model, start, dir * s, spec.tau, ESTIMATION_DT).max_error
                        <= spec.epsilon_max
                })
                .fold(None, |best: Option<f64>, s| {
                    Some(best.map_or(s, |b| b.max(s)))
                })
                .map(|s| dir * s)
        })
        .collect();
    let mut hull_input = points;
    hull_input.push(Vec2::ZERO);
    convex_hull(&hull_input).map_err(|_| {
        fail(format!(
            "no two-dimensional set of trackable velocities (epsilon_max {}, tau {})",
            spec.epsilon_max, spec.tau
        ))
    })
}
