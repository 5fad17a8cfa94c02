use crate::geometry::Vec2;
use crate::tolerance::HEADING_SPEED_THRESHOLD;

use super::KinematicModel;

/// Kinematic state of a controlled agent. For car-like agents `position` is
/// the rear-axle reference point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub position: Vec2,
    /// Radians, world frame.
    pub heading: f64,
    /// Signed forward speed (m/s); holonomic agents move along `heading`.
    pub speed: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64, speed: f64) -> Self {
        Pose {
            position,
            heading,
            speed,
        }
    }

    pub fn velocity(&self) -> Vec2 {
        Vec2::from_angle(self.heading) * self.speed
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackingResult {
    /// Poses after each integration step, starting with the initial pose.
    pub trajectory: Vec<Pose>,
    /// Pose at the end of the horizon.
    pub final_pose: Pose,
    /// Largest distance from the ideal straight-line trajectory over all steps.
    pub max_error: f64,
}

/// Runs the type's controller for `duration` seconds trying to follow the
/// constant velocity `target` from `start`, integrating with step `dt`.
///
/// Panics if `dt` or `duration` is not positive and finite.
pub fn track_velocity(
    model: &KinematicModel,
    start: Pose,
    target: Vec2,
    duration: f64,
    dt: f64,
) -> TrackingResult {
    assert!(
        dt > 0.0 && dt.is_finite() && duration > 0.0 && duration.is_finite(),
        "track_velocity needs positive dt and duration"
    );
    let steps = ((duration / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = duration / steps as f64;
    let mut state = ControllerState::new(model, start);
    let mut max_error: f64 = 0.0;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(start);
    for k in 1..=steps {
        state.step(model, start.position, target, h);
        trajectory.push(state.pose);
        let ideal = start.position + target * (k as f64 * h);
        max_error = max_error.max(state.pose.position.distance(ideal));
    }
    TrackingResult {
        trajectory,
        final_pose: state.pose,
        max_error,
    }
}

pub(crate) struct ControllerState {
    pub pose: Pose,
    velocity: Vec2,
}

impl ControllerState {
    pub fn new(model: &KinematicModel, pose: Pose) -> Self {
        let velocity = match model {
            KinematicModel::Holonomic { .. } => pose.velocity(),
            KinematicModel::CarLike { .. } => Vec2::ZERO,
        };
        ControllerState { pose, velocity }
    }

    /// One controller step of length `h` towards the line through `origin`
    /// with direction and speed given by `target`.
    pub fn step(&mut self, model: &KinematicModel, origin: Vec2, target: Vec2, h: f64) {
        match *model {
            KinematicModel::Holonomic {
                max_speed,
                max_accel,
            } => {
                let wanted = target.clamp_length(max_speed);
                self.velocity = match max_accel {
                    Some(a) => self.velocity + (wanted - self.velocity).clamp_length(a * h),
                    None => wanted,
                };
                self.pose.position += self.velocity * h;
                let speed = self.velocity.length();
                if speed > HEADING_SPEED_THRESHOLD {
                    self.pose.heading = self.velocity.angle();
                }
                self.pose.speed = speed;
            }
            KinematicModel::CarLike {
                wheelbase,
                max_steer,
                max_speed,
                max_accel,
            } => {
                let steer = pure_pursuit_steer(&self.pose, origin, target, wheelbase)
                    .clamp(-max_steer, max_steer);
                let wanted = target.length().min(max_speed);
                let dv = (wanted - self.pose.speed).clamp(-max_accel * h, max_accel * h);
                self.pose.speed = (self.pose.speed + dv).max(0.0);
                integrate_bicycle(&mut self.pose, steer, wheelbase, h);
            }
        }
    }
}

fn pure_pursuit_steer(pose: &Pose, origin: Vec2, target: Vec2, wheelbase: f64) -> f64 {
    let Some(dir) = target.normalized() else {
        return 0.0;
    };
    let lookahead = wheelbase;
    let along = (pose.position - origin).dot(dir);
    let foot = origin + dir * along;
    let offset = pose.position.distance(foot);
    let ahead = if offset < lookahead {
        (lookahead * lookahead - offset * offset).sqrt()
    } else {
        0.0
    };
    let goal = foot + dir * ahead;
    let to_goal = goal - pose.position;
    let dist = to_goal.length();
    if dist < 1e-12 {
        return 0.0;
    }
    let heading = Vec2::from_angle(pose.heading);
    let alpha = heading.cross(to_goal).atan2(heading.dot(to_goal));
    (2.0 * wheelbase * alpha.sin() / dist).atan()
}

/// Exact constant-steer arc of the kinematic bicycle.
fn integrate_bicycle(pose: &mut Pose, steer: f64, wheelbase: f64, h: f64) {
    let curvature = steer.tan() / wheelbase;
    let arc = pose.speed * h;
    let turn = arc * curvature;
    let theta = pose.heading;
    if turn.abs() < 1e-12 {
        pose.position += Vec2::from_angle(theta) * arc;
    } else {
        pose.position += Vec2::new(
            (theta + turn).sin() - theta.sin(),
            theta.cos() - (theta + turn).cos(),
        ) / curvature;
        pose.heading = theta + turn;
    }
}
