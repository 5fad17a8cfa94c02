//! Closest point to a preferred velocity inside an intersection of half-planes
//! and a convex kinematic polygon.

use crate::error::{GammaError, Result};
use crate::geometry::{ConvexPolygon, HalfPlane, Vec2};
use crate::tolerance::LP_EPS;

/// Bisection iterations of the infeasibility fallback.
const RELAX_ITERATIONS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct VelocityProgram {
    /// Preferred velocity.
    pub target: Vec2,
    /// Geometric constraints, in processing order.
    pub half_planes: Vec<HalfPlane>,
    /// Kinematic constraint in the world frame.
    pub kinematic_polygon: ConvexPolygon,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Solution {
    pub velocity: Vec2,
    /// `false` when the geometric constraints had to be relaxed.
    pub feasible: bool,
    /// Largest violation among the geometric constraints (0 when feasible).
    pub max_violation: f64,
}

impl VelocityProgram {
    pub fn new(
        target: Vec2,
        half_planes: Vec<HalfPlane>,
        kinematic_polygon: ConvexPolygon,
    ) -> Self {
        VelocityProgram {
            target,
            half_planes,
            kinematic_polygon,
        }
    }

    pub fn solve(&self) -> Result<Solution> {
        solve(self)
    }
}

/// Minimizes `‖v − target‖` over all constraints. Kinematic edges are
/// processed first, geometric constraints after them in the given order.
/// When the geometric constraints cannot all hold, they are relaxed by the
/// smallest common slack that admits a kinematically feasible velocity.
pub fn solve(program: &VelocityProgram) -> Result<Solution> {
    if program.kinematic_polygon.is_empty() || !program.target.is_finite() {
        return Err(GammaError::EmptyKinematicSet);
    }
    let kinematic = program.kinematic_polygon.half_planes();
    let geometric = &program.half_planes;
    let mut all = Vec::with_capacity(kinematic.len() + geometric.len());
    all.extend_from_slice(&kinematic);
    all.extend_from_slice(geometric);

    if let Some(v) = closest_feasible_point(program.target, &all) {
        return Ok(Solution {
            velocity: v,
            feasible: true,
            max_violation: max_violation(geometric, v),
        });
    }

    let anchor =
        closest_feasible_point(program.target, &kinematic).ok_or(GammaError::EmptyKinematicSet)?;
    let mut lo = 0.0;
    let mut hi = max_violation(geometric, anchor);
    let mut witness = anchor;
    let mut relaxed = all.clone();
    let relax = |planes: &mut [HalfPlane], slack: f64| {
        for (dst, src) in planes[kinematic.len()..].iter_mut().zip(geometric) {
            *dst = src.relaxed(slack);
        }
    };
    for _ in 0..RELAX_ITERATIONS {
        if hi - lo <= LP_EPS * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        relax(&mut relaxed, mid);
        if let Some(v) = closest_feasible_point(anchor, &relaxed) {
            hi = mid;
            witness = v;
        } else {
            lo = mid;
        }
    }
    relax(&mut relaxed, hi);
    let velocity = closest_feasible_point(program.target, &relaxed).unwrap_or(witness);
    Ok(Solution {
        velocity,
        feasible: false,
        max_violation: max_violation(geometric, velocity),
    })
}

fn max_violation(planes: &[HalfPlane], v: Vec2) -> f64 {
    planes.iter().map(|h| h.violation(v)).fold(0.0, f64::max)
}

/// Incremental minimum-norm-point solve; `None` when the constraints have an
/// empty intersection.
pub fn closest_feasible_point(target: Vec2, planes: &[HalfPlane]) -> Option<Vec2> {
    let mut v = target;
    for (i, plane) in planes.iter().enumerate() {
        if plane.signed_distance(v) >= -LP_EPS {
            continue;
        }
        v = solve_on_line(target, plane, &planes[..i])?;
    }
    Some(v)
}

fn solve_on_line(target: Vec2, line: &HalfPlane, prior: &[HalfPlane]) -> Option<Vec2> {
    let dir = line.direction();
    let mut t_min = f64::NEG_INFINITY;
    let mut t_max = f64::INFINITY;
    for h in prior {
        let denom = dir.dot(h.normal);
        let offset = h.signed_distance(line.point);
        if denom.abs() <= LP_EPS {
            if offset < -LP_EPS {
                return None;
            }
            continue;
        }
        let t = -offset / denom;
        if denom > 0.0 {
            t_min = t_min.max(t);
        } else {
            t_max = t_max.min(t);
        }
        if t_min > t_max + LP_EPS {
            return None;
        }
    }
    let t = (target - line.point)
        .dot(dir)
        .clamp(t_min.min(t_max), t_max.max(t_min));
    Some(line.point + dir * t)
}
