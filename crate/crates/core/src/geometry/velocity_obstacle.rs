use crate::error::{GammaError, Result};
use crate::tolerance::GEOMETRY_EPS;

use super::polygon::closest_on_segment;
use super::{ConvexPolygon, HalfPlane, Vec2};

/// Relative velocities of A w.r.t. B that bring A into B within `tau`.
///
/// The region is the truncated cone `{v : ∃ t ∈ (0, τ], t·v ∈ B ⊖ A}`. It is
/// bounded by two legs tangent to `B ⊖ A` and by the origin-facing vertex
/// chain of `B ⊖ A` scaled by `1/τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityObstacle {
    /// Unit direction of the counter-clockwise-most tangent ray.
    pub leg_left: Vec2,
    /// Unit direction of the clockwise-most tangent ray.
    pub leg_right: Vec2,
    /// Scaled vertices from the left tangent point to the right tangent point,
    /// in the polygon's CCW order.
    pub cutoff_chain: Vec<Vec2>,
    pub tau: f64,
}

/// Which part of the VO boundary a closest point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryFeature {
    LeftLeg,
    RightLeg,
    Cutoff(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub point: Vec2,
    /// Unit normal pointing out of the VO.
    pub normal: Vec2,
    pub feature: BoundaryFeature,
}

impl VelocityObstacle {
    #[inline]
    fn left_normal(&self) -> Vec2 {
        self.leg_left.perp()
    }

    #[inline]
    fn right_normal(&self) -> Vec2 {
        -self.leg_right.perp()
    }

    fn chain_normal(&self, i: usize) -> Vec2 {
        let e = self.cutoff_chain[i + 1] - self.cutoff_chain[i];
        Vec2::new(e.y, -e.x) / e.length()
    }

    /// Largest outward signed distance over the bounding lines: negative
    /// strictly inside, positive outside. Not a Euclidean distance.
    pub fn depth(&self, v: Vec2) -> f64 {
        let mut d = v.dot(self.left_normal()).max(v.dot(self.right_normal()));
        for i in 0..self.cutoff_chain.len().saturating_sub(1) {
            d = d.max((v - self.cutoff_chain[i]).dot(self.chain_normal(i)));
        }
        d
    }

    /// Membership with `tol` slack on every bounding line.
    pub fn contains(&self, v: Vec2, tol: f64) -> bool {
        self.depth(v) <= tol
    }

    /// Point of the VO boundary closest to `v_rel`, with the outward normal
    /// there. When `v_rel` is outside and the closest point is a corner, the
    /// normal points from the corner toward `v_rel`.
    pub fn closest_boundary_point(&self, v_rel: Vec2) -> BoundaryPoint {
        let first = self.cutoff_chain[0];
        let last = *self.cutoff_chain.last().expect("chain is non-empty");

        let mut best = {
            let t = (v_rel - first).dot(self.leg_left).max(0.0);
            BoundaryPoint {
                point: first + self.leg_left * t,
                normal: self.left_normal(),
                feature: BoundaryFeature::LeftLeg,
            }
        };
        let mut best_d2 = (best.point - v_rel).length_squared();

        let t = (v_rel - last).dot(self.leg_right).max(0.0);
        let right = last + self.leg_right * t;
        let d2 = (right - v_rel).length_squared();
        if d2 < best_d2 {
            best_d2 = d2;
            best = BoundaryPoint {
                point: right,
                normal: self.right_normal(),
                feature: BoundaryFeature::RightLeg,
            };
        }

        for i in 0..self.cutoff_chain.len().saturating_sub(1) {
            let q = closest_on_segment(self.cutoff_chain[i], self.cutoff_chain[i + 1], v_rel);
            let d2 = (q - v_rel).length_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best = BoundaryPoint {
                    point: q,
                    normal: self.chain_normal(i),
                    feature: BoundaryFeature::Cutoff(i),
                };
            }
        }

        if best_d2.sqrt() > GEOMETRY_EPS && !self.contains(v_rel, 0.0) {
            if let Some(n) = (v_rel - best.point).normalized() {
                best.normal = n;
            }
        }
        best
    }
}

/// Constructs the velocity obstacle induced by `rel_geometry = B ⊖ A`.
///
/// Fails with [`GammaError::Overlap`] when the origin lies inside (or on) the
/// relative geometry, i.e. the agents already touch.
pub fn build_velocity_obstacle(rel_geometry: &ConvexPolygon, tau: f64) -> Result<VelocityObstacle> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(GammaError::InvalidArgument(format!(
            "time horizon must be positive, got {tau}"
        )));
    }
    if rel_geometry.contains(Vec2::ZERO, GEOMETRY_EPS) {
        return Err(GammaError::Overlap);
    }
    let verts = rel_geometry.vertices();
    let n = verts.len();

    // Seen from the origin every vertex lies within an angle < π, so the
    // cross-product ordering below is transitive.
    let mut left = 0usize;
    let mut right = 0usize;
    for i in 1..n {
        let p = verts[i];
        let l = verts[left];
        let c = l.cross(p);
        let scale = GEOMETRY_EPS * l.length() * p.length();
        if c > scale || (c.abs() <= scale && l.dot(p) > 0.0 && p.length() > l.length()) {
            left = i;
        }
        let r = verts[right];
        let c = r.cross(p);
        let scale = GEOMETRY_EPS * r.length() * p.length();
        if c < -scale || (c.abs() <= scale && r.dot(p) > 0.0 && p.length() > r.length()) {
            right = i;
        }
    }

    let inv_tau = 1.0 / tau;
    let mut chain = Vec::with_capacity(n);
    let mut i = left;
    loop {
        chain.push(verts[i] * inv_tau);
        if i == right {
            break;
        }
        i = (i + 1) % n;
    }

    Ok(VelocityObstacle {
        leg_left: verts[left] / verts[left].length(),
        leg_right: verts[right] / verts[right].length(),
        cutoff_chain: chain,
        tau,
    })
}

/// Minimal change `u` of the relative velocity that takes it to the VO
/// boundary, and the outward normal at the boundary point.
pub fn closest_boundary_point(vo: &VelocityObstacle, v_rel: Vec2) -> (Vec2, Vec2) {
    let b = vo.closest_boundary_point(v_rel);
    (b.point, b.normal)
}

/// Half-plane of velocities for A given that A takes `alpha` of the
/// correction `u` needed to leave `vo`.
pub fn responsibility_half_plane(
    v_opt_a: Vec2,
    v_opt_b: Vec2,
    vo: &VelocityObstacle,
    alpha: f64,
) -> Result<HalfPlane> {
    check_alpha(alpha)?;
    let v_rel = v_opt_a - v_opt_b;
    let b = vo.closest_boundary_point(v_rel);
    let u = b.point - v_rel;
    HalfPlane::new(v_opt_a + u * alpha, b.normal)
}

/// Separating half-plane for agents that already overlap: the relative
/// velocity must carry the origin out of `rel_geometry` through its nearest
/// edge within one step `dt`.
pub fn overlap_half_plane(
    v_opt_a: Vec2,
    v_opt_b: Vec2,
    rel_geometry: &ConvexPolygon,
    alpha: f64,
    dt: f64,
) -> Result<HalfPlane> {
    check_alpha(alpha)?;
    if !(dt > 0.0) {
        return Err(GammaError::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let (q, edge) = rel_geometry.closest_boundary_point(Vec2::ZERO);
    let normal = rel_geometry.edge_normal(edge);
    let depth = q.dot(normal).max(0.0);
    let v_rel = v_opt_a - v_opt_b;
    let u = normal * (depth / dt - v_rel.dot(normal));
    HalfPlane::new(v_opt_a + u * alpha, normal)
}

/// Full correction `u` and the constraint normal for the pair, covering both
/// the velocity-obstacle and the overlap case. The half-plane for
/// responsibility `alpha` passes through `v_opt_a + alpha * u`.
pub fn pairwise_correction(
    rel_geometry: &ConvexPolygon,
    v_opt_a: Vec2,
    v_opt_b: Vec2,
    tau: f64,
    dt: f64,
) -> Result<(Vec2, Vec2)> {
    let v_rel = v_opt_a - v_opt_b;
    match build_velocity_obstacle(rel_geometry, tau) {
        Ok(vo) => {
            let b = vo.closest_boundary_point(v_rel);
            Ok((b.point - v_rel, b.normal))
        }
        Err(GammaError::Overlap) => {
            if !(dt > 0.0) {
                return Err(GammaError::InvalidArgument(format!(
                    "time step must be positive, got {dt}"
                )));
            }
            let (q, edge) = rel_geometry.closest_boundary_point(Vec2::ZERO);
            let normal = rel_geometry.edge_normal(edge);
            let depth = q.dot(normal).max(0.0);
            Ok((normal * (depth / dt - v_rel.dot(normal)), normal))
        }
        Err(e) => Err(e),
    }
}

/// Dispatches to [`responsibility_half_plane`] or, for overlapping agents, to
/// [`overlap_half_plane`].
pub fn pairwise_half_plane(
    rel_geometry: &ConvexPolygon,
    v_opt_a: Vec2,
    v_opt_b: Vec2,
    alpha: f64,
    tau: f64,
    dt: f64,
) -> Result<HalfPlane> {
    check_alpha(alpha)?;
    let (u, normal) = pairwise_correction(rel_geometry, v_opt_a, v_opt_b, tau, dt)?;
    HalfPlane::new(v_opt_a + u * alpha, normal)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(GammaError::InvalidArgument(format!(
            "responsibility must lie in [0, 1], got {alpha}"
        )))
    }
}
