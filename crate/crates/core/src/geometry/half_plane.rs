use crate::error::{GammaError, Result};

use super::Vec2;

/// Linear velocity constraint `(v − point) · normal ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub point: Vec2,
    /// Unit normal pointing into the feasible side.
    pub normal: Vec2,
}

impl HalfPlane {
    /// Normalizes `normal`; fails for a zero or non-finite normal.
    pub fn new(point: Vec2, normal: Vec2) -> Result<Self> {
        let unit = normal
            .normalized()
            .filter(|n| n.is_finite() && point.is_finite())
            .ok_or_else(|| {
                GammaError::InvalidGeometry(format!("degenerate half-plane normal {normal}"))
            })?;
        Ok(HalfPlane {
            point,
            normal: unit,
        })
    }

    #[inline]
    pub(crate) fn from_unit(point: Vec2, normal: Vec2) -> Self {
        HalfPlane { point, normal }
    }

    /// Positive inside the feasible side, negative outside.
    #[inline]
    pub fn signed_distance(&self, v: Vec2) -> f64 {
        (v - self.point).dot(self.normal)
    }

    #[inline]
    pub fn contains(&self, v: Vec2, tol: f64) -> bool {
        self.signed_distance(v) >= -tol
    }

    /// Amount by which `v` violates the constraint (0 when satisfied).
    #[inline]
    pub fn violation(&self, v: Vec2) -> f64 {
        (-self.signed_distance(v)).max(0.0)
    }

    /// Unit direction along the boundary line.
    #[inline]
    pub fn direction(&self) -> Vec2 {
        self.normal.perp()
    }

    /// Boundary moved against its normal by `slack`, enlarging the feasible side.
    #[inline]
    pub fn relaxed(&self, slack: f64) -> HalfPlane {
        HalfPlane {
            point: self.point - self.normal * slack,
            normal: self.normal,
        }
    }
}
