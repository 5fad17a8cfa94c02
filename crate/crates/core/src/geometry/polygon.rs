use std::f64::consts::TAU;

use crate::error::{GammaError, Result};
use crate::tolerance::GEOMETRY_EPS;

use super::{HalfPlane, Vec2};

/// Strictly convex polygon with counter-clockwise winding.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Builds a polygon from an ordered vertex list.
    ///
    /// Clockwise input is reversed, near-duplicate and collinear vertices are
    /// dropped. Input that is not convex after that cleanup is rejected; use
    /// [`convex_hull`] for unordered point sets.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GammaError::InvalidGeometry(
                "non-finite polygon vertex".into(),
            ));
        }
        let mut verts = dedup_cyclic(vertices);
        if verts.len() < 3 {
            return Err(GammaError::InvalidGeometry(format!(
                "polygon needs at least 3 distinct vertices, got {}",
                verts.len()
            )));
        }
        if signed_area(&verts) < 0.0 {
            verts.reverse();
        }
        let verts = drop_collinear(verts);
        if verts.len() < 3 {
            return Err(GammaError::InvalidGeometry(
                "polygon vertices are collinear".into(),
            ));
        }
        let n = verts.len();
        let mut turning = 0.0;
        for i in 0..n {
            let e0 = verts[(i + 1) % n] - verts[i];
            let e1 = verts[(i + 2) % n] - verts[(i + 1) % n];
            if e0.cross(e1) <= 0.0 {
                return Err(GammaError::InvalidGeometry("polygon is not convex".into()));
            }
            turning += e0.cross(e1).atan2(e0.dot(e1));
        }
        if (turning - TAU).abs() > 1e-6 {
            return Err(GammaError::InvalidGeometry(
                "polygon winds more than once".into(),
            ));
        }
        Ok(ConvexPolygon { vertices: verts })
    }

    /// Axis-aligned rectangle centered on the origin, `length` along +x.
    pub fn rectangle(length: f64, width: f64) -> Result<Self> {
        if !(length > 0.0 && width > 0.0) {
            return Err(GammaError::InvalidGeometry(format!(
                "rectangle dimensions must be positive, got {length} x {width}"
            )));
        }
        let (hl, hw) = (0.5 * length, 0.5 * width);
        ConvexPolygon::new(vec![
            Vec2::new(-hl, -hw),
            Vec2::new(hl, -hw),
            Vec2::new(hl, hw),
            Vec2::new(-hl, hw),
        ])
    }

    /// Regular `sides`-gon inscribed in the circle of `radius` around `center`,
    /// with its first vertex at angle `phase`.
    pub fn regular(sides: usize, radius: f64, center: Vec2, phase: f64) -> Result<Self> {
        if sides < 3 || !(radius > 0.0) {
            return Err(GammaError::InvalidGeometry(format!(
                "regular polygon needs >= 3 sides and positive radius, got {sides}, {radius}"
            )));
        }
        let verts = (0..sides)
            .map(|k| center + Vec2::from_angle(phase + TAU * k as f64 / sides as f64) * radius)
            .collect();
        ConvexPolygon::new(verts)
    }

    /// Regular polygon whose edges are all tangent to the circle of `radius`,
    /// so it contains the disc.
    pub fn circumscribed_disc(sides: usize, radius: f64, center: Vec2) -> Result<Self> {
        let outer = radius / (std::f64::consts::PI / sides as f64).cos();
        ConvexPolygon::regular(sides, outer, center, 0.0)
    }

    /// Cleans up vertices already known to be convex and counter-clockwise.
    fn from_convex_ccw(vertices: Vec<Vec2>) -> Result<Self> {
        let verts = drop_collinear(dedup_cyclic(vertices));
        if verts.len() < 3 || verts.iter().any(|v| !v.is_finite()) {
            return Err(GammaError::InvalidGeometry(
                "degenerate minkowski sum".into(),
            ));
        }
        Ok(ConvexPolygon { vertices: verts })
    }

    pub(crate) fn from_ccw_unchecked(vertices: Vec<Vec2>) -> Self {
        ConvexPolygon { vertices }
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterates edges as `(start, end)` pairs in CCW order.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Vec2 {
        let origin = self.vertices[0];
        let mut acc = Vec2::ZERO;
        let mut area2 = 0.0;
        for (a, b) in self.edges() {
            let (a, b) = (a - origin, b - origin);
            let w = a.cross(b);
            acc += (a + b) * w;
            area2 += w;
        }
        origin + acc / (3.0 * area2)
    }

    /// `true` when `p` is inside or within `tol` of the boundary.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) >= -tol * e.length()
        })
    }

    /// Signed distance from `p` to the boundary: negative inside.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        let (closest, _) = self.closest_boundary_point(p);
        let d = closest.distance(p);
        if self.contains(p, 0.0) {
            -d
        } else {
            d
        }
    }

    /// Closest point on the boundary to `p` and the index of the edge it
    /// lies on.
    pub fn closest_boundary_point(&self, p: Vec2) -> (Vec2, usize) {
        let mut best = (self.vertices[0], 0usize);
        let mut best_d2 = f64::INFINITY;
        for (i, (a, b)) in self.edges().enumerate() {
            let q = closest_on_segment(a, b, p);
            let d2 = (q - p).length_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best = (q, i);
            }
        }
        best
    }

    /// Closest point of the polygon (boundary or interior) to `p`.
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        if self.contains(p, 0.0) {
            p
        } else {
            self.closest_boundary_point(p).0
        }
    }

    /// Unit outward normal of edge `i`.
    pub fn edge_normal(&self, i: usize) -> Vec2 {
        let n = self.vertices.len();
        let e = self.vertices[(i + 1) % n] - self.vertices[i];
        Vec2::new(e.y, -e.x) / e.length()
    }

    /// One half-plane per edge whose feasible side is the polygon interior.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        self.edges()
            .map(|(a, b)| {
                let e = (b - a) / (b - a).length();
                HalfPlane::from_unit(a, e.perp())
            })
            .collect()
    }

    pub fn translated(&self, offset: Vec2) -> ConvexPolygon {
        ConvexPolygon::from_ccw_unchecked(self.vertices.iter().map(|&v| v + offset).collect())
    }

    /// Rotated about the origin.
    pub fn rotated(&self, angle: f64) -> ConvexPolygon {
        let (s, c) = angle.sin_cos();
        ConvexPolygon::from_ccw_unchecked(
            self.vertices
                .iter()
                .map(|v| Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y))
                .collect(),
        )
    }

    /// Body-frame polygon placed at `position` with orientation `heading`.
    pub fn placed(&self, position: Vec2, heading: f64) -> ConvexPolygon {
        let (s, c) = heading.sin_cos();
        ConvexPolygon::from_ccw_unchecked(
            self.vertices
                .iter()
                .map(|v| position + Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y))
                .collect(),
        )
    }

    /// Uniform scaling about the origin; `factor` must be positive.
    pub fn scaled(&self, factor: f64) -> ConvexPolygon {
        debug_assert!(factor > 0.0);
        ConvexPolygon::from_ccw_unchecked(self.vertices.iter().map(|&v| v * factor).collect())
    }

    /// Point reflection through the origin; winding is preserved.
    pub fn negated(&self) -> ConvexPolygon {
        ConvexPolygon::from_ccw_unchecked(self.vertices.iter().map(|&v| -v).collect())
    }

    /// Largest distance from `center` to a vertex.
    pub fn circumradius(&self, center: Vec2) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.distance(center))
            .fold(0.0, f64::max)
    }

    /// Vertex with the largest projection on `dir`.
    pub fn support(&self, dir: Vec2) -> Vec2 {
        *self
            .vertices
            .iter()
            .max_by(|a, b| a.dot(dir).total_cmp(&b.dot(dir)))
            .expect("polygon has vertices")
    }

    /// Separating-axis penetration depth: positive when interiors overlap.
    pub fn penetration_depth(&self, other: &ConvexPolygon) -> f64 {
        let mut depth = f64::INFINITY;
        for poly in [self, other] {
            for i in 0..poly.len() {
                let n = poly.edge_normal(i);
                let (min_a, max_a) = project(self, n);
                let (min_b, max_b) = project(other, n);
                let overlap = max_a.min(max_b) - min_a.max(min_b);
                depth = depth.min(overlap);
            }
        }
        depth
    }

    /// `true` when the interiors overlap by more than `tol`.
    pub fn overlaps(&self, other: &ConvexPolygon, tol: f64) -> bool {
        self.penetration_depth(other) > tol
    }

    /// Euclidean distance between the two polygons (0 when they touch or
    /// overlap).
    pub fn distance_to(&self, other: &ConvexPolygon) -> f64 {
        if self.penetration_depth(other) >= 0.0 {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for &v in &self.vertices {
            best = best.min(other.closest_boundary_point(v).0.distance(v));
        }
        for &v in &other.vertices {
            best = best.min(self.closest_boundary_point(v).0.distance(v));
        }
        best
    }
}

fn project(poly: &ConvexPolygon, axis: Vec2) -> (f64, f64) {
    poly.vertices
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let d = v.dot(axis);
            (lo.min(d), hi.max(d))
        })
}

pub(crate) fn closest_on_segment(a: Vec2, b: Vec2, p: Vec2) -> Vec2 {
    let e = b - a;
    let len2 = e.length_squared();
    if len2 <= 0.0 {
        return a;
    }
    let t = ((p - a).dot(e) / len2).clamp(0.0, 1.0);
    a + e * t
}

fn signed_area(verts: &[Vec2]) -> f64 {
    let n = verts.len();
    let origin = verts[0];
    let mut acc = 0.0;
    for i in 0..n {
        acc += (verts[i] - origin).cross(verts[(i + 1) % n] - origin);
    }
    0.5 * acc
}

fn dedup_cyclic(vertices: Vec<Vec2>) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if out
            .last()
            .is_none_or(|l| (*l - v).length_squared() > GEOMETRY_EPS * GEOMETRY_EPS)
        {
            out.push(v);
        }
    }
    while out.len() > 1
        && (out[0] - *out.last().unwrap()).length_squared() <= GEOMETRY_EPS * GEOMETRY_EPS
    {
        out.pop();
    }
    out
}

/// Removes vertices whose adjacent edges turn by less than the tolerance.
fn drop_collinear(mut verts: Vec<Vec2>) -> Vec<Vec2> {
    loop {
        let n = verts.len();
        if n < 3 {
            return verts;
        }
        let mut removed = false;
        let mut i = 0;
        while i < verts.len() && verts.len() >= 3 {
            let n = verts.len();
            let prev = verts[(i + n - 1) % n];
            let cur = verts[i];
            let next = verts[(i + 1) % n];
            let e0 = cur - prev;
            let e1 = next - cur;
            let cross = e0.cross(e1);
            if cross.abs() <= GEOMETRY_EPS * e0.length() * e1.length() && e0.dot(e1) > 0.0 {
                verts.remove(i);
                removed = true;
            } else {
                i += 1;
            }
        }
        if !removed {
            return verts;
        }
    }
}

/// Counter-clockwise convex hull of an unordered point set (monotone chain).
///
/// Points on hull edges are dropped.
pub fn convex_hull(points: &[Vec2]) -> Result<ConvexPolygon> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GammaError::InvalidGeometry("non-finite hull point".into()));
    }
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.distance(*b) <= GEOMETRY_EPS);
    if pts.len() < 3 {
        return Err(GammaError::InvalidGeometry(
            "convex hull needs at least 3 distinct points".into(),
        ));
    }
    let turn = |o: Vec2, a: Vec2, b: Vec2| {
        let (u, v) = (a - o, b - o);
        let c = u.cross(v);
        if c.abs() <= GEOMETRY_EPS * u.length() * v.length() && u.dot(v) > 0.0 {
            0.0
        } else {
            c
        }
    };
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(GammaError::InvalidGeometry(
            "all points are collinear".into(),
        ));
    }
    ConvexPolygon::new(lower)
        .map_err(|_| GammaError::InvalidGeometry("all points are collinear".into()))
}

/// Minkowski sum of two convex polygons by merging their edge sequences in
/// angular order.
pub fn minkowski_sum(p: &ConvexPolygon, q: &ConvexPolygon) -> Result<ConvexPolygon> {
    let lowest = |poly: &ConvexPolygon| {
        poly.vertices
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)))
            .map(|(i, _)| i)
            .expect("polygon has vertices")
    };
    let (pv, qv) = (&p.vertices, &q.vertices);
    let (n, m) = (pv.len(), qv.len());
    let (i0, j0) = (lowest(p), lowest(q));
    let mut out = Vec::with_capacity(n + m);
    let (mut i, mut j) = (0usize, 0usize);
    while i < n || j < m {
        let a = pv[(i0 + i) % n];
        let b = qv[(j0 + j) % m];
        out.push(a + b);
        let ea = pv[(i0 + i + 1) % n] - a;
        let eb = qv[(j0 + j + 1) % m] - b;
        let c = if i >= n {
            -1.0
        } else if j >= m {
            1.0
        } else {
            ea.cross(eb)
        };
        if c > 0.0 {
            i += 1;
        } else if c < 0.0 {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    ConvexPolygon::from_convex_ccw(out)
}

/// `B ⊖ A = B ⊕ (−A)`: the set of offsets `b − a`. With both polygons in the
/// world frame, agent A collides with B exactly when the origin lies inside.
pub fn minkowski_difference(b: &ConvexPolygon, a: &ConvexPolygon) -> Result<ConvexPolygon> {
    if a.len() < 3 || b.len() < 3 {
        return Err(GammaError::InvalidGeometry(
            "minkowski difference of a degenerate polygon".into(),
        ));
    }
    minkowski_sum(b, &a.negated())
}
