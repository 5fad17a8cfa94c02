//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use gamma_core::Vec2;
use rand::Rng;

pub type Pt = (f64, f64);

pub fn pt(v: Vec2) -> Pt {
    (v.x, v.y)
}

fn cross(o: Pt, a: Pt, b: Pt) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain hull, counter-clockwise, collinear points dropped.
pub fn hull(points: &[Pt]) -> Vec<Pt> {
    let mut p: Vec<Pt> = points.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<Pt> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Pt> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn axes(poly: &[Pt]) -> Vec<Pt> {
    (0..poly.len())
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let l = (dx * dx + dy * dy).sqrt();
            (dy / l, -dx / l)
        })
        .collect()
}

fn project(poly: &[Pt], axis: Pt) -> (f64, f64) {
    poly.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let d = p.0 * axis.0 + p.1 * axis.1;
            (lo.min(d), hi.max(d))
        })
}

/// Penetration depth by separating axes: positive when the convex polygons
/// overlap, zero or negative (minus the gap along the best axis) otherwise.
pub fn sat_depth(a: &[Pt], b: &[Pt]) -> f64 {
    let mut depth = f64::INFINITY;
    for axis in axes(a).into_iter().chain(axes(b)) {
        let (a0, a1) = project(a, axis);
        let (b0, b1) = project(b, axis);
        depth = depth.min((a1 - b0).min(b1 - a0));
    }
    depth
}

pub fn translate(poly: &[Pt], d: Pt) -> Vec<Pt> {
    poly.iter().map(|p| (p.0 + d.0, p.1 + d.1)).collect()
}

/// Whether `a` moving with constant velocity `v` relative to the fixed `b`
/// touches it during `(0, tau]`, stepping time in `steps` intervals and
/// testing each interval's swept hull exactly.
pub fn collides_within(a: &[Pt], b: &[Pt], v: Pt, tau: f64, steps: usize) -> bool {
    let h = tau / steps as f64;
    (0..steps).any(|k| {
        let t0 = k as f64 * h;
        let t1 = t0 + h;
        let mut pts = translate(a, (v.0 * t0, v.1 * t0));
        pts.extend(translate(a, (v.0 * t1, v.1 * t1)));
        sat_depth(&hull(&pts), b) > 0.0
    })
}

/// Random convex polygon: hull of up to `n` points in a disc of radius `r`,
/// both drawn from the given ranges.
pub fn random_convex(
    rng: &mut impl Rng,
    n: std::ops::Range<usize>,
    r: std::ops::Range<f64>,
) -> Vec<Pt> {
    let n = rng.random_range(n);
    let r = rng.random_range(r);
    loop {
        let pts: Vec<Pt> = (0..n)
            .map(|_| {
                let a = rng.random_range(0.0..std::f64::consts::TAU);
                let d = r * rng.random_range(0.2f64..1.0).sqrt();
                (d * a.cos(), d * a.sin())
            })
            .collect();
        let h = hull(&pts);
        if h.len() >= 3 && area(&h) > 0.05 * r * r {
            return h;
        }
    }
}

pub fn area(poly: &[Pt]) -> f64 {
    (0..poly.len())
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<f64>()
        / 2.0
}

pub fn to_vec2(poly: &[Pt]) -> Vec<Vec2> {
    poly.iter().map(|p| Vec2::new(p.0, p.1)).collect()
}
