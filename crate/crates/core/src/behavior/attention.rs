use crate::engine::AgentState;
use crate::geometry::Vec2;

/// Whether a point at `target` is attended to by an agent at `position`
/// facing `heading`. Points exactly abeam count as frontal.
pub fn in_attention(position: Vec2, heading: f64, target: Vec2, r_front: f64, r_rear: f64) -> bool {
    let offset = target - position;
    let radius = if Vec2::from_angle(heading).dot(offset) >= 0.0 {
        r_front
    } else {
        r_rear
    };
    offset.length() <= radius
}

/// Ids of the agents in `others` whose footprint point closest to `agent`
/// falls inside its attention half-discs. `agent` itself is skipped.
pub fn attention_set(
    agent: &AgentState,
    others: &[AgentState],
    r_front: f64,
    r_rear: f64,
) -> Vec<u64> {
    others
        .iter()
        .filter(|b| b.id != agent.id)
        .filter(|b| {
            let closest = b.world_footprint().closest_point(agent.position);
            in_attention(agent.position, agent.heading, closest, r_front, r_rear)
        })
        .map(|b| b.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_discs() {
        let p = Vec2::ZERO;
        assert!(in_attention(p, 0.0, Vec2::new(3.9, 0.0), 4.0, 1.0));
        assert!(!in_attention(p, 0.0, Vec2::new(4.1, 0.0), 4.0, 1.0));
        assert!(!in_attention(p, 0.0, Vec2::new(-2.0, 0.0), 4.0, 1.0));
        assert!(in_attention(p, 0.0, Vec2::new(-0.9, 0.0), 4.0, 1.0));
        assert!(in_attention(p, 0.0, Vec2::new(0.0, 3.0), 4.0, 1.0));
    }
}
