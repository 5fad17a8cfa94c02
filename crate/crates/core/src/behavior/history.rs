use std::collections::VecDeque;

use crate::error::{GammaError, Result};
use crate::geometry::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistorySample {
    pub frame: i64,
    /// Seconds.
    pub time: f64,
    pub position: Vec2,
}

/// The most recent positions of one agent, oldest first.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentHistory {
    samples: VecDeque<HistorySample>,
    capacity: usize,
}

impl AgentHistory {
    /// Keeps at most `capacity` samples (at least 3).
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(3);
        AgentHistory {
            samples: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn from_samples(
        capacity: usize,
        samples: impl IntoIterator<Item = HistorySample>,
    ) -> Result<Self> {
        let mut h = AgentHistory::new(capacity);
        for s in samples {
            h.push(s.frame, s.time, s.position)?;
        }
        Ok(h)
    }

    /// Appends a sample; frames and times must strictly increase.
    pub fn push(&mut self, frame: i64, time: f64, position: Vec2) -> Result<()> {
        if let Some(last) = self.samples.back() {
            if frame <= last.frame || time <= last.time {
                return Err(GammaError::InvalidArgument(format!(
                    "history frames must increase: {} after {}",
                    frame, last.frame
                )));
            }
        }
        if !position.is_finite() {
            return Err(GammaError::InvalidArgument(format!(
                "non-finite position at frame {frame}"
            )));
        }
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back(HistorySample {
            frame,
            time,
            position,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn last(&self) -> Option<&HistorySample> {
        self.samples.back()
    }

    pub fn samples(&self) -> impl Iterator<Item = &HistorySample> {
        self.samples.iter()
    }

    fn nth_back(&self, n: usize) -> Option<&HistorySample> {
        self.samples
            .len()
            .checked_sub(n + 1)
            .map(|i| &self.samples[i])
    }

    /// Finite-difference velocity over the last two samples.
    pub fn velocity(&self) -> Option<Vec2> {
        let b = self.nth_back(0)?;
        let a = self.nth_back(1)?;
        Some((b.position - a.position) / (b.time - a.time))
    }

    /// Second-difference acceleration over the last three samples.
    pub fn acceleration(&self) -> Option<Vec2> {
        let c = self.nth_back(0)?;
        let b = self.nth_back(1)?;
        let a = self.nth_back(2)?;
        let v1 = (c.position - b.position) / (c.time - b.time);
        let v0 = (b.position - a.position) / (b.time - a.time);
        Some((v1 - v0) / (0.5 * (c.time - a.time)))
    }

    /// Direction of the latest non-negligible displacement.
    pub fn heading(&self, min_speed: f64) -> Option<f64> {
        let samples: Vec<&HistorySample> = self.samples.iter().collect();
        samples.windows(2).rev().find_map(|w| {
            let v = (w[1].position - w[0].position) / (w[1].time - w[0].time);
            (v.length() > min_speed).then(|| v.angle())
        })
    }

    /// `true` when consecutive frames are further apart than `frame_step`.
    pub fn has_gaps(&self, frame_step: i64) -> bool {
        let samples: Vec<&HistorySample> = self.samples.iter().collect();
        samples
            .windows(2)
            .any(|w| w[1].frame - w[0].frame != frame_step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differences_on_parabola() {
        let mut h = AgentHistory::new(8);
        for k in 0..4 {
            let t = k as f64 * 0.4;
            h.push(k * 10, t, Vec2::new(t, 0.5 * 2.0 * t * t)).unwrap();
        }
        let a = h.acceleration().unwrap();
        assert!((a - Vec2::new(0.0, 2.0)).length() < 1e-9);
        let v = h.velocity().unwrap();
        assert!((v.x - 1.0).abs() < 1e-12);
        assert!(!h.has_gaps(10));
        assert!(h.has_gaps(5));
    }

    #[test]
    fn rejects_out_of_order_and_caps_length() {
        let mut h = AgentHistory::new(3);
        h.push(0, 0.0, Vec2::ZERO).unwrap();
        assert!(h.push(0, 0.4, Vec2::ZERO).is_err());
        for k in 1..6 {
            h.push(k, k as f64, Vec2::new(k as f64, 0.0)).unwrap();
        }
        assert_eq!(h.len(), 3);
        assert_eq!(h.samples().next().unwrap().frame, 3);
    }

    #[test]
    fn heading_survives_stop() {
        let mut h = AgentHistory::new(8);
        h.push(0, 0.0, Vec2::ZERO).unwrap();
        h.push(1, 0.4, Vec2::new(0.0, 0.4)).unwrap();
        h.push(2, 0.8, Vec2::new(0.0, 0.4)).unwrap();
        let heading = h.heading(0.05).unwrap();
        assert!((heading - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(h.velocity().unwrap(), Vec2::ZERO);
    }
}
