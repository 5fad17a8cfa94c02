//! Frame-indexed trajectory datasets and their text formats.
//!
//! Homogeneous files hold `frame agent x y` rows (all agents pedestrians).
//! Heterogeneous files hold `frame agent type x y heading length width` rows,
//! where `heading`, `length` and `width` may be `-` when unknown, plus
//! obstacle blocks:
//!
//! ```text
//! OBSTACLE
//! 0 0
//! 2 0
//! 2 1
//! END
//! ```

mod io;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{GammaError, Result};
use crate::geometry::{ConvexPolygon, Vec2};
use crate::kinematics::AgentType;

pub use io::{
    load_dataset, load_heterogeneous, load_homogeneous, parse_dataset, parse_heterogeneous,
    parse_homogeneous, save_heterogeneous, write_heterogeneous,
};

/// One agent seen in one frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub id: u64,
    pub agent_type: AgentType,
    pub position: Vec2,
    pub heading: Option<f64>,
    /// Footprint length and width (m).
    pub dims: Option<(f64, f64)>,
}

impl Observation {
    pub fn pedestrian(id: u64, position: Vec2) -> Self {
        Observation {
            id,
            agent_type: AgentType::Pedestrian,
            position,
            heading: None,
            dims: None,
        }
    }

    pub fn dims_or_default(&self) -> (f64, f64) {
        self.dims
            .unwrap_or_else(|| self.agent_type.default_dimensions())
    }

    /// Rectangular body-frame footprint.
    pub fn footprint(&self) -> Result<ConvexPolygon> {
        let (l, w) = self.dims_or_default();
        ConvexPolygon::rectangle(l, w)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryDataset {
    frames: BTreeMap<i64, Vec<Observation>>,
    /// Seconds between consecutive frames.
    pub frame_period: f64,
    pub obstacles: Vec<ConvexPolygon>,
}

impl Default for TrajectoryDataset {
    fn default() -> Self {
        TrajectoryDataset::new(0.4)
    }
}

impl TrajectoryDataset {
    pub fn new(frame_period: f64) -> Self {
        TrajectoryDataset {
            frames: BTreeMap::new(),
            frame_period,
            obstacles: Vec::new(),
        }
    }

    /// Adds an observation; each (frame, agent) pair may appear once.
    pub fn insert(&mut self, frame: i64, obs: Observation) -> Result<()> {
        let rows = self.frames.entry(frame).or_default();
        if rows.iter().any(|o| o.id == obs.id) {
            return Err(GammaError::InvalidArgument(format!(
                "agent {} appears twice in frame {frame}",
                obs.id
            )));
        }
        rows.push(obs);
        Ok(())
    }

    /// Registers an empty frame.
    pub fn touch_frame(&mut self, frame: i64) {
        self.frames.entry(frame).or_default();
    }

    pub fn frame(&self, frame: i64) -> Option<&[Observation]> {
        self.frames.get(&frame).map(Vec::as_slice)
    }

    pub fn frames(&self) -> impl Iterator<Item = (i64, &[Observation])> {
        self.frames.iter().map(|(f, v)| (*f, v.as_slice()))
    }

    pub fn frame_ids(&self) -> Vec<i64> {
        self.frames.keys().copied().collect()
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_observations(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.num_observations() == 0
    }

    /// Smallest positive difference between consecutive frame ids (1 when
    /// there is at most one frame).
    pub fn frame_step(&self) -> i64 {
        let ids = self.frame_ids();
        ids.windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| *d > 0)
            .min()
            .unwrap_or(1)
    }

    /// Time of `frame` relative to the first frame (s).
    pub fn time_of(&self, frame: i64) -> f64 {
        let first = self.frames.keys().next().copied().unwrap_or(frame);
        (frame - first) as f64 / self.frame_step() as f64 * self.frame_period
    }

    pub fn agent_ids(&self) -> BTreeSet<u64> {
        self.frames.values().flatten().map(|o| o.id).collect()
    }

    /// Frames and observations of one agent, in frame order.
    pub fn trajectory(&self, id: u64) -> Vec<(i64, Observation)> {
        self.frames
            .iter()
            .filter_map(|(f, rows)| rows.iter().find(|o| o.id == id).map(|o| (*f, *o)))
            .collect()
    }

    pub fn observation(&self, frame: i64, id: u64) -> Option<&Observation> {
        self.frames.get(&frame)?.iter().find(|o| o.id == id)
    }
}
