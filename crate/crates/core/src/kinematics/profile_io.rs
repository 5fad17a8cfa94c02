//! Text format for kinematic specs and profiles.
//!
//! ```text
//! # comments and blank lines are ignored
//! type car
//! model car_like
//! wheelbase 2.5
//! max_steer 0.6
//! max_speed 15
//! max_accel 3
//! epsilon_max 0.5
//! tau 1
//! K:
//! 0 0
//! 15 0
//! ...
//! end
//! ```
//!
//! Holonomic blocks use `model holonomic` with `max_speed` and an optional
//! `max_accel`. Spec files omit the `K:` section and may override the
//! estimation grid with `speed_step`, `angle_step_deg` and `max_angle_deg`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{GammaError, Result};
use crate::geometry::{ConvexPolygon, Vec2};

use super::{
    AgentType, DiscretizationGrid, KinematicModel, KinematicProfile, KinematicSpec, ProfileSet,
};

struct RawBlock {
    start_line: usize,
    end_line: usize,
    fields: BTreeMap<String, (usize, String)>,
    vertices: Option<Vec<Vec2>>,
}

impl RawBlock {
    fn text(&self, key: &str) -> Result<&str> {
        self.fields
            .get(key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| {
                GammaError::parse(
                    self.end_line,
                    format!(
                        "block starting at line {} is missing required field '{key}'",
                        self.start_line
                    ),
                )
            })
    }

    fn number(&self, key: &str) -> Result<f64> {
        let text = self.text(key)?;
        let line = self.fields[key].0;
        parse_number(text, line, key)
    }

    fn optional_number(&self, key: &str) -> Result<Option<f64>> {
        match self.fields.get(key) {
            Some((line, text)) => parse_number(text, *line, key).map(Some),
            None => Ok(None),
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.fields.get(key).map_or(self.end_line, |(l, _)| *l)
    }
}

fn parse_number(text: &str, line: usize, key: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            GammaError::parse(
                line,
                format!("field '{key}' expects a finite number, got '{text}'"),
            )
        })
}

const KNOWN_FIELDS: &[&str] = &[
    "type",
    "model",
    "wheelbase",
    "max_steer",
    "max_speed",
    "max_accel",
    "epsilon_max",
    "tau",
    "speed_step",
    "angle_step_deg",
    "max_angle_deg",
];

fn parse_blocks(text: &str) -> Result<Vec<RawBlock>> {
    let mut blocks = Vec::new();
    let mut current: Option<RawBlock> = None;
    let mut in_vertices = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some(block) = current.as_mut() else {
            let mut parts = content.split_whitespace();
            if parts.next() != Some("type") {
                return Err(GammaError::parse(
                    line,
                    format!("expected 'type <tag>' to start a block, got '{content}'"),
                ));
            }
            let mut block = RawBlock {
                start_line: line,
                end_line: line,
                fields: BTreeMap::new(),
                vertices: None,
            };
            let value: Vec<&str> = parts.collect();
            if value.len() != 1 {
                return Err(GammaError::parse(line, "'type' takes exactly one value"));
            }
            block
                .fields
                .insert("type".into(), (line, value[0].to_string()));
            current = Some(block);
            continue;
        };
        if content == "end" {
            block.end_line = line;
            blocks.push(current.take().expect("block is open"));
            in_vertices = false;
            continue;
        }
        if content == "K:" {
            if block.vertices.is_some() {
                return Err(GammaError::parse(line, "duplicate 'K:' section"));
            }
            block.vertices = Some(Vec::new());
            in_vertices = true;
            continue;
        }
        if in_vertices {
            let coords: Vec<&str> = content.split_whitespace().collect();
            let parsed: Option<Vec<f64>> = coords
                .iter()
                .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect();
            match parsed.as_deref() {
                Some([x, y]) => block
                    .vertices
                    .as_mut()
                    .expect("K section open")
                    .push(Vec2::new(*x, *y)),
                _ => {
                    return Err(GammaError::parse(
                        line,
                        format!("expected vertex 'x y', got '{content}'"),
                    ))
                }
            }
            continue;
        }
        let mut parts = content.split_whitespace();
        let key = parts.next().expect("non-empty line");
        let value: Vec<&str> = parts.collect();
        if !KNOWN_FIELDS.contains(&key) {
            return Err(GammaError::parse(line, format!("unknown field '{key}'")));
        }
        if value.len() != 1 {
            return Err(GammaError::parse(
                line,
                format!("field '{key}' takes exactly one value"),
            ));
        }
        if block
            .fields
            .insert(key.to_string(), (line, value[0].to_string()))
            .is_some()
        {
            return Err(GammaError::parse(line, format!("duplicate field '{key}'")));
        }
    }
    if let Some(block) = current {
        return Err(GammaError::parse(
            block.start_line,
            "block is not closed with 'end'",
        ));
    }
    Ok(blocks)
}

fn spec_from_block(block: &RawBlock) -> Result<KinematicSpec> {
    let agent_type: AgentType = block
        .text("type")?
        .parse()
        .map_err(|e: GammaError| GammaError::parse(block.start_line, e.to_string()))?;
    let model = match block.text("model")? {
        "holonomic" => KinematicModel::Holonomic {
            max_speed: block.number("max_speed")?,
            max_accel: block.optional_number("max_accel")?,
        },
        "car_like" => KinematicModel::CarLike {
            wheelbase: block.number("wheelbase")?,
            max_steer: block.number("max_steer")?,
            max_speed: block.number("max_speed")?,
            max_accel: block.number("max_accel")?,
        },
        other => {
            return Err(GammaError::parse(
                block.line_of("model"),
                format!("unknown model '{other}' (expected holonomic or car_like)"),
            ))
        }
    };
    let mut spec = KinematicSpec::new(
        agent_type,
        model,
        block.number("epsilon_max")?,
        block.number("tau")?,
    )
    .map_err(|e| GammaError::parse(block.start_line, e.to_string()))?;
    let speed_step = block.optional_number("speed_step")?;
    let angle_step = block.optional_number("angle_step_deg")?;
    let max_angle = block.optional_number("max_angle_deg")?;
    if speed_step.is_some() || angle_step.is_some() || max_angle.is_some() {
        let default_max = if spec.model.is_holonomic() {
            180.0
        } else {
            90.0
        };
        let grid = DiscretizationGrid::new(
            speed_step.unwrap_or(0.1),
            spec.model.max_speed(),
            angle_step.unwrap_or(5.0).to_radians(),
            max_angle.unwrap_or(default_max).to_radians(),
        )
        .map_err(|e| GammaError::parse(block.line_of("speed_step"), e.to_string()))?;
        spec.grid = Some(grid);
    }
    Ok(spec)
}

/// Parses a spec file (blocks without `K:`).
pub fn parse_specs(text: &str) -> Result<Vec<KinematicSpec>> {
    parse_blocks(text)?
        .iter()
        .map(|b| {
            if b.vertices.is_some() {
                return Err(GammaError::parse(
                    b.start_line,
                    "spec blocks must not contain a 'K:' section",
                ));
            }
            spec_from_block(b)
        })
        .collect()
}

/// Parses a profile file.
pub fn parse_profiles(text: &str) -> Result<ProfileSet> {
    let mut set = ProfileSet::new();
    for block in parse_blocks(text)? {
        let spec = spec_from_block(&block)?;
        let vertices = block.vertices.as_ref().ok_or_else(|| {
            GammaError::parse(
                block.end_line,
                format!(
                    "block starting at line {} is missing required field 'K'",
                    block.start_line
                ),
            )
        })?;
        let trackable_set = ConvexPolygon::new(vertices.clone())
            .map_err(|e| GammaError::parse(block.start_line, format!("trackable set: {e}")))?;
        if set.get(spec.agent_type).is_ok() {
            return Err(GammaError::parse(
                block.start_line,
                format!("duplicate profile for '{}'", spec.agent_type),
            ));
        }
        set.insert(KinematicProfile {
            spec,
            trackable_set,
        });
    }
    Ok(set)
}

fn write_spec_fields(out: &mut String, spec: &KinematicSpec) {
    let _ = writeln!(out, "type {}", spec.agent_type);
    match spec.model {
        KinematicModel::Holonomic {
            max_speed,
            max_accel,
        } => {
            let _ = writeln!(out, "model holonomic");
            let _ = writeln!(out, "max_speed {max_speed}");
            if let Some(a) = max_accel {
                let _ = writeln!(out, "max_accel {a}");
            }
        }
        KinematicModel::CarLike {
            wheelbase,
            max_steer,
            max_speed,
            max_accel,
        } => {
            let _ = writeln!(out, "model car_like");
            let _ = writeln!(out, "wheelbase {wheelbase}");
            let _ = writeln!(out, "max_steer {max_steer}");
            let _ = writeln!(out, "max_speed {max_speed}");
            let _ = writeln!(out, "max_accel {max_accel}");
        }
    }
    let _ = writeln!(out, "epsilon_max {}", spec.epsilon_max);
    let _ = writeln!(out, "tau {}", spec.tau);
}

/// Serializes profiles; floats use the shortest representation that parses back exactly.
pub fn write_profiles(set: &ProfileSet) -> String {
    let mut out = String::new();
    for profile in set.iter() {
        write_spec_fields(&mut out, &profile.spec);
        out.push_str("K:\n");
        for v in profile.trackable_set.vertices() {
            let _ = writeln!(out, "{} {}", v.x, v.y);
        }
        out.push_str("end\n\n");
    }
    out
}

pub fn load_profiles(path: impl AsRef<Path>) -> Result<ProfileSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| GammaError::io(path, e))?;
    parse_profiles(&text).map_err(|e| e.with_path(path))
}

pub fn save_profiles(set: &ProfileSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_profiles(set)).map_err(|e| GammaError::io(path, e))
}
