use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{GammaError, Result};
use crate::geometry::{ConvexPolygon, Vec2};
use crate::kinematics::AgentType;

use super::{Observation, TrajectoryDataset};

const DEFAULT_PERIOD: f64 = 0.4;

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .collect()
}

fn real(text: &str, line: usize, what: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            GammaError::parse(
                line,
                format!("row {line}: {what} '{text}' is not a finite number"),
            )
        })
}

fn integer(text: &str, line: usize, what: &str) -> Result<i64> {
    if let Ok(v) = text.parse::<i64>() {
        return Ok(v);
    }
    let v = real(text, line, what)?;
    if v.fract() != 0.0 || v.abs() > 9.0e15 {
        return Err(GammaError::parse(
            line,
            format!("row {line}: {what} '{text}' is not an integer"),
        ));
    }
    Ok(v as i64)
}

fn agent_id(text: &str, line: usize) -> Result<u64> {
    let v = integer(text, line, "agent id")?;
    u64::try_from(v)
        .map_err(|_| GammaError::parse(line, format!("row {line}: agent id '{text}' is negative")))
}

fn optional(text: &str, line: usize, what: &str) -> Result<Option<f64>> {
    match text {
        "-" | "nan" | "NaN" => Ok(None),
        _ => real(text, line, what).map(Some),
    }
}

fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

fn push_sorted(
    dataset: &mut TrajectoryDataset,
    last_frame: &mut Option<i64>,
    warned: &mut bool,
    frame: i64,
    obs: Observation,
    line: usize,
) -> Result<()> {
    if last_frame.is_some_and(|l| frame < l) && !*warned {
        log::warn!("frames are not monotone (row {line}); sorting");
        *warned = true;
    }
    *last_frame = Some(frame);
    dataset
        .insert(frame, obs)
        .map_err(|e| GammaError::parse(line, format!("row {line}: {e}")))
}

/// Parses `frame agent x y` rows; all agents are pedestrians.
pub fn parse_homogeneous(text: &str) -> Result<TrajectoryDataset> {
    let mut dataset = TrajectoryDataset::new(DEFAULT_PERIOD);
    let mut last = None;
    let mut warned = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = content(raw);
        if row.is_empty() {
            continue;
        }
        let f = fields(row);
        if f.len() != 4 {
            return Err(GammaError::parse(
                line,
                format!(
                    "row {line}: expected 4 fields 'frame agent x y', found {}",
                    f.len()
                ),
            ));
        }
        let frame = integer(f[0], line, "frame")?;
        let id = agent_id(f[1], line)?;
        let position = Vec2::new(real(f[2], line, "x")?, real(f[3], line, "y")?);
        push_sorted(
            &mut dataset,
            &mut last,
            &mut warned,
            frame,
            Observation::pedestrian(id, position),
            line,
        )?;
    }
    Ok(dataset)
}

/// Parses typed rows `frame agent type x y heading length width` and
/// `OBSTACLE` blocks.
pub fn parse_heterogeneous(text: &str) -> Result<TrajectoryDataset> {
    let mut dataset = TrajectoryDataset::new(DEFAULT_PERIOD);
    let mut last = None;
    let mut warned = false;
    let mut obstacle: Option<(usize, Vec<Vec2>)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = content(raw);
        if row.is_empty() {
            continue;
        }
        if let Some((start, vertices)) = obstacle.as_mut() {
            if row == "END" {
                let poly = ConvexPolygon::new(std::mem::take(vertices))
                    .map_err(|e| GammaError::parse(*start, format!("obstacle: {e}")))?;
                dataset.obstacles.push(poly);
                obstacle = None;
                continue;
            }
            let f = fields(row);
            if f.len() != 2 {
                return Err(GammaError::parse(
                    line,
                    format!("row {line}: expected obstacle vertex 'x y'"),
                ));
            }
            vertices.push(Vec2::new(real(f[0], line, "x")?, real(f[1], line, "y")?));
            continue;
        }
        if row == "OBSTACLE" {
            obstacle = Some((line, Vec::new()));
            continue;
        }
        if let Some(rest) = row.strip_prefix("frame_period") {
            dataset.frame_period = real(rest.trim(), line, "frame period")?;
            if dataset.frame_period <= 0.0 {
                return Err(GammaError::parse(line, "frame period must be positive"));
            }
            continue;
        }
        let f = fields(row);
        if f.len() != 8 {
            return Err(GammaError::parse(
                line,
                format!(
                    "row {line}: expected 8 fields 'frame agent type x y heading length width', found {}",
                    f.len()
                ),
            ));
        }
        let frame = integer(f[0], line, "frame")?;
        let id = agent_id(f[1], line)?;
        let agent_type: AgentType = f[2]
            .parse()
            .map_err(|e: GammaError| GammaError::parse(line, format!("row {line}: {e}")))?;
        let position = Vec2::new(real(f[3], line, "x")?, real(f[4], line, "y")?);
        let heading = optional(f[5], line, "heading")?;
        let dims = match (
            optional(f[6], line, "length")?,
            optional(f[7], line, "width")?,
        ) {
            (Some(l), Some(w)) if l > 0.0 && w > 0.0 => Some((l, w)),
            (None, None) => None,
            _ => {
                return Err(GammaError::parse(
                    line,
                    format!("row {line}: length and width must both be positive or both '-'"),
                ))
            }
        };
        let obs = Observation {
            id,
            agent_type,
            position,
            heading,
            dims,
        };
        push_sorted(&mut dataset, &mut last, &mut warned, frame, obs, line)?;
    }
    if let Some((start, _)) = obstacle {
        return Err(GammaError::parse(
            start,
            "OBSTACLE block is not closed with END",
        ));
    }
    Ok(dataset)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// Serializes in the heterogeneous format; floats use the shortest
/// representation that parses back exactly.
pub fn write_heterogeneous(dataset: &TrajectoryDataset) -> String {
    let mut out = String::new();
    if dataset.frame_period != DEFAULT_PERIOD {
        let _ = writeln!(out, "frame_period {}", dataset.frame_period);
    }
    for poly in &dataset.obstacles {
        out.push_str("OBSTACLE\n");
        for v in poly.vertices() {
            let _ = writeln!(out, "{} {}", v.x, v.y);
        }
        out.push_str("END\n");
    }
    for (frame, rows) in dataset.frames() {
        for o in rows {
            let _ = writeln!(
                out,
                "{frame} {} {} {} {} {} {} {}",
                o.id,
                o.agent_type,
                o.position.x,
                o.position.y,
                opt(o.heading),
                opt(o.dims.map(|d| d.0)),
                opt(o.dims.map(|d| d.1)),
            );
        }
    }
    out
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| GammaError::io(path, e))
}

pub fn load_homogeneous(path: impl AsRef<Path>) -> Result<TrajectoryDataset> {
    let path = path.as_ref();
    parse_homogeneous(&read(path)?).map_err(|e| e.with_path(path))
}

pub fn load_heterogeneous(path: impl AsRef<Path>) -> Result<TrajectoryDataset> {
    let path = path.as_ref();
    parse_heterogeneous(&read(path)?).map_err(|e| e.with_path(path))
}

/// Parses either format, picking homogeneous when the first row has four
/// fields.
pub fn parse_dataset(text: &str) -> Result<TrajectoryDataset> {
    let first = text.lines().map(content).find(|r| !r.is_empty());
    match first {
        Some(row) if fields(row).len() == 4 => parse_homogeneous(text),
        _ => parse_heterogeneous(text),
    }
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<TrajectoryDataset> {
    let path = path.as_ref();
    parse_dataset(&read(path)?).map_err(|e| e.with_path(path))
}

pub fn save_heterogeneous(dataset: &TrajectoryDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_heterogeneous(dataset)).map_err(|e| GammaError::io(path, e))
}
