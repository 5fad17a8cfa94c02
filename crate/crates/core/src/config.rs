//! Engine configuration and its `key = value` file format.
//!
//! Lines are `key = value`; `#` starts a comment. List values are comma
//! separated. Unknown keys are rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::behavior::{BehaviorGrid, Intention};
use crate::error::{GammaError, Result};

/// Components that can be switched off for ablation studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    Kinematics,
    Polygons,
    Intention,
    Attention,
    Responsibility,
}

impl Factor {
    pub const ALL: [Factor; 5] = [
        Factor::Kinematics,
        Factor::Polygons,
        Factor::Intention,
        Factor::Attention,
        Factor::Responsibility,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Factor::Kinematics => "kinematics",
            Factor::Polygons => "polygons",
            Factor::Intention => "intention",
            Factor::Attention => "attention",
            Factor::Responsibility => "responsibility",
        }
    }
}

impl FromStr for Factor {
    type Err = GammaError;

    fn from_str(s: &str) -> Result<Self> {
        Factor::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| {
                GammaError::InvalidArgument(format!(
                    "unknown ablation factor '{s}' (valid: {})",
                    Factor::ALL.map(Factor::tag).join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ablation {
    pub use_kinematics: bool,
    pub use_polygons: bool,
    pub infer_intention: bool,
    pub infer_attention: bool,
    pub infer_responsibility: bool,
}

impl Default for Ablation {
    fn default() -> Self {
        Ablation {
            use_kinematics: true,
            use_polygons: true,
            infer_intention: true,
            infer_attention: true,
            infer_responsibility: true,
        }
    }
}

impl Ablation {
    pub fn full() -> Self {
        Ablation::default()
    }

    /// Full model with the given factors switched off.
    pub fn without(factors: &[Factor]) -> Self {
        let mut a = Ablation::default();
        for f in factors {
            a.disable(*f);
        }
        a
    }

    pub fn disable(&mut self, factor: Factor) {
        match factor {
            Factor::Kinematics => self.use_kinematics = false,
            Factor::Polygons => self.use_polygons = false,
            Factor::Intention => self.infer_intention = false,
            Factor::Attention => self.infer_attention = false,
            Factor::Responsibility => self.infer_responsibility = false,
        }
    }

    /// Parses a comma-separated factor list such as `kinematics,attention`.
    pub fn parse_list(list: &str) -> Result<Vec<Factor>> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Factor::from_str)
            .collect()
    }

    /// Candidate grid with disabled factors collapsed to their fixed value.
    pub fn apply_to_grid(&self, grid: &BehaviorGrid) -> BehaviorGrid {
        let mut g = grid.clone();
        if !self.infer_intention {
            g.intentions = vec![Intention::KeepVelocity];
        }
        if !self.infer_attention {
            g.r_front = vec![f64::INFINITY];
            g.r_rear = vec![f64::INFINITY];
        }
        if !self.infer_responsibility {
            g.c1 = vec![0.0];
            g.c2_pedestrian = vec![0.5];
            g.c2_vehicle = vec![0.5];
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    /// Simulation and frame period (s).
    pub dt: f64,
    /// Velocity-obstacle horizon (s).
    pub tau: f64,
    pub t_pred_steps: usize,
    /// Observed frames per agent.
    pub t_hist: usize,
    /// Standard deviation of the filtering likelihood (m).
    pub sigma: f64,
    /// Integration step of the low-level controllers (s).
    pub control_dt: f64,
    pub grid: BehaviorGrid,
    pub ablation: Ablation,
    pub profiles: Option<PathBuf>,
    pub seed: u64,
    /// Samples drawn in best-of-n evaluation.
    pub samples: usize,
    /// Noise on reference positions in best-of-n evaluation (m).
    pub sample_sigma: f64,
    pub threads: Option<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            dt: 0.4,
            tau: 2.0,
            t_pred_steps: 12,
            t_hist: 8,
            sigma: 0.1,
            control_dt: 0.02,
            grid: BehaviorGrid::default(),
            ablation: Ablation::default(),
            profiles: None,
            seed: 0,
            samples: 20,
            sample_sigma: 0.5,
            threads: None,
        }
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| GammaError::InvalidArgument(format!("'{key}' has invalid value '{value}'")))
}

fn float_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| {
            let x: f64 = match v.trim() {
                "inf" => f64::INFINITY,
                other => number(key, other)?,
            };
            if x.is_nan() {
                return Err(GammaError::InvalidArgument(format!("'{key}' contains NaN")));
            }
            Ok(x)
        })
        .collect()
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(GammaError::InvalidArgument(format!(
            "'{key}' expects true or false, got '{other}'"
        ))),
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| {
            if v.is_infinite() {
                "inf".to_string()
            } else {
                v.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

impl EngineConfig {
    /// Sets one option by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dt" => self.dt = number(key, value)?,
            "tau" => self.tau = number(key, value)?,
            "t_pred_steps" => self.t_pred_steps = number(key, value)?,
            "t_hist" => self.t_hist = number(key, value)?,
            "sigma" => self.sigma = number(key, value)?,
            "control_dt" => self.control_dt = number(key, value)?,
            "intentions" => {
                self.grid.intentions = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_>>()?
            }
            "r_front" => self.grid.r_front = float_list(key, value)?,
            "r_rear" => self.grid.r_rear = float_list(key, value)?,
            "c1" => self.grid.c1 = float_list(key, value)?,
            "c2_pedestrian" => self.grid.c2_pedestrian = float_list(key, value)?,
            "c2_vehicle" => self.grid.c2_vehicle = float_list(key, value)?,
            "use_kinematics" => self.ablation.use_kinematics = boolean(key, value)?,
            "use_polygons" => self.ablation.use_polygons = boolean(key, value)?,
            "infer_intention" => self.ablation.infer_intention = boolean(key, value)?,
            "infer_attention" => self.ablation.infer_attention = boolean(key, value)?,
            "infer_responsibility" => self.ablation.infer_responsibility = boolean(key, value)?,
            "profiles" => self.profiles = Some(PathBuf::from(value.trim())),
            "seed" => self.seed = number(key, value)?,
            "samples" => self.samples = number(key, value)?,
            "sample_sigma" => self.sample_sigma = number(key, value)?,
            "threads" => self.threads = Some(number(key, value)?),
            _ => {
                return Err(GammaError::InvalidArgument(format!(
                    "unknown config key '{key}'"
                )))
            }
        }
        Ok(())
    }

    /// Applies a config file on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                GammaError::parse(idx + 1, format!("expected 'key = value', got '{line}'"))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| GammaError::parse(idx + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = EngineConfig::default();
        c.merge_text(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| GammaError::io(path, e))?;
        EngineConfig::parse(&text).map_err(|e| e.with_path(path))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("tau", self.tau),
            ("sigma", self.sigma),
            ("control_dt", self.control_dt),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GammaError::InvalidArgument(format!(
                    "'{name}' must be positive, got {v}"
                )));
            }
        }
        if self.t_pred_steps == 0 || self.t_hist < 2 || self.samples == 0 {
            return Err(GammaError::InvalidArgument(
                "t_pred_steps and samples must be >= 1 and t_hist >= 2".into(),
            ));
        }
        if !(self.sample_sigma >= 0.0) {
            return Err(GammaError::InvalidArgument(
                "'sample_sigma' must be >= 0".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(GammaError::InvalidArgument("'threads' must be >= 1".into()));
        }
        self.grid.validate()
    }

    /// Prediction horizon in seconds.
    pub fn horizon(&self) -> f64 {
        self.dt * self.t_pred_steps as f64
    }

    /// Candidate grid after ablation.
    pub fn effective_grid(&self) -> BehaviorGrid {
        self.ablation.apply_to_grid(&self.grid)
    }

    /// Serializes every option in the file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dt = {}", self.dt);
        let _ = writeln!(out, "tau = {}", self.tau);
        let _ = writeln!(out, "t_pred_steps = {}", self.t_pred_steps);
        let _ = writeln!(out, "t_hist = {}", self.t_hist);
        let _ = writeln!(out, "sigma = {}", self.sigma);
        let _ = writeln!(out, "control_dt = {}", self.control_dt);
        let intentions: Vec<&str> = self.grid.intentions.iter().map(|i| i.tag()).collect();
        let _ = writeln!(out, "intentions = {}", intentions.join(","));
        let _ = writeln!(out, "r_front = {}", join(&self.grid.r_front));
        let _ = writeln!(out, "r_rear = {}", join(&self.grid.r_rear));
        let _ = writeln!(out, "c1 = {}", join(&self.grid.c1));
        let _ = writeln!(out, "c2_pedestrian = {}", join(&self.grid.c2_pedestrian));
        let _ = writeln!(out, "c2_vehicle = {}", join(&self.grid.c2_vehicle));
        let a = &self.ablation;
        let _ = writeln!(out, "use_kinematics = {}", a.use_kinematics);
        let _ = writeln!(out, "use_polygons = {}", a.use_polygons);
        let _ = writeln!(out, "infer_intention = {}", a.infer_intention);
        let _ = writeln!(out, "infer_attention = {}", a.infer_attention);
        let _ = writeln!(out, "infer_responsibility = {}", a.infer_responsibility);
        if let Some(p) = &self.profiles {
            let _ = writeln!(out, "profiles = {}", p.display());
        }
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "sample_sigma = {}", self.sample_sigma);
        if let Some(t) = self.threads {
            let _ = writeln!(out, "threads = {t}");
        }
        out
    }
}
