//! Python bindings: geometry, the velocity program, kinematic profiles,
//! datasets, simulation, prediction and evaluation.

use std::collections::BTreeMap;

use gamma_core::config::{Ablation, EngineConfig};
use gamma_core::dataset::{self, TrajectoryDataset};
use gamma_core::engine::{self, parse_scenario};
use gamma_core::eval::{self, Mode};
use gamma_core::geometry::{self, build_velocity_obstacle, closest_boundary_point};
use gamma_core::kinematics::{
    parse_profiles, parse_specs, write_profiles, AgentType, KinematicProfile, ProfileSet,
};
use gamma_core::lp::VelocityProgram;
use gamma_core::{ConvexPolygon, GammaError, HalfPlane, Vec2};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

type Point = (f64, f64);

fn err(e: GammaError) -> PyErr {
    match e {
        GammaError::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn v(p: Point) -> Vec2 {
    Vec2::new(p.0, p.1)
}

fn pt(v: Vec2) -> Point {
    (v.x, v.y)
}

fn agent_type(tag: &str) -> PyResult<AgentType> {
    tag.parse().map_err(err)
}

/// Convex polygon with counter-clockwise vertices.
#[pyclass(name = "Polygon", frozen)]
struct PyPolygon(ConvexPolygon);

#[pymethods]
impl PyPolygon {
    #[new]
    fn new(vertices: Vec<Point>) -> PyResult<Self> {
        ConvexPolygon::new(vertices.into_iter().map(v).collect())
            .map(PyPolygon)
            .map_err(err)
    }

    /// Axis-aligned rectangle centered on the origin.
    #[staticmethod]
    fn rectangle(length: f64, width: f64) -> PyResult<Self> {
        ConvexPolygon::rectangle(length, width)
            .map(PyPolygon)
            .map_err(err)
    }

    #[getter]
    fn vertices(&self) -> Vec<Point> {
        self.0.vertices().iter().map(|&p| pt(p)).collect()
    }

    fn area(&self) -> f64 {
        self.0.area()
    }

    #[pyo3(signature = (point, tol = 1e-9))]
    fn contains(&self, point: Point, tol: f64) -> bool {
        self.0.contains(v(point), tol)
    }

    fn translated(&self, offset: Point) -> Self {
        PyPolygon(self.0.translated(v(offset)))
    }

    fn rotated(&self, angle: f64) -> Self {
        PyPolygon(self.0.rotated(angle))
    }

    fn overlaps(&self, other: &PyPolygon) -> bool {
        self.0.overlaps(&other.0, 0.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Polygon({:?})", self.vertices())
    }
}

#[pyfunction]
fn convex_hull(points: Vec<Point>) -> PyResult<PyPolygon> {
    let pts: Vec<Vec2> = points.into_iter().map(v).collect();
    geometry::convex_hull(&pts).map(PyPolygon).map_err(err)
}

#[pyfunction]
fn minkowski_sum(p: &PyPolygon, q: &PyPolygon) -> PyResult<PyPolygon> {
    geometry::minkowski_sum(&p.0, &q.0)
        .map(PyPolygon)
        .map_err(err)
}

/// `B ⊖ A`: relative geometry of `b` seen from `a`.
#[pyfunction]
fn minkowski_difference(b: &PyPolygon, a: &PyPolygon) -> PyResult<PyPolygon> {
    geometry::minkowski_difference(&b.0, &a.0)
        .map(PyPolygon)
        .map_err(err)
}

/// Velocity obstacle of a relative geometry over horizon `tau`.
#[pyclass(name = "VelocityObstacle", frozen)]
struct PyVelocityObstacle(geometry::VelocityObstacle);

#[pymethods]
impl PyVelocityObstacle {
    #[new]
    fn new(relative: &PyPolygon, tau: f64) -> PyResult<Self> {
        build_velocity_obstacle(&relative.0, tau)
            .map(PyVelocityObstacle)
            .map_err(err)
    }

    #[pyo3(signature = (v_rel, tol = 0.0))]
    fn contains(&self, v_rel: Point, tol: f64) -> bool {
        self.0.contains(v(v_rel), tol)
    }

    /// Closest boundary point and the outward normal there.
    fn closest_boundary_point(&self, v_rel: Point) -> (Point, Point) {
        let (p, n) = closest_boundary_point(&self.0, v(v_rel));
        (pt(p), pt(n))
    }
}

/// Closest velocity to `target` inside the half-planes `(point, normal)` and
/// the kinematic polygon. Returns `(velocity, feasible, max_violation)`.
#[pyfunction]
fn solve_velocity(
    target: Point,
    half_planes: Vec<(Point, Point)>,
    kinematic: &PyPolygon,
) -> PyResult<(Point, bool, f64)> {
    let planes = half_planes
        .into_iter()
        .map(|(p, n)| HalfPlane::new(v(p), v(n)))
        .collect::<gamma_core::Result<Vec<_>>>()
        .map_err(err)?;
    let s = VelocityProgram::new(v(target), planes, kinematic.0.clone())
        .solve()
        .map_err(err)?;
    Ok((pt(s.velocity), s.feasible, s.max_violation))
}

/// Kinematic profiles keyed by agent type.
#[pyclass(name = "Profiles", frozen)]
struct PyProfiles(ProfileSet);

#[pymethods]
impl PyProfiles {
    #[staticmethod]
    fn builtin() -> Self {
        PyProfiles(ProfileSet::builtin())
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_profiles(text).map(PyProfiles).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        ProfileSet::load(path).map(PyProfiles).map_err(err)
    }

    /// Estimates trackable sets for every type in a spec file's text.
    #[staticmethod]
    fn estimate(spec_text: &str) -> PyResult<Self> {
        let specs = parse_specs(spec_text).map_err(err)?;
        specs
            .into_iter()
            .map(KinematicProfile::estimate)
            .collect::<gamma_core::Result<ProfileSet>>()
            .map(PyProfiles)
            .map_err(err)
    }

    fn types(&self) -> Vec<String> {
        self.0.iter().map(|p| p.agent_type().to_string()).collect()
    }

    /// Body-frame trackable set of a type.
    fn trackable_set(&self, agent_type: &str) -> PyResult<PyPolygon> {
        let p = self.0.get(self::agent_type(agent_type)?).map_err(err)?;
        Ok(PyPolygon(p.trackable_set.clone()))
    }

    fn to_text(&self) -> String {
        write_profiles(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Frame-indexed observations of typed agents.
#[pyclass(name = "Dataset", frozen)]
struct PyDataset(TrajectoryDataset);

#[pymethods]
impl PyDataset {
    /// Parses either the `frame agent x y` or the typed row format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        dataset::parse_dataset(text).map(PyDataset).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        dataset::load_dataset(path).map(PyDataset).map_err(err)
    }

    fn to_text(&self) -> String {
        dataset::write_heterogeneous(&self.0)
    }

    fn frame_ids(&self) -> Vec<i64> {
        self.0.frame_ids()
    }

    /// `(id, type, x, y)` rows of one frame.
    fn observations(&self, frame: i64) -> PyResult<Vec<(u64, String, f64, f64)>> {
        let rows = self
            .0
            .frame(frame)
            .ok_or_else(|| err(GammaError::UnknownFrame(frame)))?;
        Ok(rows
            .iter()
            .map(|o| (o.id, o.agent_type.to_string(), o.position.x, o.position.y))
            .collect())
    }

    #[getter]
    fn num_frames(&self) -> usize {
        self.0.num_frames()
    }

    #[getter]
    fn num_observations(&self) -> usize {
        self.0.num_observations()
    }
}

#[pyclass(name = "Evaluation", frozen)]
struct PyEvaluation(eval::Evaluation);

#[pymethods]
impl PyEvaluation {
    #[getter]
    fn ade(&self) -> f64 {
        self.0.ade
    }

    #[getter]
    fn fde(&self) -> f64 {
        self.0.fde
    }

    #[getter]
    fn windows(&self) -> usize {
        self.0.windows
    }

    #[getter]
    fn mode(&self) -> String {
        self.0.mode.to_string()
    }

    /// `(window, agent, ade, fde)` per predicted agent.
    fn results(&self) -> Vec<(usize, u64, f64, f64)> {
        self.0
            .results
            .iter()
            .map(|r| (r.window, r.agent, r.ade, r.fde))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Evaluation(mode={}, ade={:.4}, fde={:.4}, windows={})",
            self.0.mode, self.0.ade, self.0.fde, self.0.windows
        )
    }
}

/// Prediction engine. `config` holds `key = value` lines; `ablate` lists
/// factors to disable.
#[pyclass(name = "Engine", frozen)]
struct PyEngine(engine::Engine);

#[pymethods]
impl PyEngine {
    #[new]
    #[pyo3(signature = (config = None, profiles = None, ablate = None))]
    fn new(
        config: Option<&str>,
        profiles: Option<&PyProfiles>,
        ablate: Option<&str>,
    ) -> PyResult<Self> {
        let mut c = match config {
            Some(text) => EngineConfig::parse(text).map_err(err)?,
            None => EngineConfig::default(),
        };
        if let Some(list) = ablate {
            for f in Ablation::parse_list(list).map_err(err)? {
                c.ablation.disable(f);
            }
        }
        let profiles = match profiles {
            Some(p) => p.0.clone(),
            None => match &c.profiles {
                Some(path) => ProfileSet::load(path).map_err(err)?,
                None => ProfileSet::builtin(),
            },
        };
        engine::Engine::new(c, profiles).map(PyEngine).map_err(err)
    }

    /// Simulates a scenario given as text.
    #[pyo3(signature = (scenario, steps, seed = 0))]
    fn simulate(&self, scenario: &str, steps: usize, seed: u64) -> PyResult<PyDataset> {
        let s = parse_scenario(scenario).map_err(err)?;
        engine::simulate(&self.0, &s, steps, seed)
            .map(PyDataset)
            .map_err(err)
    }

    /// Predicted positions per agent after filtering up to `frame` (default:
    /// the last frame). Best-of-N modes return a list of such maps.
    #[pyo3(signature = (data, frame = None, mode = "det", seed = 0))]
    fn predict(
        &self,
        data: &PyDataset,
        frame: Option<i64>,
        mode: &str,
        seed: u64,
    ) -> PyResult<Vec<BTreeMap<u64, Vec<Point>>>> {
        let mode = Mode::parse(mode, self.0.config().sample_sigma).map_err(err)?;
        let frame = match frame.or_else(|| data.0.frame_ids().last().copied()) {
            Some(f) => f,
            None => return Err(PyValueError::new_err("empty dataset")),
        };
        let samples = eval::predict_at(&data.0, &self.0, frame, mode, seed).map_err(err)?;
        Ok(samples
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|(id, track)| (id, track.into_iter().map(pt).collect()))
                    .collect()
            })
            .collect())
    }

    #[pyo3(signature = (data, mode = "det", seed = 0))]
    fn evaluate(
        &self,
        py: Python<'_>,
        data: &PyDataset,
        mode: &str,
        seed: u64,
    ) -> PyResult<PyEvaluation> {
        let mode = Mode::parse(mode, self.0.config().sample_sigma).map_err(err)?;
        py.detach(|| eval::evaluate(&data.0, &self.0, mode, seed))
            .map(PyEvaluation)
            .map_err(err)
    }
}

/// `(ade, fde)` of a predicted track against the truth.
#[pyfunction]
fn ade_fde(predicted: Vec<Point>, truth: Vec<Point>) -> PyResult<(f64, f64)> {
    let p: Vec<Vec2> = predicted.into_iter().map(v).collect();
    let t: Vec<Vec2> = truth.into_iter().map(v).collect();
    eval::ade_fde(&p, &t).map_err(err)
}

#[pymodule]
fn gamma(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolygon>()?;
    m.add_class::<PyVelocityObstacle>()?;
    m.add_class::<PyProfiles>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyEvaluation>()?;
    m.add_class::<PyEngine>()?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(minkowski_sum, m)?)?;
    m.add_function(wrap_pyfunction!(minkowski_difference, m)?)?;
    m.add_function(wrap_pyfunction!(solve_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(ade_fde, m)?)?;
    Ok(())
}
