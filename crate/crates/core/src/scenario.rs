//! Scenario documents: JSON with a fixed schema (`scenarios/scenario.schema.json`).
//! Unknown keys are rejected; omitted sections take their defaults.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{Ellipse, Obstacle, Point2};
use crate::identification::SeaCurrent;
use crate::mission::{expand_mission, ComplexManeuver, MissionError, MissionPlan};
use crate::planner::SquareRegion;
use crate::sim::{simulate, RunOutput, SimInput, SonarConfig, VcsConfig, VehicleParams};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}, column {column}{}: {message}", if .path.is_empty() || .path == "." { String::new() } else { format!(" ({})", .path) })]
    Parse { line: usize, column: usize, path: String, message: String },
    #[error("{field}: {reason}")]
    Validation { field: String, reason: String },
    #[error("unsupported maneuver `{kind}` at {field}")]
    Unsupported { kind: String, field: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub min: Point2<f64>,
    pub max: Point2<f64>,
}

impl Bounds {
    pub fn contains(&self, p: Point2<f64>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    pub id: String,
    pub center: Point2<f64>,
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub theta: f64,
    /// Ingested and ignored: the simulation is planar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct World {
    pub bounds: Bounds,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    /// Sea current velocity `[vx, vy]`, m/s.
    #[serde(default)]
    pub current: Point2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManeuverSpec {
    Track {
        from: Point2<f64>,
        to: Point2<f64>,
        /// Defaults to the cruise speed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        speed: Option<f64>,
    },
    Meander {
        origin: Point2<f64>,
        heading: f64,
        length: f64,
        width: f64,
        lane_spacing: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        speed: Option<f64>,
    },
    /// Accepted by the parser so it can be refused with a clear message.
    GpsUpdate(serde_json::Map<String, serde_json::Value>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionSpec {
    pub maneuvers: Vec<ManeuverSpec>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub identify_targets: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSpec {
    pub position: Point2<f64>,
    pub course: f64,
}

fn default_max_time() -> f64 {
    600.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_time")]
    pub max_time: f64,
    pub world: World,
    #[serde(default)]
    pub vehicle: VehicleParams,
    #[serde(default)]
    pub sonar: SonarConfig,
    pub mission: MissionSpec,
    #[serde(default)]
    pub vcs: VcsConfig,
    /// Initial pose; defaults to the route start facing along the first leg.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartSpec>,
}

fn finite(p: Point2<f64>) -> bool {
    p.x.is_finite() && p.y.is_finite()
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ScenarioError::Parse { line: inner.line(), column: inner.column(), path, message: inner.to_string() }
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes") + "\n"
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.max_time > 0.0) || !self.max_time.is_finite() {
            return Err(invalid("max_time", "must be positive and finite"));
        }
        let b = &self.world.bounds;
        if !finite(b.min) || !finite(b.max) || !(b.min.x < b.max.x && b.min.y < b.max.y) {
            return Err(invalid("world.bounds", "min must be finite and below max on both axes"));
        }
        if !finite(self.world.current) {
            return Err(invalid("world.current", "must be finite"));
        }
        let mut ids = HashSet::new();
        for (k, o) in self.world.obstacles.iter().enumerate() {
            let f = |name: &str| format!("world.obstacles[{k}].{name}");
            if o.id.is_empty() {
                return Err(invalid(f("id"), "must not be empty"));
            }
            if !ids.insert(o.id.as_str()) {
                return Err(invalid(f("id"), format!("duplicate id `{}`", o.id)));
            }
            if !finite(o.center) {
                return Err(invalid(f("center"), "must be finite"));
            }
            if !(o.a > 0.0) || !o.a.is_finite() {
                return Err(invalid(f("a"), "must be positive and finite"));
            }
            if !(o.b > 0.0) || !o.b.is_finite() {
                return Err(invalid(f("b"), "must be positive and finite"));
            }
            if o.b > o.a {
                return Err(invalid(f("b"), "must not exceed a"));
            }
            if !o.theta.is_finite() {
                return Err(invalid(f("theta"), "must be finite"));
            }
            if o.height.is_some_and(|h| !(h >= 0.0)) {
                return Err(invalid(f("height"), "must be non-negative"));
            }
        }
        self.vehicle.check().map_err(|(f, r)| invalid(format!("vehicle.{f}"), r))?;
        self.sonar.check().map_err(|(f, r)| invalid(format!("sonar.{f}"), r))?;
        self.vcs.check().map_err(|(f, r)| invalid(format!("vcs.{f}"), r))?;

        if self.mission.maneuvers.is_empty() {
            return Err(invalid("mission.maneuvers", "must not be empty"));
        }
        for (k, m) in self.mission.maneuvers.iter().enumerate() {
            let field = format!("mission.maneuvers[{k}]");
            let cm = self
                .complex(m)
                .ok_or_else(|| ScenarioError::Unsupported { kind: "gps_update".into(), field: field.clone() })?;
            let speed = match cm {
                ComplexManeuver::Track { speed, .. } | ComplexManeuver::Meander { speed, .. } => speed,
                ComplexManeuver::GpsUpdate => unreachable!(),
            };
            if speed > self.vehicle.u_max {
                return Err(invalid(format!("{field}.speed"), "must not exceed vehicle.u_max"));
            }
            let plan = expand_mission(&[cm], BTreeSet::new()).map_err(|e| match e {
                MissionError::InvalidField { field: f, reason } => {
                    invalid(format!("mission.{}", f.replacen("maneuvers[0]", &format!("maneuvers[{k}]"), 1)), reason)
                }
                other => invalid(field.clone(), other.to_string()),
            })?;
            if !plan.waypoints().iter().all(|&p| b.contains(p)) {
                return Err(invalid(field, "route leaves the world bounds"));
            }
        }
        for id in &self.mission.identify_targets {
            if !self.world.obstacles.iter().any(|o| &o.id == id) {
                return Err(invalid("mission.identify_targets", format!("unknown obstacle `{id}`")));
            }
        }
        if let Some(s) = &self.start {
            if !finite(s.position) || !b.contains(s.position) {
                return Err(invalid("start.position", "must lie inside the world bounds"));
            }
            if !s.course.is_finite() {
                return Err(invalid("start.course", "must be finite"));
            }
        }
        Ok(())
    }

    fn complex(&self, m: &ManeuverSpec) -> Option<ComplexManeuver<f64>> {
        let cruise = self.vehicle.u_cruise;
        match *m {
            ManeuverSpec::Track { from, to, speed } => {
                Some(ComplexManeuver::Track { from, to, speed: speed.unwrap_or(cruise) })
            }
            ManeuverSpec::Meander { origin, heading, length, width, lane_spacing, speed } => {
                Some(ComplexManeuver::Meander {
                    origin,
                    heading,
                    length,
                    width,
                    lane_spacing,
                    speed: speed.unwrap_or(cruise),
                })
            }
            ManeuverSpec::GpsUpdate(_) => None,
        }
    }

    /// True obstacles. Depth fields are dropped with a warning.
    pub fn obstacles(&self) -> Result<Vec<Obstacle<f64>>, ScenarioError> {
        self.world
            .obstacles
            .iter()
            .enumerate()
            .map(|(k, o)| {
                if o.z_base.is_some() || o.height.is_some() {
                    log::warn!("obstacle `{}`: depth fields are ignored in the planar simulation", o.id);
                }
                let e = Ellipse::new(o.center, o.a, o.b, o.theta)
                    .map_err(|e| invalid(format!("world.obstacles[{k}]"), e.to_string()))?;
                Ok(Obstacle::new(o.id.clone(), e))
            })
            .collect()
    }

    pub fn mission_plan(&self) -> Result<MissionPlan<f64>, ScenarioError> {
        let ms = self
            .mission
            .maneuvers
            .iter()
            .enumerate()
            .map(|(k, m)| {
                self.complex(m).ok_or_else(|| ScenarioError::Unsupported {
                    kind: "gps_update".into(),
                    field: format!("mission.maneuvers[{k}]"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        expand_mission(&ms, self.mission.identify_targets.clone()).map_err(|e| invalid("mission", e.to_string()))
    }

    pub fn current(&self) -> SeaCurrent<f64> {
        SeaCurrent::new(self.world.current.x, self.world.current.y)
    }

    /// Smallest square anchored at `bounds.min` covering the bounds.
    pub fn region(&self) -> SquareRegion<f64> {
        let b = &self.world.bounds;
        SquareRegion::new(b.min, (b.max.x - b.min.x).max(b.max.y - b.min.y))
    }

    pub fn sim_input(&self) -> Result<SimInput, ScenarioError> {
        self.validate()?;
        Ok(SimInput {
            world: self.obstacles()?,
            plan: self.mission_plan()?,
            vehicle: self.vehicle,
            sonar: self.sonar,
            vcs: self.vcs,
            current: self.current(),
            region: self.region(),
            seed: self.seed,
            max_time: self.max_time,
            start: self.start.map(|s| (s.position, s.course)),
        })
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    Scenario::from_json(&text)
}

pub fn run_scenario(s: &Scenario) -> Result<RunOutput, ScenarioError> {
    Ok(simulate(&s.sim_input()?))
}
