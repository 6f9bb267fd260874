//! JSON scenario files.
//!
//! Angles are stored in degrees, everything else in SI units. Points are
//! `[x, y]` arrays.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use vstar::scenario::StartPose;
use vstar::{
    Bounds, HeuristicKind, LatticeSpec, MovingObstacle, PlannerConfig, RadiusRule, Scenario, Shape,
    StaticObstacle, Vec2, VehicleParams,
};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}{field}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        field: &'static str,
        line: Option<usize>,
        message: String,
    },
}

impl LoadError {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            LoadError::Io { .. } => "io",
            LoadError::Parse { .. } => "parse",
            LoadError::Invalid { .. } => "invalid",
        }
    }
}

type Point = [f64; 2];

fn vec2(p: Point) -> Vec2 {
    Vec2::new(p[0], p[1])
}

fn point(v: Vec2) -> Point {
    [v.x, v.y]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    pub min: Point,
    pub max: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StaticFile {
    Circle {
        center: Point,
        radius: f64,
        #[serde(default)]
        margin: f64,
    },
    Rect {
        min: Point,
        max: Point,
        #[serde(default)]
        margin: f64,
    },
    Polygon {
        vertices: Vec<Point>,
        #[serde(default)]
        margin: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovingFile {
    /// Position at each step.
    pub trajectory: Vec<Point>,
    pub safety_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartFile {
    pub position: Point,
    #[serde(default)]
    pub heading_deg: f64,
    #[serde(default)]
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusRuleFile {
    Kinematic,
    LatticeRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleFile {
    pub wheelbase: f64,
    pub max_speed: f64,
    pub max_accel: f64,
    pub max_steer_deg: f64,
    pub comfort_decel: f64,
    pub steer_gain: f64,
    pub radius_rule: RadiusRuleFile,
    pub max_turn_rate_deg: Option<f64>,
}

impl Default for VehicleFile {
    fn default() -> Self {
        Self {
            wheelbase: 2.0,
            max_speed: 4.0,
            max_accel: 1.0,
            max_steer_deg: 30.0,
            comfort_decel: 2.0,
            steer_gain: 0.4,
            radius_rule: RadiusRuleFile::Kinematic,
            max_turn_rate_deg: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub spacing: f64,
}

impl Default for LatticeFile {
    fn default() -> Self {
        Self { spacing: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicName {
    Euclidean,
    Waterflow,
}

impl HeuristicName {
    pub fn kind(self) -> HeuristicKind {
        match self {
            HeuristicName::Euclidean => HeuristicKind::Euclidean,
            HeuristicName::Waterflow => HeuristicKind::Waterflow,
        }
    }

    pub fn of(kind: HeuristicKind) -> Self {
        match kind {
            HeuristicKind::Euclidean => HeuristicName::Euclidean,
            HeuristicKind::Waterflow => HeuristicName::Waterflow,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HeuristicName::Euclidean => "euclidean",
            HeuristicName::Waterflow => "waterflow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerFile {
    pub goal_tolerance: f64,
    pub tau: f64,
    pub t_max: Option<u32>,
    pub heuristic: HeuristicName,
    pub allow_waiting: bool,
    pub require_stop_at_goal: bool,
    pub field_cell: Option<f64>,
    pub speed_quantum: Option<f64>,
    pub edge_samples: Option<usize>,
    pub zone_focal_divisor: f64,
}

impl Default for PlannerFile {
    fn default() -> Self {
        Self::from_config(&PlannerConfig::default())
    }
}

impl PlannerFile {
    fn from_config(c: &PlannerConfig) -> Self {
        Self {
            goal_tolerance: c.goal_tolerance,
            tau: c.tau,
            t_max: c.t_max,
            heuristic: HeuristicName::of(c.heuristic),
            allow_waiting: c.allow_waiting,
            require_stop_at_goal: c.require_stop_at_goal,
            field_cell: c.field_cell,
            speed_quantum: c.speed_quantum,
            edge_samples: c.edge_samples,
            zone_focal_divisor: c.zone_focal_divisor,
        }
    }

    fn to_config(&self) -> PlannerConfig {
        PlannerConfig {
            goal_tolerance: self.goal_tolerance,
            tau: self.tau,
            t_max: self.t_max,
            heuristic: self.heuristic.kind(),
            allow_waiting: self.allow_waiting,
            require_stop_at_goal: self.require_stop_at_goal,
            field_cell: self.field_cell,
            speed_quantum: self.speed_quantum,
            edge_samples: self.edge_samples,
            zone_focal_divisor: self.zone_focal_divisor,
            record_expansions: false,
        }
    }
}

/// On-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub bounds: BoundsFile,
    #[serde(default)]
    pub static_obstacles: Vec<StaticFile>,
    #[serde(default)]
    pub moving_obstacles: Vec<MovingFile>,
    pub start: StartFile,
    pub goal: Point,
    #[serde(default)]
    pub vehicle: VehicleFile,
    #[serde(default)]
    pub lattice: LatticeFile,
    #[serde(default)]
    pub planner: PlannerFile,
}

impl ScenarioFile {
    /// Builds the in-memory scenario without validating it.
    pub fn to_scenario(&self) -> Result<Scenario, LoadError> {
        let v = &self.vehicle;
        let lattice = LatticeSpec::new(self.lattice.spacing).map_err(|e| LoadError::Invalid {
            field: "lattice",
            line: None,
            message: e.to_string(),
        })?;
        Ok(Scenario {
            bounds: Bounds::new(vec2(self.bounds.min), vec2(self.bounds.max)),
            static_obstacles: self
                .static_obstacles
                .iter()
                .map(|o| match o {
                    StaticFile::Circle {
                        center,
                        radius,
                        margin,
                    } => StaticObstacle::new(
                        Shape::Circle {
                            center: vec2(*center),
                            radius: *radius,
                        },
                        *margin,
                    ),
                    StaticFile::Rect { min, max, margin } => StaticObstacle::new(
                        Shape::Rect {
                            min: vec2(*min),
                            max: vec2(*max),
                        },
                        *margin,
                    ),
                    StaticFile::Polygon { vertices, margin } => StaticObstacle::new(
                        Shape::Polygon {
                            vertices: vertices.iter().copied().map(vec2).collect(),
                        },
                        *margin,
                    ),
                })
                .collect(),
            moving_obstacles: self
                .moving_obstacles
                .iter()
                .map(|m| MovingObstacle {
                    trajectory: m.trajectory.iter().copied().map(vec2).collect(),
                    safety_radius: m.safety_radius,
                })
                .collect(),
            start: StartPose {
                position: vec2(self.start.position),
                heading: self.start.heading_deg.to_radians(),
                speed: self.start.speed,
            },
            goal: vec2(self.goal),
            vehicle: VehicleParams {
                wheelbase: v.wheelbase,
                max_speed: v.max_speed,
                max_accel: v.max_accel,
                max_steer: v.max_steer_deg.to_radians(),
                comfort_decel: v.comfort_decel,
                steer_gain: v.steer_gain,
                radius_rule: match v.radius_rule {
                    RadiusRuleFile::Kinematic => RadiusRule::Kinematic,
                    RadiusRuleFile::LatticeRatio => RadiusRule::LatticeRatio,
                },
                max_turn_rate: v.max_turn_rate_deg.map(f64::to_radians),
            },
            lattice,
            planner: self.planner.to_config(),
        })
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let v = &s.vehicle;
        Self {
            bounds: BoundsFile {
                min: point(s.bounds.min),
                max: point(s.bounds.max),
            },
            static_obstacles: s
                .static_obstacles
                .iter()
                .map(|o| match &o.shape {
                    Shape::Circle { center, radius } => StaticFile::Circle {
                        center: point(*center),
                        radius: *radius,
                        margin: o.margin,
                    },
                    Shape::Rect { min, max } => StaticFile::Rect {
                        min: point(*min),
                        max: point(*max),
                        margin: o.margin,
                    },
                    Shape::Polygon { vertices } => StaticFile::Polygon {
                        vertices: vertices.iter().copied().map(point).collect(),
                        margin: o.margin,
                    },
                })
                .collect(),
            moving_obstacles: s
                .moving_obstacles
                .iter()
                .map(|m| MovingFile {
                    trajectory: m.trajectory.iter().copied().map(point).collect(),
                    safety_radius: m.safety_radius,
                })
                .collect(),
            start: StartFile {
                position: point(s.start.position),
                heading_deg: s.start.heading.to_degrees(),
                speed: s.start.speed,
            },
            goal: point(s.goal),
            vehicle: VehicleFile {
                wheelbase: v.wheelbase,
                max_speed: v.max_speed,
                max_accel: v.max_accel,
                max_steer_deg: v.max_steer.to_degrees(),
                comfort_decel: v.comfort_decel,
                steer_gain: v.steer_gain,
                radius_rule: match v.radius_rule {
                    RadiusRule::Kinematic => RadiusRuleFile::Kinematic,
                    RadiusRule::LatticeRatio => RadiusRuleFile::LatticeRatio,
                },
                max_turn_rate_deg: v.max_turn_rate.map(f64::to_degrees),
            },
            lattice: LatticeFile {
                spacing: s.lattice.spacing(),
            },
            planner: PlannerFile::from_config(&s.planner),
        }
    }
}

/// 1-based line of the first `"key":` in `text`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, LoadError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let scenario = file.to_scenario().map_err(|e| match e {
        LoadError::Invalid { field, message, .. } => LoadError::Invalid {
            field,
            line: key_line(text, field),
            message,
        },
        other => other,
    })?;
    scenario.validate().map_err(|e| LoadError::Invalid {
        field: e.field(),
        line: key_line(text, e.field()),
        message: e
            .to_string()
            .split_once(": ")
            .map_or(e.to_string(), |(_, m)| m.to_string()),
    })?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes")
}
