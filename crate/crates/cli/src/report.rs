//! Run statistics and per-record output files.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use vstar::{PlanResult, State, TrajectorySample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub heuristic: String,
    pub status: String,
    pub nodes_expanded: usize,
    pub nodes_generated: usize,
    /// Field construction plus search, seconds.
    pub wall_time: f64,
    pub path_cost_steps: Option<u32>,
    pub path_cost_seconds: Option<f64>,
    pub horizon: u32,
}

impl RunReport {
    pub fn new(scenario: &str, heuristic: &str, result: &PlanResult, tau: f64, wall_time: f64) -> Self {
        let found = !result.waypoints.is_empty();
        Self {
            scenario: scenario.to_string(),
            heuristic: heuristic.to_string(),
            status: result.status.as_str().to_string(),
            nodes_expanded: result.stats.nodes_expanded,
            nodes_generated: result.stats.nodes_generated,
            wall_time,
            path_cost_steps: found.then_some(result.stats.path_cost_steps),
            path_cost_seconds: found.then(|| result.path_cost_seconds(tau)),
            horizon: result.horizon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub t: u32,
    pub x: f64,
    pub y: f64,
    pub theta_deg: f64,
    pub v: f64,
}

impl From<&State> for PathRecord {
    fn from(s: &State) -> Self {
        Self {
            t: s.t,
            x: s.position.x,
            y: s.position.y,
            theta_deg: s.heading.to_degrees(),
            v: s.speed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub time: f64,
    pub fx: f64,
    pub fy: f64,
    pub rx: f64,
    pub ry: f64,
    pub theta_deg: f64,
    pub delta_deg: f64,
    pub rear_speed: f64,
}

impl From<&TrajectorySample> for TrajectoryRecord {
    fn from(s: &TrajectorySample) -> Self {
        Self {
            time: s.time,
            fx: s.front.x,
            fy: s.front.y,
            rx: s.rear.x,
            ry: s.rear.y,
            theta_deg: s.theta.to_degrees(),
            delta_deg: s.delta.to_degrees(),
            rear_speed: s.rear_speed,
        }
    }
}

/// Writes one JSON object per line.
pub fn write_jsonl<T: Serialize, W: Write>(
    mut out: W,
    records: impl IntoIterator<Item = T>,
) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, &r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
