//! One planner run and its output files.

use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::Path;
use std::time::Instant;

use vstar::{
    build_waterflow, plan_with_field, synthesize, HeuristicField, HeuristicKind, PlanError, PlanResult,
    PlannerConfig, Scenario, TrajectoryError, TrajectorySample,
};

use crate::report::{write_jsonl, PathRecord, RunReport, TrajectoryRecord};
use crate::scenario_file::HeuristicName;
use crate::svg::{render, Figure};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("trajectory: {0}")]
    Trajectory(TrajectoryError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the scenario's heuristic.
    pub heuristic: Option<HeuristicKind>,
    pub record_expansions: bool,
    /// Samples per step for the wheel traces; `None` skips synthesis.
    pub samples_per_step: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub config: PlannerConfig,
    pub result: PlanResult,
    pub field: Option<HeuristicField>,
    pub trajectory: Vec<TrajectorySample>,
}

pub fn run_plan(name: &str, scenario: &Scenario, opts: &RunOptions) -> Result<RunOutput, RunError> {
    let mut config = scenario.planner.clone();
    if let Some(h) = opts.heuristic {
        config.heuristic = h;
    }
    config.record_expansions = opts.record_expansions;

    let started = Instant::now();
    let field = match config.heuristic {
        HeuristicKind::Waterflow => {
            Some(build_waterflow(scenario, config.field_cell(scenario)).map_err(PlanError::Field)?)
        }
        HeuristicKind::Euclidean => None,
    };
    let result = plan_with_field(scenario, &config, field.as_ref())?;
    let wall_time = started.elapsed().as_secs_f64();

    let trajectory = match opts.samples_per_step {
        Some(n) if !result.waypoints.is_empty() => {
            let dt = config.tau / f64::from(n.max(1));
            synthesize(&result.waypoints, &scenario.vehicle, &config, dt).map_err(RunError::Trajectory)?
        }
        _ => Vec::new(),
    };
    let heuristic = HeuristicName::of(config.heuristic).as_str();
    let report = RunReport::new(name, heuristic, &result, config.tau, wall_time);
    Ok(RunOutput {
        report,
        config,
        result,
        field,
        trajectory,
    })
}

/// SVG text for a finished run. The heat layer uses the run's field, or a
/// freshly built one when the run did not need it.
pub fn figure_svg(scenario: &Scenario, out: &RunOutput) -> String {
    let built;
    let field = match &out.field {
        Some(f) => Some(f),
        None => {
            built = build_waterflow(scenario, out.config.field_cell(scenario)).ok();
            built.as_ref()
        }
    };
    let fig = Figure {
        field,
        expansions: Some(&out.result.expansions),
        path: Some(&out.result.waypoints),
        trajectory: Some(&out.trajectory),
        snapshot_every: 5,
    };
    render(scenario, &fig)
}

/// Writes `path.jsonl`, `trajectory.jsonl`, `stats.json` and optionally `plan.svg`.
pub fn write_artifacts(dir: &Path, scenario: &Scenario, out: &RunOutput, svg: bool) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_jsonl(
        BufWriter::new(File::create(dir.join("path.jsonl"))?),
        out.result.waypoints.iter().map(PathRecord::from),
    )?;
    write_jsonl(
        BufWriter::new(File::create(dir.join("trajectory.jsonl"))?),
        out.trajectory.iter().map(TrajectoryRecord::from),
    )?;
    let stats = serde_json::to_string_pretty(&out.report).map_err(io::Error::other)?;
    fs::write(dir.join("stats.json"), stats + "\n")?;
    if svg {
        fs::write(dir.join("plan.svg"), figure_svg(scenario, out))?;
    }
    Ok(())
}
