//! Scenario files, run reports, SVG figures and the benchmark harness for the
//! `vstar` planner.

pub mod bench;
pub mod generate;
pub mod pgm;
pub mod report;
pub mod run;
pub mod scenario_file;
pub mod svg;

pub use run::{run_plan, write_artifacts, RunOptions, RunOutput};
pub use scenario_file::{load_scenario, parse_scenario, LoadError};
