//! Heuristic comparison: every scenario is planned with both heuristics and
//! the median wall time over the repetitions is reported.

use std::io;

use serde::Serialize;
use vstar::{HeuristicKind, Scenario};

use crate::run::{run_plan, RunError, RunOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub scenario: String,
    pub heuristic: String,
    pub status: String,
    pub nodes_expanded: usize,
    pub nodes_generated: usize,
    pub median_time_s: f64,
    pub path_cost_steps: Option<u32>,
    pub path_cost_s: Option<f64>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

pub fn run_benchmark(scenarios: &[(String, Scenario)], reps: usize) -> Result<Vec<BenchRow>, RunError> {
    let reps = reps.max(1);
    let mut rows = Vec::new();
    for (name, scenario) in scenarios {
        for kind in [HeuristicKind::Euclidean, HeuristicKind::Waterflow] {
            let opts = RunOptions {
                heuristic: Some(kind),
                ..RunOptions::default()
            };
            let mut times = Vec::with_capacity(reps);
            let mut last = None;
            for _ in 0..reps {
                let out = run_plan(name, scenario, &opts)?;
                times.push(out.report.wall_time);
                last = Some(out.report);
            }
            let r = last.expect("at least one repetition");
            rows.push(BenchRow {
                scenario: r.scenario,
                heuristic: r.heuristic,
                status: r.status,
                nodes_expanded: r.nodes_expanded,
                nodes_generated: r.nodes_generated,
                median_time_s: median(times),
                path_cost_steps: r.path_cost_steps,
                path_cost_s: r.path_cost_seconds,
            });
        }
    }
    Ok(rows)
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let header = [
        "scenario",
        "heuristic",
        "status",
        "nodes",
        "generated",
        "time_s",
        "cost_s",
    ];
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.scenario.clone(),
                r.heuristic.clone(),
                r.status.clone(),
                r.nodes_expanded.to_string(),
                r.nodes_generated.to_string(),
                format!("{:.4}", r.median_time_s),
                r.path_cost_s.map_or("-".to_string(), |c| format!("{c:.1}")),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let fmt_row = |row: &[String]| {
        row.iter()
            .zip(widths)
            .enumerate()
            .map(|(k, (c, w))| {
                if k < 3 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = fmt_row(&header.map(String::from));
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  "),
    );
    out.push('\n');
    for row in &cells {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    out
}

pub fn write_csv<W: io::Write>(out: W, rows: &[BenchRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
