use std::fs::{self, File};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use vstar::{build_waterflow, Scenario};
use vstar_cli::bench::{format_table, run_benchmark, write_csv};
use vstar_cli::generate::random_valid_scenario;
use vstar_cli::pgm::field_to_pgm;
use vstar_cli::scenario_file::{to_json, HeuristicName};
use vstar_cli::svg::{render, Figure};
use vstar_cli::{load_scenario, run_plan, write_artifacts, RunOptions};

#[derive(Parser)]
#[command(name = "vstar", version, about = "Velocity-aware lattice motion planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one scenario and write path, trajectory and stats files.
    Plan(Common),
    /// Compare both heuristics on one or more scenarios.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Repetitions per scenario and heuristic.
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Export the waterflow field of a scenario.
    Field(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file (repeatable for bench).
    #[arg(long)]
    scenario: Vec<PathBuf>,
    /// Generate a random scenario from this seed instead of reading a file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    heuristic: Option<HeuristicName>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also write SVG figures.
    #[arg(long)]
    svg: bool,
}

impl Common {
    fn scenarios(&self) -> Result<Vec<(String, Scenario)>> {
        let mut out = Vec::new();
        for path in &self.scenario {
            let scenario = load_scenario(path).with_context(|| format!("loading {}", path.display()))?;
            let name = path
                .file_stem()
                .map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
            out.push((name, scenario));
        }
        if let Some(seed) = self.seed {
            let s = random_valid_scenario(seed);
            fs::create_dir_all(&self.out_dir)?;
            fs::write(
                self.out_dir.join(format!("random_{seed}.json")),
                to_json(&s) + "\n",
            )?;
            out.push((format!("random_{seed}"), s));
        }
        if out.is_empty() {
            bail!("pass --scenario <file> or --seed <n>");
        }
        Ok(out)
    }
}

fn plan_cmd(c: &Common) -> Result<()> {
    let scenarios = c.scenarios()?;
    let many = scenarios.len() > 1;
    for (name, scenario) in &scenarios {
        let opts = RunOptions {
            heuristic: c.heuristic.map(HeuristicName::kind),
            record_expansions: c.svg,
            samples_per_step: Some(50),
        };
        let out = run_plan(name, scenario, &opts)?;
        let dir = if many {
            c.out_dir.join(name)
        } else {
            c.out_dir.clone()
        };
        write_artifacts(&dir, scenario, &out, c.svg).with_context(|| format!("writing {}", dir.display()))?;
        println!("{}", serde_json::to_string(&out.report)?);
    }
    Ok(())
}

fn bench_cmd(c: &Common, reps: usize) -> Result<()> {
    let rows = run_benchmark(&c.scenarios()?, reps)?;
    let table = format_table(&rows);
    fs::create_dir_all(&c.out_dir)?;
    fs::write(c.out_dir.join("bench.txt"), &table)?;
    write_csv(File::create(c.out_dir.join("bench.csv"))?, &rows)?;
    print!("{table}");
    Ok(())
}

fn field_cmd(c: &Common) -> Result<()> {
    for (name, scenario) in c.scenarios()? {
        let field = build_waterflow(&scenario, scenario.planner.field_cell(&scenario))?;
        write(&c.out_dir, &format!("{name}_field.pgm"), &field_to_pgm(&field))?;
        if c.svg {
            let fig = Figure {
                field: Some(&field),
                ..Figure::default()
            };
            write(&c.out_dir, &format!("{name}_field.svg"), &render(&scenario, &fig))?;
        }
        println!(
            "{name}: {}x{} cells of {} m",
            field.width, field.height, field.cell
        );
    }
    Ok(())
}

fn write(dir: &Path, file: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Plan(c) => plan_cmd(&c),
        Command::Bench { common, reps } => bench_cmd(&common, reps),
        Command::Field(c) => field_cmd(&c),
    }
}
