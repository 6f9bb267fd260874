//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vstar::environment::zone_at_time;
use vstar::heuristics::GoalHeuristic;
use vstar::{
    build_waterflow, hex_cell_area, min_pairwise_distance, plan, simulate_turn, synthesize, turn_geometry,
    Direction, HeuristicKind, LatticeCoord, LatticeSpec, PlanStatus, PlannerConfig, Scenario, VehicleParams,
};
use vstar_cli::generate::random_valid_scenario;
use vstar_cli::load_scenario;
use vstar_testkit::{cost_to_go, uniform_cost};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}

fn load(name: &str) -> Scenario {
    load_scenario(&shipped(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn with(config: &PlannerConfig, heuristic: HeuristicKind) -> PlannerConfig {
    PlannerConfig {
        heuristic,
        ..config.clone()
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hex_geometry() -> Outcome {
    let started = Instant::now();
    let spec = LatticeSpec::new(1.0).unwrap();
    let d = min_pairwise_distance(&spec, 10);
    let area = hex_cell_area(&spec);
    let secs = started.elapsed().as_secs_f64();
    let ok = (d - 1.0).abs() <= 1e-9 && (area - 3.0 * 3f64.sqrt()).abs() <= 1e-9 && secs < 1.0;
    check(
        ok,
        format!("min distance {d:.12}, cell area {area:.12}, {secs:.3}s"),
    )
}

const RANDOM_SCENARIOS: u64 = 40;

fn random_suite() -> Vec<Scenario> {
    (0..RANDOM_SCENARIOS).map(random_valid_scenario).collect()
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut mismatches = Vec::new();
    let mut found = 0;
    for (k, s) in random_suite().iter().enumerate() {
        let oracle = uniform_cost(s, &s.planner).cost;
        found += usize::from(oracle.is_some());
        for h in [HeuristicKind::Euclidean, HeuristicKind::Waterflow] {
            let r = plan(s, &with(&s.planner, h)).map_err(|e| e.to_string())?;
            let cost = (r.status == PlanStatus::Found).then_some(r.stats.path_cost_steps);
            if cost != oracle {
                mismatches.push(format!("scenario {k} {h:?}: {cost:?} vs {oracle:?}"));
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    check(
        mismatches.is_empty() && secs < 60.0 && found > 0,
        format!(
            "{RANDOM_SCENARIOS} scenarios ({found} solvable), {} mismatches, {secs:.2}s {}",
            mismatches.len(),
            mismatches.join("; ")
        ),
    )
}

fn heuristic_bounds() -> Outcome {
    let mut scenarios = random_suite();
    scenarios.push(load("crossing"));
    scenarios.push(load("maze_1"));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut states, mut transitions, mut violations, mut skipped) = (0usize, 0usize, Vec::new(), 0);
    for (k, s) in scenarios.iter().enumerate() {
        let config = &s.planner;
        let Some(ctg) = cost_to_go(s, config, 3_000_000) else {
            skipped += 1;
            continue;
        };
        let field = build_waterflow(s, config.field_cell(s)).map_err(|e| e.to_string())?;
        let hs = [
            GoalHeuristic::new(s, config.goal_tolerance, config.tau, None),
            GoalHeuristic::new(s, config.goal_tolerance, config.tau, Some(&field)),
        ];
        for _ in 0..10_000 {
            let i = rng.gen_range(0..ctg.len());
            if let Some(c) = ctg.cost[i] {
                for h in &hs {
                    let v = h.steps(ctg.states[i].position);
                    if v > f64::from(c) + 1e-9 {
                        violations.push(format!("scenario {k}: h {v} > cost-to-go {c}"));
                    }
                }
            }
            states += 1;
        }
        let with_succ: Vec<usize> = (0..ctg.len())
            .filter(|&i| !ctg.successors[i].is_empty())
            .collect();
        if with_succ.is_empty() {
            continue;
        }
        for _ in 0..10_000 {
            let i = with_succ[rng.gen_range(0..with_succ.len())];
            let j = ctg.successors[i][rng.gen_range(0..ctg.successors[i].len())];
            for h in &hs {
                let (a, b) = (h.steps(ctg.states[i].position), h.steps(ctg.states[j].position));
                if a > 1.0 + b + 1e-9 {
                    violations.push(format!("scenario {k}: h {a} > 1 + {b}"));
                }
            }
            transitions += 1;
        }
    }
    violations.truncate(5);
    check(
        violations.is_empty() && skipped == 0,
        format!(
            "{} scenarios, {states} states, {transitions} transitions, both heuristics, {} violations {}",
            scenarios.len(),
            violations.len(),
            violations.join("; ")
        ),
    )
}

fn efficiency_trend() -> Outcome {
    let mut strictly = 0;
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["maze_1", "maze_2", "maze_3", "maze_4"] {
        let s = load(name);
        let e = plan(&s, &with(&s.planner, HeuristicKind::Euclidean)).map_err(|e| e.to_string())?;
        let w = plan(&s, &with(&s.planner, HeuristicKind::Waterflow)).map_err(|e| e.to_string())?;
        let (ne, nw) = (e.stats.nodes_expanded, w.stats.nodes_expanded);
        let same_cost = e.status == PlanStatus::Found
            && w.status == PlanStatus::Found
            && e.stats.path_cost_steps == w.stats.path_cost_steps;
        ok &= nw <= ne && same_cost;
        strictly += usize::from(nw < ne);
        parts.push(format!("{name} {nw}/{ne} cost {}", w.stats.path_cost_steps));
    }
    check(
        ok && strictly >= 2,
        format!(
            "waterflow/euclidean expansions: {}; strictly lower in {strictly}",
            parts.join(", ")
        ),
    )
}

/// `|X·Y| · |Θ| · |V| · |T|` for the scenario's lattice, headings, reachable
/// speed buckets and horizon.
fn state_space_bound(s: &Scenario, config: &PlannerConfig) -> u128 {
    let spec = s.lattice_spec();
    let q = config.quantization(&spec);
    let reach = ((s.bounds.width().max(s.bounds.height()) / spec.spacing()) * 2.0).ceil() as i32 + 2;
    let mut cells = 0u128;
    for i in -reach..=reach {
        for j in -reach..=reach {
            cells += u128::from(s.bounds.contains(spec.position(LatticeCoord::new(i, j))));
        }
    }
    let bound = spec.candidate_index_bound(s.vehicle.max_speed, config.tau);
    let mut moves = Vec::new();
    let mut directions = BTreeSet::new();
    for i in -bound..=bound {
        for j in -bound..=bound {
            if let Some(d) = Direction::reduced(i, j) {
                directions.insert((d.di, d.dj));
                moves.push((spec.displacement(LatticeCoord::new(i, j)), d.angle()));
            }
        }
    }
    let mut headings: Vec<f64> = directions
        .iter()
        .map(|&(di, dj)| Direction { di, dj }.angle())
        .collect();
    headings.push(s.start.heading);
    let mut speeds = BTreeSet::from([q.speed_bucket(0.0), q.speed_bucket(s.start.speed)]);
    for &h in &headings {
        for &(disp, angle) in &moves {
            let v = turn_geometry(disp, h, angle).arc_length / config.tau;
            if v <= s.vehicle.max_speed + 1e-9 {
                speeds.insert(q.speed_bucket(v));
            }
        }
    }
    let steps = u128::from(config.horizon(s)) + 1;
    cells * (directions.len() as u128 + 1) * speeds.len() as u128 * steps
}

fn termination() -> Outcome {
    let s = load("walled_goal");
    let mut parts = Vec::new();
    let mut ok = true;
    for h in [HeuristicKind::Euclidean, HeuristicKind::Waterflow] {
        let config = with(&s.planner, h);
        let started = Instant::now();
        let r = plan(&s, &config).map_err(|e| e.to_string())?;
        let secs = started.elapsed().as_secs_f64();
        let bound = state_space_bound(&s, &config);
        ok &= r.status == PlanStatus::NoSolution && (r.stats.nodes_expanded as u128) <= bound && secs < 30.0;
        parts.push(format!(
            "{h:?}: {} after {} expansions (bound {bound}) in {secs:.2}s",
            r.status.as_str(),
            r.stats.nodes_expanded
        ));
    }
    check(ok, parts.join("; "))
}

fn steady_state_turn() -> Outcome {
    let started = Instant::now();
    let params = VehicleParams {
        wheelbase: 2.0,
        steer_gain: 0.4,
        ..VehicleParams::default()
    };
    let (r, omega) = (5.0, 1.0);
    let beta = params.steer_gain * omega * r / params.wheelbase;
    let samples = simulate_turn(r, omega, &params, 15.0 / beta, 1e-3).map_err(|e| e.to_string())?;
    let target = 21f64.sqrt();
    let settled = samples.iter().filter(|x| x.time >= 5.0 / beta);
    let (mut speed_err, mut radius_err) = (0f64, 0f64);
    for x in settled {
        speed_err = speed_err.max((x.rear_speed - target).abs() / target);
        radius_err = radius_err.max((x.rear.norm() - target).abs() / target);
    }
    let monotone = samples.windows(2).all(|w| w[1].delta >= w[0].delta);
    let secs = started.elapsed().as_secs_f64();
    let ok = speed_err < 0.01 && radius_err < 0.01 && samples[0].delta == 0.0 && monotone && secs < 1.0;
    check(
        ok,
        format!(
            "rear speed err {:.4}%, rear radius err {:.4}%, delta(0) = {}, monotone {monotone}, {secs:.3}s",
            speed_err * 100.0,
            radius_err * 100.0,
            samples[0].delta
        ),
    )
}

fn waiting() -> Outcome {
    let s = load("crossing");
    let r = plan(&s, &s.planner).map_err(|e| e.to_string())?;
    if r.status != PlanStatus::Found {
        return Err(format!("status {}", r.status.as_str()));
    }
    let oracle = uniform_cost(&s, &s.planner).cost;
    let path = &r.waypoints;
    let departed = |k: usize| path[..k].iter().any(|w| w.speed > 0.0);
    let stops = (1..path.len())
        .filter(|&k| path[k].speed == 0.0 && departed(k))
        .count();
    let total = f64::from(r.stats.path_cost_steps) * s.planner.tau;
    let samples = synthesize(path, &s.vehicle, &s.planner, total / 999.0).map_err(|e| e.to_string())?;
    let zone = s.zone_params();
    let mut violations = 0;
    for x in &samples {
        let t = x.time / s.planner.tau;
        for o in &s.moving_obstacles {
            let z = zone_at_time(o, t, &zone);
            violations += usize::from(z.contains(x.front)) + usize::from(z.contains(x.rear));
        }
    }
    let ok =
        stops >= 1 && oracle == Some(r.stats.path_cost_steps) && violations == 0 && samples.len() == 1000;
    check(
        ok,
        format!(
            "{stops} stationary waypoints after departure, cost {} (oracle {oracle:?}), {violations} zone violations in {} samples",
            r.stats.path_cost_steps,
            samples.len()
        ),
    )
}

fn run_cli(scenario: &Path, heuristic: &str, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_vstar"))
        .args(["plan", "--svg", "--heuristic", heuristic, "--scenario"])
        .arg(scenario)
        .arg("--out-dir")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    check(
        status.status.success(),
        String::from_utf8_lossy(&status.stderr).into_owned(),
    )
    .map(|_| ())
}

fn strip_timing(path: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    v.as_object_mut()
        .ok_or("stats is not an object")?
        .remove("wall_time");
    Ok(v)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (name, heuristic) in [
        ("maze_3", "waterflow"),
        ("crossing", "euclidean"),
        ("reference_vehicle", "waterflow"),
    ] {
        let (a, b) = (
            tmp.path().join(format!("{name}_a")),
            tmp.path().join(format!("{name}_b")),
        );
        run_cli(&shipped(name), heuristic, &a)?;
        run_cli(&shipped(name), heuristic, &b)?;
        for f in ["path.jsonl", "trajectory.jsonl", "plan.svg"] {
            let (x, y) = (std::fs::read(a.join(f)), std::fs::read(b.join(f)));
            match (x, y) {
                (Ok(x), Ok(y)) if x == y && !x.is_empty() => compared += 1,
                _ => return Err(format!("{name}/{f} differs between runs")),
            }
        }
        if strip_timing(&a.join("stats.json"))? != strip_timing(&b.join("stats.json"))? {
            return Err(format!("{name}/stats.json differs beyond wall_time"));
        }
    }
    Ok(format!(
        "{compared} artifacts byte-identical across repeated runs"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 hex geometry", hex_geometry),
        ("2 optimality vs exhaustive search", oracle_equivalence),
        ("3 heuristic admissibility and consistency", heuristic_bounds),
        ("4 waterflow efficiency on maze suite", efficiency_trend),
        ("5 termination on walled-off goal", termination),
        ("6 steady-state turn", steady_state_turn),
        ("7 waiting for a crossing obstacle", waiting),
        ("8 deterministic outputs", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
