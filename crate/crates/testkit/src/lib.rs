//! Reference searches for checking the planner.
//!
//! Every move costs one step and advances time by one, so the time-expanded
//! graph is layered by `t` and plain breadth-first layering is an exact
//! uniform-cost search. Both routines use the planner's own successor
//! generator and state identity, so they differ from it only in ordering.

use std::collections::HashMap;

use vstar::environment::Bounds;
use vstar::geometry::Vec2;
use vstar::kinematics::VehicleParams;
use vstar::lattice::{LatticeSpec, QuantizationConfig, StateKey};
use vstar::scenario::{Scenario, StartPose};
use vstar::search::{NeighbourGenerator, PlannerConfig};
use vstar::state::State;

fn is_goal(state: &State, scenario: &Scenario, config: &PlannerConfig) -> bool {
    state.position.distance(scenario.goal) < config.goal_tolerance
        && (!config.require_stop_at_goal || state.speed == 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOutcome {
    /// Optimal cost in steps, if the goal is reachable within the horizon.
    pub cost: Option<u32>,
    /// Distinct states visited.
    pub states: usize,
}

/// Exhaustive layered search over the time-expanded graph.
pub fn uniform_cost(scenario: &Scenario, config: &PlannerConfig) -> OracleOutcome {
    let generator = NeighbourGenerator::new(scenario, config);
    let q = config.quantization(generator.lattice());
    let horizon = config.horizon(scenario);
    let mut layer = vec![scenario.start_state()];
    let mut states = 1;
    let mut buf = Vec::new();
    for t in 0..=horizon {
        if layer.iter().any(|s| is_goal(s, scenario, config)) {
            return OracleOutcome {
                cost: Some(t),
                states,
            };
        }
        if t == horizon || layer.is_empty() {
            break;
        }
        let mut next: HashMap<StateKey, State> = HashMap::new();
        for s in &layer {
            buf.clear();
            generator.generate_into(s, &mut buf);
            for n in buf.drain(..) {
                next.entry(StateKey::of(&n, &q)).or_insert(n);
            }
        }
        states += next.len();
        layer = next.into_values().collect();
        layer.sort_by(|a, b| StateKey::of(a, &q).cmp(&StateKey::of(b, &q)));
    }
    OracleOutcome { cost: None, states }
}

/// Every state reachable within the horizon, with its exact cost-to-go.
#[derive(Debug, Clone)]
pub struct CostToGo {
    pub states: Vec<State>,
    /// `None` when the goal cannot be reached from the state before the horizon.
    pub cost: Vec<Option<u32>>,
    /// Successor indices per state.
    pub successors: Vec<Vec<usize>>,
}

impl CostToGo {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Forward enumeration followed by a backward sweep. Goal states are terminal
/// (the planner stops there), so they are not expanded. Enumeration stops
/// after `max_states` to keep runaway cases bounded; `None` in that case.
pub fn cost_to_go(scenario: &Scenario, config: &PlannerConfig, max_states: usize) -> Option<CostToGo> {
    let generator = NeighbourGenerator::new(scenario, config);
    let q = config.quantization(generator.lattice());
    let horizon = config.horizon(scenario);
    let mut states = vec![scenario.start_state()];
    let mut successors: Vec<Vec<usize>> = vec![Vec::new()];
    let mut index: HashMap<StateKey, usize> = HashMap::new();
    index.insert(StateKey::of(&states[0], &q), 0);
    let mut layer = vec![0usize];
    let mut layers = vec![layer.clone()];
    let mut buf = Vec::new();
    for _ in 0..horizon {
        let mut next = Vec::new();
        for &i in &layer {
            let s = states[i];
            if is_goal(&s, scenario, config) {
                continue;
            }
            buf.clear();
            generator.generate_into(&s, &mut buf);
            for n in buf.drain(..) {
                let key = StateKey::of(&n, &q);
                let j = *index.entry(key).or_insert_with(|| {
                    states.push(n);
                    successors.push(Vec::new());
                    next.push(states.len() - 1);
                    states.len() - 1
                });
                successors[i].push(j);
            }
            if states.len() > max_states {
                return None;
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next.clone());
        layer = next;
    }
    let mut cost = vec![None; states.len()];
    for layer in layers.iter().rev() {
        for &i in layer {
            cost[i] = if is_goal(&states[i], scenario, config) {
                Some(0)
            } else {
                successors[i].iter().filter_map(|&j| cost[j]).min().map(|c| c + 1)
            };
        }
    }
    Some(CostToGo {
        states,
        cost,
        successors,
    })
}

/// Checks that each step of `path` is a successor the generator produces.
pub fn replay(path: &[State], scenario: &Scenario, config: &PlannerConfig) -> Result<(), String> {
    let generator = NeighbourGenerator::new(scenario, config);
    let q = config.quantization(generator.lattice());
    let first = path.first().ok_or("empty path")?;
    if StateKey::of(first, &q) != StateKey::of(&scenario.start_state(), &q) {
        return Err("path does not begin at the start".into());
    }
    for (k, w) in path.windows(2).enumerate() {
        let key = StateKey::of(&w[1], &q);
        let found = generator
            .generate(&w[0])
            .iter()
            .any(|n| StateKey::of(n, &q) == key);
        if !found {
            return Err(format!("step {k} -> {} is not a generated successor", k + 1));
        }
    }
    Ok(())
}

/// Obstacle-free rectangle `[0, w] × [0, h]` with unit lattice spacing.
pub fn open_scenario(
    w: f64,
    h: f64,
    start: Vec2,
    heading: f64,
    goal: Vec2,
    vehicle: VehicleParams,
) -> Scenario {
    Scenario {
        bounds: Bounds::new(Vec2::ZERO, Vec2::new(w, h)),
        static_obstacles: Vec::new(),
        moving_obstacles: Vec::new(),
        start: StartPose {
            position: start,
            heading,
            speed: 0.0,
        },
        goal,
        vehicle,
        lattice: LatticeSpec::new(1.0).expect("unit spacing"),
        planner: PlannerConfig::default(),
    }
}

/// Quantization the planner uses for `scenario` under `config`.
pub fn quantization(scenario: &Scenario, config: &PlannerConfig) -> QuantizationConfig {
    config.quantization(&scenario.lattice_spec())
}
