//! Best-first search over the space–time–velocity lattice.
//!
//! The open list is ordered by `f = g + h` (ties: deeper first, then insertion
//! order). Every move costs one step. Successors are generated on demand by
//! [`NeighbourGenerator`], which enumerates lattice displacements around the
//! current node and keeps only the ones the bicycle model can drive without
//! entering an obstacle or safety zone.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use hashbrown::HashMap;

use crate::environment::{default_edge_samples, point_blocked, transition_blocked};
use crate::geometry::Vec2;
use crate::heuristics::{build_waterflow, euclidean_h, FieldError, GoalHeuristic, HeuristicField};
use crate::kinematics::{speed_from_arc, transition_feasible, turn_geometry, TurnGeometry};
use crate::lattice::{LatticeCoord, LatticeSpec, QuantizationConfig, StateKey};
use crate::math;
use crate::scenario::{Scenario, ScenarioError};
use crate::state::{Direction, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeuristicKind {
    #[default]
    Euclidean,
    Waterflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    /// Goal test radius ε, meters.
    pub goal_tolerance: f64,
    /// Step duration τ, seconds.
    pub tau: f64,
    /// Horizon in steps; `None` uses `⌈4·h_euclid(start)/τ⌉ + 50`.
    pub t_max: Option<u32>,
    pub heuristic: HeuristicKind,
    pub allow_waiting: bool,
    /// Only accept goal nodes with zero speed.
    pub require_stop_at_goal: bool,
    /// Waterflow grid resolution; `None` uses half the lattice spacing.
    pub field_cell: Option<f64>,
    /// Speed bucket for state identity; `None` uses the fine default.
    pub speed_quantum: Option<f64>,
    /// Fixed number of collision samples per edge; `None` picks from the arc length.
    pub edge_samples: Option<usize>,
    /// Divisor in the zone focal distance `v_o / (divisor·|b|)`.
    pub zone_focal_divisor: f64,
    /// Keep every expanded node in the result (for plots and tests).
    pub record_expansions: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            goal_tolerance: 1.0,
            tau: 1.0,
            t_max: None,
            heuristic: HeuristicKind::Euclidean,
            allow_waiting: true,
            require_stop_at_goal: false,
            field_cell: None,
            speed_quantum: None,
            edge_samples: None,
            zone_focal_divisor: 2.0,
            record_expansions: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    GoalTolerance(f64),
    Tau(f64),
    TMax,
    FieldCell(f64),
    SpeedQuantum(f64),
    EdgeSamples(usize),
    FocalDivisor(f64),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::GoalTolerance(v) => write!(f, "goal_tolerance must be > 0, got {v}"),
            ConfigError::Tau(v) => write!(f, "tau must be > 0, got {v}"),
            ConfigError::TMax => f.write_str("t_max must be >= 1"),
            ConfigError::FieldCell(v) => write!(f, "field_cell must be > 0, got {v}"),
            ConfigError::SpeedQuantum(v) => write!(f, "speed_quantum must be > 0, got {v}"),
            ConfigError::EdgeSamples(n) => write!(f, "edge_samples must be >= 2, got {n}"),
            ConfigError::FocalDivisor(v) => write!(f, "zone_focal_divisor must be > 0, got {v}"),
        }
    }
}

impl core::error::Error for ConfigError {}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !positive(self.goal_tolerance) {
            return Err(ConfigError::GoalTolerance(self.goal_tolerance));
        }
        if !positive(self.tau) {
            return Err(ConfigError::Tau(self.tau));
        }
        if self.t_max == Some(0) {
            return Err(ConfigError::TMax);
        }
        if let Some(c) = self.field_cell.filter(|c| !positive(*c)) {
            return Err(ConfigError::FieldCell(c));
        }
        if let Some(q) = self.speed_quantum.filter(|q| !positive(*q)) {
            return Err(ConfigError::SpeedQuantum(q));
        }
        if let Some(n) = self.edge_samples.filter(|n| *n < 2) {
            return Err(ConfigError::EdgeSamples(n));
        }
        if !positive(self.zone_focal_divisor) {
            return Err(ConfigError::FocalDivisor(self.zone_focal_divisor));
        }
        Ok(())
    }

    pub fn quantization(&self, spec: &LatticeSpec) -> QuantizationConfig {
        let q = QuantizationConfig::for_lattice(spec, self.tau);
        match self.speed_quantum {
            Some(speed_quantum) => QuantizationConfig { speed_quantum, ..q },
            None => q,
        }
    }

    /// Horizon actually used for `scenario`.
    pub fn horizon(&self, scenario: &Scenario) -> u32 {
        self.t_max.unwrap_or_else(|| {
            let h = euclidean_h(scenario.start.position, scenario.goal, scenario.vehicle.max_speed);
            math::ceil(4.0 * h / self.tau) as u32 + 50
        })
    }

    pub fn field_cell(&self, scenario: &Scenario) -> f64 {
        self.field_cell.unwrap_or(scenario.lattice.spacing() / 2.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    offset: LatticeCoord,
    displacement: Vec2,
    direction: Direction,
    heading: f64,
}

/// Successor generator with the displacement table precomputed.
#[derive(Debug, Clone)]
pub struct NeighbourGenerator<'a> {
    scenario: &'a Scenario,
    spec: LatticeSpec,
    tau: f64,
    allow_waiting: bool,
    edge_samples: Option<usize>,
    max_obstacle_speed: f64,
    candidates: Vec<Candidate>,
}

impl<'a> NeighbourGenerator<'a> {
    pub fn new(scenario: &'a Scenario, config: &PlannerConfig) -> Self {
        let spec = scenario.lattice_spec();
        let bound = spec.candidate_index_bound(scenario.vehicle.max_speed, config.tau);
        let mut candidates = Vec::new();
        for i in -bound..=bound {
            for j in -bound..=bound {
                let Some(direction) = Direction::reduced(i, j) else {
                    continue;
                };
                let offset = LatticeCoord::new(i, j);
                candidates.push(Candidate {
                    offset,
                    displacement: spec.displacement(offset),
                    direction,
                    heading: direction.angle(),
                });
            }
        }
        Self {
            scenario,
            spec,
            tau: config.tau,
            allow_waiting: config.allow_waiting,
            edge_samples: config.edge_samples,
            max_obstacle_speed: scenario.max_obstacle_speed(),
            candidates,
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Collision samples for an edge of the given arc length.
    pub fn samples_for(&self, arc_length: f64) -> usize {
        self.edge_samples.unwrap_or_else(|| {
            default_edge_samples(arc_length, self.spec.spacing(), self.max_obstacle_speed, self.tau)
        })
    }

    /// Appends every admissible successor of `state` to `out`.
    pub fn generate_into(&self, state: &State, out: &mut Vec<State>) {
        let params = &self.scenario.vehicle;
        let cos_cone = math::cos(params.max_steer);
        let facing = Vec2::from_angle(state.heading);
        let t_next = state.t + 1;
        for c in &self.candidates {
            // Heading cone: the move may deviate at most δ_max from the heading.
            let chord = c.displacement.norm();
            if c.displacement.dot(facing) / chord < cos_cone - 1e-12 {
                continue;
            }
            let geometry = turn_geometry(c.displacement, state.heading, c.heading);
            let speed = speed_from_arc(&geometry, self.tau);
            if transition_feasible(state.speed, speed, &geometry, params, &self.spec, self.tau).is_err() {
                continue;
            }
            let coord = state.coord + c.offset;
            let next = State {
                coord,
                position: self.spec.position(coord),
                heading: c.heading,
                direction: Some(c.direction),
                speed,
                t: t_next,
            };
            if point_blocked(next.position, f64::from(t_next), self.scenario) {
                continue;
            }
            if transition_blocked(
                state,
                &next,
                &geometry,
                self.scenario,
                self.samples_for(geometry.arc_length),
            ) {
                continue;
            }
            out.push(next);
        }
        // Stopping in place is allowed whenever the acceleration bound admits v' = 0.
        if self.allow_waiting && state.speed <= params.max_accel + 1e-9 {
            let next = State {
                speed: 0.0,
                t: t_next,
                ..*state
            };
            let geometry = TurnGeometry {
                chord: 0.0,
                phi: 0.0,
                radius: crate::kinematics::Radius::Straight,
                arc_length: 0.0,
            };
            if !transition_blocked(state, &next, &geometry, self.scenario, self.samples_for(0.0)) {
                out.push(next);
            }
        }
    }

    pub fn generate(&self, state: &State) -> Vec<State> {
        let mut out = Vec::new();
        self.generate_into(state, &mut out);
        out
    }
}

/// All admissible successors of `state`.
pub fn generate_neighbours(state: &State, scenario: &Scenario, config: &PlannerConfig) -> Vec<State> {
    NeighbourGenerator::new(scenario, config).generate(state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchNode {
    pub state: State,
    /// Steps from the start.
    pub g: u32,
    /// Heuristic, steps.
    pub h: f64,
    pub f: f64,
    /// Index of the predecessor in the node arena.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStatus {
    Found,
    NoSolution,
    HorizonExhausted,
}

impl PlanStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanStatus::Found => "found",
            PlanStatus::NoSolution => "no_solution",
            PlanStatus::HorizonExhausted => "horizon_exhausted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlanStats {
    pub nodes_expanded: usize,
    pub nodes_generated: usize,
    /// Path length in steps; zero unless found.
    pub path_cost_steps: u32,
}

/// A node popped and expanded, in expansion order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub state: State,
    pub g: u32,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub status: PlanStatus,
    /// Start to terminal node; empty unless found.
    pub waypoints: Vec<State>,
    pub stats: PlanStats,
    /// Filled when `record_expansions` is set.
    pub expansions: Vec<Expansion>,
    /// Horizon the search ran with, steps.
    pub horizon: u32,
}

impl PlanResult {
    pub fn path_cost_seconds(&self, tau: f64) -> f64 {
        f64::from(self.stats.path_cost_steps) * tau
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanError {
    InvalidScenario(ScenarioError),
    Field(FieldError),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::InvalidScenario(e) => write!(f, "invalid scenario: {e}"),
            PlanError::Field(e) => write!(f, "waterflow field: {e}"),
        }
    }
}

impl core::error::Error for PlanError {}

#[derive(Debug, PartialEq)]
struct OpenEntry {
    f: f64,
    g: u32,
    seq: u64,
    node: usize,
}

impl Eq for OpenEntry {}

// BinaryHeap is a max-heap: "greater" pops first.
impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.cmp(&other.g))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Slot {
    node: usize,
    closed: bool,
}

/// Plans with `config`, building the waterflow field if it is needed.
pub fn plan(scenario: &Scenario, config: &PlannerConfig) -> Result<PlanResult, PlanError> {
    plan_with_field(scenario, config, None)
}

/// Like [`plan`], reusing a prebuilt field when one is supplied.
pub fn plan_with_field(
    scenario: &Scenario,
    config: &PlannerConfig,
    field: Option<&HeuristicField>,
) -> Result<PlanResult, PlanError> {
    scenario.validate().map_err(PlanError::InvalidScenario)?;
    config
        .validate()
        .map_err(|e| PlanError::InvalidScenario(ScenarioError::Planner(e)))?;

    let owned;
    let field = match (config.heuristic, field) {
        (HeuristicKind::Euclidean, _) => None,
        (HeuristicKind::Waterflow, Some(f)) => Some(f),
        (HeuristicKind::Waterflow, None) => {
            owned = build_waterflow(scenario, config.field_cell(scenario)).map_err(PlanError::Field)?;
            Some(&owned)
        }
    };
    let heuristic = GoalHeuristic::new(scenario, config.goal_tolerance, config.tau, field);
    let generator = NeighbourGenerator::new(scenario, config);
    let quantization = config.quantization(generator.lattice());
    let horizon = config.horizon(scenario);

    let mut search = Search {
        config,
        quantization,
        nodes: Vec::new(),
        slots: HashMap::new(),
        open: BinaryHeap::new(),
        seq: 0,
        stats: PlanStats::default(),
        expansions: Vec::new(),
    };

    let start = scenario.start_state();
    let h0 = heuristic.steps(start.position);
    let mut horizon_hit = false;
    if h0.is_finite() {
        search.push(start, 0, h0, None);
    }
    let mut successors = Vec::new();
    while let Some(entry) = search.open.pop() {
        let node = search.nodes[entry.node];
        let key = StateKey::of(&node.state, &search.quantization);
        let slot = &search.slots[&key];
        if slot.closed || slot.node != entry.node {
            continue;
        }
        if search.is_goal(&node.state, scenario) {
            let waypoints = reconstruct_path(&search.nodes, entry.node);
            search.stats.path_cost_steps = node.g;
            return Ok(PlanResult {
                status: PlanStatus::Found,
                waypoints,
                stats: search.stats,
                expansions: search.expansions,
                horizon,
            });
        }
        if let Some(slot) = search.slots.get_mut(&key) {
            slot.closed = true;
        }
        search.stats.nodes_expanded += 1;
        if config.record_expansions {
            search.expansions.push(Expansion {
                state: node.state,
                g: node.g,
                f: node.f,
            });
        }
        if node.state.t >= horizon {
            horizon_hit = true;
            continue;
        }
        successors.clear();
        generator.generate_into(&node.state, &mut successors);
        for next in successors.drain(..) {
            let key = StateKey::of(&next, &search.quantization);
            let g = node.g + 1;
            match search.slots.get(&key) {
                Some(slot) if slot.closed || search.nodes[slot.node].g <= g => continue,
                _ => {}
            }
            let h = heuristic.steps(next.position);
            if h.is_finite() {
                search.push(next, g, h, Some(entry.node));
            }
        }
    }

    let status = if horizon_hit && goal_statically_reachable(scenario, config, field) {
        PlanStatus::HorizonExhausted
    } else {
        PlanStatus::NoSolution
    };
    Ok(PlanResult {
        status,
        waypoints: Vec::new(),
        stats: search.stats,
        expansions: search.expansions,
        horizon,
    })
}

/// Conservative grid flood: `false` only if no free path joins start and goal.
fn goal_statically_reachable(
    scenario: &Scenario,
    config: &PlannerConfig,
    field: Option<&HeuristicField>,
) -> bool {
    let check = |f: &HeuristicField| f.value_at(scenario.start.position).map_or(true, f64::is_finite);
    match field {
        Some(f) => check(f),
        None => build_waterflow(scenario, config.field_cell(scenario)).map_or(true, |f| check(&f)),
    }
}

struct Search<'c> {
    config: &'c PlannerConfig,
    quantization: QuantizationConfig,
    nodes: Vec<SearchNode>,
    slots: HashMap<StateKey, Slot>,
    open: BinaryHeap<OpenEntry>,
    seq: u64,
    stats: PlanStats,
    expansions: Vec<Expansion>,
}

impl Search<'_> {
    fn push(&mut self, state: State, g: u32, h: f64, parent: Option<usize>) {
        let f = f64::from(g) + h;
        let index = self.nodes.len();
        self.nodes.push(SearchNode {
            state,
            g,
            h,
            f,
            parent,
        });
        let key = StateKey::of(&state, &self.quantization);
        self.slots.insert(
            key,
            Slot {
                node: index,
                closed: false,
            },
        );
        self.open.push(OpenEntry {
            f,
            g,
            seq: self.seq,
            node: index,
        });
        self.seq += 1;
        self.stats.nodes_generated += 1;
    }

    fn is_goal(&self, state: &State, scenario: &Scenario) -> bool {
        state.position.distance(scenario.goal) < self.config.goal_tolerance
            && (!self.config.require_stop_at_goal || state.speed == 0.0)
    }
}

/// Follows parent links from `terminal` back to the start.
pub fn reconstruct_path(nodes: &[SearchNode], terminal: usize) -> Vec<State> {
    let mut path = Vec::with_capacity(nodes[terminal].g as usize + 1);
    let mut cursor = Some(terminal);
    while let Some(i) = cursor {
        path.push(nodes[i].state);
        cursor = nodes[i].parent;
    }
    path.reverse();
    path
}
