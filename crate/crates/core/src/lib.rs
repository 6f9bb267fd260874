//! Velocity-aware lattice motion planning.
//!
//! The planner searches a space–time–velocity lattice: every node carries a
//! position on a hexagonal lattice, the heading it arrived with, its speed and
//! a discrete time index. Successors are produced on demand by enumerating
//! lattice displacements and pruning them with a kinematic bicycle model, so
//! every edge the search follows is drivable by construction.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, SVG output and
//! the command line live in the `vstar-cli` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod environment;
pub mod geometry;
pub mod heuristics;
pub mod kinematics;
pub mod lattice;
mod math;
pub mod scenario;
pub mod search;
pub mod state;
pub mod trajectory;

pub use environment::{
    point_blocked, safety_zone_at, transition_blocked, Bounds, MovingObstacle, SafetyZone, Shape,
    StaticObstacle, ZoneParams,
};
pub use geometry::{wrap_angle, Vec2};
pub use heuristics::{build_waterflow, euclidean_h, waterflow_h, HeuristicField};
pub use kinematics::{
    heading_cone_check, integrate_heading, rear_position, rear_speed_at, speed_from_arc, steering_profile,
    transition_feasible, turn_geometry, Infeasible, Radius, RadiusRule, SteeringProfile, TurnGeometry,
    VehicleParams,
};
pub use lattice::{
    canonical_state_key, hex_cell_area, min_pairwise_distance, HeadingKey, LatticeCoord, LatticeSpec,
    QuantizationConfig, StateKey,
};
pub use scenario::{Scenario, ScenarioError};
pub use search::{
    generate_neighbours, plan, plan_with_field, reconstruct_path, HeuristicKind, NeighbourGenerator,
    PlanError, PlanResult, PlanStats, PlanStatus, PlannerConfig, SearchNode,
};
pub use state::{Direction, State};
pub use trajectory::{simulate_turn, synthesize, TrajectoryError, TrajectorySample};
