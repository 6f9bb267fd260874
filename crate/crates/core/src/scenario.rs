//! A complete planning problem: map, obstacles, start, goal, vehicle, lattice
//! and planner settings.

use alloc::vec::Vec;
use core::fmt;

use crate::environment::{point_blocked, Bounds, MovingObstacle, ShapeError, StaticObstacle, ZoneParams};
use crate::geometry::{wrap_angle, Vec2};
use crate::kinematics::{ParamError, VehicleParams};
use crate::lattice::{LatticeCoord, LatticeError, LatticeSpec};
use crate::search::{ConfigError, PlannerConfig};
use crate::state::State;

/// Start pose. The heading is arbitrary; speed is usually zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartPose {
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bounds: Bounds,
    pub static_obstacles: Vec<StaticObstacle>,
    pub moving_obstacles: Vec<MovingObstacle>,
    pub start: StartPose,
    pub goal: Vec2,
    pub vehicle: VehicleParams,
    /// Spacing of the lattice; it is always anchored at the start position.
    pub lattice: LatticeSpec,
    pub planner: PlannerConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Bounds,
    Vehicle(ParamError),
    Lattice(LatticeError),
    Planner(ConfigError),
    StaticObstacle { index: usize, error: ShapeError },
    MovingObstacleEmpty { index: usize },
    MovingObstacleRadius { index: usize, radius: f64 },
    MovingObstacleNonFinite { index: usize },
    StartOutOfBounds,
    StartBlocked,
    StartSpeed(f64),
    GoalOutOfBounds,
}

impl ScenarioError {
    /// Name of the offending scenario field.
    pub fn field(&self) -> &'static str {
        match self {
            ScenarioError::Bounds => "bounds",
            ScenarioError::Vehicle(_) => "vehicle",
            ScenarioError::Lattice(_) => "lattice",
            ScenarioError::Planner(_) => "planner",
            ScenarioError::StaticObstacle { .. } => "static_obstacles",
            ScenarioError::MovingObstacleEmpty { .. }
            | ScenarioError::MovingObstacleRadius { .. }
            | ScenarioError::MovingObstacleNonFinite { .. } => "moving_obstacles",
            ScenarioError::StartOutOfBounds | ScenarioError::StartBlocked | ScenarioError::StartSpeed(_) => {
                "start"
            }
            ScenarioError::GoalOutOfBounds => "goal",
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.field())?;
        match self {
            ScenarioError::Bounds => f.write_str("min must be below max on both axes"),
            ScenarioError::Vehicle(e) => write!(f, "{e}"),
            ScenarioError::Lattice(e) => write!(f, "{e}"),
            ScenarioError::Planner(e) => write!(f, "{e}"),
            ScenarioError::StaticObstacle { index, error } => write!(f, "[{index}] {error}"),
            ScenarioError::MovingObstacleEmpty { index } => {
                write!(f, "[{index}] trajectory must have at least one position")
            }
            ScenarioError::MovingObstacleRadius { index, radius } => {
                write!(f, "[{index}] safety radius must be > 0, got {radius}")
            }
            ScenarioError::MovingObstacleNonFinite { index } => {
                write!(f, "[{index}] trajectory positions must be finite")
            }
            ScenarioError::StartOutOfBounds => f.write_str("start lies outside the map bounds"),
            ScenarioError::StartBlocked => f.write_str("start is blocked at t = 0"),
            ScenarioError::StartSpeed(v) => write!(f, "start speed must be in [0, max_speed], got {v}"),
            ScenarioError::GoalOutOfBounds => f.write_str("goal lies outside the map bounds"),
        }
    }
}

impl core::error::Error for ScenarioError {}

impl Scenario {
    /// The lattice anchored at the start position.
    pub fn lattice_spec(&self) -> LatticeSpec {
        self.lattice.anchored_at(self.start.position)
    }

    pub fn zone_params(&self) -> ZoneParams {
        ZoneParams {
            focal_divisor: self.planner.zone_focal_divisor,
            ..ZoneParams::new(&self.vehicle, self.planner.tau)
        }
    }

    /// The start as a lattice state at `t = 0`.
    pub fn start_state(&self) -> State {
        State {
            coord: LatticeCoord::default(),
            position: self.start.position,
            heading: wrap_angle(self.start.heading),
            direction: None,
            speed: self.start.speed,
            t: 0,
        }
    }

    /// Fastest moving obstacle, m/s.
    pub fn max_obstacle_speed(&self) -> f64 {
        self.moving_obstacles
            .iter()
            .map(|o| o.max_speed(self.planner.tau))
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let b = &self.bounds;
        if !(b.min.is_finite() && b.max.is_finite() && b.min.x < b.max.x && b.min.y < b.max.y) {
            return Err(ScenarioError::Bounds);
        }
        self.vehicle.validate().map_err(ScenarioError::Vehicle)?;
        LatticeSpec::new(self.lattice.spacing()).map_err(ScenarioError::Lattice)?;
        self.planner.validate().map_err(ScenarioError::Planner)?;
        for (index, o) in self.static_obstacles.iter().enumerate() {
            o.validate()
                .map_err(|error| ScenarioError::StaticObstacle { index, error })?;
        }
        for (index, o) in self.moving_obstacles.iter().enumerate() {
            if o.trajectory.is_empty() {
                return Err(ScenarioError::MovingObstacleEmpty { index });
            }
            if !o.trajectory.iter().all(|p| p.is_finite()) {
                return Err(ScenarioError::MovingObstacleNonFinite { index });
            }
            if !(o.safety_radius.is_finite() && o.safety_radius > 0.0) {
                return Err(ScenarioError::MovingObstacleRadius {
                    index,
                    radius: o.safety_radius,
                });
            }
        }
        if !self.bounds.contains(self.start.position) {
            return Err(ScenarioError::StartOutOfBounds);
        }
        if !(self.start.speed >= 0.0 && self.start.speed <= self.vehicle.max_speed) {
            return Err(ScenarioError::StartSpeed(self.start.speed));
        }
        if !self.goal.is_finite() || !self.bounds.contains(self.goal) {
            return Err(ScenarioError::GoalOutOfBounds);
        }
        if point_blocked(self.start.position, 0.0, self) {
            return Err(ScenarioError::StartBlocked);
        }
        Ok(())
    }
}
