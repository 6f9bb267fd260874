//! Obstacles, time-indexed safety zones and collision queries.
//!
//! Static obstacles are inflated by their own margin. A moving obstacle keeps a
//! circle of radius `s` while still; once it moves the zone stretches into an
//! ellipse along its velocity whose focal distance is `v_o / (2|b|)`.

use alloc::vec::Vec;
use core::fmt;

use crate::geometry::Vec2;
use crate::kinematics::{TurnGeometry, VehicleParams};
use crate::math;
use crate::scenario::Scenario;
use crate::state::State;

/// Axis-aligned map extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Circle {
        center: Vec2,
        radius: f64,
    },
    Rect {
        min: Vec2,
        max: Vec2,
    },
    /// Convex polygon, either winding.
    Polygon {
        vertices: Vec<Vec2>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeError {
    NonPositiveRadius(f64),
    EmptyRect,
    TooFewVertices(usize),
    NotConvex,
    NegativeMargin(f64),
    NonFinite,
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeError::NonPositiveRadius(r) => write!(f, "radius must be > 0, got {r}"),
            ShapeError::EmptyRect => f.write_str("rectangle min must be below max on both axes"),
            ShapeError::TooFewVertices(n) => write!(f, "polygon needs at least 3 vertices, got {n}"),
            ShapeError::NotConvex => f.write_str("polygon is not convex"),
            ShapeError::NegativeMargin(m) => write!(f, "margin must be >= 0, got {m}"),
            ShapeError::NonFinite => f.write_str("coordinates must be finite"),
        }
    }
}

impl core::error::Error for ShapeError {}

impl Shape {
    pub fn validate(&self) -> Result<(), ShapeError> {
        match self {
            Shape::Circle { center, radius } => {
                if !center.is_finite() {
                    return Err(ShapeError::NonFinite);
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(ShapeError::NonPositiveRadius(*radius));
                }
            }
            Shape::Rect { min, max } => {
                if !(min.is_finite() && max.is_finite()) {
                    return Err(ShapeError::NonFinite);
                }
                if !(min.x < max.x && min.y < max.y) {
                    return Err(ShapeError::EmptyRect);
                }
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(ShapeError::TooFewVertices(vertices.len()));
                }
                if !vertices.iter().all(|v| v.is_finite()) {
                    return Err(ShapeError::NonFinite);
                }
                let n = vertices.len();
                let mut sign = 0.0f64;
                for k in 0..n {
                    let a = vertices[k];
                    let b = vertices[(k + 1) % n];
                    let c = vertices[(k + 2) % n];
                    let cross = (b - a).cross(c - b);
                    if cross == 0.0 {
                        return Err(ShapeError::NotConvex);
                    }
                    if sign == 0.0 {
                        sign = cross.signum();
                    } else if cross.signum() != sign {
                        return Err(ShapeError::NotConvex);
                    }
                }
            }
        }
        Ok(())
    }

    /// Euclidean distance from `p` to the shape; zero inside.
    pub fn distance(&self, p: Vec2) -> f64 {
        match self {
            Shape::Circle { center, radius } => (p.distance(*center) - radius).max(0.0),
            Shape::Rect { min, max } => {
                let dx = (min.x - p.x).max(0.0).max(p.x - max.x);
                let dy = (min.y - p.y).max(0.0).max(p.y - max.y);
                math::hypot(dx, dy)
            }
            Shape::Polygon { vertices } => polygon_distance(vertices, p),
        }
    }

    /// Axis-aligned box around the shape.
    pub fn aabb(&self) -> Bounds {
        match self {
            Shape::Circle { center, radius } => Bounds::new(
                *center - Vec2::new(*radius, *radius),
                *center + Vec2::new(*radius, *radius),
            ),
            Shape::Rect { min, max } => Bounds::new(*min, *max),
            Shape::Polygon { vertices } => {
                let mut b = Bounds::new(vertices[0], vertices[0]);
                for v in vertices {
                    b.min.x = b.min.x.min(v.x);
                    b.min.y = b.min.y.min(v.y);
                    b.max.x = b.max.x.max(v.x);
                    b.max.y = b.max.y.max(v.y);
                }
                b
            }
        }
    }
}

fn polygon_distance(vertices: &[Vec2], p: Vec2) -> f64 {
    let n = vertices.len();
    let mut inside_pos = true;
    let mut inside_neg = true;
    let mut best = f64::INFINITY;
    for k in 0..n {
        let a = vertices[k];
        let b = vertices[(k + 1) % n];
        let edge = b - a;
        let cross = edge.cross(p - a);
        inside_pos &= cross >= 0.0;
        inside_neg &= cross <= 0.0;
        let s = ((p - a).dot(edge) / edge.norm_squared()).clamp(0.0, 1.0);
        best = best.min(p.distance(a + edge * s));
    }
    if inside_pos || inside_neg {
        0.0
    } else {
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticObstacle {
    pub shape: Shape,
    /// Inflation distance, meters.
    pub margin: f64,
}

impl StaticObstacle {
    pub fn new(shape: Shape, margin: f64) -> Self {
        Self { shape, margin }
    }

    pub fn validate(&self) -> Result<(), ShapeError> {
        self.shape.validate()?;
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(ShapeError::NegativeMargin(self.margin));
        }
        Ok(())
    }

    pub fn blocks(&self, p: Vec2) -> bool {
        self.shape.distance(p) <= self.margin
    }
}

/// Obstacle on a fixed, piecewise-linear trajectory sampled once per step.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingObstacle {
    /// Position at `k·τ` for `k = 0..len`.
    pub trajectory: Vec<Vec2>,
    /// Base safety radius `s`, meters.
    pub safety_radius: f64,
}

impl MovingObstacle {
    /// Last step index with a recorded position.
    pub fn horizon(&self) -> u32 {
        self.trajectory.len().saturating_sub(1) as u32
    }

    /// Position at a fractional step index. After the last sample the obstacle
    /// stays parked where it ended.
    pub fn position_at(&self, time_steps: f64) -> Vec2 {
        let last = self.trajectory.len() - 1;
        if time_steps <= 0.0 {
            return self.trajectory[0];
        }
        let k = math::floor(time_steps) as usize;
        if k >= last {
            return self.trajectory[last];
        }
        let s = time_steps - k as f64;
        self.trajectory[k].lerp(self.trajectory[k + 1], s)
    }

    /// Velocity over the segment containing `time_steps` (forward difference;
    /// the final sample uses the last segment). Zero once parked.
    pub fn velocity_at(&self, time_steps: f64, tau: f64) -> Vec2 {
        let last = self.trajectory.len() - 1;
        if last == 0 || time_steps > last as f64 {
            return Vec2::ZERO;
        }
        let k = (math::floor(time_steps.max(0.0)) as usize).min(last - 1);
        (self.trajectory[k + 1] - self.trajectory[k]) * (1.0 / tau)
    }

    /// Largest segment speed, m/s.
    pub fn max_speed(&self, tau: f64) -> f64 {
        self.trajectory
            .windows(2)
            .map(|w| w[0].distance(w[1]) / tau)
            .fold(0.0, f64::max)
    }
}

/// Constants that turn an obstacle velocity into a zone shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneParams {
    /// Step duration τ, seconds.
    pub tau: f64,
    /// Comfort deceleration `b`; only `|b|` is used.
    pub comfort_decel: f64,
    /// Focal distance is `v_o / (focal_divisor·|b|)`; 2 by default.
    pub focal_divisor: f64,
}

impl ZoneParams {
    pub fn new(params: &VehicleParams, tau: f64) -> Self {
        Self {
            tau,
            comfort_decel: params.comfort_decel,
            focal_divisor: 2.0,
        }
    }

    pub fn focal_distance(&self, obstacle_speed: f64) -> f64 {
        obstacle_speed / (self.focal_divisor * self.comfort_decel.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyZone {
    pub center: Vec2,
    pub semi_minor: f64,
    pub semi_major: f64,
    /// Direction of the major axis, radians.
    pub orientation: f64,
}

impl SafetyZone {
    fn from_motion(center: Vec2, velocity: Vec2, s: f64, zone: &ZoneParams) -> Self {
        let speed = velocity.norm();
        let c = zone.focal_distance(speed);
        SafetyZone {
            center,
            semi_minor: s,
            semi_major: math::sqrt(s * s + c * c),
            orientation: if speed > 0.0 { velocity.angle() } else { 0.0 },
        }
    }

    pub fn focal_distance(&self) -> f64 {
        math::sqrt((self.semi_major * self.semi_major - self.semi_minor * self.semi_minor).max(0.0))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let d = p - self.center;
        let u = Vec2::from_angle(self.orientation);
        let a = d.dot(u) / self.semi_major;
        let b = d.cross(u) / self.semi_minor;
        a * a + b * b <= 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZoneError {
    BeyondHorizon { t: u32, horizon: u32 },
}

impl fmt::Display for ZoneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZoneError::BeyondHorizon { t, horizon } => {
                write!(f, "step {t} is past the obstacle trajectory horizon {horizon}")
            }
        }
    }
}

impl core::error::Error for ZoneError {}

/// Safety zone of `obstacle` at step `t`.
pub fn safety_zone_at(obstacle: &MovingObstacle, t: u32, zone: &ZoneParams) -> Result<SafetyZone, ZoneError> {
    if t > obstacle.horizon() {
        return Err(ZoneError::BeyondHorizon {
            t,
            horizon: obstacle.horizon(),
        });
    }
    let time = f64::from(t);
    Ok(zone_at_time(obstacle, time, zone))
}

/// Safety zone at a fractional step index; parked obstacles get the circle.
pub fn zone_at_time(obstacle: &MovingObstacle, time_steps: f64, zone: &ZoneParams) -> SafetyZone {
    SafetyZone::from_motion(
        obstacle.position_at(time_steps),
        obstacle.velocity_at(time_steps, zone.tau),
        obstacle.safety_radius,
        zone,
    )
}

/// True iff `p` is off the map, inside an inflated static obstacle, or inside
/// a moving obstacle's zone at `time_steps` (a step index, fractions allowed).
pub fn point_blocked(p: Vec2, time_steps: f64, scenario: &Scenario) -> bool {
    if !scenario.bounds.contains(p) {
        return true;
    }
    static_blocked(p, scenario) || moving_blocked(p, time_steps, scenario)
}

pub(crate) fn static_blocked(p: Vec2, scenario: &Scenario) -> bool {
    scenario.static_obstacles.iter().any(|o| o.blocks(p))
}

fn moving_blocked(p: Vec2, time_steps: f64, scenario: &Scenario) -> bool {
    let zone = scenario.zone_params();
    scenario
        .moving_obstacles
        .iter()
        .any(|o| zone_at_time(o, time_steps, &zone).contains(p))
}

/// Samples the move `from → to` at `n_samples` points spaced evenly along the
/// arc, with time interpolated linearly across the step. A zero-length move is
/// a wait and is checked in place.
pub fn transition_blocked(
    from: &State,
    to: &State,
    geometry: &TurnGeometry,
    scenario: &Scenario,
    n_samples: usize,
) -> bool {
    let n = n_samples.max(2);
    let displacement = to.position - from.position;
    let moving = displacement.norm() > 0.0;
    let t0 = f64::from(from.t);
    let dt = f64::from(to.t) - t0;
    (0..n).any(|k| {
        let s = k as f64 / (n - 1) as f64;
        let p = if moving {
            geometry.point_along(from.position, displacement, s)
        } else {
            from.position
        };
        point_blocked(p, t0 + s * dt, scenario)
    })
}

/// Default sample count for an edge: keeps the spacing between samples,
/// relative to the fastest obstacle, at most a quarter lattice cell.
pub fn default_edge_samples(arc_length: f64, spacing: f64, max_obstacle_speed: f64, tau: f64) -> usize {
    let travel = arc_length + max_obstacle_speed * tau;
    (math::ceil(travel / (spacing / 4.0)) as usize + 1).max(4)
}
