//! Continuous front/rear wheel traces from a planned waypoint path.
//!
//! The front wheel drives the planned arcs at constant speed per step. The
//! steering angle follows the first-order transient toward the steady-state
//! angle `δ∞ = ±arccos(√(r² − L²)/r)` with rate `β = k·v/L`, and the body
//! heading is the front-wheel tangent minus the steering angle. At each step
//! boundary δ is re-seeded so that the heading stays continuous.

use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{wrap_angle, Vec2};
use crate::kinematics::{
    rear_position, speed_from_arc, steering_profile, turn_geometry, Radius, SteeringError, TurnGeometry,
    VehicleParams,
};
use crate::math;
use crate::search::PlannerConfig;
use crate::state::State;

const REPLAY_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Seconds since the start of the path.
    pub time: f64,
    pub front: Vec2,
    pub rear: Vec2,
    /// Body heading, radians.
    pub theta: f64,
    pub rear_speed: f64,
    /// Steering angle, radians (positive turns left).
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryError {
    InvalidStep(f64),
    EmptyPath,
    /// Step `index → index + 1` is not a move the planner could have made.
    NotReplayable {
        index: usize,
        reason: &'static str,
    },
    Steering(SteeringError),
}

impl fmt::Display for TrajectoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrajectoryError::InvalidStep(dt) => write!(f, "sample step must be > 0, got {dt}"),
            TrajectoryError::EmptyPath => f.write_str("path is empty"),
            TrajectoryError::NotReplayable { index, reason } => {
                write!(f, "step {index} -> {} is not replayable: {reason}", index + 1)
            }
            TrajectoryError::Steering(e) => write!(f, "steering: {e}"),
        }
    }
}

impl core::error::Error for TrajectoryError {}

/// Steady-state steering angle for a front radius, signed like `phi`.
fn signed_delta_inf(
    radius: Radius,
    phi: f64,
    wheelbase: f64,
    speed: f64,
    params: &VehicleParams,
) -> Result<(f64, f64), TrajectoryError> {
    let beta = params.steer_gain * speed / wheelbase;
    match radius {
        Radius::Straight => Ok((0.0, beta)),
        Radius::Finite(r) => {
            let omega = if r > 0.0 { speed / r } else { 0.0 };
            let profile = steering_profile(r, omega, params).map_err(TrajectoryError::Steering)?;
            Ok((profile.delta_inf.copysign(phi), beta))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    start: Vec2,
    displacement: Vec2,
    geometry: TurnGeometry,
    speed: f64,
    /// Steering angle at the segment start.
    delta0: f64,
    delta_inf: f64,
    beta: f64,
    /// Body heading held during a wait.
    theta_hold: f64,
    moving: bool,
}

impl Segment {
    fn delta_at(&self, s: f64) -> f64 {
        self.delta_inf + (self.delta0 - self.delta_inf) * math::exp(-self.beta * s)
    }

    /// Front position, front tangent at local time `s ∈ [0, τ]`.
    fn front_at(&self, s: f64, tau: f64) -> (Vec2, f64) {
        let frac = s / tau;
        let p = self.geometry.point_along(self.start, self.displacement, frac);
        (p, self.geometry.tangent_along(self.displacement, frac))
    }

    fn sample(&self, s: f64, tau: f64, time: f64, wheelbase: f64) -> TrajectorySample {
        if !self.moving {
            return TrajectorySample {
                time,
                front: self.start,
                rear: rear_position(self.start, self.theta_hold, wheelbase),
                theta: self.theta_hold,
                rear_speed: 0.0,
                delta: self.delta0,
            };
        }
        let (front, psi) = self.front_at(s, tau);
        let delta = self.delta_at(s);
        let theta = wrap_angle(psi - delta);
        TrajectorySample {
            time,
            front,
            rear: rear_position(front, theta, wheelbase),
            theta,
            rear_speed: self.speed * math::cos(delta),
            delta,
        }
    }
}

fn build_segments(path: &[State], params: &VehicleParams, tau: f64) -> Result<Vec<Segment>, TrajectoryError> {
    let l = params.wheelbase;
    let mut segments = Vec::with_capacity(path.len().saturating_sub(1));
    let mut theta = path[0].heading;
    let mut delta = 0.0;
    for (index, pair) in path.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let fail = |reason| TrajectoryError::NotReplayable { index, reason };
        if b.t != a.t + 1 {
            return Err(fail("time must advance by one step"));
        }
        if b.speed.is_nan() || b.speed < 0.0 || b.speed > params.max_speed + REPLAY_EPS {
            return Err(fail("speed outside [0, v_max]"));
        }
        if (b.speed - a.speed).abs() > params.max_accel + REPLAY_EPS {
            return Err(fail("speed change exceeds the acceleration bound"));
        }
        let displacement = b.position - a.position;
        if displacement.norm() <= REPLAY_EPS {
            if b.speed > REPLAY_EPS {
                return Err(fail("stationary step with non-zero speed"));
            }
            let geometry = turn_geometry(Vec2::new(0.0, 0.0), a.heading, a.heading);
            segments.push(Segment {
                start: a.position,
                displacement,
                geometry,
                speed: 0.0,
                delta0: delta,
                delta_inf: delta,
                beta: 0.0,
                theta_hold: theta,
                moving: false,
            });
            continue;
        }
        if (wrap_angle(displacement.angle() - b.heading)).abs() > REPLAY_EPS {
            return Err(fail("heading does not match the displacement"));
        }
        let geometry = turn_geometry(displacement, a.heading, b.heading);
        if (speed_from_arc(&geometry, tau) - b.speed).abs() > REPLAY_EPS {
            return Err(fail("speed does not match the arc length"));
        }
        let (delta_inf, beta) = signed_delta_inf(geometry.radius, geometry.phi, l, b.speed, params)?;
        let psi0 = geometry.tangent_along(displacement, 0.0);
        let mut segment = Segment {
            start: a.position,
            displacement,
            geometry,
            speed: b.speed,
            delta0: wrap_angle(psi0 - theta),
            delta_inf,
            beta,
            theta_hold: theta,
            moving: true,
        };
        let end = segment.sample(tau, tau, 0.0, l);
        theta = end.theta;
        delta = end.delta;
        segment.theta_hold = theta;
        segments.push(segment);
    }
    Ok(segments)
}

/// Samples the path every `dt` seconds; the last sample is at the final waypoint.
pub fn synthesize(
    path: &[State],
    params: &VehicleParams,
    config: &PlannerConfig,
    dt: f64,
) -> Result<Vec<TrajectorySample>, TrajectoryError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(TrajectoryError::InvalidStep(dt));
    }
    let first = path.first().ok_or(TrajectoryError::EmptyPath)?;
    let tau = config.tau;
    let l = params.wheelbase;
    let segments = build_segments(path, params, tau)?;
    if segments.is_empty() {
        return Ok(alloc::vec![TrajectorySample {
            time: 0.0,
            front: first.position,
            rear: rear_position(first.position, first.heading, l),
            theta: first.heading,
            rear_speed: 0.0,
            delta: 0.0,
        }]);
    }
    let total = segments.len() as f64 * tau;
    let n = math::ceil(total / dt - 1e-9) as usize;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let time = if k == n { total } else { k as f64 * dt };
        let index = ((time / tau) as usize).min(segments.len() - 1);
        let local = (time - index as f64 * tau).clamp(0.0, tau);
        out.push(segments[index].sample(local, tau, time, l));
    }
    Ok(out)
}

/// Sustained turn from zero steering: front wheel on a circle of radius `r`
/// about the origin, starting at `(r, 0)` and moving counter-clockwise at
/// angular speed `omega`.
pub fn simulate_turn(
    r: f64,
    omega: f64,
    params: &VehicleParams,
    t_end: f64,
    dt: f64,
) -> Result<Vec<TrajectorySample>, TrajectoryError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(TrajectoryError::InvalidStep(dt));
    }
    let profile = steering_profile(r, omega, params).map_err(TrajectoryError::Steering)?;
    let l = params.wheelbase;
    let beta = params.steer_gain * omega * r / l;
    let n = math::ceil(t_end / dt - 1e-9).max(0.0) as usize;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let time = if k == n { t_end } else { k as f64 * dt };
        let angle = omega * time;
        let front = Vec2::from_angle(angle) * r;
        let psi = angle + core::f64::consts::FRAC_PI_2;
        let delta = profile.delta_inf * (1.0 - math::exp(-beta * time));
        let theta = wrap_angle(psi - delta);
        out.push(TrajectorySample {
            time,
            front,
            rear: rear_position(front, theta, l),
            theta,
            rear_speed: r * omega * math::cos(delta),
            delta,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeCoord;
    use crate::state::Direction;

    fn state(x: f64, y: f64, heading: f64, speed: f64, t: u32) -> State {
        State {
            coord: LatticeCoord::new(0, 0),
            position: Vec2::new(x, y),
            heading,
            direction: None::<Direction>,
            speed,
            t,
        }
    }

    #[test]
    fn straight_path_rear_trails_by_wheelbase() {
        let params = VehicleParams::default();
        let config = PlannerConfig::default();
        let path = [
            state(0.0, 0.0, 0.0, 0.0, 0),
            state(1.0, 0.0, 0.0, 1.0, 1),
            state(2.0, 0.0, 0.0, 1.0, 2),
        ];
        let samples = synthesize(&path, &params, &config, 0.1).unwrap();
        assert_eq!(samples.len(), 21);
        for s in &samples {
            assert!((s.front - s.rear - Vec2::new(params.wheelbase, 0.0)).norm() < 1e-12);
            assert!((s.rear_speed - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sustained_turn_reaches_rear_circle() {
        let params = VehicleParams::default();
        let beta = params.steer_gain * 5.0 / params.wheelbase;
        let samples = simulate_turn(5.0, 1.0, &params, 5.0 / beta, 1e-3).unwrap();
        let last = samples.last().unwrap();
        let target = 21f64.sqrt();
        assert!((last.rear_speed - target).abs() / target < 0.01);
        for s in samples.iter().filter(|s| s.time >= 5.0 / beta - 1e-9) {
            assert!((s.rear.norm() - target).abs() / target < 0.01);
        }
        for w in samples.windows(2) {
            assert!(w[1].delta >= w[0].delta);
        }
    }

    #[test]
    fn wait_holds_pose() {
        let params = VehicleParams::default();
        let config = PlannerConfig::default();
        let path = [state(0.0, 0.0, 0.3, 1.0, 0), state(0.0, 0.0, 0.3, 0.0, 1)];
        let samples = synthesize(&path, &params, &config, 0.5).unwrap();
        assert!(samples
            .iter()
            .all(|s| s.front == Vec2::new(0.0, 0.0) && s.rear_speed == 0.0));
    }

    #[test]
    fn rejects_speed_jump() {
        let params = VehicleParams::default();
        let config = PlannerConfig::default();
        let path = [state(0.0, 0.0, 0.0, 0.0, 0), state(3.0, 0.0, 0.0, 3.0, 1)];
        assert!(matches!(
            synthesize(&path, &params, &config, 0.1),
            Err(TrajectoryError::NotReplayable { index: 0, .. })
        ));
    }
}
