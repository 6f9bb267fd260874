//! Bicycle-model quantities used while expanding nodes, and the transient
//! steering model used to turn waypoints into wheel traces.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;

use crate::geometry::{wrap_angle, Vec2};
use crate::lattice::LatticeSpec;
use crate::math;

/// Slack for comparisons between quantities derived from lattice sums.
const FEAS_EPS: f64 = 1e-9;

/// Below this the heading change is treated as straight motion.
const STRAIGHT_EPS: f64 = 1e-9;

/// Which minimum-radius test prunes tight turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusRule {
    /// `r ≥ L / tan δ_max`, the bicycle-model limit.
    #[default]
    Kinematic,
    /// The literal `r > L / m` test.
    LatticeRatio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleParams {
    /// Wheelbase `L`, meters.
    pub wheelbase: f64,
    /// `v_max`, m/s.
    pub max_speed: f64,
    /// Largest speed change per step, m/s.
    pub max_accel: f64,
    /// Angular threshold `δ_max`, radians. Bounds both the steering angle and
    /// the per-step heading cone.
    pub max_steer: f64,
    /// Comfort deceleration `b`, m/s² (sign ignored).
    pub comfort_decel: f64,
    /// Steering convergence constant `k` in `β = k·ω·r / L`.
    pub steer_gain: f64,
    pub radius_rule: RadiusRule,
    /// Cap on `|φ| / τ`, rad/s. `None` uses `v_max / r_min`.
    pub max_turn_rate: Option<f64>,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            wheelbase: 2.0,
            max_speed: 4.0,
            max_accel: 1.0,
            max_steer: 30f64.to_radians(),
            comfort_decel: 2.0,
            steer_gain: 0.4,
            radius_rule: RadiusRule::Kinematic,
            max_turn_rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    Wheelbase(f64),
    MaxSpeed(f64),
    MaxAccel(f64),
    MaxSteer(f64),
    ComfortDecel(f64),
    SteerGain(f64),
    MaxTurnRate(f64),
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::Wheelbase(v) => write!(f, "wheelbase must be > 0, got {v}"),
            ParamError::MaxSpeed(v) => write!(f, "max_speed must be > 0, got {v}"),
            ParamError::MaxAccel(v) => write!(f, "max_accel must be > 0, got {v}"),
            ParamError::MaxSteer(v) => write!(f, "max_steer must be in (0, 90) degrees, got {v} rad"),
            ParamError::ComfortDecel(v) => write!(f, "comfort_decel must be non-zero, got {v}"),
            ParamError::SteerGain(v) => write!(f, "steer_gain must be > 0, got {v}"),
            ParamError::MaxTurnRate(v) => write!(f, "max_turn_rate must be > 0, got {v}"),
        }
    }
}

impl core::error::Error for ParamError {}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !positive(self.wheelbase) {
            return Err(ParamError::Wheelbase(self.wheelbase));
        }
        if !positive(self.max_speed) {
            return Err(ParamError::MaxSpeed(self.max_speed));
        }
        if !positive(self.max_accel) {
            return Err(ParamError::MaxAccel(self.max_accel));
        }
        if !(positive(self.max_steer) && self.max_steer < FRAC_PI_2) {
            return Err(ParamError::MaxSteer(self.max_steer));
        }
        if !(self.comfort_decel.is_finite() && self.comfort_decel != 0.0) {
            return Err(ParamError::ComfortDecel(self.comfort_decel));
        }
        if !positive(self.steer_gain) {
            return Err(ParamError::SteerGain(self.steer_gain));
        }
        if let Some(rate) = self.max_turn_rate {
            if !positive(rate) {
                return Err(ParamError::MaxTurnRate(rate));
            }
        }
        Ok(())
    }

    /// Smallest admissible turning radius under the configured rule.
    pub fn min_turn_radius(&self, spec: &LatticeSpec) -> f64 {
        match self.radius_rule {
            RadiusRule::Kinematic => self.wheelbase / math::tan(self.max_steer),
            RadiusRule::LatticeRatio => self.wheelbase / spec.spacing(),
        }
    }

    /// Heading-change rate limit, rad/s: `v_max / r_min` of the bicycle model
    /// unless configured.
    pub fn turn_rate_limit(&self) -> f64 {
        self.max_turn_rate
            .unwrap_or_else(|| self.max_speed * math::tan(self.max_steer) / self.wheelbase)
    }
}

/// Turning radius; straight motion is explicit rather than an infinite float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Straight,
    Finite(f64),
}

impl Radius {
    pub fn value(self) -> f64 {
        match self {
            Radius::Straight => f64::INFINITY,
            Radius::Finite(r) => r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurnGeometry {
    /// `‖p‖`, meters.
    pub chord: f64,
    /// Signed heading change in (−π, π].
    pub phi: f64,
    pub radius: Radius,
    /// Length of the circular arc (or chord when straight), meters.
    pub arc_length: f64,
}

impl TurnGeometry {
    pub fn is_straight(&self) -> bool {
        matches!(self.radius, Radius::Straight)
    }

    /// Point at fraction `s ∈ [0, 1]` of the arc from `start` to `start + displacement`.
    ///
    /// The arc has radius `r` and central angle `φ`, bending toward the side
    /// `φ` turns to.
    pub fn point_along(&self, start: Vec2, displacement: Vec2, s: f64) -> Vec2 {
        match self.radius {
            Radius::Straight => start + displacement * s,
            Radius::Finite(r) => {
                let center = self.center(start, displacement, r);
                let offset = start - center;
                center + offset.rotate(self.phi * s)
            }
        }
    }

    /// Tangent direction at fraction `s` of the arc.
    pub fn tangent_along(&self, displacement: Vec2, s: f64) -> f64 {
        let chord_dir = displacement.angle();
        match self.radius {
            Radius::Straight => chord_dir,
            Radius::Finite(_) => wrap_angle(chord_dir - self.phi / 2.0 + self.phi * s),
        }
    }

    /// Turn centre of the arc.
    pub fn center(&self, start: Vec2, displacement: Vec2, r: f64) -> Vec2 {
        let mid = start + displacement * 0.5;
        let half = self.chord / 2.0;
        let h = math::sqrt((r * r - half * half).max(0.0));
        let side = displacement.perp() * (1.0 / self.chord);
        if self.phi > 0.0 {
            mid + side * h
        } else {
            mid - side * h
        }
    }
}

/// Arc geometry of a move: `φ` is the wrapped difference between the new and
/// current heading, `r = chord / (2 sin(|φ|/2))`, arc length `r·|φ|`.
pub fn turn_geometry(displacement: Vec2, current_heading: f64, new_heading: f64) -> TurnGeometry {
    let chord = displacement.norm();
    let phi = wrap_angle(new_heading - current_heading);
    if phi.abs() < STRAIGHT_EPS {
        return TurnGeometry {
            chord,
            phi: 0.0,
            radius: Radius::Straight,
            arc_length: chord,
        };
    }
    let r = chord / (2.0 * math::sin(phi.abs() / 2.0));
    TurnGeometry {
        chord,
        phi,
        radius: Radius::Finite(r),
        arc_length: r * phi.abs(),
    }
}

/// Average speed over one step of length `tau`.
pub fn speed_from_arc(geometry: &TurnGeometry, tau: f64) -> f64 {
    geometry.arc_length / tau
}

/// Why a transition was pruned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasible {
    NegativeSpeed,
    AccelerationBound,
    SpeedLimit,
    RadiusTooSmall,
    TurnRateTooHigh,
}

/// Speed and turning checks for a move from speed `v` to `v_next`.
pub fn transition_feasible(
    v: f64,
    v_next: f64,
    geometry: &TurnGeometry,
    params: &VehicleParams,
    spec: &LatticeSpec,
    tau: f64,
) -> Result<(), Infeasible> {
    if v_next < 0.0 {
        return Err(Infeasible::NegativeSpeed);
    }
    if (v_next - v).abs() > params.max_accel + FEAS_EPS {
        return Err(Infeasible::AccelerationBound);
    }
    if v_next > params.max_speed + FEAS_EPS {
        return Err(Infeasible::SpeedLimit);
    }
    if let Radius::Finite(r) = geometry.radius {
        let r_min = params.min_turn_radius(spec);
        let too_small = match params.radius_rule {
            RadiusRule::Kinematic => r < r_min - FEAS_EPS,
            RadiusRule::LatticeRatio => r <= r_min,
        };
        if too_small {
            return Err(Infeasible::RadiusTooSmall);
        }
        if geometry.phi.abs() / tau > params.turn_rate_limit() + FEAS_EPS {
            return Err(Infeasible::TurnRateTooHigh);
        }
    }
    Ok(())
}

/// True iff the displacement deviates from the heading by at most `delta_max`.
pub fn heading_cone_check(displacement: Vec2, heading: f64, delta_max: f64) -> bool {
    let n = displacement.norm();
    let along = displacement.dot(Vec2::from_angle(heading)) / n;
    along >= math::cos(delta_max) - 1e-12
}

#[derive(Debug, Clone, PartialEq)]
pub enum SteeringError {
    /// `r ≤ L`: the rear wheel has no circle of its own.
    RadiusNotAboveWheelbase { radius: f64, wheelbase: f64 },
}

impl fmt::Display for SteeringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SteeringError::RadiusNotAboveWheelbase { radius, wheelbase } => {
                write!(
                    f,
                    "front radius {radius} m must exceed the wheelbase {wheelbase} m"
                )
            }
        }
    }
}

impl core::error::Error for SteeringError {}

/// Exponential steering transient `δ(t) = δ∞·(1 − e^(−βt))` for a front wheel
/// on a circle of radius `radius` at angular speed `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringProfile {
    pub delta_inf: f64,
    pub beta: f64,
    pub omega: f64,
    pub radius: f64,
}

impl SteeringProfile {
    pub fn delta_at(&self, t: f64) -> f64 {
        self.delta_inf * (1.0 - math::exp(-self.beta * t))
    }

    /// Heading rate `(rω/L)·sin δ(t)`.
    pub fn heading_rate(&self, t: f64, wheelbase: f64) -> f64 {
        self.radius * self.omega / wheelbase * math::sin(self.delta_at(t))
    }
}

/// `δ∞ = arccos(√(r² − L²)/r)` and `β = k·ω·r/L`.
pub fn steering_profile(
    r: f64,
    omega: f64,
    params: &VehicleParams,
) -> Result<SteeringProfile, SteeringError> {
    let l = params.wheelbase;
    if r.is_nan() || r <= l {
        return Err(SteeringError::RadiusNotAboveWheelbase {
            radius: r,
            wheelbase: l,
        });
    }
    let delta_inf = if r.is_infinite() {
        0.0
    } else {
        math::acos(math::sqrt(r * r - l * l) / r)
    };
    let beta = if r.is_infinite() {
        // r·ω stays the (finite) front speed in the straight limit.
        0.0
    } else {
        params.steer_gain * omega * r / l
    };
    Ok(SteeringProfile {
        delta_inf,
        beta,
        omega,
        radius: r,
    })
}

/// Rear wheel speed `r·ω·cos δ(t)`.
pub fn rear_speed_at(t: f64, profile: &SteeringProfile) -> f64 {
    profile.radius * profile.omega * math::cos(profile.delta_at(t))
}

/// Heading samples `θ(k·dt)` for `dθ/dt = (rω/L)·sin δ(t)`, `θ(0) = 0`, by
/// fixed-step RK4. The last sample lands exactly on `t_end`.
pub fn integrate_heading(t_end: f64, dt: f64, profile: &SteeringProfile, params: &VehicleParams) -> Vec<f64> {
    let steps = math::ceil(t_end / dt - 1e-9).max(1.0) as usize;
    let h = t_end / steps as f64;
    let l = params.wheelbase;
    let f = |t: f64| profile.heading_rate(t, l);
    let mut out = Vec::with_capacity(steps + 1);
    let mut theta = 0.0;
    out.push(theta);
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = f(t);
        let k2 = f(t + h / 2.0);
        let k4 = f(t + h);
        // k2 == k3: the right-hand side does not depend on θ.
        theta += h / 6.0 * (k1 + 4.0 * k2 + k4);
        out.push(theta);
    }
    out
}

/// `R = F − L·(cos θ, sin θ)`.
pub fn rear_position(front: Vec2, theta: f64, wheelbase: f64) -> Vec2 {
    front - Vec2::from_angle(theta) * wheelbase
}
