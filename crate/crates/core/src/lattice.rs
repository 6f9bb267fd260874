//! Hexagonal lattice geometry and canonical state identity.
//!
//! The lattice is generated by `u1 = [m, 0]` and `u2 = [m/2, m·√3/2]`, which
//! meet at π/3. Every position the planner visits is `origin + M·[i, j]ᵀ` with
//! `M = [u1 | u2]`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_3;
use core::fmt;

use crate::geometry::Vec2;
use crate::math;
use crate::state::{Direction, State};

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeError {
    /// Spacing must be finite and positive.
    InvalidSpacing(f64),
    /// The position is not within half the snapping tolerance of a lattice point.
    OffLattice { x: f64, y: f64, distance: f64 },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::InvalidSpacing(m) => write!(f, "lattice spacing must be > 0, got {m}"),
            LatticeError::OffLattice { x, y, distance } => {
                write!(
                    f,
                    "({x}, {y}) is {distance} m away from the nearest lattice point"
                )
            }
        }
    }
}

impl core::error::Error for LatticeError {}

/// Integer lattice index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeCoord {
    pub i: i32,
    pub j: i32,
}

impl LatticeCoord {
    pub const fn new(i: i32, j: i32) -> Self {
        Self { i, j }
    }
}

impl core::ops::Add for LatticeCoord {
    type Output = LatticeCoord;
    fn add(self, rhs: LatticeCoord) -> LatticeCoord {
        LatticeCoord::new(self.i + rhs.i, self.j + rhs.j)
    }
}

/// Hex lattice with spacing `m` anchored at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    spacing: f64,
    origin: Vec2,
}

impl LatticeSpec {
    pub fn new(spacing: f64) -> Result<Self, LatticeError> {
        Self::with_origin(spacing, Vec2::ZERO)
    }

    pub fn with_origin(spacing: f64, origin: Vec2) -> Result<Self, LatticeError> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(LatticeError::InvalidSpacing(spacing));
        }
        Ok(Self { spacing, origin })
    }

    /// Same spacing, different anchor.
    pub fn anchored_at(self, origin: Vec2) -> Self {
        Self { origin, ..self }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn u1(&self) -> Vec2 {
        Vec2::new(self.spacing, 0.0)
    }

    pub fn u2(&self) -> Vec2 {
        Vec2::new(self.spacing / 2.0, self.spacing * math::sqrt(3.0) / 2.0)
    }

    /// `M·[i, j]ᵀ`, without the origin.
    pub fn displacement(&self, c: LatticeCoord) -> Vec2 {
        lattice_point(self, c)
    }

    /// Absolute position of a lattice index.
    pub fn position(&self, c: LatticeCoord) -> Vec2 {
        self.origin + lattice_point(self, c)
    }

    /// Nearest lattice index to `p` and the distance to it.
    pub fn snap(&self, p: Vec2) -> (LatticeCoord, f64) {
        let d = p - self.origin;
        let jf = d.y / (self.spacing * math::sqrt(3.0) / 2.0);
        let ifl = d.x / self.spacing - jf / 2.0;
        // The rounded pair is not always nearest in a skewed basis; check the
        // surrounding cell.
        let (i0, j0) = (math::floor(ifl) as i32, math::floor(jf) as i32);
        let mut best = (LatticeCoord::new(i0, j0), f64::INFINITY);
        for di in -1..=2 {
            for dj in -1..=2 {
                let c = LatticeCoord::new(i0 + di, j0 + dj);
                let dist = self.position(c).distance(p);
                if dist < best.1 {
                    best = (c, dist);
                }
            }
        }
        best
    }

    /// Largest index offset the neighbour generator must consider:
    /// `⌈v_max·τ / m⌉ + 1`.
    pub fn candidate_index_bound(&self, v_max: f64, tau: f64) -> i32 {
        math::ceil(v_max * tau / self.spacing) as i32 + 1
    }
}

/// `M·[i, j]ᵀ` for the hex basis.
pub fn lattice_point(spec: &LatticeSpec, c: LatticeCoord) -> Vec2 {
    let (i, j) = (f64::from(c.i), f64::from(c.j));
    let (u1, u2) = (spec.u1(), spec.u2());
    Vec2::new(u1.x * i + u2.x * j, u1.y * i + u2.y * j)
}

/// Exhaustive minimum distance between distinct lattice points with
/// `|i|, |j| ≤ index_radius`.
pub fn min_pairwise_distance(spec: &LatticeSpec, index_radius: u32) -> f64 {
    LatticeBasis::hex(spec.spacing).min_pairwise_distance(index_radius)
}

/// Area of the hexagon formed by the six nearest neighbours: `3·√3·m²`.
pub fn hex_cell_area(spec: &LatticeSpec) -> f64 {
    3.0 * math::sqrt(3.0) * spec.spacing * spec.spacing
}

/// A general two-vector lattice `u1 = [m, 0]`, `u2 = [m·cosθ, m·sinθ]`.
///
/// Only used to compare the hex choice against other angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeBasis {
    pub u1: Vec2,
    pub u2: Vec2,
}

impl LatticeBasis {
    pub fn with_angle(spacing: f64, theta: f64) -> Self {
        Self {
            u1: Vec2::new(spacing, 0.0),
            u2: Vec2::new(spacing * math::cos(theta), spacing * math::sin(theta)),
        }
    }

    pub fn hex(spacing: f64) -> Self {
        Self::with_angle(spacing, FRAC_PI_3)
    }

    pub fn point(&self, i: i32, j: i32) -> Vec2 {
        self.u1 * f64::from(i) + self.u2 * f64::from(j)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            u1: self.u1 * factor,
            u2: self.u2 * factor,
        }
    }

    pub fn min_pairwise_distance(&self, index_radius: u32) -> f64 {
        let r = index_radius as i32;
        let mut points = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
        for i in -r..=r {
            for j in -r..=r {
                points.push(self.point(i, j));
            }
        }
        let mut best = f64::INFINITY;
        for (a, p) in points.iter().enumerate() {
            for q in &points[a + 1..] {
                best = best.min(p.distance(*q));
            }
        }
        best
    }

    /// Circumradius of the fundamental triangle `(0, u1, u2)`: the farthest any
    /// plane point can be from the lattice, assuming the triangle is not obtuse.
    pub fn covering_radius(&self) -> f64 {
        let a = self.u1.norm();
        let b = self.u2.norm();
        let c = (self.u1 - self.u2).norm();
        let area2 = self.u1.cross(self.u2).abs();
        a * b * c / (2.0 * area2)
    }

    /// Number of lattice points inside the closed disc of `radius` about the origin.
    pub fn count_points_in_disc(&self, radius: f64) -> usize {
        let area = self.u1.cross(self.u2).abs();
        let shortest = self
            .u1
            .norm()
            .min(self.u2.norm())
            .min(area / self.u1.norm().max(self.u2.norm()));
        let r = math::ceil(radius / shortest) as i32 + 2;
        let mut count = 0;
        for i in -r..=r {
            for j in -r..=r {
                if self.point(i, j).norm() <= radius + 1e-12 {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Quantisation used to decide when two states are the same lattice node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationConfig {
    /// Speed bucket width, m/s.
    pub speed_quantum: f64,
    /// Positions must lie within half of this of a lattice point, meters.
    pub snap_tolerance: f64,
}

impl QuantizationConfig {
    /// Fine speed buckets: distinct reachable speeds get distinct keys, so
    /// equal keys imply identical successor sets.
    pub fn for_lattice(spec: &LatticeSpec, tau: f64) -> Self {
        Self {
            speed_quantum: 1e-6 * spec.spacing / tau,
            snap_tolerance: 1e-6 * spec.spacing,
        }
    }

    /// Quarter-cell-per-step speed buckets.
    pub fn coarse(spec: &LatticeSpec, tau: f64) -> Self {
        Self {
            speed_quantum: spec.spacing / (4.0 * tau),
            ..Self::for_lattice(spec, tau)
        }
    }

    pub fn speed_bucket(&self, speed: f64) -> i64 {
        math::round(speed / self.speed_quantum) as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeadingKey {
    /// The start heading (arbitrary, never produced by a move).
    Initial,
    Lattice(Direction),
}

/// Identity of a lattice node: position index, heading, speed bucket and time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey {
    pub coord: LatticeCoord,
    pub heading: HeadingKey,
    pub speed_bucket: i64,
    pub t: u32,
}

impl StateKey {
    /// Key from the state's stored lattice index, without re-snapping.
    pub fn of(state: &State, quantization: &QuantizationConfig) -> Self {
        Self {
            coord: state.coord,
            heading: state.direction.map_or(HeadingKey::Initial, HeadingKey::Lattice),
            speed_bucket: quantization.speed_bucket(state.speed),
            t: state.t,
        }
    }
}

/// Canonical key of `state`, snapping its position back onto the lattice.
pub fn canonical_state_key(
    state: &State,
    spec: &LatticeSpec,
    quantization: &QuantizationConfig,
) -> Result<StateKey, LatticeError> {
    let (coord, distance) = spec.snap(state.position);
    if distance > quantization.snap_tolerance / 2.0 {
        return Err(LatticeError::OffLattice {
            x: state.position.x,
            y: state.position.y,
            distance,
        });
    }
    Ok(StateKey {
        coord,
        ..StateKey::of(state, quantization)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn spec(m: f64) -> LatticeSpec {
        LatticeSpec::new(m).unwrap()
    }

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn lattice_point_examples() {
        let s = spec(1.0);
        assert_eq!(lattice_point(&s, LatticeCoord::new(0, 0)), Vec2::ZERO);
        assert!(close(
            lattice_point(&s, LatticeCoord::new(1, 0)),
            Vec2::new(1.0, 0.0),
            1e-15
        ));
        assert!(close(
            lattice_point(&s, LatticeCoord::new(0, 1)),
            Vec2::new(0.5, 0.866_025_403_784_438_6),
            1e-15
        ));
        assert!(close(
            lattice_point(&spec(2.0), LatticeCoord::new(1, 1)),
            Vec2::new(3.0, 1.732_050_807_568_877_2),
            1e-15
        ));
    }

    #[test]
    fn basis_angle_is_pi_over_three() {
        let s = spec(1.7);
        let cos = s.u1().dot(s.u2()) / (s.u1().norm() * s.u2().norm());
        assert!((math::acos(cos) - FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn min_distance_examples() {
        assert!((min_pairwise_distance(&spec(1.0), 5) - 1.0).abs() < 1e-9);
        assert!((min_pairwise_distance(&spec(2.5), 3) - 2.5).abs() < 1e-9);
        assert!((min_pairwise_distance(&spec(1.0), 1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hex_area_examples() {
        assert!((hex_cell_area(&spec(1.0)) - 5.196_152_422_706_632).abs() < 1e-12);
        assert!((hex_cell_area(&spec(2.0)) - 20.784_609_690_826_528).abs() < 1e-12);
        let degenerate = LatticeSpec {
            spacing: 0.0,
            origin: Vec2::ZERO,
        };
        assert_eq!(hex_cell_area(&degenerate), 0.0);
    }

    #[test]
    fn invalid_spacing() {
        assert!(LatticeSpec::new(0.0).is_err());
        assert!(LatticeSpec::new(-1.0).is_err());
        assert!(LatticeSpec::new(f64::NAN).is_err());
    }

    #[test]
    fn snap_round_trip() {
        let s = LatticeSpec::with_origin(0.7, Vec2::new(3.0, -2.0)).unwrap();
        for i in -6..=6 {
            for j in -6..=6 {
                let c = LatticeCoord::new(i, j);
                let (back, d) = s.snap(s.position(c) + Vec2::new(1e-9, -1e-9));
                assert_eq!(back, c);
                assert!(d < 1e-8);
            }
        }
    }

    #[test]
    fn covering_radius_values() {
        assert!((LatticeBasis::hex(1.0).covering_radius() - 1.0 / math::sqrt(3.0)).abs() < 1e-12);
        let square = LatticeBasis::with_angle(1.0, FRAC_PI_2);
        assert!((square.covering_radius() - 1.0 / math::sqrt(2.0)).abs() < 1e-12);
    }

    #[test]
    fn hex_needs_fewest_points_at_equal_coverage() {
        let hex = LatticeBasis::hex(1.0);
        let target = hex.covering_radius();
        for theta in [FRAC_PI_6, FRAC_PI_2] {
            let b = LatticeBasis::with_angle(1.0, theta);
            let b = b.scaled(target / b.covering_radius());
            for r in 3..=12 {
                let radius = f64::from(r);
                assert!(
                    b.count_points_in_disc(radius) > hex.count_points_in_disc(radius),
                    "theta {theta} radius {radius}"
                );
            }
        }
    }

    #[test]
    fn coarse_quantum_merges_close_speeds() {
        let s = spec(1.0);
        let q = QuantizationConfig::coarse(&s, 1.0);
        assert_eq!(q.speed_bucket(1.0), q.speed_bucket(1.1));
        assert_ne!(q.speed_bucket(1.0), q.speed_bucket(1.2));
    }
}
