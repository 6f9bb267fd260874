//! Lattice states.

use crate::geometry::Vec2;
use crate::lattice::LatticeCoord;
use crate::math;

/// A lattice heading: the reduced integer index pair of a lattice displacement.
///
/// Headings reached by moving are always directions of lattice displacements,
/// so keying them by the reduced pair is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub di: i32,
    pub dj: i32,
}

impl Direction {
    /// Reduces `(i, j)` by its gcd. Returns `None` for the zero pair.
    pub fn reduced(i: i32, j: i32) -> Option<Self> {
        if i == 0 && j == 0 {
            return None;
        }
        let g = gcd(i.unsigned_abs(), j.unsigned_abs()) as i32;
        Some(Direction { di: i / g, dj: j / g })
    }

    /// Heading angle of the displacement `M·[di, dj]ᵀ`; independent of the spacing.
    pub fn angle(self) -> f64 {
        let x = f64::from(self.di) + 0.5 * f64::from(self.dj);
        let y = f64::from(self.dj) * math::sqrt(0.75);
        math::atan2(y, x)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// One node of the space–time–velocity lattice: `(x, y, θ, v, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    /// Lattice index of the position, relative to the lattice origin.
    pub coord: LatticeCoord,
    /// Position in meters.
    pub position: Vec2,
    /// Heading in radians, in (−π, π].
    pub heading: f64,
    /// Lattice direction the heading came from; `None` for the start heading,
    /// which is arbitrary.
    pub direction: Option<Direction>,
    /// Speed in m/s.
    pub speed: f64,
    /// Time step index; time is `t·τ`.
    pub t: u32,
}

impl State {
    pub fn x(&self) -> f64 {
        self.position.x
    }

    pub fn y(&self) -> f64 {
        self.position.y
    }
}
