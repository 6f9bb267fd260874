//! Time-to-go estimates: straight-line distance over top speed, and a
//! waterflow field that floods geodesic distance out from the goal.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_8, SQRT_2};
use core::fmt;

use crate::environment::{Bounds, StaticObstacle};
use crate::geometry::Vec2;
use crate::math;
use crate::scenario::Scenario;

/// `κ = cos(π/8)`: worst-case ratio of Euclidean to 8-connected grid length.
pub fn admissibility_scale() -> f64 {
    math::cos(FRAC_PI_8)
}

/// `‖p − goal‖ / v_max`, seconds.
pub fn euclidean_h(p: Vec2, goal: Vec2, v_max: f64) -> f64 {
    p.distance(goal) / v_max
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldError {
    InvalidCell(f64),
    GoalBlocked,
    OutOfBounds { x: f64, y: f64 },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::InvalidCell(c) => write!(f, "field cell size must be > 0, got {c}"),
            FieldError::GoalBlocked => f.write_str("goal cell is occupied"),
            FieldError::OutOfBounds { x, y } => write!(f, "({x}, {y}) lies outside the field"),
        }
    }
}

impl core::error::Error for FieldError {}

/// Geodesic distance-to-goal on a regular grid (row-major, `y` rows).
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicField {
    /// Lower-left corner of cell `(0, 0)`.
    pub origin: Vec2,
    pub cell: f64,
    pub width: usize,
    pub height: usize,
    /// Meters; `∞` for occupied or unreachable cells.
    pub values: Vec<f64>,
    pub admissibility_scale: f64,
}

impl HeuristicField {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.index(ix, iy)]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        self.origin + Vec2::new((ix as f64 + 0.5) * self.cell, (iy as f64 + 0.5) * self.cell)
    }

    /// Cell containing `p`.
    pub fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let fx = math::floor((p.x - self.origin.x) / self.cell);
        let fy = math::floor((p.y - self.origin.y) / self.cell);
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    /// Field value of the cell containing `p`, meters.
    pub fn value_at(&self, p: Vec2) -> Result<f64, FieldError> {
        self.cell_of(p)
            .map(|(ix, iy)| self.get(ix, iy))
            .ok_or(FieldError::OutOfBounds { x: p.x, y: p.y })
    }

    /// Largest finite value, for colour scaling.
    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }
}

#[derive(PartialEq)]
struct Frontier {
    dist: f64,
    index: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A cell is occupied only when it lies entirely inside one inflated static
/// obstacle, so any free point sits in a free cell.
fn cell_occupied(obstacles: &[StaticObstacle], lo: Vec2, cell: f64) -> bool {
    let corners = [
        lo,
        lo + Vec2::new(cell, 0.0),
        lo + Vec2::new(0.0, cell),
        lo + Vec2::new(cell, cell),
    ];
    obstacles.iter().any(|o| corners.iter().all(|&c| o.blocks(c)))
}

/// Grid covering `bounds` whose cell centres include `anchor` exactly.
fn aligned_grid(bounds: &Bounds, anchor: Vec2, cell: f64) -> (Vec2, usize, usize) {
    let left = math::ceil(((anchor.x - bounds.min.x) / cell - 0.5).max(0.0));
    let right = math::ceil(((bounds.max.x - anchor.x) / cell - 0.5).max(0.0));
    let below = math::ceil(((anchor.y - bounds.min.y) / cell - 0.5).max(0.0));
    let above = math::ceil(((bounds.max.y - anchor.y) / cell - 0.5).max(0.0));
    let origin = anchor - Vec2::new((left + 0.5) * cell, (below + 0.5) * cell);
    (origin, (left + right) as usize + 1, (below + above) as usize + 1)
}

/// Floods 8-connected grid distance from the goal cell through cells free of
/// static obstacles. Moving obstacles are ignored.
pub fn build_waterflow(scenario: &Scenario, cell: f64) -> Result<HeuristicField, FieldError> {
    if !(cell.is_finite() && cell > 0.0) {
        return Err(FieldError::InvalidCell(cell));
    }
    let (origin, width, height) = aligned_grid(&scenario.bounds, scenario.goal, cell);
    let mut field = HeuristicField {
        origin,
        cell,
        width,
        height,
        values: vec![f64::INFINITY; width * height],
        admissibility_scale: admissibility_scale(),
    };
    let obstacles = &scenario.static_obstacles;
    let mut occupied = vec![false; width * height];
    for iy in 0..height {
        for ix in 0..width {
            let lo = origin + Vec2::new(ix as f64 * cell, iy as f64 * cell);
            occupied[iy * width + ix] = cell_occupied(obstacles, lo, cell);
        }
    }
    let (gx, gy) = field.cell_of(scenario.goal).ok_or(FieldError::OutOfBounds {
        x: scenario.goal.x,
        y: scenario.goal.y,
    })?;
    let goal_index = field.index(gx, gy);
    if occupied[goal_index] || obstacles.iter().any(|o| o.blocks(scenario.goal)) {
        return Err(FieldError::GoalBlocked);
    }

    let diagonal = cell * SQRT_2;
    let mut heap = BinaryHeap::new();
    field.values[goal_index] = 0.0;
    heap.push(Frontier {
        dist: 0.0,
        index: goal_index,
    });
    while let Some(Frontier { dist, index }) = heap.pop() {
        if dist > field.values[index] {
            continue;
        }
        let (ix, iy) = ((index % width) as isize, (index / width) as isize);
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (ix + dx, iy + dy);
                if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                    continue;
                }
                let n = ny as usize * width + nx as usize;
                if occupied[n] {
                    continue;
                }
                let step = if dx != 0 && dy != 0 { diagonal } else { cell };
                let next = dist + step;
                if next < field.values[n] {
                    field.values[n] = next;
                    heap.push(Frontier { dist: next, index: n });
                }
            }
        }
    }
    Ok(field)
}

/// `max(euclidean_h, κ·field / v_max)`, seconds; `∞` when the cell cannot
/// reach the goal.
pub fn waterflow_h(field: &HeuristicField, p: Vec2, goal: Vec2, v_max: f64) -> Result<f64, FieldError> {
    let value = field.value_at(p)?;
    if !value.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(euclidean_h(p, goal, v_max).max(field.admissibility_scale * value / v_max))
}

/// Heuristic the planner uses, in steps, for a goal region of radius
/// `tolerance`.
///
/// Distances are reduced by the tolerance so states inside the region score
/// zero. The field term is further reduced by `2·cell` (the offset between a
/// point and its cell centre) and scaled by `σ = d/(d + 2√2·cell)`, `d = v_max·τ`,
/// because neighbouring lookups can differ by a cell diagonal more than the
/// distance actually travelled.
#[derive(Debug, Clone, Copy)]
pub struct GoalHeuristic<'a> {
    pub goal: Vec2,
    pub tolerance: f64,
    /// `v_max·τ`: the farthest one step can go.
    pub step_distance: f64,
    pub field: Option<&'a HeuristicField>,
}

impl<'a> GoalHeuristic<'a> {
    pub fn new(scenario: &Scenario, tolerance: f64, tau: f64, field: Option<&'a HeuristicField>) -> Self {
        Self {
            goal: scenario.goal,
            tolerance,
            step_distance: scenario.vehicle.max_speed * tau,
            field,
        }
    }

    /// Lower bound on the number of steps needed to get within the tolerance.
    pub fn steps(&self, p: Vec2) -> f64 {
        let euclid = (p.distance(self.goal) - self.tolerance).max(0.0) / self.step_distance;
        let Some(field) = self.field else {
            return euclid;
        };
        match field.value_at(p) {
            Ok(w) if w.is_finite() => {
                let slack = 2.0 * field.cell;
                let sigma = self.step_distance / (self.step_distance + 2.0 * SQRT_2 * field.cell);
                let geodesic = (field.admissibility_scale * w - self.tolerance - slack).max(0.0);
                euclid.max(sigma * geodesic / self.step_distance)
            }
            Ok(_) => f64::INFINITY,
            Err(_) => euclid,
        }
    }
}
