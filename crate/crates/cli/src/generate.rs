//! Seeded random scenarios for stress tests and quick demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vstar::scenario::StartPose;
use vstar::{
    Bounds, LatticeSpec, MovingObstacle, PlannerConfig, Scenario, Shape, StaticObstacle, Vec2, VehicleParams,
};

/// Small map (≤ 20 m square, unit lattice, v_max ≤ 3) with up to three static
/// obstacles and two movers, none of them covering the start or goal.
pub fn random_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = rng.gen_range(10.0..=20.0_f64).round();
    let h = rng.gen_range(10.0..=20.0_f64).round();
    let start = Vec2::new(rng.gen_range(1.0..w * 0.3), rng.gen_range(1.0..h - 1.0));
    let goal = Vec2::new(rng.gen_range(w * 0.6..w - 1.0), rng.gen_range(1.0..h - 1.0));
    // Only the six unit lattice moves are drivable from rest.
    let heading = f64::from(rng.gen_range(0..6_u8)) * std::f64::consts::FRAC_PI_3;
    let vehicle = VehicleParams {
        max_speed: [2.0, 2.5, 3.0][rng.gen_range(0..3)],
        max_steer: rng.gen_range(30.0_f64..45.0).to_radians(),
        ..VehicleParams::default()
    };
    let clear = |c: Vec2, r: f64| c.distance(start) > r + 1.5 && c.distance(goal) > r + 1.5;

    let mut static_obstacles = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let c = Vec2::new(rng.gen_range(2.0..w - 2.0), rng.gen_range(2.0..h - 2.0));
        let shape = if rng.gen_bool(0.5) {
            Shape::Circle {
                center: c,
                radius: rng.gen_range(0.5..2.0),
            }
        } else {
            let half = Vec2::new(rng.gen_range(0.3..1.0), rng.gen_range(1.0..4.0));
            Shape::Rect {
                min: c - half,
                max: c + half,
            }
        };
        let reach = match &shape {
            Shape::Circle { radius, .. } => *radius,
            Shape::Rect { min, max, .. } => max.distance(*min) / 2.0,
            Shape::Polygon { .. } => unreachable!(),
        };
        if clear(c, reach) {
            static_obstacles.push(StaticObstacle::new(shape, 0.0));
        }
    }

    let mut moving_obstacles = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let p0 = Vec2::new(rng.gen_range(w * 0.35..w * 0.65), rng.gen_range(0.0..h));
        let v = Vec2::from_angle(rng.gen_range(-3.1..3.1)) * rng.gen_range(0.3..1.5);
        if p0.distance(start) > 3.0 {
            moving_obstacles.push(MovingObstacle {
                trajectory: (0..=30).map(|k| p0 + v * k as f64).collect(),
                safety_radius: rng.gen_range(0.4..0.9),
            });
        }
    }

    Scenario {
        bounds: Bounds::new(Vec2::ZERO, Vec2::new(w, h)),
        static_obstacles,
        moving_obstacles,
        start: StartPose {
            position: start,
            heading,
            speed: 0.0,
        },
        goal,
        vehicle,
        lattice: LatticeSpec::new(1.0).expect("unit spacing"),
        planner: PlannerConfig {
            t_max: Some(rng.gen_range(15..=25)),
            ..PlannerConfig::default()
        },
    }
}

/// Like [`random_scenario`] but retries until the start is free.
pub fn random_valid_scenario(seed: u64) -> Scenario {
    (0..)
        .map(|k| random_scenario(seed.wrapping_mul(1_000_003).wrapping_add(k)))
        .find(|s| s.validate().is_ok())
        .expect("some seed yields a valid scenario")
}
