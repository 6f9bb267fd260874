use std::f64::consts::{FRAC_PI_3, PI};

use proptest::prelude::*;
use vstar::environment::{
    point_blocked, transition_blocked, zone_at_time, MovingObstacle, Shape, StaticObstacle, ZoneParams,
};
use vstar::geometry::{wrap_angle, Vec2};
use vstar::heuristics::{build_waterflow, euclidean_h, waterflow_h, GoalHeuristic};
use vstar::kinematics::{
    heading_cone_check, rear_speed_at, steering_profile, transition_feasible, turn_geometry, Infeasible,
    VehicleParams,
};
use vstar::lattice::{
    canonical_state_key, lattice_point, LatticeCoord, LatticeSpec, QuantizationConfig, StateKey,
};
use vstar::search::{HeuristicKind, PlannerConfig};
use vstar::state::State;
use vstar::trajectory::synthesize;
use vstar::{plan, PlanStatus, Scenario};
use vstar_testkit::{cost_to_go, open_scenario};

proptest! {
    #[test]
    fn lattice_is_linear(m in 0.1f64..5.0, a in -50i32..50, b in -50i32..50, c in -50i32..50, d in -50i32..50) {
        let spec = LatticeSpec::new(m).unwrap();
        let sum = lattice_point(&spec, LatticeCoord::new(a + c, b + d));
        let parts = lattice_point(&spec, LatticeCoord::new(a, b)) + lattice_point(&spec, LatticeCoord::new(c, d));
        prop_assert!((sum - parts).norm() <= 1e-12 * (1.0 + sum.norm()));
    }

    #[test]
    fn state_key_matches_quantized_equality(
        i in -20i32..20, j in -20i32..20, v1 in 0.0f64..4.0, v2 in 0.0f64..4.0, t in 0u32..30,
    ) {
        let spec = LatticeSpec::new(1.0).unwrap();
        let q = QuantizationConfig::coarse(&spec, 1.0);
        let coord = LatticeCoord::new(i, j);
        let make = |v: f64| State { coord, position: spec.position(coord), heading: 0.0, direction: None, speed: v, t };
        let (a, b) = (make(v1), make(v2));
        let ka = canonical_state_key(&a, &spec, &q).unwrap();
        let kb = canonical_state_key(&b, &spec, &q).unwrap();
        prop_assert_eq!(q.speed_bucket(v1) == q.speed_bucket(v2), ka == kb);
        prop_assert_eq!(ka, StateKey::of(&a, &q));
    }

    #[test]
    fn acceleration_clause_is_symmetric(v in 0.0f64..4.0, w in 0.0f64..4.0) {
        let params = VehicleParams::default();
        let spec = LatticeSpec::new(1.0).unwrap();
        let g = turn_geometry(Vec2::new(1.0, 0.0), 0.0, 0.0);
        let accel = |a, b| transition_feasible(a, b, &g, &params, &spec, 1.0) == Err(Infeasible::AccelerationBound);
        prop_assert_eq!(accel(v, w), accel(w, v));
    }

    #[test]
    fn cone_check_is_rotation_invariant(
        x in -5.0f64..5.0, y in -5.0f64..5.0, heading in -PI..PI, delta in 0.05f64..1.5, rot in -PI..PI,
    ) {
        let d = Vec2::new(x, y);
        prop_assume!(d.norm() > 1e-3);
        // Skip configurations on the cone boundary where rounding decides.
        let off = wrap_angle(d.angle() - heading).abs();
        prop_assume!((off - delta).abs() > 1e-6);
        prop_assert_eq!(
            heading_cone_check(d, heading, delta),
            heading_cone_check(d.rotate(rot), wrap_angle(heading + rot), delta)
        );
    }

    #[test]
    fn rear_speed_decays_to_steady_state(r in 2.5f64..20.0, omega in 0.1f64..2.0) {
        let params = VehicleParams::default();
        let p = steering_profile(r, omega, &params).unwrap();
        let settle = 5.0 / p.beta;
        let mut last = f64::INFINITY;
        for k in 0..=200 {
            let v = rear_speed_at(settle * 2.0 * k as f64 / 200.0, &p);
            prop_assert!(v <= last + 1e-12);
            last = v;
        }
        let target = omega * (r * r - params.wheelbase * params.wheelbase).sqrt();
        prop_assert!((rear_speed_at(settle, &p) - target).abs() / target < 0.01);
        prop_assert!(p.delta_at(0.0) == 0.0);
        prop_assert!((p.delta_at(1e6) - p.delta_inf).abs() < 1e-12);
    }

    #[test]
    fn stationary_circle_lies_inside_zone(
        vx in -3.0f64..3.0, vy in -3.0f64..3.0, s in 0.2f64..2.0, angle in -PI..PI, frac in 0.0f64..1.0,
    ) {
        let o = MovingObstacle { trajectory: vec![Vec2::ZERO, Vec2::new(vx, vy)], safety_radius: s };
        let zone = zone_at_time(&o, 0.0, &ZoneParams::new(&VehicleParams::default(), 1.0));
        prop_assert!(zone.contains(Vec2::from_angle(angle) * (s * frac)));
    }

    #[test]
    fn larger_radius_never_unblocks(
        px in 0.0f64..10.0, py in 0.0f64..10.0, s in 0.2f64..2.0, grow in 0.0f64..2.0, t in 0.0f64..8.0,
    ) {
        let mut sc = open_scenario(10.0, 10.0, Vec2::new(0.5, 0.5), 0.0, Vec2::new(9.0, 9.0), VehicleParams::default());
        let trajectory = (0..10).map(|k| Vec2::new(5.0, k as f64)).collect();
        sc.moving_obstacles.push(MovingObstacle { trajectory, safety_radius: s });
        let p = Vec2::new(px, py);
        let before = point_blocked(p, t, &sc);
        sc.moving_obstacles[0].safety_radius = s + grow;
        prop_assert!(!before || point_blocked(p, t, &sc));
    }
}

#[test]
fn edge_sampling_converges_to_dense_check() {
    let mut sc = open_scenario(
        20.0,
        20.0,
        Vec2::new(2.0, 10.0),
        0.0,
        Vec2::new(18.0, 10.0),
        VehicleParams::default(),
    );
    sc.static_obstacles.push(StaticObstacle::new(
        Shape::Circle {
            center: Vec2::new(5.0, 11.35),
            radius: 0.4,
        },
        0.0,
    ));
    let trajectory = (0..10).map(|k| Vec2::new(8.0, 4.0 + 1.5 * k as f64)).collect();
    sc.moving_obstacles.push(MovingObstacle {
        trajectory,
        safety_radius: 0.5,
    });
    let spec = sc.lattice_spec();
    let mut disagreements = Vec::new();
    for (to, heading, t) in [
        (LatticeCoord::new(3, 0), 0.0, 3u32),
        (LatticeCoord::new(2, 1), (0.75f64.sqrt()).atan2(2.5), 3),
        (LatticeCoord::new(4, 0), 0.0, 4),
        (LatticeCoord::new(3, 1), (0.75f64.sqrt()).atan2(3.5), 2),
    ] {
        for start_i in 0..8 {
            let from_c = LatticeCoord::new(start_i, 0);
            let from = State {
                coord: from_c,
                position: spec.position(from_c),
                heading: 0.0,
                direction: None,
                speed: 2.0,
                t,
            };
            let to_c = from_c + to;
            let to_s = State {
                coord: to_c,
                position: spec.position(to_c),
                heading,
                direction: None,
                speed: 3.0,
                t: t + 1,
            };
            let g = turn_geometry(to_s.position - from.position, 0.0, heading);
            let dense = transition_blocked(&from, &to_s, &g, &sc, 20_000);
            let converged = [2000, 4000, 8000]
                .iter()
                .all(|&n| transition_blocked(&from, &to_s, &g, &sc, n) == dense);
            if !converged {
                disagreements.push((start_i, to));
            }
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:?}");
}

fn walled(goal: Vec2, heading: f64) -> Scenario {
    let v = VehicleParams {
        max_speed: 3.0,
        max_steer: 35f64.to_radians(),
        ..VehicleParams::default()
    };
    let mut s = open_scenario(16.0, 16.0, Vec2::new(2.0, 2.0), heading, goal, v);
    s.static_obstacles.push(StaticObstacle::new(
        Shape::Rect {
            min: Vec2::new(7.0, 0.0),
            max: Vec2::new(8.0, 11.0),
        },
        0.2,
    ));
    s
}

fn heuristic_scenarios() -> Vec<Scenario> {
    let mut out = vec![
        walled(Vec2::new(13.0, 3.0), FRAC_PI_3),
        walled(Vec2::new(12.0, 12.0), 0.0),
    ];
    let mut mover = walled(Vec2::new(13.0, 13.0), FRAC_PI_3);
    mover.static_obstacles.clear();
    mover.moving_obstacles.push(MovingObstacle {
        trajectory: (0..40).map(|k| Vec2::new(14.0 - 0.5 * k as f64, 6.0)).collect(),
        safety_radius: 0.8,
    });
    out.push(mover);
    out
}

#[test]
fn planner_heuristics_admissible_and_consistent() {
    for s in heuristic_scenarios() {
        let config = PlannerConfig {
            t_max: Some(18),
            ..PlannerConfig::default()
        };
        let ctg = cost_to_go(&s, &config, 2_000_000).expect("enumeration fits");
        let field = build_waterflow(&s, config.field_cell(&s)).unwrap();
        let euclid = GoalHeuristic::new(&s, config.goal_tolerance, config.tau, None);
        let water = GoalHeuristic::new(&s, config.goal_tolerance, config.tau, Some(&field));
        let mut reached = 0;
        for (i, st) in ctg.states.iter().enumerate() {
            let he = euclid.steps(st.position);
            let hw = water.steps(st.position);
            assert!(hw >= he);
            if let Some(c) = ctg.cost[i] {
                reached += 1;
                assert!(
                    he <= f64::from(c) + 1e-9 && hw <= f64::from(c) + 1e-9,
                    "{st:?} {he} {hw} {c}"
                );
            }
            for &j in &ctg.successors[i] {
                let p = ctg.states[j].position;
                assert!(he <= 1.0 + euclid.steps(p) + 1e-9);
                assert!(hw <= 1.0 + water.steps(p) + 1e-9);
            }
        }
        assert!(reached > 10);
    }
}

#[test]
fn grid_geodesic_stays_within_octile_bound() {
    let s = open_scenario(
        30.0,
        30.0,
        Vec2::new(1.0, 1.0),
        0.0,
        Vec2::new(15.0, 15.0),
        VehicleParams::default(),
    );
    let field = build_waterflow(&s, 0.5).unwrap();
    let kappa = (PI / 8.0).cos();
    for ix in (0..field.width).step_by(3) {
        for iy in (0..field.height).step_by(3) {
            let c = field.cell_center(ix, iy);
            let d = c.distance(s.goal);
            if d < 1.0 {
                continue;
            }
            let ratio = field.get(ix, iy) / d;
            assert!(ratio >= 1.0 - 1e-9 && ratio <= 1.0 / kappa + 2.0 * field.cell / d + 1e-9);
            let w = waterflow_h(&field, c, s.goal, 4.0).unwrap();
            assert!(w >= euclidean_h(c, s.goal, 4.0));
        }
    }
}

#[test]
fn synthesized_paths_keep_wheelbase_and_converge() {
    let v = VehicleParams {
        max_speed: 4.0,
        ..VehicleParams::default()
    };
    let s = open_scenario(
        30.0,
        30.0,
        Vec2::new(2.0, 2.0),
        FRAC_PI_3,
        Vec2::new(25.0, 8.0),
        v,
    );
    let config = PlannerConfig {
        heuristic: HeuristicKind::Waterflow,
        ..PlannerConfig::default()
    };
    let r = plan(&s, &config).unwrap();
    assert_eq!(r.status, PlanStatus::Found);
    let mut finals = Vec::new();
    for dt in [0.1, 0.05, 0.025, 0.0125] {
        let samples = synthesize(&r.waypoints, &s.vehicle, &config, dt).unwrap();
        for x in &samples {
            assert!(((x.front - x.rear).norm() - s.vehicle.wheelbase).abs() < 1e-9);
        }
        finals.push(samples.last().unwrap().rear);
    }
    let changes: Vec<f64> = finals.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    for w in changes.windows(2) {
        assert!(w[1] <= 4.0 * w[0] + 1e-12);
    }
}
