use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::env::{CellClass, CurrentField, Obstacle, ObstacleKind, TerrainGrid, VortexParams, WorldSnapshot};

fn open_world() -> WorldSnapshot {
    WorldSnapshot::empty(10_000.0, 1000.0)
}

fn problem(world: &WorldSnapshot, start: Vec3, goal: Vec3) -> PathProblem<'_> {
    PathProblem::new(
        start,
        goal,
        world,
        VehicleModel::default(),
        SplineConfig::default(),
        PenaltyWeights::default(),
    )
    .unwrap()
}

#[test]
fn straight_kilometre_costs_its_travel_time() {
    let w = open_world();
    let p = problem(&w, Vec3::new(1000.0, 1000.0, 100.0), Vec3::new(2000.0, 1000.0, 100.0));
    let c = p.candidate(p.straight_line());
    assert!((c.breakdown.length - 1000.0).abs() < 1e-9);
    assert!((c.breakdown.nominal_time - 500.0).abs() < 1e-9);
    assert!((c.breakdown.cost - 500.0).abs() < 1e-9);
    assert!((c.breakdown.ground_time - 500.0).abs() < 1e-9);
    assert_eq!(c.breakdown.violation(), 0.0);
    assert_eq!(c.samples.first().unwrap().position, p.start);
    assert!((c.samples.last().unwrap().position - p.goal).norm() < 1e-9);
}

#[test]
fn obstacle_hit_costs_at_least_the_collision_weight() {
    let mut w = open_world();
    w.obstacles.push(Obstacle::new(0, ObstacleKind::Static, Vec3::new(1500.0, 1000.0, 100.0), 40.0, 1.0));
    let p = problem(&w, Vec3::new(1000.0, 1000.0, 100.0), Vec3::new(2000.0, 1000.0, 100.0));
    let c = p.candidate(p.straight_line());
    assert!(c.breakdown.collision_samples > 0);
    assert!(c.breakdown.cost >= c.breakdown.nominal_time + 1e4);
    assert_eq!(c.breakdown.collision_samples, collision_samples(&w, c.positions()));
}

#[test]
fn rejects_degenerate_and_blocked_endpoints() {
    let w = open_world();
    let a = Vec3::new(10.0, 10.0, 10.0);
    let e = PathProblem::new(a, a, &w, VehicleModel::default(), SplineConfig::default(), PenaltyWeights::default());
    assert_eq!(e.unwrap_err(), PathError::StartIsGoal);

    let mut classes = vec![CellClass::Water; 100];
    classes[0] = CellClass::Coast;
    let grid = TerrainGrid::from_classes(10, 10, 10.0, 100.0, classes).unwrap();
    let w = WorldSnapshot::new(Arc::new(grid), CurrentField::calm(4, 25.0));
    let e = PathProblem::new(
        Vec3::new(5.0, 5.0, 1.0),
        Vec3::new(50.0, 50.0, 1.0),
        &w,
        VehicleModel::default(),
        SplineConfig::default(),
        PenaltyWeights::default(),
    );
    assert!(matches!(e.unwrap_err(), PathError::InCoast { which: "start", .. }));
}

/// Three positions against one vortex, evaluated term by term from the
/// written formulas with no shared helpers.
#[test]
fn hand_evaluated_three_sample_path() {
    let mut w = open_world();
    let (k, l) = (4000.0, 300.0);
    let mut v = VortexParams::new([1200.0, 900.0], k, l);
    v.vertical_scale = 0.1;
    w.field.layers[0].vortices.push(v);
    let vehicle = VehicleModel {
        speed: 1.5,
        u_max: 1.2,
        v_min: -0.3,
        v_max: 0.3,
        psi_min: -0.2,
        psi_max: 0.2,
    };
    let weights = PenaltyWeights {
        surge: 7.0,
        sway: 11.0,
        heading: 13.0,
        collision: 1e4,
    };
    let pts = [
        Vec3::new(1000.0, 1000.0, 50.0),
        Vec3::new(1100.0, 1000.0, 40.0),
        Vec3::new(1150.0, 1080.0, 40.0),
    ];
    let p = PathProblem::new(pts[0], pts[2], &w, vehicle.clone(), SplineConfig::default(), weights).unwrap();
    let (b, _) = p.assess(&pts);

    let current = |q: Vec3| -> [f64; 3] {
        let (dx, dy) = (q.x - 1200.0, q.y - 900.0);
        let r2 = dx * dx + dy * dy;
        let f = k * (1.0 - (-r2 / (l * l)).exp()) / (2.0 * PI * r2);
        let wz = 0.1 * k * (-r2 / (2.0 * l)).exp() / (2.0 * PI * l);
        [-dy * f, dx * f, wz]
    };
    let seg = |a: Vec3, c: Vec3| -> (f64, f64, f64) {
        let (dx, dy, dz) = (c.x - a.x, c.y - a.y, c.z - a.z);
        let h = (dx * dx + dy * dy).sqrt();
        (dy.atan2(dx), (-dz).atan2(h), (dx * dx + dy * dy + dz * dz).sqrt())
    };
    let (psi0, th0, l0) = seg(pts[0], pts[1]);
    let (psi1, th1, l1) = seg(pts[1], pts[2]);
    let orient = [(psi0, th0), (psi1, th1), (psi1, th1)];
    let mut surge = 0.0;
    let mut sway = 0.0;
    let mut ground = 0.0;
    for (j, q) in pts.iter().enumerate() {
        let c = current(*q);
        let (psi, th) = orient[j];
        let u = 1.5 * th.cos() * psi.cos() + c[0];
        let vv = 1.5 * th.cos() * psi.sin() + c[1];
        let ww = 1.5 * th.sin() + c[2];
        surge += (u - 1.2f64).max(0.0);
        sway += (vv - 0.3f64).max(0.0) + (-0.3 - vv).max(0.0);
        if j < 2 {
            let d = pts[j + 1] - *q;
            let len = d.norm();
            let along = ((u * d.x + vv * d.y - ww * d.z) / len).max(0.15);
            ground += len / along;
        }
    }
    let heading = ((psi1 - psi0).abs() - 0.2f64).max(0.0);
    let length = l0 + l1;
    let want = length / 1.5 + 7.0 * surge + 11.0 * sway + 13.0 * heading;

    assert!(heading > 0.0 && sway > 0.0, "case should exercise the limits");
    assert!(((b.cost - want) / want).abs() < 1e-6, "{} vs {want}", b.cost);
    assert!(((b.ground_time - ground) / ground).abs() < 1e-6);
    assert!((b.length - length).abs() < 1e-9);
    let q = p.quick_cost(&pts);
    assert!(((q.cost - b.cost) / b.cost).abs() < 1e-9);
}

#[test]
fn orientations_reproduce_from_samples() {
    let w = open_world();
    let p = problem(&w, Vec3::new(500.0, 500.0, 300.0), Vec3::new(2500.0, 1800.0, 600.0));
    let ctrl = vec![
        p.start,
        Vec3::new(900.0, 1400.0, 200.0),
        Vec3::new(1500.0, 700.0, 650.0),
        Vec3::new(1900.0, 1900.0, 500.0),
        Vec3::new(2400.0, 1200.0, 550.0),
        p.goal,
    ];
    let c = p.candidate(ctrl);
    let pos: Vec<Vec3> = c.positions().collect();
    let o = orientations(&pos);
    for (j, s) in c.samples.iter().enumerate() {
        let (psi, theta) = o[j.min(o.len() - 1)];
        assert_eq!((s.psi, s.theta), (psi, theta));
    }
}

#[test]
fn cold_plan_in_open_water_is_near_straight() {
    let w = open_world();
    let p = problem(&w, Vec3::new(1000.0, 1000.0, 100.0), Vec3::new(2200.0, 1900.0, 300.0));
    let cfg = PathPlannerConfig::default();
    let out = plan_path(&p, &cfg, 4).unwrap();
    let lower = p.start.distance(p.goal) / p.vehicle.speed;
    assert!(out.candidate.breakdown.nominal_time <= 1.05 * lower);
    assert_eq!(out.history.len(), 101);
    for h in out.history.windows(2) {
        assert!(h[1].best_cost <= h[0].best_cost);
    }
}

#[test]
fn replan_with_unchanged_world_does_not_regress() {
    let mut w = open_world();
    w.obstacles.push(Obstacle::new(0, ObstacleKind::Static, Vec3::new(1600.0, 1450.0, 200.0), 120.0, 0.0));
    let p = problem(&w, Vec3::new(1000.0, 1000.0, 200.0), Vec3::new(2200.0, 1900.0, 200.0));
    let cfg = PathPlannerConfig::default();
    let first = plan_path(&p, &cfg, 8).unwrap().candidate;
    assert_eq!(first.breakdown.collision_samples, 0);
    let at = first.samples[20].position;
    let remaining_len = first.samples.last().unwrap().s - first.samples[20].s;
    let p2 = problem(&w, at, p.goal);
    let re = replan_path(&first, &p2, &cfg, 9).unwrap();
    assert!(re.warm);
    let remaining_cost = remaining_len / p.vehicle.speed;
    assert!(re.candidate.breakdown.cost <= remaining_cost * 1.01);
}

#[test]
fn replan_avoids_new_obstacle_on_path() {
    let mut w = open_world();
    let goal = Vec3::new(2200.0, 1900.0, 200.0);
    let cfg = PathPlannerConfig::default();
    let first = {
        let p = problem(&w, Vec3::new(1000.0, 1000.0, 200.0), goal);
        plan_path(&p, &cfg, 2).unwrap().candidate
    };
    let on_path = first.samples[50].position;
    w.obstacles.push(Obstacle::new(0, ObstacleKind::Afloat, on_path, 80.0, 1.0));
    let at = first.samples[10].position;
    let p2 = problem(&w, at, goal);
    let re = replan_path(&first, &p2, &cfg, 3).unwrap();
    assert_eq!(re.candidate.breakdown.collision_samples, 0);
    assert_eq!(collision_samples(&w, re.candidate.positions()), 0);
}

#[test]
fn replan_after_path_end_falls_back_to_cold() {
    let w = open_world();
    let p = problem(&w, Vec3::new(1000.0, 1000.0, 200.0), Vec3::new(1500.0, 1000.0, 200.0));
    let cfg = PathPlannerConfig {
        bbo: crate::bbo::BboConfig {
            pop_size: 10,
            iterations: 5,
            ..Default::default()
        },
        ..Default::default()
    };
    let first = p.candidate(p.straight_line());
    let p2 = problem(&w, Vec3::new(1600.0, 1000.0, 200.0), Vec3::new(1000.0, 1000.0, 200.0));
    let re = replan_path(&first, &p2, &cfg, 1).unwrap();
    assert!(!re.warm);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quick_and_literal_costs_agree(
        free in proptest::collection::vec(0.0f64..1.0, 12),
        strength in -8000.0f64..8000.0,
    ) {
        let mut w = open_world();
        w.field.layers[0].vortices.push(VortexParams::new([1500.0, 1400.0], strength, 400.0));
        w.field.layers[1].vortices.push(VortexParams::new([1700.0, 1200.0], -strength, 250.0));
        w.obstacles.push(Obstacle::new(0, ObstacleKind::Static, Vec3::new(1600.0, 1450.0, 200.0), 150.0, 0.0));
        let p = problem(&w, Vec3::new(1000.0, 1000.0, 200.0), Vec3::new(2200.0, 1900.0, 400.0));
        let b = p.bounds;
        let coords: Vec<f64> = free.iter().enumerate().map(|(i, t)| match i % 3 {
            0 => b.min.x + t * (b.max.x - b.min.x),
            1 => b.min.y + t * (b.max.y - b.min.y),
            _ => b.min.z + t * (b.max.z - b.min.z),
        }).collect();
        let pos = p.sample_positions(&p.control_points(&coords));
        let (full, samples) = p.assess(&pos);
        let quick = p.quick_cost(&pos);
        prop_assert!((full.cost - quick.cost).abs() <= 1e-9 * full.cost.abs().max(1.0));
        prop_assert!((full.ground_time - quick.ground_time).abs() <= 1e-9 * full.ground_time.max(1.0));
        prop_assert_eq!(full.collision_samples, quick.collision_samples);
        // Penalty consistency and hull containment.
        prop_assert!(full.cost - full.nominal_time >= 0.0);
        prop_assert!((full.nominal_time - full.length / p.vehicle.speed).abs() < 1e-9);
        for s in samples {
            prop_assert!(b.contains(s.position) || (s.position - b.clamp(s.position)).norm() < 1e-9);
        }
    }
}
