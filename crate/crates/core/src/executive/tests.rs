use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::bbo::BboConfig;
use crate::env::{CurrentField, ObstacleKind, TerrainGrid, VortexParams};
use crate::mission::GraphSpec;

fn quick_config() -> ExecutiveConfig {
    let mut cfg = ExecutiveConfig::default();
    cfg.path.bbo = BboConfig {
        pop_size: 30,
        iterations: 30,
        ..BboConfig::path_default()
    };
    cfg.mission.bbo = BboConfig {
        pop_size: 30,
        iterations: 40,
        ..BboConfig::mission_default()
    };
    cfg
}

fn open_world() -> WorldSnapshot {
    WorldSnapshot::empty(10_000.0, 1000.0)
}

fn line_scenario(t_available: f64) -> MissionScenario {
    // 0 -> 2 -> 3 -> 1 along x, 1 km apart.
    let wp = vec![
        Vec3::new(1000.0, 5000.0, 100.0),
        Vec3::new(4000.0, 5000.0, 100.0),
        Vec3::new(2000.0, 5000.0, 100.0),
        Vec3::new(3000.0, 5000.0, 100.0),
    ];
    let graph = TaskGraph::from_edges(wp, &[(0, 2, 100.0, 5.0), (2, 3, 100.0, 5.0), (3, 1, 100.0, 5.0)], 0, 1).unwrap();
    MissionScenario {
        world: open_world(),
        graph,
        t_available,
    }
}

fn vortex_scenario(seed: u64) -> MissionScenario {
    let terrain = Arc::new(TerrainGrid::open_water(1000, 1000, 10.0, 1000.0));
    let mut field = CurrentField::calm(4, 250.0);
    for (i, layer) in field.layers.iter_mut().enumerate() {
        let mut v = VortexParams::new([3000.0 + 800.0 * i as f64, 6000.0], 2500.0, 600.0);
        v.update_rate = 1.0;
        v.noise.center_x = 20.0;
        v.noise.strength = 50.0;
        layer.vortices.push(v);
    }
    let mut world = WorldSnapshot::new(terrain.clone(), field);
    world.obstacles.push(Obstacle::new(0, ObstacleKind::Afloat, Vec3::new(5000.0, 5000.0, 300.0), 80.0, 1.0));
    let spec = GraphSpec {
        nodes: 12,
        ..GraphSpec::default()
    };
    let graph = TaskGraph::generate(&spec, &terrain, &mut rng::seeded(seed)).unwrap();
    MissionScenario {
        world,
        graph,
        t_available: 14_400.0,
    }
}

#[test]
fn trigger_examples() {
    assert_eq!(check_replan_trigger(923.2, 987.7), TriggerDecision::Continue);
    assert_eq!(check_replan_trigger(987.7, 987.7), TriggerDecision::Continue);
    assert_eq!(check_replan_trigger(1000.0, 987.7), TriggerDecision::ReplanMission);
}

#[test]
fn single_edge_calm_mission_succeeds_without_replans() {
    let wp = vec![Vec3::new(1000.0, 1000.0, 100.0), Vec3::new(3000.0, 1000.0, 100.0)];
    let graph = TaskGraph::from_edges(wp, &[(0, 1, 120.0, 4.0)], 0, 1).unwrap();
    let s = MissionScenario {
        world: open_world(),
        graph,
        t_available: 14_400.0,
    };
    let t = run_mission(&s, &quick_config(), 1);
    assert_eq!(t.outcome, Outcome::Success);
    assert_eq!(t.ledger.replans, 0);
    assert_eq!(t.visited, vec![0, 1]);
    assert!(t.ledger.t_residual() > 0.0);
    let leg = &t.ledger.legs[0];
    assert!(leg.travel >= 1000.0 - 1e-9 && leg.travel < 1000.0 * 1.1, "{}", leg.travel);
    assert_eq!(leg.collision_samples, 0);
}

struct Inflate;

impl LegHook for Inflate {
    fn travel_time(&mut self, _leg: usize, travel: f64) -> f64 {
        2.0 * travel
    }
}

#[test]
fn inflated_legs_trigger_a_replan_after_the_first() {
    let s = line_scenario(14_400.0);
    let t = run_mission_with(&s, &quick_config(), 2, &mut VirtualClock::default(), &mut Inflate);
    assert!(t.ledger.legs[0].replan);
    let first_check = t
        .events
        .iter()
        .find_map(|e| match &e.kind {
            EventKind::TriggerChecked { leg, decision, .. } => Some((*leg, *decision)),
            _ => None,
        })
        .unwrap();
    assert_eq!(first_check, (0, TriggerDecision::ReplanMission));
    assert!(t.ledger.replans >= 1);
}

#[test]
fn budget_exhaustion_is_failure() {
    let s = line_scenario(14_400.0);
    struct Stall;
    impl LegHook for Stall {
        fn travel_time(&mut self, _leg: usize, _travel: f64) -> f64 {
            20_000.0
        }
    }
    let t = run_mission_with(&s, &quick_config(), 0, &mut VirtualClock::default(), &mut Stall);
    assert_eq!(t.outcome, Outcome::Failure);
    assert!(t.ledger.t_residual() <= 0.0);
}

#[test]
fn impossible_budget_is_infeasible() {
    let s = line_scenario(1000.0);
    let t = run_mission(&s, &quick_config(), 0);
    assert!(matches!(t.outcome, Outcome::Infeasible { .. }));
    assert!(t.ledger.legs.is_empty());
}

fn check_trace_invariants(t: &MissionTrace) {
    let l = &t.ledger;
    assert_eq!(l.accrued_us + l.residual_us, l.t_available_us);
    for (i, e) in t.events.iter().enumerate() {
        assert_eq!(e.seq, i);
        assert_eq!(e.ledger.accrued_us + e.ledger.residual_us, l.t_available_us);
        if i > 0 {
            assert!(e.time >= t.events[i - 1].time);
        }
    }
    assert_eq!(l.cost_total_us() - l.cost_mission_us, l.compute_us.iter().sum::<Micros>());
    let checks: Vec<_> = t
        .events
        .iter()
        .filter_map(|e| match &e.kind {
            EventKind::TriggerChecked {
                decision,
                realized,
                expected,
                ..
            } => Some((*decision, *realized, *expected)),
            _ => None,
        })
        .collect();
    assert_eq!(checks.len(), l.compute_us.len());
    let replans = checks.iter().filter(|c| c.0 == TriggerDecision::ReplanMission).count();
    assert_eq!(replans, l.replans);
    for (d, realized, expected) in checks {
        assert_eq!(d == TriggerDecision::ReplanMission, realized > expected);
    }
    if t.outcome == Outcome::Success {
        assert!(l.residual_us > 0);
        assert_eq!(*t.visited.last().unwrap(), t.graph.destination);
    }
    let walk: Vec<usize> = t.ledger.legs.iter().map(|l| l.from).chain(t.ledger.legs.last().map(|l| l.to)).collect();
    if !walk.is_empty() && t.ledger.legs.iter().all(|l| l.completed) {
        assert_eq!(walk, t.visited);
    }
}

#[test]
fn vortex_mission_keeps_its_books() {
    let s = vortex_scenario(4);
    let t = run_mission(&s, &quick_config(), 9);
    check_trace_invariants(&t);
    assert_eq!(t.outcome, Outcome::Success, "{:?}", t.summary);
    assert!(t.summary.path_calls >= t.summary.legs);
}

#[test]
fn traces_are_deterministic() {
    let s = vortex_scenario(5);
    let a = run_mission(&s, &quick_config(), 3);
    let b = run_mission(&s, &quick_config(), 3);
    assert_eq!(a, b);
    let c = run_mission(&s, &quick_config(), 4);
    assert_ne!(a.events, c.events);
}

#[test]
fn line_mission_visits_in_order() {
    let s = line_scenario(14_400.0);
    let t = run_mission(&s, &quick_config(), 5);
    check_trace_invariants(&t);
    assert_eq!(t.outcome, Outcome::Success);
    assert_eq!(t.visited, vec![0, 2, 3, 1]);
    assert_eq!(t.graph.open_edges(), 0);
}
