//! The mission loop: plan a task sequence, plan and fly each leg through the
//! evolving world, keep the time ledger, and replan paths or the mission when
//! the world disagrees with the plan.

mod clock;
mod ledger;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bbo::GenerationStats;
use crate::env::{sense_obstacles, step_obstacles, CurrentField, Obstacle, WorldSnapshot};
use crate::geom::Vec3;
use crate::mission::{mission_cost, plan_mission, replan_mission, MissionPlan, MissionPlannerConfig, TaskGraph};
use crate::pathplan::{plan_path, replan_path, PathCandidate, PathError, PathPlannerConfig, PathProblem, VehicleModel};
use crate::rng::{self, stream, SimRng};

pub use clock::{ComputeClock, VirtualClock};
pub use ledger::{to_micros, to_seconds, LedgerSnapshot, LegRecord, Micros, MissionLedger};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExecutiveConfig {
    pub vehicle: VehicleModel,
    pub path: PathPlannerConfig,
    pub mission: MissionPlannerConfig,
    /// Fraction of the initial budget the mission planner keeps in hand.
    pub reserve_fraction: f64,
    pub sensor_range: f64,
    /// Sensing noise std per unit of obstacle uncertainty.
    pub sensing_noise: f64,
    /// Sensed obstacles are planned around with their radius grown by this
    /// many uncertainty units.
    pub obstacle_margin: f64,
    /// Sensing checkpoints per leg.
    pub checkpoints: usize,
    /// Plans per leg before accepting a path that still collides.
    pub path_attempts: usize,
    /// Current-field evolution steps applied at the start of each leg.
    pub field_steps: usize,
}

impl Default for ExecutiveConfig {
    fn default() -> Self {
        Self {
            vehicle: VehicleModel::default(),
            path: PathPlannerConfig::default(),
            mission: MissionPlannerConfig::default(),
            reserve_fraction: 0.03,
            sensor_range: 2000.0,
            sensing_noise: 1.0,
            obstacle_margin: 4.0,
            checkpoints: 4,
            path_attempts: 3,
            field_steps: 1,
        }
    }
}

/// Everything a mission starts from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionScenario {
    pub world: WorldSnapshot,
    pub graph: TaskGraph,
    pub t_available: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerDecision {
    Continue,
    ReplanMission,
}

/// A leg that ran longer than expected calls for a mission replan.
pub fn check_replan_trigger(realized: f64, expected: f64) -> TriggerDecision {
    if realized > expected {
        TriggerDecision::ReplanMission
    } else {
        TriggerDecision::Continue
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
    Infeasible { reason: String },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Failure => "failure",
            Outcome::Infeasible { .. } => "infeasible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    MissionPlanned {
        replan: bool,
        start: usize,
        nodes: Vec<usize>,
        expected_time: f64,
        total_priority: f64,
        cost: f64,
        budget: f64,
        compute_us: Micros,
        history: Vec<GenerationStats>,
    },
    WorldEvolved {
        leg: usize,
        field: CurrentField,
        obstacles: Vec<Obstacle>,
    },
    PathPlanned {
        leg: usize,
        from: usize,
        to: usize,
        warm: bool,
        attempt: usize,
        start: Vec3,
        goal: Vec3,
        compute_us: Micros,
        path: PathCandidate,
        history: Vec<GenerationStats>,
    },
    /// True obstacles while executed samples `first..` of the leg's
    /// current segment are flown.
    SegmentFlown {
        leg: usize,
        first: usize,
        obstacles: Vec<Obstacle>,
    },
    LegCompleted {
        record: LegRecord,
    },
    TriggerChecked {
        leg: usize,
        decision: TriggerDecision,
        realized: f64,
        expected: f64,
        compute_us: Micros,
    },
    Finished {
        outcome: Outcome,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub seq: usize,
    /// Mission time, s.
    pub time: f64,
    pub ledger: LedgerSnapshot,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// One-row digest of a mission.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionSummary {
    pub outcome: String,
    pub t_available: f64,
    pub t_mission: f64,
    pub t_residual: f64,
    pub mission_replans: usize,
    pub path_calls: usize,
    pub path_replans: usize,
    pub legs: usize,
    pub initial_tasks: usize,
    pub initial_priority: f64,
    pub initial_expected: f64,
    pub cost_mission: f64,
    pub cost_total: f64,
    pub compute_total: f64,
    pub path_cpu: f64,
    pub mission_cpu: f64,
    pub collision_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionTrace {
    pub seed: u64,
    pub events: Vec<TraceEvent>,
    pub ledger: MissionLedger,
    pub outcome: Outcome,
    pub summary: MissionSummary,
    /// Graph at the end, with traversed edges marked.
    pub graph: TaskGraph,
    /// Nodes visited, in order.
    pub visited: Vec<usize>,
}

/// Hook for scripting the world in tests and experiments.
pub trait LegHook {
    /// Adjusts the travel time of leg `leg` once it is flown.
    fn travel_time(&mut self, _leg: usize, travel: f64) -> f64 {
        travel
    }
}

/// Leaves every leg as simulated.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoHook;

impl LegHook for NoHook {}

/// Time to fly `positions` through `field` at water speed `speed`: each
/// segment at the tangential ground speed, floored at a tenth of `speed`.
pub fn ground_time(world: &WorldSnapshot, positions: &[Vec3], speed: f64) -> f64 {
    positions
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let len = d.norm();
            if len == 0.0 {
                return 0.0;
            }
            let c = world.field.velocity(w[0]);
            let drift = Vec3::new(c.x, c.y, -c.z);
            let along = (speed + drift.dot(d) / len).max(0.1 * speed);
            len / along
        })
        .sum()
}

fn polyline_length(p: &[Vec3]) -> f64 {
    p.windows(2).map(|w| w[0].distance(w[1])).sum()
}

fn inflate(mut sensed: Vec<Obstacle>, margin: f64) -> Vec<Obstacle> {
    for o in &mut sensed {
        o.radius += margin * o.uncertainty;
    }
    sensed
}

struct Run<'a, C: ComputeClock, H: LegHook> {
    cfg: &'a ExecutiveConfig,
    clock: &'a mut C,
    hook: &'a mut H,
    world: WorldSnapshot,
    graph: TaskGraph,
    ledger: MissionLedger,
    events: Vec<TraceEvent>,
    field_rng: SimRng,
    sense_rng: SimRng,
    path_seeds: SimRng,
    mission_seeds: SimRng,
    mission_cfg: MissionPlannerConfig,
    path_cpu: Micros,
    mission_cpu: Micros,
    path_calls: usize,
    path_replans: usize,
}

enum LegEnd {
    Arrived,
    Exhausted,
}

impl<C: ComputeClock, H: LegHook> Run<'_, C, H> {
    fn push(&mut self, kind: EventKind) {
        self.events.push(TraceEvent {
            seq: self.events.len(),
            time: self.world.time,
            ledger: self.ledger.snapshot(),
            kind,
        });
    }

    fn speed(&self) -> f64 {
        self.cfg.vehicle.speed
    }

    fn mission_work(&self) -> u64 {
        let b = &self.mission_cfg.bbo;
        (b.pop_size * (b.iterations + 1) * self.graph.node_count()) as u64
    }

    fn path_work(&self) -> u64 {
        let b = &self.cfg.path.bbo;
        let s = &self.cfg.path.spline;
        let samples = (s.control_points + 1 - s.order) * s.samples_per_span + 1;
        (b.pop_size * (b.iterations + 1) * samples) as u64
    }

    fn planning_world(&mut self, from: Vec3) -> WorldSnapshot {
        let sensed = sense_obstacles(
            &self.world.obstacles,
            from,
            self.cfg.sensor_range,
            self.cfg.sensing_noise,
            &mut self.sense_rng,
        );
        let mut w = self.world.clone();
        w.obstacles = inflate(sensed, self.cfg.obstacle_margin);
        w
    }

    fn log_mission(&mut self, plan: &MissionPlan, start: usize, replan: bool, compute_us: Micros) {
        self.push(EventKind::MissionPlanned {
            replan,
            start,
            nodes: plan.sequence.nodes.clone(),
            expected_time: plan.sequence.expected_time,
            total_priority: plan.sequence.total_priority,
            cost: plan.cost,
            budget: plan.budget,
            compute_us,
            history: plan.history.clone(),
        });
    }

    /// Plans `from -> goal`, retrying with fresh seeds while the result hits
    /// the planning world. A warm start reuses `previous`.
    fn plan_leg(
        &mut self,
        leg: usize,
        nodes: (usize, usize),
        from: Vec3,
        goal: Vec3,
        previous: Option<&PathCandidate>,
    ) -> Result<PathCandidate, PathError> {
        let planning = self.planning_world(from);
        let problem = PathProblem::new(
            from,
            goal,
            &planning,
            self.cfg.vehicle,
            self.cfg.path.spline,
            self.cfg.path.weights,
        )?;
        let attempts = self.cfg.path_attempts.max(1);
        let mut best: Option<PathCandidate> = None;
        for attempt in 0..attempts {
            let seed: u64 = self.path_seeds.random();
            self.clock.begin();
            let planned = match (previous, attempt) {
                (Some(prev), 0) => replan_path(prev, &problem, &self.cfg.path, seed)?,
                _ => plan_path(&problem, &self.cfg.path, seed)?,
            };
            let us = self.clock.end(self.path_work());
            self.path_cpu += us;
            self.path_calls += 1;
            let clear = planned.candidate.breakdown.collision_samples == 0;
            self.push(EventKind::PathPlanned {
                leg,
                from: nodes.0,
                to: nodes.1,
                warm: planned.warm,
                attempt,
                start: from,
                goal,
                compute_us: us,
                path: planned.candidate.clone(),
                history: planned.history,
            });
            let better = best
                .as_ref()
                .is_none_or(|b| planned.candidate.breakdown.cost < b.breakdown.cost);
            if better {
                best = Some(planned.candidate);
            }
            if clear {
                break;
            }
        }
        Ok(best.expect("at least one attempt"))
    }

    /// Flies edge `edge` from node `from` to `to`.
    fn fly_leg(&mut self, leg: usize, edge: usize, from: usize, to: usize) -> (LegRecord, LegEnd) {
        for _ in 0..self.cfg.field_steps {
            self.world.field.evolve(&mut self.field_rng);
        }
        self.push(EventKind::WorldEvolved {
            leg,
            field: self.world.field.clone(),
            obstacles: self.world.obstacles.clone(),
        });
        let speed = self.speed();
        let e = self.graph.edges[edge].clone();
        let start = self.graph.waypoints[from];
        let goal = self.graph.waypoints[to];
        let mut record = LegRecord {
            index: leg,
            edge,
            from,
            to,
            expected: e.expected_time(speed),
            nominal: 0.0,
            travel: 0.0,
            duration: e.duration,
            realized: 0.0,
            length: 0.0,
            path_calls: 0,
            path_replans: 0,
            collision_samples: 0,
            replan: false,
            completed: false,
            executed: alloc::vec![start],
        };
        let calls_before = self.path_calls;

        let mut active = self.plan_leg(leg, (from, to), start, goal, None).ok();
        // Unplannable legs are flown straight.
        let mut path: Vec<Vec3> = match &active {
            Some(c) => c.positions().collect(),
            None => alloc::vec![start, goal],
        };
        record.collision_samples += usize::from(self.world.collides(start));
        let mut cursor = 0;
        let mut parts = self.cfg.checkpoints.max(1);
        let mut exhausted = false;
        while parts > 0 {
            let last = path.len() - 1;
            let end = if parts == 1 {
                last
            } else {
                (cursor + (last - cursor).div_ceil(parts)).min(last)
            };
            let seg = &path[cursor..=end];
            self.push(EventKind::SegmentFlown {
                leg,
                first: record.executed.len(),
                obstacles: self.world.obstacles.clone(),
            });
            let dt = ground_time(&self.world, seg, speed);
            let len = polyline_length(seg);
            record.travel += dt;
            record.length += len;
            record.nominal += len / speed;
            record.collision_samples += seg[1..].iter().filter(|&&p| self.world.collides(p)).count();
            record.executed.extend_from_slice(&seg[1..]);
            self.advance(dt);
            cursor = end;
            parts -= 1;
            if self.ledger.residual_us <= 0 {
                exhausted = true;
                break;
            }
            if parts == 0 {
                break;
            }
            let pos = path[cursor];
            let sensed = self.planning_world(pos);
            let blocked = path[cursor..].iter().any(|&p| sensed.in_obstacle(p));
            if !blocked {
                continue;
            }
            let previous = active.take();
            match self.plan_leg(leg, (from, to), pos, goal, previous.as_ref()) {
                Ok(c) => {
                    self.path_replans += 1;
                    record.path_replans += 1;
                    path = c.positions().collect();
                    active = Some(c);
                    cursor = 0;
                }
                Err(_) => active = previous,
            }
        }
        record.path_calls = self.path_calls - calls_before;
        let adjusted = self.hook.travel_time(leg, record.travel);
        if adjusted != record.travel {
            self.ledger.accrue(adjusted - record.travel);
            record.travel = adjusted;
        }
        if !exhausted {
            self.advance(e.duration);
            record.completed = true;
        }
        record.realized = record.travel + record.duration;
        let end = if exhausted || self.ledger.residual_us <= 0 && to != self.graph.destination {
            LegEnd::Exhausted
        } else {
            LegEnd::Arrived
        };
        (record, end)
    }

    /// Moves the clock and the obstacles forward.
    fn advance(&mut self, dt: f64) {
        if dt > 0.0 {
            let extent = self.world.extent();
            step_obstacles(&mut self.world.obstacles, &self.world.field, &extent, dt);
        }
        self.ledger.accrue(dt);
        self.world.time = to_seconds(self.ledger.accrued_us);
    }
}

/// Runs a mission with the deterministic virtual clock and no hooks.
pub fn run_mission(scenario: &MissionScenario, cfg: &ExecutiveConfig, seed: u64) -> MissionTrace {
    run_mission_with(scenario, cfg, seed, &mut VirtualClock::default(), &mut NoHook)
}

pub fn run_mission_with<C: ComputeClock, H: LegHook>(
    scenario: &MissionScenario,
    cfg: &ExecutiveConfig,
    seed: u64,
    clock: &mut C,
    hook: &mut H,
) -> MissionTrace {
    let mut mission_cfg = cfg.mission.clone();
    mission_cfg.reserve = cfg.reserve_fraction.max(0.0) * scenario.t_available;
    let mut run = Run {
        cfg,
        clock,
        hook,
        world: scenario.world.clone(),
        graph: scenario.graph.clone(),
        ledger: MissionLedger::new(scenario.t_available),
        events: Vec::new(),
        field_rng: rng::derive(seed, stream::FIELD),
        sense_rng: rng::derive(seed, stream::SENSING),
        path_seeds: rng::derive(seed, stream::PATH_PLANNER),
        mission_seeds: rng::derive(seed, stream::MISSION_PLANNER),
        mission_cfg,
        path_cpu: 0,
        mission_cpu: 0,
        path_calls: 0,
        path_replans: 0,
    };
    run.world.time = 0.0;
    let speed = run.speed();
    let start = run.graph.start;
    let destination = run.graph.destination;
    let mut visited = alloc::vec![start];
    let mut executed_edges = Vec::new();
    let mut travel_times = Vec::new();

    let mission_seed: u64 = run.mission_seeds.random();
    run.clock.begin();
    let first = plan_mission(&run.graph, start, destination, scenario.t_available, speed, &run.mission_cfg, mission_seed);
    let us = run.clock.end(run.mission_work());
    run.mission_cpu += us;
    let (mut outcome, initial) = match first {
        Ok(plan) => {
            run.log_mission(&plan, start, false, us);
            (None, Some(plan))
        }
        Err(e) => (Some(Outcome::Infeasible { reason: e.to_string() }), None),
    };
    let (initial_tasks, initial_priority, initial_expected) = initial
        .as_ref()
        .map(|p| (p.sequence.tasks(), p.sequence.total_priority, p.sequence.expected_time))
        .unwrap_or((0, 0.0, 0.0));

    if let Some(plan) = initial {
        let mut sequence = plan.sequence;
        let mut k = 0;
        let mut current = start;
        let mut leg = 0;
        outcome = Some(loop {
            if current == destination {
                break if run.ledger.residual_us > 0 {
                    Outcome::Success
                } else {
                    Outcome::Failure
                };
            }
            let (next, edge) = (sequence.nodes[k + 1], sequence.edges[k]);
            let (mut record, end) = run.fly_leg(leg, edge, current, next);
            executed_edges.push(edge);
            travel_times.push(record.travel);
            if let LegEnd::Exhausted = end {
                run.ledger.legs.push(record.clone());
                run.push(EventKind::LegCompleted { record });
                break Outcome::Failure;
            }
            run.graph.edges[edge].traversed = true;
            current = next;
            visited.push(current);
            k += 1;
            leg += 1;
            if current == destination {
                run.ledger.legs.push(record.clone());
                run.push(EventKind::LegCompleted { record });
                continue;
            }

            run.clock.begin();
            let decision = check_replan_trigger(record.realized, record.expected);
            let mut compute = run.clock.end(1);
            record.replan = decision == TriggerDecision::ReplanMission;
            run.ledger.legs.push(record.clone());
            let (realized, expected) = (record.realized, record.expected);
            run.push(EventKind::LegCompleted { record });
            let mut replanned = None;
            if decision == TriggerDecision::ReplanMission {
                run.ledger.replans += 1;
                let seed: u64 = run.mission_seeds.random();
                run.clock.begin();
                let r = replan_mission(&run.graph, current, run.ledger.t_residual(), speed, &run.mission_cfg, seed);
                let us = run.clock.end(run.mission_work());
                run.mission_cpu += us;
                compute += us;
                replanned = Some(r);
            }
            run.ledger.record_compute(compute);
            run.push(EventKind::TriggerChecked {
                leg: leg - 1,
                decision,
                realized,
                expected,
                compute_us: compute,
            });
            match replanned {
                None => {}
                Some(Ok(plan)) => {
                    run.log_mission(&plan, current, true, compute);
                    sequence = plan.sequence;
                    k = 0;
                }
                Some(Err(e)) => break Outcome::Infeasible { reason: e.to_string() },
            }
        });
    }
    let outcome = outcome.expect("outcome set");

    let cost = mission_cost(
        &scenario.graph,
        &executed_edges,
        &travel_times,
        &run.mission_cfg.cost,
        scenario.t_available,
    )
    .unwrap_or(f64::INFINITY);
    run.ledger.cost_mission_us = if cost.is_finite() { to_micros(cost) } else { Micros::MAX / 4 };
    run.push(EventKind::Finished {
        outcome: outcome.clone(),
    });

    let ledger = run.ledger;
    let summary = MissionSummary {
        outcome: outcome.label().into(),
        t_available: ledger.t_available(),
        t_mission: ledger.t_mission(),
        t_residual: ledger.t_residual(),
        mission_replans: ledger.replans,
        path_calls: run.path_calls,
        path_replans: run.path_replans,
        legs: ledger.legs.len(),
        initial_tasks,
        initial_priority,
        initial_expected,
        cost_mission: ledger.cost_mission(),
        cost_total: ledger.cost_total(),
        compute_total: to_seconds(ledger.compute_total_us()),
        path_cpu: to_seconds(run.path_cpu),
        mission_cpu: to_seconds(run.mission_cpu),
        collision_samples: ledger.legs.iter().map(|l| l.collision_samples).sum(),
    };
    MissionTrace {
        seed,
        events: run.events,
        ledger,
        outcome,
        summary,
        graph: run.graph,
        visited,
    }
}

#[cfg(test)]
mod tests;
