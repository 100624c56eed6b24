use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::graph::TaskGraph;
use super::sequence::{decode_sequence, expected_cost, MissionCostParams, TaskSequence, WorkingGraph};
use super::sequence::{PRIORITY_MAX, PRIORITY_MIN};
use super::MissionError;
use crate::bbo::{self, BboConfig, BboError, Evaluation, GenerationStats, Infeasible, Problem};
use crate::rng::SimRng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionPlannerConfig {
    pub bbo: BboConfig,
    pub cost: MissionCostParams,
    /// Std of the Gaussian perturbation applied to a priority entry.
    pub mutation_sigma: f64,
    /// Seconds held back from the decode budget. Ignored when even the
    /// shortest route would not fit with it.
    pub reserve: f64,
}

impl Default for MissionPlannerConfig {
    fn default() -> Self {
        Self {
            bbo: BboConfig::mission_default(),
            cost: MissionCostParams::default(),
            mutation_sigma: 0.1 * (PRIORITY_MAX - PRIORITY_MIN),
            reserve: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan {
    pub sequence: TaskSequence,
    /// Mission cost with `d / |v|` leg estimates.
    pub cost: f64,
    pub history: Vec<GenerationStats>,
    /// Budget the decoder worked against, s.
    pub budget: f64,
    pub t_available: f64,
}

/// A priority vector together with the walk it decodes to.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorityHabitat {
    pub priorities: Vec<f64>,
    pub sequence: Option<TaskSequence>,
}

struct PriorityEncoding<'g> {
    work: WorkingGraph<'g>,
    start: usize,
    budget: f64,
    t_available: f64,
    config: &'g MissionPlannerConfig,
}

impl Problem for PriorityEncoding<'_> {
    type Solution = PriorityHabitat;

    fn dimension(&self) -> usize {
        self.work.graph.node_count()
    }

    fn random_solution(&self, rng: &mut SimRng) -> PriorityHabitat {
        PriorityHabitat {
            priorities: (0..self.dimension()).map(|_| rng.random_range(PRIORITY_MIN..PRIORITY_MAX)).collect(),
            sequence: None,
        }
    }

    fn evaluate(&self, s: &PriorityHabitat) -> Evaluation {
        let seq = s.sequence.as_ref().expect("habitats are decoded by repair");
        Evaluation {
            cost: expected_cost(self.work.graph, seq, &self.config.cost, self.t_available, self.work.speed),
            violation: (seq.expected_time - self.budget).max(0.0),
        }
    }

    fn exchange_siv(&self, receiver: &mut PriorityHabitat, donor: &PriorityHabitat, index: usize) {
        receiver.priorities[index] = donor.priorities[index];
        receiver.sequence = None;
    }

    fn mutate(&self, s: &mut PriorityHabitat, rate: f64, rng: &mut SimRng) {
        let noise = Normal::new(0.0, self.config.mutation_sigma).expect("finite sigma");
        for p in &mut s.priorities {
            if rng.random::<f64>() < rate {
                *p += noise.sample(rng);
            }
        }
        s.sequence = None;
    }

    fn repair(&self, s: &mut PriorityHabitat) -> Result<(), Infeasible> {
        for p in &mut s.priorities {
            *p = p.clamp(PRIORITY_MIN, PRIORITY_MAX);
        }
        let seq = decode_sequence(&self.work, &s.priorities, self.start, self.budget)?;
        s.sequence = Some(seq);
        Ok(())
    }
}

fn check_index(graph: &TaskGraph, i: usize) -> Result<(), MissionError> {
    if i < graph.node_count() {
        Ok(())
    } else {
        Err(MissionError::NodeIndex(i))
    }
}

/// Chooses the best walk `start -> destination` whose expected time stays
/// below `t_available` (less the configured reserve when that still admits
/// the shortest route).
pub fn plan_mission(
    graph: &TaskGraph,
    start: usize,
    destination: usize,
    t_available: f64,
    speed: f64,
    config: &MissionPlannerConfig,
    seed: u64,
) -> Result<MissionPlan, MissionError> {
    check_index(graph, start)?;
    check_index(graph, destination)?;
    let work = WorkingGraph::new(graph, destination, speed);
    let floor = work.to_destination[start];
    if !(floor < t_available) {
        return Err(MissionError::Infeasible {
            gap: floor - t_available,
        });
    }
    let reserved = t_available - config.reserve.max(0.0);
    let budget = if floor < reserved { reserved } else { t_available };
    let enc = PriorityEncoding {
        work,
        start,
        budget,
        t_available,
        config,
    };
    let out = bbo::run(&enc, &config.bbo, Vec::new(), seed).map_err(|e| match e {
        BboError::InfeasibleInitial(_) => MissionError::Infeasible {
            gap: floor - budget,
        },
        other => MissionError::Bbo(other),
    })?;
    let sequence = out.best.siv.sequence.expect("population is decoded");
    Ok(MissionPlan {
        sequence,
        cost: out.best.cost,
        history: out.history,
        budget,
        t_available,
    })
}

/// Replans from `current` with the residual budget, ignoring traversed
/// edges. Already at the destination yields the one-node walk.
pub fn replan_mission(
    graph: &TaskGraph,
    current: usize,
    t_residual: f64,
    speed: f64,
    config: &MissionPlannerConfig,
    seed: u64,
) -> Result<MissionPlan, MissionError> {
    check_index(graph, current)?;
    if current == graph.destination {
        let sequence = TaskSequence::from_nodes(graph, alloc::vec![current], speed)?;
        return Ok(MissionPlan {
            sequence,
            cost: 0.0,
            history: Vec::new(),
            budget: t_residual,
            t_available: t_residual,
        });
    }
    if !(t_residual > 0.0) {
        let work = WorkingGraph::new(graph, graph.destination, speed);
        return Err(MissionError::Infeasible {
            gap: work.to_destination[current] - t_residual,
        });
    }
    plan_mission(graph, current, graph.destination, t_residual, speed, config, seed)
}
