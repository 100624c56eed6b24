//! Mission planning over a waypoint task graph: every edge carries a task
//! with a priority and a duration, and the planner picks a start-to-destination
//! walk that fits the time budget.

mod graph;
mod planner;
mod sequence;


use thiserror::Error;

use crate::bbo::BboError;

pub use graph::{shortest_paths, trace_path, Edge, GraphSpec, TaskGraph};
pub use planner::{plan_mission, replan_mission, MissionPlan, MissionPlannerConfig, PriorityHabitat};
pub use sequence::{
    decode_sequence, expected_cost, mission_cost, validate_sequence, Criterion, MissionCostParams, TaskSequence,
    WorkingGraph, PRIORITY_MAX, PRIORITY_MIN,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MissionError {
    #[error("node index {0} is out of range")]
    NodeIndex(usize),
    #[error("edge {a}-{b} needs priority > 0 and a nonnegative duration")]
    TaskParameters { a: usize, b: usize },
    #[error("edge {a}-{b} length disagrees with its waypoints")]
    EdgeLength { a: usize, b: usize },
    #[error("no open edge joins {a} and {b}")]
    MissingEdge { a: usize, b: usize },
    #[error("invalid graph spec: {0}")]
    GraphSpec(&'static str),
    #[error("could not draw a graph connecting start and destination")]
    Disconnected,
    #[error("no water cell found for a waypoint")]
    NoWater,
    #[error("{legs} legs but {costs} leg costs")]
    MissingLegCost { legs: usize, costs: usize },
    #[error("no sequence fits the budget: shortest route exceeds it by {gap:.1} s")]
    Infeasible { gap: f64 },
    #[error(transparent)]
    Bbo(#[from] BboError),
}
