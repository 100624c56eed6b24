//! Priority-vector decoding, validity criteria and the mission cost.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::graph::{shortest_paths, trace_path, TaskGraph};
use super::MissionError;
use crate::bbo::Infeasible;

pub const PRIORITY_MIN: f64 = -200.0;
pub const PRIORITY_MAX: f64 = 100.0;
/// Priority given to nodes already on the walk.
const VISITED: f64 = -1e9;

/// A start-to-destination walk chosen on the task graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSequence {
    pub nodes: Vec<usize>,
    /// Graph edge index of each consecutive pair.
    pub edges: Vec<usize>,
    /// Decoding vector that produced the walk (empty if built directly).
    pub priorities: Vec<f64>,
    /// Sum of expected edge times, s.
    pub expected_time: f64,
    /// Sum of edge priorities.
    pub total_priority: f64,
}

impl TaskSequence {
    pub fn from_nodes(graph: &TaskGraph, nodes: Vec<usize>, speed: f64) -> Result<Self, MissionError> {
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        for w in nodes.windows(2) {
            let e = graph
                .open_edge_between(w[0], w[1])
                .ok_or(MissionError::MissingEdge { a: w[0], b: w[1] })?;
            edges.push(e);
        }
        Ok(Self::assemble(graph, nodes, edges, Vec::new(), speed))
    }

    fn assemble(graph: &TaskGraph, nodes: Vec<usize>, edges: Vec<usize>, priorities: Vec<f64>, speed: f64) -> Self {
        let expected_time = edges.iter().map(|&e| graph.edges[e].expected_time(speed)).sum();
        let total_priority = edges.iter().map(|&e| graph.edges[e].priority).sum();
        Self {
            nodes,
            edges,
            priorities,
            expected_time,
            total_priority,
        }
    }

    /// Number of tasks (edges) on the walk.
    pub fn tasks(&self) -> usize {
        self.edges.len()
    }
}

/// Untraversed adjacency, edge times and shortest times to the destination,
/// computed once per planner call.
#[derive(Clone, Debug)]
pub struct WorkingGraph<'g> {
    pub graph: &'g TaskGraph,
    pub adjacency: Vec<Vec<(usize, usize)>>,
    pub edge_time: Vec<f64>,
    /// Shortest expected time from each node to `destination`.
    pub to_destination: Vec<f64>,
    pub destination: usize,
    pub speed: f64,
}

impl<'g> WorkingGraph<'g> {
    pub fn new(graph: &'g TaskGraph, destination: usize, speed: f64) -> Self {
        let adjacency = graph.adjacency();
        let edge_time: Vec<f64> = graph.edges.iter().map(|e| e.expected_time(speed)).collect();
        let (to_destination, _) = shortest_paths(&adjacency, &edge_time, destination, None);
        Self {
            graph,
            adjacency,
            edge_time,
            to_destination,
            destination,
            speed,
        }
    }

    /// Shortest untraversed route `from -> destination` avoiding `blocked`.
    fn shortest_route(&self, from: usize, blocked: Option<&[bool]>) -> Option<(Vec<usize>, Vec<usize>, f64)> {
        let (dist, pred) = shortest_paths(&self.adjacency, &self.edge_time, from, blocked);
        let t = dist[self.destination];
        if !t.is_finite() {
            return None;
        }
        let (nodes, edges) = trace_path(&pred, from, self.destination)?;
        Some((nodes, edges, t))
    }
}

/// Greedy walk from `start`: always move to the unvisited neighbour with the
/// highest priority that can still reach the destination within `budget`
/// (strict), judged by the precomputed shortest-time bound. A dead end is
/// completed by the shortest route avoiding visited nodes, or replaced by the
/// shortest route from `start`.
pub fn decode_sequence(
    work: &WorkingGraph<'_>,
    priorities: &[f64],
    start: usize,
    budget: f64,
) -> Result<TaskSequence, Infeasible> {
    let n = work.graph.node_count();
    let dest = work.destination;
    let assemble = |nodes, edges| TaskSequence::assemble(work.graph, nodes, edges, priorities.to_vec(), work.speed);
    if start == dest {
        return Ok(assemble(vec![dest], Vec::new()));
    }
    let floor = work.to_destination[start];
    if !(floor < budget) {
        return Err(Infeasible::new(if floor.is_finite() {
            alloc::format!("shortest route needs {floor:.1} s but only {budget:.1} s are available")
        } else {
            alloc::format!("destination {dest} is unreachable from node {start}")
        }));
    }

    let mut pr = priorities.to_vec();
    pr.resize(n, PRIORITY_MIN);
    let mut visited = vec![false; n];
    let mut nodes = vec![start];
    let mut edges = Vec::new();
    let mut time = 0.0;
    let mut cur = start;
    visited[start] = true;
    pr[start] = VISITED;

    while cur != dest {
        let mut best: Option<(usize, usize, f64)> = None;
        for &(m, e) in &work.adjacency[cur] {
            if visited[m] {
                continue;
            }
            let t = time + work.edge_time[e];
            if !(t + work.to_destination[m] < budget) {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, _, _)) => pr[m] > pr[b] || (pr[m] == pr[b] && m < b),
            };
            if better {
                best = Some((m, e, t));
            }
        }
        match best {
            Some((m, e, t)) => {
                visited[m] = true;
                pr[m] = VISITED;
                nodes.push(m);
                edges.push(e);
                time = t;
                cur = m;
            }
            None => {
                let mut blocked = visited.clone();
                blocked[cur] = false;
                match work.shortest_route(cur, Some(&blocked)) {
                    Some((tail_nodes, tail_edges, t)) if time + t < budget => {
                        nodes.extend_from_slice(&tail_nodes[1..]);
                        edges.extend(tail_edges);
                    }
                    _ => {
                        let (n2, e2, _) = work
                            .shortest_route(start, None)
                            .ok_or_else(|| Infeasible::new("destination unreachable"))?;
                        return Ok(assemble(n2, e2));
                    }
                }
                break;
            }
        }
    }
    Ok(assemble(nodes, edges))
}

/// The validity criteria a task sequence must meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Begins at the start and ends at the destination.
    Endpoints,
    /// Consecutive nodes are joined by an (untraversed) edge.
    Adjacency,
    /// No node appears twice.
    RepeatedNode,
    /// No edge is used twice.
    RepeatedEdge,
    /// Total expected time strictly below the budget.
    TimeBudget,
}

/// Lists every violated criterion; empty means valid.
pub fn validate_sequence(
    graph: &TaskGraph,
    nodes: &[usize],
    start: usize,
    destination: usize,
    budget: f64,
    speed: f64,
) -> Vec<Criterion> {
    let mut out = Vec::new();
    if nodes.first() != Some(&start) || nodes.last() != Some(&destination) {
        out.push(Criterion::Endpoints);
    }
    let mut edges = Vec::new();
    let mut adjacency_ok = true;
    for w in nodes.windows(2) {
        match graph.open_edge_between(w[0], w[1]) {
            Some(e) => edges.push(e),
            None => adjacency_ok = false,
        }
    }
    if !adjacency_ok {
        out.push(Criterion::Adjacency);
    }
    let mut seen = vec![false; graph.node_count()];
    if nodes.iter().any(|&n| n >= seen.len() || core::mem::replace(&mut seen[n], true)) {
        out.push(Criterion::RepeatedNode);
    }
    let mut used = vec![false; graph.edges.len()];
    if edges.iter().any(|&e| core::mem::replace(&mut used[e], true)) {
        out.push(Criterion::RepeatedEdge);
    }
    let time: f64 = edges.iter().map(|&e| graph.edges[e].expected_time(speed)).sum();
    if !(time < budget) {
        out.push(Criterion::TimeBudget);
    }
    out
}

/// Coefficients of the mission cost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionCostParams {
    /// Weight on the gap between mission time and available time.
    pub phi1: f64,
    /// Weight on the inverse-priority sum.
    pub phi2: f64,
    /// Added (plus the overshoot) when mission time exceeds the budget.
    pub overrun_penalty: f64,
}

impl Default for MissionCostParams {
    fn default() -> Self {
        Self {
            phi1: 1.0,
            phi2: 100.0,
            overrun_penalty: 1e6,
        }
    }
}

/// `phi1 |sum(leg + delta) - T_available| + phi2 sum(1/rho)`, plus the
/// overrun penalty when the summed time exceeds the budget.
/// `leg_costs[k]` is the travel cost of the `k`-th edge of the walk.
pub fn mission_cost(
    graph: &TaskGraph,
    edges: &[usize],
    leg_costs: &[f64],
    params: &MissionCostParams,
    t_available: f64,
) -> Result<f64, MissionError> {
    if leg_costs.len() != edges.len() {
        return Err(MissionError::MissingLegCost {
            legs: edges.len(),
            costs: leg_costs.len(),
        });
    }
    let total: f64 = edges.iter().zip(leg_costs).map(|(&e, c)| c + graph.edges[e].duration).sum();
    let inverse: f64 = edges.iter().map(|&e| 1.0 / graph.edges[e].priority).sum();
    let mut cost = params.phi1 * (total - t_available).abs() + params.phi2 * inverse;
    if total > t_available {
        cost += params.overrun_penalty + (total - t_available);
    }
    Ok(cost)
}

/// Mission cost with each leg's travel estimated as `d / |v|`.
pub fn expected_cost(graph: &TaskGraph, seq: &TaskSequence, params: &MissionCostParams, t_available: f64, speed: f64) -> f64 {
    let legs: Vec<f64> = seq.edges.iter().map(|&e| graph.edges[e].distance / speed).collect();
    mission_cost(graph, &seq.edges, &legs, params, t_available).expect("one leg per edge")
}
