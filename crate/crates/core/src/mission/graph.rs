//! Waypoint task graph.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::MissionError;
use crate::env::{CellClass, TerrainGrid};
use crate::geom::Vec3;

/// An undirected edge carrying one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Euclidean length, m.
    pub distance: f64,
    /// Task duration, s.
    pub duration: f64,
    /// Task priority, > 0.
    pub priority: f64,
    #[serde(default)]
    pub traversed: bool,
}

impl Edge {
    pub fn other(&self, n: usize) -> usize {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }

    /// Expected time `d / |v| + delta`.
    pub fn expected_time(&self, speed: f64) -> f64 {
        self.distance / speed + self.duration
    }

    pub fn joins(&self, x: usize, y: usize) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskGraph {
    pub waypoints: Vec<Vec3>,
    pub edges: Vec<Edge>,
    pub start: usize,
    pub destination: usize,
}

/// Generation parameters for random graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphSpec {
    pub nodes: usize,
    /// Each node links to this many nearest visible neighbours.
    pub neighbors: usize,
    pub priority_range: [f64; 2],
    pub duration_range: [f64; 2],
    /// Depth interval for waypoints, m.
    pub depth_range: [f64; 2],
    /// Graphs are redrawn until start and destination connect.
    pub max_attempts: usize,
}

impl Default for GraphSpec {
    fn default() -> Self {
        Self {
            nodes: 40,
            neighbors: 5,
            priority_range: [1.0, 10.0],
            duration_range: [60.0, 600.0],
            depth_range: [0.0, 1000.0],
            max_attempts: 50,
        }
    }
}

impl TaskGraph {
    /// Builds a graph from explicit edges `(a, b, duration, priority)`;
    /// distances come from the waypoints.
    pub fn from_edges(
        waypoints: Vec<Vec3>,
        edges: &[(usize, usize, f64, f64)],
        start: usize,
        destination: usize,
    ) -> Result<Self, MissionError> {
        let n = waypoints.len();
        if start >= n || destination >= n {
            return Err(MissionError::NodeIndex(start.max(destination)));
        }
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b, duration, priority) in edges {
            if a >= n || b >= n || a == b {
                return Err(MissionError::NodeIndex(a.max(b)));
            }
            if !(priority > 0.0) || duration < 0.0 {
                return Err(MissionError::TaskParameters { a, b });
            }
            out.push(Edge {
                a,
                b,
                distance: waypoints[a].distance(waypoints[b]),
                duration,
                priority,
                traversed: false,
            });
        }
        let g = Self {
            waypoints,
            edges: out,
            start,
            destination,
        };
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.waypoints.len()
    }

    pub fn edge_between(&self, x: usize, y: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.joins(x, y))
    }

    /// Index of the untraversed edge joining `x` and `y`.
    pub fn open_edge_between(&self, x: usize, y: usize) -> Option<usize> {
        self.edges.iter().position(|e| !e.traversed && e.joins(x, y))
    }

    /// Marks the edge `x`–`y` as done so later plans skip it.
    pub fn mark_traversed(&mut self, x: usize, y: usize) -> bool {
        match self.open_edge_between(x, y) {
            Some(i) => {
                self.edges[i].traversed = true;
                true
            }
            None => false,
        }
    }

    pub fn open_edges(&self) -> usize {
        self.edges.iter().filter(|e| !e.traversed).count()
    }

    /// Random graph over water waypoints. The start is drawn from the
    /// south-west quarter and the destination from the north-east quarter of
    /// the terrain; edges link k nearest neighbours whose straight segment
    /// stays over water.
    pub fn generate<R: Rng + ?Sized>(spec: &GraphSpec, terrain: &TerrainGrid, rng: &mut R) -> Result<Self, MissionError> {
        Self::generate_with(spec, terrain, rng, |_| true)
    }

    /// As [`generate`](Self::generate), also redrawing any waypoint that
    /// `accept` rejects.
    pub fn generate_with<R: Rng + ?Sized>(
        spec: &GraphSpec,
        terrain: &TerrainGrid,
        rng: &mut R,
        accept: impl Fn(Vec3) -> bool,
    ) -> Result<Self, MissionError> {
        if spec.nodes < 2 {
            return Err(MissionError::GraphSpec("at least two nodes are required"));
        }
        if !(spec.priority_range[0] > 0.0 && spec.priority_range[0] <= spec.priority_range[1]) {
            return Err(MissionError::GraphSpec("priority range must be positive and ordered"));
        }
        if !(spec.duration_range[0] >= 0.0 && spec.duration_range[0] <= spec.duration_range[1]) {
            return Err(MissionError::GraphSpec("duration range must be nonnegative and ordered"));
        }
        let extent = terrain.extent();
        let (w, h) = (extent.max.x, extent.max.y);
        let depth_hi = spec.depth_range[1].min(terrain.depth_extent());
        let depth_lo = spec.depth_range[0].clamp(0.0, depth_hi);
        for _ in 0..spec.max_attempts.max(1) {
            let mut pts = Vec::with_capacity(spec.nodes);
            let regions = |i: usize| match i {
                0 => ([0.0, 0.5 * w], [0.0, 0.5 * h]),
                1 => ([0.5 * w, w], [0.5 * h, h]),
                _ => ([0.0, w], [0.0, h]),
            };
            for i in 0..spec.nodes {
                let (rx, ry) = regions(i);
                let p = sample_water(terrain, rx, ry, [depth_lo, depth_hi], &accept, rng)?;
                pts.push(p);
            }
            let edges = knn_edges(&pts, spec.neighbors, terrain);
            let mut tasks = Vec::with_capacity(edges.len());
            for (a, b) in edges {
                let duration = uniform(rng, spec.duration_range);
                let priority = uniform(rng, spec.priority_range);
                tasks.push((a, b, duration, priority));
            }
            let g = Self::from_edges(pts, &tasks, 0, 1)?;
            if g.connected(g.start, g.destination) {
                return Ok(g);
            }
        }
        Err(MissionError::Disconnected)
    }

    pub fn connected(&self, from: usize, to: usize) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            for &(m, _) in &adj[n] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        false
    }

    /// Neighbour lists `(node, edge index)` over untraversed edges.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.traversed {
                continue;
            }
            adj[e.a].push((e.b, i));
            adj[e.b].push((e.a, i));
        }
        adj
    }

    /// Structural checks used after loading a dump.
    pub fn validate(&self) -> Result<(), MissionError> {
        let n = self.node_count();
        if self.start >= n || self.destination >= n {
            return Err(MissionError::NodeIndex(self.start.max(self.destination)));
        }
        for e in &self.edges {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(MissionError::NodeIndex(e.a.max(e.b)));
            }
            if !(e.priority > 0.0) || e.duration < 0.0 {
                return Err(MissionError::TaskParameters { a: e.a, b: e.b });
            }
            let d = self.waypoints[e.a].distance(self.waypoints[e.b]);
            if (d - e.distance).abs() > 1e-6 * d.max(1.0) {
                return Err(MissionError::EdgeLength { a: e.a, b: e.b });
            }
        }
        Ok(())
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, r: [f64; 2]) -> f64 {
    if r[1] > r[0] {
        rng.random_range(r[0]..r[1])
    } else {
        r[0]
    }
}

fn sample_water<R: Rng + ?Sized>(
    terrain: &TerrainGrid,
    rx: [f64; 2],
    ry: [f64; 2],
    rz: [f64; 2],
    accept: &impl Fn(Vec3) -> bool,
    rng: &mut R,
) -> Result<Vec3, MissionError> {
    for _ in 0..10_000 {
        let p = Vec3::new(uniform(rng, rx), uniform(rng, ry), uniform(rng, rz));
        if terrain.class_at(p) == CellClass::Water && accept(p) {
            return Ok(p);
        }
    }
    Err(MissionError::NoWater)
}

/// Undirected k-nearest-neighbour edges between points whose connecting
/// segment stays over water, deduplicated, in a stable order.
fn knn_edges(pts: &[Vec3], k: usize, terrain: &TerrainGrid) -> Vec<(usize, usize)> {
    let n = pts.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (pts[i].distance(pts[j]), j)).collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut taken = 0;
        for (_, j) in others {
            if taken == k {
                break;
            }
            if terrain.segment_in_water(pts[i], pts[j]) {
                pairs.push((i.min(j), i.max(j)));
                taken += 1;
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // Reversed for a min-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Dijkstra from `source` over `adj` with per-edge `weight`, skipping nodes
/// flagged in `blocked`. Returns distances and predecessor edges.
pub fn shortest_paths(
    adj: &[Vec<(usize, usize)>],
    weight: &[f64],
    source: usize,
    blocked: Option<&[bool]>,
) -> (Vec<f64>, Vec<Option<(usize, usize)>>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem(0.0, source));
    while let Some(HeapItem(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, e) in &adj[u] {
            if blocked.is_some_and(|b| b[v]) {
                continue;
            }
            let nd = d + weight[e];
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some((u, e));
                heap.push(HeapItem(nd, v));
            }
        }
    }
    (dist, pred)
}

/// Node path `source -> target` from a predecessor table.
pub fn trace_path(pred: &[Option<(usize, usize)>], source: usize, target: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut nodes = vec![target];
    let mut edges = Vec::new();
    let mut cur = target;
    while cur != source {
        let (p, e) = pred[cur]?;
        nodes.push(p);
        edges.push(e);
        cur = p;
    }
    nodes.reverse();
    edges.reverse();
    Some((nodes, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn edge_time_arithmetic() {
        let g = TaskGraph::from_edges(
            vec![Vec3::ZERO, Vec3::new(1000.0, 0.0, 0.0)],
            &[(0, 1, 100.0, 3.0)],
            0,
            1,
        )
        .unwrap();
        assert_eq!(g.edges[0].distance, 1000.0);
        assert_eq!(g.edges[0].expected_time(2.0), 600.0);
    }

    #[test]
    fn collocated_waypoints_give_zero_length() {
        let p = Vec3::new(5.0, 5.0, 5.0);
        let g = TaskGraph::from_edges(vec![p, p], &[(0, 1, 42.0, 1.0)], 0, 1).unwrap();
        assert_eq!(g.edges[0].distance, 0.0);
        assert_eq!(g.edges[0].expected_time(2.0), 42.0);
    }

    #[test]
    fn rejects_nonpositive_priority() {
        let e = TaskGraph::from_edges(vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)], &[(0, 1, 1.0, 0.0)], 0, 1);
        assert_eq!(e.unwrap_err(), MissionError::TaskParameters { a: 0, b: 1 });
    }

    #[test]
    fn forty_node_graph_is_connected_and_consistent() {
        let terrain = TerrainGrid::open_water(1000, 1000, 10.0, 1000.0);
        let mut r = rng::seeded(3);
        let g = TaskGraph::generate(&GraphSpec::default(), &terrain, &mut r).unwrap();
        assert_eq!(g.node_count(), 40);
        assert!(g.connected(g.start, g.destination));
        g.validate().unwrap();
        assert!(g.waypoints[0].x < 5000.0 && g.waypoints[0].y < 5000.0);
        assert!(g.waypoints[1].x >= 5000.0 && g.waypoints[1].y >= 5000.0);
        for e in &g.edges {
            assert!((1.0..10.0).contains(&e.priority));
            assert!((60.0..600.0).contains(&e.duration));
        }
    }

    #[test]
    fn traversal_shrinks_edge_set() {
        let terrain = TerrainGrid::open_water(100, 100, 10.0, 100.0);
        let mut r = rng::seeded(5);
        let spec = GraphSpec {
            nodes: 8,
            depth_range: [0.0, 100.0],
            ..GraphSpec::default()
        };
        let mut g = TaskGraph::generate(&spec, &terrain, &mut r).unwrap();
        let before = g.open_edges();
        let e = g.edges[0].clone();
        assert!(g.mark_traversed(e.a, e.b));
        assert_eq!(g.open_edges(), before - 1);
        assert!(!g.mark_traversed(e.a, e.b));
    }

    #[test]
    fn dijkstra_on_line() {
        let pts = (0..4).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let g = TaskGraph::from_edges(pts, &[(0, 1, 0.0, 1.0), (1, 2, 0.0, 1.0), (2, 3, 0.0, 1.0), (0, 3, 10.0, 1.0)], 0, 3)
            .unwrap();
        let w: Vec<f64> = g.edges.iter().map(|e| e.expected_time(1.0)).collect();
        let (d, pred) = shortest_paths(&g.adjacency(), &w, 0, None);
        assert_eq!(d[3], 3.0);
        assert_eq!(trace_path(&pred, 0, 3).unwrap().0, vec![0, 1, 2, 3]);
    }
}
