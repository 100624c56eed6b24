use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::cost::{PathCandidate, PathProblem, PenaltyWeights, SplineConfig};
use super::spline::greville;
use super::PathError;
use crate::bbo::{self, BboConfig, Evaluation, GenerationStats, Infeasible, Problem};
use crate::geom::{Aabb, Vec3};
use crate::rng::SimRng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathPlannerConfig {
    pub bbo: BboConfig,
    pub spline: SplineConfig,
    pub weights: PenaltyWeights,
    /// Share of a replanning population seeded from the previous best.
    pub warm_fraction: f64,
    /// Std of the jitter applied to warm copies, as a fraction of each
    /// axis' bound range.
    pub warm_jitter: f64,
    /// Mutation std as a fraction of each axis' bound range.
    pub mutation_scale: f64,
}

impl Default for PathPlannerConfig {
    fn default() -> Self {
        Self {
            bbo: BboConfig::path_default(),
            spline: SplineConfig::default(),
            weights: PenaltyWeights::default(),
            warm_fraction: 0.3,
            warm_jitter: 0.02,
            mutation_scale: 0.1,
        }
    }
}

/// Result of one planner call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    pub candidate: PathCandidate,
    pub history: Vec<GenerationStats>,
    /// True when the population was seeded from a previous plan.
    pub warm: bool,
}

/// BBO view of a path problem: SIVs are the free control-point coordinates.
struct SplineEncoding<'p, 'w> {
    problem: &'p PathProblem<'w>,
    sigma: [f64; 3],
}

impl<'p, 'w> SplineEncoding<'p, 'w> {
    fn new(problem: &'p PathProblem<'w>, scale: f64) -> Self {
        let e = problem.bounds.extent();
        Self {
            problem,
            sigma: [scale * e.x, scale * e.y, scale * e.z],
        }
    }

    fn axis_bounds(&self, axis: usize) -> (f64, f64) {
        let b = &self.problem.bounds;
        match axis {
            0 => (b.min.x, b.max.x),
            1 => (b.min.y, b.max.y),
            _ => (b.min.z, b.max.z),
        }
    }
}

impl Problem for SplineEncoding<'_, '_> {
    type Solution = Vec<f64>;

    fn dimension(&self) -> usize {
        3 * self.problem.free_points()
    }

    fn random_solution(&self, rng: &mut SimRng) -> Vec<f64> {
        (0..self.dimension())
            .map(|i| {
                let (lo, hi) = self.axis_bounds(i % 3);
                if hi > lo {
                    rng.random_range(lo..hi)
                } else {
                    lo
                }
            })
            .collect()
    }

    fn evaluate(&self, s: &Vec<f64>) -> Evaluation {
        let ctrl = self.problem.control_points(s);
        let b = self.problem.quick_cost(&self.problem.sample_positions(&ctrl));
        Evaluation {
            cost: b.cost,
            violation: b.violation(),
        }
    }

    fn exchange_siv(&self, receiver: &mut Vec<f64>, donor: &Vec<f64>, index: usize) {
        receiver[index] = donor[index];
    }

    fn mutate(&self, s: &mut Vec<f64>, rate: f64, rng: &mut SimRng) {
        for (i, x) in s.iter_mut().enumerate() {
            if rng.random::<f64>() < rate {
                let sigma = self.sigma[i % 3];
                if sigma > 0.0 {
                    *x += Normal::new(0.0, sigma).expect("finite sigma").sample(rng);
                }
            }
        }
    }

    fn repair(&self, s: &mut Vec<f64>) -> Result<(), Infeasible> {
        for (i, x) in s.iter_mut().enumerate() {
            let (lo, hi) = self.axis_bounds(i % 3);
            *x = x.clamp(lo, hi);
        }
        Ok(())
    }
}

fn run_bbo(
    problem: &PathProblem<'_>,
    config: &PathPlannerConfig,
    initial: Vec<Vec<f64>>,
    seed: u64,
    warm: bool,
) -> Result<PlannedPath, PathError> {
    let enc = SplineEncoding::new(problem, config.mutation_scale);
    let out = bbo::run(&enc, &config.bbo, initial, seed)?;
    let candidate = problem.candidate(problem.control_points(&out.best.siv));
    Ok(PlannedPath {
        candidate,
        history: out.history,
        warm,
    })
}

/// Plans a path from scratch.
pub fn plan_path(problem: &PathProblem<'_>, config: &PathPlannerConfig, seed: u64) -> Result<PlannedPath, PathError> {
    run_bbo(problem, config, Vec::new(), seed, false)
}

/// Index of the sample of `path` closest to `p`.
fn nearest_sample(path: &PathCandidate, p: Vec3) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, s) in path.samples.iter().enumerate() {
        let d = s.position.distance(p);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Places `n` points evenly by arc length along a polyline.
fn resample_polyline(poly: &[Vec3], n: usize) -> Vec<Vec3> {
    let mut cum = Vec::with_capacity(poly.len());
    cum.push(0.0);
    for w in poly.windows(2) {
        let last = *cum.last().unwrap();
        cum.push(last + w[0].distance(w[1]));
    }
    let total = *cum.last().unwrap();
    (0..n)
        .map(|i| {
            let target = total * i as f64 / (n - 1) as f64;
            let k = cum.partition_point(|&c| c < target).clamp(1, poly.len() - 1);
            let span = cum[k] - cum[k - 1];
            let t = if span > 0.0 { (target - cum[k - 1]) / span } else { 0.0 };
            poly[k - 1].lerp(poly[k], t.clamp(0.0, 1.0))
        })
        .collect()
}

/// Control polygon for the rest of `previous` starting at `from`: the
/// previous control points still ahead of the vehicle, re-spaced along the
/// polygon `from -> ahead.. -> goal`.
pub fn warm_control_points(previous: &PathCandidate, from: Vec3, goal: Vec3, n: usize, order: usize) -> Option<Vec<Vec3>> {
    let m = previous.samples.len();
    if m < 2 {
        return None;
    }
    let j = nearest_sample(previous, from);
    if j + 1 >= m {
        return None;
    }
    let spans = (previous.control_points.len() + 1 - order) as f64;
    let u = spans * j as f64 / (m - 1) as f64;
    let nprev = previous.control_points.len();
    let mut poly = Vec::with_capacity(nprev + 1);
    poly.push(from);
    for i in 1..nprev - 1 {
        if greville(nprev, order, i) > u {
            poly.push(previous.control_points[i]);
        }
    }
    poly.push(goal);
    Some(resample_polyline(&poly, n))
}

/// Replans from `problem.start` (the vehicle position) reusing the previous
/// best. Falls back to a cold plan once the previous path is used up.
pub fn replan_path(
    previous: &PathCandidate,
    problem: &PathProblem<'_>,
    config: &PathPlannerConfig,
    seed: u64,
) -> Result<PlannedPath, PathError> {
    let n = problem.spline.control_points;
    let Some(seed_ctrl) = warm_control_points(previous, problem.start, problem.goal, n, problem.spline.order) else {
        return plan_path(problem, config, seed);
    };
    // Let the box cover the reused points so clamping does not undo them.
    let mut widened = problem.clone();
    let extent = problem.world.extent();
    widened.bounds = seed_ctrl
        .iter()
        .fold(problem.bounds, |b: Aabb, &p| b.union_point(p))
        .intersect(&extent);
    let free: Vec<f64> = seed_ctrl[1..n - 1].iter().flat_map(|p| p.to_array()).collect();

    let pop = config.bbo.pop_size;
    let warm_count = (crate::math::round(config.warm_fraction * pop as f64) as usize).clamp(1, pop);
    let ext = widened.bounds.extent();
    let sig = [config.warm_jitter * ext.x, config.warm_jitter * ext.y, config.warm_jitter * ext.z];
    let mut rng = crate::rng::derive(seed, u64::MAX);
    let mut initial = Vec::with_capacity(warm_count);
    initial.push(free.clone());
    for _ in 1..warm_count {
        let jittered = free
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let s = sig[i % 3];
                if s > 0.0 {
                    x + Normal::new(0.0, s).expect("finite sigma").sample(&mut rng)
                } else {
                    x
                }
            })
            .collect();
        initial.push(jittered);
    }
    run_bbo(&widened, config, initial, seed, true)
}
