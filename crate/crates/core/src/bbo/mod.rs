//! Biogeography-based optimization.
//!
//! Habitats are candidate solutions; good habitats (low cost) emigrate
//! features to poor ones, and habitats whose species count is improbable under
//! the island model mutate more. The engine is generic over a [`Problem`] that
//! supplies sampling, evaluation, feature exchange, mutation and repair.

mod engine;
mod rates;
mod species;

use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SimRng;

pub use engine::{migrate, run, species_counts, BboOutcome};
pub use rates::{assign_rates, RateModel, Rates};
pub use species::{linear_rates, linear_stationary, mutation_rate, species_step, stationary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BboError {
    #[error("invalid BBO configuration: {0}")]
    Config(&'static str),
    #[error("species step with dt = {dt} drives P[{index}] negative; halve dt")]
    NegativeProbability { index: usize, dt: f64 },
    #[error("rate vectors have lengths lambda={lambda}, mu={mu}; expected {expected}")]
    RateLength { expected: usize, lambda: usize, mu: usize },
    #[error("no feasible initial habitat: {0}")]
    InfeasibleInitial(Infeasible),
}

/// A solution the problem could not map back into its feasible set.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{reason}")]
pub struct Infeasible {
    pub reason: String,
}

impl Infeasible {
    pub fn new(reason: impl Into<String>) -> Self {
        Self { reason: reason.into() }
    }
}

/// Cost of a habitat and the part of it that is constraint penalty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub cost: f64,
    pub violation: f64,
}

/// What an optimization problem provides to the engine.
pub trait Problem {
    type Solution: Clone;

    /// Number of SIVs a habitat carries.
    fn dimension(&self) -> usize;
    fn random_solution(&self, rng: &mut SimRng) -> Self::Solution;
    /// Must be a pure function of the solution.
    fn evaluate(&self, solution: &Self::Solution) -> Evaluation;
    /// Copies SIV `index` of `donor` into `receiver`.
    fn exchange_siv(&self, receiver: &mut Self::Solution, donor: &Self::Solution, index: usize);
    /// Perturbs each SIV with probability `rate`.
    fn mutate(&self, solution: &mut Self::Solution, rate: f64, rng: &mut SimRng);
    fn repair(&self, solution: &mut Self::Solution) -> Result<(), Infeasible>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Habitat<S> {
    pub siv: S,
    pub cost: f64,
    pub violation: f64,
}

impl<S> Habitat<S> {
    /// Suitability index; higher is better.
    pub fn hsi(&self) -> f64 {
        -self.cost
    }
}

/// How the next generation is formed from parents and their modified copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Survivor {
    /// Modified habitats replace their parents; elites carry over untouched.
    Generational,
    /// Best `pop_size` of parents and modified copies survive.
    Truncation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BboConfig {
    pub pop_size: usize,
    pub iterations: usize,
    pub max_immigration: f64,
    pub max_emigration: f64,
    pub max_mutation: f64,
    /// Defaults to `pop_size - 1`.
    pub max_species: Option<usize>,
    pub elites: usize,
    pub rate_model: RateModel,
    pub survivor: Survivor,
}

impl Default for BboConfig {
    fn default() -> Self {
        Self::path_default()
    }
}

impl BboConfig {
    /// 100 habitats, 100 iterations, rank-linear rates, m_max = 0.1.
    pub fn path_default() -> Self {
        Self {
            pop_size: 100,
            iterations: 100,
            max_immigration: 1.0,
            max_emigration: 1.0,
            max_mutation: 0.1,
            max_species: None,
            elites: 2,
            rate_model: RateModel::RankLinear,
            survivor: Survivor::Truncation,
        }
    }

    /// 150 habitats, 200 iterations, constant rates mu = 0.2, lambda = 0.8.
    pub fn mission_default() -> Self {
        Self {
            pop_size: 150,
            iterations: 200,
            rate_model: RateModel::Constant {
                immigration: 0.8,
                emigration: 0.2,
            },
            ..Self::path_default()
        }
    }

    pub fn validate(&self) -> Result<(), BboError> {
        if self.pop_size == 0 {
            return Err(BboError::Config("pop_size must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(BboError::Config("iterations must be at least 1"));
        }
        if !(self.max_mutation > 0.0 && self.max_mutation <= 1.0) {
            return Err(BboError::Config("max_mutation must lie in (0, 1]"));
        }
        if self.elites >= self.pop_size {
            return Err(BboError::Config("elites must be fewer than pop_size"));
        }
        let rates_ok = |v: f64| (0.0..=1.0).contains(&v);
        if !rates_ok(self.max_immigration) || !rates_ok(self.max_emigration) {
            return Err(BboError::Config("max immigration/emigration must lie in [0, 1]"));
        }
        if let RateModel::Constant { immigration, emigration } = self.rate_model {
            if !rates_ok(immigration) || !rates_ok(emigration) {
                return Err(BboError::Config("constant rates must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn species_max(&self) -> usize {
        self.max_species.unwrap_or(self.pop_size.saturating_sub(1))
    }
}

/// Per-generation population statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub best_cost: f64,
    pub mean_cost: f64,
    pub mean_violation: f64,
    pub best_violation: f64,
}
