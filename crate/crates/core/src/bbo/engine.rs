use alloc::vec::Vec;

use rand::Rng;

use super::rates::{assign_rates, Rates};
use super::species::{linear_stationary, mutation_rate};
use super::{BboConfig, BboError, GenerationStats, Habitat, Infeasible, Problem, Survivor};
use crate::math;
use crate::rng::{self, SimRng};

#[derive(Clone, Debug)]
pub struct BboOutcome<S> {
    pub best: Habitat<S>,
    /// Final population, best first.
    pub population: Vec<Habitat<S>>,
    /// Entry 0 describes the initial population, entry `k` generation `k`.
    pub history: Vec<GenerationStats>,
}

fn evaluate<P: Problem>(problem: &P, siv: P::Solution) -> Habitat<P::Solution> {
    let e = problem.evaluate(&siv);
    Habitat {
        siv,
        cost: e.cost,
        violation: e.violation,
    }
}

fn sort_population<S>(pop: &mut [Habitat<S>]) {
    pop.sort_by(|a, b| a.cost.total_cmp(&b.cost));
}

fn stats<S>(pop: &[Habitat<S>]) -> GenerationStats {
    let n = pop.len() as f64;
    GenerationStats {
        best_cost: pop[0].cost,
        mean_cost: pop.iter().map(|h| h.cost).sum::<f64>() / n,
        mean_violation: pop.iter().map(|h| h.violation).sum::<f64>() / n,
        best_violation: pop[0].violation,
    }
}

/// Species count for each rank (0 = best), mapped linearly onto `0..=s_max`
/// with the best habitat holding `s_max`.
pub fn species_counts(pop_size: usize, s_max: usize) -> Vec<usize> {
    (0..pop_size)
        .map(|rank| {
            if pop_size <= 1 {
                s_max
            } else {
                let frac = (pop_size - 1 - rank) as f64 / (pop_size - 1) as f64;
                math::round(frac * s_max as f64) as usize
            }
        })
        .collect()
}

/// Roulette choice of a donor proportional to emigration, never `receiver`.
fn pick_donor(rates: &[Rates], receiver: usize, rng: &mut SimRng) -> Option<usize> {
    let total: f64 = rates
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != receiver)
        .map(|(_, r)| r.emigration)
        .sum();
    if total <= 0.0 {
        return None;
    }
    let mut t = rng.random::<f64>() * total;
    let mut last = None;
    for (j, r) in rates.iter().enumerate() {
        if j == receiver || r.emigration <= 0.0 {
            continue;
        }
        last = Some(j);
        t -= r.emigration;
        if t < 0.0 {
            return Some(j);
        }
    }
    last
}

/// Migration step for habitat `i`: with probability `lambda_i` one random SIV
/// is copied from a donor chosen in proportion to emigration. Returns `None`
/// when nothing changed or repair rejected the result.
fn migrate_one<P: Problem>(
    problem: &P,
    donors: &[Habitat<P::Solution>],
    rates: &[Rates],
    i: usize,
    rng: &mut SimRng,
) -> Option<P::Solution> {
    if rng.random::<f64>() >= rates[i].immigration {
        return None;
    }
    let j = pick_donor(rates, i, rng)?;
    let dim = problem.dimension();
    if dim == 0 {
        return None;
    }
    let index = rng.random_range(0..dim);
    let mut siv = donors[i].siv.clone();
    problem.exchange_siv(&mut siv, &donors[j].siv, index);
    problem.repair(&mut siv).ok()?;
    Some(siv)
}

/// One migration sweep over a best-first population. Habitats whose repair
/// fails keep their pre-migration SIVs. `stream` keys the per-habitat RNGs.
pub fn migrate<P: Problem>(
    problem: &P,
    pop: &[Habitat<P::Solution>],
    rates: &[Rates],
    elites: usize,
    seed: u64,
    stream: u64,
) -> Vec<P::Solution> {
    pop.iter()
        .enumerate()
        .map(|(i, h)| {
            if i < elites {
                return h.siv.clone();
            }
            let mut r = rng::indexed(seed, stream, i as u64);
            migrate_one(problem, pop, rates, i, &mut r).unwrap_or_else(|| h.siv.clone())
        })
        .collect()
}

fn initial_population<P: Problem>(
    problem: &P,
    config: &BboConfig,
    initial: Vec<P::Solution>,
    seed: u64,
) -> Result<Vec<Habitat<P::Solution>>, BboError> {
    let mut first_failure: Option<Infeasible> = None;
    let mut pop = Vec::with_capacity(config.pop_size);
    for mut s in initial.into_iter().take(config.pop_size) {
        match problem.repair(&mut s) {
            Ok(()) => pop.push(evaluate(problem, s)),
            Err(e) => {
                first_failure.get_or_insert(e);
            }
        }
    }
    let mut r = rng::indexed(seed, 0, 0);
    let max_attempts = 20 * config.pop_size.max(1);
    let mut attempts = 0;
    while pop.len() < config.pop_size && attempts < max_attempts {
        attempts += 1;
        let mut s = problem.random_solution(&mut r);
        match problem.repair(&mut s) {
            Ok(()) => pop.push(evaluate(problem, s)),
            Err(e) => {
                first_failure.get_or_insert(e);
            }
        }
    }
    if pop.is_empty() {
        return Err(BboError::InfeasibleInitial(
            first_failure.unwrap_or_else(|| Infeasible::new("problem produced no solutions")),
        ));
    }
    // Pad with copies of feasible habitats if sampling kept failing.
    let mut k = 0;
    while pop.len() < config.pop_size {
        let h = pop[k].clone();
        pop.push(h);
        k += 1;
    }
    sort_population(&mut pop);
    Ok(pop)
}

/// Runs the optimizer. `initial` seeds the population (e.g. a warm start);
/// the remainder is sampled from the problem. Generation `g`, habitat `i`
/// draws from its own stream keyed by `(seed, g, i)`.
pub fn run<P: Problem>(
    problem: &P,
    config: &BboConfig,
    initial: Vec<P::Solution>,
    seed: u64,
) -> Result<BboOutcome<P::Solution>, BboError> {
    config.validate()?;
    let n = config.pop_size;
    let mut pop = initial_population(problem, config, initial, seed)?;
    let mut history = Vec::with_capacity(config.iterations + 1);
    history.push(stats(&pop));

    let s_max = config.species_max();
    let p_species = linear_stationary(s_max, config.max_immigration, config.max_emigration);
    let p_max = p_species.iter().copied().fold(0.0, f64::max);
    let m_rates: Vec<f64> = species_counts(n, s_max)
        .into_iter()
        .map(|s| mutation_rate(p_species[s], config.max_mutation, p_max))
        .collect();
    let rates = assign_rates(n, config.rate_model, config.max_immigration, config.max_emigration);

    for generation in 1..=config.iterations as u64 {
        let mut offspring = Vec::with_capacity(n);
        for i in config.elites..n {
            let mut r = rng::indexed(seed, generation, i as u64);
            let mut changed = false;
            let mut siv = match migrate_one(problem, &pop, &rates, i, &mut r) {
                Some(s) => {
                    changed = true;
                    s
                }
                None => pop[i].siv.clone(),
            };
            if m_rates[i] > 0.0 {
                let mut mutated = siv.clone();
                problem.mutate(&mut mutated, m_rates[i], &mut r);
                if problem.repair(&mut mutated).is_ok() {
                    siv = mutated;
                    changed = true;
                }
            }
            offspring.push((i, changed, siv));
        }

        match config.survivor {
            Survivor::Generational => {
                for (i, changed, siv) in offspring {
                    if changed {
                        pop[i] = evaluate(problem, siv);
                    }
                }
            }
            Survivor::Truncation => {
                for (_, changed, siv) in offspring {
                    if changed {
                        pop.push(evaluate(problem, siv));
                    }
                }
            }
        }
        sort_population(&mut pop);
        pop.truncate(n);
        history.push(stats(&pop));
    }

    Ok(BboOutcome {
        best: pop[0].clone(),
        population: pop,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbo::{Evaluation, RateModel};
    use alloc::vec;
    use rand_distr::{Distribution, Normal};

    /// Sphere function on a box; the classic sanity problem.
    struct Sphere {
        dim: usize,
        bound: f64,
    }

    impl Problem for Sphere {
        type Solution = Vec<f64>;
        fn dimension(&self) -> usize {
            self.dim
        }
        fn random_solution(&self, rng: &mut SimRng) -> Vec<f64> {
            (0..self.dim).map(|_| rng.random_range(-self.bound..self.bound)).collect()
        }
        fn evaluate(&self, s: &Vec<f64>) -> Evaluation {
            Evaluation {
                cost: s.iter().map(|x| x * x).sum(),
                violation: 0.0,
            }
        }
        fn exchange_siv(&self, r: &mut Vec<f64>, d: &Vec<f64>, i: usize) {
            r[i] = d[i];
        }
        fn mutate(&self, s: &mut Vec<f64>, rate: f64, rng: &mut SimRng) {
            let n = Normal::new(0.0, 0.1 * 2.0 * self.bound).unwrap();
            for x in s.iter_mut() {
                if rng.random::<f64>() < rate {
                    *x += n.sample(rng);
                }
            }
        }
        fn repair(&self, s: &mut Vec<f64>) -> Result<(), Infeasible> {
            for x in s.iter_mut() {
                *x = x.clamp(-self.bound, self.bound);
            }
            Ok(())
        }
    }

    /// A problem whose every solution is infeasible.
    struct Hopeless;
    impl Problem for Hopeless {
        type Solution = u8;
        fn dimension(&self) -> usize {
            1
        }
        fn random_solution(&self, _: &mut SimRng) -> u8 {
            0
        }
        fn evaluate(&self, _: &u8) -> Evaluation {
            Evaluation { cost: 0.0, violation: 0.0 }
        }
        fn exchange_siv(&self, _: &mut u8, _: &u8, _: usize) {}
        fn mutate(&self, _: &mut u8, _: f64, _: &mut SimRng) {}
        fn repair(&self, _: &mut u8) -> Result<(), Infeasible> {
            Err(Infeasible::new("start node is not connected"))
        }
    }

    fn sphere() -> Sphere {
        Sphere { dim: 5, bound: 5.0 }
    }

    #[test]
    fn history_is_monotone_with_elites() {
        for survivor in [Survivor::Generational, Survivor::Truncation] {
            let cfg = BboConfig {
                pop_size: 20,
                iterations: 50,
                survivor,
                ..BboConfig::default()
            };
            let out = run(&sphere(), &cfg, vec![], 3).unwrap();
            assert_eq!(out.history.len(), 51);
            for w in out.history.windows(2) {
                assert!(w[1].best_cost <= w[0].best_cost);
            }
            assert_eq!(out.best.cost, out.history[50].best_cost);
        }
    }

    #[test]
    fn minimal_run_single_habitat() {
        let cfg = BboConfig {
            pop_size: 1,
            iterations: 1,
            elites: 0,
            survivor: Survivor::Generational,
            ..BboConfig::default()
        };
        let out = run(&sphere(), &cfg, vec![vec![1.0; 5]], 1).unwrap();
        assert_eq!(out.population.len(), 1);
        assert_eq!(out.history.len(), 2);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let cfg = BboConfig {
            pop_size: 15,
            iterations: 20,
            ..BboConfig::default()
        };
        let a = run(&sphere(), &cfg, vec![], 11).unwrap();
        let b = run(&sphere(), &cfg, vec![], 11).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn infeasible_start_names_reason() {
        let err = run(&Hopeless, &BboConfig::default(), vec![], 0).unwrap_err();
        assert_eq!(
            err,
            BboError::InfeasibleInitial(Infeasible::new("start node is not connected"))
        );
    }

    #[test]
    fn config_validation() {
        let bad = BboConfig {
            elites: 100,
            ..BboConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = BboConfig {
            max_mutation: 0.0,
            ..BboConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(BboConfig::mission_default().validate().is_ok());
    }

    #[test]
    fn migration_zero_immigration_is_identity() {
        let p = sphere();
        let pop: Vec<_> = (0..4).map(|k| evaluate(&p, vec![k as f64; 5])).collect();
        let rates = vec![
            Rates {
                immigration: 0.0,
                emigration: 1.0
            };
            4
        ];
        let out = migrate(&p, &pop, &rates, 0, 5, 1);
        for (h, s) in pop.iter().zip(&out) {
            assert_eq!(&h.siv, s);
        }
    }

    #[test]
    fn migration_two_habitats_deterministic_roulette() {
        let p = sphere();
        let pop = vec![evaluate(&p, vec![1.0; 5]), evaluate(&p, vec![2.0; 5])];
        let rates = assign_rates(2, RateModel::RankLinear, 1.0, 1.0);
        for seed in 0..20 {
            let out = migrate(&p, &pop, &rates, 0, seed, 1);
            assert_eq!(out[0], pop[0].siv);
            assert_eq!(out[1].iter().filter(|&&x| x == 1.0).count(), 1);
            assert_eq!(out[1].iter().filter(|&&x| x == 2.0).count(), 4);
        }
    }

    #[test]
    fn species_count_mapping() {
        assert_eq!(species_counts(5, 4), vec![4, 3, 2, 1, 0]);
        assert_eq!(species_counts(1, 0), vec![0]);
    }
}
