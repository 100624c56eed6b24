use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// How immigration/emigration rates are attached to habitats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateModel {
    /// Emigration linear in fitness rank: best gets `E`, worst gets 0;
    /// `lambda = I (1 - mu/E)`.
    RankLinear,
    /// Every habitat shares the same pair.
    Constant { immigration: f64, emigration: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub immigration: f64,
    pub emigration: f64,
}

/// Rates for a population already sorted best-first.
pub fn assign_rates(pop_size: usize, model: RateModel, max_immigration: f64, max_emigration: f64) -> Vec<Rates> {
    match model {
        RateModel::Constant { immigration, emigration } => {
            alloc::vec![Rates { immigration, emigration }; pop_size]
        }
        RateModel::RankLinear => (0..pop_size)
            .map(|rank| {
                let frac = if pop_size > 1 {
                    1.0 - rank as f64 / (pop_size - 1) as f64
                } else {
                    1.0
                };
                let mu = max_emigration * frac;
                let lambda = if max_emigration > 0.0 {
                    max_immigration * (1.0 - mu / max_emigration)
                } else {
                    max_immigration
                };
                Rates {
                    immigration: lambda,
                    emigration: mu,
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mus(r: &[Rates]) -> Vec<f64> {
        r.iter().map(|x| x.emigration).collect()
    }

    #[test]
    fn two_habitat_endpoints() {
        let r = assign_rates(2, RateModel::RankLinear, 1.0, 1.0);
        assert_eq!(r[0], Rates { immigration: 0.0, emigration: 1.0 });
        assert_eq!(r[1], Rates { immigration: 1.0, emigration: 0.0 });
    }

    #[test]
    fn five_habitats_linear_spacing() {
        let r = assign_rates(5, RateModel::RankLinear, 1.0, 1.0);
        assert_eq!(mus(&r), [1.0, 0.75, 0.5, 0.25, 0.0]);
        for x in &r {
            assert!((x.immigration + x.emigration - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_model() {
        let r = assign_rates(
            7,
            RateModel::Constant {
                immigration: 0.8,
                emigration: 0.2,
            },
            1.0,
            1.0,
        );
        assert!(r.iter().all(|x| *x == Rates { immigration: 0.8, emigration: 0.2 }));
    }
}
