//! Species-count probabilities of the linear birth–death island model.

use alloc::vec::Vec;

use super::BboError;
use crate::math;

/// Immigration and emigration rate per species count for the linear model:
/// `lambda_s = I (1 - s/S)`, `mu_s = E s/S`.
pub fn linear_rates(s_max: usize, max_immigration: f64, max_emigration: f64) -> (Vec<f64>, Vec<f64>) {
    if s_max == 0 {
        return (alloc::vec![max_immigration], alloc::vec![max_emigration]);
    }
    let s = s_max as f64;
    let lambda = (0..=s_max).map(|k| max_immigration * (1.0 - k as f64 / s)).collect();
    let mu = (0..=s_max).map(|k| max_emigration * k as f64 / s).collect();
    (lambda, mu)
}

/// Time derivative of each `P_s`.
fn derivative(p: &[f64], lambda: &[f64], mu: &[f64]) -> Vec<f64> {
    let last = p.len() - 1;
    (0..p.len())
        .map(|s| {
            let mut d = -(lambda[s] + mu[s]) * p[s];
            if s > 0 {
                d += lambda[s - 1] * p[s - 1];
            }
            if s < last {
                d += mu[s + 1] * p[s + 1];
            }
            d
        })
        .collect()
}

/// One forward-Euler step of the species ODE followed by renormalization.
///
/// Fails with [`BboError::NegativeProbability`] if `dt` is too large for the
/// step to stay nonnegative; the caller should halve `dt` and retry.
pub fn species_step(p: &[f64], lambda: &[f64], mu: &[f64], dt: f64) -> Result<Vec<f64>, BboError> {
    if p.is_empty() || lambda.len() != p.len() || mu.len() != p.len() {
        return Err(BboError::RateLength {
            expected: p.len(),
            lambda: lambda.len(),
            mu: mu.len(),
        });
    }
    let dp = derivative(p, lambda, mu);
    let mut next: Vec<f64> = p.iter().zip(&dp).map(|(a, d)| a + d * dt).collect();
    if let Some(s) = next.iter().position(|&v| v < -1e-15) {
        return Err(BboError::NegativeProbability { index: s, dt });
    }
    for v in next.iter_mut() {
        *v = v.max(0.0);
    }
    let total: f64 = next.iter().sum();
    if total <= 0.0 {
        return Err(BboError::NegativeProbability { index: 0, dt });
    }
    for v in next.iter_mut() {
        *v /= total;
    }
    Ok(next)
}

/// Closed-form stationary distribution of the birth–death chain:
/// `P_s ∝ prod_{k<s} lambda_k / mu_{k+1}`.
///
/// Handles absorbing ends (a zero rate) by concentrating mass where the chain
/// gets stuck.
pub fn stationary(lambda: &[f64], mu: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let mut log_w = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut blocked_at = None;
    log_w.push(0.0);
    for s in 1..n {
        if lambda[s - 1] <= 0.0 {
            blocked_at = Some(s);
            break;
        }
        if mu[s] <= 0.0 {
            // Mass escapes upward and never returns: everything ends above.
            acc = f64::INFINITY;
            log_w.push(acc);
            continue;
        }
        acc += math::ln(lambda[s - 1]) - math::ln(mu[s]);
        log_w.push(acc);
    }
    if blocked_at.is_some() {
        log_w.resize(n, f64::NEG_INFINITY);
    }
    normalize_log(&log_w)
}

/// Stationary distribution of the linear model without building rate
/// vectors: `P_s ∝ C(S, s) (I/E)^s`.
pub fn linear_stationary(s_max: usize, max_immigration: f64, max_emigration: f64) -> Vec<f64> {
    let mut p = alloc::vec![0.0; s_max + 1];
    if max_emigration <= 0.0 && max_immigration <= 0.0 {
        p.iter_mut().for_each(|v| *v = 1.0 / (s_max + 1) as f64);
        return p;
    }
    if max_immigration <= 0.0 {
        p[0] = 1.0;
        return p;
    }
    if max_emigration <= 0.0 {
        p[s_max] = 1.0;
        return p;
    }
    let ratio = math::ln(max_immigration) - math::ln(max_emigration);
    let ln_s = math::ln_factorial(s_max);
    let log_w: Vec<f64> = (0..=s_max)
        .map(|s| ln_s - math::ln_factorial(s) - math::ln_factorial(s_max - s) + s as f64 * ratio)
        .collect();
    normalize_log(&log_w)
}

fn normalize_log(log_w: &[f64]) -> Vec<f64> {
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::INFINITY {
        let hits = log_w.iter().filter(|v| **v == f64::INFINITY).count() as f64;
        return log_w.iter().map(|v| if *v == f64::INFINITY { 1.0 / hits } else { 0.0 }).collect();
    }
    let w: Vec<f64> = log_w.iter().map(|v| math::exp(v - top)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Mutation probability from species probability: `m_max (1 - P_s / P_max)`,
/// clamped to `[0, m_max]`. A degenerate `P_max = 0` mutates at `m_max`.
pub fn mutation_rate(p_s: f64, m_max: f64, p_max: f64) -> f64 {
    if p_max <= 0.0 {
        return m_max;
    }
    (m_max * (1.0 - p_s / p_max)).clamp(0.0, m_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn no_dynamics_leaves_distribution() {
        let p = vec![0.2, 0.3, 0.5];
        let z = vec![0.0; 3];
        let q = species_step(&p, &z, &z, 0.1).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_state_symmetric_converges_to_half() {
        let (lambda, mu) = linear_rates(1, 1.0, 1.0);
        assert_eq!(lambda, vec![1.0, 0.0]);
        assert_eq!(mu, vec![0.0, 1.0]);
        let mut p = vec![1.0, 0.0];
        for _ in 0..100_000 {
            p = species_step(&p, &lambda, &mu, 1e-3).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert!((p[0] - 0.5).abs() < 1e-6);
        assert!((p[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let (lambda, mu) = linear_rates(3, 1.0, 1.0);
        let p = vec![1.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            species_step(&p, &lambda, &mu, 5.0),
            Err(BboError::NegativeProbability { index: 0, .. })
        ));
    }

    #[test]
    fn stationary_is_fixed_point_of_ode() {
        let (lambda, mu) = linear_rates(6, 0.8, 1.0);
        let p = stationary(&lambda, &mu);
        let q = species_step(&p, &lambda, &mu, 0.01).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-12);
        }
        let closed = linear_stationary(6, 0.8, 1.0);
        for (a, b) in p.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_linear_stationary_is_binomial_half() {
        let p = linear_stationary(4, 1.0, 1.0);
        let expect = [1.0, 4.0, 6.0, 4.0, 1.0].map(|c| c / 16.0);
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mutation_rate_cases() {
        assert_eq!(mutation_rate(0.3, 0.1, 0.3), 0.0);
        assert_eq!(mutation_rate(0.0, 0.1, 0.3), 0.1);
        assert!((mutation_rate(0.15, 0.1, 0.3) - 0.05).abs() < 1e-15);
        assert_eq!(mutation_rate(0.0, 0.1, 0.0), 0.1);
    }
}
