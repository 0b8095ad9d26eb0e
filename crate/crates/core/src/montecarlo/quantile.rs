use super::{check_trials, Runner, SimEstimate};
use crate::energy::EnergyModel;
use crate::error::{check_prob_open, Result};
use crate::gaussian::capacity_raw;
use crate::linear::block_structure;
use crate::rng::{self, DOMAIN_BOOTSTRAP, DOMAIN_QUANTILE};

const RESAMPLES: u64 = 100;

/// The ⌈εN⌉-th order statistic (1-based) of `values`.
pub fn empirical_quantile(values: &mut [f64], eps: f64) -> f64 {
    let n = values.len();
    let k = ((eps * n as f64).ceil() as usize).clamp(1, n);
    let (_, v, _) = values.select_nth_unstable_by(k - 1, f64::total_cmp);
    *v
}

/// Empirical ε-quantile of S = λ∑_{ℓ≤q} C(E_ℓ) + d·C(E_{q+1}), with a
/// bootstrap standard error over 100 resamples.
pub fn empirical_rate_quantile(
    runner: &Runner,
    model: &EnergyModel,
    lambda: f64,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<SimEstimate> {
    check_trials(trials, 10_000)?;
    check_prob_open("eps", eps)?;
    let bs = block_structure(lambda, 1 << 40)?;
    let parts = runner.chunks(trials, |range| {
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        for trial in range {
            let mut s = rng::stream(seed, DOMAIN_QUANTILE, trial);
            let mut sum = 0.0;
            for _ in 0..bs.q {
                sum += capacity_raw(model.sample(&mut s));
            }
            let last = capacity_raw(model.sample(&mut s));
            out.push(lambda * sum + bs.d * last);
        }
        Ok(out)
    })?;
    let values: Vec<f64> = parts.into_iter().flatten().collect();
    let estimate = empirical_quantile(&mut values.clone(), eps);
    let boots: Vec<Vec<f64>> = runner.chunks(RESAMPLES, |range| {
        let mut scratch = vec![0.0; values.len()];
        Ok(range
            .map(|b| {
                let mut s = rng::stream(seed, DOMAIN_BOOTSTRAP, b);
                for v in scratch.iter_mut() {
                    *v = values[s.below(trials) as usize];
                }
                empirical_quantile(&mut scratch, eps)
            })
            .collect())
    })?;
    let boots: Vec<f64> = boots.into_iter().flatten().collect();
    let mean = boots.iter().sum::<f64>() / boots.len() as f64;
    let var = boots.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (boots.len() - 1) as f64;
    Ok(SimEstimate { estimate, stderr: var.sqrt(), trials, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_statistic_convention() {
        let mut v = vec![5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(empirical_quantile(&mut v, 0.2), 1.0);
        assert_eq!(empirical_quantile(&mut v, 0.21), 2.0);
        assert_eq!(empirical_quantile(&mut v, 0.999), 5.0);
    }

    #[test]
    fn deterministic_model_is_exact() {
        let r = Runner::new(1).unwrap();
        let d = EnergyModel::deterministic(3.0).unwrap();
        let q = empirical_rate_quantile(&r, &d, 0.5, 0.3, 10_000, 1).unwrap();
        assert_eq!(q.estimate, 1.0);
        assert_eq!(q.stderr, 0.0);
    }
}
