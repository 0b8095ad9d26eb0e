use serde::Serialize;

use super::{check_trials, Runner};
use crate::converse::sigma_conv;
use crate::energy::EnergyModel;
use crate::error::{domain, Result};
use crate::gaussian::LOG2E;
use crate::rng::{self, DOMAIN_CONVERSE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseVarianceResult {
    pub mean: f64,
    pub variance: f64,
    pub variance_stderr: f64,
    pub analytic_variance: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Empirical variance of the per-block converse information density
/// Ṽ₁ = (log e/(2(1+P)))(−P∑Z² + 2√E₁∑Z + L·E₁), which has mean zero.
pub fn simulate_converse_variance(
    runner: &Runner,
    model: &EnergyModel,
    l: u64,
    trials: u64,
    seed: u64,
) -> Result<ConverseVarianceResult> {
    check_trials(trials, 2)?;
    if l == 0 {
        return domain("coherence time must be at least 1");
    }
    let p = model.mean();
    let scale = LOG2E / (2.0 * (1.0 + p));
    let lf = l as f64;
    let parts = runner.chunks(trials, |range| {
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for trial in range {
            let mut s = rng::stream(seed, DOMAIN_CONVERSE, trial);
            let e = model.sample(&mut s);
            let (mut sz, mut sz2) = (0.0, 0.0);
            for _ in 0..l {
                let z = s.std_normal();
                sz += z;
                sz2 += z * z;
            }
            let v = scale * (-p * sz2 + 2.0 * e.sqrt() * sz + lf * e);
            s1 += v;
            s2 += v * v;
            s4 += v * v * v * v;
        }
        Ok((s1, s2, s4))
    })?;
    let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
    for (a, b, c) in parts {
        s1 += a;
        s2 += b;
        s4 += c;
    }
    let nf = trials as f64;
    let mean = s1 / nf;
    let variance = (s2 - s1 * mean) / (nf - 1.0);
    let m4 = s4 / nf;
    Ok(ConverseVarianceResult {
        mean,
        variance,
        variance_stderr: ((m4 - variance * variance).max(0.0) / nf).sqrt(),
        analytic_variance: sigma_conv(model, l).powi(2),
        trials,
        seed,
    })
}
