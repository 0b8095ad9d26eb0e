use serde::Serialize;

use super::{check_trials, Runner};
use crate::error::{domain, Error, Result};
use crate::gaussian::{info_density_stats, normal_cdf, LOG2E};
use crate::rng::{self, DOMAIN_INFO};

/// Points −5, −4.9, …, 5 at which the normalized cdf gap is measured.
pub const BE_GRID: usize = 101;

fn grid_point(i: usize) -> f64 {
    -5.0 + 0.1 * i as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoDensityResult {
    /// Moments of the per-symbol summand over all `n·trials` draws.
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub third_abs_moment: f64,
    /// sup over the grid of |F̂((S − nμ)/(σ√n)) − Φ|.
    pub be_gap: f64,
    pub be_bound: f64,
    pub samples: u64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Default)]
struct Acc {
    s1: f64,
    s2: f64,
    s3: f64,
    below: Vec<u64>,
}

pub fn simulate_info_density(runner: &Runner, p: f64, n: u64, trials: u64, seed: u64) -> Result<InfoDensityResult> {
    check_trials(trials, 1000)?;
    if n == 0 {
        return domain("n must be at least 1");
    }
    let stats = info_density_stats(p)?;
    let scale = LOG2E / (2.0 * (1.0 + p));
    let sd = p.sqrt();
    let root_n = (n as f64).sqrt();
    let accs = runner.chunks(trials, |range| {
        let mut a = Acc { below: vec![0; BE_GRID], ..Acc::default() };
        for trial in range {
            let mut s = rng::stream(seed, DOMAIN_INFO, trial);
            let mut centered = 0.0;
            for _ in 0..n {
                let x = sd * s.std_normal();
                let z = s.std_normal();
                // summand minus its mean C(P)
                let d = (-p * z * z + 2.0 * x * z + x * x) * scale;
                a.s1 += d;
                a.s2 += d * d;
                a.s3 += (d * d * d).abs();
                centered += d;
            }
            let u = centered / (stats.sigma * root_n);
            for (i, b) in a.below.iter_mut().enumerate() {
                if u <= grid_point(i) {
                    *b += 1;
                }
            }
        }
        Ok(a)
    })?;
    let mut tot = Acc { below: vec![0; BE_GRID], ..Acc::default() };
    for a in accs {
        tot.s1 += a.s1;
        tot.s2 += a.s2;
        tot.s3 += a.s3;
        for (t, b) in tot.below.iter_mut().zip(a.below) {
            *t += b;
        }
    }
    let count = (n * trials) as f64;
    let mean_d = tot.s1 / count;
    let variance = (tot.s2 - tot.s1 * mean_d) / (count - 1.0);
    let be_gap = (0..BE_GRID)
        .map(|i| (tot.below[i] as f64 / trials as f64 - normal_cdf(grid_point(i))).abs())
        .fold(0.0, f64::max);
    let be_bound = stats.tau1 / root_n;
    if be_gap > be_bound {
        return Err(Error::Consistency(format!("Berry-Esseen gap {be_gap} exceeds {be_bound}")));
    }
    Ok(InfoDensityResult {
        mean: stats.mu + mean_d,
        mean_stderr: (variance / count).sqrt(),
        variance,
        third_abs_moment: tot.s3 / count,
        be_gap,
        be_bound,
        samples: n * trials,
        trials,
        seed,
    })
}
