//! Monte Carlo oracles for the analytic bounds.
//!
//! Trials are split into fixed chunks of [`CHUNK`] consecutive indices. Each
//! trial draws from its own counter-based stream and chunk results are
//! combined in index order, so every estimate is bit-identical for any
//! worker count.

mod adaptive;
mod converse_var;
mod estimation;
mod info_density;
mod outage;
mod quantile;

pub use adaptive::{simulate_adaptive_budget, AdaptiveBudgetResult};
pub use converse_var::{simulate_converse_variance, ConverseVarianceResult};
pub use estimation::simulate_energy_estimation;
pub use info_density::{simulate_info_density, InfoDensityResult, BE_GRID};
pub use outage::{simulate_outage, OutageOptions, OutageResult};
pub use quantile::{empirical_quantile, empirical_rate_quantile};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};

pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimEstimate {
    pub fn proportion(hits: u64, trials: u64, seed: u64) -> Self {
        let p = hits as f64 / trials as f64;
        SimEstimate { estimate: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), trials, seed }
    }
}

/// Worker pool used by every simulation.
pub struct Runner {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runner {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return domain("worker count must be at least 1");
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        Ok(Runner { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Evaluates `f` on consecutive index ranges covering `0..total` and
    /// returns the chunk results in index order.
    pub fn chunks<T, F>(&self, total: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(std::ops::Range<u64>) -> Result<T> + Sync,
    {
        let n = total.div_ceil(CHUNK);
        self.pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(total)))
                .collect()
        })
    }
}

impl Default for Runner {
    fn default() -> Self {
        let w = std::thread::available_parallelism().map_or(1, |n| n.get());
        Runner::new(w).expect("default pool")
    }
}

pub(crate) fn check_trials(trials: u64, min: u64) -> Result<()> {
    if trials < min {
        return domain(format!("need at least {min} trials, got {trials}"));
    }
    Ok(())
}
