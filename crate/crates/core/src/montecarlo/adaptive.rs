use serde::Serialize;

use super::{check_trials, Runner, SimEstimate};
use crate::energy::EnergyModel;
use crate::error::Result;
use crate::linear::{adaptive_bits, adaptive_delta, adaptive_message_size, block_structure};
use crate::rng::{self, DOMAIN_ADAPTIVE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveBudgetResult {
    /// Probability that the blocks carry fewer bits than the message.
    pub shortfall: SimEstimate,
    pub message_bits: u64,
    pub mean_total_bits: f64,
    pub delta: f64,
}

/// Frequency of the event ∑_ℓ γ(L_ℓ, E_ℓ) < ⌊nR − 2nη⌋ over ρ full blocks
/// and one trailing block of length ⌊dn⌋.
#[allow(clippy::too_many_arguments)]
pub fn simulate_adaptive_budget(
    runner: &Runner,
    model: &EnergyModel,
    lambda: f64,
    n: u64,
    eta: f64,
    rate: f64,
    trials: u64,
    seed: u64,
) -> Result<AdaptiveBudgetResult> {
    check_trials(trials, 1000)?;
    let bs = block_structure(lambda, n)?;
    let delta = adaptive_delta(model.mean(), bs.l)?;
    let lengths = bs.adaptive_lengths();
    let message_bits = adaptive_message_size(n, rate, eta);
    let parts = runner.chunks(trials, |range| {
        let (mut short, mut bits) = (0u64, 0u128);
        for trial in range {
            let mut s = rng::stream(seed, DOMAIN_ADAPTIVE, trial);
            let mut total = 0u64;
            for &len in &lengths {
                let e = model.sample(&mut s);
                if len > 0 {
                    total += adaptive_bits(len, e, delta)?;
                }
            }
            if total < message_bits {
                short += 1;
            }
            bits += total as u128;
        }
        Ok((short, bits))
    })?;
    let short: u64 = parts.iter().map(|p| p.0).sum();
    let bits: u128 = parts.iter().map(|p| p.1).sum();
    Ok(AdaptiveBudgetResult {
        shortfall: SimEstimate::proportion(short, trials, seed),
        message_bits,
        mean_total_bits: bits as f64 / trials as f64,
        delta,
    })
}
