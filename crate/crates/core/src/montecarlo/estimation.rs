use super::{check_trials, Runner, SimEstimate};
use crate::energy::EnergyModel;
use crate::error::{domain, Result};
use crate::linear::{adaptive_delta, Quantizer};
use crate::rng::{self, DOMAIN_ESTIMATE};

/// Success probability of the pilot-based energy-level estimator: ⌈√L⌉
/// symbols √g + Z with g the quantized level, then the nearest grid point
/// to the mean square minus one.
pub fn simulate_energy_estimation(
    runner: &Runner,
    model: &EnergyModel,
    l: u64,
    trials: u64,
    seed: u64,
) -> Result<SimEstimate> {
    check_trials(trials, 1)?;
    if l < 2 {
        return domain("block length must be at least 2");
    }
    let quant = Quantizer::new(adaptive_delta(model.mean(), l)?)?;
    let pilots = (l as f64).sqrt().ceil() as u64;
    let pilots = if pilots * pilots < l { pilots + 1 } else { pilots };
    let hits = runner.chunks(trials, |range| {
        let mut hits = 0u64;
        for trial in range {
            let mut s = rng::stream(seed, DOMAIN_ESTIMATE, trial);
            let g = quant.quantize(model.sample(&mut s))?;
            let amp = g.sqrt();
            let mut sq = 0.0;
            for _ in 0..pilots {
                let y = amp + s.std_normal();
                sq += y * y;
            }
            if quant.estimate_level(sq / pilots as f64)? == g {
                hits += 1;
            }
        }
        Ok(hits)
    })?;
    Ok(SimEstimate::proportion(hits.iter().sum(), trials, seed))
}
