use serde::Serialize;

use super::{check_trials, Runner, SimEstimate};
use crate::energy::EnergyModel;
use crate::error::{check_positive, domain, Error, Result};
use crate::rng::{self, DOMAIN_OUTAGE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageOptions {
    /// Run the saving-buffer recursion and compare it with the union event.
    pub check_recursion: bool,
    /// Run the clipping encoder and check that clipping implies outage.
    pub clip_encoder: bool,
    /// Check that the block-aggregated event contains the union event.
    pub check_aggregation: bool,
}

impl Default for OutageOptions {
    fn default() -> Self {
        OutageOptions { check_recursion: true, clip_encoder: true, check_aggregation: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageResult {
    pub outage: SimEstimate,
    /// Frequency of the block-aggregated outage event.
    pub aggregated: Option<SimEstimate>,
    /// Frequency with which the encoder had to clip at least one symbol.
    pub clipped: Option<SimEstimate>,
    pub recursion_mismatches: u64,
    pub clipping_outside_outage: u64,
    pub aggregation_violations: u64,
}

#[derive(Default)]
struct Tally {
    outage: u64,
    aggregated: u64,
    clipped: u64,
    recursion: u64,
    clip_bad: u64,
    agg_bad: u64,
    first_bad: Option<u64>,
}

/// Probability that the cumulative codeword energy reaches the cumulative
/// harvested energy at some time, with saving length `m`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_outage(
    runner: &Runner,
    model: &EnergyModel,
    p: f64,
    n: u64,
    l: u64,
    m: u64,
    trials: u64,
    seed: u64,
    opts: OutageOptions,
) -> Result<OutageResult> {
    check_trials(trials, 1)?;
    check_positive("snr", p)?;
    if n == 0 || l == 0 {
        return domain("n and L must be at least 1");
    }
    let sd = p.sqrt();
    let n_bar = n.div_ceil(l) * l;
    let m_bar = (m / l) * l;
    let x_len = if opts.check_aggregation { n_bar } else { n } as usize;
    let total = (m + n) as usize;
    let tallies = runner.chunks(trials, |range| {
        let mut t = Tally::default();
        let mut x2 = vec![0.0; x_len];
        let mut cum_x = vec![0.0; x_len + 1];
        let mut cum_e = vec![0.0; total + 1];
        let mut e = vec![0.0; total];
        for trial in range {
            let mut s = rng::stream(seed, DOMAIN_OUTAGE, trial);
            for v in x2.iter_mut() {
                let x = sd * s.std_normal();
                *v = x * x;
            }
            let mut e_cur = 0.0;
            for k in 0..total {
                if (k as u64).is_multiple_of(l) {
                    e_cur = model.sample(&mut s);
                }
                e[k] = e_cur;
                cum_e[k + 1] = cum_e[k] + e_cur;
            }
            for k in 0..x_len {
                cum_x[k + 1] = cum_x[k] + x2[k];
            }
            let m_us = m as usize;
            let union = (1..=n as usize).any(|k| cum_x[k] >= cum_e[m_us + k]);
            if union {
                t.outage += 1;
            }
            if opts.check_recursion {
                let b = recursion(&e, &x2, m_us, n as usize);
                if (b <= 0.0) != union {
                    t.recursion += 1;
                    t.first_bad.get_or_insert(trial);
                }
            }
            if opts.clip_encoder {
                let clipped = clips(&cum_e, &x2, m_us, n as usize);
                if clipped {
                    t.clipped += 1;
                    if !union {
                        t.clip_bad += 1;
                        t.first_bad.get_or_insert(trial);
                    }
                }
            }
            if opts.check_aggregation {
                let lu = l as usize;
                // With m̄ < L the first aggregated comparison is against zero
                // saved energy, so the event always occurs.
                let agg = m_bar < l || {
                    let offset = (m_bar - l) as usize;
                    (1..=(n_bar / l) as usize).any(|j| cum_x[j * lu] >= cum_e[offset + j * lu])
                };
                if agg {
                    t.aggregated += 1;
                }
                if union && !agg {
                    t.agg_bad += 1;
                    t.first_bad.get_or_insert(trial);
                }
            }
        }
        Ok(t)
    })?;
    let mut sum = Tally::default();
    for t in tallies {
        sum.outage += t.outage;
        sum.aggregated += t.aggregated;
        sum.clipped += t.clipped;
        sum.recursion += t.recursion;
        sum.clip_bad += t.clip_bad;
        sum.agg_bad += t.agg_bad;
        if sum.first_bad.is_none() {
            sum.first_bad = t.first_bad;
        }
    }
    if let Some(trial) = sum.first_bad {
        return Err(Error::Consistency(format!(
            "outage event identities violated (recursion {}, clipping {}, aggregation {}); first at trial {trial}",
            sum.recursion, sum.clip_bad, sum.agg_bad
        )));
    }
    Ok(OutageResult {
        outage: SimEstimate::proportion(sum.outage, trials, seed),
        aggregated: opts.check_aggregation.then(|| SimEstimate::proportion(sum.aggregated, trials, seed)),
        clipped: opts.clip_encoder.then(|| SimEstimate::proportion(sum.clipped, trials, seed)),
        recursion_mismatches: sum.recursion,
        clipping_outside_outage: sum.clip_bad,
        aggregation_violations: sum.agg_bad,
    })
}

/// Buffer recursion B_{m+n}. The first transmission step always updates, so
/// an empty buffer at the end of the saving phase is not read as an outage.
fn recursion(e: &[f64], x2: &[f64], m: usize, n: usize) -> f64 {
    let mut b = 0.0;
    for &ek in &e[..m] {
        b += ek;
    }
    for k in m + 1..=m + n {
        if k == m + 1 || b > 0.0 {
            b += e[k - 1] - x2[k - m - 1];
        }
    }
    b
}

/// Whether the energy-clipping encoder zeroes any of the n symbols.
fn clips(cum_e: &[f64], x2: &[f64], m: usize, n: usize) -> bool {
    let mut spent = 0.0;
    let mut clipped = false;
    for k in 1..=n {
        if spent + x2[k - 1] <= cum_e[m + k] {
            spent += x2[k - 1];
        } else {
            clipped = true;
        }
    }
    clipped
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_energy_always_outage() {
        let r = Runner::new(1).unwrap();
        let z = EnergyModel::zero_energy_for_testing();
        for m in [0, 5] {
            let res = simulate_outage(&r, &z, 1.0, 10, 1, m, 500, 3, OutageOptions::default()).unwrap();
            assert_eq!(res.outage.estimate, 1.0);
            assert_eq!(res.outage.stderr, 0.0);
        }
    }

    #[test]
    fn recursion_matches_union_on_small_cases() {
        let r = Runner::new(1).unwrap();
        let t = EnergyModel::two_point(0.0, 2.0, 0.5).unwrap();
        for (m, l) in [(0, 1), (1, 1), (3, 2), (7, 3)] {
            let res = simulate_outage(&r, &t, 1.0, 12, l, m, 10_000, 11, OutageOptions::default()).unwrap();
            assert_eq!(res.recursion_mismatches, 0);
            assert!(res.outage.estimate > 0.0);
        }
    }

    #[test]
    fn clipping_rule() {
        let cum_e = [0.0, 1.0, 2.0, 3.0];
        assert!(!clips(&cum_e, &[1.0, 1.0], 1, 2));
        assert!(clips(&cum_e, &[2.5, 0.1], 1, 2));
        let b = recursion(&[1.0, 1.0, 1.0], &[1.0, 1.0], 1, 2);
        assert_eq!(b, 1.0);
        assert!(recursion(&[0.0, 0.0, 0.0], &[0.5, 0.5], 0, 2) < 0.0);
    }
}
