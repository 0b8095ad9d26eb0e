//! Fast invariant suite behind the `selftest` command.

use super::table::Table;
use crate::converse::{converse_log_m, sandwich_report};
use crate::energy::{sample_block_sequence, EnergyModel};
use crate::error::Result;
use crate::gaussian::{capacity, info_density_stats, normal_cdf, normal_inv_cdf};
use crate::linear::{estimate_energy_level, quantize, rate_quantile, QuantileMode};
use crate::montecarlo::{simulate_outage, OutageOptions, Runner};
use crate::save_transmit::{achievable_log_m, block_chernoff_params, saving_length, saving_length_upper_bound, Regime};

use super::commands::SELFTEST;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn run(runner: &Runner) -> Result<Table> {
    let mut t = Table::new(SELFTEST);
    let mut check = |name: &str, holds: bool, value: f64| t.push(vec![name.into(), holds.into(), value.into()]);
    let det = EnergyModel::deterministic(1.0)?;
    let exp = EnergyModel::exponential(1.0)?;
    let uni = EnergyModel::uniform(1.0)?;

    check("capacity_at_unit_snr", capacity(1.0)? == 0.5, capacity(1.0)?);
    let var = info_density_stats(1.0)?.sigma.powi(2);
    check("info_density_variance", rel(var, 1.040_684_490_502_803_9) < 1e-14, var);

    let mut worst = 0.0f64;
    let mut monotone = true;
    let mut prev = 0.0;
    for i in 1..1000 {
        let p = i as f64 / 1000.0;
        let x = normal_inv_cdf(p)?;
        worst = worst.max((normal_cdf(x) - p).abs());
        monotone &= x > prev || i == 1;
        prev = x;
    }
    check("normal_inverse_round_trip", worst < 1e-14, worst);
    check("normal_inverse_monotone", monotone, prev);

    let ach = achievable_log_m(1.0, 10_000, 0.5)?.value;
    check("achievable_reference", rel(ach, 4_603.216_110_938_121) < 1e-12, ach);
    let conv = converse_log_m(&det, 10_000, 1, 0.5)?;
    check("converse_reference", rel(conv.value, 5_077.355_997_565_064) < 1e-12, conv.value);
    check("converse_length_infeasible", !conv.feasible(), conv.conditions[0].rhs);

    let beta = block_chernoff_params(&det, 1, 0.1)?.beta_t;
    check("beta_t_reference", rel(beta, 1.934_556_866_630_635_1) < 1e-12, beta);

    let mut ordered = true;
    for model in [&det, &exp, &uni] {
        for eps in [0.01, 0.05, 0.1, 0.2, 0.4] {
            for regime in [Regime::GrowingL, Regime::ConstantL(1), Regime::ConstantL(4)] {
                ordered &= sandwich_report(model, regime, eps)?.ordering_holds;
            }
        }
    }
    check("second_order_ordering", ordered, 0.0);

    let mut lengths_ok = true;
    for model in [&det, &exp] {
        for l in [1, 4] {
            for n in [1000, 100_000] {
                let sl = saving_length(model, l, n, 0.1)?;
                if let Some(m) = sl.m {
                    lengths_ok &= m > 2 * l;
                    if sl.feasible {
                        lengths_ok &= saving_length_upper_bound(model, l, n, 0.1).is_none_or(|u| m as f64 <= u);
                    }
                }
            }
        }
    }
    check("saving_length_range", lengths_ok, 0.0);

    let e = sample_block_sequence(&exp, 64, 8, 3)?;
    let constant = e.chunks(8).all(|b| b.iter().all(|&x| x == b[0]));
    check("block_constancy", constant, e[0]);

    let q = rate_quantile(&exp, 1.0, 1.0 - (-1.0f64).exp(), QuantileMode::Threshold)?;
    check("linear_identity_threshold", (q - 0.5).abs() < 1e-12, q);
    let lo = rate_quantile(&exp, 0.4, 0.5, QuantileMode::Lower)?;
    let th = rate_quantile(&exp, 0.4, 0.5, QuantileMode::Threshold)?;
    let hi = rate_quantile(&exp, 0.4, 0.5, QuantileMode::Upper)?;
    check("quantile_ordering", lo <= th && th <= hi, th);

    let delta = 0.25;
    let mut sandwich = true;
    let mut consistent = true;
    for i in 0..400 {
        let a = i as f64 * 0.037;
        let g = quantize(a, delta)?;
        sandwich &= g <= a && a < g + 2.0 * delta;
        let target = g + 1.0 + 0.999 * delta * ((i % 7) as f64 / 3.5 - 1.0);
        consistent &= estimate_energy_level(target, delta)? == g;
    }
    check("quantizer_sandwich", sandwich, delta);
    check("estimator_consistency", consistent, delta);

    let opts = OutageOptions::default();
    let mut identity_ok = true;
    for (model, l, m) in [(&det, 1, 20), (&exp, 4, 30), (&EnergyModel::two_point(0.0, 2.0, 0.5)?, 2, 7)] {
        identity_ok &= simulate_outage(runner, model, 1.0, 200, l, m, 10_000, 17, opts).is_ok();
    }
    check("outage_event_identities", identity_ok, 10_000.0);
    Ok(t)
}
