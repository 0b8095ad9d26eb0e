//! Converse side: the finite-n upper bound on log M, the upper
//! second-order coefficient and the sandwich between both directions.

use serde::Serialize;

use crate::energy::{varrho, EnergyModel};
use crate::error::{check_positive, check_prob_open, domain, Result};
use crate::gaussian::{capacity_raw, inv_cdf_raw, kappa2, normal_cdf, tau2, LOG2E};
use crate::report::{BoundReport, Condition};
use crate::save_transmit::{second_order_lower, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverseStats {
    pub sigma_conv: f64,
    pub tau2: f64,
    pub kappa2: f64,
}

/// Standard deviation of the per-block information density Ṽ₁.
pub fn sigma_conv(model: &EnergyModel, l: u64) -> f64 {
    let p = model.mean();
    let lf = l as f64;
    lf * LOG2E / (2.0 * (1.0 + p)) * (2.0 * p * (p + 2.0) / lf + model.m2() - p * p).sqrt()
}

pub fn converse_stats(model: &EnergyModel, l: u64, eps: f64) -> Result<ConverseStats> {
    Ok(ConverseStats { sigma_conv: sigma_conv(model, l), tau2: tau2(model, l)?, kappa2: kappa2(model, l, eps)? })
}

fn dispersion_coefficient(model: &EnergyModel, l: u64) -> f64 {
    let p = model.mean();
    LOG2E / (2.0 * (1.0 + p)) * (2.0 * p * (p + 2.0) + l as f64 * (model.m2() - p * p)).sqrt()
}

/// Upper bound on log M for any (n, M, ε)-code.
pub fn converse_log_m(model: &EnergyModel, n: u64, l: u64, eps: f64) -> Result<BoundReport> {
    check_prob_open("eps", eps)?;
    if n == 0 || l == 0 {
        return domain("n and L must be at least 1");
    }
    let p = model.mean();
    let nl = (n + l) as f64;
    let k2 = kappa2(model, l, eps)?;
    let t2 = tau2(model, l)?;
    let first = nl * capacity_raw(p);
    let second = nl.sqrt() * dispersion_coefficient(model, l) * inv_cdf_raw(eps);
    Ok(BoundReport {
        kind: "converse",
        value: first + second + 0.5 * nl.log2() + k2,
        first_order: first,
        second_order: second,
        residual: k2,
        conditions: vec![Condition::at_least(
            "converse_length",
            n as f64,
            4.0 * l as f64 * t2 * t2 / (1.0 - eps).powi(4),
        )],
    })
}

/// Smallest n beyond which the converse sits strictly below (n+L)·C(P).
/// Only meaningful for ε < ½.
pub fn converse_crossover(model: &EnergyModel, l: u64, eps: f64) -> Result<Option<u64>> {
    check_prob_open("eps", eps)?;
    if eps >= 0.5 {
        return Ok(None);
    }
    let slack = |n: u64| -> Result<f64> {
        let r = converse_log_m(model, n, l, eps)?;
        Ok(r.value - r.first_order)
    };
    // The excess is eventually decreasing in n, so bracket then bisect.
    let mut hi = 1u64;
    while slack(hi)? >= 0.0 {
        if hi > 1 << 60 {
            return Ok(None);
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Ok(Some(1));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if slack(mid)? < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

pub fn second_order_upper(model: &EnergyModel, eps: f64) -> Result<f64> {
    check_prob_open("eps", eps)?;
    let p = model.mean();
    Ok(LOG2E / (2.0 * (1.0 + p)) * (2.0 * p * p + model.m2()).sqrt() * inv_cdf_raw(eps))
}

/// Right-hand side of the bound on V⁺ − V⁻, for ε < Φ(−1).
pub fn gap_bound(model: &EnergyModel, regime: Regime, eps: f64) -> f64 {
    let p = model.mean();
    let c = capacity_raw(p);
    let rho = varrho(model);
    let tail = ((2.0 * p * p + model.m2()) * LOG2E / (2.0 * (1.0 + p).powi(2))).sqrt();
    let coef = match regime {
        Regime::GrowingL => c * rho.sqrt() - tail,
        Regime::ConstantL(_) => c * (2.0 * rho).sqrt() + (4.0 * p * LOG2E / (1.0 + p)).sqrt() - tail,
    };
    coef * (-eps.log2()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub v_minus_minus: Option<f64>,
    pub v_minus: f64,
    pub v_plus: f64,
    /// Ordering V⁻⁻ ≤ V⁻ ≤ V⁺, checked for ε < ½.
    pub ordering_checked: bool,
    pub ordering_holds: bool,
    /// Gap bound, checked for ε < Φ(−1).
    pub gap_checked: bool,
    pub gap: f64,
    pub gap_bound: Option<f64>,
    pub gap_holds: Option<bool>,
}

pub fn sandwich_report(model: &EnergyModel, regime: Regime, eps: f64) -> Result<SandwichReport> {
    let lower = second_order_lower(model, regime, eps)?;
    let v_plus = second_order_upper(model, eps)?;
    let ordering_checked = eps < 0.5;
    let ordering_holds = lower.v_minus <= v_plus && lower.v_minus_minus.is_none_or(|v| v <= lower.v_minus);
    let gap = v_plus - lower.v_minus;
    let gap_checked = eps < normal_cdf(-1.0);
    let bound = gap_checked.then(|| gap_bound(model, regime, eps));
    Ok(SandwichReport {
        v_minus_minus: lower.v_minus_minus,
        v_minus: lower.v_minus,
        v_plus,
        ordering_checked,
        ordering_holds,
        gap_checked,
        gap,
        gap_bound: bound,
        gap_holds: bound.map(|b| gap <= b),
    })
}

/// ε-capacity for constant or sublinear L. Equals C(P) for every ε.
pub fn epsilon_capacity_sublinear(p: f64) -> Result<f64> {
    check_positive("snr", p)?;
    Ok(capacity_raw(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det1() -> EnergyModel {
        EnergyModel::deterministic(1.0).unwrap()
    }

    #[test]
    fn converse_examples() {
        let r = converse_log_m(&det1(), 10_000, 1, 0.5).unwrap();
        assert!((r.value - 5_077.355_997_565_064).abs() < 1e-8);
        assert_eq!(r.second_order, 0.0);
        let thr = r.conditions[0].rhs;
        assert!((thr - 11_318.906).abs() < 0.01);
        assert!(!r.feasible());
        assert!(converse_log_m(&det1(), 11_319, 1, 0.5).unwrap().feasible());
        let r4 = converse_log_m(&EnergyModel::exponential(1.0).unwrap(), 1000, 4, 0.5).unwrap();
        assert_eq!(r4.second_order, 0.0);
    }

    #[test]
    fn converse_increases_with_eps() {
        let m = EnergyModel::exponential(1.0).unwrap();
        let at = |n| (1..10).map(|i| converse_log_m(&m, n, 2, i as f64 / 10.0).unwrap().value).collect::<Vec<_>>();
        // κ₂ grows as ε → 0, so monotonicity needs the √n term to dominate.
        let v = at(100_000_000);
        assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
        let small = at(5000);
        assert!(small[0] > small[1]);
    }

    #[test]
    fn converse_below_first_order_after_crossover() {
        let m = det1();
        for eps in [0.1, 0.3] {
            let n0 = converse_crossover(&m, 1, eps).unwrap().unwrap();
            for n in [n0, 2 * n0, 10 * n0] {
                let r = converse_log_m(&m, n, 1, eps).unwrap();
                assert!(r.value - r.first_order < 0.0);
            }
            let r = converse_log_m(&m, n0 - 1, 1, eps).unwrap();
            assert!(r.value - r.first_order >= 0.0);
        }
        assert_eq!(converse_crossover(&m, 1, 0.6).unwrap(), None);
    }

    #[test]
    fn v_plus_examples() {
        assert_eq!(second_order_upper(&det1(), 0.5).unwrap(), 0.0);
        let v = second_order_upper(&det1(), 0.1).unwrap();
        assert!((v + 0.800_592_026_591_500_1).abs() < 1e-12);
        for m in [det1(), EnergyModel::uniform(2.0).unwrap()] {
            assert!(second_order_upper(&m, 0.3).unwrap() < 0.0);
            assert!(second_order_upper(&m, 0.7).unwrap() > 0.0);
        }
    }

    #[test]
    fn gap_bound_example() {
        let b = gap_bound(&det1(), Regime::GrowingL, 0.1);
        assert!((b - 0.482_019_426_499_041_54).abs() < 1e-12);
    }

    #[test]
    fn sandwich_flags() {
        let s = sandwich_report(&det1(), Regime::GrowingL, 0.4).unwrap();
        assert!(s.ordering_checked && s.ordering_holds);
        assert!(!s.gap_checked);
        assert!(s.gap_bound.is_none());
        let s = sandwich_report(&det1(), Regime::GrowingL, 0.1).unwrap();
        assert!(s.gap_checked);
    }

    #[test]
    fn sublinear_capacity() {
        assert_eq!(epsilon_capacity_sublinear(1.0).unwrap(), 0.5);
        assert_eq!(epsilon_capacity_sublinear(3.0).unwrap(), 1.0);
        assert!((epsilon_capacity_sublinear(0.5).unwrap() - 0.292_481_250_360_578_1).abs() < 1e-15);
        assert!(epsilon_capacity_sublinear(0.0).is_err());
    }

    #[test]
    fn sigma_conv_positive() {
        for l in [1, 4, 16] {
            assert!(sigma_conv(&det1(), l) > 0.0);
        }
        let s = sigma_conv(&det1(), 1);
        assert!((s * s - (LOG2E / 4.0).powi(2) * 6.0).abs() < 1e-14);
    }
}
