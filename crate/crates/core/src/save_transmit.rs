//! Achievability side: the outage Chernoff bound, its block version, the
//! saving-phase length, the achievable message size and the lower
//! second-order coefficients.

use serde::Serialize;

use crate::energy::{varrho, EnergyModel};
use crate::error::{check_positive, check_prob_open, domain, Error, Result};
use crate::gaussian::{capacity_raw, info_density_stats, inv_cdf_raw, kappa1, LOG2E};
use crate::report::{all_hold, first_violation, BoundReport, Condition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffBound {
    /// exp(−a t m + b t² n), possibly above 1.
    pub raw: f64,
    pub clamped: f64,
}

pub fn chernoff_outage_bound(a_t: f64, b_t: f64, t: f64, m: f64, n: f64) -> Result<ChernoffBound> {
    if !(t > 0.0) {
        return Err(Error::InfeasibleTilt(format!("tilt must be positive, got {t}")));
    }
    if !(a_t > 0.0) {
        return Err(Error::InfeasibleTilt(format!("a_t must be positive, got {a_t}")));
    }
    if !(m >= 0.0 && n >= 0.0) {
        return domain("lengths must be nonnegative");
    }
    let raw = (-a_t * t * m + b_t * t * t * n).exp();
    Ok(ChernoffBound { raw, clamped: raw.clamp(0.0, 1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffParams {
    pub t: f64,
    /// Per-symbol drift and curvature for Gaussian inputs.
    pub a_t: f64,
    pub b_t: f64,
    /// Per-block versions for blocks of length L.
    pub alpha_t: f64,
    pub beta_0: f64,
    pub beta_t: f64,
}

// The bracketed curvature term shared by b_t (L = 1) and β_t.
fn curvature(p: f64, m2: f64, l: f64, t: f64) -> f64 {
    let q = (1.0 - 2.0 * l * p * t).powf(2.5);
    let x4 = 3.0 * p * p / q;
    let v = m2 / 2.0 + x4 / 2.0 - p * p + t * l * p / 2.0 * (m2 - x4) + t * t * l * l * p * p * m2 * 1.5 / q;
    v.max(0.0)
}

pub fn block_chernoff_params(model: &EnergyModel, l: u64, t: f64) -> Result<ChernoffParams> {
    if l == 0 {
        return domain("coherence time must be at least 1");
    }
    if !(t > 0.0) {
        return Err(Error::InfeasibleTilt(format!("tilt must be positive, got {t}")));
    }
    let p = model.mean();
    let m2 = model.m2();
    let lf = l as f64;
    if !(t < 1.0 / (2.0 * lf * p)) {
        return Err(Error::DivergentMoment(format!(
            "tilt {t} must be below 1/(2LP) = {}",
            1.0 / (2.0 * lf * p)
        )));
    }
    Ok(ChernoffParams {
        t,
        a_t: p - t * m2 / 2.0,
        b_t: curvature(p, m2, 1.0, t),
        alpha_t: lf * (p - t * lf * m2 / 2.0),
        beta_0: beta_0(model, l),
        beta_t: lf * lf * curvature(p, m2, lf, t),
    })
}

pub fn beta_0(model: &EnergyModel, l: u64) -> f64 {
    let lf = l as f64;
    lf * lf * (model.m2() + model.mean().powi(2)) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SavingLength {
    pub t_n: f64,
    /// Saving-phase length; `None` when the tilt falls outside its valid range.
    pub m: Option<u64>,
    pub params: Option<ChernoffParams>,
    pub feasible: bool,
    pub violated: Option<&'static str>,
    pub conditions: Vec<Condition>,
}

fn log2_inv(eps: f64) -> f64 {
    -eps.log2()
}

/// n > L³ log(1/ε₁)/β₀ · max{4P², E[E₁²]²/(4P²)}.
pub fn chernoff_length_condition(model: &EnergyModel, l: u64, n: u64, eps1: f64) -> Condition {
    let p = model.mean();
    let m2 = model.m2();
    let lf = l as f64;
    let rhs = lf.powi(3) * log2_inv(eps1) / beta_0(model, l) * (4.0 * p * p).max(m2 * m2 / (4.0 * p * p));
    Condition::greater("chernoff_tilt_range", n as f64, rhs)
}

pub fn saving_length(model: &EnergyModel, l: u64, n: u64, eps1: f64) -> Result<SavingLength> {
    check_prob_open("eps1", eps1)?;
    if n == 0 || l == 0 {
        return domain("n and L must be at least 1");
    }
    let lg = log2_inv(eps1);
    let b0 = beta_0(model, l);
    let t_n = (lg / (n.div_ceil(l) as f64 * b0)).sqrt();
    let conditions = vec![chernoff_length_condition(model, l, n, eps1)];
    let params = block_chernoff_params(model, l, t_n).ok().filter(|c| c.alpha_t > 0.0);
    let lf = l as f64;
    let m = params.map(|c| {
        let v = ((n as f64 / lf + 1.0) * lg).sqrt() * lf * (c.beta_t + c.beta_0) / (c.alpha_t * b0.sqrt())
            + 2.0 * lf;
        v.ceil() as u64
    });
    Ok(SavingLength {
        t_n,
        m,
        params,
        feasible: all_hold(&conditions),
        violated: first_violation(&conditions),
        conditions,
    })
}

/// Chernoff bound on the outage union event for saving length `m`.
///
/// With L = 1 this is the per-symbol bound. Otherwise the event is dominated
/// by its block-aggregated version over ⌈n/L⌉ transmission blocks against
/// ⌊m/L⌋ − 1 fully saved blocks.
pub fn outage_bound(model: &EnergyModel, l: u64, n: u64, m: u64, t: f64) -> Result<ChernoffBound> {
    let c = block_chernoff_params(model, l, t)?;
    if l == 1 {
        return chernoff_outage_bound(c.a_t, c.b_t, t, m as f64, n as f64);
    }
    let saved = (m / l).saturating_sub(1);
    chernoff_outage_bound(c.alpha_t, c.beta_t, t, saved as f64, n.div_ceil(l) as f64)
}

/// Closed-form upper bound on the saving length, valid under the
/// achievability largeness conditions.
pub fn saving_length_upper_bound(model: &EnergyModel, l: u64, n: u64, eps1: f64) -> Option<f64> {
    let p = model.mean();
    let m2 = model.m2();
    let lf = l as f64;
    let lg = log2_inv(eps1);
    let r = (lf * lg / n as f64).sqrt();
    let base = 1.0 - 2.0 * r;
    let den = (p - m2 / (2.0 * p) * r) * ((m2 + p * p) / 2.0).sqrt();
    if !(base > 0.0 && den > 0.0) {
        return None;
    }
    let num = (m2 + 3.0 * p * p / (2.0 * base.powf(2.5)) - p * p / 2.0 + m2 / 2.0 * r)
        * ((lf * n as f64 + lf * lf) * lg).sqrt();
    Some(num / den + 2.0 * lf + 1.0)
}

/// ε₂ − ε₂² − (τ₁+1)/√n ≥ 0.
pub fn berry_esseen_condition(p: f64, n: u64, eps2: f64) -> Result<Condition> {
    let tau1 = info_density_stats(p)?.tau1;
    let nf = n as f64;
    Ok(Condition::at_least("berry_esseen_slack", eps2 - eps2 * eps2 - (tau1 + 1.0) / nf.sqrt(), 0.0))
}

/// Lower bound on log M for an (n+m)-symbol save-and-transmit code with
/// noise budget ε₂.
pub fn achievable_log_m(p: f64, n: u64, eps2: f64) -> Result<BoundReport> {
    check_positive("snr", p)?;
    check_prob_open("eps2", eps2)?;
    if n == 0 {
        return domain("n must be at least 1");
    }
    let nf = n as f64;
    let first = nf * capacity_raw(p);
    let second = (nf * p / (1.0 + p)).sqrt() * LOG2E * inv_cdf_raw(eps2);
    let k1 = kappa1(p, eps2)?;
    Ok(BoundReport {
        kind: "achievable",
        value: first + second - 0.5 * nf.log2() - k1,
        first_order: first,
        second_order: second,
        residual: k1,
        conditions: vec![berry_esseen_condition(p, n, eps2)?],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaveTransmitDesign {
    pub n: u64,
    pub l: u64,
    pub eps: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub t_n: f64,
    pub m: Option<u64>,
    pub log_m: f64,
    pub m_upper: Option<f64>,
    pub feasible: bool,
    pub conditions: Vec<Condition>,
}

pub fn design(model: &EnergyModel, l: u64, n: u64, eps: f64, eps1: f64) -> Result<SaveTransmitDesign> {
    check_prob_open("eps", eps)?;
    if !(eps1 > 0.0 && eps1 < eps) {
        return domain(format!("eps1 must lie in (0, eps), got {eps1}"));
    }
    let eps2 = eps - eps1;
    let p = model.mean();
    let m2 = model.m2();
    let lf = l as f64;
    let lg = log2_inv(eps1);
    let sl = saving_length(model, l, n, eps1)?;
    let ach = achievable_log_m(p, n, eps2)?;
    let mut conditions = vec![
        Condition::greater(
            "saving_length",
            n as f64,
            2.0 * lf * lg / (m2 + p * p) * (4.0 * p * p).max(m2 * m2 / (4.0 * p * p)),
        ),
        Condition::at_least("tilt_drift", n as f64, lf * m2 * m2 * lg / p.powi(4)),
    ];
    conditions.extend(ach.conditions);
    conditions.extend(sl.conditions);
    Ok(SaveTransmitDesign {
        n,
        l,
        eps,
        eps1,
        eps2,
        t_n: sl.t_n,
        m: sl.m,
        log_m: ach.value,
        m_upper: saving_length_upper_bound(model, l, n, eps1),
        feasible: all_hold(&conditions),
        conditions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "regime", content = "l")]
pub enum Regime {
    /// ω(1) = L = o(n).
    GrowingL,
    ConstantL(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderLower {
    pub v_minus: f64,
    /// Only defined for ε < ½.
    pub v_minus_minus: Option<f64>,
    /// Maximizing ε₁ for the constant-L case.
    pub eps1_opt: Option<f64>,
}

fn saving_penalty(model: &EnergyModel, eps1: f64) -> f64 {
    -capacity_raw(model.mean()) * (varrho(model) * log2_inv(eps1)).sqrt()
}

fn noise_coefficient(p: f64, l: u64) -> f64 {
    (p / (l as f64 * (1.0 + p))).sqrt() * LOG2E
}

/// Objective of the constant-L supremum at a given ε₁.
pub fn constant_l_objective(model: &EnergyModel, l: u64, eps: f64, eps1: f64) -> f64 {
    saving_penalty(model, eps1) + noise_coefficient(model.mean(), l) * inv_cdf_raw(eps - eps1)
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn maximize_split(model: &EnergyModel, l: u64, eps: f64) -> (f64, f64) {
    let f = |e1: f64| constant_l_objective(model, l, eps, e1);
    let lo = 1e-6 * eps;
    let hi = eps - 1e-6 * eps;
    let k = 256;
    let ratio = (hi / lo).ln() / (k - 1) as f64;
    let grid: Vec<f64> = (0..k).map(|i| if i == k - 1 { hi } else { lo * (ratio * i as f64).exp() }).collect();
    let mut best = (f64::NEG_INFINITY, eps / 2.0);
    let mut best_i = 0;
    for (i, &e1) in grid.iter().enumerate() {
        let v = f(e1);
        if v > best.0 {
            best = (v, e1);
            best_i = i;
        }
    }
    let (mut a, mut b) = (grid[best_i.saturating_sub(1)], grid[(best_i + 1).min(k - 1)]);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * eps {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    // Explicit candidates: the midpoint split and the split that yields V⁻⁻.
    let witness = (1.0 - 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E).sqrt()) * eps;
    for e1 in [c, d, eps / 2.0, witness] {
        let v = f(e1);
        if v > best.0 {
            best = (v, e1);
        }
    }
    best
}

pub fn v_minus_minus(model: &EnergyModel, regime: Regime, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return domain(format!("V-- needs eps in (0, 1/2), got {eps}"));
    }
    let p = model.mean();
    Ok(match regime {
        Regime::GrowingL => saving_penalty(model, eps),
        Regime::ConstantL(_) => {
            let c = capacity_raw(p) * (2.0 * varrho(model)).sqrt() + (4.0 * p * LOG2E / (1.0 + p)).sqrt();
            -c * log2_inv(eps).sqrt()
        }
    })
}

pub fn second_order_lower(model: &EnergyModel, regime: Regime, eps: f64) -> Result<SecondOrderLower> {
    check_prob_open("eps", eps)?;
    let (v_minus, eps1_opt) = match regime {
        Regime::GrowingL => (saving_penalty(model, eps), None),
        Regime::ConstantL(l) => {
            if l == 0 {
                return domain("coherence time must be at least 1");
            }
            let (v, e1) = maximize_split(model, l, eps);
            (v, Some(e1))
        }
    };
    let v_minus_minus = if eps < 0.5 { Some(v_minus_minus(model, regime, eps)?) } else { None };
    Ok(SecondOrderLower { v_minus, v_minus_minus, eps1_opt })
}
