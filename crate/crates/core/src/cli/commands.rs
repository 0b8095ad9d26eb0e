use super::config::RunConfig;
use super::table::{Cell, Table};
use crate::converse::{converse_log_m, sandwich_report};
use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::linear::{block_structure, rate_quantile, QuantileMode};
use crate::montecarlo::{
    empirical_rate_quantile, simulate_adaptive_budget, simulate_outage, OutageOptions, Runner,
};
use crate::report::first_violation;
use crate::save_transmit::{achievable_log_m, design, outage_bound, saving_length, Regime};

pub const BOUNDS: &[&str] = &[
    "model",
    "snr",
    "n",
    "l",
    "eps",
    "achievable",
    "achievable_feasible",
    "achievable_violation",
    "converse",
    "converse_feasible",
    "converse_violation",
];

pub const SECOND_ORDER: &[&str] = &[
    "model",
    "snr",
    "regime",
    "l",
    "eps",
    "v_minus_minus",
    "v_minus",
    "v_plus",
    "eps1_opt",
    "ordering_checked",
    "ordering_holds",
    "gap",
    "gap_bound",
    "gap_holds",
];

pub const DESIGN: &[&str] = &[
    "model",
    "snr",
    "n",
    "l",
    "eps",
    "eps1",
    "eps2",
    "t_n",
    "m",
    "m_upper",
    "log_m",
    "feasible",
    "violation",
];

pub const LINEAR_CAPACITY: &[&str] = &["model", "lambda", "eps", "mode", "q", "d", "supported", "rate"];

pub const OUTAGE_SIM: &[&str] = &[
    "model",
    "snr",
    "n",
    "l",
    "eps1",
    "m",
    "t_n",
    "chernoff_bound",
    "feasible",
    "outage",
    "outage_stderr",
    "aggregated",
    "clipped",
    "trials",
    "seed",
];

pub const QUANTILE_SIM: &[&str] = &[
    "model",
    "lambda",
    "eps",
    "empirical",
    "bootstrap_stderr",
    "lower",
    "threshold",
    "upper",
    "trials",
    "seed",
];

pub const ADAPTIVE_SIM: &[&str] = &[
    "model",
    "lambda",
    "n",
    "eta",
    "eps",
    "rate",
    "message_bits",
    "mean_total_bits",
    "shortfall",
    "shortfall_stderr",
    "trials",
    "seed",
];

pub const SELFTEST: &[&str] = &["check", "holds", "value"];

pub fn header(command: &str) -> &'static [&'static str] {
    match command {
        "bounds" => BOUNDS,
        "second-order" => SECOND_ORDER,
        "design" => DESIGN,
        "linear-capacity" => LINEAR_CAPACITY,
        "outage-sim" => OUTAGE_SIM,
        "quantile-sim" => QUANTILE_SIM,
        "adaptive-sim" => ADAPTIVE_SIM,
        _ => SELFTEST,
    }
}

fn model_cell(m: &EnergyModel) -> Cell {
    m.name().into()
}

fn violation(conds: &[crate::report::Condition]) -> Cell {
    first_violation(conds).map(str::to_string).into()
}

pub fn bounds(cfg: &RunConfig) -> Result<Table> {
    let model = &cfg.model;
    let p = model.mean();
    let mut t = Table::new(BOUNDS);
    for &n in &cfg.n {
        for &l in &cfg.l {
            for &eps in &cfg.eps {
                let ach = achievable_log_m(p, n, eps)?;
                let conv = converse_log_m(model, n, l, eps)?;
                t.push(vec![
                    model_cell(model),
                    p.into(),
                    n.into(),
                    l.into(),
                    eps.into(),
                    ach.value.into(),
                    ach.feasible().into(),
                    violation(&ach.conditions),
                    conv.value.into(),
                    conv.feasible().into(),
                    violation(&conv.conditions),
                ]);
            }
        }
    }
    Ok(t)
}

fn regimes(cfg: &RunConfig) -> Result<Vec<Regime>> {
    let mut out = Vec::new();
    for r in &cfg.regime {
        match r.as_str() {
            "growing" => out.push(Regime::GrowingL),
            "constant" => out.extend(cfg.l.iter().map(|&l| Regime::ConstantL(l))),
            other => return Err(Error::Config(format!("unknown regime {other:?}"))),
        }
    }
    Ok(out)
}

pub fn second_order(cfg: &RunConfig) -> Result<Table> {
    let model = &cfg.model;
    let mut t = Table::new(SECOND_ORDER);
    for regime in regimes(cfg)? {
        let (name, l) = match regime {
            Regime::GrowingL => ("growing", None),
            Regime::ConstantL(l) => ("constant", Some(l)),
        };
        for &eps in &cfg.eps {
            let s = sandwich_report(model, regime, eps)?;
            let lower = crate::save_transmit::second_order_lower(model, regime, eps)?;
            t.push(vec![
                model_cell(model),
                model.mean().into(),
                name.into(),
                l.into(),
                eps.into(),
                s.v_minus_minus.into(),
                s.v_minus.into(),
                s.v_plus.into(),
                lower.eps1_opt.into(),
                s.ordering_checked.into(),
                s.ordering_holds.into(),
                s.gap.into(),
                s.gap_bound.into(),
                s.gap_holds.into(),
            ]);
        }
    }
    Ok(t)
}

pub fn design_grid(cfg: &RunConfig) -> Result<Table> {
    let model = &cfg.model;
    let mut t = Table::new(DESIGN);
    for &n in &cfg.n {
        for &l in &cfg.l {
            for &eps in &cfg.eps {
                for &eps1 in &cfg.eps1 {
                    let d = design(model, l, n, eps, eps1)?;
                    t.push(vec![
                        model_cell(model),
                        model.mean().into(),
                        n.into(),
                        l.into(),
                        eps.into(),
                        eps1.into(),
                        d.eps2.into(),
                        d.t_n.into(),
                        d.m.into(),
                        d.m_upper.into(),
                        d.log_m.into(),
                        d.feasible.into(),
                        violation(&d.conditions),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

fn modes(cfg: &RunConfig) -> Result<Vec<(String, QuantileMode)>> {
    cfg.mode.iter().map(|m| Ok((m.clone(), m.parse()?))).collect()
}

pub fn linear_capacity(cfg: &RunConfig) -> Result<Table> {
    let model = &cfg.model;
    let mut t = Table::new(LINEAR_CAPACITY);
    let modes = modes(cfg)?;
    for &lambda in &cfg.lambda {
        let bs = block_structure(lambda, 1 << 40)?;
        for &eps in &cfg.eps {
            for (name, mode) in &modes {
                let (supported, rate) = match rate_quantile(model, lambda, eps, *mode) {
                    Ok(r) => (true, Some(r)),
                    Err(Error::UnsupportedMode(_)) => (false, None),
                    Err(e) => return Err(e),
                };
                t.push(vec![
                    model_cell(model),
                    lambda.into(),
                    eps.into(),
                    name.as_str().into(),
                    bs.q.into(),
                    bs.d.into(),
                    supported.into(),
                    rate.into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn outage_sim(cfg: &RunConfig, runner: &Runner) -> Result<Table> {
    let model = &cfg.model;
    let p = model.mean();
    let mut t = Table::new(OUTAGE_SIM);
    for &n in &cfg.n {
        for &l in &cfg.l {
            // (ε₁, m, t, feasible) for each row of this (n, L)
            let mut plans = Vec::new();
            if cfg.m.is_empty() {
                for &eps1 in &cfg.eps1 {
                    let sl = saving_length(model, l, n, eps1)?;
                    plans.push((Some(eps1), sl.m, Some(sl.t_n), sl.feasible));
                }
            } else {
                plans.extend(cfg.m.iter().map(|&m| (None, Some(m), None, true)));
            }
            for (eps1, m, t_n, feasible) in plans {
                let bound = match (m, t_n) {
                    (Some(m), Some(tn)) => outage_bound(model, l, n, m, tn).ok().map(|b| b.raw),
                    _ => None,
                };
                let res = match m {
                    Some(m) => Some(simulate_outage(
                        runner,
                        model,
                        p,
                        n,
                        l,
                        m,
                        cfg.trials,
                        cfg.seed,
                        OutageOptions::default(),
                    )?),
                    None => None,
                };
                t.push(vec![
                    model_cell(model),
                    p.into(),
                    n.into(),
                    l.into(),
                    eps1.into(),
                    m.into(),
                    t_n.into(),
                    bound.into(),
                    feasible.into(),
                    res.as_ref().map(|r| r.outage.estimate).into(),
                    res.as_ref().map(|r| r.outage.stderr).into(),
                    res.as_ref().and_then(|r| r.aggregated).map(|a| a.estimate).into(),
                    res.as_ref().and_then(|r| r.clipped).map(|a| a.estimate).into(),
                    cfg.trials.into(),
                    cfg.seed.into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn optional_quantile(model: &EnergyModel, lambda: f64, eps: f64, mode: QuantileMode) -> Result<Option<f64>> {
    match rate_quantile(model, lambda, eps, mode) {
        Ok(r) => Ok(Some(r)),
        Err(Error::UnsupportedMode(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn quantile_sim(cfg: &RunConfig, runner: &Runner) -> Result<Table> {
    let model = &cfg.model;
    let mut t = Table::new(QUANTILE_SIM);
    for &lambda in &cfg.lambda {
        for &eps in &cfg.eps {
            let est = empirical_rate_quantile(runner, model, lambda, eps, cfg.trials, cfg.seed)?;
            t.push(vec![
                model_cell(model),
                lambda.into(),
                eps.into(),
                est.estimate.into(),
                est.stderr.into(),
                optional_quantile(model, lambda, eps, QuantileMode::Lower)?.into(),
                optional_quantile(model, lambda, eps, QuantileMode::Threshold)?.into(),
                optional_quantile(model, lambda, eps, QuantileMode::Upper)?.into(),
                cfg.trials.into(),
                cfg.seed.into(),
            ]);
        }
    }
    Ok(t)
}

pub fn adaptive_sim(cfg: &RunConfig, runner: &Runner) -> Result<Table> {
    let model = &cfg.model;
    let mut t = Table::new(ADAPTIVE_SIM);
    for &lambda in &cfg.lambda {
        for &n in &cfg.n {
            for &eta in &cfg.eta {
                // explicit rates, or the lower rate quantile at each ε
                let rates: Vec<(Option<f64>, f64)> = if cfg.rate.is_empty() {
                    cfg.eps
                        .iter()
                        .map(|&e| Ok((Some(e), rate_quantile(model, lambda, e, QuantileMode::Lower)?)))
                        .collect::<Result<_>>()?
                } else {
                    cfg.rate.iter().map(|&r| (None, r)).collect()
                };
                for (eps, rate) in rates {
                    let r = simulate_adaptive_budget(runner, model, lambda, n, eta, rate, cfg.trials, cfg.seed)?;
                    t.push(vec![
                        model_cell(model),
                        lambda.into(),
                        n.into(),
                        eta.into(),
                        eps.into(),
                        rate.into(),
                        r.message_bits.into(),
                        r.mean_total_bits.into(),
                        r.shortfall.estimate.into(),
                        r.shortfall.stderr.into(),
                        cfg.trials.into(),
                        cfg.seed.into(),
                    ]);
                }
            }
        }
    }
    Ok(t)
}
