//! Coherence time growing linearly in n: block bookkeeping, the energy
//! quantizer and bit map of the adaptive scheme, and the rate quantiles
//! that give the ε-capacity.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::energy::{EnergyModel, Family};
use crate::error::{check_positive, check_prob_open, domain, Error, Result};
use crate::gaussian::{capacity_raw, LOG2E};
use crate::report::Condition;

const FLOOR_SLACK: f64 = 1e-9;

fn floor_tol(x: f64) -> f64 {
    (x + FLOOR_SLACK).floor()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearBlockStructure {
    pub lambda: f64,
    pub n: u64,
    pub l: u64,
    pub q: u64,
    pub d: f64,
    pub rho: u64,
    /// n − ρL, the length of the trailing partial block.
    pub last_len: u64,
    /// Whether ρ = q and nd ≤ n − ρL ≤ nd + ⌊1/λ⌋ at this n.
    pub asymptotic_identities_hold: bool,
}

pub fn block_structure(lambda: f64, n: u64) -> Result<LinearBlockStructure> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return domain(format!("lambda must lie in (0,1], got {lambda}"));
    }
    let nf = n as f64;
    let l = floor_tol(lambda * nf) as u64;
    if l == 0 {
        return domain(format!("n = {n} too small for lambda = {lambda}: floor(lambda n) = 0"));
    }
    let q = floor_tol(1.0 / lambda) as u64;
    let mut d = 1.0 - q as f64 * lambda;
    if d.abs() < 1e-12 {
        d = 0.0;
    }
    let rho = n / l;
    let last_len = n - rho * l;
    let nd = nf * d;
    let last = last_len as f64;
    let ok = rho == q && last >= nd - FLOOR_SLACK && last <= nd + q as f64 + FLOOR_SLACK;
    Ok(LinearBlockStructure { lambda, n, l, q, d, rho, last_len, asymptotic_identities_hold: ok })
}

impl LinearBlockStructure {
    /// Lengths L_1..L_{ρ+1} used by the adaptive scheme; the last is ⌊dn⌋.
    pub fn adaptive_lengths(&self) -> Vec<u64> {
        let mut v = vec![self.l; self.rho as usize];
        v.push(floor_tol(self.d * self.n as f64) as u64);
        v
    }
}

/// Energy step Δ = √(4P+2)/L^{1/6}.
pub fn adaptive_delta(p: f64, l: u64) -> Result<f64> {
    check_positive("snr", p)?;
    if l == 0 {
        return domain("block length must be at least 1");
    }
    Ok((4.0 * p + 2.0).sqrt() / (l as f64).powf(1.0 / 6.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantizer {
    pub delta: f64,
}

impl Quantizer {
    pub fn new(delta: f64) -> Result<Self> {
        check_positive("delta", delta)?;
        Ok(Quantizer { delta })
    }

    pub fn point(&self, k: u64) -> f64 {
        k as f64 * (2.0 * self.delta)
    }

    /// Index k with point(k) ≤ a < point(k+1).
    pub fn index(&self, a: f64) -> u64 {
        let mut k = (a / (2.0 * self.delta)).floor().max(0.0) as u64;
        while k > 0 && self.point(k) > a {
            k -= 1;
        }
        while self.point(k + 1) <= a {
            k += 1;
        }
        k
    }

    pub fn quantize(&self, a: f64) -> Result<f64> {
        if !(a >= 0.0 && a.is_finite()) {
            return domain(format!("energy must be nonnegative, got {a}"));
        }
        Ok(self.point(self.index(a)))
    }

    /// Grid point nearest to `mean_sq − 1`, the lower one on ties.
    pub fn estimate_level(&self, mean_sq: f64) -> Result<f64> {
        if !(mean_sq >= 0.0) {
            return domain(format!("mean square must be nonnegative, got {mean_sq}"));
        }
        let t = mean_sq - 1.0;
        if t <= 0.0 {
            return Ok(0.0);
        }
        let k = self.index(t);
        let (lo, hi) = (self.point(k), self.point(k + 1));
        Ok(if t - lo <= hi - t { lo } else { hi })
    }
}

pub fn quantize(a: f64, delta: f64) -> Result<f64> {
    Quantizer::new(delta)?.quantize(a)
}

pub fn estimate_energy_level(mean_sq: f64, delta: f64) -> Result<f64> {
    Quantizer::new(delta)?.estimate_level(mean_sq)
}

/// ⌈ℓ^{2/3}⌉, exact for perfect cubes.
pub fn ceil_two_thirds(l: u64) -> u64 {
    let target = (l as u128) * (l as u128);
    let mut c = ((l as f64).powf(2.0 / 3.0).round() as u128).max(1);
    while c * c * c < target {
        c += 1;
    }
    while c > 0 && (c - 1) * (c - 1) * (c - 1) >= target {
        c -= 1;
    }
    c as u64
}

fn three_quarters(l: u64) -> f64 {
    (l as f64).sqrt().sqrt().powi(3)
}

fn gamma_raw(l: u64, rate: f64) -> u64 {
    if l == 0 {
        return 0;
    }
    let v = ((l - ceil_two_thirds(l)) as f64 * rate - 2.0 * three_quarters(l)).floor();
    if v > 0.0 {
        v as u64
    } else {
        0
    }
}

/// γ(ℓ, e): bits carried by one adaptive block of length ℓ.
pub fn adaptive_bits(l: u64, e: f64, delta: f64) -> Result<u64> {
    if l == 0 {
        return domain("block length must be at least 1");
    }
    let g = quantize(e, delta)?;
    Ok(gamma_raw(l, capacity_raw(g)))
}

/// ⌊nR − 2nη⌋, clamped at 0.
pub fn adaptive_message_size(n: u64, rate: f64, eta: f64) -> u64 {
    let nf = n as f64;
    let v = (nf * rate - 2.0 * nf * eta).floor();
    if v > 0.0 {
        v as u64
    } else {
        0
    }
}

/// nη ≥ (q+1)(LΔ + ⌈L^{2/3}⌉(χ+Δ) + 2L^{3/4} + χ + 1).
pub fn adaptive_budget_condition(q: u64, l: u64, p: f64, chi: f64, eta: f64, n: u64) -> Result<Condition> {
    let delta = adaptive_delta(p, l)?;
    let lf = l as f64;
    let rhs = (q + 1) as f64
        * (lf * delta + ceil_two_thirds(l) as f64 * (chi + delta) + 2.0 * three_quarters(l) + chi + 1.0);
    Ok(Condition::at_least("adaptive_budget", n as f64 * eta, rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEnergyBits {
    pub bits: u64,
    pub conditions: Vec<Condition>,
}

/// Bits of one block with constant, known energy P̃ (no quantization).
pub fn constant_energy_log_m(l: u64, p_tilde: f64) -> Result<ConstantEnergyBits> {
    if l < 2 {
        return domain("block length must be at least 2");
    }
    check_positive("energy", p_tilde)?;
    let lf = l as f64;
    let lg = lf.log2();
    let conditions = vec![
        Condition::at_least("length_vs_log", lf, (2.0 * lf + lf.sqrt()).log2().powi(4)),
        Condition::at_least("length_over_log", lf / lg, (12.0 * 2f64.sqrt()).max(0.4f64.exp() * (2.0 * lf.sqrt() + 1.0))),
        Condition::at_least(
            "dispersion_slack",
            (2.0 - 3f64.sqrt()) * three_quarters(l),
            ((l - ceil_two_thirds(l)) as f64).powf(0.25) + 1.0,
        ),
    ];
    Ok(ConstantEnergyBits { bits: gamma_raw(l, capacity_raw(p_tilde)), conditions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantileMode {
    Lower,
    Upper,
    Threshold,
}

impl std::str::FromStr for QuantileMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(QuantileMode::Lower),
            "upper" => Ok(QuantileMode::Upper),
            "threshold" => Ok(QuantileMode::Threshold),
            _ => Err(Error::Config(format!("unknown quantile mode {s:?}"))),
        }
    }
}

/// Cdf of C(E₁).
fn rate_cdf(model: &EnergyModel, y: f64) -> f64 {
    if y < 0.0 {
        0.0
    } else {
        model.cdf((2.0 * y / LOG2E).exp_m1())
    }
}

const GRID_POINTS: usize = 1 << 14;

/// Distribution of S = λ∑_{ℓ≤q} C(E_ℓ) + d·C(E_{q+1}).
enum RateLaw {
    Atoms(Vec<(f64, f64)>),
    Grid(GridLaw),
}

struct GridLaw {
    model: EnergyModel,
    lambda: f64,
    d: f64,
    q: u64,
    h: f64,
    /// Masses of the q-fold sum at (k + q/2)h.
    w: Vec<f64>,
    cum: Vec<f64>,
    s_max: f64,
}

impl GridLaw {
    fn build(model: &EnergyModel, lambda: f64, q: u64, d: f64) -> Result<Self> {
        let e_max = model.quantile(1.0 - 1e-12)?;
        let y_max = capacity_raw(e_max);
        let h = y_max / GRID_POINTS as f64;
        let mut mass: Vec<f64> = (0..GRID_POINTS)
            .map(|j| rate_cdf(model, (j + 1) as f64 * h) - rate_cdf(model, j as f64 * h))
            .collect();
        mass[GRID_POINTS - 1] += 1.0 - rate_cdf(model, y_max);
        let w = if q == 1 { mass } else { fft_power(&mass, q as usize) };
        let mut cum = Vec::with_capacity(w.len());
        let mut acc = 0.0;
        for &x in &w {
            acc += x;
            cum.push(acc);
        }
        Ok(GridLaw { model: *model, lambda, d, q, h, w, cum, s_max: y_max * (lambda * q as f64 + d) })
    }

    fn cdf(&self, s: f64) -> f64 {
        let half = self.q as f64 / 2.0;
        if self.d == 0.0 {
            // each lattice mass spread uniformly over its cell
            let x = s / (self.lambda * self.h) - half + 0.5;
            if x <= 0.0 {
                return 0.0;
            }
            let k = x.floor() as usize;
            if k >= self.w.len() {
                return 1.0;
            }
            let before = if k == 0 { 0.0 } else { self.cum[k - 1] };
            return before + self.w[k] * (x - k as f64);
        }
        let mut acc = 0.0;
        for (k, &wk) in self.w.iter().enumerate() {
            let base = self.lambda * (k as f64 + half) * self.h;
            if base > s {
                break;
            }
            if wk > 1e-300 {
                acc += wk * rate_cdf(&self.model, (s - base) / self.d);
            }
        }
        acc
    }
}

fn fft_power(mass: &[f64], q: usize) -> Vec<f64> {
    let len = q * (mass.len() - 1) + 1;
    let size = len.next_power_of_two();
    let mut buf: Vec<Complex64> = mass.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(size, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = c.powu(q as u32);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    buf.truncate(len);
    let scale = 1.0 / size as f64;
    buf.iter().map(|c| (c.re * scale).max(0.0)).collect()
}

fn atoms(model: &EnergyModel, lambda: f64, q: u64, d: f64) -> Option<Vec<(f64, f64)>> {
    match model.family() {
        Family::Deterministic { value } => Some(vec![(capacity_raw(value), 1.0)]),
        Family::TwoPoint { low, high, p_high } => {
            let (cl, ch) = (capacity_raw(low), capacity_raw(high));
            let mut out = Vec::new();
            let mut binom = 1.0f64;
            for k in 0..=q {
                if k > 0 {
                    binom *= (q - k + 1) as f64 / k as f64;
                }
                let pk = binom * p_high.powi(k as i32) * (1.0 - p_high).powi((q - k) as i32);
                let base = lambda * (k as f64 * ch + (q - k) as f64 * cl);
                out.push((base + d * cl, pk * (1.0 - p_high)));
                out.push((base + d * ch, pk * p_high));
            }
            out.sort_by(|a, b| a.0.total_cmp(&b.0));
            Some(out)
        }
        _ => None,
    }
}

const ATOM_SLACK: f64 = 1e-12;

fn atom_quantile(atoms: &[(f64, f64)], eps: f64, strict: bool) -> f64 {
    let mut cum = 0.0;
    for &(v, p) in atoms {
        cum += p;
        let hit = if strict { cum > eps + ATOM_SLACK } else { cum >= eps - ATOM_SLACK };
        if hit {
            return v;
        }
    }
    atoms.last().map_or(0.0, |a| a.0)
}

fn bisect(f: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn law(model: &EnergyModel, bs: &LinearBlockStructure) -> Result<RateLaw> {
    if !model.is_conforming() {
        return domain("rate quantiles need a conforming energy model");
    }
    match atoms(model, bs.lambda, bs.q, bs.d) {
        Some(a) => Ok(RateLaw::Atoms(a)),
        None => Ok(RateLaw::Grid(GridLaw::build(model, bs.lambda, bs.q, bs.d)?)),
    }
}

fn check_mode(model: &EnergyModel, mode: QuantileMode) -> Result<()> {
    if mode == QuantileMode::Threshold && !model.has_continuous_cdf() {
        return Err(Error::UnsupportedMode(format!(
            "threshold rate needs a continuous, strictly increasing cdf; {} has atoms",
            model.name()
        )));
    }
    Ok(())
}

/// Rate quantile of S, with the closed form C(F⁻¹(ε)) used for λ = 1.
pub fn rate_quantile(model: &EnergyModel, lambda: f64, eps: f64, mode: QuantileMode) -> Result<f64> {
    check_prob_open("eps", eps)?;
    check_mode(model, mode)?;
    let bs = block_structure(lambda, GRID_N)?;
    if bs.q == 1 && bs.d == 0.0 && model.has_continuous_cdf() {
        return Ok(capacity_raw(model.quantile(eps)?));
    }
    rate_quantile_numeric(model, lambda, eps, mode)
}

// Any n large enough for floor(λn) ≥ 1; only q and d are used.
const GRID_N: u64 = 1 << 40;

/// Rate quantile of S without the λ = 1 shortcut.
pub fn rate_quantile_numeric(model: &EnergyModel, lambda: f64, eps: f64, mode: QuantileMode) -> Result<f64> {
    check_prob_open("eps", eps)?;
    check_mode(model, mode)?;
    let bs = block_structure(lambda, GRID_N)?;
    Ok(match law(model, &bs)? {
        RateLaw::Atoms(a) => atom_quantile(&a, eps, mode == QuantileMode::Upper),
        RateLaw::Grid(g) => match mode {
            QuantileMode::Upper => bisect(|s| g.cdf(s) > eps, 0.0, g.s_max),
            _ => bisect(|s| g.cdf(s) >= eps, 0.0, g.s_max),
        },
    })
}

/// Cdf of S at `s`, for cross-checks.
pub fn rate_cdf_at(model: &EnergyModel, lambda: f64, s: f64) -> Result<f64> {
    let bs = block_structure(lambda, GRID_N)?;
    Ok(match law(model, &bs)? {
        RateLaw::Atoms(a) => a.iter().filter(|x| x.0 <= s).map(|x| x.1).sum(),
        RateLaw::Grid(g) => g.cdf(s),
    })
}
