//! Energy-arrival models and the block-i.i.d. harvesting process.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, domain, Error, Result};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum Family {
    Deterministic { value: f64 },
    Exponential { mean: f64 },
    /// Uniform on `[0, 2·mean]`.
    Uniform { mean: f64 },
    TwoPoint { low: f64, high: f64, p_high: f64 },
    /// E ≡ 0. Violates the positive-mean requirement; test use only.
    #[serde(skip)]
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EnergyModel {
    family: Family,
}

impl<'de> Deserialize<'de> for EnergyModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let family = Family::deserialize(d)?;
        EnergyModel::new(family).map_err(serde::de::Error::custom)
    }
}

impl EnergyModel {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::Deterministic { value } => check_positive("deterministic value", value)?,
            Family::Exponential { mean } => check_positive("exponential mean", mean)?,
            Family::Uniform { mean } => check_positive("uniform mean", mean)?,
            Family::TwoPoint { low, high, p_high } => {
                if !(low >= 0.0 && low < high && high.is_finite()) {
                    return domain(format!("two-point needs 0 <= low < high, got {low}, {high}"));
                }
                if !(p_high > 0.0 && p_high < 1.0) {
                    return domain(format!("two-point p_high must lie in (0,1), got {p_high}"));
                }
            }
            Family::Zero => return domain("zero-energy model is test-only"),
        }
        Ok(EnergyModel { family })
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        Self::new(Family::Deterministic { value })
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        Self::new(Family::Exponential { mean })
    }

    pub fn uniform(mean: f64) -> Result<Self> {
        Self::new(Family::Uniform { mean })
    }

    pub fn two_point(low: f64, high: f64, p_high: f64) -> Result<Self> {
        Self::new(Family::TwoPoint { low, high, p_high })
    }

    /// Non-conforming E ≡ 0 model for exercising the outage simulator.
    pub fn zero_energy_for_testing() -> Self {
        EnergyModel { family: Family::Zero }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_conforming(&self) -> bool {
        !matches!(self.family, Family::Zero)
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Deterministic { .. } => "deterministic",
            Family::Exponential { .. } => "exponential",
            Family::Uniform { .. } => "uniform",
            Family::TwoPoint { .. } => "two-point",
            Family::Zero => "zero",
        }
    }

    /// Whether the cdf is continuous and strictly increasing on its support.
    pub fn has_continuous_cdf(&self) -> bool {
        matches!(self.family, Family::Exponential { .. } | Family::Uniform { .. })
    }

    fn raw_moment(&self, k: f64) -> f64 {
        match self.family {
            Family::Deterministic { value } => value.powf(k),
            Family::Exponential { mean } => gamma_kp1(k) * mean.powf(k),
            Family::Uniform { mean } => (2.0 * mean).powf(k) / (k + 1.0),
            Family::TwoPoint { low, high, p_high } => {
                (1.0 - p_high) * low.powf(k) + p_high * high.powf(k)
            }
            Family::Zero => 0.0,
        }
    }

    /// P = E[E₁].
    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Deterministic { value } => value,
            Family::Exponential { mean } | Family::Uniform { mean } => mean,
            Family::TwoPoint { low, high, p_high } => (1.0 - p_high) * low + p_high * high,
            Family::Zero => 0.0,
        }
    }

    pub fn m2(&self) -> f64 {
        match self.family {
            Family::Deterministic { value } => value * value,
            Family::Exponential { mean } => 2.0 * mean * mean,
            Family::Uniform { mean } => 4.0 * mean * mean / 3.0,
            _ => self.raw_moment(2.0),
        }
    }

    pub fn m3(&self) -> f64 {
        match self.family {
            Family::Deterministic { value } => value * value * value,
            Family::Exponential { mean } => 6.0 * mean * mean * mean,
            Family::Uniform { mean } => 2.0 * mean * mean * mean,
            _ => self.raw_moment(3.0),
        }
    }

    /// E[E₁^{3/2}].
    pub fn m3half(&self) -> f64 {
        self.raw_moment(1.5)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.family {
            Family::Deterministic { value } => step(x >= value),
            Family::Exponential { mean } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / mean).exp_m1()
                }
            }
            Family::Uniform { mean } => (x / (2.0 * mean)).clamp(0.0, 1.0),
            Family::TwoPoint { low, high, p_high } => {
                if x >= high {
                    1.0
                } else if x >= low {
                    1.0 - p_high
                } else {
                    0.0
                }
            }
            Family::Zero => step(x >= 0.0),
        }
    }

    /// Left quantile `inf{x : F(x) ≥ p}` for `p ∈ (0,1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("quantile level must lie in (0,1), got {p}"));
        }
        Ok(match self.family {
            Family::Deterministic { value } => value,
            Family::Exponential { mean } => -mean * (-p).ln_1p(),
            Family::Uniform { mean } => 2.0 * mean * p,
            Family::TwoPoint { low, high, p_high } => {
                if p <= 1.0 - p_high {
                    low
                } else {
                    high
                }
            }
            Family::Zero => 0.0,
        })
    }

    /// One draw of E₁. Always consumes exactly one uniform.
    pub fn sample(&self, s: &mut Stream) -> f64 {
        let u = s.uniform();
        match self.family {
            Family::Deterministic { value } => value,
            Family::Exponential { mean } => -mean * u.ln(),
            Family::Uniform { mean } => 2.0 * mean * u,
            Family::TwoPoint { low, high, p_high } => {
                if u < p_high {
                    high
                } else {
                    low
                }
            }
            Family::Zero => 0.0,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self.family {
            Family::Zero => serde_json::json!({"family": "zero", "params": {}}),
            f => serde_json::to_value(f).expect("family serializes"),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("energy model: {e}")))
    }
}

fn step(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

// Γ(k+1) for the orders the moments need.
fn gamma_kp1(k: f64) -> f64 {
    if k == 1.0 {
        1.0
    } else if k == 1.5 {
        0.75 * std::f64::consts::PI.sqrt()
    } else if k == 2.0 {
        2.0
    } else if k == 3.0 {
        6.0
    } else {
        unreachable!("unsupported moment order {k}")
    }
}

/// ϱ = 2(E[E₁²]/P² + 1).
pub fn varrho(model: &EnergyModel) -> f64 {
    let p = model.mean();
    2.0 * (model.m2() / (p * p) + 1.0)
}

/// Blocklength `n` split into coherence blocks of `l` channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockStructure {
    pub n: u64,
    pub l: u64,
}

impl BlockStructure {
    pub fn new(n: u64, l: u64) -> Result<Self> {
        if n == 0 || l == 0 {
            return domain("n and L must be at least 1");
        }
        Ok(BlockStructure { n, l })
    }

    /// b_ℓ = (ℓ−1)L, the offset preceding block ℓ (1-based).
    pub fn offset(&self, block: u64) -> u64 {
        (block - 1) * self.l
    }

    /// Index of the first channel use in block ℓ (1-based).
    pub fn block_start(&self, block: u64) -> u64 {
        self.offset(block) + 1
    }

    /// Block containing channel use `k` (both 1-based).
    pub fn block_of(&self, k: u64) -> u64 {
        (k - 1) / self.l + 1
    }

    pub fn num_blocks(&self) -> u64 {
        self.n.div_ceil(self.l)
    }
}

/// Energies E₁..E_n where block ℓ's level comes from substream `(seed, ℓ)`.
pub fn sample_block_sequence(model: &EnergyModel, n: u64, l: u64, seed: u64) -> Result<Vec<f64>> {
    let bs = BlockStructure::new(n, l)?;
    let mut out = Vec::with_capacity(n as usize);
    for block in 1..=bs.num_blocks() {
        let e = model.sample(&mut rng::stream(seed, rng::DOMAIN_ENERGY, block));
        let len = l.min(n - bs.offset(block));
        out.extend(std::iter::repeat_n(e, len as usize));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn varrho_examples() {
        assert_eq!(varrho(&EnergyModel::deterministic(2.5).unwrap()), 4.0);
        assert_eq!(varrho(&EnergyModel::exponential(0.7).unwrap()), 6.0);
        let u = varrho(&EnergyModel::uniform(3.0).unwrap());
        assert!((u - 14.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn constructors_reject_bad_params() {
        assert!(EnergyModel::deterministic(0.0).is_err());
        assert!(EnergyModel::exponential(-1.0).is_err());
        assert!(EnergyModel::uniform(f64::NAN).is_err());
        assert!(EnergyModel::two_point(1.0, 1.0, 0.5).is_err());
        assert!(EnergyModel::two_point(0.0, 2.0, 1.0).is_err());
        assert!(EnergyModel::new(Family::Zero).is_err());
        assert!(!EnergyModel::zero_energy_for_testing().is_conforming());
    }

    #[test]
    fn moments_match_closed_forms() {
        let e = EnergyModel::exponential(2.0).unwrap();
        assert_eq!(e.m2(), 8.0);
        assert_eq!(e.m3(), 48.0);
        let want = 0.75 * std::f64::consts::PI.sqrt() * 2f64.powf(1.5);
        assert!((e.m3half() - want).abs() < 1e-14);
        let t = EnergyModel::two_point(1.0, 3.0, 0.25).unwrap();
        assert_eq!(t.mean(), 1.5);
        assert_eq!(t.m2(), 0.75 + 2.25);
        let d = EnergyModel::deterministic(1.5).unwrap();
        assert_eq!(d.m2(), d.mean() * d.mean());
        assert_eq!(d.m3(), 1.5 * 1.5 * 1.5);
        for m in [e, t, d, EnergyModel::uniform(1.0).unwrap()] {
            assert!(m.m2() >= m.mean() * m.mean());
        }
    }

    #[test]
    fn json_round_trip() {
        let m = EnergyModel::two_point(0.5, 2.0, 0.3).unwrap();
        let v = m.to_json();
        assert_eq!(v["family"], "two-point");
        assert_eq!(EnergyModel::from_json(&v).unwrap(), m);
        let bad = serde_json::json!({"family": "exponential", "params": {"mean": -1.0}});
        assert!(EnergyModel::from_json(&bad).is_err());
        let unknown = serde_json::json!({"family": "pareto", "params": {}});
        assert!(EnergyModel::from_json(&unknown).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        let e = EnergyModel::exponential(1.0).unwrap();
        let p = 1.0 - (-1.0f64).exp();
        assert!((e.quantile(p).unwrap() - 1.0).abs() < 1e-15);
        let t = EnergyModel::two_point(1.0, 3.0, 0.25).unwrap();
        assert_eq!(t.quantile(0.75).unwrap(), 1.0);
        assert_eq!(t.quantile(0.76).unwrap(), 3.0);
    }

    #[test]
    fn block_structure_indices() {
        let bs = BlockStructure::new(10, 3).unwrap();
        assert_eq!(bs.block_start(1), 1);
        assert_eq!(bs.block_start(3), 7);
        assert_eq!(bs.num_blocks(), 4);
        assert_eq!(bs.block_of(3), 1);
        assert_eq!(bs.block_of(4), 2);
        assert_eq!(bs.block_of(10), 4);
    }

    #[test]
    fn block_sequence_examples() {
        let d = EnergyModel::deterministic(1.0).unwrap();
        assert_eq!(sample_block_sequence(&d, 5, 2, 9).unwrap(), vec![1.0; 5]);
        let e = EnergyModel::exponential(1.0).unwrap();
        let s = sample_block_sequence(&e, 6, 3, 4).unwrap();
        assert!(s[0] == s[1] && s[1] == s[2]);
        assert!(s[3] == s[4] && s[4] == s[5]);
        assert_ne!(s[0], s[3]);
        assert_eq!(s, sample_block_sequence(&e, 6, 3, 4).unwrap());
    }

    #[test]
    fn exponential_sample_mean() {
        let e = EnergyModel::exponential(1.0).unwrap();
        let n = 100_000;
        let s = sample_block_sequence(&e, n, 1, 2024).unwrap();
        let mean = s.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt());
        assert!(s.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn block_leading_values_two_moments() {
        for m in [
            EnergyModel::exponential(1.5).unwrap(),
            EnergyModel::uniform(0.7).unwrap(),
            EnergyModel::two_point(0.0, 3.0, 0.25).unwrap(),
        ] {
            let blocks = 10_000u64;
            let l = 7;
            let s = sample_block_sequence(&m, blocks * l, l, 31).unwrap();
            let lead: Vec<f64> = s.iter().step_by(l as usize).copied().collect();
            let n = lead.len() as f64;
            let m1 = lead.iter().sum::<f64>() / n;
            let m2 = lead.iter().map(|x| x * x).sum::<f64>() / n;
            let m4 = lead.iter().map(|x| x.powi(4)).sum::<f64>() / n;
            let se1 = ((m2 - m1 * m1) / n).sqrt();
            let se2 = ((m4 - m2 * m2) / n).sqrt();
            assert!((m1 - m.mean()).abs() < 5.0 * se1, "{}", m.name());
            assert!((m2 - m.m2()).abs() < 5.0 * se2, "{}", m.name());
        }
    }
}
