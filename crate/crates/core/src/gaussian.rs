//! Standard normal functions, the AWGN capacity, and the Gaussian
//! information-density constants used by both bound directions.
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::energy::EnergyModel;
use crate::error::{check_positive, check_prob_open, domain, Result};

pub const LOG2E: f64 = std::f64::consts::LOG2_E;
const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_562_869_5e-1;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;

/// Complementary error function, W. J. Cody's rational Chebyshev
/// approximations (three ranges, split at 0.46875 and 4).
pub fn erfc(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.161_123_743_870_565_6e0,
        1.138_641_541_510_501_6e2,
        3.774_852_376_853_020_2e2,
        3.209_377_589_138_469_5e3,
        1.857_777_061_846_031_5e-1,
    ];
    const B: [f64; 4] = [
        2.360_129_095_234_412_1e1,
        2.440_246_379_344_441_7e2,
        1.282_616_526_077_372_3e3,
        2.844_236_833_439_170_6e3,
    ];
    const C: [f64; 9] = [
        5.641_884_969_886_700_9e-1,
        8.883_149_794_388_376e0,
        6.611_919_063_714_163e1,
        2.986_351_381_974_001_3e2,
        8.819_522_212_417_691e2,
        1.712_047_612_634_070_6e3,
        2.051_078_377_826_071_5e3,
        1.230_339_354_797_997_3e3,
        2.153_115_354_744_038_5e-8,
    ];
    const D: [f64; 8] = [
        1.574_492_611_070_983_5e1,
        1.176_939_508_913_125e2,
        5.371_811_018_620_099e2,
        1.621_389_574_566_690_2e3,
        3.290_799_235_733_459_7e3,
        4.362_619_090_143_247e3,
        3.439_367_674_143_721_6e3,
        1.230_339_354_803_749_4e3,
    ];
    const P: [f64; 6] = [
        3.053_266_349_612_323_4e-1,
        3.603_448_999_498_044_4e-1,
        1.257_817_261_112_292_5e-1,
        1.608_378_514_874_227_7e-2,
        6.587_491_615_298_378e-4,
        1.631_538_713_730_209_8e-2,
    ];
    const Q: [f64; 5] = [
        2.568_520_192_289_822_4e0,
        1.872_952_849_923_467_3e0,
        5.279_051_029_514_284e-1,
        6.051_834_131_244_132e-2,
        2.335_204_976_268_691_8e-3,
    ];
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= 0.46875 {
        let ysq = if y > 1.11e-16 { y * y } else { 0.0 };
        let mut num = A[4] * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + A[i]) * ysq;
            den = (den + B[i]) * ysq;
        }
        return 1.0 - x * (num + A[3]) / (den + B[3]);
    }
    let r = if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        scaled_tail(y, (num + C[7]) / (den + D[7]))
    } else if y >= 26.543 {
        0.0
    } else {
        let ysq = 1.0 / (y * y);
        let mut num = P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + P[i]) * ysq;
            den = (den + Q[i]) * ysq;
        }
        let r = ysq * (num + P[4]) / (den + Q[4]);
        scaled_tail(y, (FRAC_1_SQRT_PI - r) / y)
    };
    if x < 0.0 {
        2.0 - r
    } else {
        r
    }
}

// exp(-y^2) * r with the square split to avoid cancellation.
fn scaled_tail(y: f64, r: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * r
}

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Inverse standard normal cdf (Wichura, AS 241, PPND16). Returns
/// `-inf`/`inf` at 0 and 1 and NaN outside `[0,1]`.
pub fn inv_cdf_raw(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608e0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34e0,
        4.630_337_846_156_545_295_9e0,
        5.769_497_221_460_691_405_5e0,
        3.647_848_324_763_204_605_04e0,
        1.270_458_252_452_368_382_58e0,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87e0,
        1.676_384_830_183_803_849_4e0,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2e0,
        5.463_784_911_164_114_369_9e0,
        1.784_826_539_917_291_335_8e0,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];
    fn ratio(c: &[f64; 8], d: &[f64; 8], r: f64) -> f64 {
        let num = c.iter().rev().fold(0.0, |acc, &k| acc * r + k);
        let den = d.iter().rev().fold(0.0, |acc, &k| acc * r + k);
        num / den
    }
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        return q * ratio(&A, &B, 0.180625 - q * q);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let v = if r <= 5.0 {
        ratio(&C, &D, r - 1.6)
    } else {
        ratio(&E, &F, r - 5.0)
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}

pub fn normal_inv_cdf(p: f64) -> Result<f64> {
    check_prob_open("p", p)?;
    Ok(inv_cdf_raw(p))
}

/// Density of the standard normal evaluated at `Φ⁻¹(p)`.
pub fn density_at_quantile(p: f64) -> Result<f64> {
    Ok(normal_pdf(normal_inv_cdf(p)?))
}

/// AWGN capacity `½log₂(1+P)` in bits per channel use.
pub fn capacity(p: f64) -> Result<f64> {
    if !(p >= 0.0 && p.is_finite()) {
        return domain(format!("snr must be nonnegative and finite, got {p}"));
    }
    Ok(capacity_raw(p))
}

pub(crate) fn capacity_raw(p: f64) -> f64 {
    0.5 * p.ln_1p() * LOG2E
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoDensityStats {
    pub mu: f64,
    pub sigma: f64,
    pub tau1: f64,
}

pub fn info_density_stats(p: f64) -> Result<InfoDensityStats> {
    check_positive("snr", p)?;
    Ok(InfoDensityStats {
        mu: capacity_raw(p),
        sigma: (p / (1.0 + p)).sqrt() * LOG2E,
        tau1: tau1(p),
    })
}

fn tau1(p: f64) -> f64 {
    let inner = 15f64.cbrt() * p.sqrt() + 8.0 / PI.sqrt();
    inner.powi(3) / (1.0 + p).powf(1.5)
}

pub fn kappa1(p: f64, eps2: f64) -> Result<f64> {
    check_positive("snr", p)?;
    check_prob_open("eps2", eps2)?;
    let dens = density_at_quantile((eps2 * eps2).min(1.0 - eps2))?;
    Ok((p / (1.0 + p)).sqrt() * (tau1(p) + 1.0) * LOG2E / dens + 1.0)
}

pub fn tau2(model: &EnergyModel, l: u64) -> Result<f64> {
    if l == 0 {
        return domain("coherence time must be at least 1");
    }
    let p = model.mean();
    let den = 2.0 * p * (p + 2.0) / l as f64 + model.m2() - p * p;
    if !(den > 0.0) {
        return domain("tau2 denominator vanishes (P = 0)");
    }
    let num = 15f64.cbrt() * p
        + 2.0 * (2.0 * (2.0 / PI).sqrt()).cbrt() * model.m3half().cbrt()
        + model.m3().cbrt();
    Ok(num.powi(3) / den.powf(1.5))
}

pub fn kappa2(model: &EnergyModel, l: u64, eps: f64) -> Result<f64> {
    check_prob_open("eps", eps)?;
    let t2 = tau2(model, l)?;
    let p = model.mean();
    let lf = l as f64;
    let spread = (2.0 * lf * p * (p + 2.0) + lf * lf * (model.m2() - p * p)).sqrt();
    let dens = density_at_quantile(eps.min(eps * (1.0 - eps)))?;
    Ok(t2 / (1.0 + p) * spread * LOG2E / dens - (t2 * lf.sqrt()).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn capacity_trivial_points() {
        assert_eq!(capacity(1.0).unwrap(), 0.5);
        assert_eq!(capacity(3.0).unwrap(), 1.0);
        assert_eq!(capacity(0.0).unwrap(), 0.0);
        assert!(capacity(-1.0).is_err());
        assert!(capacity(f64::INFINITY).is_err());
        assert!(capacity(f64::NAN).is_err());
    }

    #[test]
    fn normal_symmetry_and_reference() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_eq!(normal_inv_cdf(0.5).unwrap(), 0.0);
        assert!((normal_cdf(-1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((normal_cdf(-1.0) - 0.1586).abs() < 1e-4);
        assert!(normal_inv_cdf(0.0).is_err());
        assert!(normal_inv_cdf(1.0).is_err());
        assert!(normal_inv_cdf(f64::NAN).is_err());
    }

    #[test]
    fn erfc_reference_values() {
        // high-precision references
        let cases = [
            (0.1, 0.887_537_083_981_715_1),
            (1.0, 0.157_299_207_050_285_13),
            (2.5, 4.069_520_174_449_589_4e-4),
            (6.0, 2.151_973_671_249_891_3e-17),
            (-1.0, 1.842_700_792_949_714_9),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!((got - want).abs() <= 1e-15 * want, "erfc({x}) = {got}");
        }
    }

    #[test]
    fn info_density_examples() {
        let s = info_density_stats(1.0).unwrap();
        assert_eq!(s.mu, 0.5);
        assert!(close(s.sigma * s.sigma, 1.040_684_490_502_803_9, 1e-14));
        assert!(close(s.tau1, 120.218_316_135_906_06, 1e-13));
        assert!(info_density_stats(0.0).is_err());
    }

    #[test]
    fn kappa1_examples() {
        assert!(close(kappa1(1.0, 0.5).unwrap(), 390.140_032_872_103_9, 1e-11));
        assert!(close(kappa1(1.0, 0.4).unwrap(), 509.235_178_216_780_6, 1e-11));
        let mut prev = 0.0;
        for i in 0..10 {
            let k = kappa1(1.0, 0.99 + 0.0009 * i as f64).unwrap();
            assert!(k > prev);
            prev = k;
        }
        assert!(kappa1(1.0, 1.0).is_err());
    }

    #[test]
    fn tau2_kappa2_examples() {
        let det = EnergyModel::deterministic(1.0).unwrap();
        assert!(close(tau2(&det, 1).unwrap(), 13.298_793_443_155_11, 1e-13));
        assert!(close(kappa2(&det, 1, 0.5).unwrap(), 70.212_069_244_143_92, 1e-11));
        assert!(tau2(&det, 0).is_err());
        for e in [0.01f64, 0.3, 0.5, 0.9, 0.999] {
            assert_eq!(e.min(e * (1.0 - e)), e * (1.0 - e));
        }
    }

    #[test]
    fn tau2_grows_with_l_for_deterministic_model() {
        // the denominator 2P(P+2)/L shrinks with L when m2 = P^2
        let det = EnergyModel::deterministic(1.0).unwrap();
        let v: Vec<f64> = [1, 2, 4, 8].iter().map(|&l| tau2(&det, l).unwrap()).collect();
        assert!(v.iter().all(|&x| x > 0.0));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
