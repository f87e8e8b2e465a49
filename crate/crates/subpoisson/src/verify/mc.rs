//! Seeded, reproducible Monte Carlo estimation of normalized moments.
//!
//! RNG contract: ChaCha12 keyed from the 64-bit seed (via the standard
//! splitmix expansion), one counter stream per worker, so results are
//! reproducible for a fixed (seed, worker count) and workers never overlap.
//! Sampling methods, recorded in the estimate:
//!
//! * Poisson: sequential-search inversion for mu <= 30, Hörmann's PTRS
//!   transformed rejection above;
//! * Binomial: summed Bernoulli draws for n <= 1000; above that,
//!   geometric-gap skipping when np <= 30 and Hörmann's BTRS transformed
//!   rejection otherwise (with the p > 1/2 symmetry reduction);
//! * Bernoulli sums: one uniform per summand.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Distribution;

/// z for a two-sided 99% normal confidence interval.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Poisson sampling switches from inversion to rejection above this mean.
pub const POISSON_INVERSION_MAX_MEAN: f64 = 30.0;

/// Binomial sampling switches away from summed Bernoulli above this n.
pub const BINOMIAL_SUMMED_MAX_N: u64 = 1000;

/// A reproducible Monte Carlo estimate of E (X/mu)^k.
#[derive(Debug, Clone, Serialize)]
pub struct MCEstimate {
    pub distribution: String,
    pub k: u64,
    pub sample_count: u64,
    pub seed: u64,
    pub workers: usize,
    pub rng: String,
    pub sampler: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci99_half_width: f64,
}

fn uniform01(rng: &mut ChaCha12Rng) -> f64 {
    // 53 random bits in [0, 1)
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

fn uniform01_open(rng: &mut ChaCha12Rng) -> f64 {
    // (0, 1], safe under ln
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
}

/// Lanczos ln-gamma (g = 7, n = 9), |rel err| < 1e-13 for x > 0.
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Poisson by sequential-search inversion (mu <= 30).
fn poisson_inversion(rng: &mut ChaCha12Rng, mu: f64) -> u64 {
    let u = uniform01(rng);
    let mut p = (-mu).exp();
    let mut cdf = p;
    let mut k = 0u64;
    let cap = (mu + 60.0 * mu.sqrt() + 120.0) as u64;
    while u > cdf && k < cap {
        k += 1;
        p *= mu / k as f64;
        cdf += p;
    }
    k
}

/// Poisson by Hörmann's PTRS transformed rejection (mu > 10 regime).
fn poisson_ptrs(rng: &mut ChaCha12Rng, mu: f64) -> u64 {
    let b = 0.931 + 2.53 * mu.sqrt();
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    let ln_mu = mu.ln();
    loop {
        let u = uniform01(rng) - 0.5;
        let v = uniform01_open(rng);
        let us = 0.5 - u.abs();
        let kf = ((2.0 * a / us + b) * u + mu + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return kf as u64;
        }
        if kf < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let k = kf;
        if (v * inv_alpha / (a / (us * us) + b)).ln() <= k * ln_mu - mu - ln_gamma(k + 1.0) {
            return k as u64;
        }
    }
}

pub(crate) fn sample_poisson(rng: &mut ChaCha12Rng, mu: f64) -> u64 {
    if mu <= POISSON_INVERSION_MAX_MEAN {
        poisson_inversion(rng, mu)
    } else {
        poisson_ptrs(rng, mu)
    }
}

fn binomial_summed(rng: &mut ChaCha12Rng, n: u64, p: f64) -> u64 {
    let mut count = 0;
    for _ in 0..n {
        if uniform01(rng) < p {
            count += 1;
        }
    }
    count
}

/// Count successes by skipping geometric gaps between them (efficient when
/// np is small).
fn binomial_geometric(rng: &mut ChaCha12Rng, n: u64, p: f64) -> u64 {
    if p >= 1.0 {
        return n;
    }
    let lnq = (1.0 - p).ln(); // < 0
    let mut count = 0u64;
    let mut pos = 0u64;
    loop {
        let gap = (uniform01_open(rng).ln() / lnq).floor() as u64 + 1;
        pos = pos.saturating_add(gap);
        if pos > n {
            return count;
        }
        count += 1;
    }
}

/// Binomial by Hörmann's BTRS transformed rejection; requires p <= 1/2 and
/// np >= 10 (callers reduce by symmetry).
fn binomial_btrs(rng: &mut ChaCha12Rng, n: u64, p: f64) -> u64 {
    let nf = n as f64;
    let q = 1.0 - p;
    let spq = (nf * p * q).sqrt();
    let b = 1.15 + 2.53 * spq;
    let a = -0.0873 + 0.0248 * b + 0.01 * p;
    let c = nf * p + 0.5;
    let v_r = 0.92 - 4.2 / b;
    let alpha = (2.83 + 5.1 / b) * spq;
    let lpq = (p / q).ln();
    let m = ((nf + 1.0) * p).floor();
    let h = ln_gamma(m + 1.0) + ln_gamma(nf - m + 1.0);
    loop {
        let u = uniform01(rng) - 0.5;
        let v = uniform01_open(rng);
        let us = 0.5 - u.abs();
        let kf = ((2.0 * a / us + b) * u + c).floor();
        if kf < 0.0 || kf > nf {
            continue;
        }
        if us >= 0.07 && v <= v_r {
            return kf as u64;
        }
        let accept = (v * alpha / (a / (us * us) + b)).ln()
            <= h - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0) + (kf - m) * lpq;
        if accept {
            return kf as u64;
        }
    }
}

pub(crate) fn sample_binomial(rng: &mut ChaCha12Rng, n: u64, p: f64) -> u64 {
    if n <= BINOMIAL_SUMMED_MAX_N {
        return binomial_summed(rng, n, p);
    }
    // symmetry reduction so the rejection regime sees p <= 1/2
    let (pp, flip) = if p > 0.5 { (1.0 - p, true) } else { (p, false) };
    let np = n as f64 * pp;
    let draw = if np <= 30.0 {
        binomial_geometric(rng, n, pp)
    } else {
        binomial_btrs(rng, n, pp)
    };
    if flip {
        n - draw
    } else {
        draw
    }
}

enum SamplerSpec {
    Poisson { mu: f64 },
    Binomial { n: u64, p: f64 },
    BernoulliSum { probs: Vec<f64> },
}

impl SamplerSpec {
    fn of(dist: &Distribution) -> (Self, String) {
        use num_traits::ToPrimitive;
        match dist {
            Distribution::Poisson { mean } => {
                let mu = mean.to_f64().expect("finite mean");
                let name = if mu <= POISSON_INVERSION_MAX_MEAN {
                    "poisson:inversion"
                } else {
                    "poisson:ptrs"
                };
                (SamplerSpec::Poisson { mu }, name.to_string())
            }
            Distribution::Binomial { trials, p } => {
                let pf = p.to_f64().expect("finite p");
                let name = if *trials <= BINOMIAL_SUMMED_MAX_N {
                    "binomial:summed-bernoulli"
                } else if *trials as f64 * pf.min(1.0 - pf) <= 30.0 {
                    "binomial:geometric-gaps"
                } else {
                    "binomial:btrs"
                };
                (
                    SamplerSpec::Binomial {
                        n: *trials,
                        p: pf,
                    },
                    name.to_string(),
                )
            }
            Distribution::BernoulliSum { probs } => {
                let pf: Vec<f64> = probs
                    .iter()
                    .map(|p| p.to_f64().expect("finite p"))
                    .collect();
                (
                    SamplerSpec::BernoulliSum { probs: pf },
                    "bernoulli-sum:per-summand".to_string(),
                )
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha12Rng) -> u64 {
        match self {
            SamplerSpec::Poisson { mu } => sample_poisson(rng, *mu),
            SamplerSpec::Binomial { n, p } => sample_binomial(rng, *n, *p),
            SamplerSpec::BernoulliSum { probs } => {
                let mut count = 0;
                for p in probs {
                    if uniform01(rng) < *p {
                        count += 1;
                    }
                }
                count
            }
        }
    }
}

/// Sample mean of (X/mu)^k with standard error and 99% CI half-width.
/// Deterministic for fixed (seed, workers); the sample budget is split
/// across workers, each on its own ChaCha12 stream, and partial sums are
/// reduced in worker order.
pub fn monte_carlo_moment(
    dist: &Distribution,
    k: u64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<MCEstimate> {
    use num_traits::ToPrimitive;
    if samples < 1000 {
        return Err(Error::Domain(format!(
            "monte_carlo_moment requires at least 1000 samples, got {samples}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("monte_carlo_moment requires k >= 1".into()));
    }
    let workers = workers.max(1);
    let mu = dist
        .mean()
        .to_f64()
        .ok_or_else(|| Error::Numeric("mean too large for sampling".into()))?;
    let (spec, sampler_name) = SamplerSpec::of(dist);

    let base = samples / workers as u64;
    let extra = samples % workers as u64;
    let partials: Vec<(f64, f64)> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(w as u64);
            let quota = base + u64::from((w as u64) < extra);
            let mut sum = 0.0f64;
            let mut sumsq = 0.0f64;
            for _ in 0..quota {
                let x = spec.draw(&mut rng) as f64;
                let v = (x / mu).powi(k as i32);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq)
        })
        .collect();

    let (mut sum, mut sumsq) = (0.0f64, 0.0f64);
    for (s, sq) in partials {
        sum += s;
        sumsq += sq;
    }
    let n = samples as f64;
    let estimate = sum / n;
    let var = ((sumsq - n * estimate * estimate) / (n - 1.0)).max(0.0);
    let std_error = (var / n).sqrt();
    Ok(MCEstimate {
        distribution: dist.describe(),
        k,
        sample_count: samples,
        seed,
        workers,
        rng: "chacha12(seed_from_u64, stream=worker)".to_string(),
        sampler: sampler_name,
        estimate,
        std_error,
        ci99_half_width: Z_99 * std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn deterministic_distribution_is_exact() {
        let d = Distribution::bernoulli_sum(vec![rat(1, 1), rat(1, 1)]).unwrap();
        let est = monte_carlo_moment(&d, 3, 2000, 7, 4).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.ci99_half_width, 0.0);
    }

    #[test]
    fn reproducible_for_fixed_seed_and_workers() {
        let d = Distribution::poisson(rat(1, 1)).unwrap();
        let a = monte_carlo_moment(&d, 4, 50_000, 42, 4).unwrap();
        let b = monte_carlo_moment(&d, 4, 50_000, 42, 4).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.std_error, b.std_error);
        let c = monte_carlo_moment(&d, 4, 50_000, 43, 4).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn poisson_estimate_near_bell_number() {
        // E X^4 = B_4 = 15 for Poisson(1)
        let d = Distribution::poisson(rat(1, 1)).unwrap();
        let est = monte_carlo_moment(&d, 4, 400_000, 5, 4).unwrap();
        assert!(
            (est.estimate - 15.0).abs() <= 3.5 * est.std_error,
            "estimate {} +- {}",
            est.estimate,
            est.std_error
        );
    }

    #[test]
    fn binomial_estimate_matches_exact() {
        let p = rat(3, 10);
        let d = Distribution::binomial(100, p.clone()).unwrap();
        let exact = crate::exact::binomial_raw_moment(100, &p, 3)
            .unwrap()
            .to_f64()
            .unwrap()
            / 30f64.powi(3);
        let est = monte_carlo_moment(&d, 3, 200_000, 11, 4).unwrap();
        assert!(
            (est.estimate - exact).abs() <= 3.5 * est.std_error,
            "estimate {} exact {exact}",
            est.estimate
        );
    }

    #[test]
    fn large_mu_rejection_sampler_sane() {
        let d = Distribution::poisson(rat(250, 1)).unwrap();
        let est = monte_carlo_moment(&d, 1, 100_000, 3, 4).unwrap();
        assert_eq!(est.sampler, "poisson:ptrs");
        // normalized first moment is 1
        assert!((est.estimate - 1.0).abs() <= 4.0 * est.std_error.max(1e-4));
    }

    #[test]
    fn large_n_binomial_samplers_sane() {
        // geometric-gap regime
        let d = Distribution::binomial(100_000, rat(1, 10_000)).unwrap();
        let est = monte_carlo_moment(&d, 1, 50_000, 9, 4).unwrap();
        assert_eq!(est.sampler, "binomial:geometric-gaps");
        assert!((est.estimate - 1.0).abs() <= 4.5 * est.std_error);
        // BTRS regime, with the symmetry flip
        let d = Distribution::binomial(5000, rat(7, 10)).unwrap();
        let est = monte_carlo_moment(&d, 2, 50_000, 13, 4).unwrap();
        assert_eq!(est.sampler, "binomial:btrs");
        let exact = crate::exact::binomial_raw_moment(5000, &rat(7, 10), 2)
            .unwrap()
            .to_f64()
            .unwrap()
            / 3500f64.powi(2);
        assert!(
            (est.estimate - exact).abs() <= 4.5 * est.std_error,
            "estimate {} exact {exact} se {}",
            est.estimate,
            est.std_error
        );
    }

    #[test]
    fn sample_floor_enforced() {
        let d = Distribution::poisson(rat(1, 1)).unwrap();
        assert!(monte_carlo_moment(&d, 2, 999, 1, 4).is_err());
        assert!(monte_carlo_moment(&d, 0, 5000, 1, 4).is_err());
    }

    #[test]
    fn ln_gamma_accuracy() {
        // against ln(n!) for exact factorials
        let mut lnfact = 0.0f64;
        for n in 1..=170u32 {
            lnfact += (n as f64).ln();
            let lg = ln_gamma(n as f64 + 1.0);
            assert!(
                (lg - lnfact).abs() <= 1e-11 * lnfact.max(1.0),
                "n={n} lg={lg} ref={lnfact}"
            );
        }
    }

    #[test]
    fn ci_coverage_meta_test() {
        // 99% CI contains the exact value in at least 95 of 100 seeds
        let p = rat(3, 10);
        let d = Distribution::binomial(20, p.clone()).unwrap();
        let exact = crate::exact::binomial_raw_moment(20, &p, 3)
            .unwrap()
            .to_f64()
            .unwrap()
            / 6f64.powi(3);
        let mut covered = 0;
        for seed in 0..100u64 {
            let est = monte_carlo_moment(&d, 3, 4000, seed, 2).unwrap();
            if (est.estimate - exact).abs() <= est.ci99_half_width {
                covered += 1;
            }
        }
        assert!(covered >= 95, "coverage {covered}/100");
    }
}
