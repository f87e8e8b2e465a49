//! Real-argument Bell numbers and Poisson moments by Dobinski-type
//! summation with certified truncation error.
//!
//! `B_x = e^{-1} sum_{i>=0} i^x / i!` extends the Bell numbers to real
//! x >= 0; with a mean parameter, `e^{-mu} sum_{i>=0} i^x mu^i / i!` is the
//! raw moment `E X^x` of a Poisson(mu) variable at real order x. Terms are
//! summed until they are provably decreasing and a geometric tail bound
//! certifies the truncation error below the requested relative tolerance;
//! the recorded `tail_bound` is that certificate, not a heuristic.
//!
//! The i = 0 term follows the formula as written: 0^0 = 1 (so B_0 = 1) and
//! 0^x = 0 for x > 0. Note `B_x -> 0` as `x -> 0+` only with the i = 0 term
//! excluded; the sum as written jumps to 1 at x = 0 exactly.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hifloat::HiFloat;

/// A certified partial Dobinski sum.
#[derive(Debug, Clone)]
pub struct DobinskiResult {
    /// The (real) series exponent: the Bell argument, or the moment order.
    pub x: HiFloat,
    pub value: HiFloat,
    pub terms_used: usize,
    /// Certified upper bound on the truncation error, on the same scale as
    /// `value` (so `tail_bound <= rel_tol * value`).
    pub tail_bound: HiFloat,
}

struct LnTables {
    ln: Vec<HiFloat>,      // ln[i] = ln(i), index 0 unused
    ln_fact: Vec<HiFloat>, // ln_fact[i] = ln(i!)
}

impl LnTables {
    fn new(prec: usize) -> Self {
        LnTables {
            ln: vec![HiFloat::zero(prec)],
            ln_fact: vec![HiFloat::zero(prec)],
        }
    }

    fn extend_to(&mut self, n: usize, prec: usize) {
        while self.ln.len() <= n {
            let i = self.ln.len();
            let l = HiFloat::from_u64(i as u64, prec).ln();
            self.ln_fact.push(self.ln_fact[i - 1].add(&l));
            self.ln.push(l);
        }
    }
}

thread_local! {
    static LN_CACHE: RefCell<HashMap<usize, LnTables>> = RefCell::new(HashMap::new());
}

fn with_ln_tables<T>(prec: usize, max_i: usize, f: impl FnOnce(&LnTables) -> T) -> T {
    LN_CACHE.with(|cache| {
        let mut map = cache.borrow_mut();
        let tables = map.entry(prec).or_insert_with(|| LnTables::new(prec));
        tables.extend_to(max_i, prec);
        f(tables)
    })
}

fn tol_floor(prec: usize, x_ceil: u64) -> f64 {
    (x_ceil as f64 + 16.0) * (2.0f64).powi(-(prec.min(1000) as i32) - 24)
}

/// Core summation: `e^{-mu} sum_{i>=0} i^x mu^i / i!` with certified
/// relative truncation error `<= rel_tol`.
///
/// Terms are added while the index is below the provable-decrease threshold
/// `max(ceil(x) + 2, ceil(e * mu))` or the geometric tail bound
/// `t_i / (1 - r_i)` (with `r_i = (1 + 1/i)^x mu / (i + 1)`, the exact term
/// ratio, which is decreasing in i) still exceeds `rel_tol` times the
/// partial sum.
fn dobinski_series(x: &HiFloat, mu: &HiFloat, rel_tol: &HiFloat) -> Result<DobinskiResult> {
    let prec = x.precision().max(mu.precision());
    if x.is_negative() {
        return Err(Error::Domain(format!("dobinski requires x >= 0, got {x}")));
    }
    if !mu.is_positive() {
        return Err(Error::Domain(format!("dobinski requires mu > 0, got {mu}")));
    }
    let x_f = x.to_f64();
    let mu_f = mu.to_f64();
    if !x_f.is_finite() || !mu_f.is_finite() {
        return Err(Error::Domain("dobinski arguments out of range".into()));
    }
    let x_ceil = x_f.ceil() as u64;
    let tol_f = rel_tol.to_f64();
    if tol_f.is_nan() || tol_f <= 0.0 || tol_f < tol_floor(prec, x_ceil) {
        return Err(Error::Precision(format!(
            "rel_tol {rel_tol} below the floor for {prec}-bit precision at x = {x_f}"
        )));
    }

    let wp = prec + 32;
    let xw = x.with_precision(wp);
    let muw = mu.with_precision(wp);
    let ln_mu = muw.ln();
    let tol = rel_tol.with_precision(wp);
    let one = HiFloat::one(wp);

    let threshold = std::cmp::max(x_ceil + 2, (std::f64::consts::E * mu_f).ceil() as u64) as usize;
    // seed capacity; extended on demand inside the loop via re-entry
    let mut partial = if x.is_zero() {
        one.clone() // 0^0 = 1
    } else {
        HiFloat::zero(wp)
    };
    let mut i = 1usize;
    let (terms_used, tail_raw) = loop {
        let (term, ratio) = with_ln_tables(wp, i + 1, |t| {
            // t_i = exp(x ln i + i ln mu - ln i!)
            let log_t = &(&(&xw * &t.ln[i]) + &(&HiFloat::from_u64(i as u64, wp) * &ln_mu))
                - &t.ln_fact[i];
            let term = log_t.exp();
            // r_i = (1 + 1/i)^x * mu / (i + 1)
            let ratio = (&t.ln[i + 1] - &t.ln[i])
                .mul(&xw)
                .exp()
                .mul(&muw)
                .div(&HiFloat::from_u64(i as u64 + 1, wp));
            (term, ratio)
        });
        if i >= threshold && ratio < one {
            let tail = &term / &(&one - &ratio);
            if tail <= (&tol * &partial) {
                break (i, tail);
            }
        }
        partial = &partial + &term;
        i += 1;
        if i > 20_000_000 {
            return Err(Error::NonConvergence {
                context: format!("dobinski_series(x={x_f}, mu={mu_f})"),
                last_iterate: partial.to_decimal_sig(30),
                residual: "tail bound never certified".into(),
            });
        }
    };

    let scale = muw.neg().exp(); // e^{-mu}
    let value = (&partial * &scale).with_precision(prec);
    let tail_bound = (&tail_raw * &scale).with_precision(prec);
    Ok(DobinskiResult {
        x: x.clone(),
        value,
        terms_used,
        tail_bound,
    })
}

/// Default cap on the series exponent: beyond this the term count and
/// precision requirements grow quickly, so callers must opt in via the
/// uncapped variants (the CLI requires an explicit precision flag).
pub const DOBINSKI_DEFAULT_X_CAP: f64 = 1e4;

fn check_cap(x: &HiFloat) -> Result<()> {
    if x.to_f64() > DOBINSKI_DEFAULT_X_CAP {
        return Err(Error::Size(format!(
            "series exponent {} exceeds the default cap {DOBINSKI_DEFAULT_X_CAP:e}; \
             use the uncapped variant (CLI: raise --bits explicitly)",
            x.to_decimal_sig(10)
        )));
    }
    Ok(())
}

/// Real-argument Bell number `B_x` by Dobinski's formula, certified to
/// relative truncation error `rel_tol`. Enforces the default x cap.
pub fn bell_dobinski(x: &HiFloat, rel_tol: &HiFloat) -> Result<DobinskiResult> {
    check_cap(x)?;
    dobinski_series(x, &HiFloat::one(x.precision()), rel_tol)
}

/// `bell_dobinski` without the default x cap.
pub fn bell_dobinski_uncapped(x: &HiFloat, rel_tol: &HiFloat) -> Result<DobinskiResult> {
    dobinski_series(x, &HiFloat::one(x.precision()), rel_tol)
}

/// Raw moment `E X^k` of Poisson(mu) at real order `k >= 0`, by the
/// mean-parameter Dobinski series. Enforces the default cap on k.
pub fn poisson_moment_dobinski(
    k: &HiFloat,
    mu: &HiFloat,
    rel_tol: &HiFloat,
) -> Result<DobinskiResult> {
    check_cap(k)?;
    dobinski_series(k, mu, rel_tol)
}

/// `poisson_moment_dobinski` without the default cap.
pub fn poisson_moment_dobinski_uncapped(
    k: &HiFloat,
    mu: &HiFloat,
    rel_tol: &HiFloat,
) -> Result<DobinskiResult> {
    dobinski_series(k, mu, rel_tol)
}

/// Default series tolerance for a precision: 2^(20 - prec), about 1e-28 at
/// 113 bits.
pub fn default_series_tol(prec: usize) -> HiFloat {
    crate::hifloat::pow2_hifloat(20 - prec as i64, prec)
}

/// The Bell-power lower bound `B_{k/mu}^mu` on the normalized Poisson moment
/// `B(k, mu)/mu^k`, computed in log space as `exp(mu ln B_{k/mu})`.
/// Enforces the default Dobinski cap on k/mu.
pub fn bell_power_lower(k: &HiFloat, mu: u64) -> Result<HiFloat> {
    bell_power_core(k, mu, true)
}

/// `bell_power_lower` without the default cap on k/mu.
pub fn bell_power_lower_uncapped(k: &HiFloat, mu: u64) -> Result<HiFloat> {
    bell_power_core(k, mu, false)
}

fn bell_power_core(k: &HiFloat, mu: u64, capped: bool) -> Result<HiFloat> {
    if mu == 0 {
        return Err(Error::Domain("bell_power_lower requires mu >= 1".into()));
    }
    if !k.is_positive() {
        return Err(Error::Domain(format!(
            "bell_power_lower requires k > 0, got {k}"
        )));
    }
    let prec = k.precision();
    let ratio = k.div(&HiFloat::from_u64(mu, prec));
    if capped {
        check_cap(&ratio)?;
    }
    let b = dobinski_series(&ratio, &HiFloat::one(prec), &default_series_tol(prec))?;
    Ok(bell_power_lower_log(&b, mu).exp())
}

/// `mu * ln B_{k/mu}` given an already-computed Dobinski value of `B_{k/mu}`.
pub fn bell_power_lower_log(b: &DobinskiResult, mu: u64) -> HiFloat {
    b.value.ln().mul(&HiFloat::from_u64(mu, b.value.precision()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::hifloat::DEFAULT_PRECISION_BITS as P;
    use num_rational::BigRational;

    fn hf(x: f64) -> HiFloat {
        HiFloat::from_f64(x, P)
    }

    fn tol() -> HiFloat {
        hf(1e-20)
    }

    #[test]
    fn integer_arguments_match_exact_bell_numbers() {
        for k in 0..=25usize {
            let b = bell_dobinski(&hf(k as f64), &tol()).unwrap();
            let exact = HiFloat::from_biguint(&exact::bell_number(k), P);
            let rel = (&(&b.value - &exact) / &exact).abs().to_f64();
            assert!(rel < 1e-12, "k={k} rel={rel:e}");
            assert!(b.tail_bound <= &tol() * &b.value);
            assert!(b.terms_used >= 1);
        }
    }

    #[test]
    fn base_cases() {
        let b0 = bell_dobinski(&hf(0.0), &tol()).unwrap();
        assert!((b0.value.to_f64() - 1.0).abs() < 1e-25);
        let b1 = bell_dobinski(&hf(1.0), &tol()).unwrap();
        assert!((b1.value.to_f64() - 1.0).abs() < 1e-20);
        let b3 = bell_dobinski(&hf(3.0), &tol()).unwrap();
        assert!((b3.value.to_f64() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn dips_below_one_between_zero_and_one() {
        // frozen from an independent 40-digit evaluation of the series
        let b = bell_dobinski(&hf(0.5), &tol()).unwrap();
        assert!((b.value.to_f64() - 0.7731926563792859).abs() < 1e-12);
        assert!(b.value < HiFloat::one(P));
    }

    #[test]
    fn monotone_for_x_at_least_one() {
        let mut prev = bell_dobinski(&hf(1.0), &tol()).unwrap().value;
        for i in 1..=60 {
            let x = 1.0 + (i as f64) * 0.25;
            let cur = bell_dobinski(&hf(x), &tol()).unwrap().value;
            assert!(cur >= prev, "B_x decreased at x={x}");
            prev = cur;
        }
    }

    #[test]
    fn generalized_series_matches_exact_poisson_moments() {
        let mu_rat = BigRational::new(5.into(), 2.into());
        let mu = HiFloat::from_rational(&mu_rat, P);
        for k in 1..=12usize {
            let got = poisson_moment_dobinski(&hf(k as f64), &mu, &tol()).unwrap();
            let exact =
                HiFloat::from_rational(&exact::poisson_raw_moment(&mu_rat, k).unwrap(), P);
            let rel = (&(&got.value - &exact) / &exact).abs().to_f64();
            assert!(rel < 1e-15, "k={k} rel={rel:e}");
        }
    }

    #[test]
    fn bell_power_lower_examples() {
        // (3, 1) -> B_3 = 5
        let v = bell_power_lower(&hf(3.0), 1).unwrap();
        assert!((v.to_f64() - 5.0).abs() < 1e-10);
        // (mu, mu) -> B_1^mu = 1
        let v = bell_power_lower(&hf(7.0), 7).unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-15);
        // (6, 2) -> B_3^2 = 25
        let v = bell_power_lower(&hf(6.0), 2).unwrap();
        assert!((v.to_f64() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn theorem2_holds_on_small_grid() {
        // B(k, mu) / mu^k >= B_{k/mu}^mu (1 - 1e-9)
        let slack = &HiFloat::one(P) - &hf(1e-9);
        for mu in 1u64..=4 {
            let mu_rat = BigRational::from_integer(mu.into());
            for j in 1..=10usize {
                let k = (mu as usize) * j;
                let exact_norm = HiFloat::from_rational(
                    &exact::poisson_raw_moment(&mu_rat, k).unwrap(),
                    P,
                )
                .div(&HiFloat::from_u64(mu, P).powi(k as u64));
                let lower = bell_power_lower(&hf(k as f64), mu).unwrap();
                assert!(
                    exact_norm >= &lower * &slack,
                    "mu={mu} k={k}: {} < {}",
                    exact_norm.to_decimal_sig(20),
                    lower.to_decimal_sig(20)
                );
            }
        }
    }

    #[test]
    fn domain_and_precision_errors() {
        assert!(bell_dobinski(&hf(-1.0), &tol()).is_err());
        assert!(matches!(
            bell_dobinski(&hf(2.0), &hf(1e-60)),
            Err(Error::Precision(_))
        ));
        assert!(bell_power_lower(&hf(3.0), 0).is_err());
        assert!(bell_power_lower(&hf(0.0), 2).is_err());
        assert!(poisson_moment_dobinski(&hf(1.0), &hf(0.0), &tol()).is_err());
    }

    #[test]
    fn default_cap_enforced_with_uncapped_escape() {
        assert!(matches!(
            bell_dobinski(&hf(2e4), &tol()),
            Err(Error::Size(_))
        ));
        // the uncapped variant computes it (coarse tolerance keeps it quick)
        let r = bell_dobinski_uncapped(&HiFloat::from_f64(10_050.0, 113), &hf(1e-10)).unwrap();
        assert!(r.value.is_positive());
        assert!(r.terms_used > 10_050);
    }
}
