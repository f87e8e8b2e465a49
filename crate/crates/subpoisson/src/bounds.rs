//! Closed-form bounds on the normalized moment E (X/mu)^k, evaluated in
//! natural-log space over real k and real mu.
//!
//! Every evaluator returns the log of a bound on E (X/mu)^k; callers add
//! `k ln mu` for raw moments (see [`raw_log_value`]). Log space is canonical
//! because k up to 10^3 overflows any fixed-width float; the raw value is
//! materialized only when the log is below [`VALUE_OVERFLOW_LOG`] in
//! magnitude.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bell_real::{bell_dobinski, default_series_tol};
use crate::error::{Error, Result};
use crate::exact;
use crate::hifloat::HiFloat;
use crate::lambert::lambert_w0_default;

/// Raw values are materialized only when |log_value| is below this.
pub const VALUE_OVERFLOW_LOG: f64 = 700.0;

/// Identifies a bound evaluator. The Latala variants carry the user-supplied
/// constant they were evaluated with (no universal numeric value is established).
#[derive(Debug, Clone, PartialEq)]
pub enum BoundKind {
    Theorem1,
    CorollaryPoly,
    CorollaryExp,
    MgfIntermediate,
    LatalaLower { c: f64 },
    LatalaUpper { big_c: f64 },
    BerendTassa,
    BerendTassaCap,
    PoissonLower,
    BinomialLower,
    BellPowerLower,
    ConjectureLower,
    ConjectureUpper,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundKind::Theorem1 => write!(f, "theorem1"),
            BoundKind::CorollaryPoly => write!(f, "corollary_poly"),
            BoundKind::CorollaryExp => write!(f, "corollary_exp"),
            BoundKind::MgfIntermediate => write!(f, "mgf_intermediate"),
            BoundKind::LatalaLower { c } => write!(f, "latala_lower(c={c})"),
            BoundKind::LatalaUpper { big_c } => write!(f, "latala_upper(C={big_c})"),
            BoundKind::BerendTassa => write!(f, "berend_tassa"),
            BoundKind::BerendTassaCap => write!(f, "berend_tassa_cap"),
            BoundKind::PoissonLower => write!(f, "poisson_lower"),
            BoundKind::BinomialLower => write!(f, "binomial_lower"),
            BoundKind::BellPowerLower => write!(f, "bell_power_lower"),
            BoundKind::ConjectureLower => write!(f, "conjecture_lower"),
            BoundKind::ConjectureUpper => write!(f, "conjecture_upper"),
        }
    }
}

/// Qualifiers attached by `binomial_lower` when the displayed expression
/// leaves its useful regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFlag {
    /// The expression is non-positive: the lower bound is vacuous (0).
    VacuousNonPositive,
    /// k exceeds n, where the exact chain's falling factorial vanishes; the
    /// displayed expression is still evaluated.
    MomentOrderExceedsTrials,
}

/// A bound on the normalized moment: log value always, raw value when
/// representable, plus an optional qualifier flag.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub log_value: HiFloat,
    pub value: Option<HiFloat>,
    pub flag: Option<BoundFlag>,
}

impl BoundResult {
    fn from_log(kind: BoundKind, log_value: HiFloat) -> Self {
        let lf = log_value.to_f64();
        let value = (lf.is_finite() && lf.abs() < VALUE_OVERFLOW_LOG).then(|| log_value.exp());
        BoundResult {
            kind,
            log_value,
            value,
            flag: None,
        }
    }
}

/// Raw-moment log: normalized log plus k ln mu.
pub fn raw_log_value(normalized_log: &HiFloat, k: &HiFloat, mu: &HiFloat) -> HiFloat {
    normalized_log.add(&k.mul(&mu.ln()))
}

fn require_positive(name: &str, v: &HiFloat) -> Result<()> {
    if !v.is_positive() {
        return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

/// The main bound: E (X/mu)^k <= (B / log(1+B))^k with B = k/mu, in log
/// space `k (ln B - ln ln(1+B))`.
pub fn theorem1_bound(k: &HiFloat, mu: &HiFloat) -> Result<BoundResult> {
    require_positive("k", k)?;
    require_positive("mu", mu)?;
    let b = k.div(mu);
    let log = k.mul(&(&b.ln() - &b.ln_1p().ln()));
    Ok(BoundResult::from_log(BoundKind::Theorem1, log))
}

/// The corollary forms: (1 + k/(2 mu))^k and exp(k^2 / (2 mu)).
pub fn corollary_bounds(k: &HiFloat, mu: &HiFloat) -> Result<(BoundResult, BoundResult)> {
    require_positive("k", k)?;
    require_positive("mu", mu)?;
    let prec = k.precision().max(mu.precision());
    let two = HiFloat::from_u64(2, prec);
    let half_b = k.div(&(&two * mu));
    let poly = k.mul(&half_b.ln_1p());
    let exp_form = k.mul(&half_b);
    Ok((
        BoundResult::from_log(BoundKind::CorollaryPoly, poly),
        BoundResult::from_log(BoundKind::CorollaryExp, exp_form),
    ))
}

/// The MGF-route intermediate exp(k f(B)) with f(B) = 1/t + t - 1 - 1/B at
/// the optimal tilt t = W(B).
pub fn mgf_intermediate_bound(k: &HiFloat, mu: &HiFloat) -> Result<BoundResult> {
    require_positive("k", k)?;
    require_positive("mu", mu)?;
    let b = k.div(mu);
    let t = lambert_w0_default(&b)?.w;
    let one = HiFloat::one(b.precision());
    let f = &(&t.recip() + &t) - &(&one + &b.recip());
    Ok(BoundResult::from_log(
        BoundKind::MgfIntermediate,
        k.mul(&f),
    ))
}

/// Latala-shape two-sided bounds (c B / log(1+B))^k and (C B / log(1+B))^k
/// for user-supplied universal constants 0 < c < 1 < C.
pub fn latala_bounds(
    k: &HiFloat,
    mu: &HiFloat,
    c: &HiFloat,
    big_c: &HiFloat,
) -> Result<(BoundResult, BoundResult)> {
    require_positive("k", k)?;
    require_positive("mu", mu)?;
    let one = HiFloat::one(c.precision().max(big_c.precision()));
    if !(c.is_positive() && c < &one && big_c > &one) {
        return Err(Error::Domain(format!(
            "latala constants must satisfy 0 < c < 1 < C, got c = {c}, C = {big_c}"
        )));
    }
    let b = k.div(mu);
    let core = &b.ln() - &b.ln_1p().ln();
    let lower = k.mul(&(&c.ln() + &core));
    let upper = k.mul(&(&big_c.ln() + &core));
    Ok((
        BoundResult::from_log(BoundKind::LatalaLower { c: c.to_f64() }, lower),
        BoundResult::from_log(
            BoundKind::LatalaUpper {
                big_c: big_c.to_f64(),
            },
            upper,
        ),
    ))
}

/// Rosenthal-type bound E X^k <= B_k max{mu, mu^k}, normalized; with
/// `use_cap` the Bell number is replaced by the (0.792 k / log(k+1))^k cap.
pub fn berend_tassa_bound(k: u64, mu: &HiFloat, use_cap: bool) -> Result<BoundResult> {
    if k == 0 {
        return Err(Error::Domain("berend_tassa_bound requires k >= 1".into()));
    }
    require_positive("mu", mu)?;
    let prec = mu.precision();
    let kf = HiFloat::from_u64(k, prec);
    let log_bell = if use_cap {
        let num = HiFloat::from_rational(
            &BigRational::new(BigInt::from(792), BigInt::from(1000)),
            prec,
        )
        .mul(&kf);
        let den = HiFloat::from_u64(k + 1, prec).ln();
        kf.mul(&(&num.ln() - &den.ln()))
    } else {
        HiFloat::from_biguint(&exact::bell_number(k as usize), prec).ln()
    };
    let ln_mu = mu.ln();
    let k_ln_mu = kf.mul(&ln_mu);
    let log_max = ln_mu.max(&k_ln_mu);
    let log = &(&log_bell + &log_max) - &k_ln_mu;
    Ok(BoundResult::from_log(
        if use_cap {
            BoundKind::BerendTassaCap
        } else {
            BoundKind::BerendTassa
        },
        log,
    ))
}

/// Poisson lower bound mu^k (1 + k(k-1)/(2 mu)), normalized:
/// log(1 + k(k-1)/(2 mu)).
pub fn poisson_lower(k: u64, mu: &HiFloat) -> Result<BoundResult> {
    require_positive("mu", mu)?;
    let prec = mu.precision();
    let pairs = HiFloat::from_bigint(&(BigInt::from(k) * BigInt::from(k.saturating_sub(1))), prec);
    let log = pairs.div(&(&HiFloat::from_u64(2, prec) * mu)).ln_1p();
    Ok(BoundResult::from_log(BoundKind::PoissonLower, log))
}

/// Binomial lower bound
/// (np)^k (1 + C(k,2) (1-p)/(np) (1 - C(k,2)/n)), normalized. The inner
/// expression is computed exactly; when it is non-positive the bound is
/// vacuous and flagged, and when k > n (so the exact chain's falling
/// factorial vanishes) the result is flagged but still evaluated.
pub fn binomial_lower(n: u64, p: &BigRational, k: u64, prec: usize) -> Result<BoundResult> {
    if n == 0 {
        return Err(Error::Domain("binomial_lower requires n >= 1".into()));
    }
    if k == 0 {
        return Err(Error::Domain("binomial_lower requires k >= 1".into()));
    }
    if *p <= BigRational::zero() || *p > BigRational::one() {
        return Err(Error::Domain(format!("probability {p} outside (0, 1]")));
    }
    let choose2 = BigRational::from_integer(BigInt::from(k) * BigInt::from(k - 1))
        / BigRational::from_integer(BigInt::from(2));
    let n_rat = BigRational::from_integer(BigInt::from(n));
    let np = &n_rat * p;
    let one = BigRational::one();
    let expr = &one + &choose2 * (&one - p) / &np * (&one - &choose2 / &n_rat);
    let trials_flag = (k > n).then_some(BoundFlag::MomentOrderExceedsTrials);
    if expr <= BigRational::zero() {
        return Ok(BoundResult {
            kind: BoundKind::BinomialLower,
            log_value: HiFloat::neg_infinity(prec),
            value: Some(HiFloat::zero(prec)),
            flag: Some(BoundFlag::VacuousNonPositive),
        });
    }
    let log = HiFloat::from_rational(&expr, prec).ln();
    let mut out = BoundResult::from_log(BoundKind::BinomialLower, log);
    out.flag = trials_flag;
    Ok(out)
}

fn conjecture_core(
    k: &HiFloat,
    mu: &HiFloat,
    capped: bool,
) -> Result<(BoundResult, BoundResult)> {
    require_positive("k", k)?;
    let prec = k.precision().max(mu.precision());
    let one = HiFloat::one(prec);
    if mu < &one {
        return Err(Error::Domain(format!(
            "conjecture_bounds requires mu >= 1 (reversed regime is separate), got {mu}"
        )));
    }
    let tol = default_series_tol(prec);
    let bell = |x: &HiFloat| {
        if capped {
            bell_dobinski(x, &tol)
        } else {
            crate::bell_real::bell_dobinski_uncapped(x, &tol)
        }
    };
    let ratio = k.div(mu);
    let lower = mu.mul(&bell(&ratio)?.value.ln());
    let ratio1 = &ratio + &one;
    let upper = k.div(&ratio1).mul(&bell(&ratio1)?.value.ln());
    Ok((
        BoundResult::from_log(BoundKind::ConjectureLower, lower),
        BoundResult::from_log(BoundKind::ConjectureUpper, upper),
    ))
}

/// The conjectured Bell-number bracket in k-th-power form, for mu >= 1:
/// lower `B_{k/mu}^mu`, upper `B_{k/mu+1}^{k/(k/mu+1)}`, both as logs.
/// Enforces the default Dobinski cap on k/mu.
pub fn conjecture_bounds(k: &HiFloat, mu: &HiFloat) -> Result<(BoundResult, BoundResult)> {
    conjecture_core(k, mu, true)
}

/// `conjecture_bounds` without the default cap on k/mu.
pub fn conjecture_bounds_uncapped(
    k: &HiFloat,
    mu: &HiFloat,
) -> Result<(BoundResult, BoundResult)> {
    conjecture_core(k, mu, false)
}

/// The reversed conjectured inequality for 0 < mu <= 1: `B_{k/mu}^mu` as an
/// upper bound on the normalized moment.
pub fn conjecture_reversed_upper(k: &HiFloat, mu: &HiFloat) -> Result<BoundResult> {
    require_positive("k", k)?;
    require_positive("mu", mu)?;
    let prec = k.precision().max(mu.precision());
    if mu > &HiFloat::one(prec) {
        return Err(Error::Domain(format!(
            "reversed conjecture regime requires mu <= 1, got {mu}"
        )));
    }
    let tol = default_series_tol(prec);
    let ratio = k.div(mu);
    let log = mu.mul(&bell_dobinski(&ratio, &tol)?.value.ln());
    Ok(BoundResult::from_log(BoundKind::ConjectureUpper, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hifloat::DEFAULT_PRECISION_BITS as P;

    fn hf(x: f64) -> HiFloat {
        HiFloat::from_f64(x, P)
    }

    #[test]
    fn theorem1_examples() {
        // (1,1): value 1/ln 2
        let b = theorem1_bound(&hf(1.0), &hf(1.0)).unwrap();
        let v = b.value.unwrap().to_f64();
        assert!((v - 1.0 / 2f64.ln()).abs() < 1e-14, "{v}");
        // k/mu -> 0: log -> 0 from above
        let b = theorem1_bound(&hf(1.0), &hf(1e8)).unwrap();
        let log = b.log_value.to_f64();
        assert!(log > 0.0 && log < 1e-7, "{log:e}");
        // (3,1): (3/ln 4)^3, above the exact Bell value 5
        let b = theorem1_bound(&hf(3.0), &hf(1.0)).unwrap();
        let v = b.value.unwrap().to_f64();
        assert!((v - 10.134384886654556).abs() < 1e-11, "{v}");
        assert!(v >= 5.0);
        assert!(theorem1_bound(&hf(0.0), &hf(1.0)).is_err());
    }

    #[test]
    fn log_value_positive_everywhere() {
        for &k in &[0.01, 0.5, 1.0, 7.3, 500.0] {
            for &mu in &[0.001, 0.1, 1.0, 42.0, 1e6] {
                let b = theorem1_bound(&hf(k), &hf(mu)).unwrap();
                assert!(
                    b.log_value.is_positive(),
                    "log should be > 0 at k={k} mu={mu}"
                );
            }
        }
    }

    #[test]
    fn corollary_examples_and_ordering() {
        let (poly, expf) = corollary_bounds(&hf(1.0), &hf(1.0)).unwrap();
        assert!((poly.value.unwrap().to_f64() - 1.5).abs() < 1e-15);
        assert!((expf.value.unwrap().to_f64() - 0.5f64.exp()).abs() < 1e-15);
        // chain: theorem1 <= poly <= exp on a grid
        for &k in &[0.5, 1.0, 3.0, 10.0, 80.0] {
            for &mu in &[0.2, 1.0, 9.0, 1e4] {
                let t1 = theorem1_bound(&hf(k), &hf(mu)).unwrap().log_value;
                let (p, e) = corollary_bounds(&hf(k), &hf(mu)).unwrap();
                assert!(t1 <= p.log_value.add(&hf(1e-25)), "k={k} mu={mu}");
                assert!(p.log_value <= e.log_value.add(&hf(1e-25)), "k={k} mu={mu}");
            }
        }
    }

    #[test]
    fn mgf_intermediate_examples() {
        // B = e gives t = 1 and f = 1 - 1/e
        let k = hf(4.0);
        let mu = k.div(&HiFloat::one(P).exp()); // so k/mu = e
        let b = mgf_intermediate_bound(&k, &mu).unwrap();
        let expected = 4.0 * (1.0 - (-1.0f64).exp());
        assert!((b.log_value.to_f64() - expected).abs() < 1e-13);
        // proof-chain ordering at (3,1)
        let m = mgf_intermediate_bound(&hf(3.0), &hf(1.0)).unwrap();
        let t1 = theorem1_bound(&hf(3.0), &hf(1.0)).unwrap();
        assert!(m.log_value <= t1.log_value);
        // B -> 0: |k f(B)| < 1e-7 k at B = 1e-8
        let b = mgf_intermediate_bound(&hf(2.0), &hf(2e8)).unwrap();
        assert!(b.log_value.abs().to_f64() < 2.0 * 1e-7);
    }

    #[test]
    fn latala_examples() {
        let (lo, hi) = latala_bounds(&hf(3.0), &hf(1.0), &hf(0.5), &hf(2.0)).unwrap();
        let t1 = theorem1_bound(&hf(3.0), &hf(1.0)).unwrap();
        // upper / theorem1 = C^k exactly in log space
        let gap = (&hi.log_value - &t1.log_value).to_f64();
        assert!((gap - 3.0 * 2f64.ln()).abs() < 1e-13);
        let gap_lo = (&t1.log_value - &lo.log_value).to_f64();
        assert!((gap_lo - 3.0 * 2f64.ln()).abs() < 1e-13);
        // direct values: (c 3/ln4)^3 and (C 3/ln4)^3
        assert!((lo.value.unwrap().to_f64() - 1.2667981108318195).abs() < 1e-12);
        assert!((hi.value.unwrap().to_f64() - 81.07507909323645).abs() < 1e-10);
        assert!(latala_bounds(&hf(3.0), &hf(1.0), &hf(1.5), &hf(2.0)).is_err());
        assert!(latala_bounds(&hf(3.0), &hf(1.0), &hf(0.5), &hf(0.9)).is_err());
    }

    #[test]
    fn berend_tassa_examples() {
        // mu = 1: bound equals B_k exactly (the tight case)
        for k in 1..=12u64 {
            let b = berend_tassa_bound(k, &hf(1.0), false).unwrap();
            let bell = HiFloat::from_biguint(&exact::bell_number(k as usize), P);
            let rel = (&(&b.value.unwrap() - &bell) / &bell).abs().to_f64();
            assert!(rel < 1e-25, "k={k} rel={rel:e}");
        }
        // cap at k = 3: (0.792*3/ln 4)^3, above B_3 = 5
        let b = berend_tassa_bound(3, &hf(1.0), true).unwrap();
        let v = b.value.unwrap().to_f64();
        assert!((v - 5.034692362821647).abs() < 1e-12, "{v}");
        assert!(v >= 5.0);
        // (2, 1/2): B_2 max{1/2, 1/4} / (1/4) = 4
        let b = berend_tassa_bound(2, &hf(0.5), false).unwrap();
        assert!((b.value.unwrap().to_f64() - 4.0).abs() < 1e-25);
        assert!(berend_tassa_bound(0, &hf(1.0), false).is_err());
    }

    #[test]
    fn poisson_lower_examples() {
        let b = poisson_lower(1, &hf(3.7)).unwrap();
        assert_eq!(b.log_value.to_f64(), 0.0);
        let b = poisson_lower(3, &hf(1.0)).unwrap();
        assert!((b.value.unwrap().to_f64() - 4.0).abs() < 1e-25);
        let b = poisson_lower(10, &hf(1e4)).unwrap();
        assert!((b.value.unwrap().to_f64() - 1.0045).abs() < 1e-12);
    }

    #[test]
    fn binomial_lower_examples() {
        let half = BigRational::new(1.into(), 2.into());
        // k = 1 -> 1
        let b = binomial_lower(10, &half, 1, P).unwrap();
        assert_eq!(b.log_value.to_f64(), 0.0);
        assert!(b.flag.is_none());
        // (10, 1/2, 2) -> 1.09
        let b = binomial_lower(10, &half, 2, P).unwrap();
        assert!((b.value.unwrap().to_f64() - 1.09).abs() < 1e-14);
        // p = 1 -> 1
        let b = binomial_lower(10, &BigRational::one(), 4, P).unwrap();
        assert_eq!(b.log_value.to_f64(), 0.0);
        // vacuous: n = 3, k = 4, p = 1/2 gives 1 + 2*(-1) = -1
        let b = binomial_lower(3, &half, 4, P).unwrap();
        assert_eq!(b.flag, Some(BoundFlag::VacuousNonPositive));
        assert!(!b.log_value.is_finite());
        assert!(b.value.unwrap().is_zero());
        // k > n with the expression still positive (p = 1 kills the
        // correction term): flagged but evaluated
        let b = binomial_lower(2, &BigRational::one(), 3, P).unwrap();
        assert_eq!(b.flag, Some(BoundFlag::MomentOrderExceedsTrials));
        assert_eq!(b.log_value.to_f64(), 0.0);
        // k > n with a non-positive expression: the vacuous flag wins
        let b = binomial_lower(10, &half, 11, P).unwrap();
        assert_eq!(b.flag, Some(BoundFlag::VacuousNonPositive));
    }

    #[test]
    fn conjecture_bracket_examples() {
        // (3, 1): 5 <= B_3 <= 15^(3/4)
        let (lo, hi) = conjecture_bounds(&hf(3.0), &hf(1.0)).unwrap();
        assert!((lo.value.unwrap().to_f64() - 5.0).abs() < 1e-10);
        assert!((hi.value.unwrap().to_f64() - 15f64.powf(0.75)).abs() < 1e-10);
        // (6, 2): lower 25, upper 15^1.5, exact between: 2430/64 = 37.97
        let (lo, hi) = conjecture_bounds(&hf(6.0), &hf(2.0)).unwrap();
        let exact_norm = 2430.0 / 64.0;
        assert!((lo.value.as_ref().unwrap().to_f64() - 25.0).abs() < 1e-9);
        assert!((hi.value.as_ref().unwrap().to_f64() - 15f64.powf(1.5)).abs() < 1e-9);
        assert!(lo.value.unwrap().to_f64() <= exact_norm);
        assert!(exact_norm <= hi.value.unwrap().to_f64());
        assert!(conjecture_bounds(&hf(3.0), &hf(0.5)).is_err());
        // reversed regime evaluator
        let r = conjecture_reversed_upper(&hf(1.0), &hf(0.5)).unwrap();
        // B_2^(1/2) squared-form: log = 0.5 ln B_2 = 0.5 ln 2
        assert!((r.log_value.to_f64() - 0.5 * 2f64.ln()).abs() < 1e-12);
        assert!(conjecture_reversed_upper(&hf(1.0), &hf(2.0)).is_err());
    }

    #[test]
    fn conjectured_upper_drops_below_mgf_for_large_ratio() {
        // the conjectured upper crosses under the MGF intermediate for
        // k/mu beyond about 40; existence check at k/mu = 60
        let k = hf(60.0);
        let mu = hf(1.0);
        let (_, up) = conjecture_bounds(&k, &mu).unwrap();
        let mgf = mgf_intermediate_bound(&k, &mu).unwrap();
        assert!(
            up.log_value < mgf.log_value,
            "up={} mgf={}",
            up.log_value.to_decimal_sig(20),
            mgf.log_value.to_decimal_sig(20)
        );
        // and stays above it for small ratios
        let k = hf(2.0);
        let (_, up) = conjecture_bounds(&k, &mu).unwrap();
        let mgf = mgf_intermediate_bound(&k, &mu).unwrap();
        assert!(up.log_value > mgf.log_value);
    }

    #[test]
    fn bound_ordering_across_ratio_range() {
        // mgf intermediate <= theorem1 <= corollary poly <= corollary exp
        // over k/mu spanning [1e-4, 1e4]
        let k = hf(2.0);
        for i in 0..=40 {
            let ratio = 10f64.powf(-4.0 + 8.0 * (i as f64) / 40.0);
            let mu = hf(2.0 / ratio);
            let m = mgf_intermediate_bound(&k, &mu).unwrap().log_value;
            let t1 = theorem1_bound(&k, &mu).unwrap().log_value;
            let (p, e) = corollary_bounds(&k, &mu).unwrap();
            let slack = hf(1e-25);
            assert!(m <= t1.add(&slack), "ratio={ratio}");
            assert!(t1 <= p.log_value.add(&slack), "ratio={ratio}");
            assert!(p.log_value <= e.log_value.add(&slack), "ratio={ratio}");
        }
    }

    #[test]
    fn raw_wrapper_adds_k_log_mu() {
        let k = hf(3.0);
        let mu = hf(2.0);
        let b = theorem1_bound(&k, &mu).unwrap();
        let raw = raw_log_value(&b.log_value, &k, &mu);
        let expected = b.log_value.to_f64() + 3.0 * 2f64.ln();
        assert!((raw.to_f64() - expected).abs() < 1e-13);
    }

    #[test]
    fn overflow_marker() {
        let b = theorem1_bound(&hf(1000.0), &hf(0.001)).unwrap();
        assert!(b.value.is_none(), "log={}", b.log_value.to_f64());
        assert!(b.log_value.is_finite());
    }
}
