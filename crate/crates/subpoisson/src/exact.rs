//! Exact raw, factorial, and Bell-polynomial moments in arbitrary-precision
//! rational arithmetic.
//!
//! Raw moments of a Binomial variable expand over Stirling numbers of the
//! second kind and falling factorials,
//! `E X^k = sum_i S(k,i) n^(i-falling) p^i`; Poisson raw moments are the
//! Bell (Touchard) polynomial values `B(k, mu) = sum_i S(k,i) mu^i`. All
//! results here are exact rationals; only integer moment orders are handled
//! (real orders live in the bound evaluators and the Dobinski summation).

use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational scalar (canonical reduced form;
/// equality is value equality).
pub type ExactScalar = BigRational;

/// Default cap on BernoulliSum length; the sum-distribution DP is polynomial,
/// the cap only guards pathological inputs.
pub const BERNOULLI_SUM_LEN_CAP: usize = 20;

const DEFAULT_MAX_K: usize = 64;

/// Triangular table of Stirling numbers of the second kind, S(k, i) for
/// 0 <= i <= k <= max_k, built by the standard recurrence
/// S(k, i) = i * S(k-1, i) + S(k-1, i-1).
#[derive(Debug)]
pub struct StirlingTable {
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    pub fn with_max_k(max_k: usize) -> Self {
        let mut t = StirlingTable { rows: Vec::new() };
        t.extend_to(max_k);
        t
    }

    pub fn max_k(&self) -> usize {
        self.rows.len() - 1
    }

    fn extend_to(&mut self, max_k: usize) {
        if self.rows.is_empty() {
            self.rows.push(vec![BigUint::one()]); // S(0,0) = 1
        }
        while self.rows.len() <= max_k {
            let k = self.rows.len();
            let prev = &self.rows[k - 1];
            let mut row = Vec::with_capacity(k + 1);
            row.push(BigUint::zero()); // S(k, 0) = 0 for k >= 1
            for i in 1..k {
                row.push(&prev[i] * BigUint::from(i) + &prev[i - 1]);
            }
            row.push(BigUint::one()); // S(k, k) = 1
            self.rows.push(row);
        }
    }

    pub fn get(&self, k: usize, i: usize) -> Result<&BigUint> {
        if i > k {
            return Err(Error::Domain(format!(
                "stirling2({k}, {i}): requires i <= k"
            )));
        }
        Ok(&self.rows[k][i])
    }

    /// Row sum: the k-th Bell number.
    pub fn bell(&self, k: usize) -> BigUint {
        self.rows[k].iter().sum()
    }
}

static TABLE: RwLock<Option<StirlingTable>> = RwLock::new(None);

/// Run `f` against the shared Stirling table, extending it first if needed.
/// Concurrent readers share the lock; extension is serialized.
fn with_table<T>(min_k: usize, f: impl FnOnce(&StirlingTable) -> T) -> T {
    {
        let guard = TABLE.read().expect("stirling table lock");
        if let Some(t) = guard.as_ref() {
            if t.max_k() >= min_k {
                return f(t);
            }
        }
    }
    let mut guard = TABLE.write().expect("stirling table lock");
    let t = guard.get_or_insert_with(|| StirlingTable::with_max_k(DEFAULT_MAX_K));
    if t.max_k() < min_k {
        t.extend_to(min_k.max(DEFAULT_MAX_K));
    }
    f(t)
}

/// Stirling number of the second kind S(k, i), memoized in a shared table.
pub fn stirling2(k: usize, i: usize) -> Result<BigUint> {
    if i > k {
        return Err(Error::Domain(format!(
            "stirling2({k}, {i}): requires i <= k"
        )));
    }
    Ok(with_table(k, |t| t.rows[k][i].clone()))
}

/// Falling factorial n(n-1)...(n-k+1); the empty product (k = 0) is 1.
pub fn falling_factorial(n: &BigInt, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut factor = n.clone();
    for _ in 0..k {
        if factor.is_zero() {
            return BigInt::zero();
        }
        acc *= &factor;
        factor -= 1;
    }
    acc
}

fn check_probability(p: &BigRational) -> Result<()> {
    if *p <= BigRational::zero() || *p > BigRational::one() {
        return Err(Error::Domain(format!(
            "success probability {p} outside (0, 1]"
        )));
    }
    Ok(())
}

/// Exact E X^k for X ~ Binomial(n, p), via the Stirling expansion.
pub fn binomial_raw_moment(n: u64, p: &BigRational, k: usize) -> Result<ExactScalar> {
    if n == 0 {
        return Err(Error::Domain("binomial requires n >= 1".into()));
    }
    check_probability(p)?;
    let n_int = BigInt::from(n);
    Ok(with_table(k, |t| {
        let mut acc = BigRational::zero();
        let mut p_pow = BigRational::one();
        for i in 0..=k {
            let s = &t.rows[k][i];
            if !s.is_zero() {
                let ff = falling_factorial(&n_int, i as u64);
                acc += BigRational::from_integer(BigInt::from(s.clone()) * ff) * &p_pow;
            }
            p_pow *= p;
        }
        acc
    }))
}

/// Exact E X^k for X ~ Poisson(mu): the Bell polynomial B(k, mu).
pub fn poisson_raw_moment(mu: &BigRational, k: usize) -> Result<ExactScalar> {
    if *mu <= BigRational::zero() {
        return Err(Error::Domain(format!("poisson mean {mu} must be > 0")));
    }
    Ok(with_table(k, |t| {
        let mut acc = BigRational::zero();
        let mut mu_pow = BigRational::one();
        for i in 0..=k {
            let s = &t.rows[k][i];
            if !s.is_zero() {
                acc += BigRational::from_integer(BigInt::from(s.clone())) * &mu_pow;
            }
            mu_pow *= mu;
        }
        acc
    }))
}

/// Exact factorial moment E X^(k-falling) = n^(k-falling) p^k for
/// X ~ Binomial(n, p).
pub fn binomial_factorial_moment(n: u64, p: &BigRational, k: usize) -> Result<ExactScalar> {
    if n == 0 {
        return Err(Error::Domain("binomial requires n >= 1".into()));
    }
    check_probability(p)?;
    let ff = falling_factorial(&BigInt::from(n), k as u64);
    let mut p_pow = BigRational::one();
    for _ in 0..k {
        p_pow *= p;
    }
    Ok(BigRational::from_integer(ff) * p_pow)
}

/// k-th Bell number (row sum of the Stirling triangle).
pub fn bell_number(k: usize) -> BigUint {
    with_table(k, |t| t.bell(k))
}

/// Probability mass of the sum of independent Bernoulli(p_i) variables,
/// by dynamic programming; index j holds P(S = j).
pub fn bernoulli_sum_pmf(probs: &[BigRational]) -> Result<Vec<BigRational>> {
    if probs.is_empty() {
        return Err(Error::Domain("bernoulli sum requires at least one summand".into()));
    }
    for p in probs {
        check_probability(p)?;
    }
    let mut pmf = vec![BigRational::one()];
    for p in probs {
        let q = BigRational::one() - p;
        let mut next = vec![BigRational::zero(); pmf.len() + 1];
        for (j, mass) in pmf.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            next[j] += mass * &q;
            next[j + 1] += mass * p;
        }
        pmf = next;
    }
    Ok(pmf)
}

/// Exact E (sum X_i)^k for independent Bernoulli(p_i) summands, with the
/// default length cap.
pub fn bernoulli_sum_raw_moment(probs: &[BigRational], k: usize) -> Result<ExactScalar> {
    bernoulli_sum_raw_moment_capped(probs, k, BERNOULLI_SUM_LEN_CAP)
}

pub fn bernoulli_sum_raw_moment_capped(
    probs: &[BigRational],
    k: usize,
    len_cap: usize,
) -> Result<ExactScalar> {
    if probs.len() > len_cap {
        return Err(Error::Size(format!(
            "bernoulli sum length {} exceeds cap {len_cap}",
            probs.len()
        )));
    }
    if k == 0 {
        // E X^0 = 1 by convention, including the mass at zero
        for p in probs {
            check_probability(p)?;
        }
        return Ok(BigRational::one());
    }
    let pmf = bernoulli_sum_pmf(probs)?;
    let mut acc = BigRational::zero();
    for (j, mass) in pmf.iter().enumerate().skip(1) {
        if !mass.is_zero() {
            acc += mass * BigRational::from_integer(BigInt::from(j).pow(k as u32));
        }
    }
    Ok(acc)
}

/// A distribution with exactly computable moments: Poisson, Binomial, or a
/// sum of independent Bernoulli variables with distinct probabilities.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Poisson { mean: BigRational },
    Binomial { trials: u64, p: BigRational },
    BernoulliSum { probs: Vec<BigRational> },
}

impl Distribution {
    pub fn poisson(mean: BigRational) -> Result<Self> {
        if mean <= BigRational::zero() {
            return Err(Error::Domain(format!("poisson mean {mean} must be > 0")));
        }
        Ok(Distribution::Poisson { mean })
    }

    pub fn binomial(trials: u64, p: BigRational) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Domain("binomial requires n >= 1".into()));
        }
        check_probability(&p)?;
        Ok(Distribution::Binomial { trials, p })
    }

    pub fn bernoulli_sum(probs: Vec<BigRational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("bernoulli sum requires at least one summand".into()));
        }
        for p in &probs {
            check_probability(p)?;
        }
        Ok(Distribution::BernoulliSum { probs })
    }

    /// Exact mean: mu, n*p, or sum of p_i. Always > 0.
    pub fn mean(&self) -> BigRational {
        match self {
            Distribution::Poisson { mean } => mean.clone(),
            Distribution::Binomial { trials, p } => {
                BigRational::from_integer(BigInt::from(*trials)) * p
            }
            Distribution::BernoulliSum { probs } => probs.iter().sum(),
        }
    }

    /// Exact raw moment E X^k.
    pub fn raw_moment(&self, k: usize) -> Result<ExactScalar> {
        match self {
            Distribution::Poisson { mean } => poisson_raw_moment(mean, k),
            Distribution::Binomial { trials, p } => binomial_raw_moment(*trials, p, k),
            Distribution::BernoulliSum { probs } => bernoulli_sum_raw_moment(probs, k),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Distribution::Poisson { mean } => format!("poisson(mu={mean})"),
            Distribution::Binomial { trials, p } => format!("binomial(n={trials}, p={p})"),
            Distribution::BernoulliSum { probs } => {
                let parts: Vec<String> = probs.iter().map(|p| p.to_string()).collect();
                format!("bernoulli_sum([{}])", parts.join(", "))
            }
        }
    }
}
