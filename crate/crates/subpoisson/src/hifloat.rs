//! High-precision floating values with a tracked worst-case relative-error
//! budget.
//!
//! `HiFloat` wraps an arbitrary-precision binary float (astro-float) at a
//! configured precision of at least [`MIN_PRECISION_BITS`] mantissa bits.
//! Every operation rounds at the configured precision and accumulates a
//! conservative bound on the relative error of the result:
//!
//! * multiplication/division add the operand budgets plus one rounding unit,
//! * addition/subtraction scale the operand budgets by the magnitude ratio
//!   `|operand| / |result|` (estimated from binary exponents, so cancellation
//!   is charged for),
//! * `exp` multiplies the argument budget by `|x|`, `ln` divides it by
//!   `|ln x|`.
//!
//! The budget is metadata: inequality checks gate on computed margins and
//! per-check tolerances, and use the budget as a sanity bound. Budgets are
//! tracked in `f64` and clamp to zero below the `f64` subnormal floor.
//!
//! Binary operations never downgrade precision: the result carries
//! `max(lhs.precision(), rhs.precision())` bits.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dec;

/// Minimum mantissa precision accepted for a `HiFloat` (quad-precision
/// equivalent). Constructors clamp smaller requests up to this value.
pub const MIN_PRECISION_BITS: usize = 113;

/// Default working precision.
pub const DEFAULT_PRECISION_BITS: usize = 113;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// 2^e in f64, clamped to [0, inf] on under/overflow.
fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else {
        f64::from_bits(if e >= -1022 {
            ((e + 1023) as u64) << 52
        } else {
            1u64 << (e + 1074) as u64
        })
    }
}

/// Exact power of two at the given precision (used for tolerance defaults).
pub fn pow2_hifloat(e: i64, prec: usize) -> HiFloat {
    let mut v = HiFloat::one(prec);
    let mut rem = e;
    // f64 powers of two are exact within [-1074, 1023]; larger magnitudes
    // compose exactly from chunks
    while rem > 1000 {
        v = v.mul(&HiFloat::from_f64(pow2(1000), prec));
        rem -= 1000;
    }
    while rem < -1000 {
        v = v.mul(&HiFloat::from_f64(pow2(-1000), prec));
        rem += 1000;
    }
    v.mul(&HiFloat::from_f64(pow2(rem), prec))
}

/// High-precision floating value with precision configuration and a
/// worst-case relative-error budget.
#[derive(Debug, Clone)]
pub struct HiFloat {
    v: BigFloat,
    prec: usize,
    err: f64,
}

impl HiFloat {
    fn wrap(v: BigFloat, prec: usize, err: f64) -> Self {
        HiFloat { v, prec, err }
    }

    fn eps(prec: usize) -> f64 {
        pow2(1 - prec.min(1060) as i64)
    }

    pub fn zero(prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(BigFloat::from_u8(0, p), p, 0.0)
    }

    pub fn one(prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(BigFloat::from_u8(1, p), p, 0.0)
    }

    pub fn from_u64(n: u64, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        // u64 fits exactly once p >= 64
        Self::wrap(BigFloat::from_u64(n, p), p, 0.0)
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(BigFloat::from_i64(n, p), p, 0.0)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(BigFloat::from_f64(x, p), p, 0.0)
    }

    /// Exact conversion of a big unsigned integer, then one rounding at the
    /// configured precision.
    pub fn from_biguint(n: &BigUint, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        let limbs = n.to_u64_digits();
        if limbs.is_empty() {
            return Self::zero(p);
        }
        let mut acc = BigFloat::from_u8(0, p + 64);
        for limb in limbs.iter().rev() {
            if !acc.is_zero() {
                let e = acc.exponent().expect("finite accumulator");
                acc.set_exponent(e + 64);
            }
            acc = acc.add(&BigFloat::from_u64(*limb, p + 64), p + 64, RM);
        }
        let mut out = acc;
        out.set_precision(p, RM).expect("precision set");
        Self::wrap(out, p, Self::eps(p))
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        let mag = Self::from_biguint(n.magnitude(), prec);
        if n.sign() == IntSign::Minus {
            -&mag
        } else {
            mag
        }
    }

    /// Exact rational converted with one rounding at the configured
    /// precision.
    pub fn from_rational(r: &BigRational, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        let num = Self::from_bigint(r.numer(), p);
        let den = Self::from_bigint(r.denom(), p);
        num.div(&den)
    }

    pub fn neg_infinity(prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(astro_float::INF_NEG, p, 0.0)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    /// Worst-case relative error accumulated so far.
    pub fn rel_err_bound(&self) -> f64 {
        self.err
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.v.is_positive() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.v.is_inf() || self.v.is_nan())
    }

    fn exp2_of(v: &BigFloat) -> i64 {
        if v.is_zero() {
            i64::MIN / 4
        } else {
            v.exponent().map(|e| e as i64).unwrap_or(0)
        }
    }

    /// Magnitude ratio bound |a| / |r| <= 2^(ea - er + 1), as f64.
    fn mag_ratio(a: &BigFloat, r: &BigFloat) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        if r.is_zero() {
            return f64::INFINITY;
        }
        pow2(Self::exp2_of(a) - Self::exp2_of(r) + 1)
    }

    fn addsub(&self, rhs: &Self, sub: bool) -> Self {
        let p = self.prec.max(rhs.prec);
        let r = if sub {
            self.v.sub(&rhs.v, p, RM)
        } else {
            self.v.add(&rhs.v, p, RM)
        };
        // effective sign of the rhs operand after the subtraction flip
        let rhs_negative = rhs.v.is_negative() != sub;
        let magnitudes_add =
            self.v.is_zero() || rhs.v.is_zero() || (self.v.is_negative() == rhs_negative);
        let err = if magnitudes_add {
            // no cancellation possible: |r| >= max(|a|, |b|)
            self.err + rhs.err + Self::eps(p)
        } else if r.is_zero() && (self.err > 0.0 || rhs.err > 0.0) {
            f64::INFINITY
        } else {
            Self::mag_ratio(&self.v, &r) * self.err
                + Self::mag_ratio(&rhs.v, &r) * rhs.err
                + Self::eps(p)
        };
        Self::wrap(r, p, err)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.addsub(rhs, false)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.addsub(rhs, true)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.prec.max(rhs.prec);
        let r = self.v.mul(&rhs.v, p, RM);
        Self::wrap(r, p, self.err + rhs.err + Self::eps(p))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.v.is_zero(), "HiFloat division by zero");
        let p = self.prec.max(rhs.prec);
        let r = self.v.div(&rhs.v, p, RM);
        Self::wrap(r, p, self.err + rhs.err + Self::eps(p))
    }

    pub fn neg(&self) -> Self {
        Self::wrap(self.v.neg(), self.prec, self.err)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.prec, self.err)
    }

    pub fn recip(&self) -> Self {
        assert!(!self.v.is_zero(), "HiFloat reciprocal of zero");
        let r = self.v.reciprocal(self.prec, RM);
        Self::wrap(r, self.prec, self.err + Self::eps(self.prec))
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        let r = with_consts(|cc| self.v.exp(p, RM, cc));
        assert!(!r.is_nan(), "HiFloat exp produced NaN");
        let xmag = pow2(Self::exp2_of(&self.v));
        Self::wrap(r, p, xmag * self.err + Self::eps(p))
    }

    pub fn ln(&self) -> Self {
        assert!(
            self.v.is_positive() && !self.v.is_zero(),
            "HiFloat ln of non-positive value"
        );
        let p = self.prec;
        let r = with_consts(|cc| self.v.ln(p, RM, cc));
        let err = if r.is_zero() {
            if self.err > 0.0 {
                f64::INFINITY
            } else {
                Self::eps(p)
            }
        } else {
            self.err * pow2(1 - Self::exp2_of(&r)) + Self::eps(p)
        };
        Self::wrap(r, p, err)
    }

    /// ln(1 + self); direct evaluation, the precision headroom absorbs the
    /// cancellation for small arguments.
    pub fn ln_1p(&self) -> Self {
        Self::one(self.prec).add(self).ln()
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.v.is_negative(), "HiFloat sqrt of negative value");
        let r = self.v.sqrt(self.prec, RM);
        Self::wrap(r, self.prec, self.err / 2.0 + Self::eps(self.prec))
    }

    /// self^exponent for positive self, computed as exp(exponent * ln self).
    pub fn pow(&self, exponent: &Self) -> Self {
        if exponent.is_zero() {
            return Self::one(self.prec.max(exponent.prec));
        }
        self.ln().mul(exponent).exp()
    }

    pub fn powi(&self, n: u64) -> Self {
        let p = self.prec;
        let r = self.v.powi(n as usize, p, RM);
        Self::wrap(r, p, (n as f64) * (self.err + Self::eps(p)))
    }

    /// Raise the working precision (never lowers it).
    pub fn with_precision(&self, prec: usize) -> Self {
        if prec <= self.prec {
            return self.clone();
        }
        let mut v = self.v.clone();
        v.set_precision(prec, RM).expect("precision raise");
        Self::wrap(v, prec, self.err)
    }

    pub fn max(&self, rhs: &Self) -> Self {
        if self >= rhs {
            self.clone()
        } else {
            rhs.clone()
        }
    }

    pub fn min(&self, rhs: &Self) -> Self {
        if self <= rhs {
            self.clone()
        } else {
            rhs.clone()
        }
    }

    /// Exact rational value of this float. `None` when not finite.
    pub fn to_rational(&self) -> Option<BigRational> {
        if !self.is_finite() {
            return None;
        }
        if self.v.is_zero() {
            return Some(BigRational::zero());
        }
        let (words, nbits, sign, e, _) = self.v.as_raw_parts()?;
        let mut u32s = Vec::with_capacity(words.len() * 2);
        for w in words {
            u32s.push(*w as u32);
            u32s.push((*w >> 32) as u32);
        }
        let m = BigUint::from_slice(&u32s);
        let shift = e as i64 - nbits as i64;
        let mut r = if shift >= 0 {
            BigRational::from_integer(BigInt::from(m << (shift as usize)))
        } else {
            BigRational::new(
                BigInt::from(m),
                BigInt::from(BigUint::one() << ((-shift) as usize)),
            )
        };
        if sign == Sign::Neg {
            r = -r;
        }
        Some(r)
    }

    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.v.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.v.is_zero() {
            return 0.0;
        }
        let (words, nbits, sign, e, _) = self.v.as_raw_parts().expect("finite value");
        // take the top 64 bits of mantissa
        let top = *words.last().expect("nonzero mantissa");
        let taken = 64.min(nbits);
        let mut x = top as f64; // rounds to 53 bits
        let scale = e as i64 - taken as i64;
        // apply 2^scale in chunks that powi represents exactly
        let mut s = scale;
        while s > 900 {
            x *= pow2(900);
            s -= 900;
            if x.is_infinite() {
                break;
            }
        }
        while s < -900 {
            x *= pow2(-900);
            s += 900;
            if x == 0.0 {
                break;
            }
        }
        x *= pow2(s);
        if sign == Sign::Neg {
            -x
        } else {
            x
        }
    }

    /// Decimal rendering with `sig` significant digits (scientific form).
    pub fn to_decimal_sig(&self, sig: usize) -> String {
        if self.v.is_nan() {
            return "nan".to_string();
        }
        if self.v.is_inf_pos() {
            return "inf".to_string();
        }
        if self.v.is_inf_neg() {
            return "-inf".to_string();
        }
        let r = self.to_rational().expect("finite value");
        dec::format_rational_sig(&r, sig)
    }
}

impl fmt::Display for HiFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_sig(30))
    }
}

impl PartialEq for HiFloat {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.partial_cmp(other), Some(Ordering::Equal))
    }
}

impl PartialOrd for HiFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|s| s.cmp(&0))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait<&HiFloat> for &HiFloat {
            type Output = HiFloat;
            fn $method(self, rhs: &HiFloat) -> HiFloat {
                HiFloat::$inner(self, rhs)
            }
        }
        impl std::ops::$trait<HiFloat> for HiFloat {
            type Output = HiFloat;
            fn $method(self, rhs: HiFloat) -> HiFloat {
                HiFloat::$inner(&self, &rhs)
            }
        }
        impl std::ops::$trait<&HiFloat> for HiFloat {
            type Output = HiFloat;
            fn $method(self, rhs: &HiFloat) -> HiFloat {
                HiFloat::$inner(&self, rhs)
            }
        }
    };
}

impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);
impl_binop!(Div, div, div);

impl std::ops::Neg for &HiFloat {
    type Output = HiFloat;
    fn neg(self) -> HiFloat {
        HiFloat::neg(self)
    }
}

impl std::ops::Neg for HiFloat {
    type Output = HiFloat;
    fn neg(self) -> HiFloat {
        HiFloat::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn hf(x: f64) -> HiFloat {
        HiFloat::from_f64(x, DEFAULT_PRECISION_BITS)
    }

    #[test]
    fn arithmetic_round_trips() {
        let a = hf(1.5);
        let b = hf(0.25);
        assert_eq!((&a + &b).to_f64(), 1.75);
        assert_eq!((&a - &b).to_f64(), 1.25);
        assert_eq!((&a * &b).to_f64(), 0.375);
        assert_eq!((&a / &b).to_f64(), 6.0);
    }

    #[test]
    fn exp_ln_inverse() {
        let x = hf(3.25);
        let y = x.exp().ln();
        let diff = (&y - &x).abs().to_f64();
        assert!(diff < 1e-30, "diff = {diff:e}");
    }

    #[test]
    fn biguint_round_trip() {
        let n = BigUint::parse_bytes(b"123456789012345678901234567890123456789", 10).unwrap();
        let x = HiFloat::from_biguint(&n, 256);
        let r = x.to_rational().unwrap();
        let back = r.to_integer();
        assert_eq!(back.magnitude(), &n);
    }

    #[test]
    fn rational_conversion_exact_dyadic() {
        let r = BigRational::new(BigInt::from(3), BigInt::from(8));
        let x = HiFloat::from_rational(&r, 113);
        assert_eq!(x.to_rational().unwrap(), r);
        assert_eq!(x.to_f64(), 0.375);
    }

    #[test]
    fn decimal_rendering() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = HiFloat::from_rational(&third, 113);
        let s = x.to_decimal_sig(30);
        assert!(s.starts_with("3.3333333333333333333333333333"), "{s}");
        assert!(s.ends_with("e-1"), "{s}");
        assert_eq!(hf(15.0).to_decimal_sig(3), "1.50e1");
        assert_eq!(hf(0.0).to_decimal_sig(30), "0");
        assert_eq!(hf(-2.0).to_decimal_sig(2), "-2.0e0");
    }

    #[test]
    fn error_budget_grows_and_stays_small() {
        let third = hf(1.0) / hf(3.0);
        let start = third.rel_err_bound();
        assert!(start > 0.0 && start < 1e-30);
        // a long same-sign accumulation keeps the budget near N * eps
        let mut acc = HiFloat::zero(DEFAULT_PRECISION_BITS);
        for _ in 0..1000 {
            acc = &acc + &third;
        }
        assert!(acc.rel_err_bound() > start);
        assert!(acc.rel_err_bound() < 1e-28);
    }

    #[test]
    fn cancellation_inflates_budget() {
        let a = hf(1.0) / hf(3.0);
        let b = &a - &hf(1.0 / 3.0); // near-total cancellation
        assert!(b.rel_err_bound() > 1e-20 * a.rel_err_bound() || b.is_zero());
    }

    #[test]
    fn comparisons() {
        assert!(hf(1.0) < hf(2.0));
        assert!(hf(-1.0) < hf(0.0));
        assert_eq!(hf(2.0), hf(2.0));
        assert!(HiFloat::neg_infinity(113) < hf(-1e300));
    }

    #[test]
    fn precision_never_downgrades() {
        let a = HiFloat::from_f64(1.1, 256);
        let b = HiFloat::from_f64(2.2, 113);
        assert_eq!((&a + &b).precision(), 256);
        assert_eq!((&b * &a).precision(), 256);
        assert_eq!(HiFloat::from_f64(0.5, 16).precision(), MIN_PRECISION_BITS);
    }

    #[test]
    fn to_f64_extremes() {
        let big = hf(1e300).powi(4);
        assert!(big.to_f64().is_infinite());
        let tiny = hf(1e-300).powi(4);
        assert_eq!(tiny.to_f64(), 0.0);
        let x = HiFloat::from_rational(
            &BigRational::from_f64(6.02214076e23).unwrap(),
            113,
        );
        assert_eq!(x.to_f64(), 6.02214076e23);
    }
}
