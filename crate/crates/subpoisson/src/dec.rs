//! Decimal rendering and parsing for exact rationals.
//!
//! Rendering is deterministic: a fixed number of significant digits in
//! scientific form, round-half-to-even at the last digit. Parsing accepts
//! integers, `num/den` rationals, and decimal literals (with optional
//! exponent); decimals are parsed as exact rationals over powers of ten.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

fn pow10(e: usize) -> BigUint {
    BigUint::from(10u32).pow(e as u32)
}

/// Floor of log10(|r|) for nonzero r.
fn log10_floor(r: &BigRational) -> i64 {
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    // initial estimate from bit lengths: log10(x) = bits(x) * log10(2) +/- 1
    let mut e = ((num.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    // adjust until 10^e <= |num/den| < 10^(e+1)
    let ge = |e: i64| -> bool {
        // |num/den| >= 10^e
        if e >= 0 {
            num >= &(den * pow10(e as usize))
        } else {
            num * pow10((-e) as usize) >= *den
        }
    };
    while !ge(e) {
        e -= 1;
    }
    while ge(e + 1) {
        e += 1;
    }
    e
}

/// Format a rational with `sig` significant digits in scientific notation,
/// e.g. `1.4426950408889634073599246810e0`. Zero renders as `"0"`.
pub fn format_rational_sig(r: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    let mut e10 = log10_floor(&a);
    // digits = round(|r| * 10^(sig-1-e10)), round half to even
    let shift = sig as i64 - 1 - e10;
    let (num, den) = if shift >= 0 {
        (
            a.numer().magnitude() * pow10(shift as usize),
            a.denom().magnitude().clone(),
        )
    } else {
        (
            a.numer().magnitude().clone(),
            a.denom().magnitude() * pow10((-shift) as usize),
        )
    };
    let (mut q, rem) = num.div_rem(&den);
    let twice = &rem * 2u32;
    if twice > den || (twice == den && q.is_odd()) {
        q += 1u32;
    }
    let mut digits = q.to_str_radix(10);
    if digits.len() > sig {
        // rounding carried into a new leading digit (all nines)
        debug_assert_eq!(digits.len(), sig + 1);
        digits.truncate(sig);
        e10 += 1;
    }
    debug_assert_eq!(digits.len(), sig);
    let mut out = String::with_capacity(sig + 8);
    if neg {
        out.push('-');
    }
    out.push_str(&digits[..1]);
    if sig > 1 {
        out.push('.');
        out.push_str(&digits[1..]);
    }
    out.push('e');
    out.push_str(&e10.to_string());
    out
}

/// Format an f64 with 17 significant digits (round-trippable).
pub fn format_f64_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    format!("{:.16e}", x)
}

/// Parse an exact rational from `"a/b"`, an integer, or a decimal literal
/// such as `"0.3"` or `"1.25e-3"` (kept exact over powers of ten).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Domain("empty number".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("invalid numerator in '{s}'")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("invalid denominator in '{s}'")))?;
        if den.is_zero() {
            return Err(Error::Domain(format!("zero denominator in '{s}'")));
        }
        return Ok(BigRational::new(num, den));
    }
    // decimal literal: [sign] digits [. digits] [e exp]
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e
                .parse()
                .map_err(|_| Error::Domain(format!("invalid exponent in '{s}'")))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let joined = format!("{int_part}{frac_part}");
    if joined.is_empty() || joined == "-" || joined == "+" {
        return Err(Error::Domain(format!("invalid number '{s}'")));
    }
    let num: BigInt = joined
        .parse()
        .map_err(|_| Error::Domain(format!("invalid number '{s}'")))?;
    let scale = exp - frac_part.len() as i64;
    let r = if scale >= 0 {
        BigRational::from_integer(num * BigInt::from(pow10(scale as usize)))
    } else {
        BigRational::new(num, BigInt::from(pow10((-scale) as usize)))
    };
    Ok(r)
}

/// Parse a probability in (0, 1]; decimals and rationals both accepted.
pub fn parse_probability(s: &str) -> Result<BigRational> {
    let r = parse_rational(s)?;
    if r <= BigRational::zero() || r > BigRational::one() {
        return Err(Error::Domain(format!("probability '{s}' outside (0, 1]")));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn formats_simple_values() {
        assert_eq!(format_rational_sig(&rat(3, 2), 5), "1.5000e0");
        assert_eq!(format_rational_sig(&rat(1, 3), 10), "3.333333333e-1");
        assert_eq!(format_rational_sig(&rat(-15, 1), 3), "-1.50e1");
        assert_eq!(format_rational_sig(&BigRational::zero(), 30), "0");
        assert_eq!(format_rational_sig(&rat(1, 1000), 4), "1.000e-3");
    }

    #[test]
    fn rounding_carry_propagates() {
        // 0.9999 at 3 digits rounds to 1.00e0
        assert_eq!(format_rational_sig(&rat(9999, 10000), 3), "1.00e0");
        // half-to-even: 1.25 at 2 digits -> 1.2, 1.35 at 2 digits -> 1.4
        assert_eq!(format_rational_sig(&rat(125, 100), 2), "1.2e0");
        assert_eq!(format_rational_sig(&rat(135, 100), 2), "1.4e0");
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.3").unwrap(), rat(3, 10));
        assert_eq!(parse_rational("3/10").unwrap(), rat(3, 10));
        assert_eq!(parse_rational("-1.25e-2").unwrap(), rat(-125, 10000));
        assert_eq!(parse_rational("42").unwrap(), rat(42, 1));
        assert_eq!(parse_rational("2e3").unwrap(), rat(2000, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn probability_range_enforced() {
        assert!(parse_probability("0.5").is_ok());
        assert!(parse_probability("1").is_ok());
        assert!(parse_probability("0").is_err());
        assert!(parse_probability("1.1").is_err());
    }

    #[test]
    fn f64_format_round_trips() {
        for &x in &[1.0, -2.5, 1e-300, 6.02214076e23, 0.1] {
            let s = format_f64_sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
