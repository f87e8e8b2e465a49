//! Principal-branch Lambert-W evaluation for x >= 0 with certified residual,
//! plus the Hoorfar–Hassani upper bound on e^W(x).
//!
//! W is the inverse of w -> w e^w; only the principal branch for x >= 0 is
//! implemented. The iterate is certified by its residual |w e^w - x| / x,
//! never by trust in the iteration: callers read `WValue::residual`.

use crate::error::{Error, Result};
use crate::hifloat::HiFloat;

/// Iteration cap for the Halley refinement.
const MAX_ITERATIONS: usize = 100;

/// A certified Lambert-W value: `w` with relative residual
/// `|w e^w - x| / x` at the evaluation precision.
#[derive(Debug, Clone)]
pub struct WValue {
    pub x: HiFloat,
    pub w: HiFloat,
    pub residual: HiFloat,
}

/// Default residual tolerance for a given precision: 2^(13 - prec), about
/// 1e-30 at 113 bits.
pub fn default_rel_tol(prec: usize) -> HiFloat {
    crate::hifloat::pow2_hifloat(13 - prec as i64, prec)
}

/// Smallest certifiable residual tolerance at a precision (a few ulps).
fn tol_floor(prec: usize) -> f64 {
    (2.0f64).powi(-(prec.min(1000) as i32) + 4)
}

/// One Halley step on f(w) = w e^w - x in f64, used to refine the initial
/// guess cheaply before switching to full precision.
fn halley_step_f64(w: f64, x: f64) -> f64 {
    let ew = w.exp();
    let f = w * ew - x;
    let w1 = w + 1.0;
    let denom = w1 * ew - (w + 2.0) * f / (2.0 * w1);
    w - f / denom
}

/// Initial guess per the staged scheme: `x` for x < 1, `ln x - ln ln x` for
/// x >= e, their (equal) endpoint value 1 in between; then a few f64 Halley
/// steps. The full-precision loop needs only 1-2 further steps from here.
fn initial_guess_f64(x: f64) -> f64 {
    let mut w = if x < 1.0 {
        x
    } else if x < std::f64::consts::E {
        1.0
    } else {
        let lx = x.ln();
        lx - lx.ln()
    };
    for _ in 0..6 {
        let next = halley_step_f64(w, x);
        if !next.is_finite() || next <= 0.0 {
            break;
        }
        if (next - w).abs() <= 1e-16 * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    w.max(f64::MIN_POSITIVE)
}

/// Principal-branch W(x) for x >= 0, certified to `|w e^w - x| <= rel_tol * x`.
///
/// Initial guess: `x` for x < 1, `ln x - ln ln x` for x >= e, and the blend
/// of the two endpoint guesses (both equal 1) in between, refined by a few
/// f64 Halley steps; then Halley steps on f(w) = w e^w - x at full working
/// precision (32 guard bits). The returned value and residual are at the
/// argument's precision; the residual, not the iteration, is the
/// certificate.
pub fn lambert_w0(x: &HiFloat, rel_tol: &HiFloat) -> Result<WValue> {
    let prec = x.precision();
    if x.is_negative() {
        return Err(Error::Domain(format!(
            "lambert_w0 requires x >= 0, got {x}"
        )));
    }
    if rel_tol.to_f64() < tol_floor(prec) {
        return Err(Error::Precision(format!(
            "rel_tol {rel_tol} below the floor for {prec}-bit precision"
        )));
    }
    if x.is_zero() {
        return Ok(WValue {
            x: x.clone(),
            w: HiFloat::zero(prec),
            residual: HiFloat::zero(prec),
        });
    }

    let wp = prec + 32;
    let xw = x.with_precision(wp);
    let one = HiFloat::one(wp);
    let two = HiFloat::from_u64(2, wp);

    let x_f = x.to_f64();
    let mut w = if x_f.is_finite() && x_f > 0.0 {
        HiFloat::from_f64(initial_guess_f64(x_f), wp)
    } else if xw < one {
        xw.clone()
    } else {
        let lx = xw.ln();
        let lls = lx.ln();
        if lls.is_positive() {
            &lx - &lls
        } else {
            one.clone()
        }
    };

    let tol_x = &rel_tol.with_precision(wp).abs() * &xw;
    let mut residual = HiFloat::zero(wp);
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = &(&w * &ew) - &xw;
        residual = f.abs();
        if residual <= tol_x {
            converged = true;
            break;
        }
        // Halley: w -= f / ((w+1) e^w - (w+2) f / (2 (w+1)))
        let w1 = &w + &one;
        let denom = &(&w1 * &ew) - &(&(&(&w + &two) * &f) / &(&two * &w1));
        w = &w - &(&f / &denom);
        if w.is_negative() {
            // keep the iterate in the principal-branch domain
            w = HiFloat::from_f64(f64::MIN_POSITIVE, wp);
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            context: format!("lambert_w0({})", x.to_decimal_sig(20)),
            last_iterate: w.to_decimal_sig(30),
            residual: (&residual / &xw).to_decimal_sig(10),
        });
    }
    let rel_residual = &residual / &xw;
    Ok(WValue {
        x: x.clone(),
        w: w.with_precision(prec),
        residual: rel_residual.with_precision(prec),
    })
}

/// W(x) with the default tolerance for the argument's precision.
pub fn lambert_w0_default(x: &HiFloat) -> Result<WValue> {
    lambert_w0(x, &default_rel_tol(x.precision()))
}

/// e^W(x), computed as x / W(x) for x > 0 (1 at x = 0).
pub fn exp_w(x: &HiFloat) -> Result<HiFloat> {
    if x.is_negative() {
        return Err(Error::Domain(format!("exp_w requires x >= 0, got {x}")));
    }
    if x.is_zero() {
        return Ok(HiFloat::one(x.precision()));
    }
    let wv = lambert_w0_default(x)?;
    Ok(x.div(&wv.w))
}

/// Hoorfar–Hassani upper bound on e^W(x): (x + y) / (1 + ln y), valid for
/// y > 1/e and x + y > 0; equality at y = e^W(x).
pub fn hoorfar_hassani_upper(x: &HiFloat, y: &HiFloat) -> Result<HiFloat> {
    let prec = x.precision().max(y.precision());
    let one = HiFloat::one(prec);
    let inv_e = one.exp().recip();
    if y <= &inv_e {
        return Err(Error::Domain(format!(
            "hoorfar_hassani_upper requires y > 1/e, got y = {y}"
        )));
    }
    let sum = x.add(y);
    if !sum.is_positive() {
        return Err(Error::Domain(format!(
            "hoorfar_hassani_upper requires x + y > 0, got {}",
            sum.to_decimal_sig(10)
        )));
    }
    Ok(&sum / &(&one + &y.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hifloat::DEFAULT_PRECISION_BITS as P;

    fn hf(x: f64) -> HiFloat {
        HiFloat::from_f64(x, P)
    }

    /// Independent oracle: bisection on w e^w = x in f64.
    fn w_bisect(x: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, x.max(1.0) + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() > x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn w_at_e_is_one() {
        let e = HiFloat::one(P).exp();
        let wv = lambert_w0_default(&e).unwrap();
        assert!((&wv.w - &HiFloat::one(P)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn w_at_zero_is_zero() {
        let wv = lambert_w0_default(&HiFloat::zero(P)).unwrap();
        assert!(wv.w.is_zero());
        assert!(wv.residual.is_zero());
    }

    #[test]
    fn w_at_one_matches_bisection() {
        let wv = lambert_w0_default(&hf(1.0)).unwrap();
        let oracle = w_bisect(1.0); // 0.567143290409784 to f64 accuracy
        assert!((wv.w.to_f64() - oracle).abs() < 1e-12, "w={}", wv.w);
        assert!((wv.w.to_f64() - 0.5671432904).abs() < 1e-9);
    }

    #[test]
    fn residual_certified_on_log_grid() {
        let mut worst: f64 = 0.0;
        for i in 0..=400 {
            let x = 10f64.powf(-9.0 + 18.0 * (i as f64) / 400.0);
            let wv = lambert_w0_default(&hf(x)).unwrap();
            worst = worst.max(wv.residual.to_f64());
            assert!(wv.w.is_positive());
        }
        assert!(worst < 1e-14, "worst residual {worst:e}");
    }

    #[test]
    fn derivative_identity() {
        // central difference of W matches W/(x(1+W)) to 1e-6 relative
        for i in 0..=60 {
            let x = 10f64.powf(-3.0 + 6.0 * (i as f64) / 60.0);
            let h = x * 1e-5;
            let wp = lambert_w0_default(&hf(x + h)).unwrap().w.to_f64();
            let wm = lambert_w0_default(&hf(x - h)).unwrap().w.to_f64();
            let fd = (wp - wm) / (2.0 * h);
            let w = lambert_w0_default(&hf(x)).unwrap().w.to_f64();
            let closed = w / (x * (1.0 + w));
            assert!(
                (fd - closed).abs() <= 1e-6 * closed.abs(),
                "x={x} fd={fd} closed={closed}"
            );
        }
    }

    #[test]
    fn monotone_increasing() {
        let mut prev = HiFloat::zero(P);
        for i in 0..=100 {
            let x = 10f64.powf(-6.0 + 12.0 * (i as f64) / 100.0);
            let w = lambert_w0_default(&hf(x)).unwrap().w;
            assert!(w > prev, "W not increasing at x={x}");
            prev = w;
        }
    }

    #[test]
    fn exp_w_values() {
        let e = HiFloat::one(P).exp();
        assert!((&exp_w(&e).unwrap() - &e).abs().to_f64() < 1e-28);
        assert_eq!(exp_w(&HiFloat::zero(P)).unwrap().to_f64(), 1.0);
        // 1/W(1) via the bisection oracle; reference 1.7632228344
        let got = exp_w(&hf(1.0)).unwrap().to_f64();
        assert!((got - 1.0 / w_bisect(1.0)).abs() < 1e-12);
        assert!((got - 1.7632228344).abs() < 1e-9);
    }

    #[test]
    fn hoorfar_sandwich_and_equality() {
        for i in 0..=80 {
            let x = 10f64.powf(-4.0 + 8.0 * (i as f64) / 80.0);
            let xh = hf(x);
            let ew = exp_w(&xh).unwrap();
            for y in [
                hf(1.0),
                &hf(1.0) + &xh,
                &ew * &hf(1.1),
            ] {
                let bound = hoorfar_hassani_upper(&xh, &y).unwrap();
                assert!(
                    &bound - &ew >= -&hf(1e-25) * &ew,
                    "x={x} y={} bound={bound} ew={ew}",
                    y.to_decimal_sig(10)
                );
            }
            // equality at y = e^W(x)
            let eq = hoorfar_hassani_upper(&xh, &ew).unwrap();
            let rel = (&(&eq - &ew) / &ew).abs().to_f64();
            assert!(rel < 1e-12, "x={x} rel={rel:e}");
        }
        // (0, 1) -> 1
        assert_eq!(
            hoorfar_hassani_upper(&hf(0.0), &hf(1.0)).unwrap().to_f64(),
            1.0
        );
        // y = x + 1 closed form at x = 1: 3 / (1 + ln 2)
        let b = hoorfar_hassani_upper(&hf(1.0), &hf(2.0)).unwrap().to_f64();
        assert!((b - 3.0 / (1.0 + 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w0_default(&hf(-0.5)).is_err());
        assert!(hoorfar_hassani_upper(&hf(1.0), &hf(0.2)).is_err());
        assert!(hoorfar_hassani_upper(&hf(-3.0), &hf(1.0)).is_err());
        let too_tight = hf(1e-60);
        assert!(matches!(
            lambert_w0(&hf(2.0), &too_tight),
            Err(Error::Precision(_))
        ));
    }
}
