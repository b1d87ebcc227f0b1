//! Bond prices, yields and credit spreads.
//!
//! With `u = lambda_T + T - t` and the observed state `x = X_t`:
//!
//! ```text
//!   P_d(t, T) = 1{tau > t} q(u, x) / q(lambda_t, x)
//!   P_f(t, T) = qhat(u, T - t, x) / q(lambda_t, x)
//!   spread    = d/dT ln[qhat(u, T - t, x) / q(u, x)]
//! ```
//!
//! Valuation at `t > 0` reads the observed state from `params.x0()`; use
//! [`QuadraticModelParams::with_state`] to move it.

use crate::error::{ensure_finite, ensure_non_negative, Error, Result};
use crate::model::{propagator_q, propagator_qhat, QuadraticModelParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondQuote {
    pub t: f64,
    pub maturity: f64,
    pub price: f64,
    /// `1{tau > t}` at valuation time. Always true for default-free quotes.
    pub survived: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadPoint {
    pub maturity: f64,
    pub spread: f64,
}

/// Default finite-difference step for the credit spread at maturity `T`.
pub fn default_spread_step(maturity: f64) -> f64 {
    1e-4 * maturity.max(1.0)
}

fn check_window(t: f64, maturity: f64) -> Result<()> {
    ensure_non_negative("t", t)?;
    ensure_finite("T", maturity)?;
    if maturity <= t {
        return Err(Error::domain(
            "T",
            format!("maturity {maturity} must exceed valuation time {t}"),
        ));
    }
    Ok(())
}

/// `ln P_f(t, T)`.
pub fn ln_price_default_free(t: f64, maturity: f64, params: &QuadraticModelParams) -> Result<f64> {
    check_window(t, maturity)?;
    let u = params.lambda(maturity) + maturity - t;
    let num = propagator_qhat(u, maturity - t, params)?;
    let den = propagator_q(params.lambda(t), params)?;
    Ok(num.ln() - den.ln())
}

/// `ln P_d(t, T)` given survival up to `t`.
pub fn ln_price_defaultable(t: f64, maturity: f64, params: &QuadraticModelParams) -> Result<f64> {
    check_window(t, maturity)?;
    let u = params.lambda(maturity) + maturity - t;
    let num = propagator_q(u, params)?;
    let den = propagator_q(params.lambda(t), params)?;
    Ok(num.ln() - den.ln())
}

pub fn price_default_free(t: f64, maturity: f64, params: &QuadraticModelParams) -> Result<BondQuote> {
    let ln = ln_price_default_free(t, maturity, params)?;
    Ok(BondQuote {
        t,
        maturity,
        price: ln.exp(),
        survived: true,
    })
}

/// Zero-recovery defaultable bond. Prices to zero once default has occurred.
pub fn price_defaultable(
    t: f64,
    maturity: f64,
    survived: bool,
    params: &QuadraticModelParams,
) -> Result<BondQuote> {
    let price = if survived {
        ln_price_defaultable(t, maturity, params)?.exp()
    } else {
        check_window(t, maturity)?;
        0.0
    };
    Ok(BondQuote {
        t,
        maturity,
        price,
        survived,
    })
}

/// Continuously compounded default-free yield `-ln P_f(0, T) / T`.
pub fn yield_default_free(maturity: f64, params: &QuadraticModelParams) -> Result<f64> {
    ensure_finite("T", maturity)?;
    if maturity <= 0.0 {
        return Err(Error::domain("T", format!("must be positive, got {maturity}")));
    }
    Ok(-ln_price_default_free(0.0, maturity, params)? / maturity)
}

/// Instantaneous credit spread at maturity `T`, differentiated numerically
/// with step `h` and one Richardson step.
pub fn credit_spread(
    t: f64,
    maturity: f64,
    params: &QuadraticModelParams,
    h: f64,
) -> Result<SpreadPoint> {
    check_stencil(t, maturity, h)?;
    let spread = richardson_central(
        |m| {
            let u = params.lambda(m) + m - t;
            Ok(propagator_qhat(u, m - t, params)?.ln() - propagator_q(u, params)?.ln())
        },
        maturity,
        h,
    )?;
    Ok(SpreadPoint { maturity, spread })
}

/// `-d/dT ln(P_d / P_f)` differentiated through the two price operations with
/// the same stencil as [`credit_spread`].
pub fn credit_spread_from_prices(
    t: f64,
    maturity: f64,
    params: &QuadraticModelParams,
    h: f64,
) -> Result<SpreadPoint> {
    check_stencil(t, maturity, h)?;
    let spread = richardson_central(
        |m| {
            let pf = price_default_free(t, m, params)?.price;
            let pd = price_defaultable(t, m, true, params)?.price;
            Ok(pf.ln() - pd.ln())
        },
        maturity,
        h,
    )?;
    Ok(SpreadPoint { maturity, spread })
}

fn check_stencil(t: f64, maturity: f64, h: f64) -> Result<()> {
    ensure_non_negative("t", t)?;
    ensure_finite("T", maturity)?;
    ensure_finite("h", h)?;
    if h <= 0.0 {
        return Err(Error::domain("h", format!("must be positive, got {h}")));
    }
    if maturity - h <= t {
        return Err(Error::domain(
            "T",
            format!("stencil T - h = {} does not exceed t = {t}", maturity - h),
        ));
    }
    Ok(())
}

/// `(4 D(h/2) - D(h)) / 3` with `D` the central difference.
fn richardson_central(g: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let central = |h: f64| -> Result<f64> { Ok((g(x + h)? - g(x - h)?) / (2.0 * h)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeChange;
    use approx::assert_relative_eq;

    fn fig1(x: f64) -> QuadraticModelParams {
        QuadraticModelParams::new(0.1, vec![x], TimeChange::scaled_exponential(0.1).unwrap()).unwrap()
    }

    fn fig3(beta: f64) -> QuadraticModelParams {
        QuadraticModelParams::new(beta, vec![0.0], TimeChange::sqrt()).unwrap()
    }

    fn flat() -> QuadraticModelParams {
        QuadraticModelParams::new(0.0, vec![1.0, 2.0], TimeChange::sqrt()).unwrap()
    }

    #[test]
    fn zero_potential_prices_at_par() {
        let p = flat();
        for &m in &[0.5, 1.0, 5.0, 10.0] {
            assert_eq!(price_default_free(0.0, m, &p).unwrap().price, 1.0);
            assert_eq!(price_defaultable(0.0, m, true, &p).unwrap().price, 1.0);
            assert_eq!(yield_default_free(m, &p).unwrap(), 0.0);
            assert!(credit_spread(0.0, m, &p, 1e-4).unwrap().spread.abs() <= 1e-10);
        }
    }

    #[test]
    fn defaulted_bond_is_worthless() {
        let p = fig3(0.5);
        let q = price_defaultable(1.0, 3.0, false, &p).unwrap();
        assert_eq!(q.price, 0.0);
        assert!(!q.survived);
        assert!(price_defaultable(3.0, 3.0, false, &p).is_err());
    }

    #[test]
    fn short_maturity_limit() {
        for p in [fig1(10.0), fig3(1.0)] {
            for &t in &[0.0, 0.5, 2.0] {
                let pf = price_default_free(t, t + 1e-8, &p).unwrap().price;
                let pd = price_defaultable(t, t + 1e-8, true, &p).unwrap().price;
                assert!((pf - 1.0).abs() <= 1e-6, "pf={pf}");
                assert!((pd - 1.0).abs() <= 1e-6, "pd={pd}");
            }
        }
    }

    #[test]
    fn maturity_must_follow_valuation() {
        let p = fig3(0.5);
        let err = price_default_free(2.0, 2.0, &p).unwrap_err();
        assert_eq!(err.key(), "T");
        assert!(price_defaultable(2.0, 1.0, true, &p).is_err());
        assert!(yield_default_free(0.0, &p).is_err());
        assert!(credit_spread(1.0, 1.00005, &p, 1e-4).is_err());
        assert!(credit_spread(0.0, 1.0, &p, 0.0).is_err());
    }

    // Reference yields evaluated directly at 40 digits (mpmath).
    #[test]
    fn yields_match_high_precision_reference() {
        let cases = [
            (0.01, 1.0, 0.001_516_752_826_474_031_5),
            (30.0, 5.0, 5.627_126_134_432_476),
            (30.0, 10.0, 13.218_231_897_385_026),
        ];
        for (x, m, expected) in cases {
            assert_relative_eq!(
                yield_default_free(m, &fig1(x)).unwrap(),
                expected,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn yields_ordered_in_start_point() {
        for m in 1..=10 {
            let m = m as f64;
            let lo = yield_default_free(m, &fig1(0.01)).unwrap();
            let hi = yield_default_free(m, &fig1(30.0)).unwrap();
            assert!(lo > 0.0 && hi > lo);
        }
    }

    #[test]
    fn observed_state_drives_forward_valuation() {
        let p = fig3(0.5);
        let moved = p.with_state(vec![2.0]).unwrap();
        let at_origin = price_defaultable(1.0, 3.0, true, &p).unwrap().price;
        let away = price_defaultable(1.0, 3.0, true, &moved).unwrap().price;
        assert!(away < at_origin);
        let u = p.lambda(3.0) + 2.0;
        let expected = propagator_q(u, &moved).unwrap().value() / propagator_q(1.0, &moved).unwrap().value();
        assert_relative_eq!(away, expected, max_relative = 1e-14);
    }

    #[test]
    fn spread_matches_price_route() {
        for &beta in &[0.1, 0.5, 1.0] {
            let p = fig3(beta);
            for &m in &[0.5, 1.0, 5.0, 10.0] {
                let h = default_spread_step(m);
                let a = credit_spread(0.0, m, &p, h).unwrap().spread;
                let b = credit_spread_from_prices(0.0, m, &p, h).unwrap().spread;
                assert!(((a - b) / a).abs() <= 1e-9, "beta={beta} T={m}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn spread_step_halving_is_stable() {
        let p = fig3(0.1);
        let a = credit_spread(0.0, 5.0, &p, 1e-4).unwrap().spread;
        let b = credit_spread(0.0, 5.0, &p, 1e-5).unwrap().spread;
        assert!(a > 0.0);
        assert!(((a - b) / a).abs() <= 1e-6);
    }

    // d/dT of the log-ratio evaluated symbolically by mpmath at 40 digits.
    #[test]
    fn spread_matches_high_precision_derivative() {
        let cases = [
            (0.1, 0.5, 0.002_487_696_504_137_763),
            (0.5, 2.0, 0.133_831_413_852_329_47),
            (1.0, 10.0, 0.454_328_150_914_759_87),
        ];
        for (beta, m, expected) in cases {
            let s = credit_spread(0.0, m, &fig3(beta), default_spread_step(m)).unwrap().spread;
            assert_relative_eq!(s, expected, max_relative = 1e-7);
        }
    }

    #[test]
    fn default_free_dominates_defaultable() {
        let lambdas = [
            TimeChange::scaled_exponential(0.1).unwrap(),
            TimeChange::scaled_exponential(0.01).unwrap(),
            TimeChange::sqrt(),
        ];
        for lambda in lambdas {
            for ib in 1..=18 {
                let beta = 0.1 * ib as f64;
                for &x in &[0.0, 0.01, 1.0, 10.0, 30.0] {
                    let p = QuadraticModelParams::new(beta, vec![x], lambda).unwrap();
                    let mut prev = f64::INFINITY;
                    for i in 1..=20 {
                        let m = 0.5 * i as f64;
                        let pd = ln_price_defaultable(0.0, m, &p).unwrap();
                        let pf = ln_price_default_free(0.0, m, &p).unwrap();
                        assert!(pd.is_finite() && pd <= pf);
                        assert!(pd <= prev);
                        prev = pd;
                    }
                }
            }
        }
    }
}
