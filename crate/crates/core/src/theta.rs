//! Theta series and the even kernel `E0` derived from it.
//!
//! Everything here is a rapidly convergent sum over `n >= 1`. Each sum is
//! accumulated with compensated (Neumaier) summation and stopped as soon as a
//! geometric majorant of the remaining terms drops under the requested
//! absolute tolerance. The majorant is what gets reported as `tail_bound`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Hard cap on the number of series terms.
pub const TERM_CAP: usize = 200;

/// Tolerance used by the infallible `*_value` helpers. All of the kernels
/// below are bounded by 1 in magnitude, so this is well under one ulp.
pub const KERNEL_TOL: f64 = 1e-18;

/// Partial sum of a positive-term or dominated series, with a certified
/// bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSum {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums `term(n)` for `n = 1, 2, ...` until the tail after `n` is certified
/// below `tol`.
///
/// `log_major(n)` is the log of a bound on `|term(n)|`, and `log_ratio(m)`
/// bounds `log(major(n + 1) / major(n))` for every `n >= m`, so that the tail
/// starting at `m` is at most `major(m) / (1 - exp(log_ratio(m)))`.
pub(crate) fn certified_sum(
    tol: f64,
    term: impl Fn(usize) -> f64,
    log_major: impl Fn(usize) -> f64,
    log_ratio: impl Fn(usize) -> f64,
) -> Result<TruncatedSum> {
    if !(tol > 0.0) {
        return Err(Error::domain("series tolerance", tol));
    }
    let mut acc = CompensatedSum::default();
    let mut tail = f64::INFINITY;
    for n in 1..=TERM_CAP {
        acc.add(term(n));
        let lr = log_ratio(n + 1);
        tail = if lr < 0.0 {
            log_major(n + 1).exp() / -lr.exp_m1()
        } else {
            f64::INFINITY
        };
        if tail <= tol {
            return Ok(TruncatedSum {
                value: acc.value(),
                tail_bound: tail,
                terms_used: n,
            });
        }
    }
    Err(Error::ToleranceUnreachable {
        terms: TERM_CAP,
        tail_bound: tail,
        tol,
    })
}

fn check_finite(what: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, x))
    }
}

/// `log(((n + 1) / n)^p)`
fn log_poly_ratio(n: usize, p: f64) -> f64 {
    p * (1.0 / n as f64).ln_1p()
}

/// Theta tail `w(x) = sum exp(-pi n^2 x)` for `x > 0`.
pub fn theta_w(x: f64, tol: f64) -> Result<TruncatedSum> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("theta argument x", x));
    }
    certified_sum(
        tol,
        |n| (-PI * (n * n) as f64 * x).exp(),
        |n| -PI * (n * n) as f64 * x,
        |m| -PI * (2 * m + 1) as f64 * x,
    )
}

/// `|1 + 2 w(x) - x^{-1/2} (1 + 2 w(1/x))|`, the modular-identity residual.
pub fn jacobi_identity_residual(x: f64) -> Result<f64> {
    let lhs = 1.0 + 2.0 * theta_w(x, KERNEL_TOL)?.value;
    let rhs = (1.0 + 2.0 * theta_w(1.0 / x, KERNEL_TOL)?.value) / x.sqrt();
    Ok((lhs - rhs).abs())
}

/// `a = pi n^2 e^{2t}`, or `None` once the term is far below underflow.
fn scaled_index(n: usize, t: f64) -> Option<f64> {
    let a = PI * (n * n) as f64 * (2.0 * t).exp();
    (a < 1e6).then_some(a)
}

/// Kernel `E0(t)`; even in `t`, evaluated through `|t|`.
///
/// Term `n` is `2a (2a - 3) e^{-a} e^{t/2}` with `a = pi n^2 e^{2t}`, which is
/// positive for `t >= 0`.
pub fn e0(t: f64, tol: f64) -> Result<TruncatedSum> {
    check_finite("t", t)?;
    let t = t.abs();
    certified_sum(
        tol,
        |n| match scaled_index(n, t) {
            Some(a) => 2.0 * a * (2.0 * a - 3.0) * (0.5 * t - a).exp(),
            None => 0.0,
        },
        |n| match scaled_index(n, t) {
            Some(a) => 2.0 * (2.0 * a).ln() - a + 0.5 * t,
            None => f64::NEG_INFINITY,
        },
        |m| log_poly_ratio(m, 4.0) - PI * (2 * m + 1) as f64 * (2.0 * t).exp(),
    )
}

/// `E0(t)` to full double precision.
pub fn e0_value(t: f64) -> f64 {
    e0(t, KERNEL_TOL).map(|s| s.value).unwrap_or(f64::NAN)
}

/// `E0(t)` from exactly the first `terms` terms, without tail control.
pub fn e0_terms(t: f64, terms: usize) -> f64 {
    let t = t.abs();
    let mut acc = CompensatedSum::default();
    for n in 1..=terms {
        if let Some(a) = scaled_index(n, t) {
            acc.add(2.0 * a * (2.0 * a - 3.0) * (0.5 * t - a).exp());
        }
    }
    acc.value()
}

/// Natural log of `E0(t)`. Stays finite far beyond the point where `E0`
/// itself underflows, which is what the fall-off fits need.
pub fn log_e0(t: f64) -> f64 {
    let t = t.abs();
    let u2 = 2.0 * t;
    // ln of term n: ln(2a) + ln(2a - 3) - a + t/2 with ln a = ln(pi n^2) + 2t.
    let log_term = |n: usize| {
        let ln_a = (PI * (n * n) as f64).ln() + u2;
        let a = ln_a.exp();
        let ln_2a = std::f64::consts::LN_2 + ln_a;
        // 2a - 3 = 2a (1 - 3 / (2a))
        ln_2a + ln_2a + (-1.5 / a).ln_1p() - a + 0.5 * t
    };
    let head = log_term(1);
    let mut rest = 0.0;
    for n in 2..=8 {
        let d = log_term(n) - head;
        if d < -745.0 {
            break;
        }
        rest += d.exp();
    }
    head + rest.ln_1p()
}

/// `d/dt log E0(t)`, finite wherever `log_e0` is. Negative for `t > 0`.
pub fn dlog_e0(t: f64) -> f64 {
    if t < 0.0 {
        return -dlog_e0(-t);
    }
    // Per-term log and log-derivative; term weights come from a log-sum-exp.
    let term = |n: usize| {
        let ln_a = (PI * (n * n) as f64).ln() + 2.0 * t;
        let a = ln_a.exp();
        let ln_2a = std::f64::consts::LN_2 + ln_a;
        let log_t = ln_2a + ln_2a + (-1.5 / a).ln_1p() - a + 0.5 * t;
        let dlog = 2.5 + 4.0 * a / (2.0 * a - 3.0) - 2.0 * a;
        (log_t, dlog)
    };
    let (head, d1) = term(1);
    let mut wsum = 1.0;
    let mut dsum = d1;
    for n in 2..=8 {
        let (lt, d) = term(n);
        let w = (lt - head).exp();
        if w == 0.0 {
            break;
        }
        wsum += w;
        dsum += w * d;
    }
    dsum / wsum
}

/// Derivative `dE0/dt = 2 dX/dt`, where `X = E0 / 2`. Odd in `t`.
pub fn de0_dt(t: f64, tol: f64) -> Result<TruncatedSum> {
    check_finite("t", t)?;
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let t = t.abs();
    let s = certified_sum(
        tol,
        |n| match scaled_index(n, t) {
            Some(a) => 2.0 * a * (-4.0 * a * a + 15.0 * a - 7.5) * (0.5 * t - a).exp(),
            None => 0.0,
        },
        |n| match scaled_index(n, t) {
            Some(a) => (2.0 * a * (4.0 * a * a + 15.0 * a + 7.5)).ln() - a + 0.5 * t,
            None => f64::NEG_INFINITY,
        },
        |m| log_poly_ratio(m, 6.0) - PI * (2 * m + 1) as f64 * (2.0 * t).exp(),
    )?;
    Ok(TruncatedSum {
        value: sign * s.value,
        ..s
    })
}

/// `dE0/dt` to full double precision.
pub fn de0_value(t: f64) -> f64 {
    de0_dt(t, KERNEL_TOL).map(|s| s.value).unwrap_or(f64::NAN)
}

/// `d^k E0 / dt^k` for `k` in `{0, 1}`.
pub(crate) fn e0_deriv_value(t: f64, k: u8) -> f64 {
    match k {
        0 => e0_value(t),
        1 => de0_value(t),
        _ => unreachable!("only first derivatives of E0 are used"),
    }
}

/// Tilted kernel `E_p(t) = E0(t) e^{-sigma t}`, for `|sigma| < 1/2`.
pub fn ep(t: f64, sigma: f64, tol: f64) -> Result<f64> {
    if !(sigma.abs() < 0.5) {
        return Err(Error::domain("sigma (need |sigma| < 1/2)", sigma));
    }
    let s = e0(t, tol)?;
    Ok(s.value * (-sigma * t).exp())
}

/// Shifted difference `E0'(t, t2) = E0(t - t2) - E0(t + t2)`; odd in `t`.
pub fn e0_shift_diff(t: f64, t2: f64, tol: f64) -> Result<f64> {
    check_finite("t2", t2)?;
    Ok(e0(t - t2, tol)?.value - e0(t + t2, tol)?.value)
}

/// Reflected shifted difference `E0n'(t, t2) = E0'(-t, t2)`.
pub fn e0n_shift_diff(t: f64, t2: f64, tol: f64) -> Result<f64> {
    e0_shift_diff(-t, t2, tol)
}

/// `sum exp(-pi n^2) (1 - 4 pi n^2)`, which equals `-1/2` exactly.
pub fn theta_delta_identity(tol: f64) -> Result<f64> {
    certified_sum(
        tol,
        |n| {
            let a = PI * (n * n) as f64;
            (-a).exp() * (1.0 - 4.0 * a)
        },
        |n| {
            let a = PI * (n * n) as f64;
            (4.0 * a).ln() - a
        },
        |m| log_poly_ratio(m, 2.0) - PI * (2 * m + 1) as f64,
    )
    .map(|s| s.value)
}

/// Bound on `int_T^inf s^power |E0^{(deriv)}(s)| e^{rate s} ds` for `T >= 1/2`.
///
/// Uses the single-term majorant `K a^k e^{-a} e^{s/2}` (with `a = pi e^{2s}`)
/// inflated by the geometric tail factor, then bounds the integral of a
/// log-concave majorant by its value at `T` over its decay rate there.
pub fn kernel_tail_bound(t: f64, deriv: u8, rate: f64, power: u32) -> f64 {
    if !(t >= 0.5) {
        return f64::INFINITY;
    }
    let (log_k, k) = match deriv {
        // 4 a^2, tail factor 1 / (1 - 16 e^{-3 pi})
        0 => ((4.0f64).ln() + 0.002, 2.0),
        // 2 a (4 a^2 + 15 a + 7.5) <= 2 (4 + 15/pi + 7.5/pi^2) a^3, tail factor 1 / (1 - 64 e^{-3 pi})
        _ => (
            (2.0 * (4.0 + 15.0 / PI + 7.5 / (PI * PI))).ln() + 0.006,
            3.0,
        ),
    };
    let p = power as f64;
    let a = PI * (2.0 * t).exp();
    let lambda = 2.0 * a - p / t - 2.0 * k - 0.5 - rate;
    if lambda <= 0.0 {
        return f64::INFINITY;
    }
    let log_m = p * t.ln() + log_k + k * a.ln() - a + (0.5 + rate) * t;
    log_m.exp() / lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 50-digit evaluation of the defining sums.
    const E0_AT_0: f64 = 0.893_393_800_934_247;
    const E0_AT_HALF: f64 = 0.060_377_451_784_348_655;

    #[test]
    fn e0_reference_points() {
        let s = e0(0.0, 1e-18).unwrap();
        assert!((s.value - E0_AT_0).abs() < 1e-14, "{}", s.value);
        assert!(
            (e0_value(0.5) - E0_AT_HALF).abs() < 1e-14,
            "{}",
            e0_value(0.5)
        );
        assert_eq!(e0_value(-0.5), e0_value(0.5));
    }

    #[test]
    fn e0_underflows_to_zero_not_nan() {
        for t in [3.0, 10.0, 400.0, 1e6] {
            let s = e0(t, 1e-18).unwrap();
            assert_eq!(s.value, 0.0);
            assert!(s.terms_used >= 1);
        }
        assert!(e0(f64::NAN, 1e-12).is_err());
    }

    #[test]
    fn log_e0_matches_direct_where_both_exist() {
        for t in [0.0, 0.3, 1.0, 1.7, 2.2] {
            let direct = e0_value(t).ln();
            assert!(
                (log_e0(t) - direct).abs() < 1e-12 * direct.abs().max(1.0),
                "t={t}"
            );
        }
        assert!(log_e0(8.0).is_finite());
    }

    #[test]
    fn dlog_matches_ratio() {
        for t in [0.1, 0.7, 1.9] {
            let r = de0_value(t) / e0_value(t);
            assert!((dlog_e0(t) - r).abs() < 1e-12 * r.abs(), "t={t}");
        }
        assert!(dlog_e0(10.0) < -1e8);
        assert_eq!(dlog_e0(-0.4), -dlog_e0(0.4));
    }

    #[test]
    fn theta_delta_is_minus_half() {
        assert!((theta_delta_identity(1e-18).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn w_at_one() {
        // w(1) = (pi^{1/4} / Gamma(3/4) - 1) / 2
        let s = theta_w(1.0, 1e-18).unwrap();
        assert!(
            (s.value - 0.043_217_405_606_654_007).abs() < 1e-16,
            "{}",
            s.value
        );
        assert!(s.tail_bound <= 1e-18);
    }

    #[test]
    fn derivative_vanishes_at_origin() {
        assert!(de0_value(0.0).abs() < 1e-15);
        assert_eq!(de0_value(-0.4), -de0_value(0.4));
    }

    #[test]
    fn term_cap_reports_unreachable() {
        let err = theta_w(1e-5, 1e-12).unwrap_err();
        assert!(matches!(err, Error::ToleranceUnreachable { .. }));
        assert!(theta_w(0.0, 1e-12).is_err());
    }

    #[test]
    fn tail_bound_dominates_numerical_tail() {
        for (t, k) in [(1.0, 0u8), (1.2, 1), (1.5, 0)] {
            let bound = kernel_tail_bound(t, k, 0.5, 2);
            // crude trapezoid on [t, 3]
            let h = 1e-4;
            let mut s = 0.0;
            let mut x = t;
            while x < 3.0 {
                s += h * x * x * e0_deriv_value(x, k).abs() * (0.5 * x).exp();
                x += h;
            }
            assert!(s <= bound, "t={t} k={k} s={s} bound={bound}");
            assert!(bound < 50.0 * s + 1e-300, "bound too loose at t={t}");
        }
    }
}
