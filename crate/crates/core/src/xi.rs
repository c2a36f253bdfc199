//! Direct evaluation of `xi(s)` from the theta integral.
//!
//! With `x = e^{2t}` the classical representation becomes
//! `xi(s) = 1/2 [1 + 2 s (s - 1) int_0^inf (e^{st} + e^{(1-s)t}) w(e^{2t}) dt]`,
//! which shares nothing with the `E0` route except the theta tail `w`.

use crate::error::{Error, Result};
use crate::quad::{integrate_decaying, Endpoint, QuadOptions, TailMajorant};
use crate::theta::{theta_w, KERNEL_TOL};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

pub type ComplexValue = Complex64;

/// A point `s = 1/2 + sigma + i omega` inside the critical strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripPoint {
    pub sigma: f64,
    pub omega: f64,
}

impl StripPoint {
    pub fn new(sigma: f64, omega: f64) -> Result<Self> {
        if !(sigma.abs() < 0.5) {
            return Err(Error::domain("sigma (need |sigma| < 1/2)", sigma));
        }
        if !omega.is_finite() {
            return Err(Error::domain("omega", omega));
        }
        Ok(StripPoint { sigma, omega })
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(0.5 + self.sigma, self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiValue {
    pub value: Complex64,
    /// May exceed the requested tolerance when that tolerance is below the
    /// floating-point floor of the integral.
    pub err_estimate: f64,
}

/// `xi(s)` by quadrature of the theta integral.
pub fn xi_direct(s: Complex64, tol: f64) -> Result<XiValue> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::domain(
            "s",
            if s.re.is_finite() { s.im } else { s.re },
        ));
    }
    let pref = s * (s - 1.0);
    if pref.norm() == 0.0 {
        return Ok(XiValue {
            value: Complex64::new(0.5, 0.0),
            err_estimate: 0.0,
        });
    }
    let s1 = Complex64::new(1.0, 0.0) - s;
    let f = |t: f64| {
        let w = theta_w((2.0 * t).exp(), KERNEL_TOL)
            .map(|r| r.value)
            .unwrap_or(0.0);
        ((s * t).exp() + (s1 * t).exp()) * w
    };
    let c = s.re.max(1.0 - s.re);
    // |e^{st}| + |e^{(1-s)t}| <= 2 e^{ct} and w(x) <= 1.0001 e^{-pi x} for x >= 1.
    let upper = move |t: f64| {
        let t = t.max(0.0);
        let a = PI * (2.0 * t).exp();
        let lambda = 2.0 * a - c;
        if lambda <= 0.0 {
            f64::INFINITY
        } else {
            2.0 * 2.0001 * (c * t - a).exp() / lambda
        }
    };
    let tails = TailMajorant {
        lower: None,
        upper: Some(&upper),
    };
    let tol_i = tol / pref.norm();
    let opts = QuadOptions::for_frequency(tol_i, s.im, 0.25);
    let r = integrate_decaying(
        f,
        Endpoint::Finite(0.0),
        Endpoint::PosInfinity,
        &tails,
        &opts,
    )?;
    Ok(XiValue {
        value: 0.5 + pref * r.value,
        err_estimate: pref.norm() * r.err_estimate,
    })
}

/// `|xi(s) - xi(1 - s)|`.
pub fn xi_functional_residual(s: Complex64, tol: f64) -> Result<f64> {
    let a = xi_direct(s, tol)?;
    let b = xi_direct(1.0 - s, tol)?;
    Ok((a.value - b.value).norm())
}

/// Real value of `xi(1/2 + i omega)` with its error estimate.
pub fn xi_critical_line(omega: f64, tol: f64) -> Result<(f64, f64)> {
    let v = xi_direct(Complex64::new(0.5, omega), tol)?;
    let allowed = 1e-10_f64.max(10.0 * v.err_estimate);
    if v.value.im.abs() > allowed {
        return Err(Error::Consistency {
            what: "imaginary part of xi on the critical line",
            discrepancy: v.value.im.abs(),
            allowed,
        });
    }
    Ok((v.value.re, v.err_estimate))
}

/// Bisects `xi(1/2 + i omega)` on `[lo, hi]` down to a bracket narrower than
/// `tol` and returns its midpoint.
pub fn find_critical_zero(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::domain("bracket upper end", hi));
    }
    let eval = |w: f64| xi_critical_line(w, 1e-17).map(|v| v.0);
    let (mut a, mut b) = (lo, hi);
    let mut fa = eval(a)?;
    let fb = eval(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = eval(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_centre() {
        let v = xi_direct(Complex64::new(0.5, 0.0), 1e-15).unwrap();
        assert!(
            (v.value.re - 0.497_120_778_188_314_1).abs() < 1e-14,
            "{:?}",
            v
        );
        assert!(v.value.im.abs() < 1e-16);
    }

    #[test]
    fn trivial_points() {
        assert_eq!(
            xi_direct(Complex64::new(1.0, 0.0), 1e-12).unwrap().value.re,
            0.5
        );
        assert_eq!(
            xi_direct(Complex64::new(0.0, 0.0), 1e-12).unwrap().value.re,
            0.5
        );
    }

    #[test]
    fn strip_point_domain() {
        assert!(StripPoint::new(0.5, 1.0).is_err());
        assert!(StripPoint::new(-0.49, 1.0).is_ok());
    }

    #[test]
    fn no_sign_change_reported() {
        let e = find_critical_zero(15.0, 16.0, 1e-8).unwrap_err();
        assert!(matches!(e, Error::NoSignChange { .. }));
    }
}
