//! Fourier transforms of the tilted kernel and of the shifted-window
//! functions `f`, `g`, and the real transform `G_R` whose zero set the
//! tracker follows.
//!
//! Notation: `E0'(t, t2) = E0(t - t2) - E0(t + t2)` and
//! `E0n'(t, t2) = E0'(-t, t2)`. For a window `(sigma, t2, t0)`,
//!
//! ```text
//! q1(tau; t0) = E0'(tau + t0, t2) e^{-2 sigma tau} + E0n'(tau - t0, t2)
//! G1R(omega; t0) = int_{-inf}^0 q1(tau; t0) cos(omega tau) dtau
//! G_R(omega) = e^{-2 sigma t0} G1R(omega; t0) + e^{2 sigma t0} G1R(omega; -t0)
//! ```

use crate::error::{Error, Result};
use crate::kernel::{Atom, KernelSum, SampledTransform, Trig};
use crate::quad::{integrate, QuadOptions, QuadratureResult};
use crate::xi::StripPoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of a shifted window.
///
/// `t2 = 0` is accepted and marks the identically-zero window; every
/// transform of it is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    pub sigma: f64,
    pub t2: f64,
    pub t0: f64,
}

impl WindowParams {
    pub fn new(sigma: f64, t2: f64, t0: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 0.5) {
            return Err(Error::domain("sigma (need 0 < sigma < 1/2)", sigma));
        }
        if !t2.is_finite() {
            return Err(Error::domain("t2", t2));
        }
        if !t0.is_finite() {
            return Err(Error::domain("t0", t0));
        }
        Ok(WindowParams { sigma, t2, t0 })
    }

    pub fn is_degenerate(&self) -> bool {
        self.t2 == 0.0
    }

    pub fn with_t0(self, t0: f64) -> Self {
        WindowParams { t0, ..self }
    }

    pub fn with_t2(self, t2: f64) -> Self {
        WindowParams { t2, ..self }
    }
}

fn zero<T: Default>() -> QuadratureResult<T> {
    QuadratureResult {
        value: T::default(),
        err_estimate: 0.0,
        panels: 0,
        roundoff_limited: false,
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("omega", omega))
    }
}

/// `E_pomega(omega) = int E0(t) e^{-sigma t} e^{-i omega t} dt`, which equals
/// `xi(1/2 + sigma + i omega)`.
pub fn ep_omega(p: StripPoint, tol: f64) -> Result<QuadratureResult<Complex64>> {
    let k = KernelSum::new(vec![Atom::new(1.0, 0.0, -p.sigma)]);
    k.transform_exp(p.omega, -1.0, f64::NEG_INFINITY, f64::INFINITY, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpPrimeValue {
    /// Factored form `E_pomega(omega) (e^{-sigma t2} e^{-i omega t2} - e^{sigma t2} e^{i omega t2})`.
    pub value: Complex64,
    pub err_estimate: f64,
    /// Direct transform of `E0'(t, t2) e^{-sigma t}`.
    pub direct: Complex64,
    pub discrepancy: f64,
}

/// Transform of `E_p'(t, t2) = E0'(t, t2) e^{-sigma t}`, computed two ways.
///
/// Fails with [`Error::Consistency`] if the factored and direct routes
/// disagree by more than ten times their combined error estimates.
pub fn ep_prime_omega(p: StripPoint, t2: f64, tol: f64) -> Result<EpPrimeValue> {
    if !t2.is_finite() {
        return Err(Error::domain("t2", t2));
    }
    let base = ep_omega(p, tol / 4.0)?;
    let (s, w) = (p.sigma, p.omega);
    let factor = Complex64::from_polar((-s * t2).exp(), -w * t2)
        - Complex64::from_polar((s * t2).exp(), w * t2);
    let value = base.value * factor;
    let err = base.err_estimate * factor.norm();
    let k = KernelSum::new(vec![Atom::new(1.0, t2, -s), Atom::new(-1.0, -t2, -s)]);
    let direct = if t2 == 0.0 {
        zero()
    } else {
        k.transform_exp(w, -1.0, f64::NEG_INFINITY, f64::INFINITY, tol / 2.0)?
    };
    let discrepancy = (value - direct.value).norm();
    let allowed = 10.0 * (err + direct.err_estimate) + 4.0 * f64::EPSILON * value.norm();
    if discrepancy > allowed {
        return Err(Error::Consistency {
            what: "factored vs direct transform of E_p'",
            discrepancy,
            allowed,
        });
    }
    Ok(EpPrimeValue {
        value,
        err_estimate: err.max(discrepancy),
        direct: direct.value,
        discrepancy,
    })
}

/// Transform of the two-sided exponential `h(t) = e^{-sigma |t|}`.
pub fn h_omega(omega: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(Error::domain("sigma (need 0 < sigma < 1/2)", sigma));
    }
    check_omega(omega)?;
    Ok(2.0 * sigma / (sigma * sigma + omega * omega))
}

/// Atoms of `pref * q1(tau; t0)`, with `d pref / d t0 = dpref`.
fn q1_atoms(sigma: f64, t0: f64, t2: f64, pref: f64, dpref: f64, out: &mut Vec<Atom>) {
    let k = -2.0 * sigma;
    // Shifts are written the same way in both halves so that shared E0
    // evaluations hit the cache.
    let shifts = |t0: f64| (t2 - t0, -t0 - t2, t0 - t2, t0 + t2);
    let (c1, c2, c3, c4) = shifts(t0);
    out.push(
        Atom::new(pref, c1, k)
            .with_coef_rate(dpref)
            .with_shift_rates(-1.0, 1.0),
    );
    out.push(
        Atom::new(-pref, c2, k)
            .with_coef_rate(-dpref)
            .with_shift_rates(-1.0, -1.0),
    );
    out.push(
        Atom::new(pref, c3, 0.0)
            .with_coef_rate(dpref)
            .with_shift_rates(1.0, -1.0),
    );
    out.push(
        Atom::new(-pref, c4, 0.0)
            .with_coef_rate(-dpref)
            .with_shift_rates(1.0, 1.0),
    );
}

/// `q1(tau; t0)` as a kernel sum.
fn g1_kernel(w: &WindowParams) -> KernelSum {
    let mut atoms = Vec::with_capacity(4);
    q1_atoms(w.sigma, w.t0, w.t2, 1.0, 0.0, &mut atoms);
    KernelSum::new(atoms)
}

/// `Q(tau) = e^{-2 sigma t0} q1(tau; t0) + e^{2 sigma t0} q1(tau; -t0)`, with
/// parameter derivatives carried by the atoms.
pub(crate) fn gr_kernel(w: &WindowParams) -> KernelSum {
    let (s, t0, t2) = (w.sigma, w.t0, w.t2);
    let p1 = (-2.0 * s * t0).exp();
    let p2 = (2.0 * s * t0).exp();
    let mut atoms = Vec::with_capacity(8);
    q1_atoms(s, t0, t2, p1, -2.0 * s * p1, &mut atoms);
    // Second half: q1 at -t0, so the shift rates in t0 flip sign.
    let mut second = Vec::with_capacity(4);
    q1_atoms(s, -t0, t2, p2, 2.0 * s * p2, &mut second);
    for a in second {
        atoms.push(a.with_shift_rates(-a.dshift[0], a.dshift[1]));
    }
    KernelSum::new(atoms)
}

/// `G1R(omega; t0)`; not itself even in `t0`.
pub fn g1r(omega: f64, w: &WindowParams, tol: f64) -> Result<QuadratureResult<f64>> {
    check_omega(omega)?;
    if w.is_degenerate() {
        return Ok(zero());
    }
    g1_kernel(w).transform(omega, f64::NEG_INFINITY, 0.0, Trig::Cos, tol)
}

/// Real window transform `G_R(omega)`; even in `omega` and in `t0`.
pub fn gr(omega: f64, w: &WindowParams, tol: f64) -> Result<QuadratureResult<f64>> {
    check_omega(omega)?;
    if w.is_degenerate() {
        return Ok(zero());
    }
    // Frequency enters only through cos, so evaluate at |omega| for exact evenness.
    gr_kernel(w).transform(omega.abs(), f64::NEG_INFINITY, 0.0, Trig::Cos, tol)
}

/// Which partial derivative of `G_R` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Partial {
    Omega,
    Omega2,
    T0,
    T2,
}

/// Analytic partial derivatives of `G_R`.
pub fn gr_partials(
    omega: f64,
    w: &WindowParams,
    which: Partial,
    tol: f64,
) -> Result<QuadratureResult<f64>> {
    check_omega(omega)?;
    if w.is_degenerate() && which != Partial::T2 {
        return Ok(zero());
    }
    let q = if w.is_degenerate() {
        // Differentiating in t2 at t2 = 0 still sees the shift rates.
        gr_kernel(&w.with_t2(0.0))
    } else {
        gr_kernel(w)
    };
    let lo = f64::NEG_INFINITY;
    match which {
        Partial::Omega => Ok(q
            .times_power(1)
            .transform(omega, lo, 0.0, Trig::Sin, tol)?
            .map(|v| -v)),
        Partial::Omega2 => Ok(q
            .times_power(2)
            .transform(omega, lo, 0.0, Trig::Cos, tol)?
            .map(|v| -v)),
        Partial::T0 => q.d_param(0).transform(omega, lo, 0.0, Trig::Cos, tol),
        Partial::T2 => q.d_param(1).transform(omega, lo, 0.0, Trig::Cos, tol),
    }
}

/// Coefficient `c` in `G_R(omega) ~ c / omega^2` as `|omega| -> inf`: the
/// slope at `tau = 0` of the `G_R` integrand.
pub fn gr_leading_coefficient(w: &WindowParams) -> f64 {
    if w.is_degenerate() {
        0.0
    } else {
        gr_kernel(w).eval_dtau(0.0)
    }
}

/// `F(omega) = E'_pomega(omega, t2) (e^{-sigma t0} e^{i omega t0} + e^{sigma t0} e^{-i omega t0})`.
pub fn f_omega(omega: f64, w: &WindowParams, tol: f64) -> Result<QuadratureResult<Complex64>> {
    check_omega(omega)?;
    if w.is_degenerate() {
        return Ok(zero());
    }
    let ep = ep_prime_omega(StripPoint::new(w.sigma, omega)?, w.t2, tol / 4.0)?;
    let (s, t0) = (w.sigma, w.t0);
    let factor = Complex64::from_polar((-s * t0).exp(), omega * t0)
        + Complex64::from_polar((s * t0).exp(), -omega * t0);
    Ok(QuadratureResult {
        value: ep.value * factor,
        err_estimate: ep.err_estimate * factor.norm(),
        panels: 0,
        roundoff_limited: false,
    })
}

/// `f(0) = -2 sinh(2 sigma t0) E0'(t0, t2)`.
pub fn f_at_zero(w: &WindowParams) -> f64 {
    let e = crate::theta::e0_value(w.t0 - w.t2) - crate::theta::e0_value(w.t0 + w.t2);
    -2.0 * (2.0 * w.sigma * w.t0).sinh() * e
}

/// Lorentzian pair `1/(sigma^2 + (omega - x)^2) + 1/(sigma^2 + (omega + x)^2)`.
fn lorentz_pair(sigma: f64, omega: f64, x: f64) -> f64 {
    let s2 = sigma * sigma;
    1.0 / (s2 + (omega - x) * (omega - x)) + 1.0 / (s2 + (omega + x) * (omega + x))
}

/// Real part of `F` rebuilt from `G_R` by convolution with `H`:
/// `F_R(omega) = (sigma / pi) int_0^inf G_R(x) [L(omega - x) + L(omega + x)] dx`
/// with `L(y) = 1 / (sigma^2 + y^2)`.
///
/// Beyond a cutoff `Omega` the tail uses the leading asymptotic term
/// `G_R(x) ~ Q'(0) / x^2`, where `Q` is the integrand of `G_R`, plus a
/// `1/x^4` correction fitted at the cutoff; the reported error includes the
/// full size of that correction.
pub fn fr_convolution(omega: f64, w: &WindowParams, tol: f64) -> Result<QuadratureResult<f64>> {
    check_omega(omega)?;
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance", tol));
    }
    if w.is_degenerate() {
        return Ok(zero());
    }
    let sigma = w.sigma;
    let q = gr_kernel(w);
    let cutoff = 40.0 + 2.0 * omega.abs();
    let inner_tol = 1e-14;
    let sampled = SampledTransform::new(&q, f64::NEG_INFINITY, 0.0, cutoff, inner_tol);
    let scale = sigma / PI;

    let outer_opts = QuadOptions::new(0.5 * tol / scale).with_max_panel_width(sigma.min(0.5));
    let mut inner_err = 0.0f64;
    let body = integrate(
        |x: f64| {
            let (g, _) = sampled.cos_transform(x);
            g * lorentz_pair(sigma, omega, x)
        },
        0.0,
        cutoff,
        &outer_opts,
    )?;
    // The sampled transform's error is bounded at a few probe frequencies and
    // weighted by the total kernel mass, (sigma / pi) int L <= 2.
    for k in 0..=8 {
        let (_, e) = sampled.cos_transform(cutoff * k as f64 / 8.0);
        inner_err = inner_err.max(e);
    }

    let a2 = q.eval_dtau(0.0);
    let (g_cut, _) = sampled.cos_transform(cutoff);
    let residual = g_cut - a2 / (cutoff * cutoff);
    let tail_opts = QuadOptions::new(1e-6 * tol / scale);
    // x = cutoff / u maps [cutoff, inf) onto (0, 1].
    let tail = integrate(
        |u: f64| {
            if u == 0.0 {
                0.0
            } else {
                lorentz_pair(sigma, omega, cutoff / u) / cutoff
            }
        },
        0.0,
        1.0,
        &tail_opts,
    )?;
    let next = integrate(
        |u: f64| {
            if u == 0.0 {
                0.0
            } else {
                u * u * lorentz_pair(sigma, omega, cutoff / u) * cutoff
            }
        },
        0.0,
        1.0,
        &tail_opts,
    )?;
    // The residual at the cutoff estimates the 1/x^4 term; it is added as a
    // correction and its full size is kept in the error estimate.
    let correction = residual * next.value;
    let value = scale * (body.value + a2 * tail.value + correction);
    let err = scale * body.err_estimate
        + 2.0 * inner_err
        + scale
            * (correction.abs()
                + a2.abs() * tail.err_estimate
                + residual.abs() * next.err_estimate);
    Ok(QuadratureResult {
        value,
        err_estimate: err,
        panels: body.panels,
        roundoff_limited: body.roundoff_limited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn win() -> WindowParams {
        WindowParams::new(0.25, 1.0, 0.5).unwrap()
    }

    #[test]
    fn window_domain() {
        assert!(WindowParams::new(0.0, 1.0, 0.0).is_err());
        assert!(WindowParams::new(0.5, 1.0, 0.0).is_err());
        assert!(WindowParams::new(0.2, f64::NAN, 0.0).is_err());
        assert!(WindowParams::new(0.2, 0.0, 0.0).unwrap().is_degenerate());
    }

    #[test]
    fn degenerate_window_is_exactly_zero() {
        let w = WindowParams::new(0.25, 0.0, 0.7).unwrap();
        assert_eq!(gr(3.0, &w, 1e-12).unwrap().value, 0.0);
        assert_eq!(
            f_omega(3.0, &w, 1e-12).unwrap().value,
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn h_transform_values() {
        assert!((h_omega(0.0, 0.25).unwrap() - 8.0).abs() < 1e-15);
        assert!(h_omega(1.0, 0.0).is_err());
    }

    #[test]
    fn gr_is_even_in_omega_exactly() {
        let w = win();
        assert_eq!(
            gr(2.3, &w, 1e-12).unwrap().value,
            gr(-2.3, &w, 1e-12).unwrap().value
        );
    }

    #[test]
    fn kernel_second_half_matches_reflected_g1r() {
        let w = win();
        let direct = gr(1.7, &w, 1e-13).unwrap().value;
        let a = g1r(1.7, &w, 1e-13).unwrap().value;
        let b = g1r(1.7, &w.with_t0(-w.t0), 1e-13).unwrap().value;
        let s = w.sigma * w.t0;
        let combined = (-2.0 * s).exp() * a + (2.0 * s).exp() * b;
        assert!((direct - combined).abs() < 1e-12, "{direct} vs {combined}");
    }

    #[test]
    fn lorentz_mass() {
        // (sigma / pi) int_0^inf pair = 1 for omega = 0
        let s = 0.3;
        let r = integrate(
            |x: f64| lorentz_pair(s, 0.0, x),
            0.0,
            1e4,
            &QuadOptions::new(1e-10).with_max_panel_width(1.0),
        )
        .unwrap();
        assert!((s / PI * r.value - 1.0).abs() < 1e-4);
    }
}
