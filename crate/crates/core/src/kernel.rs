//! Linear combinations of shifted, tilted copies of `E0` and `E0'`, and their
//! cosine/sine/exponential transforms over half-lines or the whole line.
//!
//! Every windowed integrand in the crate is a sum of atoms
//! `coef * E0^{(d)}(tau - shift) * exp(kappa tau) * tau^power`. Keeping that
//! structure explicit gives exact support bounds, exact `tau`-derivatives, and
//! exact parameter derivatives without any finite differencing.

use crate::error::{Error, Result};
use crate::quad::{gk15_rule, integrate, QuadOptions, QuadValue, QuadratureResult};
use crate::theta::{e0_deriv_value, kernel_tail_bound};
use num_complex::Complex64;

/// Panels never exceed this width, even at zero frequency.
pub(crate) const SMOOTH_PANEL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Atom {
    pub coef: f64,
    pub shift: f64,
    pub deriv: u8,
    pub kappa: f64,
    pub power: u32,
    /// d coef / d t0
    pub dcoef_dt0: f64,
    /// d shift / d t0 and d shift / d t2
    pub dshift: [f64; 2],
}

impl Atom {
    pub(crate) fn new(coef: f64, shift: f64, kappa: f64) -> Self {
        Atom {
            coef,
            shift,
            deriv: 0,
            kappa,
            power: 0,
            dcoef_dt0: 0.0,
            dshift: [0.0, 0.0],
        }
    }

    pub(crate) fn with_shift_rates(mut self, dt0: f64, dt2: f64) -> Self {
        self.dshift = [dt0, dt2];
        self
    }

    pub(crate) fn with_coef_rate(mut self, dcoef_dt0: f64) -> Self {
        self.dcoef_dt0 = dcoef_dt0;
        self
    }

    fn weight(&self, tau: f64) -> f64 {
        let mut w = self.coef;
        if self.kappa != 0.0 {
            w *= (self.kappa * tau).exp();
        }
        if self.power > 0 {
            w *= tau.powi(self.power as i32);
        }
        w
    }

    /// Half-width `T` beyond which this atom's contribution to the integral
    /// of `|atom|` is below `threshold`, with the bound actually reached on
    /// each side.
    fn reach(&self, threshold: f64) -> (f64, f64, f64) {
        let c = self.shift;
        let scale =
            self.coef.abs() * (self.kappa * c).exp() * (1.0 + c.abs()).powi(self.power as i32);
        if scale == 0.0 {
            return (1.0, 0.0, 0.0);
        }
        // t >= 1 keeps |shift - s| <= (1 + |shift|) s valid in the power bound.
        let mut t = 1.0;
        loop {
            let lo = scale * kernel_tail_bound(t, self.deriv, -self.kappa, self.power);
            let hi = scale * kernel_tail_bound(t, self.deriv, self.kappa, self.power);
            if (lo <= threshold && hi <= threshold) || t > 8.0 {
                return (t, lo, hi);
            }
            t += 0.05;
        }
    }
}

/// Which transform to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Trig {
    Cos,
    Sin,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KernelSum {
    atoms: Vec<Atom>,
}

impl KernelSum {
    pub(crate) fn new(atoms: Vec<Atom>) -> Self {
        KernelSum {
            atoms: atoms.into_iter().filter(|a| a.coef != 0.0).collect(),
        }
    }

    /// Multiplies every atom by `tau^k`.
    pub(crate) fn times_power(&self, k: u32) -> Self {
        KernelSum::new(
            self.atoms
                .iter()
                .map(|a| Atom {
                    power: a.power + k,
                    ..*a
                })
                .collect(),
        )
    }

    /// Derivative with respect to window parameter `t0` (`which = 0`) or
    /// `t2` (`which = 1`).
    pub(crate) fn d_param(&self, which: usize) -> Self {
        let mut out = Vec::with_capacity(self.atoms.len() * 2);
        for a in &self.atoms {
            if which == 0 && a.dcoef_dt0 != 0.0 {
                out.push(Atom {
                    coef: a.dcoef_dt0,
                    dcoef_dt0: 0.0,
                    ..*a
                });
            }
            let ds = a.dshift[which];
            if ds != 0.0 {
                assert!(a.deriv == 0, "second derivatives of E0 are not supported");
                out.push(Atom {
                    coef: -a.coef * ds,
                    deriv: 1,
                    dcoef_dt0: 0.0,
                    ..*a
                });
            }
        }
        KernelSum::new(out)
    }

    /// Value of the integrand at `tau`.
    pub(crate) fn eval(&self, tau: f64) -> f64 {
        // Several atoms usually share a shift; evaluate each E0 once.
        let mut cache: [(f64, u8, f64); 16] = [(f64::NAN, 0, 0.0); 16];
        let mut used = 0;
        let mut sum = 0.0;
        for a in &self.atoms {
            let x = tau - a.shift;
            let mut k = None;
            for (i, c) in cache[..used].iter().enumerate() {
                if c.0 == x && c.1 == a.deriv {
                    k = Some(i);
                    break;
                }
            }
            let e = match k {
                Some(i) => cache[i].2,
                None => {
                    let v = e0_deriv_value(x, a.deriv);
                    if used < cache.len() {
                        cache[used] = (x, a.deriv, v);
                        used += 1;
                    }
                    v
                }
            };
            if e != 0.0 {
                sum += e * a.weight(tau);
            }
        }
        sum
    }

    /// Exact `d/dtau` at `tau`.
    pub(crate) fn eval_dtau(&self, tau: f64) -> f64 {
        let mut sum = 0.0;
        for a in &self.atoms {
            assert!(a.deriv == 0, "second derivatives of E0 are not supported");
            let x = tau - a.shift;
            let e = crate::theta::e0_value(x);
            let de = crate::theta::de0_value(x);
            let w = a.coef * (a.kappa * tau).exp();
            let p = a.power as i32;
            let poly = tau.powi(p);
            let dpoly = if p > 0 {
                p as f64 * tau.powi(p - 1)
            } else {
                0.0
            };
            sum += w * ((de + a.kappa * e) * poly + e * dpoly);
        }
        sum
    }

    /// Interval outside of which the integral of `|integrand|` is below
    /// `threshold`, plus the bound on what was cut on each side.
    pub(crate) fn support(&self, threshold: f64) -> Support {
        let n = self.atoms.len().max(1) as f64;
        let mut s = Support {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
            lower_tail: 0.0,
            upper_tail: 0.0,
        };
        for a in &self.atoms {
            let (t, lo_b, hi_b) = a.reach(threshold / n);
            s.lo = s.lo.min(a.shift - t);
            s.hi = s.hi.max(a.shift + t);
            s.lower_tail += lo_b;
            s.upper_tail += hi_b;
        }
        if self.atoms.is_empty() {
            s.lo = 0.0;
            s.hi = 0.0;
        }
        s
    }

    /// `int_a^b integrand(tau) trig(omega tau) dtau` where `a`, `b` may be
    /// infinite.
    pub(crate) fn transform(
        &self,
        omega: f64,
        a: f64,
        b: f64,
        trig: Trig,
        tol: f64,
    ) -> Result<QuadratureResult<f64>> {
        let f = |tau: f64| {
            let v = self.eval(tau);
            match trig {
                Trig::Cos => v * (omega * tau).cos(),
                Trig::Sin => v * (omega * tau).sin(),
            }
        };
        self.integrate_over(f, omega, a, b, tol)
    }

    /// `int_a^b integrand(tau) exp(i sign omega tau) dtau`.
    pub(crate) fn transform_exp(
        &self,
        omega: f64,
        sign: f64,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Result<QuadratureResult<Complex64>> {
        let f = |tau: f64| {
            let v = self.eval(tau);
            Complex64::from_polar(v, sign * omega * tau)
        };
        self.integrate_over(f, omega, a, b, tol)
    }

    fn integrate_over<T: QuadValue>(
        &self,
        f: impl Fn(f64) -> T,
        omega: f64,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Result<QuadratureResult<T>> {
        if !(tol > 0.0) {
            return Err(Error::domain("quadrature tolerance", tol));
        }
        let sup = self.support(tol * 1e-3);
        let lo = a.max(sup.lo);
        let hi = b.min(sup.hi);
        let mut cut = 0.0;
        if a < sup.lo {
            cut += sup.lower_tail;
        }
        if b > sup.hi {
            cut += sup.upper_tail;
        }
        if !(lo < hi) {
            // Entire range lies in the negligible tails.
            let (la, lb) = (a.max(f64::MIN), b.min(f64::MAX));
            let bound = if lb <= sup.lo {
                sup.lower_tail
            } else if la >= sup.hi {
                sup.upper_tail
            } else {
                sup.lower_tail + sup.upper_tail
            };
            return Ok(QuadratureResult {
                value: T::default(),
                err_estimate: bound,
                panels: 0,
                roundoff_limited: false,
            });
        }
        let opts = QuadOptions::for_frequency((tol - cut).max(0.5 * tol), omega, SMOOTH_PANEL)
            .with_peak_noise();
        let mut r = integrate(f, lo, hi, &opts)?;
        r.err_estimate += cut;
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Support {
    pub lo: f64,
    pub hi: f64,
    pub lower_tail: f64,
    pub upper_tail: f64,
}

/// Composite GK15 rule on a fixed panel grid with the integrand sampled once.
///
/// Used where the same kernel is transformed at many frequencies up to a
/// known maximum: the grid is fine enough for that maximum, and every
/// transform carries its own embedded Gauss-7 error estimate.
pub(crate) struct SampledTransform {
    nodes: Vec<f64>,
    kronrod: Vec<f64>,
    gauss: Vec<f64>,
    values: Vec<f64>,
    abs_cut: f64,
}

impl SampledTransform {
    pub(crate) fn new(kernel: &KernelSum, a: f64, b: f64, omega_max: f64, tol: f64) -> Self {
        let sup = kernel.support(tol * 1e-3);
        let lo = a.max(sup.lo);
        let hi = b.min(sup.hi);
        let mut abs_cut = 0.0;
        if a < sup.lo {
            abs_cut += sup.lower_tail;
        }
        if b > sup.hi {
            abs_cut += sup.upper_tail;
        }
        let mut st = SampledTransform {
            nodes: Vec::new(),
            kronrod: Vec::new(),
            gauss: Vec::new(),
            values: Vec::new(),
            abs_cut,
        };
        if !(lo < hi) {
            return st;
        }
        let width = (std::f64::consts::FRAC_PI_2 / omega_max.max(1e-300)).min(SMOOTH_PANEL);
        let n = ((hi - lo) / width).ceil().max(1.0) as usize;
        let h = (hi - lo) / n as f64;
        let (xk, wk, wg) = gk15_rule();
        for k in 0..n {
            let c = lo + h * (k as f64 + 0.5);
            for j in 0..15 {
                let x = c + 0.5 * h * xk[j];
                st.nodes.push(x);
                st.kronrod.push(0.5 * h * wk[j]);
                st.gauss.push(0.5 * h * wg[j]);
                st.values.push(kernel.eval(x));
            }
        }
        st
    }

    /// Cosine transform and error estimate.
    pub(crate) fn cos_transform(&self, omega: f64) -> (f64, f64) {
        let mut total = 0.0;
        let mut err = self.abs_cut;
        for chunk in 0..self.nodes.len() / 15 {
            let mut rk = 0.0;
            let mut rg = 0.0;
            let mut ra = 0.0;
            for j in chunk * 15..chunk * 15 + 15 {
                let v = self.values[j] * (omega * self.nodes[j]).cos();
                rk += self.kronrod[j] * v;
                rg += self.gauss[j] * v;
                ra += self.kronrod[j] * v.abs();
            }
            total += rk;
            let raw = (rk - rg).abs();
            // Same rescaling as the adaptive rule, with resabs standing in for resasc.
            let e = if ra > 0.0 && raw > 0.0 {
                ra * (200.0 * raw / ra).powf(1.5).min(1.0)
            } else {
                raw
            };
            err += e.max(50.0 * f64::EPSILON * ra);
        }
        (total, err)
    }
}
