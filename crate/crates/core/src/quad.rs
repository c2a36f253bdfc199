//! Globally adaptive 15-point Gauss-Kronrod quadrature.
//!
//! Error estimates follow the QUADPACK heuristic: the raw Kronrod/Gauss
//! difference is rescaled against the mean deviation of the integrand and
//! floored at `50 eps` times the integral of `|f|`. Panels whose estimate sits
//! on that roundoff floor are not split further; when only such panels remain
//! the result comes back with `roundoff_limited` set instead of looping until
//! the panel cap.

use crate::error::{Error, Result};
use crate::theta::CompensatedSum;
use num_complex::Complex64;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes (index 7 is the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values the integrator can accumulate.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub err_estimate: f64,
    pub panels: usize,
    /// Set when the requested tolerance was below the roundoff floor of the
    /// integrand; `err_estimate` is then the floor actually reached.
    pub roundoff_limited: bool,
}

impl<T> QuadratureResult<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> QuadratureResult<U> {
        QuadratureResult {
            value: f(self.value),
            err_estimate: self.err_estimate,
            panels: self.panels,
            roundoff_limited: self.roundoff_limited,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute error target.
    pub tol: f64,
    /// Relative error target; the run stops when either target is met.
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Initial panels are no wider than this.
    pub max_panel_width: f64,
    /// Treat roundoff as proportional to the largest integrand magnitude
    /// seen so far rather than to each panel's own magnitude. Right for
    /// integrands computed by cancelling large terms; wrong for integrable
    /// singularities, which it would stop refining too early.
    pub peak_noise: bool,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        QuadOptions {
            tol,
            rel_tol: 0.0,
            max_panels: 20_000,
            max_panel_width: f64::INFINITY,
            peak_noise: false,
        }
    }

    pub fn with_peak_noise(mut self) -> Self {
        self.peak_noise = true;
        self
    }

    pub fn with_rel_tol(mut self, rel: f64) -> Self {
        self.rel_tol = rel;
        self
    }

    pub fn with_max_panel_width(mut self, w: f64) -> Self {
        self.max_panel_width = w;
        self
    }

    /// Panels no wider than a quarter period of `cos(omega t)` and no wider
    /// than `smooth_width`.
    pub fn for_frequency(tol: f64, omega: f64, smooth_width: f64) -> Self {
        let quarter = std::f64::consts::FRAC_PI_2 / omega.abs().max(1e-300);
        Self::new(tol).with_max_panel_width(quarter.min(smooth_width))
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    resabs: f64,
    fmax: f64,
    at_floor: bool,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T> Eq for Panel<T> {}

impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> Panel<T> {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let fc = f(centr);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = WGK[7] * fc.magnitude();
    let mut fmax = fc.magnitude();
    let mut fv1 = [T::default(); 7];
    let mut fv2 = [T::default(); 7];
    for j in 0..7 {
        let dx = hlgth * XGK[j];
        let f1 = f(centr - dx);
        let f2 = f(centr + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        fmax = fmax.max(f1.magnitude()).max(f2.magnitude());
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).magnitude();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).magnitude() + (fv2[j] - reskh).magnitude());
    }
    let h = hlgth.abs();
    let resabs = resabs * h;
    let resasc = resasc * h;
    let mut err = ((resk - resg) * hlgth).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if floor > f64::MIN_POSITIVE {
        err = err.max(floor);
    }
    Panel {
        a,
        b,
        value: resk * hlgth,
        err,
        resabs,
        fmax,
        at_floor: false,
    }
}

/// Marks panels whose estimate is at the roundoff level. With `fmax > 0`
/// the noise scale also includes that global peak magnitude.
fn settle<T>(mut p: Panel<T>, fmax: f64) -> Panel<T> {
    let h = p.b - p.a;
    let floor = 50.0 * f64::EPSILON * p.resabs.max(h * fmax);
    let narrow = h <= 1e-13 * p.a.abs().max(p.b.abs()).max(1.0);
    p.at_floor = p.err <= floor || narrow;
    p
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(
            "finite integration limit",
            if a.is_finite() { b } else { a },
        ));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::domain("quadrature tolerance", opts.tol));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::default(),
            err_estimate: 0.0,
            panels: 0,
            roundoff_limited: false,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let n0 = ((hi - lo) / opts.max_panel_width).ceil().max(1.0) as usize;
    if n0 > opts.max_panels {
        return Err(Error::SubdivisionCap {
            panels: n0,
            err_estimate: f64::INFINITY,
            tol: opts.tol,
        });
    }
    let width = (hi - lo) / n0 as f64;
    let mut active = BinaryHeap::with_capacity(n0 * 2);
    let mut settled = Vec::new();
    let mut total_err = 0.0;
    let mut initial = Vec::with_capacity(n0);
    let mut fmax = 0.0f64;
    for k in 0..n0 {
        let pa = lo + width * k as f64;
        let pb = if k + 1 == n0 {
            hi
        } else {
            lo + width * (k + 1) as f64
        };
        let p = gk15(&f, pa, pb);
        fmax = fmax.max(p.fmax);
        initial.push(p);
    }
    let mut total_value = T::default();
    for p in initial {
        let p = settle(p, if opts.peak_noise { fmax } else { 0.0 });
        total_err += p.err;
        total_value = total_value + p.value;
        if p.at_floor {
            settled.push(p);
        } else {
            active.push(p);
        }
    }
    let mut panels = n0;
    let target = |v: T| opts.tol.max(opts.rel_tol * v.magnitude());
    loop {
        if total_err <= target(total_value) {
            // Running sums drift; confirm with an exact recount.
            total_err = active.iter().chain(settled.iter()).map(|p| p.err).sum();
            if total_err <= target(total_value) {
                break;
            }
        }
        let Some(worst) = active.pop() else {
            break;
        };
        if panels + 1 > opts.max_panels {
            active.push(worst);
            let err: f64 = active.iter().chain(settled.iter()).map(|p| p.err).sum();
            return Err(Error::SubdivisionCap {
                panels,
                err_estimate: err,
                tol: opts.tol,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        total_err += left.err + right.err - worst.err;
        total_value = total_value + left.value + right.value - worst.value;
        panels += 1;
        fmax = fmax.max(left.fmax).max(right.fmax);
        for p in [left, right] {
            let p = settle(p, if opts.peak_noise { fmax } else { 0.0 });
            if p.at_floor {
                settled.push(p);
            } else {
                active.push(p);
            }
        }
    }
    let mut all: Vec<Panel<T>> = active.into_vec();
    let roundoff_limited = all.is_empty() && {
        let e: f64 = settled.iter().map(|p| p.err).sum();
        e > target(total_value)
    };
    all.extend(settled);
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = T::default();
    let mut err = CompensatedSum::default();
    for p in &all {
        value = value + p.value;
        err.add(p.err);
    }
    Ok(QuadratureResult {
        value: value * sign,
        err_estimate: err.value(),
        panels,
        roundoff_limited,
    })
}

/// Integration limit for [`integrate_decaying`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Finite(f64),
    NegInfinity,
    PosInfinity,
}

/// Tail majorants for [`integrate_decaying`].
///
/// `lower(x)` must bound `int_{-inf}^{x} |f|` and `upper(x)` must bound
/// `int_x^{inf} |f|`; either may be omitted when that side is finite.
pub struct TailMajorant<'a> {
    pub lower: Option<&'a dyn Fn(f64) -> f64>,
    pub upper: Option<&'a dyn Fn(f64) -> f64>,
}

/// Share of the tolerance spent on truncating infinite tails.
const TAIL_SHARE: f64 = 1e-3;

fn truncation_point(
    bound: &dyn Fn(f64) -> f64,
    anchor: f64,
    direction: f64,
    threshold: f64,
    side: &'static str,
) -> Result<(f64, f64)> {
    let mut h = 0.25;
    for _ in 0..64 {
        let x = anchor + direction * h;
        let b = bound(x);
        if b <= threshold {
            return Ok((x, b));
        }
        h *= 1.5;
    }
    Err(Error::Truncation { side })
}

/// Integrates `f` over `[a, b]` where either limit may be infinite.
///
/// Infinite limits are replaced by the first point (stepping outward from
/// the other limit, or from 0) where the caller's majorant drops below a
/// thousandth of the tolerance; the majorant value is added to the error
/// estimate.
pub fn integrate_decaying<T, F>(
    f: F,
    a: Endpoint,
    b: Endpoint,
    tails: &TailMajorant<'_>,
    opts: &QuadOptions,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let threshold = opts.tol * TAIL_SHARE;
    let anchor = match (a, b) {
        (Endpoint::Finite(x), _) | (_, Endpoint::Finite(x)) => x,
        _ => 0.0,
    };
    let mut tail_err = 0.0;
    let lo = match a {
        Endpoint::Finite(x) => x,
        Endpoint::NegInfinity => {
            let bound = tails.lower.ok_or(Error::Truncation { side: "lower" })?;
            let start = if matches!(b, Endpoint::Finite(_)) {
                anchor
            } else {
                0.0
            };
            let (x, e) = truncation_point(bound, start, -1.0, threshold, "lower")?;
            tail_err += e;
            x
        }
        Endpoint::PosInfinity => return Err(Error::domain("lower limit", f64::INFINITY)),
    };
    let hi = match b {
        Endpoint::Finite(x) => x,
        Endpoint::PosInfinity => {
            let bound = tails.upper.ok_or(Error::Truncation { side: "upper" })?;
            let start = if matches!(a, Endpoint::Finite(_)) {
                anchor
            } else {
                0.0
            };
            let (x, e) = truncation_point(bound, start, 1.0, threshold, "upper")?;
            tail_err += e;
            x
        }
        Endpoint::NegInfinity => return Err(Error::domain("upper limit", f64::NEG_INFINITY)),
    };
    let inner = QuadOptions {
        tol: opts.tol - tail_err,
        ..*opts
    };
    let mut r = integrate(f, lo, hi, &inner)?;
    r.err_estimate += tail_err;
    Ok(r)
}

/// Nodes in ascending order on `[-1, 1]` with Kronrod and embedded Gauss
/// weights (zero on Kronrod-only nodes).
pub(crate) fn gk15_rule() -> ([f64; 15], [f64; 15], [f64; 15]) {
    let mut x = [0.0; 15];
    let mut wk = [0.0; 15];
    let mut wg = [0.0; 15];
    for j in 0..7 {
        x[j] = -XGK[j];
        x[14 - j] = XGK[j];
        wk[j] = WGK[j];
        wk[14 - j] = WGK[j];
        if j % 2 == 1 {
            wg[j] = WG[j / 2];
            wg[14 - j] = WG[j / 2];
        }
    }
    wk[7] = WGK[7];
    wg[7] = WG[3];
    (x, wk, wg)
}
