//! First positive zero crossing `omega_z` of `G_R`, its continuation along
//! paths in `(t0, t2)`, the quarter-period condition `omega_z t0 = pi / 2`
//! on the ray `t2 = 2 t0`, and the half-line integral `P_odd`.

use crate::error::{Error, Result};
use crate::fourier::{gr, gr_partials, Partial, WindowParams};
use crate::kernel::{Atom, KernelSum};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub sigma: f64,
    pub t2: f64,
    pub t0: f64,
    pub omega_z: f64,
    /// `dG_R/domega` at the crossing.
    pub slope: f64,
    pub bracket: (f64, f64),
    /// `|slope|` fell below the configured floor.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub omega_floor: f64,
    pub omega_max: f64,
    pub step: f64,
    /// Final bracket width.
    pub tol: f64,
    /// Absolute tolerance for each `G_R` evaluation.
    pub gr_tol: f64,
    /// Samples with `|G_R|` below this carry no sign.
    pub plateau: f64,
    pub slope_floor: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            omega_floor: 1e-3,
            omega_max: 50.0,
            step: 0.05,
            tol: 1e-12,
            gr_tol: 1e-14,
            plateau: 1e-12,
            slope_floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingScan {
    pub crossing: Option<CrossingRecord>,
    /// `t2 = 0`: `G_R` vanishes identically.
    pub identically_zero: bool,
    /// More than one sign change turned up inside the bracketing step.
    pub step_too_coarse: bool,
    pub scanned: (f64, f64),
}

fn g(omega: f64, w: &WindowParams, opts: &ScanOptions) -> Result<f64> {
    Ok(gr(omega, w, opts.gr_tol)?.value)
}

fn sign_of(v: f64, plateau: f64) -> i8 {
    if v > plateau {
        1
    } else if v < -plateau {
        -1
    } else {
        0
    }
}

/// Bisects a sign change of `G_R` on `[a, b]` with known end values.
fn bisect(
    w: &WindowParams,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    opts: &ScanOptions,
) -> Result<(f64, f64, f64)> {
    while b - a > opts.tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = g(m, w, opts)?;
        if fm == 0.0 {
            return Ok((m, m, m));
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b), a, b))
}

fn record(
    w: &WindowParams,
    omega_z: f64,
    bracket: (f64, f64),
    opts: &ScanOptions,
) -> Result<CrossingRecord> {
    let slope = gr_partials(omega_z, w, Partial::Omega, opts.gr_tol)?.value;
    Ok(CrossingRecord {
        sigma: w.sigma,
        t2: w.t2,
        t0: w.t0,
        omega_z,
        slope,
        bracket,
        degenerate: slope.abs() < opts.slope_floor,
    })
}

/// Scans `(omega_floor, omega_max]` on a uniform grid for the first sign
/// change of `G_R` and refines it by bisection.
pub fn scan_first_crossing(w: &WindowParams, opts: &ScanOptions) -> Result<CrossingScan> {
    if !(opts.step > 0.0) || !(opts.omega_max > opts.omega_floor) {
        return Err(Error::Grid(format!(
            "scan needs step > 0 and omega_max > omega_floor, got step {} on ({}, {}]",
            opts.step, opts.omega_floor, opts.omega_max
        )));
    }
    let scanned = (opts.omega_floor, opts.omega_max);
    let mut out = CrossingScan {
        crossing: None,
        identically_zero: w.is_degenerate(),
        step_too_coarse: false,
        scanned,
    };
    if w.is_degenerate() {
        return Ok(out);
    }
    let n = ((opts.omega_max - opts.omega_floor) / opts.step).ceil() as usize;
    let grid = |k: usize| (opts.omega_floor + opts.step * k as f64).min(opts.omega_max);
    let mut last: Option<(f64, f64)> = None;
    for k in 0..=n {
        let om = grid(k);
        let v = g(om, w, opts)?;
        let s = sign_of(v, opts.plateau);
        if s == 0 {
            continue;
        }
        if let Some((pa, pv)) = last {
            if sign_of(pv, opts.plateau) != s {
                let (a, b, fa) = refine_step(w, pa, om, pv, opts, &mut out.step_too_coarse)?;
                let (z, lo, hi) = bisect(w, a, b, fa, opts)?;
                out.crossing = Some(record(w, z, (lo, hi), opts)?);
                return Ok(out);
            }
        }
        last = Some((om, v));
    }
    Ok(out)
}

/// Subsamples one grid step; if it hides more than one sign change the
/// first is kept and the step is flagged.
fn refine_step(
    w: &WindowParams,
    a: f64,
    b: f64,
    fa: f64,
    opts: &ScanOptions,
    coarse: &mut bool,
) -> Result<(f64, f64, f64)> {
    const SUB: usize = 8;
    let mut pts = Vec::with_capacity(SUB + 1);
    pts.push((a, fa));
    for k in 1..SUB {
        let x = a + (b - a) * k as f64 / SUB as f64;
        pts.push((x, g(x, w, opts)?));
    }
    pts.push((b, g(b, w, opts)?));
    let signed: Vec<(f64, f64)> = pts
        .into_iter()
        .filter(|p| sign_of(p.1, opts.plateau) != 0)
        .collect();
    let mut first = None;
    let mut changes = 0;
    for pair in signed.windows(2) {
        if (pair[0].1 > 0.0) != (pair[1].1 > 0.0) {
            changes += 1;
            if first.is_none() {
                first = Some((pair[0].0, pair[1].0, pair[0].1));
            }
        }
    }
    if changes > 1 {
        *coarse = true;
    }
    Ok(first.unwrap_or((a, b, fa)))
}

/// Convenience wrapper around [`scan_first_crossing`].
pub fn first_crossing(
    w: &WindowParams,
    omega_max: f64,
    step: f64,
    tol: f64,
) -> Result<Option<CrossingRecord>> {
    let opts = ScanOptions {
        omega_max,
        step,
        tol,
        ..ScanOptions::default()
    };
    Ok(scan_first_crossing(w, &opts)?.crossing)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Smallest allowed step, measured in `(t0, t2)` distance.
    pub min_step: f64,
    /// The corrector window is this multiple of the predicted change.
    pub trust_factor: f64,
    /// Lower bound on the corrector half-window.
    pub min_window: f64,
    pub scan: ScanOptions,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            min_step: 1e-5,
            trust_factor: 4.0,
            min_window: 1e-3,
            scan: ScanOptions::default(),
        }
    }
}

/// Why a continuation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrackEnd {
    Completed,
    /// The corrector found no sign change even at the minimum step.
    BranchLost {
        t0: f64,
        t2: f64,
    },
    /// `|dG_R/domega|` dropped under the slope floor.
    DegenerateSlope {
        t0: f64,
        t2: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Track {
    /// One record per path vertex reached.
    pub records: Vec<CrossingRecord>,
    pub end: TrackEnd,
}

/// Locates the crossing near `guess` by bisection in `[guess - half, guess + half]`.
fn correct(
    w: &WindowParams,
    guess: f64,
    half: f64,
    opts: &ScanOptions,
) -> Result<Option<CrossingRecord>> {
    let a = (guess - half).max(opts.omega_floor);
    let b = guess + half;
    let fa = g(a, w, opts)?;
    let fb = g(b, w, opts)?;
    if sign_of(fa, opts.plateau) == 0 || sign_of(fb, opts.plateau) == 0 || (fa > 0.0) == (fb > 0.0)
    {
        return Ok(None);
    }
    let (z, lo, hi) = bisect(w, a, b, fa, opts)?;
    Ok(Some(record(w, z, (lo, hi), opts)?))
}

/// `d omega_z / d lambda` along direction `(dt0, dt2)` from the implicit
/// function theorem.
fn tangent(rec: &CrossingRecord, dt0: f64, dt2: f64, opts: &ScanOptions) -> Result<f64> {
    let w = WindowParams::new(rec.sigma, rec.t2, rec.t0)?;
    let mut num = 0.0;
    if dt0 != 0.0 {
        num += gr_partials(rec.omega_z, &w, Partial::T0, opts.gr_tol)?.value * dt0;
    }
    if dt2 != 0.0 {
        num += gr_partials(rec.omega_z, &w, Partial::T2, opts.gr_tol)?.value * dt2;
    }
    Ok(-num / rec.slope)
}

/// Follows the first crossing of the window at `path[0]` through every
/// vertex of the polyline `path` of `(t0, t2)` points.
pub fn continue_crossing(sigma: f64, path: &[(f64, f64)], control: &StepControl) -> Result<Track> {
    let Some(&(t0, t2)) = path.first() else {
        return Err(Error::Grid("empty continuation path".into()));
    };
    let opts = &control.scan;
    let w0 = WindowParams::new(sigma, t2, t0)?;
    let start = scan_first_crossing(&w0, opts)?;
    let Some(mut cur) = start.crossing else {
        return Err(Error::NoInitialCrossing {
            lo: start.scanned.0,
            hi: start.scanned.1,
        });
    };
    let mut records = vec![cur];
    if cur.degenerate {
        return Ok(Track {
            records,
            end: TrackEnd::DegenerateSlope { t0, t2 },
        });
    }
    for &(nt0, nt2) in &path[1..] {
        let w_target = WindowParams::new(sigma, nt2, nt0)?;
        if nt0 == cur.t0 && nt2 == cur.t2 {
            records.push(cur);
            continue;
        }
        let (st0, st2) = (cur.t0, cur.t2);
        let (dt0, dt2) = (nt0 - st0, nt2 - st2);
        let len = dt0.hypot(dt2);
        let mut lambda = 0.0;
        let mut h = 1.0f64;
        while lambda < 1.0 {
            h = h.min(1.0 - lambda);
            let next_lambda = if lambda + h >= 1.0 { 1.0 } else { lambda + h };
            let step_l = next_lambda - lambda;
            let w = if next_lambda == 1.0 {
                w_target
            } else {
                WindowParams::new(sigma, st2 + dt2 * next_lambda, st0 + dt0 * next_lambda)?
            };
            let rate = tangent(&cur, dt0, dt2, opts)?;
            let predicted = cur.omega_z + rate * step_l;
            let half = (control.trust_factor * (rate * step_l).abs()).max(control.min_window);
            // A corrector that lands far from the prediction has most likely
            // caught a different root; treat it like a miss and shorten the step.
            let accept = |rec: &CrossingRecord| {
                (rec.omega_z - predicted).abs() <= 0.5 * (rate * step_l).abs() + control.min_window
            };
            match correct(&w, predicted, half, opts)?.filter(accept) {
                Some(rec) => {
                    cur = rec;
                    lambda = next_lambda;
                    if cur.degenerate {
                        records.push(cur);
                        return Ok(Track {
                            records,
                            end: TrackEnd::DegenerateSlope { t0: w.t0, t2: w.t2 },
                        });
                    }
                    h = (2.0 * h).min(1.0);
                }
                None => {
                    h *= 0.5;
                    if h * len < control.min_step {
                        return Ok(Track {
                            records,
                            end: TrackEnd::BranchLost { t0: w.t0, t2: w.t2 },
                        });
                    }
                }
            }
        }
        records.push(cur);
    }
    Ok(Track {
        records,
        end: TrackEnd::Completed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarterPeriod {
    /// `(t0c, omega_zc)` when the product brackets `pi / 2`.
    pub root: Option<(f64, f64)>,
    /// Sampled `(t0, omega_z t0)` along the ray.
    pub samples: Vec<(f64, f64)>,
    pub end: TrackEnd,
}

/// Solves `omega_z(2 t0, t0) t0 = pi / 2` on `t0_range` by sampling the
/// continued crossing at `samples` points and bisecting the first bracket.
pub fn solve_quarter_period(
    sigma: f64,
    t0_range: (f64, f64),
    samples: usize,
    tol: f64,
    control: &StepControl,
) -> Result<QuarterPeriod> {
    let (a, b) = t0_range;
    if samples < 2 || !(a < b) || a == 0.0 || (a < 0.0 && b > 0.0) {
        return Err(Error::Grid(format!(
            "quarter-period range must avoid t0 = 0 and hold at least 2 samples, got ({a}, {b}) x {samples}"
        )));
    }
    let path: Vec<(f64, f64)> = (0..samples)
        .map(|k| {
            let t0 = a + (b - a) * k as f64 / (samples - 1) as f64;
            (t0, 2.0 * t0)
        })
        .collect();
    let track = continue_crossing(sigma, &path, control)?;
    let prod: Vec<(f64, f64)> = track
        .records
        .iter()
        .map(|r| (r.t0, r.omega_z * r.t0))
        .collect();
    let mut out = QuarterPeriod {
        root: None,
        samples: prod.clone(),
        end: track.end,
    };
    let Some(k) = prod
        .windows(2)
        .position(|p| (p[0].1 - FRAC_PI_2).signum() != (p[1].1 - FRAC_PI_2).signum())
    else {
        return Ok(out);
    };
    let (mut lo, mut hi) = (track.records[k], track.records[k + 1]);
    let opts = &control.scan;
    let f = |r: &CrossingRecord| r.omega_z * r.t0 - FRAC_PI_2;
    let mut best = if f(&lo).abs() < f(&hi).abs() { lo } else { hi };
    for _ in 0..200 {
        if f(&best).abs() < tol || (hi.t0 - lo.t0).abs() < 1e-15 {
            break;
        }
        let t0 = 0.5 * (lo.t0 + hi.t0);
        let w = WindowParams::new(sigma, 2.0 * t0, t0)?;
        let guess = 0.5 * (lo.omega_z + hi.omega_z);
        let half = (control.trust_factor * (hi.omega_z - lo.omega_z).abs()).max(control.min_window);
        let Some(mid) = correct(&w, guess, half, opts)? else {
            out.end = TrackEnd::BranchLost { t0, t2: 2.0 * t0 };
            return Ok(out);
        };
        if f(&mid).signum() == f(&lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        best = mid;
    }
    out.root = Some((best.t0, best.omega_z));
    Ok(out)
}

/// `P_odd(omega; t0)`:
///
/// ```text
/// cos(omega t0) int_{-inf}^{t0} E0'(tau, t2) e^{-2 sigma tau} cos(omega tau) dtau
///   + sin(omega t0) int_{-inf}^{t0} E0'(tau, t2) e^{-2 sigma tau} sin(omega tau) dtau
///   + e^{2 sigma t0} [cos(omega t0) int_{-inf}^{t0} E0n'(tau, t2) cos(omega tau) dtau
///                     + sin(omega t0) int_{-inf}^{t0} E0n'(tau, t2) sin(omega tau) dtau]
/// ```
pub fn podd(omega: f64, w: &WindowParams, tol: f64) -> Result<crate::QuadratureResult<f64>> {
    if !omega.is_finite() {
        return Err(Error::domain("omega", omega));
    }
    if w.is_degenerate() {
        return Ok(crate::QuadratureResult {
            value: 0.0,
            err_estimate: 0.0,
            panels: 0,
            roundoff_limited: false,
        });
    }
    let (s, t0, t2) = (w.sigma, w.t0, w.t2);
    let tilted = KernelSum::new(vec![
        Atom::new(1.0, t2, -2.0 * s),
        Atom::new(-1.0, -t2, -2.0 * s),
    ]);
    let reflected = KernelSum::new(vec![Atom::new(1.0, -t2, 0.0), Atom::new(-1.0, t2, 0.0)]);
    let pref = (2.0 * s * t0).exp();
    let i1 = tilted.transform_exp(omega, 1.0, f64::NEG_INFINITY, t0, tol / 4.0)?;
    let i2 = reflected.transform_exp(
        omega,
        1.0,
        f64::NEG_INFINITY,
        t0,
        tol / (4.0 * pref.max(1.0)),
    )?;
    let (c, sn) = ((omega * t0).cos(), (omega * t0).sin());
    let value = c * i1.value.re + sn * i1.value.im + pref * (c * i2.value.re + sn * i2.value.im);
    Ok(crate::QuadratureResult {
        value,
        err_estimate: i1.err_estimate + pref * i2.err_estimate,
        panels: i1.panels + i2.panels,
        roundoff_limited: i1.roundoff_limited || i2.roundoff_limited,
    })
}
