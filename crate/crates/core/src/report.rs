//! Run configuration, the check suites, and report output.

use crate::claims::{self, ClaimResult, ClaimStatus, Expectation, GridSpec};
use crate::error::{Error, Result};
use crate::fourier::{
    ep_omega, f_omega, fr_convolution, gr, gr_leading_coefficient, gr_partials, Partial,
    WindowParams,
};
use crate::theta::{
    de0_value, e0_value, jacobi_identity_residual, theta_delta_identity, KERNEL_TOL,
};
use crate::tracker::{
    podd, scan_first_crossing, solve_quarter_period, ScanOptions, StepControl, Track, TrackEnd,
};
use crate::xi::{find_critical_zero, xi_direct, xi_functional_residual, StripPoint};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The embedded default configuration, printed verbatim by `print-config`.
pub const DEFAULT_CONFIG: &str = include_str!("default_config.toml");

pub const SUITES: [&str; 7] = [
    "identities",
    "oracle",
    "kernel",
    "monotonicity",
    "contradiction",
    "transforms",
    "order_constants",
];

/// Tolerance keys and the suite that reads each.
const TOLERANCE_KEYS: &[(&str, &str)] = &[
    ("theta_delta", "identities"),
    ("jacobi", "identities"),
    ("xi_trivial", "identities"),
    ("functional_equation", "identities"),
    ("critical_realness", "identities"),
    ("oracle_equivalence", "oracle"),
    ("critical_zero", "oracle"),
    ("dxdt_bridge", "kernel"),
    ("derivative_fd", "kernel"),
    ("a_at_pi", "monotonicity"),
    ("da_dy_fd", "monotonicity"),
    ("bound_rhs", "monotonicity"),
    ("quadratic_roots", "monotonicity"),
    ("contradiction_zero", "contradiction"),
    ("convolution", "transforms"),
    ("p_decomposition", "transforms"),
    ("partials_first", "transforms"),
    ("partials_second", "transforms"),
    ("f_at_zero", "transforms"),
    ("crossing_residual", "transforms"),
    ("crossing_podd", "transforms"),
    ("crossing_even", "transforms"),
];

/// Grid keys and the suite that reads each.
const GRID_KEYS: &[(&str, &str)] = &[
    ("jacobi_x", "identities"),
    ("functional_sigma", "identities"),
    ("functional_omega", "identities"),
    ("realness_omega", "identities"),
    ("oracle_sigma", "oracle"),
    ("oracle_omega", "oracle"),
    ("e0_sign_t", "kernel"),
    ("bridge_t", "kernel"),
    ("derivative_t", "kernel"),
    ("falloff_t", "kernel"),
    ("tilted_sigma", "kernel"),
    ("envelope_omega", "kernel"),
    ("strict_decrease_t", "monotonicity"),
    ("a_negative_y", "monotonicity"),
    ("da_dy_y", "monotonicity"),
    ("shifted_gap_t0c", "monotonicity"),
    ("contradiction_sigma", "contradiction"),
    ("contradiction_t0c", "contradiction"),
    ("convolution_omega", "transforms"),
    ("podd_omega", "transforms"),
    ("decay_omega", "transforms"),
    ("order_sigma", "order_constants"),
    ("order_t0", "order_constants"),
];

/// `(sigma, t2, t0)` windows used by the transform suite.
pub const WINDOWS: [(f64, f64, f64); 10] = [
    (0.25, 1.0, 0.5),
    (0.1, 0.5, -1.0),
    (0.4, 2.0, 1.5),
    (0.25, 0.2, 0.1),
    (0.25, 4.0, 2.0),
    (0.05, 1.0, 1.0),
    (0.3, 0.7, 0.3),
    (0.45, 1.5, -0.8),
    (0.2, 3.0, 0.6),
    (0.15, 0.3, 2.5),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub format: Format,
    pub parallelism: usize,
    /// Suites run by `verify` when no filter is given.
    pub suites: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub grids: BTreeMap<String, GridSpec>,
}

/// A config file as written: every field optional, merged over the defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    output_dir: Option<PathBuf>,
    format: Option<Format>,
    parallelism: Option<usize>,
    suites: Option<Vec<String>>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    grids: BTreeMap<String, GridSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p: PartialConfig =
            toml::from_str(DEFAULT_CONFIG).expect("embedded default config parses");
        RunConfig {
            output_dir: p.output_dir.expect("default output_dir"),
            format: p.format.expect("default format"),
            parallelism: p.parallelism.expect("default parallelism"),
            suites: p.suites.expect("default suites"),
            tolerances: p.tolerances,
            grids: p.grids,
        }
    }
}

impl RunConfig {
    /// Parses a (possibly partial) TOML config over the defaults and
    /// validates the result.
    pub fn from_toml(text: &str) -> Result<Self> {
        let p: PartialConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut c = RunConfig::default();
        if let Some(v) = p.output_dir {
            c.output_dir = v;
        }
        if let Some(v) = p.format {
            c.format = v;
        }
        if let Some(v) = p.parallelism {
            c.parallelism = v;
        }
        if let Some(v) = p.suites {
            c.suites = v;
        }
        c.tolerances.extend(p.tolerances);
        c.grids.extend(p.grids);
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parallelism < 1 {
            return Err(Error::Config("parallelism must be at least 1".into()));
        }
        for s in &self.suites {
            check_suite(s)?;
        }
        for (k, &v) in &self.tolerances {
            if !TOLERANCE_KEYS.iter().any(|(key, _)| key == k) {
                return Err(Error::Config(format!("unknown tolerance key `{k}`")));
            }
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "tolerance `{k}` must be positive and finite, got {v}"
                )));
            }
        }
        for (k, g) in &self.grids {
            if !GRID_KEYS.iter().any(|(key, _)| key == k) {
                return Err(Error::Config(format!("unknown grid key `{k}`")));
            }
            g.points()
                .map_err(|e| Error::Config(format!("grid `{k}`: {e}")))?;
        }
        for (k, _) in TOLERANCE_KEYS {
            if !self.tolerances.contains_key(*k) {
                return Err(Error::Config(format!("missing tolerance `{k}`")));
            }
        }
        for (k, _) in GRID_KEYS {
            if !self.grids.contains_key(*k) {
                return Err(Error::Config(format!("missing grid `{k}`")));
            }
        }
        Ok(())
    }

    fn tol(&self, key: &str) -> f64 {
        self.tolerances[key]
    }

    fn grid(&self, key: &str) -> Result<Vec<f64>> {
        self.grids[key].points()
    }

    fn spec(&self, key: &str) -> &GridSpec {
        &self.grids[key]
    }

    /// Hex SHA-256 of the canonical TOML form, used in report file names.
    pub fn hash(&self) -> String {
        let canon = toml::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn check_suite(s: &str) -> Result<()> {
    if SUITES.contains(&s) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "unknown suite `{s}` (known: {})",
            SUITES.join(", ")
        )))
    }
}

/// A table of numbers; `None` marks a missing value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl ScanTable {
    fn new(name: &str, columns: &[&str]) -> Self {
        ScanTable {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub started_utc: String,
    pub finished_utc: String,
}

/// Everything in a report except timestamps; identical configs give
/// identical documents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub tool_version: String,
    pub config_echo: RunConfig,
    pub suites: Vec<String>,
    pub claims: Vec<ClaimResult>,
    pub scans: Vec<ScanTable>,
}

impl ReportDocument {
    pub fn failures(&self) -> impl Iterator<Item = &ClaimResult> {
        self.claims.iter().filter(|c| c.status == ClaimStatus::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

#[derive(Default)]
struct SuiteOutput {
    claims: Vec<ClaimResult>,
    scans: Vec<ScanTable>,
}

impl SuiteOutput {
    fn push(&mut self, c: ClaimResult) {
        self.claims.push(c);
    }
}

fn in_pool<R: Send>(parallelism: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn utc_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Runs the configured suites, or only `suite_filter`, and assembles the
/// report. Suites run concurrently up to `config.parallelism`; results are
/// kept in suite order.
pub fn verify(
    config: &RunConfig,
    suite_filter: Option<&str>,
) -> Result<(ReportHeader, ReportDocument)> {
    config.validate()?;
    let suites: Vec<String> = match suite_filter {
        Some(s) => {
            check_suite(s)?;
            vec![s.to_string()]
        }
        None => config.suites.clone(),
    };
    let started_utc = utc_now();
    let outputs = in_pool(config.parallelism, || {
        suites
            .par_iter()
            .map(|s| run_suite(config, s))
            .collect::<Vec<Result<SuiteOutput>>>()
    })?;
    let mut doc = ReportDocument {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        config_echo: config.clone(),
        suites: suites.clone(),
        claims: Vec::new(),
        scans: Vec::new(),
    };
    for o in outputs {
        let o = o?;
        doc.claims.extend(o.claims);
        doc.scans.extend(o.scans);
    }
    let header = ReportHeader {
        started_utc,
        finished_utc: utc_now(),
    };
    Ok((header, doc))
}

fn run_suite(c: &RunConfig, suite: &str) -> Result<SuiteOutput> {
    match suite {
        "identities" => suite_identities(c),
        "oracle" => suite_oracle(c),
        "kernel" => suite_kernel(c),
        "monotonicity" => suite_monotonicity(c),
        "contradiction" => suite_contradiction(c),
        "transforms" => suite_transforms(c),
        "order_constants" => suite_order_constants(c),
        other => Err(Error::Config(format!("unknown suite `{other}`"))),
    }
}

/// Largest value and its argument.
fn worst<T: Copy>(items: impl IntoIterator<Item = (T, f64)>) -> Option<(T, f64)> {
    items
        .into_iter()
        .fold(None, |acc: Option<(T, f64)>, (k, v)| match acc {
            Some((_, best)) if best >= v => acc,
            _ => Some((k, v)),
        })
}

const XI_TOL: f64 = 1e-13;

fn suite_identities(c: &RunConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    out.push(ClaimResult::value(
        "theta.delta_identity",
        theta_delta_identity(KERNEL_TOL)?,
        -0.5,
        c.tol("theta_delta"),
    ));
    for x in c.grid("jacobi_x")? {
        out.push(ClaimResult::value(
            format!("theta.jacobi.x={x}"),
            jacobi_identity_residual(x)?,
            0.0,
            c.tol("jacobi"),
        ));
    }
    for re in [0.0, 1.0] {
        let v = xi_direct(Complex64::new(re, 0.0), XI_TOL)?.value;
        out.push(ClaimResult::value(
            format!("xi.trivial.s={re}"),
            v.re,
            0.5,
            c.tol("xi_trivial"),
        ));
    }
    let pts: Vec<(f64, f64)> = c
        .grid("functional_sigma")?
        .into_iter()
        .flat_map(|s| {
            c.grid("functional_omega")
                .unwrap_or_default()
                .into_iter()
                .map(move |w| (s, w))
        })
        .collect();
    let res = pts
        .par_iter()
        .map(|&(s, w)| {
            xi_functional_residual(Complex64::new(0.5 + s, w), XI_TOL).map(|r| ((s, w), r))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(((s, w), r)) = worst(res) {
        out.push(
            ClaimResult::value(
                "xi.functional_equation",
                r,
                0.0,
                c.tol("functional_equation"),
            )
            .with_detail(format!(
                "max over {} points at sigma = {s}, omega = {w}",
                pts.len()
            )),
        );
    }
    let ws = c.grid("realness_omega")?;
    let ims = ws
        .par_iter()
        .map(|&w| xi_direct(Complex64::new(0.5, w), XI_TOL).map(|v| (w, v.value.im.abs())))
        .collect::<Result<Vec<_>>>()?;
    if let Some((w, m)) = worst(ims) {
        out.push(
            ClaimResult::value("xi.critical_line_real", m, 0.0, c.tol("critical_realness"))
                .with_detail(format!("max |Im xi| at omega = {w}")),
        );
    }
    Ok(out)
}

fn suite_oracle(c: &RunConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let ws = c.grid("oracle_omega")?;
    let pts: Vec<(f64, f64)> = c
        .grid("oracle_sigma")?
        .into_iter()
        .flat_map(|s| ws.iter().map(move |&w| (s, w)))
        .collect();
    let diffs = pts
        .par_iter()
        .map(|&(s, w)| -> Result<((f64, f64), f64)> {
            let a = ep_omega(StripPoint::new(s, w)?, 1e-12)?.value;
            let b = xi_direct(Complex64::new(0.5 + s, w), 1e-12)?.value;
            Ok(((s, w), (a - b).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(((s, w), d)) = worst(diffs) {
        out.push(
            ClaimResult::value("xi.oracle_equivalence", d, 0.0, c.tol("oracle_equivalence"))
                .with_detail(format!(
                    "max over {} points at sigma = {s}, omega = {w}",
                    pts.len()
                )),
        );
    }
    for (lo, hi, reference) in [(14.0, 15.0, 14.134725), (20.0, 22.0, 21.022040)] {
        let z = find_critical_zero(lo, hi, 1e-10)?;
        out.push(ClaimResult::value(
            format!("xi.critical_zero.bracket={lo}..{hi}"),
            z,
            reference,
            c.tol("critical_zero"),
        ));
    }
    Ok(out)
}

fn suite_kernel(c: &RunConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    out.claims
        .extend(claims::e0_positive_even(c.spec("e0_sign_t"))?);
    out.push(claims::dxdt_bridge(
        c.spec("bridge_t"),
        c.tol("dxdt_bridge"),
    )?);
    let h = 1e-5;
    let fd = c.grid("derivative_t")?.into_iter().filter_map(|t| {
        let d = de0_value(t);
        (d.abs() > 1e-10).then(|| {
            let f = (e0_value(t + h) - e0_value(t - h)) / (2.0 * h);
            (t, ((f - d) / d).abs())
        })
    });
    if let Some((t, e)) = worst(fd) {
        out.push(
            ClaimResult::value("e0.derivative_fd", e, 0.0, c.tol("derivative_fd"))
                .with_detail(format!("worst relative gap at t = {t}")),
        );
    }
    out.push(claims::falloff_fit(c.spec("falloff_t"))?);
    for s in c.grid("tilted_sigma")? {
        out.push(claims::tilted_falloff_fit(s, c.spec("falloff_t"))?);
    }
    out.push(claims::envelope_falloff(c.spec("envelope_omega"))?);
    Ok(out)
}

fn suite_monotonicity(c: &RunConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    out.push(claims::strict_decrease_scan(c.spec("strict_decrease_t"))?);
    out.claims.extend(claims::a_sign_structure(
        c.spec("a_negative_y"),
        c.tol("a_at_pi"),
    )?);
    out.claims.extend(claims::da_dy_checks(
        c.spec("da_dy_y"),
        3.0,
        1e-5,
        c.tol("da_dy_fd"),
    )?);
    out.claims.extend(claims::bound_chain_check(
        c.spec("da_dy_y"),
        c.tol("bound_rhs"),
    )?);
    out.claims
        .extend(claims::quadratic_root_checks(6, c.tol("quadratic_roots")));
    for t0c in c.grid("shifted_gap_t0c")? {
        let g = GridSpec::Open {
            after: 0.0,
            stop: t0c,
            count: 100,
        };
        out.push(claims::shifted_gap_positivity(t0c, &g)?);
    }
    Ok(out)
}

fn suite_contradiction(c: &RunConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let t0cs = c.grid("contradiction_t0c")?;
    let cells: Vec<(f64, f64)> = c
        .grid("contradiction_sigma")?
        .into_iter()
        .flat_map(|s| t0cs.iter().map(move |&t| (s, t)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(s, t)| claims::contradiction_integral(s, t, 1e-12))
        .collect::<Result<Vec<_>>>()?;
    let mut table = ScanTable::new(
        "contradiction_integral",
        &["sigma", "t0c", "value", "err_estimate"],
    );
    for (&(s, t), r) in cells.iter().zip(&results) {
        let id = format!("contradiction.sigma={s}.t0c={t}");
        out.push(if s == 0.0 {
            ClaimResult::value(id, r.value, 0.0, c.tol("contradiction_zero"))
        } else {
            ClaimResult::sign(id, r.value, claims::Sign::Positive, 10.0 * r.err_estimate)
        });
        table
            .rows
            .push(vec![Some(s), Some(t), Some(r.value), Some(r.err_estimate)]);
    }
    let ends = cells
        .iter()
        .map(|&(s, t)| {
            let a = claims::contradiction_integrand(0.0, s, t).abs();
            let b = claims::contradiction_integrand(t, s, t).abs();
            a.max(b)
        })
        .fold(0.0, f64::max);
    out.push(ClaimResult::value(
        "contradiction.integrand_endpoints",
        ends,
        0.0,
        c.tol("contradiction_zero"),
    ));
    out.scans.push(table);
    Ok(out)
}

fn windows() -> Result<Vec<WindowParams>> {
    WINDOWS
        .iter()
        .map(|&(s, t2, t0)| WindowParams::new(s, t2, t0))
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Worst relative gaps of the analytic partials of `G_R` against central
/// differences at `omega = 1`: `(first order, second order)`.
pub fn partials_vs_fd(w: &WindowParams) -> Result<(f64, f64)> {
    let om = 1.0;
    let f = |o: f64, w: &WindowParams| gr(o, w, 1e-15).map(|r| r.value);
    let h = 1e-4;
    let (t0, t2) = (w.t0, w.t2);
    let fd = [
        (Partial::Omega, (f(om + h, w)? - f(om - h, w)?) / (2.0 * h)),
        (
            Partial::T0,
            (f(om, &w.with_t0(t0 + h))? - f(om, &w.with_t0(t0 - h))?) / (2.0 * h),
        ),
        (
            Partial::T2,
            (f(om, &w.with_t2(t2 + h))? - f(om, &w.with_t2(t2 - h))?) / (2.0 * h),
        ),
    ];
    let mut first: f64 = 0.0;
    for (which, d) in fd {
        first = first.max(rel(gr_partials(om, w, which, 1e-14)?.value, d));
    }
    let h2 = 1e-3;
    let d2 = (f(om + h2, w)? - 2.0 * f(om, w)? + f(om - h2, w)?) / (h2 * h2);
    let second = rel(gr_partials(om, w, Partial::Omega2, 1e-14)?.value, d2);
    Ok((first, second))
}

struct WindowChecks {
    conv: f64,
    podd: f64,
    first: f64,
    second: f64,
    /// `max |G_R| omega^2 / (2 |c|)` with `c` the `1/omega^2` coefficient;
    /// `None` when `|c|` is too small for the ratio to mean anything.
    decay: Option<f64>,
    crossing: Option<crate::tracker::CrossingRecord>,
    reflected: Option<crate::tracker::CrossingRecord>,
    residual: f64,
    podd_at_crossing: f64,
}

fn window_checks(c: &RunConfig, w: &WindowParams) -> Result<WindowChecks> {
    let mut conv: f64 = 0.0;
    for om in c.grid("convolution_omega")? {
        let a = fr_convolution(om, w, 1e-10)?.value;
        let b = f_omega(om, w, 1e-12)?.value.re;
        conv = conv.max(rel(a, b));
    }
    let mut pd: f64 = 0.0;
    for om in c.grid("podd_omega")? {
        let g = gr(om, w, 1e-14)?.value;
        let p = podd(om, w, 1e-14)?.value + podd(om, &w.with_t0(-w.t0), 1e-14)?.value;
        pd = pd.max(rel(g, p));
    }
    let (first, second) = partials_vs_fd(w)?;
    let coef = gr_leading_coefficient(w).abs();
    let mut decay = None;
    if coef > 1e-8 {
        let mut m: f64 = 0.0;
        for om in c.grid("decay_omega")? {
            m = m.max(gr(om, w, 1e-14)?.value.abs() * om * om);
        }
        decay = Some(m / (2.0 * coef));
    }
    let opts = ScanOptions::default();
    let crossing = scan_first_crossing(w, &opts)?.crossing;
    let reflected = scan_first_crossing(&w.with_t0(-w.t0), &opts)?.crossing;
    let (mut residual, mut podd_at_crossing) = (0.0, 0.0);
    if let Some(r) = crossing {
        residual = gr(r.omega_z, w, 1e-14)?.value.abs();
        podd_at_crossing = (podd(r.omega_z, w, 1e-14)?.value
            + podd(r.omega_z, &w.with_t0(-w.t0), 1e-14)?.value)
            .abs();
    }
    Ok(WindowChecks {
        conv,
        podd: pd,
        first,
        second,
        decay,
        crossing,
        reflected,
        residual,
        podd_at_crossing,
    })
}

fn suite_transforms(c: &RunConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let ws = windows()?;
    let checks = ws
        .par_iter()
        .map(|w| window_checks(c, w))
        .collect::<Result<Vec<_>>>()?;
    let label = |w: &WindowParams| format!("sigma = {}, t2 = {}, t0 = {}", w.sigma, w.t2, w.t0);
    let pick = |f: &dyn Fn(&WindowChecks) -> f64| {
        let (k, v) = worst(checks.iter().enumerate().map(|(k, x)| (k, f(x))))
            .expect("windows are non-empty");
        (v, format!("worst at {}", label(&ws[k])))
    };
    let n = ws.len();
    let (v, d) = pick(&|x| x.conv);
    out.push(
        ClaimResult::value("fourier.convolution_identity", v, 0.0, c.tol("convolution"))
            .with_detail(d),
    );
    let (v, d) = pick(&|x| x.podd);
    out.push(
        ClaimResult::value("tracker.p_decomposition", v, 0.0, c.tol("p_decomposition"))
            .with_detail(d),
    );
    let (v, d) = pick(&|x| x.first);
    out.push(
        ClaimResult::value(
            "fourier.partials_first_order",
            v,
            0.0,
            c.tol("partials_first"),
        )
        .with_detail(d),
    );
    let (v, d) = pick(&|x| x.second);
    out.push(
        ClaimResult::value(
            "fourier.partials_second_order",
            v,
            0.0,
            c.tol("partials_second"),
        )
        .with_detail(d),
    );
    let (v, d) = pick(&|x| x.decay.unwrap_or(f64::NEG_INFINITY));
    let used = checks.iter().filter(|x| x.decay.is_some()).count();
    out.push(ClaimResult::at_most("fourier.gr_decay_ratio", v, 1.0).with_detail(format!(
        "max |G_R| omega^2 / (2 |c|), c the 1/omega^2 coefficient, over {used} windows with |c| > 1e-8; {d}"
    )));
    for w in &ws {
        out.push(claims::f_at_zero_nonvanishing(
            w.sigma,
            w.t0,
            w.t2,
            c.tol("f_at_zero"),
        )?);
    }
    let mut table = ScanTable::new(
        "first_crossings",
        &[
            "sigma",
            "t2",
            "t0",
            "omega_z",
            "slope",
            "omega_z_reflected",
            "abs_gr_at_omega_z",
            "abs_podd_sum_at_omega_z",
        ],
    );
    let (mut res, mut pod, mut even, mut found) = (0.0f64, 0.0f64, 0.0f64, 0);
    for (w, x) in ws.iter().zip(&checks) {
        let z = x.crossing.map(|r| r.omega_z);
        let zr = x.reflected.map(|r| r.omega_z);
        if let Some(r) = x.crossing {
            found += 1;
            res = res.max(x.residual);
            pod = pod.max(x.podd_at_crossing);
            if let Some(rr) = x.reflected {
                even = even.max((r.omega_z - rr.omega_z).abs());
            }
        }
        table.rows.push(vec![
            Some(w.sigma),
            Some(w.t2),
            Some(w.t0),
            z,
            x.crossing.map(|r| r.slope),
            zr,
            x.crossing.map(|_| x.residual),
            x.crossing.map(|_| x.podd_at_crossing),
        ]);
    }
    let note = format!("{found} of {n} windows have a crossing below omega = 50");
    out.push(
        ClaimResult::value(
            "tracker.crossing_residual",
            res,
            0.0,
            c.tol("crossing_residual"),
        )
        .with_detail(note.clone()),
    );
    out.push(
        ClaimResult::value("tracker.crossing_podd", pod, 0.0, c.tol("crossing_podd"))
            .with_detail(note.clone()),
    );
    out.push(
        ClaimResult::value(
            "tracker.crossing_even_in_t0",
            even,
            0.0,
            c.tol("crossing_even"),
        )
        .with_detail(note),
    );
    out.scans.push(table);
    Ok(out)
}

fn suite_order_constants(c: &RunConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let t0s = c.grid("order_t0")?;
    for s in c.grid("order_sigma")? {
        out.claims.extend(claims::order_constants(s, 10.0, &t0s)?);
        let q = solve_quarter_period(s, (0.05, 3.0), 60, 1e-10, &StepControl::default())?;
        let mut table = ScanTable::new("quarter_period", &["sigma", "t0", "omega_z_times_t0"]);
        for &(t0, p) in &q.samples {
            table.rows.push(vec![Some(s), Some(t0), Some(p)]);
        }
        let peak = q
            .samples
            .iter()
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut claim = ClaimResult::new(
            format!("tracker.quarter_period.sigma={s}"),
            peak,
            Expectation::AtLeast(FRAC_PI_2),
            0.0,
        )
        .informational()
        .with_detail(format!(
            "max omega_z t0 on t2 = 2 t0, t0 in [0.05, 3]; end: {:?}",
            q.end
        ));
        if let Some((t0c, wz)) = q.root {
            claim = claim.with_detail(format!("omega_z t0 = pi/2 at t0c = {t0c}, omega_z = {wz}"));
        }
        out.push(claim);
        out.scans.push(table);
    }
    Ok(out)
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_real(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => fmt_real(v),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Writes a scan table as CSV with a header row.
pub fn write_table_csv(table: &ScanTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| opt_real(*v)))
            .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Writes claims as CSV.
pub fn write_claims_csv(claims: &[ClaimResult], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record([
        "claim_id",
        "status",
        "holds",
        "measured",
        "expected_kind",
        "expected",
        "tolerance",
        "detail",
    ])
    .map_err(io)?;
    for c in claims {
        let (kind, val) = match c.expected {
            Expectation::Value(v) => ("value", fmt_real(v)),
            Expectation::Sign(s) => ("sign", format!("{s:?}").to_lowercase()),
            Expectation::AtMost(v) => ("at_most", fmt_real(v)),
            Expectation::AtLeast(v) => ("at_least", fmt_real(v)),
        };
        let status = match c.status {
            ClaimStatus::Pass => "pass",
            ClaimStatus::Fail => "fail",
            ClaimStatus::Informational => "informational",
        };
        w.write_record([
            c.claim_id.as_str(),
            status,
            if c.holds { "true" } else { "false" },
            &opt_real(Some(c.measured)),
            kind,
            &val,
            &fmt_real(c.tolerance),
            c.detail.as_deref().unwrap_or(""),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// JSON body: the header block and the document side by side.
#[derive(Serialize)]
struct ReportFile<'a> {
    header: &'a ReportHeader,
    report: &'a ReportDocument,
}

/// Writes the report into `config.output_dir` under a new name built from
/// the start time and the config hash. Never overwrites: a numeric suffix is
/// added on collision. Returns the written paths.
pub fn write_report(
    config: &RunConfig,
    header: &ReportHeader,
    doc: &ReportDocument,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&config.output_dir).map_err(io)?;
    let stamp = chrono::DateTime::parse_from_rfc3339(&header.started_utc)
        .map(|t| t.format("%Y%m%dT%H%M%S%3fZ").to_string())
        .map_err(io)?;
    let hash = config.hash();
    let mut stem = format!("xilab-{stamp}-{}", &hash[..12]);
    let mut k = 1;
    while config.output_dir.join(format!("{stem}.json")).exists()
        || config.output_dir.join(format!("{stem}.csv")).exists()
    {
        stem = format!("xilab-{stamp}-{}-{k}", &hash[..12]);
        k += 1;
    }
    let dir = &config.output_dir;
    let file = ReportFile {
        header,
        report: doc,
    };
    match config.format {
        Format::Json => {
            let p = dir.join(format!("{stem}.json"));
            let text = serde_json::to_string_pretty(&file).map_err(io)?;
            std::fs::write(&p, text + "\n").map_err(io)?;
            Ok(vec![p])
        }
        Format::Csv => {
            // The CSV files hold the data; a small JSON sidecar keeps the
            // header, version and config echo.
            let mut paths = Vec::new();
            let p = dir.join(format!("{stem}.csv"));
            write_claims_csv(&doc.claims, &p)?;
            paths.push(p);
            for t in &doc.scans {
                let p = dir.join(format!("{stem}.{}.csv", t.name));
                write_table_csv(t, &p)?;
                paths.push(p);
            }
            let meta = serde_json::json!({
                "header": header,
                "schema": doc.schema,
                "tool_version": doc.tool_version,
                "config_echo": doc.config_echo,
                "suites": doc.suites,
            });
            let p = dir.join(format!("{stem}.meta.json"));
            std::fs::write(&p, serde_json::to_string_pretty(&meta).map_err(io)? + "\n")
                .map_err(io)?;
            paths.push(p);
            Ok(paths)
        }
    }
}

/// `G_R` on the lexicographic grid `sigma x t2 x t0 x omega`.
pub fn scan_gr(
    sigmas: &[f64],
    t2s: &[f64],
    t0s: &[f64],
    omegas: &[f64],
    tol: f64,
    parallelism: usize,
) -> Result<ScanTable> {
    let mut pts = Vec::with_capacity(sigmas.len() * t2s.len() * t0s.len() * omegas.len());
    for &s in sigmas {
        for &t2 in t2s {
            for &t0 in t0s {
                let w = WindowParams::new(s, t2, t0)?;
                for &om in omegas {
                    pts.push((w, om));
                }
            }
        }
    }
    let vals = in_pool(parallelism.max(1), || {
        pts.par_iter()
            .map(|(w, om)| gr(*om, w, tol))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut t = ScanTable::new("gr", &["sigma", "t2", "t0", "omega", "G_R", "err_estimate"]);
    for ((w, om), r) in pts.iter().zip(vals) {
        t.rows.push(vec![
            Some(w.sigma),
            Some(w.t2),
            Some(w.t0),
            Some(*om),
            Some(r.value),
            Some(r.err_estimate),
        ]);
    }
    Ok(t)
}

/// Writes a continuation track as CSV. Each reached vertex is a row with
/// marker `ok`; a track that stopped early ends with a marker row naming
/// the reason and the window where it stopped.
pub fn write_track_csv(track: &Track, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record([
        "marker",
        "sigma",
        "t2",
        "t0",
        "omega_z",
        "slope",
        "bracket_lo",
        "bracket_hi",
        "degenerate",
    ])
    .map_err(io)?;
    for r in &track.records {
        w.write_record([
            "ok".to_string(),
            fmt_real(r.sigma),
            fmt_real(r.t2),
            fmt_real(r.t0),
            fmt_real(r.omega_z),
            fmt_real(r.slope),
            fmt_real(r.bracket.0),
            fmt_real(r.bracket.1),
            r.degenerate.to_string(),
        ])
        .map_err(io)?;
    }
    let sigma = track
        .records
        .first()
        .map(|r| fmt_real(r.sigma))
        .unwrap_or_default();
    let stop = match track.end {
        TrackEnd::Completed => None,
        TrackEnd::BranchLost { t0, t2 } => Some(("branch_lost", t0, t2)),
        TrackEnd::DegenerateSlope { t0, t2 } => Some(("degenerate_slope", t0, t2)),
    };
    if let Some((marker, t0, t2)) = stop {
        let empty = String::new();
        w.write_record([
            marker.to_string(),
            sigma,
            fmt_real(t2),
            fmt_real(t0),
            empty.clone(),
            empty.clone(),
            empty.clone(),
            empty.clone(),
            empty,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)
}
