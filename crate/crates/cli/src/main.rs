use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use xilab::claims::{ClaimStatus, GridSpec};
use xilab::report::{self, RunConfig};
use xilab::tracker::{continue_crossing, ScanOptions, StepControl};
use xilab::xi::{find_critical_zero, xi_direct, StripPoint};
use xilab::Error;

#[derive(Parser)]
#[command(
    name = "xilab",
    version,
    about = "Numerical checks around Riemann's Xi function"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the check suites and write a report.
    Verify {
        /// Run only this suite.
        #[arg(long)]
        suite: Option<String>,
        /// Config file; falls back to $XILAB_CONFIG, then the built-in defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the configured output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Tabulate G_R over a window grid as CSV.
    ScanGr {
        /// Values as `x`, `a,b,c` or `start:stop:step`.
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, allow_hyphen_values = true)]
        t2: String,
        #[arg(long, allow_hyphen_values = true)]
        t0: String,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 4)]
        parallelism: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Follow the first crossing omega_z along a path of windows.
    TrackOmegaZ {
        #[arg(long)]
        sigma: f64,
        /// Start of a straight path, `t0,t2`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "path")]
        from: Option<String>,
        /// End of a straight path, `t0,t2`.
        #[arg(long, allow_hyphen_values = true, requires = "from")]
        to: Option<String>,
        /// Vertices on the straight path, ends included.
        #[arg(long, default_value_t = 2)]
        points: usize,
        /// Explicit vertices `t0,t2;t0,t2;...`.
        #[arg(long, allow_hyphen_values = true)]
        path: Option<String>,
        #[arg(long, default_value_t = 50.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate xi(1/2 + sigma + i omega), or locate a critical-line zero.
    XiEval {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "zeros")]
        sigma: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "zeros")]
        omega: Option<f64>,
        /// Bracket `LO HI` on the critical line.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], conflicts_with_all = ["sigma", "omega"])]
        zeros: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
    },
    /// Print the built-in default configuration.
    PrintConfig,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

/// A failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain { .. } | Error::Config(_) | Error::Grid(_) => 2,
            Error::Io(_) => 3,
            Error::NoInitialCrossing { .. } => 4,
            _ => 5,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Verify {
            suite,
            config,
            output_dir,
        } => verify(suite, config, output_dir),
        Cmd::ScanGr {
            sigma,
            t2,
            t0,
            omega,
            tol,
            parallelism,
            out,
        } => {
            let table = report::scan_gr(
                &values(&sigma)?,
                &values(&t2)?,
                &values(&t0)?,
                &values(&omega)?,
                tol,
                parallelism,
            )?;
            report::write_table_csv(&table, &out)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), out.display());
            Ok(0)
        }
        Cmd::TrackOmegaZ {
            sigma,
            from,
            to,
            points,
            path,
            omega_max,
            step,
            out,
        } => {
            let vertices = match (path, from) {
                (Some(p), _) => p.split(';').map(pair).collect::<Result<Vec<_>, _>>()?,
                (None, Some(a)) => {
                    let a = pair(&a)?;
                    let b = to.as_deref().map(pair).transpose()?.unwrap_or(a);
                    if points < 1 {
                        return Err(usage("--points must be at least 1"));
                    }
                    let n = points;
                    (0..n)
                        .map(|k| {
                            let f = if n == 1 {
                                0.0
                            } else {
                                k as f64 / (n - 1) as f64
                            };
                            (a.0 + (b.0 - a.0) * f, a.1 + (b.1 - a.1) * f)
                        })
                        .collect()
                }
                (None, None) => return Err(usage("give --from [--to] or --path")),
            };
            let control = StepControl {
                scan: ScanOptions {
                    omega_max,
                    step,
                    ..ScanOptions::default()
                },
                ..StepControl::default()
            };
            let track = continue_crossing(sigma, &vertices, &control)?;
            report::write_track_csv(&track, &out)?;
            eprintln!(
                "wrote {} records to {} ({:?})",
                track.records.len(),
                out.display(),
                track.end
            );
            Ok(0)
        }
        Cmd::XiEval {
            sigma,
            omega,
            zeros,
            tol,
            format,
        } => xi_eval(sigma, omega, zeros, tol, format),
        Cmd::PrintConfig => {
            print!("{}", report::DEFAULT_CONFIG);
            Ok(0)
        }
    }
}

fn load_config(path: Option<PathBuf>) -> Result<RunConfig, Failure> {
    let path = path.or_else(|| std::env::var_os("XILAB_CONFIG").map(PathBuf::from));
    match path {
        Some(p) => load_from(&p),
        None => Ok(RunConfig::default()),
    }
}

fn load_from(p: &Path) -> Result<RunConfig, Failure> {
    // A config that cannot be read is a config problem, not an output one.
    let text = std::fs::read_to_string(p)
        .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
    Ok(RunConfig::from_toml(&text)?)
}

fn verify(
    suite: Option<String>,
    config: Option<PathBuf>,
    output_dir: Option<PathBuf>,
) -> Result<u8, Failure> {
    let mut config = load_config(config)?;
    if let Some(d) = output_dir {
        config.output_dir = d;
    }
    let (header, doc) = report::verify(&config, suite.as_deref())?;
    let paths = report::write_report(&config, &header, &doc)?;
    let count = |s: ClaimStatus| doc.claims.iter().filter(|c| c.status == s).count();
    println!(
        "{} pass, {} fail, {} informational",
        count(ClaimStatus::Pass),
        count(ClaimStatus::Fail),
        count(ClaimStatus::Informational)
    );
    for c in doc.failures() {
        eprintln!(
            "FAIL {}: measured {} expected {:?} tolerance {}{}",
            c.claim_id,
            report::fmt_real(c.measured),
            c.expected,
            c.tolerance,
            c.detail
                .as_deref()
                .map(|d| format!(" ({d})"))
                .unwrap_or_default()
        );
    }
    for p in &paths {
        println!("{}", p.display());
    }
    Ok(if doc.passed() { 0 } else { 1 })
}

fn number(s: &str) -> Result<f64, Failure> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("not a number: `{s}`")))
}

/// `x`, `a,b,c` or `start:stop:step`.
fn values(s: &str) -> Result<Vec<f64>, Failure> {
    let spec = if s.contains(':') {
        let p: Vec<&str> = s.split(':').collect();
        if p.len() != 3 {
            return Err(usage(format!("range must be start:stop:step, got `{s}`")));
        }
        GridSpec::range(number(p[0])?, number(p[1])?, number(p[2])?)
    } else {
        GridSpec::Points(s.split(',').map(number).collect::<Result<_, _>>()?)
    };
    Ok(spec.points()?)
}

fn pair(s: &str) -> Result<(f64, f64), Failure> {
    match s.split(',').collect::<Vec<_>>()[..] {
        [a, b] => Ok((number(a)?, number(b)?)),
        _ => Err(usage(format!("expected `t0,t2`, got `{s}`"))),
    }
}

fn xi_eval(
    sigma: Option<f64>,
    omega: Option<f64>,
    zeros: Option<Vec<f64>>,
    tol: f64,
    format: OutFormat,
) -> Result<u8, Failure> {
    if let Some(b) = zeros {
        let (lo, hi) = (b[0], b[1]);
        let bracket_tol = 1e-10;
        let z = find_critical_zero(lo, hi, bracket_tol)?;
        match format {
            OutFormat::Json => println!(
                "{}",
                serde_json::json!({ "zero": z, "err_estimate": bracket_tol / 2.0, "bracket": [lo, hi] })
            ),
            OutFormat::Text => println!(
                "zero at omega = {} +- {:e}",
                report::fmt_real(z),
                bracket_tol / 2.0
            ),
        }
        return Ok(0);
    }
    let (Some(sigma), Some(omega)) = (sigma, omega) else {
        return Err(usage("give --sigma and --omega, or --zeros LO HI"));
    };
    let p = StripPoint::new(sigma, omega)?;
    let v = xi_direct(p.s(), tol)?;
    match format {
        OutFormat::Json => println!(
            "{}",
            serde_json::json!({
                "sigma": sigma,
                "omega": omega,
                "re": v.value.re,
                "im": v.value.im,
                "err_estimate": v.err_estimate,
            })
        ),
        OutFormat::Text => println!(
            "xi({} + {}i) = {} + {}i  (err {:e})",
            0.5 + sigma,
            omega,
            report::fmt_real(v.value.re),
            report::fmt_real(v.value.im),
            v.err_estimate
        ),
    }
    Ok(0)
}
