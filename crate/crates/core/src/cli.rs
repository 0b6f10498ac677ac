//! Command-line surface: argument definitions, the command implementations
//! and the exit-code contract (0 pass, 1 fail, 2 numeric failure, 3 input error).

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{example4_config, SystemConfig};
use crate::error::{Error, Result};
use crate::hypothesis::{
    check_theorem_conditions, forcing_bound_fit, spectral_bounds, ConditionReport, DomainBox,
    ForcingBound, SpectralBounds,
};
use crate::integrate::{integrate, IntegratorOptions, Method, DEFAULT_ATOL, DEFAULT_RTOL};
use crate::lyapunov::{decay_constants, decrease_spot_check, DecayConstants, DecreaseCheck};
use crate::orbits::{
    find_periodic, multistart_periodic, random_ball_starts, uniqueness_decay, verify_periodic,
    DecayFit, MultistartReport, OrbitResult, PeriodicityCheck, ShootingOptions,
};
use crate::report::to_json;
use crate::system::{State, SystemDef};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Time samples per period used to fit the forcing envelope.
const FORCING_TIME_SAMPLES: usize = 32;

#[derive(Parser, Debug)]
#[command(
    name = "lyapcert",
    version,
    about = "Certify periodic solutions of third-order vector ODEs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// System config (JSON); `-` reads stdin.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Write output here (atomically) instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Half-width of the cubic sampling box.
    #[arg(long = "box", value_name = "R")]
    pub radius: Option<f64>,
    /// Grid points per axis.
    #[arg(long, value_name = "M")]
    pub grid: Option<usize>,
    #[arg(long, value_name = "N", env = "LYAPCERT_SEED")]
    pub seed: Option<u64>,
    /// Override the forcing period.
    #[arg(long, value_name = "W")]
    pub omega: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Integration {
    /// Fixed RK4 step; otherwise adaptive RKF45.
    #[arg(long, value_name = "H", conflicts_with_all = ["rtol", "atol"])]
    pub dt: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
}

impl Integration {
    fn options(&self, samples: usize) -> IntegratorOptions {
        match self.dt {
            Some(h) => IntegratorOptions::rk4(h, samples),
            None => IntegratorOptions::rkf45(
                self.atol.unwrap_or(DEFAULT_ATOL),
                self.rtol.unwrap_or(DEFAULT_RTOL),
                samples,
            ),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample the theorem hypotheses over a box.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate one trajectory and write CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        integration: Integration,
        /// Comma-separated initial X (default zeros).
        #[arg(long, value_name = "V1,..,VN", allow_hyphen_values = true)]
        x0: Option<String>,
        #[arg(long, value_name = "V1,..,VN", allow_hyphen_values = true)]
        y0: Option<String>,
        #[arg(long, value_name = "V1,..,VN", allow_hyphen_values = true)]
        z0: Option<String>,
        /// Final time (default: ten periods).
        #[arg(long, value_name = "T")]
        t1: Option<f64>,
        /// Output intervals.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Newton shooting on the period map, plus a seeded multistart search.
    FindOrbit {
        #[command(flatten)]
        common: Common,
        /// Initial guess `x1..xn,y1..yn,z1..zn` (default zeros).
        #[arg(long, value_name = "V1,..,V3N", allow_hyphen_values = true)]
        guess: Option<String>,
        #[arg(long, value_name = "E", default_value_t = crate::orbits::DEFAULT_SHOOTING_TOL)]
        tol: f64,
        /// Random starts for the secondary search.
        #[arg(long, value_name = "K", default_value_t = 16)]
        starts: usize,
        #[arg(long, default_value_t = crate::orbits::DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Fit the contraction rate of solution differences.
    Uniqueness {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        integration: Integration,
        /// Horizon.
        #[arg(long, value_name = "T", default_value_t = 40.0)]
        t1: f64,
        /// Random start pairs.
        #[arg(long, value_name = "K", default_value_t = 5)]
        starts: usize,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Trailing fraction of the horizon used for the fit.
        #[arg(long, default_value_t = 0.5)]
        window: f64,
    },
    /// Hypotheses, proof constants and a sampled decrease test of V.
    Certify {
        #[command(flatten)]
        common: Common,
        /// States sampled outside the decrease radius.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Print the canonical two-dimensional worked-example config.
    Example4 {
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// Result of one command: exit code plus whatever goes to stdout/stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn from_error(e: &Error) -> Self {
        Self {
            code: exit_code(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input() {
        EXIT_INPUT
    } else {
        EXIT_NUMERIC
    }
}

/// Writes `contents` via a temporary file in the target directory and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn load_config(path: &Path, stdin: &mut dyn Read) -> Result<SystemConfig> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| Error::Input(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?
    };
    SystemConfig::from_json(&text)
}

/// Parses `"v1,v2,..."` into exactly `len` finite numbers.
pub fn parse_vector(text: &str, len: usize, flag: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Input(format!("--{flag}: {e}")))?;
    if values.len() != len {
        return Err(Error::Input(format!(
            "--{flag}: expected {len} values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input(format!("--{flag}: values must be finite")));
    }
    Ok(values)
}

struct Loaded {
    cfg: SystemConfig,
    sys: SystemDef,
    domain: DomainBox,
}

fn load(common: &Common, stdin: &mut dyn Read) -> Result<Loaded> {
    let cfg = load_config(&common.config, stdin)?;
    let sys = cfg.system(common.omega)?;
    let domain = cfg.domain_box(common.radius, common.grid, common.seed)?;
    Ok(Loaded { cfg, sys, domain })
}

fn radius_of(domain: &DomainBox) -> f64 {
    domain
        .lower
        .iter()
        .zip(&domain.upper)
        .map(|(l, u)| l.abs().max(u.abs()))
        .fold(0.0, f64::max)
}

/// Hypothesis report over a box: every verdict with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub family: &'static str,
    pub n: usize,
    pub omega: f64,
    pub seed: u64,
    pub domain: DomainBox,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub bounds: SpectralBounds,
    pub conditions: ConditionReport,
    pub forcing: ForcingBound,
    pub decay_constants: DecayConstants,
    pub failures: Vec<&'static str>,
    pub passed: bool,
}

pub fn check_report(
    sys: &SystemDef,
    domain: &DomainBox,
    sqrt_eps: Option<f64>,
) -> Result<CheckReport> {
    let bounds = spectral_bounds(sys, domain, sqrt_eps)?;
    let conditions = check_theorem_conditions(&bounds);
    let forcing = forcing_bound_fit(sys, domain, FORCING_TIME_SAMPLES)?;
    let decay = decay_constants(&bounds, &forcing);
    Ok(CheckReport {
        family: sys.family.name(),
        n: sys.n,
        omega: sys.omega,
        seed: domain.seed,
        domain: domain.clone(),
        a: sys.a.rows(),
        b: sys.b.rows(),
        failures: conditions.failures(),
        passed: conditions.overall,
        bounds,
        conditions,
        forcing,
        decay_constants: decay,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    #[serde(flatten)]
    pub check: CheckReport,
    /// Sampled `V̇ ≤ −δ₆‖s‖²` on `δ₈ ≤ ‖s‖ ≤ 3δ₈` with the corrected constants;
    /// absent when the corrected `δ₆` is not positive.
    pub decrease: Option<DecreaseCheck>,
    pub certified: bool,
}

/// Smallest shell radius used for the decrease test when `δ₈` is zero.
const MIN_DECREASE_RADIUS: f64 = 1e-6;

pub fn certify_report(
    sys: &SystemDef,
    domain: &DomainBox,
    sqrt_eps: Option<f64>,
    samples: usize,
) -> Result<CertifyReport> {
    let check = check_report(sys, domain, sqrt_eps)?;
    let dc = &check.decay_constants;
    let decrease = match dc.delta_8_corrected {
        Some(r) if dc.delta_6_corrected_positive => {
            let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
            Some(decrease_spot_check(
                sys,
                dc.delta_6_corrected,
                r.max(MIN_DECREASE_RADIUS),
                samples,
                &mut rng,
            )?)
        }
        _ => None,
    };
    let certified =
        check.passed && dc.delta_4_feasible && decrease.as_ref().is_some_and(|d| d.passed);
    Ok(CertifyReport {
        check,
        decrease,
        certified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub family: &'static str,
    pub omega: f64,
    pub tol: f64,
    pub guess: State,
    pub orbit: OrbitResult,
    pub periodicity: Option<PeriodicityCheck>,
    pub seed: u64,
    pub search_radius: f64,
    pub multistart: MultistartReport,
    pub passed: bool,
}

pub fn orbit_report(
    sys: &SystemDef,
    guess: &State,
    tol: f64,
    max_iters: usize,
    starts: usize,
    radius: f64,
    seed: u64,
) -> Result<OrbitReport> {
    let mut opts = ShootingOptions::for_period(sys.omega);
    opts.tol = tol;
    opts.max_iters = max_iters;
    let orbit = find_periodic(sys, guess, &opts)?;
    let periodicity = if orbit.converged {
        Some(verify_periodic(sys, &orbit, 64, &opts)?)
    } else {
        None
    };
    let multistart = multistart_periodic(sys, starts, radius, seed, &opts)?;
    Ok(OrbitReport {
        family: sys.family.name(),
        omega: sys.omega,
        tol,
        guess: guess.clone(),
        passed: orbit.converged,
        orbit,
        periodicity,
        seed,
        search_radius: radius,
        multistart,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFit {
    pub s1: State,
    pub s2: State,
    pub fit: DecayFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub family: &'static str,
    pub omega: f64,
    pub horizon: f64,
    pub window_fraction: f64,
    pub seed: u64,
    pub start_radius: f64,
    pub method: Method,
    pub pairs: Vec<PairFit>,
    /// Smallest fitted rate over the pairs.
    pub delta_fit_min: Option<f64>,
    pub passed: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn uniqueness_report(
    sys: &SystemDef,
    pairs: usize,
    radius: f64,
    seed: u64,
    horizon: f64,
    window: f64,
    samples: usize,
    opts: &IntegratorOptions,
) -> Result<UniquenessReport> {
    if pairs == 0 {
        return Err(Error::Input("--starts must be positive".into()));
    }
    let starts = random_ball_starts(sys.n, 2 * pairs, radius, seed);
    let mut out = Vec::with_capacity(pairs);
    for pair in starts.chunks(2) {
        let fit = uniqueness_decay(sys, &pair[0], &pair[1], horizon, window, samples, opts)?;
        out.push(PairFit {
            s1: pair[0].clone(),
            s2: pair[1].clone(),
            fit,
        });
    }
    let passed = out.iter().all(|p| p.fit.contracting());
    let delta_fit_min = out.iter().filter_map(|p| p.fit.delta_fit).reduce(f64::min);
    Ok(UniquenessReport {
        family: sys.family.name(),
        omega: sys.omega,
        horizon,
        window_fraction: window,
        seed,
        start_radius: radius,
        method: opts.method,
        pairs: out,
        delta_fit_min,
        passed,
    })
}

fn emit(out: &Option<PathBuf>, text: String, code: i32) -> Outcome {
    match out {
        Some(path) => match write_atomic(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome::from_error(&e),
        },
        None => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
    }
}

fn verdict(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs one parsed command. `stdin` backs `--config -`.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    match execute(&cli.command, stdin) {
        Ok(o) => o,
        Err(e) => Outcome::from_error(&e),
    }
}

fn execute(cmd: &Command, stdin: &mut dyn Read) -> Result<Outcome> {
    match cmd {
        Command::Example4 { out } => Ok(emit(out, example4_config().to_json(), EXIT_PASS)),
        Command::Check { common } => {
            let l = load(common, stdin)?;
            let r = check_report(&l.sys, &l.domain, l.cfg.sqrt_eps)?;
            Ok(emit(&common.out, to_json(&r), verdict(r.passed)))
        }
        Command::Certify { common, samples } => {
            let l = load(common, stdin)?;
            let r = certify_report(&l.sys, &l.domain, l.cfg.sqrt_eps, *samples)?;
            Ok(emit(&common.out, to_json(&r), verdict(r.certified)))
        }
        Command::FindOrbit {
            common,
            guess,
            tol,
            starts,
            max_iters,
        } => {
            let l = load(common, stdin)?;
            let guess = match guess {
                Some(g) => State::from_flat(&parse_vector(g, 3 * l.sys.n, "guess")?)?,
                None => State::zeros(l.sys.n),
            };
            let r = orbit_report(
                &l.sys,
                &guess,
                *tol,
                *max_iters,
                *starts,
                radius_of(&l.domain),
                l.domain.seed,
            )?;
            Ok(emit(&common.out, to_json(&r), verdict(r.passed)))
        }
        Command::Uniqueness {
            common,
            integration,
            t1,
            starts,
            samples,
            window,
        } => {
            let l = load(common, stdin)?;
            let r = uniqueness_report(
                &l.sys,
                *starts,
                radius_of(&l.domain),
                l.domain.seed,
                *t1,
                *window,
                *samples,
                &integration.options(*samples),
            )?;
            Ok(emit(&common.out, to_json(&r), verdict(r.passed)))
        }
        Command::Simulate {
            common,
            integration,
            x0,
            y0,
            z0,
            t1,
            samples,
        } => {
            let l = load(common, stdin)?;
            let n = l.sys.n;
            let part = |v: &Option<String>, flag: &str| match v {
                Some(text) => parse_vector(text, n, flag),
                None => Ok(vec![0.0; n]),
            };
            let s0 = State::new(part(x0, "x0")?, part(y0, "y0")?, part(z0, "z0")?)?;
            let t1 = t1.unwrap_or(10.0 * l.sys.omega);
            let mut opts = integration.options(*samples);
            opts.record_v = true;
            let tr = integrate(&l.sys, &s0, 0.0, t1, &opts)?;
            let code = if tr.diverged_at.is_some() {
                EXIT_NUMERIC
            } else {
                EXIT_PASS
            };
            let mut o = emit(&common.out, tr.to_csv(), code);
            if let Some(t) = tr.diverged_at {
                o.stderr
                    .push_str(&format!("error: trajectory diverged after t={t}\n"));
            }
            Ok(o)
        }
    }
}
