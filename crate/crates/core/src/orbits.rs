//! Periodic solutions by Newton shooting on the period map, plus the two
//! numerical consequences of the Lyapunov argument: exponential contraction
//! of solution differences and ultimate boundedness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{flow_map, integrate, IntegratorOptions};
use crate::linalg::{norm, sym_eigenvalues, Lu, Matrix};
use crate::system::{paired_difference_trajectory, State, SystemDef};

pub const DEFAULT_SHOOTING_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 50;
/// RK4 steps per period used by the default shooting integrator.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 2000;
/// Condition estimate above which the shooting Jacobian counts as singular.
pub const MAX_CONDITION: f64 = 1e12;
const LINE_SEARCH_HALVINGS: usize = 8;
/// Newton steps are shortened to at most this multiple of `1 + ‖s‖`.
pub const MAX_STEP_RATIO: f64 = 1.0;
/// Fixed points closer than this are the same orbit.
pub const DISTINCT_ORBIT_TOL: f64 = 1e-6;

/// Differences below this are treated as rounding noise.
pub const DIFFERENCE_FLOOR: f64 = 1e-13;
/// Fitted rates at or below this count as non-contracting.
pub const NON_CONTRACTING_RATE: f64 = 1e-2;
const MIN_FIT_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub integrator: IntegratorOptions,
}

impl ShootingOptions {
    /// Defaults: tolerance 1e-10, 50 iterations, fixed-step RK4 with
    /// 2000 steps per period. A fixed step keeps the period map smooth for
    /// the finite-difference Jacobian.
    pub fn for_period(omega: f64) -> Self {
        Self {
            tol: DEFAULT_SHOOTING_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            integrator: IntegratorOptions::rk4(omega / DEFAULT_STEPS_PER_PERIOD as f64, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitResult {
    pub s_star: State,
    /// `‖Φ_ω(s*) − s*‖`.
    pub residual: f64,
    pub newton_iters: usize,
    pub converged: bool,
    /// Largest singular value of the finite-difference Jacobian of `Φ_ω`.
    pub floquet_spectrum_radius: Option<f64>,
}

fn period_residual(sys: &SystemDef, s: &State, opts: &ShootingOptions) -> Result<(State, f64)> {
    let phi = flow_map(sys, s, 0.0, sys.omega, &opts.integrator)?;
    let g = phi.sub(s);
    let r = g.norm();
    Ok((g, r))
}

/// Forward-difference Jacobian of `Φ_ω` at `s` with step `1e-6·(1 + ‖s‖)`.
fn flow_jacobian(sys: &SystemDef, s: &State, opts: &ShootingOptions) -> Result<Matrix> {
    let base = flow_map(sys, s, 0.0, sys.omega, &opts.integrator)?.to_flat();
    let flat = s.to_flat();
    let dim = flat.len();
    let h = 1e-6 * (1.0 + s.norm());
    let mut jac = Matrix::zeros(dim);
    let mut pert = flat.clone();
    for j in 0..dim {
        pert[j] = flat[j] + h;
        let out = flow_map(
            sys,
            &State::from_flat(&pert)?,
            0.0,
            sys.omega,
            &opts.integrator,
        )?
        .to_flat();
        pert[j] = flat[j];
        for i in 0..dim {
            jac.set(i, j, (out[i] - base[i]) / h);
        }
    }
    Ok(jac)
}

fn largest_singular_value(m: &Matrix) -> Result<f64> {
    let mtm = m.transpose().mul(m).symmetric_part();
    Ok(sym_eigenvalues(&mtm)?.max().max(0.0).sqrt())
}

/// Newton shooting for a fixed point of the period map `Φ_ω`.
///
/// Each step solves `(DΦ − I) d = −(Φ(s) − s)` with a forward-difference
/// Jacobian, shortens `d` to at most `1 + ‖s‖`, and halves it up to 8 times
/// while the residual does not decrease.
pub fn find_periodic(
    sys: &SystemDef,
    guess: &State,
    opts: &ShootingOptions,
) -> Result<OrbitResult> {
    if guess.dim() != sys.n {
        return Err(Error::DimensionMismatch {
            expected: sys.n,
            got: guess.dim(),
        });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Input("shooting tolerance must be positive".into()));
    }
    let mut s = guess.clone();
    let (mut g, mut r) = period_residual(sys, &s, opts)?;
    let mut iters = 0;
    let mut last_jac = None;
    while r > opts.tol && iters < opts.max_iters {
        let phi_jac = flow_jacobian(sys, &s, opts)?;
        let mut newton = phi_jac.clone();
        for i in 0..newton.dim() {
            newton.set(i, i, newton.get(i, i) - 1.0);
        }
        let lu = Lu::new(&newton);
        let condition = lu.condition_1(&newton);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularJacobian { condition });
        }
        let rhs: Vec<f64> = g.to_flat().iter().map(|v| -v).collect();
        let step = lu.solve(&rhs).ok_or(Error::SingularJacobian {
            condition: f64::INFINITY,
        })?;
        let cap = MAX_STEP_RATIO * (1.0 + s.norm());
        let len = norm(&step);
        let step: Vec<f64> = if len > cap {
            step.iter().map(|d| d * cap / len).collect()
        } else {
            step
        };
        last_jac = Some(phi_jac);
        iters += 1;

        let base = s.to_flat();
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=LINE_SEARCH_HALVINGS {
            let trial: Vec<f64> = base
                .iter()
                .zip(&step)
                .map(|(b, d)| b + lambda * d)
                .collect();
            let ts = State::from_flat(&trial)?;
            match period_residual(sys, &ts, opts) {
                Ok((tg, tr)) if tr < r => {
                    accepted = Some((ts, tg, tr));
                    break;
                }
                Ok(_) => {}
                // A trial that leaves the region of finite flow counts as no improvement.
                Err(e) if e.is_input() => return Err(e),
                Err(_) => {}
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((ts, tg, tr)) => {
                s = ts;
                g = tg;
                r = tr;
            }
            None => break,
        }
    }
    let jac = match last_jac {
        Some(j) if r > opts.tol => j,
        _ => flow_jacobian(sys, &s, opts)?,
    };
    Ok(OrbitResult {
        s_star: s,
        residual: r,
        newton_iters: iters,
        converged: r <= opts.tol,
        floquet_spectrum_radius: Some(largest_singular_value(&jac)?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicityCheck {
    /// Max over one period of `‖s(t + ω) − s(t)‖`.
    pub max_mismatch: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Integrates two periods from `s*` and compares the second against the first
/// at `samples` uniform phases. Passes iff the mismatch is ≤ `10·tol`.
pub fn verify_periodic(
    sys: &SystemDef,
    orbit: &OrbitResult,
    samples: usize,
    opts: &ShootingOptions,
) -> Result<PeriodicityCheck> {
    if !orbit.converged {
        return Err(Error::Precondition("orbit did not converge".into()));
    }
    if samples == 0 {
        return Err(Error::Input("samples must be positive".into()));
    }
    let mut o = opts.integrator.clone();
    o.samples = 2 * samples;
    let tr = integrate(sys, &orbit.s_star, 0.0, 2.0 * sys.omega, &o)?;
    if let Some(last_t) = tr.diverged_at {
        return Err(Error::Divergence { last_t });
    }
    let max_mismatch = (0..=samples)
        .map(|k| tr.states[k + samples].sub(&tr.states[k]).norm())
        .fold(0.0, f64::max);
    let threshold = 10.0 * opts.tol;
    Ok(PeriodicityCheck {
        max_mismatch,
        threshold,
        passed: max_mismatch <= threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultistartReport {
    pub attempts: usize,
    pub converged: usize,
    pub failures: usize,
    /// One line per failed start: its index and why it failed.
    pub failure_reasons: Vec<String>,
    /// Pairwise-distinct converged fixed points.
    pub orbits: Vec<OrbitResult>,
}

/// Shoots from `starts` seeded random guesses with components uniform in
/// `[-radius, radius]` and keeps the distinct converged fixed points.
pub fn multistart_periodic(
    sys: &SystemDef,
    starts: usize,
    radius: f64,
    seed: u64,
    opts: &ShootingOptions,
) -> Result<MultistartReport> {
    let dim = 3 * sys.n;
    let mut orbits: Vec<OrbitResult> = Vec::new();
    let mut converged = 0;
    let mut failure_reasons = Vec::new();
    for k in 0..starts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let guess: Vec<f64> = (0..dim)
            .map(|_| radius * (2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        match find_periodic(sys, &State::from_flat(&guess)?, opts) {
            Ok(o) if o.converged => {
                converged += 1;
                let fresh = orbits
                    .iter()
                    .all(|e| e.s_star.sub(&o.s_star).norm() > DISTINCT_ORBIT_TOL);
                if fresh {
                    orbits.push(o);
                }
            }
            Ok(o) => failure_reasons.push(format!(
                "start {k}: not converged after {} iterations (residual {:e})",
                o.newton_iters, o.residual
            )),
            Err(e) if e.is_input() => return Err(e),
            Err(e) => failure_reasons.push(format!("start {k}: {e}")),
        }
    }
    Ok(MultistartReport {
        attempts: starts,
        converged,
        failures: failure_reasons.len(),
        failure_reasons,
        orbits,
    })
}

/// Least-squares line `y ≈ intercept + slope·x` with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let m = xs.len();
    if m < 2 || ys.len() != m {
        return None;
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Some(LineFit {
        intercept,
        slope,
        r_squared,
    })
}

/// Exponential fit `‖(ψ, η, τ)‖(t) ≈ K e^{−δt}` over the tail of a horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub k_fit: Option<f64>,
    pub delta_fit: Option<f64>,
    pub r_squared: Option<f64>,
    pub fit_window: (f64, f64),
    /// Rate fitted to `V(ψ, η, τ)`, halved so it is comparable with `delta_fit`.
    pub v_delta_fit: Option<f64>,
    /// Identical starts: the difference is identically zero and nothing is fitted.
    pub degenerate: bool,
    /// The window was moved earlier because the difference hit rounding noise.
    pub window_shrunk: bool,
    /// Not enough samples above the rounding floor even after shrinking.
    pub floor_reached: bool,
    /// `delta_fit ≤ NON_CONTRACTING_RATE`.
    pub non_contracting: bool,
}

impl DecayFit {
    /// A usable contraction rate was measured.
    pub fn contracting(&self) -> bool {
        !self.degenerate && !self.floor_reached && !self.non_contracting && self.delta_fit.is_some()
    }
}

/// Fits the decay rate of the difference between two solutions over the
/// trailing `window_fraction` of `[0, horizon]`.
pub fn uniqueness_decay(
    sys: &SystemDef,
    s1: &State,
    s2: &State,
    horizon: f64,
    window_fraction: f64,
    samples: usize,
    opts: &IntegratorOptions,
) -> Result<DecayFit> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Input(format!(
            "fit window fraction must lie in (0, 1], got {window_fraction}"
        )));
    }
    if !(horizon > 0.0) {
        return Err(Error::Input("horizon must be positive".into()));
    }
    let series = paired_difference_trajectory(sys, s1, s2, horizon, samples, opts)?;
    let mut fit = DecayFit {
        k_fit: None,
        delta_fit: None,
        r_squared: None,
        fit_window: (horizon * (1.0 - window_fraction), horizon),
        v_delta_fit: None,
        degenerate: false,
        window_shrunk: false,
        floor_reached: false,
        non_contracting: false,
    };
    if series.norms.iter().all(|v| *v == 0.0) {
        fit.degenerate = true;
        return Ok(fit);
    }

    let floor_time = series
        .times
        .iter()
        .zip(&series.norms)
        .find(|(_, v)| **v < DIFFERENCE_FLOOR)
        .map(|(t, _)| *t);
    if let Some(tf) = floor_time {
        if tf <= fit.fit_window.1 {
            fit.window_shrunk = true;
            fit.fit_window = (tf * (1.0 - window_fraction), tf);
        }
    }
    let (lo, hi) = fit.fit_window;
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    let mut vlogs = Vec::new();
    for ((t, v), vv) in series.times.iter().zip(&series.norms).zip(&series.v_values) {
        if *t >= lo && *t <= hi && *v >= DIFFERENCE_FLOOR {
            ts.push(*t);
            logs.push(v.ln());
            vlogs.push(vv.max(f64::MIN_POSITIVE).ln());
        }
    }
    if ts.len() < MIN_FIT_POINTS {
        fit.floor_reached = true;
        return Ok(fit);
    }
    if let Some(line) = fit_line(&ts, &logs) {
        fit.k_fit = Some(line.intercept.exp());
        fit.delta_fit = Some(-line.slope);
        fit.r_squared = Some(line.r_squared);
        fit.non_contracting = -line.slope <= NON_CONTRACTING_RATE;
    }
    if let Some(line) = fit_line(&ts, &vlogs) {
        fit.v_delta_fit = Some(-0.5 * line.slope);
    }
    Ok(fit)
}

/// Estimate of the ultimate bound on `‖X‖² + ‖Y‖² + ‖Z‖²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEstimate {
    /// Max over non-diverged runs of the tail-window sup of `‖s‖²`;
    /// `None` when every run diverged.
    pub delta_1_est: Option<f64>,
    pub horizon: f64,
    pub start_count: usize,
    pub diverged_count: usize,
    /// Runs that stopped on an integrator failure (e.g. step underflow).
    pub failed_count: usize,
    /// Sup over the second half of the tail divided by the sup over the
    /// first half, maximized over runs. Values well above 1 mean the state is
    /// still growing at the horizon and the estimate is horizon-dependent.
    pub tail_growth: Option<f64>,
}

/// Integrates every start to `horizon` and takes the sup of `‖s‖²` over the
/// trailing `tail_fraction` of each run.
pub fn ultimate_bound(
    sys: &SystemDef,
    starts: &[State],
    horizon: f64,
    tail_fraction: f64,
    opts: &IntegratorOptions,
) -> Result<BoundEstimate> {
    if !(horizon > 0.0) {
        return Err(Error::Input("horizon must be positive".into()));
    }
    if starts.is_empty() {
        return Err(Error::Input("at least one start is required".into()));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Input(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let t_tail = horizon * (1.0 - tail_fraction);
    let t_mid = horizon * (1.0 - 0.5 * tail_fraction);
    let mut est: Option<f64> = None;
    let mut growth: Option<f64> = None;
    let mut diverged = 0;
    let mut failed = 0;
    for s0 in starts {
        let tr = match integrate(sys, s0, 0.0, horizon, opts) {
            Ok(tr) => tr,
            Err(e) if e.is_input() => return Err(e),
            Err(_) => {
                failed += 1;
                continue;
            }
        };
        if tr.diverged_at.is_some() {
            diverged += 1;
            continue;
        }
        let mut first = 0.0_f64;
        let mut second = 0.0_f64;
        for (t, s) in tr.times.iter().zip(&tr.states) {
            if *t >= t_tail {
                let e = s.norm_sq();
                if *t < t_mid {
                    first = first.max(e);
                } else {
                    second = second.max(e);
                }
            }
        }
        let sup = first.max(second);
        est = Some(est.map_or(sup, |v| v.max(sup)));
        if first > 0.0 {
            let g = second / first;
            growth = Some(growth.map_or(g, |v: f64| v.max(g)));
        }
    }
    Ok(BoundEstimate {
        delta_1_est: est,
        horizon,
        start_count: starts.len(),
        diverged_count: diverged,
        failed_count: failed,
        tail_growth: growth,
    })
}

/// `count` seeded starts drawn uniformly from the ball of `radius` in `R^{3n}`.
pub fn random_ball_starts(n: usize, count: usize, radius: f64, seed: u64) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 3 * n;
    (0..count)
        .map(|_| {
            let dir = crate::lyapunov::random_unit(dim, &mut rng);
            let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
            let v: Vec<f64> = dir.iter().map(|d| d * r).collect();
            State::from_flat(&v).expect("finite by construction")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::system::{Family, Sinusoid};
    use std::f64::consts::PI;

    /// `x''' + f x'' + g x' + h x = amp·cos t` with period `2π`.
    fn scalar(f: f64, g: f64, h: f64, amp: f64) -> SystemDef {
        let fam = Family::LinearConstant {
            f: SymMatrix::diag(&[f]),
            g: SymMatrix::diag(&[g]),
            h: Matrix::from_rows(&[vec![h]]).unwrap(),
            forcing: Sinusoid {
                amplitude: vec![amp],
                frequency: 1.0,
                phase: 0.0,
            },
        };
        let id = Some(SymMatrix::identity(1));
        SystemDef::new(fam, id.clone(), id, 2.0 * PI).unwrap()
    }

    fn oracle() -> SystemDef {
        scalar(2.0, 2.0, 1.0, 1.0)
    }

    fn state(v: [f64; 3]) -> State {
        State::from_flat(&v).unwrap()
    }

    fn shooting() -> ShootingOptions {
        ShootingOptions::for_period(2.0 * PI)
    }

    #[test]
    fn equilibrium_guess_returns_equilibrium() {
        let sys = scalar(2.0, 2.0, 1.0, 0.0);
        let o = find_periodic(&sys, &State::zeros(1), &shooting()).unwrap();
        assert!(o.converged);
        assert_eq!((o.residual, o.newton_iters), (0.0, 0));
        assert_eq!(o.s_star, State::zeros(1));
        let v = verify_periodic(&sys, &o, 16, &shooting()).unwrap();
        assert_eq!(v.max_mismatch, 0.0);
    }

    #[test]
    fn linear_oracle_orbit() {
        // x_p = Re(e^{it}/(-1 + i)) = (-cos t + sin t)/2
        let o = find_periodic(&oracle(), &State::zeros(1), &shooting()).unwrap();
        assert!(o.converged && o.residual <= DEFAULT_SHOOTING_TOL);
        let err = o.s_star.sub(&state([-0.5, 0.5, 0.5])).norm();
        assert!(err < 1e-6, "{err:e}");
        // every characteristic root decays, so the period map contracts
        assert!(o.floquet_spectrum_radius.unwrap() < 1.0);
        let v = verify_periodic(&oracle(), &o, 64, &shooting()).unwrap();
        assert!(v.passed && v.max_mismatch <= 1e-8, "{v:?}");
    }

    #[test]
    fn perturbed_orbit_fails_verification() {
        let mut o = find_periodic(&oracle(), &State::zeros(1), &shooting()).unwrap();
        o.s_star.x[0] += 1e-3;
        let v = verify_periodic(&oracle(), &o, 64, &shooting()).unwrap();
        assert!(!v.passed && v.max_mismatch > 1e3 * v.threshold);
    }

    #[test]
    fn verify_needs_converged_orbit() {
        let mut o = find_periodic(&oracle(), &State::zeros(1), &shooting()).unwrap();
        o.converged = false;
        assert!(matches!(
            verify_periodic(&oracle(), &o, 8, &shooting()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn worked_example_zero_orbit() {
        let sys = SystemDef::new(
            Family::Example4 {
                phase: 0.0,
                state_free_forcing: false,
            },
            None,
            None,
            2.0 * PI,
        )
        .unwrap();
        let o = find_periodic(&sys, &State::zeros(2), &shooting()).unwrap();
        assert!(o.converged && o.residual == 0.0);
        assert_eq!(o.s_star, State::zeros(2));
    }

    #[test]
    fn shooting_rejects_bad_input() {
        let mut opts = shooting();
        assert!(matches!(
            find_periodic(&oracle(), &State::zeros(2), &opts),
            Err(Error::DimensionMismatch { .. })
        ));
        opts.tol = 0.0;
        assert!(find_periodic(&oracle(), &State::zeros(1), &opts).is_err());
    }

    #[test]
    fn identical_starts_are_degenerate() {
        let s = state([0.3, -0.1, 0.2]);
        let f = uniqueness_decay(
            &oracle(),
            &s,
            &s,
            20.0,
            0.5,
            200,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(f.degenerate && f.delta_fit.is_none() && !f.contracting());
    }

    #[test]
    fn oracle_difference_decays_at_half() {
        let f = uniqueness_decay(
            &oracle(),
            &state([1.0, 0.0, 0.0]),
            &state([-0.4, 0.7, 0.1]),
            40.0,
            0.5,
            400,
            &IntegratorOptions::default(),
        )
        .unwrap();
        let d = f.delta_fit.unwrap();
        assert!((d - 0.5).abs() <= 0.05, "{d}");
        assert!(f.r_squared.unwrap() >= 0.99 && f.k_fit.unwrap() > 0.0);
        assert!(f.contracting());
        assert_eq!(f.fit_window, (20.0, 40.0));
    }

    #[test]
    fn undamped_difference_is_non_contracting() {
        // x''' + x' = 0: roots 0 and ±i
        let sys = scalar(0.0, 1.0, 0.0, 0.0);
        let f = uniqueness_decay(
            &sys,
            &state([1.0, 0.0, 0.0]),
            &state([0.0, 0.5, -0.3]),
            40.0,
            0.5,
            400,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(f.delta_fit.unwrap().abs() < NON_CONTRACTING_RATE, "{f:?}");
        assert!(f.non_contracting && !f.contracting());
    }

    #[test]
    fn fast_decay_shrinks_the_window() {
        // (s + 3)³: differences reach the rounding floor long before t = 40
        let sys = scalar(9.0, 27.0, 27.0, 0.0);
        let f = uniqueness_decay(
            &sys,
            &state([1.0, 0.0, 0.0]),
            &State::zeros(1),
            40.0,
            0.5,
            800,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(f.window_shrunk);
        assert!(f.fit_window.1 < 20.0);
        assert!(f.delta_fit.unwrap() > 2.0, "{f:?}");
    }

    #[test]
    fn decay_rejects_bad_window() {
        let s = State::zeros(1);
        let o = IntegratorOptions::default();
        assert!(uniqueness_decay(&oracle(), &s, &s, 10.0, 0.0, 10, &o).is_err());
        assert!(uniqueness_decay(&oracle(), &s, &s, 10.0, 1.5, 10, &o).is_err());
        assert!(uniqueness_decay(&oracle(), &s, &s, -1.0, 0.5, 10, &o).is_err());
    }

    #[test]
    fn equilibrium_bound_is_zero() {
        let sys = scalar(2.0, 2.0, 1.0, 0.0);
        let b = ultimate_bound(
            &sys,
            &[State::zeros(1)],
            20.0,
            0.5,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert_eq!(b.delta_1_est, Some(0.0));
        assert_eq!((b.start_count, b.diverged_count), (1, 0));
    }

    #[test]
    fn oracle_bound_matches_forced_energy() {
        // ‖x_p‖² + ‖x_p'‖² + ‖x_p''‖² = (3 - sin 2t)/4, with sup 1
        let starts = random_ball_starts(1, 100, 5.0, 3);
        let opts = IntegratorOptions::rkf45(1e-10, 1e-8, 4000);
        let b = ultimate_bound(&oracle(), &starts, 80.0, 0.5, &opts).unwrap();
        let d = b.delta_1_est.unwrap();
        assert!((d - 1.0).abs() <= 0.1, "{d}");
        assert_eq!(b.diverged_count, 0);
        assert!((b.tail_growth.unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn anti_damped_bound_counts_divergence() {
        // x''' - x'' + x' + x = 0 has a root with positive real part
        let sys = scalar(-1.0, 1.0, 1.0, 0.0);
        let starts = random_ball_starts(1, 5, 1.0, 4);
        let b = ultimate_bound(&sys, &starts, 200.0, 0.5, &IntegratorOptions::default()).unwrap();
        assert!(b.diverged_count > 0);
        assert_eq!(b.start_count, 5);
    }

    #[test]
    fn bound_rejects_bad_input() {
        let o = IntegratorOptions::default();
        assert!(ultimate_bound(&oracle(), &[], 1.0, 0.5, &o).is_err());
        assert!(ultimate_bound(&oracle(), &[State::zeros(1)], 0.0, 0.5, &o).is_err());
        assert!(ultimate_bound(&oracle(), &[State::zeros(1)], 1.0, 2.0, &o).is_err());
    }

    #[test]
    fn multistart_keeps_distinct_orbits_only() {
        let r = multistart_periodic(&oracle(), 4, 1.0, 0, &shooting()).unwrap();
        assert_eq!((r.attempts, r.converged, r.failures), (4, 4, 0));
        assert_eq!(r.orbits.len(), 1);
    }

    #[test]
    fn line_fit_exact() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 3.0).abs() < 1e-13);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(fit_line(&[1.0], &[1.0]).is_none());
        assert!(fit_line(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn ball_starts_are_inside() {
        let starts = random_ball_starts(2, 50, 1.0, 9);
        assert_eq!(starts.len(), 50);
        assert!(starts.iter().all(|s| s.norm() <= 1.0));
        assert_eq!(starts, random_ball_starts(2, 50, 1.0, 9));
    }
}
