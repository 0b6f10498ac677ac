//! Explicit Runge–Kutta integration of the first-order system.
//!
//! Two methods: classical fixed-step RK4 and the embedded Runge–Kutta–Fehlberg
//! 4(5) pair with step control. Output is sampled on a uniform grid by
//! integrating exactly to every output time.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::lyapunov::v_value;
use crate::system::{State, SystemDef};

/// `‖state‖` above which a trajectory is declared divergent.
pub const BLOWUP_NORM: f64 = 1e12;

pub const DEFAULT_ATOL: f64 = 1e-10;
pub const DEFAULT_RTOL: f64 = 1e-8;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
/// Adaptive step underflow threshold, relative to the integration span.
const MIN_STEP_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    Rk4 { h: f64 },
    Rkf45 { atol: f64, rtol: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorOptions {
    pub method: Method,
    /// Number of uniform output intervals on `[t0, t1]`.
    pub samples: usize,
    /// Record `V(X, Y, Z)` alongside each stored state.
    pub record_v: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            method: Method::Rkf45 {
                atol: DEFAULT_ATOL,
                rtol: DEFAULT_RTOL,
            },
            samples: 100,
            record_v: false,
        }
    }
}

impl IntegratorOptions {
    pub fn rk4(h: f64, samples: usize) -> Self {
        Self {
            method: Method::Rk4 { h },
            samples,
            record_v: false,
        }
    }

    pub fn rkf45(atol: f64, rtol: f64, samples: usize) -> Self {
        Self {
            method: Method::Rkf45 { atol, rtol },
            samples,
            record_v: false,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.method {
            Method::Rk4 { h } if !(h.is_finite() && h > 0.0) => {
                Err(Error::Input(format!("step h must be positive, got {h}")))
            }
            Method::Rkf45 { atol, rtol }
                if !(atol.is_finite() && rtol.is_finite() && atol >= 0.0 && rtol >= 0.0)
                    || atol + rtol == 0.0 =>
            {
                Err(Error::Input(
                    "tolerances must be non-negative and not both zero".into(),
                ))
            }
            _ if self.samples == 0 => Err(Error::Input("samples must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub integrator: Method,
    pub steps: usize,
    pub rejected_steps: usize,
}

/// Integration output on flat state vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub meta: TrajectoryMeta,
    /// Last finite time reached before the blow-up threshold, if any.
    pub diverged_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub v_series: Option<Vec<f64>>,
    pub meta: TrajectoryMeta,
    pub diverged_at: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }

    /// CSV with header `t,x1..xn,y1..yn,z1..zn[,V]` and 17 significant digits.
    ///
    /// A diverged trajectory ends with a `# diverged at t=...` comment line.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map(State::dim).unwrap_or(0);
        let mut out = String::from("t");
        for prefix in ["x", "y", "z"] {
            for i in 1..=n {
                let _ = write!(out, ",{prefix}{i}");
            }
        }
        if self.v_series.is_some() {
            out.push_str(",V");
        }
        out.push('\n');
        for (k, (t, s)) in self.times.iter().zip(&self.states).enumerate() {
            out.push_str(&fmt_g17(*t));
            for v in s.x.iter().chain(&s.y).chain(&s.z) {
                out.push(',');
                out.push_str(&fmt_g17(*v));
            }
            if let Some(vs) = &self.v_series {
                out.push(',');
                out.push_str(&fmt_g17(vs[k]));
            }
            out.push('\n');
        }
        if let Some(t) = self.diverged_at {
            let _ = writeln!(out, "# diverged at t={}", fmt_g17(t));
        }
        out
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Integrates `sys` from `s0` over `[t0, t1]`, sampling `opts.samples + 1`
/// uniform output times. A blow-up truncates the trajectory and sets
/// `diverged_at` instead of failing.
pub fn integrate(
    sys: &SystemDef,
    s0: &State,
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if s0.dim() != sys.n {
        return Err(Error::DimensionMismatch {
            expected: sys.n,
            got: s0.dim(),
        });
    }
    let rhs = |t: f64, y: &[f64], out: &mut [f64]| sys.rhs_flat(t, y, out, true);
    let raw = integrate_flat(rhs, &s0.to_flat(), t0, t1, opts)?;
    let states = raw
        .states
        .iter()
        .map(|v| State::from_flat(v))
        .collect::<Result<Vec<_>>>()?;
    let v_series = if opts.record_v {
        Some(
            states
                .iter()
                .map(|s| v_value(&sys.a, &sys.b, s))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(Trajectory {
        times: raw.times,
        states,
        v_series,
        meta: raw.meta,
        diverged_at: raw.diverged_at,
    })
}

/// State at `t0 + period` only.
pub fn flow_map(
    sys: &SystemDef,
    s0: &State,
    t0: f64,
    period: f64,
    opts: &IntegratorOptions,
) -> Result<State> {
    if period == 0.0 {
        return Ok(s0.clone());
    }
    let mut o = opts.clone();
    o.samples = 1;
    o.record_v = false;
    let traj = integrate(sys, s0, t0, t0 + period, &o)?;
    if let Some(last_t) = traj.diverged_at {
        return Err(Error::Divergence { last_t });
    }
    Ok(traj.last().clone())
}

/// Core driver over any right-hand side `f(t, y, dy)`.
///
/// Integration runs forward or backward depending on the sign of `t1 − t0`.
pub fn integrate_flat<F>(
    mut rhs: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<FlatTrajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    opts.validate()?;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(Error::Input(format!("invalid time span [{t0}, {t1}]")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial state".into()));
    }
    let dim = y0.len();
    let span = t1 - t0;
    let dir = span.signum();
    let mut meta = TrajectoryMeta {
        integrator: opts.method,
        steps: 0,
        rejected_steps: 0,
    };
    let mut times = vec![t0];
    let mut states = vec![y0.to_vec()];
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut t_finite = t0;
    let mut ws = Workspace::new(dim);

    // Adaptive step carried across output intervals.
    let mut h_adapt = match opts.method {
        Method::Rkf45 { .. } => initial_step(&mut rhs, t0, &y, span.abs(), &mut ws)? * dir,
        Method::Rk4 { .. } => 0.0,
    };

    for k in 1..=opts.samples {
        let t_out = if k == opts.samples {
            t1
        } else {
            t0 + span * (k as f64) / (opts.samples as f64)
        };
        loop {
            let remaining = t_out - t;
            if remaining * dir <= 0.0 {
                break;
            }
            match opts.method {
                Method::Rk4 { h } => {
                    // Snap the final step to the output time.
                    let step = if remaining.abs() <= h * (1.0 + 1e-12) {
                        remaining
                    } else {
                        h * dir
                    };
                    match rk4_step(&mut rhs, t, &y, step, &mut ws) {
                        Ok(()) => {}
                        Err(Error::Evaluation { .. }) => {
                            return Ok(FlatTrajectory {
                                times,
                                states,
                                meta,
                                diverged_at: Some(t_finite),
                            })
                        }
                        Err(e) => return Err(e),
                    }
                    std::mem::swap(&mut y, &mut ws.ynew);
                    t = if step == remaining { t_out } else { t + step };
                    meta.steps += 1;
                }
                Method::Rkf45 { atol, rtol } => {
                    let min_step = MIN_STEP_RATIO * span.abs();
                    loop {
                        let last = h_adapt.abs() >= remaining.abs();
                        let step = if last { remaining } else { h_adapt };
                        if step.abs() < min_step && !last {
                            return Err(Error::Stiffness { t, h: step.abs() });
                        }
                        // A non-finite stage value rejects the step like a huge error.
                        let err = match rkf45_step(&mut rhs, t, &y, step, atol, rtol, &mut ws) {
                            Ok(e) => e,
                            Err(Error::Evaluation { .. }) => f64::INFINITY,
                            Err(e) => return Err(e),
                        };
                        let factor = if err == 0.0 {
                            MAX_FACTOR
                        } else {
                            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                        };
                        if err <= 1.0 {
                            std::mem::swap(&mut y, &mut ws.ynew);
                            t = if last { t_out } else { t + step };
                            meta.steps += 1;
                            // Keep the controller's step, not the truncated one.
                            if !last || factor < 1.0 {
                                h_adapt = step * factor;
                            }
                            break;
                        }
                        meta.rejected_steps += 1;
                        h_adapt = step * factor;
                    }
                }
            }
            if !y.iter().all(|v| v.is_finite()) || norm(&y) > BLOWUP_NORM {
                return Ok(FlatTrajectory {
                    times,
                    states,
                    meta,
                    diverged_at: Some(t_finite),
                });
            }
            t_finite = t;
        }
        times.push(t_out);
        states.push(y.clone());
    }
    Ok(FlatTrajectory {
        times,
        states,
        meta,
        diverged_at: None,
    })
}

struct Workspace {
    k: [Vec<f64>; 6],
    tmp: Vec<f64>,
    ynew: Vec<f64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            ynew: vec![0.0; dim],
        }
    }
}

fn initial_step<F>(rhs: &mut F, t: f64, y: &[f64], span: f64, ws: &mut Workspace) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    rhs(t, y, &mut ws.k[0])?;
    let d0 = norm(y);
    let d1 = norm(&ws.k[0]);
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-3 * span
    } else {
        0.01 * d0 / d1
    };
    Ok(h.min(0.1 * span).max(1e-6 * span))
}

fn rk4_step<F>(rhs: &mut F, t: f64, y: &[f64], h: f64, ws: &mut Workspace) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y.len();
    let [k1, k2, k3, k4, _, _] = &mut ws.k;
    rhs(t, y, k1)?;
    for i in 0..dim {
        ws.tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    rhs(t + 0.5 * h, &ws.tmp, k2)?;
    for i in 0..dim {
        ws.tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    rhs(t + 0.5 * h, &ws.tmp, k3)?;
    for i in 0..dim {
        ws.tmp[i] = y[i] + h * k3[i];
    }
    rhs(t + h, &ws.tmp, k4)?;
    for i in 0..dim {
        ws.ynew[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(())
}

// Fehlberg 4(5) tableau.
const C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
const A2: [f64; 1] = [0.25];
const A3: [f64; 2] = [3.0 / 32.0, 9.0 / 32.0];
const A4: [f64; 3] = [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0];
const A5: [f64; 4] = [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0];
const A6: [f64; 5] = [
    -8.0 / 27.0,
    2.0,
    -3544.0 / 2565.0,
    1859.0 / 4104.0,
    -11.0 / 40.0,
];
const B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -0.2,
    0.0,
];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

/// One Fehlberg step; writes the fifth-order solution to `ws.ynew` and
/// returns the scaled max-norm error estimate (accept when ≤ 1).
fn rkf45_step<F>(
    rhs: &mut F,
    t: f64,
    y: &[f64],
    h: f64,
    atol: f64,
    rtol: f64,
    ws: &mut Workspace,
) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y.len();
    let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
    rhs(t, y, &mut ws.k[0])?;
    for (stage, row) in rows.iter().enumerate() {
        let s = stage + 1;
        for i in 0..dim {
            let mut acc = 0.0;
            for (j, a) in row.iter().enumerate() {
                acc += a * ws.k[j][i];
            }
            ws.tmp[i] = y[i] + h * acc;
        }
        rhs(t + C[s] * h, &ws.tmp, &mut ws.k[s])?;
    }
    let mut err = 0.0_f64;
    for i in 0..dim {
        let mut s4 = 0.0;
        let mut s5 = 0.0;
        for j in 0..6 {
            s4 += B4[j] * ws.k[j][i];
            s5 += B5[j] * ws.k[j][i];
        }
        let y5 = y[i] + h * s5;
        let e = (h * (s5 - s4)).abs();
        let e = if e.is_finite() { e } else { f64::INFINITY };
        let scale = atol + rtol * y[i].abs().max(y5.abs());
        err = err.max(e / scale);
        ws.ynew[i] = y5;
    }
    if err.is_nan() {
        err = f64::INFINITY;
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, SymMatrix};
    use crate::system::{Family, Sinusoid};

    fn linear(f: f64, g: f64, h: f64, amp: f64) -> SystemDef {
        SystemDef::new(
            Family::LinearConstant {
                f: SymMatrix::diag(&[f]),
                g: SymMatrix::diag(&[g]),
                h: Matrix::from_rows(&[vec![h]]).unwrap(),
                forcing: Sinusoid {
                    amplitude: vec![amp],
                    frequency: 1.0,
                    phase: 0.0,
                },
            },
            None,
            None,
            2.0 * std::f64::consts::PI,
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_is_constant() {
        let sys = linear(2.0, 2.0, 1.0, 0.0);
        let tr = integrate(
            &sys,
            &State::zeros(1),
            0.0,
            5.0,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(tr.states.iter().all(|s| s.norm() == 0.0));
        assert_eq!(tr.times.len(), 101);
    }

    #[test]
    fn rk4_exponential_decay() {
        // z' = -z with X, Y decoupled from Z's equation.
        let sys = linear(1.0, 0.0, 0.0, 0.0);
        let s0 = State::new(vec![0.0], vec![0.0], vec![1.0]).unwrap();
        let tr = integrate(&sys, &s0, 0.0, 1.0, &IntegratorOptions::rk4(0.01, 10)).unwrap();
        assert!((tr.last().z[0] - (-1.0_f64).exp()).abs() < 1e-9);
        assert_eq!(tr.meta.steps, 100);
    }

    #[test]
    fn rkf45_exponential_decay() {
        let sys = linear(1.0, 0.0, 0.0, 0.0);
        let s0 = State::new(vec![0.0], vec![0.0], vec![1.0]).unwrap();
        let tr = integrate(
            &sys,
            &s0,
            0.0,
            1.0,
            &IntegratorOptions::rkf45(1e-12, 1e-12, 4),
        )
        .unwrap();
        assert!((tr.last().z[0] - (-1.0_f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn flow_map_zero_period_is_identity() {
        let sys = linear(2.0, 2.0, 1.0, 1.0);
        let s0 = State::new(vec![0.3], vec![-0.2], vec![1.0]).unwrap();
        let s = flow_map(&sys, &s0, 0.0, 0.0, &IntegratorOptions::default()).unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn anti_damped_run_flags_divergence() {
        let sys = linear(-1.0, 1.0, 1.0, 0.0);
        let s0 = State::new(vec![1.0], vec![0.0], vec![0.0]).unwrap();
        let tr = integrate(&sys, &s0, 0.0, 200.0, &IntegratorOptions::default()).unwrap();
        let t = tr.diverged_at.expect("should diverge");
        assert!(t > 0.0 && t < 200.0);
        assert!(tr.states.iter().all(|s| s.is_finite()));
        assert!(matches!(
            flow_map(&sys, &s0, 0.0, 200.0, &IntegratorOptions::default()),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn csv_header_and_precision() {
        let sys = linear(2.0, 2.0, 1.0, 0.0);
        let mut opts = IntegratorOptions::rk4(0.1, 2);
        opts.record_v = true;
        let s0 = State::new(vec![1.0], vec![0.0], vec![0.0]).unwrap();
        let csv = integrate(&sys, &s0, 0.0, 1.0, &opts).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,x1,y1,z1,V");
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.0000000000000000e0,1.0000000000000000e0"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn rejects_bad_options() {
        let sys = linear(2.0, 2.0, 1.0, 0.0);
        let s0 = State::zeros(1);
        assert!(integrate(&sys, &s0, 0.0, 1.0, &IntegratorOptions::rk4(-1.0, 1)).is_err());
        assert!(integrate(&sys, &s0, 1.0, 1.0, &IntegratorOptions::default()).is_err());
    }
}
