//! The third-order system `X''' + F(X,X',X'')X'' + G(X,X')X' + H(X) = P(t,X,X',X'')`
//! in first-order form, its secant operator, and the paired/difference systems.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypothesis::sqrt_eps_budget;
use crate::integrate::{self, IntegratorOptions};
use crate::linalg::{norm, Matrix, SymMatrix};
use crate::quadrature::gauss_legendre_unit;

/// Relative residual accepted for the secant identity `Â(X−Y) = H(X) − H(Y)`.
pub const SECANT_TOL: f64 = 1e-6;

pub const DEFAULT_QUAD_ORDER: usize = 8;

/// `(X, Y, Z) = (X, X', X'')`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct State {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl State {
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        let n = x.len();
        for v in [&y, &z] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        let s = Self { x, y, z };
        if !s.is_finite() {
            return Err(Error::NonFinite("state".into()));
        }
        Ok(s)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    /// Splits a `3n` vector laid out as `[X, Y, Z]`.
    pub fn from_flat(v: &[f64]) -> Result<Self> {
        if !v.len().is_multiple_of(3) || v.is_empty() {
            return Err(Error::Input(format!(
                "flat state length {} is not a positive multiple of 3",
                v.len()
            )));
        }
        let n = v.len() / 3;
        Self::new(v[..n].to_vec(), v[n..2 * n].to_vec(), v[2 * n..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 * self.dim());
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.y);
        v.extend_from_slice(&self.z);
        v
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `‖X‖² + ‖Y‖² + ‖Z‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .chain(&self.z)
            .map(|v| v * v)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x
            .iter()
            .chain(&self.y)
            .chain(&self.z)
            .all(|v| v.is_finite())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p - q).collect();
        Self {
            x: d(&self.x, &other.x),
            y: d(&self.y, &other.y),
            z: d(&self.z, &other.z),
        }
    }
}

/// `(ψ, η, τ) = (X₁ − X₂, Y₁ − Y₂, Z₁ − Z₂)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceState {
    pub psi: Vec<f64>,
    pub eta: Vec<f64>,
    pub tau: Vec<f64>,
}

impl DifferenceState {
    pub fn new(psi: Vec<f64>, eta: Vec<f64>, tau: Vec<f64>) -> Result<Self> {
        let s = State::new(psi, eta, tau)?;
        Ok(Self {
            psi: s.x,
            eta: s.y,
            tau: s.z,
        })
    }

    pub fn between(s1: &State, s2: &State) -> Self {
        let d = s1.sub(s2);
        Self {
            psi: d.x,
            eta: d.y,
            tau: d.z,
        }
    }
}

/// `P(t) = amplitude · cos(frequency · t + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sinusoid {
    pub amplitude: Vec<f64>,
    pub frequency: f64,
    pub phase: f64,
}

impl Sinusoid {
    pub fn zero(n: usize) -> Self {
        Self {
            amplitude: vec![0.0; n],
            frequency: 1.0,
            phase: 0.0,
        }
    }
}

/// Built-in parameterized system families.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// Constant `F`, `G`, linear `H(X) = C X`, sinusoidal forcing.
    LinearConstant {
        f: SymMatrix,
        g: SymMatrix,
        h: Matrix,
        forcing: Sinusoid,
    },
    /// The two-dimensional worked example: `F = diag(φ, 2φ)` with
    /// `φ = 2 + x² + y² + z²`, `G = diag(γ, 2γ)` with `γ = 1 + x² + y²`,
    /// `H = (x², 2x²)`, `P = (xyz, 2xyz) cos(t + w)`, where `x, y, z` are
    /// the first components of `X, Y, Z`.
    ///
    /// With `state_free_forcing` the forcing becomes `(1, 2) cos(t + w)`.
    Example4 {
        phase: f64,
        state_free_forcing: bool,
    },
    /// Diagonal `F_ii = c₀ + c₁xᵢ² + c₂yᵢ² + c₃zᵢ²`, `G_ii = d₀ + d₁xᵢ² + d₂yᵢ²`,
    /// `Hᵢ = e₁xᵢ + e₂xᵢ² + e₃xᵢ³`, sinusoidal forcing.
    DiagonalPolynomial {
        f: Vec<[f64; 4]>,
        g: Vec<[f64; 3]>,
        h: Vec<[f64; 3]>,
        forcing: Sinusoid,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::LinearConstant { .. } => "linear-constant",
            Family::Example4 { .. } => "example4",
            Family::DiagonalPolynomial { .. } => "diagonal-polynomial",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Family::LinearConstant { f, .. } => f.dim(),
            Family::Example4 { .. } => 2,
            Family::DiagonalPolynomial { f, .. } => f.len(),
        }
    }

    /// Whether `P` depends on `t` only.
    pub fn forcing_is_state_free(&self) -> bool {
        match self {
            Family::LinearConstant { .. } | Family::DiagonalPolynomial { .. } => true,
            Family::Example4 {
                state_free_forcing, ..
            } => *state_free_forcing,
        }
    }

    fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Input(what.to_string()))
            }
        };
        match self {
            Family::LinearConstant { f, g, h, forcing } => {
                let n = f.dim();
                check(g.dim() == n, "G dimension differs from F")?;
                check(h.dim() == n, "H matrix dimension differs from F")?;
                check(
                    forcing.amplitude.len() == n,
                    "forcing amplitude length differs from n",
                )?;
                check_sinusoid(forcing)
            }
            Family::Example4 { phase, .. } => check(phase.is_finite(), "phase must be finite"),
            Family::DiagonalPolynomial { f, g, h, forcing } => {
                let n = f.len();
                check(n > 0, "diagonal-polynomial needs at least one component")?;
                check(g.len() == n, "G coefficient rows differ from n")?;
                check(h.len() == n, "H coefficient rows differ from n")?;
                check(
                    forcing.amplitude.len() == n,
                    "forcing amplitude length differs from n",
                )?;
                let finite = f
                    .iter()
                    .flatten()
                    .chain(g.iter().flatten())
                    .chain(h.iter().flatten());
                check(
                    finite.clone().all(|v| v.is_finite()),
                    "coefficients must be finite",
                )?;
                check_sinusoid(forcing)
            }
        }
    }
}

fn check_sinusoid(s: &Sinusoid) -> Result<()> {
    if s.amplitude.iter().all(|v| v.is_finite()) && s.frequency.is_finite() && s.phase.is_finite() {
        Ok(())
    } else {
        Err(Error::Input("forcing parameters must be finite".into()))
    }
}

/// A fully specified system: field family, comparison matrices `A`, `B`, and period `ω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemDef {
    pub n: usize,
    pub family: Family,
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub omega: f64,
}

impl SystemDef {
    /// Builds a system; missing `A`/`B` default to `F(0) − (√ε/4)I` and
    /// `G(0) − (√ε/4)I` where `√ε` is the step-size budget evaluated from the
    /// spectra at the origin.
    pub fn new(
        family: Family,
        a: Option<SymMatrix>,
        b: Option<SymMatrix>,
        omega: f64,
    ) -> Result<Self> {
        family.validate()?;
        let n = family.dim();
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Input(format!("omega must be positive, got {omega}")));
        }
        for m in [&a, &b].into_iter().flatten() {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.dim(),
                });
            }
        }
        let mut sys = Self {
            n,
            family,
            a: SymMatrix::identity(n),
            b: SymMatrix::identity(n),
            omega,
        };
        let (da, db) = sys.default_comparison_matrices()?;
        sys.a = a.unwrap_or(da);
        sys.b = b.unwrap_or(db);
        Ok(sys)
    }

    fn default_comparison_matrices(&self) -> Result<(SymMatrix, SymMatrix)> {
        let zero = vec![0.0; self.n];
        let f0 = self.f(&zero, &zero, &zero);
        let g0 = self.g(&zero, &zero);
        let fs = f0.eigenvalues()?;
        let gs = g0.eigenvalues()?;
        let jh = self.h_jacobian(&zero)?.symmetric_part().eigenvalues()?;
        let budget = sqrt_eps_budget(fs.min(), fs.max(), gs.min(), gs.max(), jh.min());
        let shift = if budget.is_finite() && budget > 0.0 {
            budget / 4.0
        } else {
            0.0
        };
        let id = SymMatrix::scaled_identity(self.n, shift);
        Ok((f0.sub(&id), g0.sub(&id)))
    }

    pub fn forcing_is_state_free(&self) -> bool {
        self.family.forcing_is_state_free()
    }

    /// `F(X, Y, Z)`.
    pub fn f(&self, x: &[f64], y: &[f64], z: &[f64]) -> SymMatrix {
        match &self.family {
            Family::LinearConstant { f, .. } => f.clone(),
            Family::Example4 { .. } => {
                let phi = 2.0 + x[0] * x[0] + y[0] * y[0] + z[0] * z[0];
                SymMatrix::diag(&[phi, 2.0 * phi])
            }
            Family::DiagonalPolynomial { f, .. } => {
                let d: Vec<f64> = f
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        c[0] + c[1] * x[i] * x[i] + c[2] * y[i] * y[i] + c[3] * z[i] * z[i]
                    })
                    .collect();
                SymMatrix::diag(&d)
            }
        }
    }

    /// `G(X, Y)`.
    pub fn g(&self, x: &[f64], y: &[f64]) -> SymMatrix {
        match &self.family {
            Family::LinearConstant { g, .. } => g.clone(),
            Family::Example4 { .. } => {
                let gamma = 1.0 + x[0] * x[0] + y[0] * y[0];
                SymMatrix::diag(&[gamma, 2.0 * gamma])
            }
            Family::DiagonalPolynomial { g, .. } => {
                let d: Vec<f64> = g
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c[0] + c[1] * x[i] * x[i] + c[2] * y[i] * y[i])
                    .collect();
                SymMatrix::diag(&d)
            }
        }
    }

    /// `H(X)`.
    pub fn h(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.h_into(x, &mut out);
        out
    }

    #[inline]
    fn h_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.family {
            Family::LinearConstant { h, .. } => h.matvec_into(x, out),
            Family::Example4 { .. } => {
                let x2 = x[0] * x[0];
                out[0] = x2;
                out[1] = 2.0 * x2;
            }
            Family::DiagonalPolynomial { h, .. } => {
                for (i, c) in h.iter().enumerate() {
                    let xi = x[i];
                    out[i] = xi * (c[0] + xi * (c[1] + xi * c[2]));
                }
            }
        }
    }

    /// `P(t, X, Y, Z)`.
    pub fn p(&self, t: f64, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.p_into(t, x, y, z, &mut out);
        out
    }

    #[inline]
    fn p_into(&self, t: f64, x: &[f64], y: &[f64], z: &[f64], out: &mut [f64]) {
        match &self.family {
            Family::LinearConstant { forcing, .. } | Family::DiagonalPolynomial { forcing, .. } => {
                let c = (forcing.frequency * t + forcing.phase).cos();
                for (o, a) in out.iter_mut().zip(&forcing.amplitude) {
                    *o = a * c;
                }
            }
            Family::Example4 {
                phase,
                state_free_forcing,
            } => {
                let c = (t + phase).cos();
                let s = if *state_free_forcing {
                    1.0
                } else {
                    x[0] * y[0] * z[0]
                };
                out[0] = s * c;
                out[1] = 2.0 * s * c;
            }
        }
    }

    /// Writes `(Y, Z, −FZ − GY − H(X) + P)` into `out` without allocating
    /// for the built-in families. `forcing = false` drops `P`.
    pub fn rhs_flat(&self, t: f64, s: &[f64], out: &mut [f64], forcing: bool) -> Result<()> {
        let n = self.n;
        let (x, rest) = s.split_at(n);
        let (y, z) = rest.split_at(n);
        out[..n].copy_from_slice(y);
        out[n..2 * n].copy_from_slice(z);
        let zdot = &mut out[2 * n..3 * n];
        match &self.family {
            Family::LinearConstant {
                f,
                g,
                h,
                forcing: p,
            } => {
                for i in 0..n {
                    let mut acc = 0.0;
                    for j in 0..n {
                        acc -= f.get(i, j) * z[j] + g.get(i, j) * y[j] + h.get(i, j) * x[j];
                    }
                    zdot[i] = acc;
                }
                if forcing {
                    let c = (p.frequency * t + p.phase).cos();
                    for (o, a) in zdot.iter_mut().zip(&p.amplitude) {
                        *o += a * c;
                    }
                }
            }
            Family::Example4 {
                phase,
                state_free_forcing,
            } => {
                let (x0, y0, z0) = (x[0], y[0], z[0]);
                let phi = 2.0 + x0 * x0 + y0 * y0 + z0 * z0;
                let gamma = 1.0 + x0 * x0 + y0 * y0;
                let hx = x0 * x0;
                zdot[0] = -phi * z[0] - gamma * y[0] - hx;
                zdot[1] = -2.0 * phi * z[1] - 2.0 * gamma * y[1] - 2.0 * hx;
                if forcing {
                    let c = (t + phase).cos();
                    let amp = if *state_free_forcing {
                        1.0
                    } else {
                        x0 * y0 * z0
                    };
                    zdot[0] += amp * c;
                    zdot[1] += 2.0 * amp * c;
                }
            }
            Family::DiagonalPolynomial {
                f,
                g,
                h,
                forcing: p,
            } => {
                let c = if forcing {
                    (p.frequency * t + p.phase).cos()
                } else {
                    0.0
                };
                for i in 0..n {
                    let (xi, yi, zi) = (x[i], y[i], z[i]);
                    let fc = &f[i];
                    let gc = &g[i];
                    let hc = &h[i];
                    let fi = fc[0] + fc[1] * xi * xi + fc[2] * yi * yi + fc[3] * zi * zi;
                    let gi = gc[0] + gc[1] * xi * xi + gc[2] * yi * yi;
                    let hi = xi * (hc[0] + xi * (hc[1] + xi * hc[2]));
                    zdot[i] = -fi * zi - gi * yi - hi + p.amplitude[i] * c;
                }
            }
        }
        if zdot.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Evaluation {
                field: self.offending_field(t, x, y, z),
                t,
            })
        }
    }

    fn offending_field(&self, t: f64, x: &[f64], y: &[f64], z: &[f64]) -> &'static str {
        let finite = |v: &[f64]| v.iter().all(|e| e.is_finite());
        if !finite(self.f(x, y, z).as_slice()) {
            "F"
        } else if !finite(self.g(x, y).as_slice()) {
            "G"
        } else if !finite(&self.h(x)) {
            "H"
        } else if !finite(&self.p(t, x, y, z)) {
            "P"
        } else {
            "rhs"
        }
    }

    /// Finite-difference Jacobian of `H` (central differences,
    /// step `max(1e-6, 1e-6·|xⱼ|)`).
    pub fn h_jacobian(&self, x: &[f64]) -> Result<Matrix> {
        let n = self.n;
        let mut jac = Matrix::zeros(n);
        let mut xp = x.to_vec();
        let mut hp = vec![0.0; n];
        let mut hm = vec![0.0; n];
        for j in 0..n {
            let h = (1e-6 * x[j].abs()).max(1e-6);
            xp[j] = x[j] + h;
            self.h_into(&xp, &mut hp);
            xp[j] = x[j] - h;
            self.h_into(&xp, &mut hm);
            xp[j] = x[j];
            for i in 0..n {
                jac.set(i, j, (hp[i] - hm[i]) / (2.0 * h));
            }
        }
        if jac.as_slice().iter().all(|v| v.is_finite()) {
            Ok(jac)
        } else {
            Err(Error::Evaluation { field: "H", t: 0.0 })
        }
    }
}

/// `(Y, Z, −F(X,Y,Z)Z − G(X,Y)Y − H(X) + P(t,X,Y,Z))` as a [`State`].
pub fn eval_rhs(sys: &SystemDef, t: f64, s: &State) -> Result<State> {
    check_dim(sys, s)?;
    if !s.is_finite() {
        return Err(Error::NonFinite("state".into()));
    }
    let mut out = vec![0.0; 3 * sys.n];
    sys.rhs_flat(t, &s.to_flat(), &mut out, true)?;
    State::from_flat(&out)
}

/// The idealized difference dynamics with `F`, `G`, `H` evaluated at `(ψ, η, τ)`
/// and no forcing.
pub fn difference_rhs(sys: &SystemDef, d: &DifferenceState) -> Result<DifferenceState> {
    let s = State::new(d.psi.clone(), d.eta.clone(), d.tau.clone())?;
    check_dim(sys, &s)?;
    let mut out = vec![0.0; 3 * sys.n];
    sys.rhs_flat(0.0, &s.to_flat(), &mut out, false)?;
    let r = State::from_flat(&out)?;
    Ok(DifferenceState {
        psi: r.x,
        eta: r.y,
        tau: r.z,
    })
}

fn check_dim(sys: &SystemDef, s: &State) -> Result<()> {
    if s.dim() != sys.n {
        return Err(Error::DimensionMismatch {
            expected: sys.n,
            got: s.dim(),
        });
    }
    Ok(())
}

/// An averaged-Jacobian secant operator with its identity residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecantOperator {
    pub matrix: Matrix,
    /// `‖Â(X−Y) − (H(X) − H(Y))‖`.
    pub residual: f64,
}

/// `Â(X, Y) = ∫₀¹ J_H(Y + s(X − Y)) ds` by Gauss–Legendre quadrature.
///
/// Fails with [`Error::Quadrature`] if the secant identity residual exceeds
/// `1e-6 · (1 + ‖H(X) − H(Y)‖)`.
pub fn secant_operator(
    sys: &SystemDef,
    x: &[f64],
    y: &[f64],
    quad_order: usize,
) -> Result<SecantOperator> {
    let n = sys.n;
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    if quad_order == 0 {
        return Err(Error::Input("quadrature order must be at least 1".into()));
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let matrix = if diff.iter().all(|d| *d == 0.0) {
        sys.h_jacobian(x)?
    } else {
        let (nodes, weights) = gauss_legendre_unit(quad_order);
        let mut acc = vec![0.0; n * n];
        let mut pt = vec![0.0; n];
        for (s, w) in nodes.iter().zip(&weights) {
            for i in 0..n {
                pt[i] = y[i] + s * diff[i];
            }
            let j = sys.h_jacobian(&pt)?;
            for (a, v) in acc.iter_mut().zip(j.as_slice()) {
                *a += w * v;
            }
        }
        Matrix::from_row_major(n, acc)?
    };
    let hx = sys.h(x);
    let hy = sys.h(y);
    let dh: Vec<f64> = hx.iter().zip(&hy).map(|(a, b)| a - b).collect();
    let approx = matrix.matvec(&diff);
    let residual = norm(
        &approx
            .iter()
            .zip(&dh)
            .map(|(a, b)| a - b)
            .collect::<Vec<f64>>(),
    );
    let tolerance = SECANT_TOL * (1.0 + norm(&dh));
    if !residual.is_finite() || residual > tolerance {
        return Err(Error::Quadrature {
            residual,
            tolerance,
        });
    }
    Ok(SecantOperator { matrix, residual })
}

/// Uniformly sampled `‖(ψ, η, τ)‖(t)` of two solutions sharing the forcing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceSeries {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Norm of the difference measured with the Lyapunov form `V(ψ, η, τ)`.
    pub v_values: Vec<f64>,
}

/// Probes `P` at a fixed time with varying states; true if it never changes.
pub fn forcing_depends_on_state(sys: &SystemDef) -> bool {
    if sys.forcing_is_state_free() {
        return false;
    }
    let n = sys.n;
    let probes = [0.0, 0.3, 1.1, 2.7];
    let states = [
        vec![0.0; 3 * n],
        vec![0.5; 3 * n],
        (0..3 * n).map(|i| 1.0 - 0.3 * i as f64).collect::<Vec<_>>(),
    ];
    probes.iter().any(|&t| {
        let reference = {
            let (x, y, z) = split3(&states[0], n);
            sys.p(t, x, y, z)
        };
        states[1..].iter().any(|s| {
            let (x, y, z) = split3(s, n);
            sys.p(t, x, y, z)
                .iter()
                .zip(&reference)
                .any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + b.abs()))
        })
    })
}

fn split3(s: &[f64], n: usize) -> (&[f64], &[f64], &[f64]) {
    (&s[..n], &s[n..2 * n], &s[2 * n..3 * n])
}

/// Integrates two copies of the system with shared forcing `P(t)` as one
/// `6n`-dimensional system and samples the norm of their difference at
/// `steps + 1` uniform times on `[0, t1]`.
pub fn paired_difference_trajectory(
    sys: &SystemDef,
    s1: &State,
    s2: &State,
    t1: f64,
    steps: usize,
    opts: &IntegratorOptions,
) -> Result<DifferenceSeries> {
    if forcing_depends_on_state(sys) {
        return Err(Error::Precondition(
            "forcing depends on the state; the uniqueness branch needs P = P(t)".into(),
        ));
    }
    check_dim(sys, s1)?;
    check_dim(sys, s2)?;
    if steps == 0 {
        return Err(Error::Input("steps must be positive".into()));
    }
    let n3 = 3 * sys.n;
    let mut y0 = s1.to_flat();
    y0.extend(s2.to_flat());
    let rhs = |t: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        let (a, b) = y.split_at(n3);
        let (oa, ob) = out.split_at_mut(n3);
        sys.rhs_flat(t, a, oa, true)?;
        sys.rhs_flat(t, b, ob, true)
    };
    let mut o = opts.clone();
    o.samples = steps;
    let raw = integrate::integrate_flat(rhs, &y0, 0.0, t1, &o)?;
    if let Some(last_t) = raw.diverged_at {
        return Err(Error::Divergence { last_t });
    }
    let mut norms = Vec::with_capacity(raw.states.len());
    let mut v_values = Vec::with_capacity(raw.states.len());
    for y in &raw.states {
        let d: Vec<f64> = y[..n3].iter().zip(&y[n3..]).map(|(a, b)| a - b).collect();
        norms.push(norm(&d));
        let ds = State::from_flat(&d)?;
        v_values.push(crate::lyapunov::v_value(&sys.a, &sys.b, &ds)?);
    }
    Ok(DifferenceSeries {
        times: raw.times,
        norms,
        v_values,
    })
}
