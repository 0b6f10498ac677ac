//! Sampling-based extraction of the spectral constants over a domain box and
//! the pass/fail evaluation of every hypothesis of the existence theorem.
//!
//! The theorem quantifies over all of `Rⁿ`; here every bound is the min/max
//! over a tensor grid plus uniform random points inside a user-given box.
//! Reports always carry the box they were computed on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{commutator_norm, norm, SymMatrix};
use crate::system::{secant_operator, SystemDef, DEFAULT_QUAD_ORDER};

/// Cap on the number of tensor-grid points.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Tolerance for `H(0) = 0`.
pub const H_ORIGIN_TOL: f64 = 1e-12;

/// Relative commutator tolerance for the commutation hypothesis.
pub const COMMUTATION_TOL: f64 = 1e-9;

/// `min{δbδh/(4Δb + 4), δaδb/(6Δa + 7), δa/2, 1}`, the admissible range of `√ε`.
pub fn sqrt_eps_budget(a_min: f64, a_max: f64, b_min: f64, b_max: f64, h_min: f64) -> f64 {
    (b_min * h_min / (4.0 * b_max + 4.0))
        .min(a_min * b_min / (6.0 * a_max + 7.0))
        .min(a_min / 2.0)
        .min(1.0)
}

/// Axis-aligned box in `(X, Y, Z)` space with its sampling plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainBox {
    /// `3n` lower bounds, ordered `x₁..xₙ, y₁..yₙ, z₁..zₙ`.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Grid points per axis.
    pub grid: usize,
    /// Extra uniform random points (also the number of random secant pairs).
    pub random: usize,
    pub seed: u64,
}

impl DomainBox {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        grid: usize,
        random: usize,
        seed: u64,
    ) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() || !lower.len().is_multiple_of(3) {
            return Err(Error::Input(
                "box bounds must be two equal-length lists of 3n values".into(),
            ));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u))
        {
            return Err(Error::Input(
                "box needs finite lower < upper on every axis".into(),
            ));
        }
        if grid < 2 {
            return Err(Error::Input(format!(
                "grid points per axis must be ≥ 2, got {grid}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            grid,
            random,
            seed,
        })
    }

    /// `[-radius, radius]^{3n}`.
    pub fn cube(n: usize, radius: f64, grid: usize, random: usize, seed: u64) -> Result<Self> {
        Self::new(
            vec![-radius; 3 * n],
            vec![radius; 3 * n],
            grid,
            random,
            seed,
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len() / 3
    }

    /// Grid points per axis after applying [`MAX_GRID_POINTS`].
    pub fn effective_grid(&self) -> usize {
        let axes = self.lower.len() as u32;
        let mut m = self.grid;
        while m > 2 && (m as f64).powi(axes as i32) > MAX_GRID_POINTS as f64 {
            m -= 1;
        }
        m
    }

    fn axis_value(&self, axis: usize, k: usize, m: usize) -> f64 {
        let (l, u) = (self.lower[axis], self.upper[axis]);
        if k == m - 1 {
            u
        } else {
            l + (u - l) * k as f64 / (m - 1) as f64
        }
    }

    /// Every tensor-grid point followed by the seeded random points.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let axes = self.lower.len();
        let m = self.effective_grid();
        let total = m.pow(axes as u32);
        let mut out = Vec::with_capacity(total + self.random);
        let mut idx = vec![0usize; axes];
        for _ in 0..total {
            out.push((0..axes).map(|a| self.axis_value(a, idx[a], m)).collect());
            for a in (0..axes).rev() {
                idx[a] += 1;
                if idx[a] < m {
                    break;
                }
                idx[a] = 0;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random {
            out.push(self.random_point(&mut rng));
        }
        out
    }

    fn random_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l + (u - l) * rng.gen::<f64>())
            .collect()
    }

    /// Distinct `X` coordinates of the grid (the first `n` axes).
    fn x_grid(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let m = self.effective_grid();
        let total = m.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            out.push((0..n).map(|a| self.axis_value(a, idx[a], m)).collect());
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < m {
                    break;
                }
                idx[a] = 0;
            }
        }
        out
    }
}

/// Spectral extremes over the sampled box.
///
/// `a_min = δa`, `a_max = Δa` (over `λ(A)` and `λ(F)`), likewise `b_*` for
/// `B`, `G` and `h_*` for the secant operators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralBounds {
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Extremes of `λ(F − A)` and `λ(G − B)`.
    pub f_minus_a_min: f64,
    pub f_minus_a_max: f64,
    pub g_minus_b_min: f64,
    pub g_minus_b_max: f64,
    /// `min{1/2, δb/(δaΔa)}`.
    pub k_nominal: f64,
    /// `(1/8)·min{1/2, δb/(δaΔa)}`.
    pub k_sufficient: f64,
    pub sqrt_eps_budget: f64,
    /// `√ε` under test: user-given, or the smallest value with
    /// `λ(F − A), λ(G − B) ≤ √ε/2` on the samples.
    pub sqrt_eps: f64,
    pub eps: f64,
    pub sqrt_eps_user_given: bool,
    /// `‖H(0)‖`.
    pub h_origin_norm: f64,
    /// Largest `‖PQ − QP‖_F / (‖P‖_F‖Q‖_F)` over `(F, G)`, `(F, Â)`, `(G, Â)`, `(A, B)`.
    pub max_relative_commutator: f64,
    /// Largest relative asymmetry of a sampled secant operator; eigenvalues
    /// of the secant are taken from its symmetric part.
    pub max_secant_asymmetry: f64,
    pub samples: usize,
    pub secant_samples: usize,
}

impl SpectralBounds {
    /// Bounds from bare extremes (no sampling), e.g. for worked examples.
    pub fn from_extremes(
        a_min: f64,
        a_max: f64,
        b_min: f64,
        b_max: f64,
        h_min: f64,
        h_max: f64,
        sqrt_eps: f64,
    ) -> Self {
        let mut s = Self {
            a_min,
            a_max,
            b_min,
            b_max,
            h_min,
            h_max,
            f_minus_a_min: 0.5 * sqrt_eps,
            f_minus_a_max: 0.5 * sqrt_eps,
            g_minus_b_min: 0.5 * sqrt_eps,
            g_minus_b_max: 0.5 * sqrt_eps,
            k_nominal: 0.0,
            k_sufficient: 0.0,
            sqrt_eps_budget: 0.0,
            sqrt_eps,
            eps: sqrt_eps * sqrt_eps,
            sqrt_eps_user_given: true,
            h_origin_norm: 0.0,
            max_relative_commutator: 0.0,
            max_secant_asymmetry: 0.0,
            samples: 0,
            secant_samples: 0,
        };
        s.finish_derived();
        s
    }

    fn finish_derived(&mut self) {
        let k = 0.5_f64.min(self.b_min / (self.a_min * self.a_max));
        self.k_nominal = k;
        self.k_sufficient = k / 8.0;
        self.sqrt_eps_budget =
            sqrt_eps_budget(self.a_min, self.a_max, self.b_min, self.b_max, self.h_min);
        self.eps = self.sqrt_eps * self.sqrt_eps;
    }
}

struct Extremes {
    min: f64,
    max: f64,
}

impl Extremes {
    fn new() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn absorb(&mut self, values: &[f64]) {
        for v in values {
            self.min = self.min.min(*v);
            self.max = self.max.max(*v);
        }
    }
}

fn rel_commutator(p: &SymMatrix, q: &SymMatrix) -> Result<f64> {
    let scale = p.frobenius() * q.frobenius();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(commutator_norm(p, q)? / scale)
}

fn eig_at(m: &SymMatrix, point: &[f64]) -> Result<Vec<f64>> {
    m.eigenvalues().map(|s| s.values).map_err(|_| Error::Eigen {
        coords: point.to_vec(),
    })
}

/// Extracts every spectral constant over `bx`.
///
/// `δh`/`Δh` come from both the one-sided secants `Â(X, 0)` on the `X` grid
/// and random-pair secants `Â(X₁, X₂)`; the extremes over both are reported.
pub fn spectral_bounds(
    sys: &SystemDef,
    bx: &DomainBox,
    sqrt_eps: Option<f64>,
) -> Result<SpectralBounds> {
    if bx.dim() != sys.n {
        return Err(Error::DimensionMismatch {
            expected: sys.n,
            got: bx.dim(),
        });
    }
    let n = sys.n;
    let mut fa = Extremes::new();
    let mut gb = Extremes::new();
    let mut f_minus_a = Extremes::new();
    let mut g_minus_b = Extremes::new();
    let mut hx = Extremes::new();
    let mut commut = rel_commutator(&sys.a, &sys.b)?;
    let mut asym = 0.0_f64;

    fa.absorb(&eig_at(&sys.a, &[])?);
    gb.absorb(&eig_at(&sys.b, &[])?);

    let points = bx.points();
    for pt in &points {
        let (x, rest) = pt.split_at(n);
        let (y, z) = rest.split_at(n);
        let f = sys.f(x, y, z);
        let g = sys.g(x, y);
        fa.absorb(&eig_at(&f, pt)?);
        gb.absorb(&eig_at(&g, pt)?);
        f_minus_a.absorb(&eig_at(&f.sub(&sys.a), pt)?);
        g_minus_b.absorb(&eig_at(&g.sub(&sys.b), pt)?);
        commut = commut.max(rel_commutator(&f, &g)?);
    }

    let zero = vec![0.0; n];
    let mut secants = 0;
    let mut absorb_secant =
        |x1: &[f64], x2: &[f64], fields: Option<(SymMatrix, SymMatrix)>| -> Result<()> {
            let sec = secant_operator(sys, x1, x2, DEFAULT_QUAD_ORDER)?;
            asym = asym.max(sec.matrix.asymmetry());
            let sym = sec.matrix.symmetric_part();
            hx.absorb(&eig_at(&sym, x1)?);
            if let Some((f, g)) = fields {
                commut = commut
                    .max(rel_commutator(&f, &sym)?)
                    .max(rel_commutator(&g, &sym)?);
            }
            secants += 1;
            Ok(())
        };
    for x in bx.x_grid() {
        // Commutation with F and G is probed at (X, 0, 0).
        let fields = (sys.f(&x, &zero, &zero), sys.g(&x, &zero));
        absorb_secant(&x, &zero, Some(fields))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(bx.seed.wrapping_add(0x005e_ca17));
    for _ in 0..bx.random {
        let p1 = bx.random_point(&mut rng);
        let p2 = bx.random_point(&mut rng);
        absorb_secant(&p1[..n], &p2[..n], None)?;
    }

    let h_origin_norm = norm(&sys.h(&zero));
    let (sqrt_eps, user) = match sqrt_eps {
        Some(v) => (v, true),
        None => (2.0 * f_minus_a.max.max(g_minus_b.max).max(0.0), false),
    };
    let mut out = SpectralBounds {
        a_min: fa.min,
        a_max: fa.max,
        b_min: gb.min,
        b_max: gb.max,
        h_min: hx.min,
        h_max: hx.max,
        f_minus_a_min: f_minus_a.min,
        f_minus_a_max: f_minus_a.max,
        g_minus_b_min: g_minus_b.min,
        g_minus_b_max: g_minus_b.max,
        k_nominal: 0.0,
        k_sufficient: 0.0,
        sqrt_eps_budget: 0.0,
        sqrt_eps,
        eps: 0.0,
        sqrt_eps_user_given: user,
        h_origin_norm,
        max_relative_commutator: commut,
        max_secant_asymmetry: asym,
        samples: points.len(),
        secant_samples: secants,
    };
    out.finish_derived();
    Ok(out)
}

/// One checked inequality with the numbers that decided it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    /// `"<="`, `">"` or `">="`: how `value` must relate to `bound`.
    pub relation: &'static str,
}

impl Verdict {
    fn le(value: f64, bound: f64) -> Self {
        Self {
            passed: value <= bound,
            value,
            bound,
            relation: "<=",
        }
    }

    fn gt(value: f64, bound: f64) -> Self {
        Self {
            passed: value > bound,
            value,
            bound,
            relation: ">",
        }
    }

    fn ge(value: f64, bound: f64) -> Self {
        Self {
            passed: value >= bound,
            value,
            bound,
            relation: ">=",
        }
    }
}

/// Independent verdicts for each hypothesis. Strict and non-strict forms of
/// the same inequality are reported separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// `‖H(0)‖ ≤ 1e-12`.
    pub h_vanishes_at_origin: Verdict,
    pub a_positive: Verdict,
    pub b_positive: Verdict,
    /// `0 < δh`.
    pub h_positive_strict: Verdict,
    pub h_positive_nonstrict: Verdict,
    /// `Δh ≤ k δa δb` with `k = min{1/2, δb/(δaΔa)}`.
    pub h_ratio_k_nominal: Verdict,
    /// `Δh ≤ k δa δb` with `k = (1/8) min{1/2, δb/(δaΔa)}`.
    pub h_ratio_k_sufficient: Verdict,
    /// `0 < λ(F − A)`.
    pub f_sandwich_strict: Verdict,
    pub f_sandwich_nonstrict: Verdict,
    /// `λ(F − A) ≤ √ε/2`.
    pub f_sandwich_upper: Verdict,
    pub g_sandwich_strict: Verdict,
    pub g_sandwich_nonstrict: Verdict,
    pub g_sandwich_upper: Verdict,
    /// `0 < ε`.
    pub eps_positive: Verdict,
    /// `ε ≤ 1`.
    pub eps_at_most_one: Verdict,
    /// `√ε ≤ min{δbδh/(4Δb+4), δaδb/(6Δa+7), δa/2, 1}`.
    pub eps_budget: Verdict,
    /// Relative commutators below [`COMMUTATION_TOL`].
    pub commutation: Verdict,
    /// AND of every verdict above except `h_ratio_k_nominal` and the
    /// non-strict variants (the conservative `k` and strict forms decide).
    pub overall: bool,
}

impl ConditionReport {
    /// Names of the verdicts that failed, in report order.
    pub fn failures(&self) -> Vec<&'static str> {
        self.named()
            .into_iter()
            .filter(|(_, v)| !v.passed)
            .map(|(n, _)| n)
            .collect()
    }

    fn named(&self) -> Vec<(&'static str, &Verdict)> {
        vec![
            ("h_vanishes_at_origin", &self.h_vanishes_at_origin),
            ("a_positive", &self.a_positive),
            ("b_positive", &self.b_positive),
            ("h_positive_strict", &self.h_positive_strict),
            ("h_positive_nonstrict", &self.h_positive_nonstrict),
            ("h_ratio_k_nominal", &self.h_ratio_k_nominal),
            ("h_ratio_k_sufficient", &self.h_ratio_k_sufficient),
            ("f_sandwich_strict", &self.f_sandwich_strict),
            ("f_sandwich_nonstrict", &self.f_sandwich_nonstrict),
            ("f_sandwich_upper", &self.f_sandwich_upper),
            ("g_sandwich_strict", &self.g_sandwich_strict),
            ("g_sandwich_nonstrict", &self.g_sandwich_nonstrict),
            ("g_sandwich_upper", &self.g_sandwich_upper),
            ("eps_positive", &self.eps_positive),
            ("eps_at_most_one", &self.eps_at_most_one),
            ("eps_budget", &self.eps_budget),
            ("commutation", &self.commutation),
        ]
    }
}

/// Evaluates every hypothesis against `bounds`.
pub fn check_theorem_conditions(bounds: &SpectralBounds) -> ConditionReport {
    let b = bounds;
    let half_eps = 0.5 * b.sqrt_eps;
    let mut r = ConditionReport {
        h_vanishes_at_origin: Verdict::le(b.h_origin_norm, H_ORIGIN_TOL),
        a_positive: Verdict::gt(b.a_min, 0.0),
        b_positive: Verdict::gt(b.b_min, 0.0),
        h_positive_strict: Verdict::gt(b.h_min, 0.0),
        h_positive_nonstrict: Verdict::ge(b.h_min, 0.0),
        h_ratio_k_nominal: Verdict::le(b.h_max, b.k_nominal * b.a_min * b.b_min),
        h_ratio_k_sufficient: Verdict::le(b.h_max, b.k_sufficient * b.a_min * b.b_min),
        f_sandwich_strict: Verdict::gt(b.f_minus_a_min, 0.0),
        f_sandwich_nonstrict: Verdict::ge(b.f_minus_a_min, 0.0),
        f_sandwich_upper: Verdict::le(b.f_minus_a_max, half_eps),
        g_sandwich_strict: Verdict::gt(b.g_minus_b_min, 0.0),
        g_sandwich_nonstrict: Verdict::ge(b.g_minus_b_min, 0.0),
        g_sandwich_upper: Verdict::le(b.g_minus_b_max, half_eps),
        eps_positive: Verdict::gt(b.eps, 0.0),
        eps_at_most_one: Verdict::le(b.eps, 1.0),
        eps_budget: Verdict::le(b.sqrt_eps, b.sqrt_eps_budget),
        commutation: Verdict::le(b.max_relative_commutator, COMMUTATION_TOL),
        overall: false,
    };
    r.overall = [
        &r.h_vanishes_at_origin,
        &r.a_positive,
        &r.b_positive,
        &r.h_positive_strict,
        &r.h_ratio_k_sufficient,
        &r.f_sandwich_strict,
        &r.f_sandwich_upper,
        &r.g_sandwich_strict,
        &r.g_sandwich_upper,
        &r.eps_positive,
        &r.eps_at_most_one,
        &r.eps_budget,
        &r.commutation,
    ]
    .iter()
    .all(|v| v.passed);
    r
}

/// Growth envelopes of the forcing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForcingBound {
    /// `‖P(t, X, Y, Z)‖ ≤ δ₀ + δ₁(‖X‖ + ‖Y‖ + ‖Z‖)`.
    pub delta_0: f64,
    pub delta_1: f64,
    /// Constant envelope `‖P‖ ≤ δ₀` (with `δ₁ = 0`) over the box.
    pub constant_envelope: f64,
    /// `θ₁(t) = ‖P(t, 0, 0, 0)‖` sup, i.e. `α₀`.
    pub theta1_max: f64,
    /// Sup of `(‖P‖ − θ₁(t)) / (‖X‖² + ‖Y‖² + ‖Z‖²)^{1/2}`, i.e. `α₁`.
    pub theta2_max: f64,
}

impl ForcingBound {
    pub fn zero() -> Self {
        Self {
            delta_0: 0.0,
            delta_1: 0.0,
            constant_envelope: 0.0,
            theta1_max: 0.0,
            theta2_max: 0.0,
        }
    }
}

/// Fits the forcing envelopes over the box points and `t_samples` times in `[0, ω)`.
///
/// Two passes: `δ₀ = max_t ‖P(t, 0, 0, 0)‖`, then `δ₁` as the largest
/// `(‖P‖ − δ₀)/(‖X‖ + ‖Y‖ + ‖Z‖)` over samples with `‖X‖ + ‖Y‖ + ‖Z‖ ≥ 1`.
/// Finally `δ₀` is raised, if needed, so the envelope also covers samples
/// closer to the origin.
pub fn forcing_bound_fit(
    sys: &SystemDef,
    bx: &DomainBox,
    t_samples: usize,
) -> Result<ForcingBound> {
    if t_samples < 2 {
        return Err(Error::Input(format!(
            "t_samples must be ≥ 2, got {t_samples}"
        )));
    }
    if bx.dim() != sys.n {
        return Err(Error::DimensionMismatch {
            expected: sys.n,
            got: bx.dim(),
        });
    }
    let n = sys.n;
    let zero = vec![0.0; n];
    let times: Vec<f64> = (0..t_samples)
        .map(|k| sys.omega * k as f64 / t_samples as f64)
        .collect();
    let p_norm = |t: f64, x: &[f64], y: &[f64], z: &[f64]| -> Result<f64> {
        let v = norm(&sys.p(t, x, y, z));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { field: "P", t })
        }
    };
    let mut theta1 = Vec::with_capacity(times.len());
    for &t in &times {
        theta1.push(p_norm(t, &zero, &zero, &zero)?);
    }
    let delta_0_origin = theta1.iter().cloned().fold(0.0, f64::max);

    // (‖P‖, ‖X‖+‖Y‖+‖Z‖, ‖s‖₂, θ₁(t))
    let mut samples = Vec::new();
    for pt in bx.points() {
        let (x, rest) = pt.split_at(n);
        let (y, z) = rest.split_at(n);
        let l1 = norm(x) + norm(y) + norm(z);
        let l2 = norm(&pt);
        for (k, &t) in times.iter().enumerate() {
            samples.push((p_norm(t, x, y, z)?, l1, l2, theta1[k]));
        }
    }

    let mut delta_1 = 0.0_f64;
    for &(p, l1, _, _) in &samples {
        if l1 >= 1.0 {
            delta_1 = delta_1.max((p - delta_0_origin) / l1);
        }
    }
    let mut delta_0 = delta_0_origin;
    let mut constant_envelope = delta_0_origin;
    let mut theta2 = 0.0_f64;
    for &(p, l1, l2, th1) in &samples {
        delta_0 = delta_0.max(p - delta_1 * l1);
        constant_envelope = constant_envelope.max(p);
        if l2 > 0.0 {
            theta2 = theta2.max((p - th1) / l2);
        }
    }
    Ok(ForcingBound {
        delta_0,
        delta_1,
        constant_envelope,
        theta1_max: delta_0_origin,
        theta2_max: theta2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::system::{Family, Sinusoid};

    fn diag_linear(f: &[f64], g: &[f64], h: &[f64], amp: &[f64]) -> Family {
        let hm = SymMatrix::diag(h);
        Family::LinearConstant {
            f: SymMatrix::diag(f),
            g: SymMatrix::diag(g),
            h: Matrix::from(hm),
            forcing: Sinusoid {
                amplitude: amp.to_vec(),
                frequency: 1.0,
                phase: 0.0,
            },
        }
    }

    #[test]
    fn constant_diagonal_bounds() {
        let fam = diag_linear(&[2.0, 4.0], &[1.0, 2.0], &[0.1, 0.1], &[0.0, 0.0]);
        let sys = SystemDef::new(
            fam,
            Some(SymMatrix::diag(&[2.0, 4.0])),
            Some(SymMatrix::diag(&[1.0, 2.0])),
            1.0,
        )
        .unwrap();
        let bx = DomainBox::cube(2, 1.0, 2, 4, 1).unwrap();
        let b = spectral_bounds(&sys, &bx, None).unwrap();
        assert_eq!((b.a_min, b.a_max, b.b_min, b.b_max), (2.0, 4.0, 1.0, 2.0));
        assert_eq!((b.f_minus_a_min, b.f_minus_a_max), (0.0, 0.0));
        let r = check_theorem_conditions(&b);
        // A = F: the strict sandwich fails while the non-strict one holds.
        assert!(!r.f_sandwich_strict.passed && r.f_sandwich_nonstrict.passed);
        assert!(!r.overall);
    }

    #[test]
    fn ratio_fails_for_large_h() {
        let b = SpectralBounds::from_extremes(1.0, 50.0, 1.0, 50.0, 1.0, 50.0, 1e-3);
        let r = check_theorem_conditions(&b);
        assert!(!r.h_ratio_k_nominal.passed && !r.h_ratio_k_sufficient.passed);
        assert!(!r.overall);
    }

    #[test]
    fn worked_k_and_budget() {
        let b = SpectralBounds::from_extremes(2.0, 2.0, 2.0, 2.0, 0.05, 0.05, 1e-3);
        assert_eq!(b.k_nominal, 0.5);
        assert_eq!(b.k_sufficient, 0.0625);
        let r = check_theorem_conditions(&b);
        assert!(r.h_ratio_k_nominal.passed && r.h_ratio_k_sufficient.passed);
        let budget = sqrt_eps_budget(2.0, 2.0, 2.0, 2.0, 0.05);
        assert!((budget - 1.0 / 120.0).abs() < 1e-16);
    }

    #[test]
    fn forcing_fit_examples() {
        let n = 2;
        let bx = DomainBox::cube(n, 1.0, 3, 10, 3).unwrap();
        let zero = SystemDef::new(
            diag_linear(&[2.0, 2.0], &[1.0, 1.0], &[0.1, 0.1], &[0.0, 0.0]),
            None,
            None,
            1.0,
        )
        .unwrap();
        let fb = forcing_bound_fit(&zero, &bx, 8).unwrap();
        assert_eq!((fb.delta_0, fb.delta_1), (0.0, 0.0));

        let tau = 2.0 * std::f64::consts::PI;
        let cos = SystemDef::new(
            diag_linear(&[2.0, 2.0], &[1.0, 1.0], &[0.1, 0.1], &[1.0, 2.0]),
            None,
            None,
            tau,
        )
        .unwrap();
        let fb = forcing_bound_fit(&cos, &bx, 8).unwrap();
        assert!((fb.delta_0 - 5.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(fb.delta_1, 0.0);
        assert!(forcing_bound_fit(&cos, &bx, 1).is_err());
    }

    #[test]
    fn grid_is_capped() {
        let bx = DomainBox::cube(4, 1.0, 50, 0, 0).unwrap();
        let m = bx.effective_grid();
        assert!((m as f64).powi(12) <= MAX_GRID_POINTS as f64);
        assert!(((m + 1) as f64).powi(12) > MAX_GRID_POINTS as f64);
    }

    #[test]
    fn invalid_boxes() {
        assert!(DomainBox::new(vec![0.0; 3], vec![0.0; 3], 3, 0, 0).is_err());
        assert!(DomainBox::new(vec![0.0; 3], vec![1.0; 3], 1, 0, 0).is_err());
        assert!(DomainBox::new(vec![0.0; 2], vec![1.0; 2], 3, 0, 0).is_err());
    }
}
