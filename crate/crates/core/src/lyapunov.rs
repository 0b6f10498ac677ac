//! The quadratic Lyapunov function
//!
//! ```text
//! 2V = ¼⟨BX, BX⟩ + 3/2⟨BY, Y⟩ + ⟨Z, Z⟩ + ‖Z + AY + ½BX‖²
//! ```
//!
//! its Gram-matrix bounds, its exact derivative along the flow, the four-term
//! decomposition of that derivative, and the constants that turn the
//! decomposition into a decrease estimate outside a ball.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypothesis::{ForcingBound, SpectralBounds};
use crate::linalg::{dot, sym_eigenvalues, SymMatrix};
use crate::system::{State, SystemDef};

/// `δ₂`, `δ₃` with `δ₂‖s‖² ≤ 2V(s) ≤ δ₃‖s‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticBounds {
    pub delta_2: f64,
    pub delta_3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub v: f64,
    pub vdot_exact: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub v4: f64,
    /// `|V̇ − (−V₁ − V₂ − V₃ + V₄)|`; measured, never assumed small.
    pub decomposition_residual: f64,
}

/// Proof constants: completing-the-square weights `k₁..k₆` and `δ₄..δ₈`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    pub sqrt_eps: f64,
    pub delta_4: f64,
    pub delta_4_feasible: bool,
    pub delta_5: f64,
    /// Nominal `½ min{δ₄, 3δ₁δ₅}`.
    pub delta_6: f64,
    /// `½(δ₄ − 3δ₁δ₅)`, the constant that actually follows from the estimate.
    pub delta_6_corrected: f64,
    pub delta_6_corrected_positive: bool,
    pub delta_7: f64,
    /// `2δ₇/δ₆`; `None` when `δ₆ ≤ 0`.
    pub delta_8: Option<f64>,
    /// `2δ₇/δ₆` with the corrected `δ₆`.
    pub delta_8_corrected: Option<f64>,
    /// `Δh` cap `δb²/(8Δa)` that keeps the first group non-negative.
    pub h_cap_v1: f64,
    /// `Δh` cap `δaδb/16` that keeps the second group non-negative.
    pub h_cap_v2: f64,
    /// Which of the two caps is tighter: `"v1"` or `"v2"`.
    pub binding_h_cap: &'static str,
}

/// Tolerance below which `δ₄` counts as non-positive.
pub const DELTA4_FLOOR: f64 = 1e-14;

fn check_ab(a: &SymMatrix, b: &SymMatrix, s: &State) -> Result<()> {
    let n = s.dim();
    for d in [a.dim(), b.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: n,
            });
        }
    }
    Ok(())
}

/// `W = Z + AY + ½BX`.
fn w_vector(a: &SymMatrix, b: &SymMatrix, s: &State) -> Vec<f64> {
    let ay = a.matvec(&s.y);
    let bx = b.matvec(&s.x);
    s.z.iter()
        .zip(&ay)
        .zip(&bx)
        .map(|((z, ay), bx)| z + ay + 0.5 * bx)
        .collect()
}

/// `V(X, Y, Z)`.
pub fn v_value(a: &SymMatrix, b: &SymMatrix, s: &State) -> Result<f64> {
    check_ab(a, b, s)?;
    let bx = b.matvec(&s.x);
    let by = b.matvec(&s.y);
    let w = w_vector(a, b, s);
    let two_v = 0.25 * dot(&bx, &bx) + 1.5 * dot(&by, &s.y) + dot(&s.z, &s.z) + dot(&w, &w);
    Ok(0.5 * two_v)
}

/// The symmetric `3n × 3n` matrix `M` with `2V = sᵀMs`, `s = (X, Y, Z)`:
///
/// ```text
/// [ ½B²   ½BA       ½B ]
/// [ ½AB   3/2B + A²  A  ]
/// [ ½B    A          2I ]
/// ```
pub fn v_gram_matrix(a: &SymMatrix, b: &SymMatrix) -> Result<SymMatrix> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.dim(),
        });
    }
    let b2 = b.square();
    let a2 = a.square();
    let ba = b.mul(a);
    let m = 3 * n;
    let mut data = vec![0.0; m * m];
    let mut put = |bi: usize, bj: usize, i: usize, j: usize, v: f64| {
        data[(bi * n + i) * m + bj * n + j] = v;
    };
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            put(0, 0, i, j, 0.5 * b2.get(i, j));
            put(0, 1, i, j, 0.5 * ba.get(i, j));
            put(1, 0, i, j, 0.5 * ba.get(j, i));
            put(0, 2, i, j, 0.5 * b.get(i, j));
            put(2, 0, i, j, 0.5 * b.get(i, j));
            put(1, 1, i, j, 1.5 * b.get(i, j) + a2.get(i, j));
            put(1, 2, i, j, a.get(i, j));
            put(2, 1, i, j, a.get(i, j));
            put(2, 2, i, j, 2.0 * id);
        }
    }
    SymMatrix::from_row_major(m, data)
}

/// Extreme eigenvalues of the Gram matrix of `2V`.
pub fn v_gram_bounds(a: &SymMatrix, b: &SymMatrix) -> Result<QuadraticBounds> {
    let spec = sym_eigenvalues(&v_gram_matrix(a, b)?)?;
    if spec.min() <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            lambda_min: spec.min(),
        });
    }
    Ok(QuadraticBounds {
        delta_2: spec.min(),
        delta_3: spec.max(),
    })
}

/// `∇V(s) · f(t, s)` by the chain rule on the explicit quadratic:
/// `∇ₓV = ¼B²X + ½BW`, `∇ᵧV = 3/2 BY + AW`, `∇_zV = Z + W`.
pub fn vdot_exact(sys: &SystemDef, t: f64, s: &State) -> Result<f64> {
    check_ab(&sys.a, &sys.b, s)?;
    let n = sys.n;
    let mut f = vec![0.0; 3 * n];
    sys.rhs_flat(t, &s.to_flat(), &mut f, true)?;
    let (xd, rest) = f.split_at(n);
    let (yd, zd) = rest.split_at(n);
    let (a, b) = (&sys.a, &sys.b);
    let w = w_vector(a, b, s);
    let bx = b.matvec(&s.x);
    let b2x = b.matvec(&bx);
    let bw = b.matvec(&w);
    let by = b.matvec(&s.y);
    let aw = a.matvec(&w);
    let mut acc = 0.0;
    for i in 0..n {
        acc += (0.25 * b2x[i] + 0.5 * bw[i]) * xd[i];
        acc += (1.5 * by[i] + aw[i]) * yd[i];
        acc += (s.z[i] + w[i]) * zd[i];
    }
    Ok(acc)
}

/// Evaluates `V₁..V₄` term by term and reports the residual against [`vdot_exact`].
pub fn vdot_decomposition(sys: &SystemDef, t: f64, s: &State) -> Result<LyapunovReport> {
    check_ab(&sys.a, &sys.b, s)?;
    let (a, b) = (&sys.a, &sys.b);
    let (x, y, z) = (&s.x, &s.y, &s.z);
    let f = sys.f(x, y, z);
    let g = sys.g(x, y);
    let h = sys.h(x);
    let p = sys.p(t, x, y, z);

    let bx = b.matvec(x);
    let ay = a.matvec(y);
    let gy = g.matvec(y);
    let fz = f.matvec(z);
    let fa_z = f.sub(a).matvec(z);
    let gb_y = g.sub(b).matvec(y);

    let bx_h = dot(&bx, &h);
    let ay_gy = dot(&ay, &gy);
    let fz_z = dot(&fz, z);

    let v1 = 0.125 * bx_h + dot(&h, &ay) + 0.25 * ay_gy;
    let v2 = 0.125 * bx_h + 0.5 * fz_z + 2.0 * dot(&h, z);
    let v3 = 0.25 * bx_h
        + 0.25 * ay_gy
        + 0.5 * fz_z
        + 0.5 * dot(&bx, &fa_z)
        + 0.5 * dot(&bx, &gb_y)
        + dot(&ay, &fa_z)
        + 2.0 * dot(&gb_y, z)
        + dot(&fa_z, z)
        + 0.5 * dot(&gb_y, &ay);
    let v4 = forcing_term(a, b, s, &p);

    let vdot = vdot_exact(sys, t, s)?;
    let report = LyapunovReport {
        v: v_value(a, b, s)?,
        vdot_exact: vdot,
        v1,
        v2,
        v3,
        v4,
        decomposition_residual: (vdot - (-v1 - v2 - v3 + v4)).abs(),
    };
    if [report.v, report.vdot_exact, v1, v2, v3, v4]
        .iter()
        .all(|v| v.is_finite())
    {
        Ok(report)
    } else {
        Err(Error::Evaluation {
            field: "V decomposition",
            t,
        })
    }
}

/// `V₄ = ⟨½BX + AY + 2Z, P⟩`.
pub fn forcing_term(a: &SymMatrix, b: &SymMatrix, s: &State, p: &[f64]) -> f64 {
    let bx = b.matvec(&s.x);
    let ay = a.matvec(&s.y);
    (0..s.dim())
        .map(|i| (0.5 * bx[i] + ay[i] + 2.0 * s.z[i]) * p[i])
        .sum()
}

/// Proof constants from the spectral bounds and the forcing envelope.
pub fn decay_constants(bounds: &SpectralBounds, forcing: &ForcingBound) -> DecayConstants {
    let (da, ua) = (bounds.a_min, bounds.a_max);
    let (db, ub) = (bounds.b_min, bounds.b_max);
    let dh = bounds.h_min;
    let se = bounds.sqrt_eps;

    let k1 = (0.5 * db / ua).sqrt();
    let k2 = (0.5 * da).sqrt();
    let k3 = (0.125_f64).min(8.0 / (3.0 * ub)).sqrt();
    let k4 = (ub / 8.0).min(14.0 / ub).sqrt();
    let k5 = (1.0 / 3.0_f64).min(4.0 / (3.0 * ua)).sqrt();
    let k6 = (2.0 / (3.0 * ua)).min(2.0 / 3.0).sqrt();

    let delta_4 = (0.25 * db * dh - (ub + 1.0) * se)
        .min(0.25 * da * db - (6.0 * ua + 7.0) / 4.0 * se)
        .min(0.5 * da - se);
    let delta_5 = (0.5 * ub).max(ua).max(2.0);
    let three_d1_d5 = 3.0 * forcing.delta_1 * delta_5;
    let delta_6 = 0.5 * delta_4.min(three_d1_d5);
    let delta_6_corrected = 0.5 * (delta_4 - three_d1_d5);
    let delta_7 = 3.0_f64.sqrt() * forcing.delta_0 * delta_5;
    let radius = |d6: f64| {
        if d6 > 0.0 {
            Some(2.0 * delta_7 / d6)
        } else {
            None
        }
    };

    let h_cap_v1 = db * db / (8.0 * ua);
    let h_cap_v2 = da * db / 16.0;
    DecayConstants {
        k1,
        k2,
        k3,
        k4,
        k5,
        k6,
        sqrt_eps: se,
        delta_4,
        delta_4_feasible: delta_4 > DELTA4_FLOOR,
        delta_5,
        delta_6,
        delta_6_corrected,
        delta_6_corrected_positive: delta_6_corrected > 0.0,
        delta_7,
        delta_8: radius(delta_6),
        delta_8_corrected: radius(delta_6_corrected),
        h_cap_v1,
        h_cap_v2,
        binding_h_cap: if h_cap_v1 <= h_cap_v2 { "v1" } else { "v2" },
    }
}

/// Outcome of sampling `V̇ ≤ −δ₆‖s‖²` outside the radius `δ₈`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecreaseCheck {
    pub delta_6: f64,
    pub radius: f64,
    pub samples: usize,
    pub violations: usize,
    /// `max (V̇ + δ₆‖s‖²)/‖s‖²` over samples; ≤ 0 means every sample decreased.
    pub worst_margin: f64,
    pub passed: bool,
}

/// Samples states with `radius ≤ ‖s‖ ≤ 3·radius` (uniform directions) and
/// times in `[0, ω)`, and checks `V̇(t, s) ≤ −δ₆‖s‖²`.
pub fn decrease_spot_check<R: Rng>(
    sys: &SystemDef,
    delta_6: f64,
    radius: f64,
    samples: usize,
    rng: &mut R,
) -> Result<DecreaseCheck> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::Input(format!("radius must be finite, got {radius}")));
    }
    let dim = 3 * sys.n;
    let r0 = radius.max(f64::MIN_POSITIVE);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let dir = random_unit(dim, rng);
        let r = r0 * (1.0 + 2.0 * rng.gen::<f64>());
        let v: Vec<f64> = dir.iter().map(|d| d * r).collect();
        let s = State::from_flat(&v)?;
        let t = rng.gen::<f64>() * sys.omega;
        let vd = vdot_exact(sys, t, &s)?;
        let ns = s.norm_sq();
        let margin = (vd + delta_6 * ns) / ns;
        worst = worst.max(margin);
        if vd > -delta_6 * ns {
            violations += 1;
        }
    }
    Ok(DecreaseCheck {
        delta_6,
        radius,
        samples,
        violations,
        worst_margin: worst,
        passed: violations == 0 && samples > 0,
    })
}

pub(crate) fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = dot(&v, &v).sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
