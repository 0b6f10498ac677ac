//! Dense small-matrix arithmetic.
//!
//! [`SymMatrix`] is the workhorse: every matrix field of the ODE (F, G, the
//! constant comparison matrices A, B, the Gram matrix of the Lyapunov form)
//! is symmetric, and its spectrum comes from cyclic Jacobi rotations.
//! [`Matrix`] is a general square matrix used for Jacobians, secant
//! operators of non-gradient fields, and the shooting Newton system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative asymmetry accepted (and averaged away) by [`SymMatrix`] constructors.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Off-diagonal Frobenius norm, relative to the full norm, at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-14;

pub const JACOBI_MAX_SWEEPS: usize = 30;

/// Relative tolerance for [`commutes`]: `‖QD − DQ‖_F ≤ tol · ‖Q‖_F · ‖D‖_F`.
pub const COMMUTE_TOL: f64 = 1e-9;

/// Real symmetric `n × n` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Eigenvalues of a symmetric matrix, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl SymMatrix {
    /// Builds from row-major entries, symmetrizing as `(M + Mᵀ)/2`.
    ///
    /// Rejects non-finite entries and asymmetry larger than
    /// [`SYMMETRY_TOL`] relative to the largest entry.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("matrix dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        let scale = data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut out = data;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = out[i * n + j];
                let b = out[j * n + i];
                worst = worst.max((a - b).abs());
                let avg = 0.5 * (a + b);
                out[i * n + j] = avg;
                out[j * n + i] = avg;
            }
        }
        if scale > 0.0 && worst > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(worst / scale));
        }
        Ok(Self { n, data: out })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(x, &mut out);
        out
    }

    #[inline]
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let row = &self.data[i * n..(i + 1) * n];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// General (not necessarily symmetric) product `self · other`.
    pub fn mul(&self, other: &Self) -> Matrix {
        Matrix::from(self.clone()).mul(&Matrix::from(other.clone()))
    }

    /// `self²`, which stays symmetric.
    pub fn square(&self) -> Self {
        let p = self.mul(self);
        Self {
            n: self.n,
            data: p.symmetric_part().data,
        }
    }

    pub fn eigenvalues(&self) -> Result<Spectrum> {
        sym_eigenvalues(self)
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn sym_eigenvalues(m: &SymMatrix) -> Result<Spectrum> {
    let n = m.n;
    if m.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    let mut a = m.data.clone();
    let total = m.frobenius();
    if total == 0.0 {
        return Ok(Spectrum {
            values: vec![0.0; n],
        });
    }
    let threshold = JACOBI_TOL * total;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off(&a) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Rotation angle annihilating a[p][q].
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
        sweeps += 1;
        converged = off(&a) <= threshold;
    }
    if !converged {
        return Err(Error::Eigen { coords: Vec::new() });
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    values.sort_by(|x, y| x.total_cmp(y));
    Ok(Spectrum { values })
}

/// `⟨Mx, x⟩`.
pub fn quadratic_form(m: &SymMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != m.n {
        return Err(Error::DimensionMismatch {
            expected: m.n,
            got: x.len(),
        });
    }
    Ok(dot(&m.matvec(x), x))
}

/// Frobenius norm of `QD − DQ`.
pub fn commutator_norm(q: &SymMatrix, d: &SymMatrix) -> Result<f64> {
    if q.n != d.n {
        return Err(Error::DimensionMismatch {
            expected: q.n,
            got: d.n,
        });
    }
    let qd = q.mul(d);
    let dq = d.mul(q);
    Ok(qd.sub(&dq).frobenius())
}

/// Whether `Q` and `D` commute within [`COMMUTE_TOL`].
pub fn commutes(q: &SymMatrix, d: &SymMatrix) -> Result<bool> {
    let c = commutator_norm(q, d)?;
    Ok(c <= COMMUTE_TOL * q.frobenius() * d.frobenius())
}

/// Whether `δ‖x‖² ≤ ⟨Dx, x⟩ ≤ Δ‖x‖²` holds with the given absolute slack.
pub fn quadratic_form_within_spectrum(d: &SymMatrix, x: &[f64], slack: f64) -> Result<bool> {
    let spec = sym_eigenvalues(d)?;
    let q = quadratic_form(d, x)?;
    let nx = dot(x, x);
    Ok(spec.min() * nx - slack <= q && q <= spec.max() * nx + slack)
}

/// Outcome of the eigenvalue-bound checks for commuting symmetric `Q`, `D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub product_eigenvalues: Vec<f64>,
    pub product_lower: f64,
    pub product_upper: f64,
    pub product_ok: bool,
    pub sum_eigenvalues: Vec<f64>,
    pub sum_lower: f64,
    pub sum_upper: f64,
    pub sum_ok: bool,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.product_ok && self.sum_ok
    }
}

/// Slack used when testing eigenvalues against product/sum bounds.
pub const LEMMA_SLACK: f64 = 1e-9;

/// Checks that the spectra of `QD` and `Q + D` lie inside the bounds built
/// from the spectra of `Q` and `D`. Requires `Q`, `D` to commute.
pub fn check_lemma_bounds(q: &SymMatrix, d: &SymMatrix) -> Result<LemmaReport> {
    if !commutes(q, d)? {
        return Err(Error::Precondition(format!(
            "matrices do not commute (‖QD − DQ‖_F = {:e})",
            commutator_norm(q, d)?
        )));
    }
    let sq = sym_eigenvalues(q)?;
    let sd = sym_eigenvalues(d)?;

    let products: Vec<f64> = sq
        .values
        .iter()
        .flat_map(|a| sd.values.iter().map(move |b| a * b))
        .collect();
    let product_lower = products.iter().cloned().fold(f64::INFINITY, f64::min);
    let product_upper = products.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let qd = q.mul(d);
    let qd = SymMatrix {
        n: q.n,
        data: qd.symmetric_part().data,
    };
    let pe = sym_eigenvalues(&qd)?;
    let pscale = LEMMA_SLACK * (1.0 + product_lower.abs().max(product_upper.abs()));
    let product_ok = pe
        .values
        .iter()
        .all(|v| *v >= product_lower - pscale && *v <= product_upper + pscale);

    let sum_lower = sq.min() + sd.min();
    let sum_upper = sq.max() + sd.max();
    let se = sym_eigenvalues(&q.add(d))?;
    let sscale = LEMMA_SLACK * (1.0 + sum_lower.abs().max(sum_upper.abs()));
    let sum_ok = se
        .values
        .iter()
        .all(|v| *v >= sum_lower - sscale && *v <= sum_upper + sscale);

    Ok(LemmaReport {
        product_eigenvalues: pe.values,
        product_lower,
        product_upper,
        product_ok,
        sum_eigenvalues: se.values,
        sum_lower,
        sum_upper,
        sum_ok,
    })
}

/// General square matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl From<SymMatrix> for Matrix {
    fn from(m: SymMatrix) -> Self {
        Self {
            n: m.n,
            data: m.data,
        }
    }
}

impl Matrix {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(x, &mut out);
        out
    }

    #[inline]
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let row = &self.data[i * n..(i + 1) * n];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest `|M_ij − M_ji|` relative to the largest entry (0 for the zero matrix).
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let scale = self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).abs());
            }
        }
        worst / scale
    }

    /// `(M + Mᵀ)/2`, exactly symmetric.
    pub fn symmetric_part(&self) -> SymMatrix {
        let n = self.n;
        let mut data = self.data.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        SymMatrix { n, data }
    }

    fn norm_1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    singular: bool,
}

impl Lu {
    pub fn new(m: &Matrix) -> Self {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in (k + 1)..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Self {
            n,
            lu,
            perm,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        Some(x)
    }

    /// `‖M‖₁ ‖M⁻¹‖₁` with the inverse formed column by column.
    pub fn condition_1(&self, m: &Matrix) -> f64 {
        if self.singular {
            return f64::INFINITY;
        }
        let n = self.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = match self.solve(&e) {
                Some(c) => c,
                None => return f64::INFINITY,
            };
            for i in 0..n {
                inv.data[i * n + j] = col[i];
            }
        }
        let c = m.norm_1() * inv.norm_1();
        if c.is_finite() {
            c
        } else {
            f64::INFINITY
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let m = SymMatrix::diag(&[3.0, 1.0, 2.0]);
        assert_eq!(sym_eigenvalues(&m).unwrap().values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_roots() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let s = sym_eigenvalues(&m).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14);
        assert!((s.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric_and_non_finite() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric(_)));
        let err = SymMatrix::from_rows(&[vec![f64::NAN, 0.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn tiny_asymmetry_is_averaged() {
        let m = SymMatrix::from_rows(&[vec![1.0, 0.5 + 1e-12], vec![0.5, 1.0]]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn quadratic_form_examples() {
        assert_eq!(
            quadratic_form(&SymMatrix::identity(2), &[1.0, 1.0]).unwrap(),
            2.0
        );
        assert_eq!(
            quadratic_form(&SymMatrix::diag(&[2.0, 3.0]), &[1.0, 1.0]).unwrap(),
            5.0
        );
        assert!(matches!(
            quadratic_form(&SymMatrix::identity(2), &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn commutator_examples() {
        let d = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -3.0]]).unwrap();
        assert_eq!(commutator_norm(&SymMatrix::identity(2), &d).unwrap(), 0.0);
        let a = SymMatrix::diag(&[1.0, 5.0]);
        let b = SymMatrix::diag(&[-2.0, 7.0]);
        assert_eq!(commutator_norm(&a, &b).unwrap(), 0.0);
        // [[0,1],[1,0]]·[[1,0],[0,-1]] = [[0,-1],[1,0]]; the reverse product
        // is its negative, so the commutator is [[0,-2],[2,0]].
        let p = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let q = SymMatrix::diag(&[1.0, -1.0]);
        let c = commutator_norm(&p, &q).unwrap();
        assert!((c - 2.0 * 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lemma_bounds_identity_and_diagonal() {
        let i2 = SymMatrix::identity(2);
        let r = check_lemma_bounds(&i2, &i2).unwrap();
        assert_eq!((r.product_lower, r.product_upper), (1.0, 1.0));
        assert_eq!((r.sum_lower, r.sum_upper), (2.0, 2.0));
        assert!(r.passed());

        let r = check_lemma_bounds(&SymMatrix::diag(&[1.0, 2.0]), &SymMatrix::diag(&[3.0, 4.0]))
            .unwrap();
        assert_eq!(r.product_eigenvalues, vec![3.0, 8.0]);
        assert_eq!((r.product_lower, r.product_upper), (3.0, 8.0));
        assert!(r.passed());
    }

    #[test]
    fn lemma_requires_commuting() {
        let p = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let q = SymMatrix::diag(&[1.0, -1.0]);
        assert!(matches!(
            check_lemma_bounds(&p, &q),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lu_solves_and_flags_singular() {
        let m = Matrix::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        let lu = Lu::new(&m);
        let x = lu.solve(&[4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let lu = Lu::new(&s);
        assert!(lu.is_singular() || lu.condition_1(&s) > 1e15);
    }
}
