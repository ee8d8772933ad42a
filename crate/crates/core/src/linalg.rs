//! Dense complex linear algebra for the small Hermitian problems that show up
//! in Gram matrices over balls of a free group.
//!
//! Everything here works on [`CMatrix`], a row-major complex matrix. The
//! eigensolver is a cyclic complex Jacobi iteration with a fixed sweep order,
//! so a given input produces the same output bits on every run. Singular
//! values come from the Hermitian embedding `[[0, A], [A*, 0]]`, which keeps
//! rank decisions at the precision of the singular values themselves rather
//! than their squares.
//!
//! Tolerances are relative to the spectral norm of the input unless noted.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

const MAX_SWEEPS: usize = 100;
const HERMITIAN_REL_TOL: f64 = 1e-12;

/// Relative thresholds used by the PSD test and the rank cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Eigenvalue floor for PSD tests, relative to `max(1, ‖A‖)`.
    pub psd_eps: f64,
    /// Singular value cutoff for pseudo-inverses and factor ranks, relative to `‖A‖`.
    pub rank_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            psd_eps: 1e-10,
            rank_eps: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn new(psd_eps: f64, rank_eps: f64) -> Result<Self> {
        if !(psd_eps > 0.0 && rank_eps > 0.0) {
            return Err(Error::Invalid(format!(
                "tolerances must be strictly positive (psd_eps={psd_eps}, rank_eps={rank_eps})"
            )));
        }
        Ok(Tolerance { psd_eps, rank_eps })
    }

    /// Same tolerance used for both thresholds.
    pub fn uniform(eps: f64) -> Result<Self> {
        Self::new(eps, eps)
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds from nested rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Ok(CMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn scalar(z: C64) -> Self {
        CMatrix {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral norm (largest singular value).
    pub fn norm_op(&self) -> Result<f64> {
        if self.data.is_empty() {
            return Ok(0.0);
        }
        Ok(svd(self)?.values.first().copied().unwrap_or(0.0))
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        debug_assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..self.cols {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }

    /// `‖A − A*‖_F / ‖A‖_F`, zero for the zero matrix.
    pub fn hermitian_asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut diff = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                diff += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        let n = self.norm_fro();
        if n == 0.0 {
            0.0
        } else {
            diff.sqrt() / n
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// Copy of the `(i, j)` block of a matrix partitioned into `k×k` blocks.
    pub fn block(&self, i: usize, j: usize, k: usize) -> Self {
        let mut out = Self::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                out[(a, b)] = self[(i * k + a, j * k + b)];
            }
        }
        out
    }

    /// Copy of columns `[start, start + len)`.
    pub fn columns(&self, start: usize, len: usize) -> Self {
        let cols: Vec<usize> = (start..start + len).collect();
        let rows: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&rows, &cols)
    }

    /// Copy of rows `[start, start + len)`.
    pub fn row_range(&self, start: usize, len: usize) -> Self {
        CMatrix {
            rows: len,
            cols: self.cols,
            data: self.data[start * self.cols..(start + len) * self.cols].to_vec(),
        }
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, b: &CMatrix) {
        for a in 0..b.rows {
            for c in 0..b.cols {
                self[(row0 + a, col0 + c)] = b[(a, c)];
            }
        }
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out[(i * other.rows + p, j * other.cols + q)] = a * other[(p, q)];
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul of {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[l * other.cols..(l + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `A* B` without materializing `A*`.
    pub fn adjoint_mul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.cols, other.cols);
        for l in 0..self.rows {
            let other_row = &other.data[l * other.cols..(l + 1) * other.cols];
            for i in 0..self.cols {
                let a = self.data[l * self.cols + i].conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Max absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigendecomposition `A = V diag(values) V*` with values in descending order.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `V f(Λ) V*`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.rows();
        let mut scaled = self.vectors.clone();
        for j in 0..self.values.len() {
            let s = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        let mut out = scaled.matmul(&self.vectors.adjoint());
        // exact Hermitian symmetry for downstream checks
        out = out.hermitian_part();
        out
    }
}

fn check_input(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let asym = a.hermitian_asymmetry();
    if asym > HERMITIAN_REL_TOL {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    Ok(())
}

/// Eigenvalues (descending) and unitary eigenvectors of a Hermitian matrix.
pub fn eig_hermitian(a: &CMatrix) -> Result<Eigen> {
    check_input(a)?;
    jacobi(a.hermitian_part(), CMatrix::identity(a.rows()))
}

/// Same as [`eig_hermitian`], but starts the rotation from a guess basis.
/// Cuts the sweep count when `a` is a small perturbation of a matrix whose
/// eigenvectors are `basis`.
pub fn eig_hermitian_from(a: &CMatrix, basis: &CMatrix) -> Result<Eigen> {
    check_input(a)?;
    if basis.rows() != a.rows() || basis.cols() != a.rows() {
        return Err(Error::Dimension("warm-start basis shape".into()));
    }
    let rotated = basis.adjoint_mul(&a.matmul(basis)).hermitian_part();
    jacobi(rotated, basis.clone())
}

fn jacobi(mut a: CMatrix, mut v: CMatrix) -> Result<Eigen> {
    let n = a.rows();
    let scale = a.norm_fro();
    if n > 1 && scale > 0.0 {
        let mut converged = false;
        for sweep in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag == 0.0 {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    // negligible against both diagonals: drop it
                    if sweep > 3 && mag * 1e18 < app.abs().min(aqq.abs()) {
                        a[(p, q)] = ZERO;
                        a[(q, p)] = ZERO;
                        continue;
                    }
                    let phase = apq / mag; // e^{iθ}
                    let tau = (aqq - app) / (2.0 * mag);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + tau.hypot(1.0))
                    } else {
                        -1.0 / (-tau + tau.hypot(1.0))
                    };
                    let c = 1.0 / t.hypot(1.0);
                    let s = t * c;
                    let conj_phase = phase.conj();
                    // columns: A <- A G
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c - akq * conj_phase * s;
                        a[(k, q)] = akp * s + akq * conj_phase * c;
                    }
                    // rows: A <- G* A
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c - aqk * phase * s;
                        a[(q, k)] = apk * s + aqk * phase * c;
                    }
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * conj_phase * s;
                        v[(k, q)] = vkp * s + vkq * conj_phase * c;
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let rows: Vec<usize> = (0..n).collect();
    let vectors = v.submatrix(&rows, &order);
    Ok(Eigen { values, vectors })
}

/// True iff the smallest eigenvalue is at least `−psd_eps · max(1, ‖A‖)`.
pub fn is_psd(a: &CMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(psd_margin(a, tol)?.0)
}

/// PSD verdict plus the smallest eigenvalue.
pub fn psd_margin(a: &CMatrix, tol: &Tolerance) -> Result<(bool, f64)> {
    if a.rows() == 0 {
        return Ok((true, 0.0));
    }
    let eig = eig_hermitian(a)?;
    let floor = -tol.psd_eps * eig.max_abs().max(1.0);
    Ok((eig.min() >= floor, eig.min()))
}

/// Nearest PSD matrix in Frobenius norm: clip negative eigenvalues at zero.
pub fn psd_project(a: &CMatrix) -> Result<CMatrix> {
    let eig = eig_hermitian(a)?;
    Ok(eig.reconstruct(|x| x.max(0.0)))
}

/// Factor `A = W* W` with `W` having `rank(A)` rows.
///
/// Column block `i` of `W` (width `k` when `A` is made of `k×k` blocks) is the
/// embedding of the `i`-th coordinate into the range space of `A`.
pub fn gram_factor(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let n = a.rows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let eig = eig_hermitian(a)?;
    let norm = eig.max_abs();
    if eig.min() < -tol.psd_eps * norm.max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(factor_from_eigen(&eig, tol.rank_eps * norm))
}

/// Rows `sqrt(λ_i) v_i*` for every eigenvalue above `cutoff`.
pub(crate) fn factor_from_eigen(eig: &Eigen, cutoff: f64) -> CMatrix {
    let n = eig.vectors.rows();
    let kept: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] > cutoff && eig.values[i] > 0.0)
        .collect();
    let mut w = CMatrix::zeros(kept.len(), n);
    for (r, &i) in kept.iter().enumerate() {
        let s = eig.values[i].sqrt();
        for j in 0..n {
            w[(r, j)] = eig.vectors[(j, i)].conj() * s;
        }
    }
    w
}

/// Thin singular value decomposition `A = U diag(values) V*`, keeping only
/// strictly positive singular values.
#[derive(Debug, Clone)]
pub struct Svd {
    pub values: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

/// Singular values and vectors from the Hermitian embedding `[[0, A], [A*, 0]]`.
pub fn svd(a: &CMatrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let (r, c) = (a.rows(), a.cols());
    let mut h = CMatrix::zeros(r + c, r + c);
    h.set_block(0, r, a);
    h.set_block(r, 0, &a.adjoint());
    let eig = jacobi(h, CMatrix::identity(r + c))?;
    let norm = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    // eigenvalues come in ± pairs; the positive half carries [u; v] / sqrt(2)
    let kept: Vec<usize> = (0..eig.values.len())
        .take_while(|&i| eig.values[i] > 0.0 && eig.values[i] > 1e-15 * norm)
        .take(r.min(c))
        .collect();
    let mut u = CMatrix::zeros(r, kept.len());
    let mut v = CMatrix::zeros(c, kept.len());
    let root2 = std::f64::consts::SQRT_2;
    for (col, &i) in kept.iter().enumerate() {
        for row in 0..r {
            u[(row, col)] = eig.vectors[(row, i)] * root2;
        }
        for row in 0..c {
            v[(row, col)] = eig.vectors[(r + row, i)] * root2;
        }
    }
    Ok(Svd {
        values: kept.iter().map(|&i| eig.values[i]).collect(),
        u,
        v,
    })
}

/// Moore–Penrose pseudo-inverse; singular values at or below
/// `rank_eps · σ_max` are treated as zero.
pub fn pinv(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let (r, c) = (a.rows(), a.cols());
    if r == 0 || c == 0 {
        return Ok(CMatrix::zeros(c, r));
    }
    if a.is_square() && a.hermitian_asymmetry() == 0.0 {
        let eig = jacobi(a.clone(), CMatrix::identity(r))?;
        let cutoff = tol.rank_eps * eig.max_abs();
        return Ok(eig.reconstruct(|x| if x.abs() > cutoff { 1.0 / x } else { 0.0 }));
    }
    let s = svd(a)?;
    let cutoff = tol.rank_eps * s.values.first().copied().unwrap_or(0.0);
    let mut out = CMatrix::zeros(c, r);
    for (idx, &sigma) in s.values.iter().enumerate() {
        if sigma <= cutoff {
            continue;
        }
        for i in 0..c {
            let vi = s.v[(i, idx)] / sigma;
            for j in 0..r {
                out[(i, j)] += vi * s.u[(j, idx)].conj();
            }
        }
    }
    Ok(out)
}
