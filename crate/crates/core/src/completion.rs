//! Positive completion of a block matrix with a single unknown entry.
//!
//! For a partially positive `A` whose only unknown pair is `{k, l}`, write
//! `E` for the remaining indices. Every positive completion has the form
//!
//! ```text
//! A_kl = A_kE A_EE⁺ A_El + F_k* γ F_l,        ‖γ‖ ≤ 1,
//! ```
//!
//! where `F_k*F_k` and `F_l*F_l` are the Schur complements of the `k` and `l`
//! columns against `E`. The factors are truncated to the ranks of those
//! complements, so `γ` is `rank(S_k) × rank(S_l)` and the map `γ ↦ A_kl` is
//! one-to-one. `γ = 0` gives the central completion.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Tolerance};

/// Slack allowed on `‖γ‖` before it stops counting as a contraction.
pub const CONTRACTION_SLACK: f64 = 1e-12;

/// A `p×p` block Hermitian matrix with `k×k` blocks and exactly one unknown
/// pair of blocks `(missing_k, missing_l)` / `(missing_l, missing_k)`.
#[derive(Debug, Clone)]
pub struct PartialBlockMatrix {
    matrix: CMatrix,
    k: usize,
    missing: (usize, usize),
}

impl PartialBlockMatrix {
    /// Takes the known entries from `matrix`; whatever sits in the unknown
    /// blocks is discarded.
    pub fn new(matrix: CMatrix, k: usize, missing_k: usize, missing_l: usize) -> Result<Self> {
        if k == 0 || !matrix.is_square() || matrix.rows() % k != 0 {
            return Err(Error::Dimension(format!(
                "{}x{} matrix is not made of {k}x{k} blocks",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let p = matrix.rows() / k;
        if missing_k == missing_l || missing_k >= p || missing_l >= p {
            return Err(Error::Invalid(format!(
                "missing pair ({missing_k}, {missing_l}) invalid for {p} blocks"
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut matrix = matrix;
        let zero = CMatrix::zeros(k, k);
        matrix.set_block(missing_k * k, missing_l * k, &zero);
        matrix.set_block(missing_l * k, missing_k * k, &zero);
        let asym = matrix.hermitian_asymmetry();
        if asym > 1e-12 {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(PartialBlockMatrix {
            matrix,
            k,
            missing: (missing_k, missing_l),
        })
    }

    pub fn block_size(&self) -> usize {
        self.k
    }

    pub fn num_blocks(&self) -> usize {
        self.matrix.rows() / self.k
    }

    pub fn missing(&self) -> (usize, usize) {
        self.missing
    }

    /// The stored matrix, with zero in the unknown blocks.
    pub fn known(&self) -> &CMatrix {
        &self.matrix
    }

    fn scalar_indices(&self, blocks: &[usize]) -> Vec<usize> {
        blocks
            .iter()
            .flat_map(|&b| (b * self.k)..((b + 1) * self.k))
            .collect()
    }

    fn other_blocks(&self) -> Vec<usize> {
        let (a, b) = self.missing;
        (0..self.num_blocks()).filter(|&i| i != a && i != b).collect()
    }

    /// Fills the unknown pair with `value` at `(missing_k, missing_l)`.
    pub fn filled_with(&self, value: &CMatrix) -> CMatrix {
        let (a, b) = self.missing;
        let mut out = self.matrix.clone();
        out.set_block(a * self.k, b * self.k, value);
        out.set_block(b * self.k, a * self.k, &value.adjoint());
        out
    }
}

/// Central entry and the two defect factors of a single-entry completion problem.
#[derive(Debug, Clone)]
pub struct DefectData {
    /// `A_kE A_EE⁺ A_El`, the `γ = 0` value.
    pub central_entry: CMatrix,
    /// `d_k × k`, with `F_k* F_k` the Schur complement of column `k`.
    pub defect_k: CMatrix,
    /// `d_l × k`, with `F_l* F_l` the Schur complement of column `l`.
    pub defect_l: CMatrix,
}

impl DefectData {
    pub fn dims(&self) -> (usize, usize) {
        (self.defect_k.rows(), self.defect_l.rows())
    }

    pub fn is_full_rank(&self) -> bool {
        let k = self.central_entry.rows();
        self.dims() == (k, k)
    }

    /// `central + F_k* γ F_l`.
    pub fn entry_for(&self, gamma: &ContractionParam) -> Result<CMatrix> {
        self.check_shape(gamma)?;
        if gamma.is_zero() {
            // exactly the central entry, so zero parameters replay bit for bit
            return Ok(self.central_entry.clone());
        }
        let correction = self.defect_k.adjoint_mul(&gamma.0.matmul(&self.defect_l));
        Ok(&self.central_entry + &correction)
    }

    pub fn check_shape(&self, gamma: &ContractionParam) -> Result<()> {
        let (dk, dl) = self.dims();
        if gamma.0.rows() != dk || gamma.0.cols() != dl {
            return Err(Error::Dimension(format!(
                "γ is {}x{}, defect spaces are {dk}x{dl}",
                gamma.0.rows(),
                gamma.0.cols()
            )));
        }
        Ok(())
    }
}

/// A contraction between the two truncated defect spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionParam(pub CMatrix);

impl ContractionParam {
    pub fn zero(dk: usize, dl: usize) -> Self {
        ContractionParam(CMatrix::zeros(dk, dl))
    }

    pub fn zero_for(defects: &DefectData) -> Self {
        let (dk, dl) = defects.dims();
        Self::zero(dk, dl)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn norm(&self) -> Result<f64> {
        self.0.norm_op()
    }

    pub fn is_zero(&self) -> bool {
        self.0.norm_max() == 0.0
    }
}

/// Central entry and defect factors of `partial`.
pub fn analyze(partial: &PartialBlockMatrix, tol: &Tolerance) -> Result<DefectData> {
    let (bk, bl) = partial.missing;
    let a = &partial.matrix;
    let k = partial.k;

    // the two maximal fully specified principal submatrices
    let all: Vec<usize> = (0..partial.num_blocks()).collect();
    for dropped in [bk, bl] {
        let keep: Vec<usize> = all.iter().copied().filter(|&i| i != dropped).collect();
        let idx = partial.scalar_indices(&keep);
        let (ok, min_eig) = linalg::psd_margin(&a.submatrix(&idx, &idx), tol)?;
        if !ok {
            return Err(Error::PartialPositivity {
                dropped,
                min_eigenvalue: min_eig,
            });
        }
    }

    let e = partial.scalar_indices(&partial.other_blocks());
    let ik = partial.scalar_indices(&[bk]);
    let il = partial.scalar_indices(&[bl]);
    let a_kk = a.submatrix(&ik, &ik);
    let a_ll = a.submatrix(&il, &il);

    let (central, schur_k, schur_l) = if e.is_empty() {
        (CMatrix::zeros(k, k), a_kk.clone(), a_ll.clone())
    } else {
        let a_ee_pinv = linalg::pinv(&a.submatrix(&e, &e), tol)?;
        let a_ke = a.submatrix(&ik, &e);
        let a_el = a.submatrix(&e, &il);
        let left = a_ke.matmul(&a_ee_pinv);
        let right = a_ee_pinv.matmul(&a_el);
        let central = left.matmul(&a_el);
        let schur_k = (&a_kk - &left.matmul(&a_ke.adjoint())).hermitian_part();
        let schur_l = (&a_ll - &a_el.adjoint_mul(&right)).hermitian_part();
        (central, schur_k, schur_l)
    };

    let scale = linalg::eig_hermitian(&a_kk)?
        .max_abs()
        .max(linalg::eig_hermitian(&a_ll)?.max_abs());
    Ok(DefectData {
        central_entry: central,
        defect_k: defect_factor(&schur_k, tol.rank_eps * scale)?,
        defect_l: defect_factor(&schur_l, tol.rank_eps * scale)?,
    })
}

/// Rank-truncated factor `F` with `F*F = S`. When `S` has full rank the
/// Hermitian square root is used, which depends continuously on `S` even
/// across repeated eigenvalues.
fn defect_factor(schur: &CMatrix, cutoff: f64) -> Result<CMatrix> {
    let eig = linalg::eig_hermitian(schur)?;
    let rank = eig.values.iter().filter(|&&v| v > cutoff && v > 0.0).count();
    if rank == schur.rows() {
        Ok(eig.reconstruct(f64::sqrt))
    } else {
        Ok(linalg::factor_from_eigen(&eig, cutoff))
    }
}

fn check_contraction(gamma: &ContractionParam) -> Result<()> {
    if gamma.0.rows() == 0 || gamma.0.cols() == 0 {
        return Ok(());
    }
    let norm = gamma.norm()?;
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { norm });
    }
    Ok(())
}

/// The completed matrix for contraction `gamma`.
pub fn complete(
    partial: &PartialBlockMatrix,
    gamma: &ContractionParam,
    tol: &Tolerance,
) -> Result<CMatrix> {
    let defects = analyze(partial, tol)?;
    complete_with(partial, &defects, gamma)
}

/// [`complete`] with precomputed defect data.
pub fn complete_with(
    partial: &PartialBlockMatrix,
    defects: &DefectData,
    gamma: &ContractionParam,
) -> Result<CMatrix> {
    defects.check_shape(gamma)?;
    check_contraction(gamma)?;
    Ok(partial.filled_with(&defects.entry_for(gamma)?))
}

/// Inverse of [`complete`]: the contraction that produces `filled`.
///
/// Where a defect space is trivial the parameter has no room and an empty
/// matrix is returned. On rank-deficient defects the least-norm
/// representative is returned.
pub fn extract_gamma(
    partial: &PartialBlockMatrix,
    filled: &CMatrix,
    tol: &Tolerance,
) -> Result<ContractionParam> {
    let defects = analyze(partial, tol)?;
    extract_gamma_with(partial, &defects, filled, tol)
}

/// [`extract_gamma`] with precomputed defect data.
pub fn extract_gamma_with(
    partial: &PartialBlockMatrix,
    defects: &DefectData,
    filled: &CMatrix,
    tol: &Tolerance,
) -> Result<ContractionParam> {
    let k = partial.k;
    if filled.rows() != k || filled.cols() != k {
        return Err(Error::Dimension(format!(
            "filled block is {}x{}, expected {k}x{k}",
            filled.rows(),
            filled.cols()
        )));
    }
    let (ok, min_eig) = linalg::psd_margin(&partial.filled_with(filled), tol)?;
    if !ok {
        return Err(Error::NotPsd {
            min_eigenvalue: min_eig,
        });
    }
    let (dk, dl) = defects.dims();
    if dk == 0 || dl == 0 {
        return Ok(ContractionParam::zero(dk, dl));
    }
    let offset = filled - &defects.central_entry;
    if offset.norm_max() == 0.0 {
        return Ok(ContractionParam::zero(dk, dl));
    }
    let left = linalg::pinv(&defects.defect_k.adjoint(), tol)?;
    let right = linalg::pinv(&defects.defect_l, tol)?;
    Ok(ContractionParam(left.matmul(&offset).matmul(&right)))
}
