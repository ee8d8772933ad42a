//! Seeded random fixtures: Haar unitaries, contractions, and positive definite
//! functions built from random unitary representations.
//!
//! Everything takes an explicit RNG so that runs are replayable; use
//! [`seeded`] for the crate's standard generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::pdfun::{Domain, PdFunction};
use crate::words::{GroupContext, Word};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries i.i.d. standard complex Gaussian (`E|z|² = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(h * re, h * im)
        })
        .collect();
    CMatrix::from_vec(rows, cols, data).expect("shape")
}

/// Orthonormalizes the columns of a Gaussian matrix. Gram–Schmidt fixes the
/// phases of the implicit `R` factor, so the result is Haar distributed.
fn orthonormal_columns<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> CMatrix {
    assert!(k <= d);
    loop {
        let g = complex_gaussian(d, k, rng);
        let mut q = CMatrix::zeros(d, k);
        let mut ok = true;
        for j in 0..k {
            let mut v: Vec<C64> = (0..d).map(|i| g[(i, j)]).collect();
            // twice is enough for numerical orthogonality
            for _ in 0..2 {
                for p in 0..j {
                    let dot: C64 = (0..d).map(|i| q[(i, p)].conj() * v[i]).sum();
                    for (i, x) in v.iter_mut().enumerate() {
                        *x -= dot * q[(i, p)];
                    }
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for (i, x) in v.iter().enumerate() {
                q[(i, j)] = x / norm;
            }
        }
        if ok {
            return q;
        }
    }
}

pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    orthonormal_columns(d, d, rng)
}

/// A `d×k` isometry (`V*V = I_k`), Haar distributed.
pub fn random_isometry<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<CMatrix> {
    if k > d {
        return Err(Error::Dimension(format!("no {d}x{k} isometry")));
    }
    Ok(orthonormal_columns(d, k, rng))
}

/// Random `rows×cols` matrix of operator norm at most `radius`.
///
/// The direction is a complex Gaussian rescaled to unit operator norm, i.e.
/// its singular values are shrunk uniformly; the norm is `radius · U^{1/D}`
/// with `D = 2·rows·cols`, the real dimension, so norms follow the radial
/// law of the uniform distribution on a ball.
pub fn random_contraction<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    radius: f64,
    rng: &mut R,
) -> CMatrix {
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, cols);
    }
    let g = complex_gaussian(rows, cols, rng);
    let norm = g.norm_op().expect("finite");
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / (2 * rows * cols) as f64);
    g.scale(r / norm)
}

/// `U(s)`: the word evaluated on unitaries, with `U_i*` for `a_i⁻¹`.
pub fn eval_word(unitaries: &[CMatrix], s: &Word) -> CMatrix {
    let d = unitaries.first().map_or(0, CMatrix::rows);
    let mut acc = CMatrix::identity(d);
    for &x in s.letters() {
        let u = &unitaries[x.unsigned_abs() as usize - 1];
        acc = if x > 0 { acc.matmul(u) } else { acc.matmul(&u.adjoint()) };
    }
    acc
}

/// `Φ(s) = (1 − ε) V* U(s) V + ε δ_e(s) I` on `S_n`, positive definite
/// because both terms are.
pub fn pd_from_representation(
    ctx: &GroupContext,
    unitaries: &[CMatrix],
    v: &CMatrix,
    eps: f64,
    n: usize,
) -> Result<PdFunction> {
    if unitaries.len() != ctx.m() {
        return Err(Error::Dimension(format!(
            "{} unitaries for m = {}",
            unitaries.len(),
            ctx.m()
        )));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Invalid(format!("mixing weight {eps} outside [0, 1]")));
    }
    let k = v.cols();
    PdFunction::from_fn(ctx, k, Domain::Ball(n), |s| {
        let body = v.adjoint_mul(&eval_word(unitaries, s).matmul(v)).scale(1.0 - eps);
        if s.is_identity() {
            &body + &CMatrix::identity(k).scale(eps)
        } else {
            body
        }
    })
}

/// A random positive definite function on `S_n` with `k×k` values. Its
/// Toeplitz matrices are strictly positive, so every defect has full rank.
pub fn random_pd_function<R: Rng + ?Sized>(
    ctx: &GroupContext,
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<PdFunction> {
    let d = 2 * k + 1;
    let unitaries: Vec<CMatrix> = (0..ctx.m()).map(|_| haar_unitary(d, rng)).collect();
    let v = random_isometry(d, k, rng)?;
    let eps = rng.random_range(0.1..0.5);
    pd_from_representation(ctx, &unitaries, &v, eps, n)
}

/// Random Hermitian `n×n` matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    complex_gaussian(n, n, rng).hermitian_part()
}
