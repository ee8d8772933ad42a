//! Noncommutative trigonometric polynomials `p(X) = Σ A_s X(s)` in unitary
//! indeterminates, and hermitian-square factorizations `p = q*q`.
//!
//! A positive `p` of degree `d` has a PSD Gram matrix `G` indexed by `S_d`
//! whose sums along `s⁻¹t = x` reproduce the coefficients. [`factor_sos`]
//! looks for one with Dykstra's alternating projections between the PSD cone
//! and that affine set, then factors `G = B*B`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Tolerance, C64};
use crate::sampling::{self, eval_word};
use crate::words::{GroupContext, Word};

/// Unitary inputs must satisfy `‖U*U − I‖_max` below this.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NcPolynomial {
    ctx: GroupContext,
    c: usize,
    terms: BTreeMap<Word, CMatrix>,
}

impl NcPolynomial {
    pub fn zero(ctx: &GroupContext, c: usize) -> Self {
        NcPolynomial {
            ctx: ctx.clone(),
            c,
            terms: BTreeMap::new(),
        }
    }

    /// `A·X(e)`.
    pub fn constant(ctx: &GroupContext, a: CMatrix) -> Result<Self> {
        Self::from_terms(ctx, a.rows(), [(Word::identity(), a)])
    }

    /// Sums the given terms; repeated words add up.
    pub fn from_terms(
        ctx: &GroupContext,
        c: usize,
        terms: impl IntoIterator<Item = (Word, CMatrix)>,
    ) -> Result<Self> {
        if c == 0 {
            return Err(Error::Dimension("coefficient size must be positive".into()));
        }
        let mut p = Self::zero(ctx, c);
        for (w, a) in terms {
            ctx.check_word(&w)?;
            if a.rows() != c || a.cols() != c {
                return Err(Error::Dimension(format!(
                    "coefficient of {w} is {}x{}, expected {c}x{c}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
            p.add_term(w, &a);
        }
        Ok(p)
    }

    fn add_term(&mut self, w: Word, a: &CMatrix) {
        match self.terms.get_mut(&w) {
            Some(acc) => *acc = &*acc + a,
            None => {
                self.terms.insert(w, a.clone());
            }
        }
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn terms(&self) -> &BTreeMap<Word, CMatrix> {
        &self.terms
    }

    /// `A_s`, zero off the support.
    pub fn coeff(&self, s: &Word) -> CMatrix {
        self.terms
            .get(s)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.c, self.c))
    }

    /// Longest word in the support; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// `A_{s⁻¹} = A_s*` within `tol`, absolute.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms
            .iter()
            .all(|(s, a)| self.coeff(&s.inverse()).max_abs_diff(&a.adjoint()) <= tol)
    }

    fn check_compatible(&self, other: &NcPolynomial) -> Result<()> {
        if self.ctx.m() != other.ctx.m() || self.c != other.c {
            return Err(Error::ContextMismatch(format!(
                "(m={}, c={}) vs (m={}, c={})",
                self.ctx.m(),
                self.c,
                other.ctx.m(),
                other.c
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &NcPolynomial) -> Result<NcPolynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, a) in &other.terms {
            out.add_term(w.clone(), a);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPolynomial) -> Result<NcPolynomial> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, r: f64) -> NcPolynomial {
        NcPolynomial {
            ctx: self.ctx.clone(),
            c: self.c,
            terms: self.terms.iter().map(|(w, a)| (w.clone(), a.scale(r))).collect(),
        }
    }

    /// Largest coefficient entry, in absolute value.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(CMatrix::norm_max).fold(0.0, f64::max)
    }
}

/// `p·q`: the coefficient of `x` is `Σ_{st = x} A_s B_t`.
pub fn nc_mul(p: &NcPolynomial, q: &NcPolynomial) -> Result<NcPolynomial> {
    p.check_compatible(q)?;
    let mut out = NcPolynomial::zero(&p.ctx, p.c);
    for (s, a) in &p.terms {
        for (t, b) in &q.terms {
            out.add_term(s.mul(t), &a.matmul(b));
        }
    }
    Ok(out)
}

/// `p*`: `A_s ↦ A_s*` at `s⁻¹`.
pub fn nc_adjoint(p: &NcPolynomial) -> NcPolynomial {
    NcPolynomial {
        ctx: p.ctx.clone(),
        c: p.c,
        terms: p.terms.iter().map(|(w, a)| (w.inverse(), a.adjoint())).collect(),
    }
}

/// `p(U) = Σ A_s ⊗ U(s)`.
pub fn eval_unitaries(p: &NcPolynomial, unitaries: &[CMatrix]) -> Result<CMatrix> {
    if unitaries.len() != p.ctx.m() {
        return Err(Error::Dimension(format!(
            "{} unitaries for m = {}",
            unitaries.len(),
            p.ctx.m()
        )));
    }
    let d = unitaries[0].rows();
    for (i, u) in unitaries.iter().enumerate() {
        if !u.is_square() || u.rows() != d {
            return Err(Error::Dimension(format!("U_{} is not {d}x{d}", i + 1)));
        }
        if !u.is_finite() {
            return Err(Error::NonFinite);
        }
        if u.adjoint_mul(u).max_abs_diff(&CMatrix::identity(d)) > UNITARY_TOL {
            return Err(Error::Invalid(format!("U_{} is not unitary", i + 1)));
        }
    }
    let mut out = CMatrix::zeros(p.c * d, p.c * d);
    for (s, a) in &p.terms {
        out = &out + &a.kron(&eval_word(unitaries, s));
    }
    Ok(out)
}

/// Smallest eigenvalue of `p(U)` seen over random unitary tuples.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub min_eigenvalue: f64,
    /// Trial index and unitary size where it occurred.
    pub trial: usize,
    pub dim: usize,
}

/// Evaluates `p` on `trials` seeded Haar-random tuples of sizes `1..=d_max`.
/// A clearly negative minimum disproves positivity; a nonnegative one is
/// evidence only.
pub fn sample_positivity(
    p: &NcPolynomial,
    trials: usize,
    d_max: usize,
    seed: u64,
) -> Result<SampleReport> {
    if d_max == 0 || trials == 0 {
        return Err(Error::Invalid("need at least one trial of size ≥ 1".into()));
    }
    let mut rng = sampling::seeded(seed);
    let mut report = SampleReport {
        min_eigenvalue: f64::INFINITY,
        trial: 0,
        dim: 0,
    };
    for trial in 0..trials {
        let dim = trial % d_max + 1;
        let us: Vec<CMatrix> = (0..p.ctx.m())
            .map(|_| sampling::haar_unitary(dim, &mut rng))
            .collect();
        let value = eval_unitaries(p, &us)?.hermitian_part();
        let min = linalg::eig_hermitian(&value)?.min();
        if min < report.min_eigenvalue {
            report = SampleReport {
                min_eigenvalue: min,
                trial,
                dim,
            };
        }
    }
    Ok(report)
}

/// `p = q*q` with `q(X) = Σ_{s ∈ S_d} B_s X(s)`, `B_s` of size `r×c`.
#[derive(Debug, Clone)]
pub struct SosCertificate {
    pub ctx: GroupContext,
    pub c: usize,
    /// `S_d`, in ⪯ order.
    pub index: Vec<Word>,
    /// PSD Gram matrix, `c×c` blocks indexed by `index`.
    pub gram: CMatrix,
    /// `B_s`, aligned with `index`.
    pub factors: Vec<CMatrix>,
    /// `max_x ‖A_x − Σ_{s⁻¹t = x} B_s*B_t‖_max`.
    pub residual: f64,
    pub iterations: usize,
}

impl SosCertificate {
    /// Number of rows of each `B_s`.
    pub fn rank(&self) -> usize {
        self.factors.first().map_or(0, CMatrix::rows)
    }

    /// `q*q` recomputed from the factors.
    pub fn square(&self) -> NcPolynomial {
        let mut out = NcPolynomial::zero(&self.ctx, self.c);
        for (s, bs) in self.index.iter().zip(&self.factors) {
            for (t, bt) in self.index.iter().zip(&self.factors) {
                out.add_term(s.left_div(t), &bs.adjoint_mul(bt));
            }
        }
        out
    }
}

/// Why a factorization attempt stopped without a certificate.
#[derive(Debug, Clone)]
pub struct InfeasibleReport {
    /// Frobenius distance between the last PSD and affine iterates.
    pub gap: f64,
    /// Coefficient residual of the last PSD iterate.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub enum SosOutcome {
    Certificate(SosCertificate),
    Infeasible(InfeasibleReport),
}

/// The affine constraints, with coefficients stored flat: group `x` owns
/// entries `x·c² .. (x+1)·c²` in row-major order.
struct Constraints {
    dim: usize,
    /// Flat coefficient slot of every Gram entry, row-major.
    slot: Vec<usize>,
    /// Number of Gram entries feeding each slot.
    count: Vec<f64>,
    targets: Vec<C64>,
}

impl Constraints {
    fn new(index: &[Word], p: &NcPolynomial) -> Self {
        let c = p.c;
        let n = index.len();
        let dim = n * c;
        let mut ids: BTreeMap<Word, usize> = BTreeMap::new();
        let mut slot = vec![0; dim * dim];
        let mut count = Vec::new();
        let mut targets = Vec::new();
        for (i, s) in index.iter().enumerate() {
            for (j, t) in index.iter().enumerate() {
                let x = s.left_div(t);
                let next = ids.len();
                let id = *ids.entry(x.clone()).or_insert(next);
                if id == next {
                    count.extend(std::iter::repeat_n(0.0, c * c));
                    targets.extend_from_slice(p.coeff(&x).as_slice());
                }
                for a in 0..c {
                    for b in 0..c {
                        let k = id * c * c + a * c + b;
                        slot[(i * c + a) * dim + j * c + b] = k;
                        count[k] += 1.0;
                    }
                }
            }
        }
        Constraints {
            dim,
            slot,
            count,
            targets,
        }
    }

    /// Coefficients of the Gram matrix `g`: block sums per group.
    fn sums(&self, g: &CMatrix) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); self.targets.len()];
        for (&k, &v) in self.slot.iter().zip(g.as_slice()) {
            acc[k] += v;
        }
        acc
    }

    /// The Gram-sized matrix whose entries are read from `coeffs`.
    fn expand(&self, coeffs: &[C64]) -> CMatrix {
        let data = self.slot.iter().map(|&k| coeffs[k]).collect();
        CMatrix::from_vec(self.dim, self.dim, data).expect("square")
    }

    /// Coefficient errors `(g)_x − A_x`.
    fn errors(&self, g: &CMatrix) -> Vec<C64> {
        let mut e = self.sums(g);
        for (x, a) in e.iter_mut().zip(&self.targets) {
            *x -= a;
        }
        e
    }

    fn residual(&self, g: &CMatrix) -> f64 {
        max_abs(&self.errors(g))
    }

    /// Orthogonal projection onto the affine set: spread each coefficient's
    /// error equally over its pairs.
    fn project(&self, g: &CMatrix) -> CMatrix {
        let shares: Vec<C64> = self
            .errors(g)
            .iter()
            .zip(&self.count)
            .map(|(e, &n)| -e / n)
            .collect();
        g + &self.expand(&shares)
    }
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sq_norm(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum()
}

/// Projection onto the PSD cone, warm-starting the eigensolver from the
/// previous basis.
fn project_psd(a: &CMatrix, basis: &mut Option<CMatrix>) -> Result<CMatrix> {
    let eig = match basis.as_ref() {
        Some(b) => linalg::eig_hermitian_from(a, b)?,
        None => linalg::eig_hermitian(a)?,
    };
    let out = eig.reconstruct(|x| x.max(0.0));
    *basis = Some(eig.vectors);
    Ok(out)
}

/// Real inner product `Re tr(a* b)`.
fn dot(a: &CMatrix, b: &CMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x.conj() * y).re)
        .sum()
}

const REFINE_STEPS: usize = 60;
const CG_STEPS: usize = 300;

/// Levenberg–Marquardt on a factor `W` of the Gram matrix, `G = W*W`, for
/// the residual `F(W)_x = Σ_{s⁻¹t = x} W_s*W_t − A_x`. Used to finish off
/// once the projections are close: with no strictly positive Gram matrix
/// they only converge sublinearly.
///
/// With `J` the Jacobian of `F`, `J(D) = sums(D*W + W*D)` and
/// `J*(R) = 2 W expand(R)`; the normal equations are solved inexactly by
/// conjugate gradients, never formed. The damping is `μ‖F‖`, which keeps
/// convergence fast when the solutions are not isolated (surplus rank, or
/// the unitary freedom `W → UW`).
fn refine(cons: &Constraints, start: &CMatrix, target: f64) -> Result<CMatrix> {
    let scale = max_abs(&cons.targets).max(1.0);
    let mut w = start.clone();
    let mut errs = cons.errors(&w.adjoint_mul(&w));
    let mut f = sq_norm(&errs);
    let mut mu = 1e-2;
    let mut stalled = 0;
    for _ in 0..REFINE_STEPS {
        if max_abs(&errs) <= target {
            break;
        }
        let norm_f = f.sqrt();
        let grad = w.matmul(&cons.expand(&errs)).scale(2.0);
        let forcing = (norm_f / scale).clamp(1e-10, 1e-2);
        let mut accepted = false;
        for _ in 0..40 {
            let lambda = mu * norm_f;
            let normal = |d: &CMatrix| {
                let jd = cons.sums(&(&d.adjoint_mul(&w) + &w.adjoint_mul(d)));
                &w.matmul(&cons.expand(&jd)).scale(2.0) + &d.scale(lambda)
            };
            // CG on (J*J + λ) d = −grad
            let mut d = CMatrix::zeros(w.rows(), w.cols());
            let mut r = grad.scale(-1.0);
            let mut dir = r.clone();
            let mut rr = dot(&r, &r);
            let stop = rr * forcing * forcing;
            for _ in 0..CG_STEPS {
                if rr <= stop {
                    break;
                }
                let ad = normal(&dir);
                let alpha = rr / dot(&dir, &ad);
                d = &d + &dir.scale(alpha);
                r = &r - &ad.scale(alpha);
                let rr_next = dot(&r, &r);
                dir = &r + &dir.scale(rr_next / rr);
                rr = rr_next;
            }
            let trial = &w + &d;
            let trial_errs = cons.errors(&trial.adjoint_mul(&trial));
            let trial_f = sq_norm(&trial_errs);
            // gain ratio against the linear model F + J d
            let jd = cons.sums(&(&d.adjoint_mul(&w) + &w.adjoint_mul(&d)));
            let model: Vec<C64> = errs.iter().zip(&jd).map(|(e, j)| e + j).collect();
            let predicted = f - sq_norm(&model);
            let rho = (f - trial_f) / predicted;
            if trial_f.is_finite() && predicted > 0.0 && rho > 1e-4 {
                if rho > 0.75 {
                    mu = (mu / 4.0).max(1e-8);
                } else if rho < 0.25 {
                    mu *= 4.0;
                }
                stalled = if trial_f > 0.5 * f { stalled + 1 } else { 0 };
                w = trial;
                errs = trial_errs;
                f = trial_f;
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        // slow progress here means the start was poor; let Dykstra go on
        if !accepted || stalled >= 5 {
            break;
        }
    }
    Ok(w)
}

/// Tries [`refine`] from factors of `x` truncated at several relative
/// eigenvalue cutoffs, lowest rank first. At the right rank convergence is
/// fast; surplus rows make the problem degenerate and convergence merely
/// linear, too few rows stall, and either way [`refine`] gives up early.
fn polish(cons: &Constraints, x: &CMatrix, goal: f64) -> Result<Option<CMatrix>> {
    let eig = linalg::eig_hermitian(x)?;
    let top = eig.max_abs();
    if top == 0.0 {
        return Ok(None);
    }
    let count = |cutoff: f64| eig.values.iter().filter(|&&v| v > cutoff * top).count();
    // every rank up to the dominant part of the spectrum, then the tail
    let mut ranks: Vec<usize> = (1..=count(1e-1)).collect();
    for cutoff in [1e-2, 1e-3, 1e-4, 1e-14] {
        let r = count(cutoff);
        if !ranks.contains(&r) {
            ranks.push(r);
        }
    }
    let full = linalg::factor_from_eigen(&eig, 0.0);
    for r in ranks {
        let w = full.row_range(0, r);
        let w = refine(cons, &w, goal * 1e-3)?;
        let g = w.adjoint_mul(&w);
        if cons.residual(&g) <= goal {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Dykstra iterations between two refinement attempts.
const REFINE_EVERY: usize = 100;

/// Searches for `p = q*q` with `deg q ≤ deg p`.
///
/// Runs Dykstra's alternating projections between the PSD cone and the
/// affine coefficient constraints. Once the PSD iterate is within `10⁻¹` of
/// the coefficients, a factor of it is periodically polished by [`refine`]. Stops with a certificate when the coefficient residual is at
/// most `tol / 10`; stops as infeasible when successive PSD iterates move by
/// less than `tol / 10`, or after `max_iter` iterations. An infeasible report
/// does not prove that `p` fails to be positive.
pub fn factor_sos(p: &NcPolynomial, tol: f64, max_iter: usize) -> Result<SosOutcome> {
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let scale = p.max_coeff().max(1.0);
    if !p.is_hermitian(1e-12 * scale) {
        return Err(Error::Invalid("polynomial is not Hermitian".into()));
    }
    let d = p.degree();
    let index = p.ctx.ball(d)?;
    let c = p.c;
    let n = index.len() * c;
    let cons = Constraints::new(&index, p);
    let goal = tol / 10.0;

    // the affine set needs no Dykstra correction, the cone does
    let mut x = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    let mut basis = None;
    let mut iterations = 0;
    let mut gap = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut next_refine = 0;
    let mut found = None;
    loop {
        let stalled = iterations > 0 && (iterations >= max_iter || residual <= goal);
        let due = residual <= 1e-1 * scale && iterations >= next_refine;
        if due || stalled {
            next_refine = iterations + REFINE_EVERY;
            if let Some(g) = polish(&cons, &x, goal)? {
                found = Some(g);
                break;
            }
        }
        if stalled {
            break;
        }
        iterations += 1;
        let y = cons.project(&x);
        let shifted = &y + &q;
        let next = project_psd(&shifted, &mut basis)?;
        q = &shifted - &next;
        gap = (&next - &y).norm_fro();
        let moved = (&next - &x).norm_fro();
        x = next;
        residual = cons.residual(&x);
        if moved <= goal && residual > goal {
            // converged to a pair of nearest points that do not meet
            iterations = iterations.max(max_iter);
        }
    }
    let Some(gram) = found else {
        return Ok(SosOutcome::Infeasible(InfeasibleReport {
            gap,
            residual,
            iterations,
        }));
    };
    let w = linalg::gram_factor(&gram, &Tolerance::uniform(1e-14)?)?;
    let factors: Vec<CMatrix> = (0..index.len()).map(|i| w.columns(i * c, c)).collect();
    let mut cert = SosCertificate {
        ctx: p.ctx.clone(),
        c,
        index,
        gram: w.adjoint_mul(&w),
        factors,
        residual: 0.0,
        iterations,
    };
    cert.residual = certificate_residual(&cert, p);
    Ok(SosOutcome::Certificate(cert))
}

/// `max_x ‖A_x − (q*q)_x‖_max` over the union of both supports.
pub fn certificate_residual(cert: &SosCertificate, p: &NcPolynomial) -> f64 {
    let sq = cert.square();
    sq.terms
        .keys()
        .chain(p.terms.keys())
        .map(|x| sq.coeff(x).max_abs_diff(&p.coeff(x)))
        .fold(0.0, f64::max)
}

/// Splits `q` into `c`-row slices `Q_j`, so that `p = Σ_j Q_j*Q_j`.
pub fn split_squares(cert: &SosCertificate) -> Vec<NcPolynomial> {
    let c = cert.c;
    let r = cert.rank();
    (0..r.div_ceil(c))
        .map(|j| {
            let rows = c.min(r - j * c);
            let terms = cert.index.iter().zip(&cert.factors).map(|(s, b)| {
                let mut block = CMatrix::zeros(c, c);
                block.set_block(0, 0, &b.row_range(j * c, rows));
                (s.clone(), block)
            });
            NcPolynomial::from_terms(&cert.ctx, c, terms).expect("well-formed slices")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_gaussian, seeded};

    fn w(x: &[i32]) -> Word {
        Word::new(x).unwrap()
    }

    fn s(x: f64) -> CMatrix {
        CMatrix::from_real(1, 1, &[x]).unwrap()
    }

    fn poly(ctx: &GroupContext, terms: &[(&[i32], f64)]) -> NcPolynomial {
        NcPolynomial::from_terms(ctx, 1, terms.iter().map(|(l, v)| (w(l), s(*v)))).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        let ctx = GroupContext::new(1).unwrap();
        let one_plus_x = poly(&ctx, &[(&[], 1.0), (&[1], 1.0)]);
        let sq = nc_mul(&nc_adjoint(&one_plus_x), &one_plus_x).unwrap();
        assert_eq!(sq, poly(&ctx, &[(&[], 2.0), (&[1], 1.0), (&[-1], 1.0)]));
        let unit = NcPolynomial::constant(&ctx, s(1.0)).unwrap();
        assert_eq!(nc_mul(&one_plus_x, &unit).unwrap(), one_plus_x);
        assert_eq!(nc_adjoint(&nc_adjoint(&one_plus_x)), one_plus_x);
        let other = NcPolynomial::zero(&GroupContext::new(2).unwrap(), 1);
        assert!(nc_mul(&one_plus_x, &other).is_err());
    }

    #[test]
    fn adjoint_reverses_products() {
        let ctx = GroupContext::new(2).unwrap();
        let mut rng = seeded(3);
        let rand_poly = |rng: &mut _| {
            let terms: Vec<_> = ctx.ball(1).unwrap().into_iter().map(|w| (w, complex_gaussian(2, 2, rng))).collect();
            NcPolynomial::from_terms(&ctx, 2, terms).unwrap()
        };
        let p = rand_poly(&mut rng);
        let q = rand_poly(&mut rng);
        let lhs = nc_adjoint(&nc_mul(&p, &q).unwrap());
        let rhs = nc_mul(&nc_adjoint(&q), &nc_adjoint(&p)).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_coeff() < 1e-14);
    }

    #[test]
    fn evaluation_examples() {
        let ctx = GroupContext::new(1).unwrap();
        let p = poly(&ctx, &[(&[], 2.0), (&[1], 1.0), (&[-1], 1.0)]);
        let v = eval_unitaries(&p, &[s(-1.0)]).unwrap();
        assert!(v[(0, 0)].norm() < 1e-15);
        let ctx2 = GroupContext::new(2).unwrap();
        let ident = NcPolynomial::constant(&ctx2, CMatrix::identity(2)).unwrap();
        let mut rng = seeded(1);
        let us = vec![sampling::haar_unitary(3, &mut rng), sampling::haar_unitary(3, &mut rng)];
        assert!(eval_unitaries(&ident, &us).unwrap().max_abs_diff(&CMatrix::identity(6)) < 1e-15);
        assert!(eval_unitaries(&p, &[s(2.0)]).is_err());

        // a Hermitian polynomial evaluates to a Hermitian matrix
        let a = complex_gaussian(2, 2, &mut rng);
        let b = complex_gaussian(2, 2, &mut rng);
        let h = NcPolynomial::from_terms(
            &ctx2,
            2,
            [
                (Word::identity(), b.hermitian_part()),
                (w(&[1, -2]), a.clone()),
                (w(&[2, -1]), a.adjoint()),
            ],
        )
        .unwrap();
        assert!(h.is_hermitian(0.0));
        assert!(eval_unitaries(&h, &us).unwrap().hermitian_asymmetry() < 1e-10);
    }

    #[test]
    fn sampling_examples() {
        let ctx = GroupContext::new(1).unwrap();
        let pos = poly(&ctx, &[(&[], 2.0), (&[1], 1.0), (&[-1], 1.0)]);
        assert!(sample_positivity(&pos, 200, 4, 0).unwrap().min_eigenvalue >= -1e-10);
        let neg = poly(&ctx, &[(&[1], 1.0), (&[-1], 1.0)]);
        assert!(sample_positivity(&neg, 50, 4, 0).unwrap().min_eigenvalue < -1.0);
        let one = NcPolynomial::constant(&ctx, s(1.0)).unwrap();
        assert!((sample_positivity(&one, 10, 3, 0).unwrap().min_eigenvalue - 1.0).abs() < 1e-14);
    }

    #[test]
    fn factor_hand_example() {
        let ctx = GroupContext::new(1).unwrap();
        let p = poly(&ctx, &[(&[], 2.0), (&[1], 1.0), (&[-1], 1.0)]);
        let SosOutcome::Certificate(cert) = factor_sos(&p, 1e-8, 20_000).unwrap() else {
            panic!("no certificate");
        };
        assert!(cert.residual <= 1e-8, "{}", cert.residual);
        assert!(cert.index.iter().all(|s| s.len() <= 1));
        let squares = split_squares(&cert);
        let mut total = NcPolynomial::zero(&ctx, 1);
        for q in &squares {
            total = total.add(&nc_mul(&nc_adjoint(q), q).unwrap()).unwrap();
        }
        assert!(total.sub(&p).unwrap().max_coeff() <= 1e-8);
    }

    #[test]
    fn indefinite_polynomial_is_reported() {
        let ctx = GroupContext::new(1).unwrap();
        let p = poly(&ctx, &[(&[1], 1.0), (&[-1], 1.0)]);
        match factor_sos(&p, 1e-8, 20_000).unwrap() {
            SosOutcome::Infeasible(r) => assert!(r.gap > 1e-3, "{r:?}"),
            SosOutcome::Certificate(c) => panic!("certificate with residual {}", c.residual),
        }
        let not_hermitian = poly(&ctx, &[(&[1], 1.0)]);
        assert!(factor_sos(&not_hermitian, 1e-8, 10).is_err());
    }

    #[test]
    fn planted_square_block() {
        let ctx = GroupContext::new(2).unwrap();
        let mut rng = seeded(12);
        let terms: Vec<_> = ctx.ball(1).unwrap().into_iter().map(|w| (w, complex_gaussian(2, 2, &mut rng))).collect();
        let q0 = NcPolynomial::from_terms(&ctx, 2, terms).unwrap();
        let p = nc_mul(&nc_adjoint(&q0), &q0).unwrap();
        let SosOutcome::Certificate(cert) = factor_sos(&p, 1e-6, 20_000).unwrap() else {
            panic!("no certificate");
        };
        assert!(cert.residual <= 1e-6);
        assert!(cert.rank() <= cert.index.len() * 2);
    }
}
