//! Step-by-step extension of positive definite functions over the class order.
//!
//! A function known on `Σ_{ν⁻}` is extended to `Σ_ν` by completing the Gram
//! matrix over `C_ν`, whose only unknown entry is `Φ(s_ν)`. Each step is
//! parametrized by a contraction between the two defect spaces; choosing zero
//! everywhere gives the central extension.

use std::collections::BTreeMap;

use crate::cayley::{clique_c, sigma_set};
use crate::completion::{self, ContractionParam, DefectData, PartialBlockMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Tolerance};
use crate::pdfun::{self, PdFunction};
use crate::sampling;
use crate::words::{ClassCursor, GroupContext, Word, DEFAULT_BALL_CAP};

/// Oracle contractions up to this norm are scaled back to the unit sphere.
pub const RENORMALIZE_SLACK: f64 = 1e-9;

/// Chooses the contraction used at each extension step.
pub trait ParamOracle {
    fn gamma(&mut self, nu: &ClassCursor, defects: &DefectData) -> Result<ContractionParam>;
}

impl<F> ParamOracle for F
where
    F: FnMut(&ClassCursor, &DefectData) -> Result<ContractionParam>,
{
    fn gamma(&mut self, nu: &ClassCursor, defects: &DefectData) -> Result<ContractionParam> {
        self(nu, defects)
    }
}

/// Always zero: the central extension.
#[derive(Debug, Clone, Copy, Default)]
pub struct CentralOracle;

impl ParamOracle for CentralOracle {
    fn gamma(&mut self, _: &ClassCursor, defects: &DefectData) -> Result<ContractionParam> {
        Ok(ContractionParam::zero_for(defects))
    }
}

/// Seeded random contractions with norm at most `radius`, see
/// [`sampling::random_contraction`].
#[derive(Debug, Clone)]
pub struct RandomOracle {
    rng: sampling::SeededRng,
    radius: f64,
}

impl RandomOracle {
    pub fn new(seed: u64, radius: f64) -> Self {
        RandomOracle {
            rng: sampling::seeded(seed),
            radius,
        }
    }
}

impl ParamOracle for RandomOracle {
    fn gamma(&mut self, _: &ClassCursor, defects: &DefectData) -> Result<ContractionParam> {
        let (dk, dl) = defects.dims();
        Ok(ContractionParam(sampling::random_contraction(
            dk,
            dl,
            self.radius,
            &mut self.rng,
        )))
    }
}

/// Explicit parameters keyed by class representative.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSequence {
    params: BTreeMap<Word, ContractionParam>,
}

impl ParamSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, rep: Word, gamma: ContractionParam) {
        self.params.insert(rep, gamma);
    }

    pub fn get(&self, rep: &Word) -> Option<&ContractionParam> {
        self.params.get(rep)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &ContractionParam)> {
        self.params.iter()
    }

    /// Entries sorted by the class order of `ctx`.
    pub fn ordered(&self, ctx: &GroupContext) -> Vec<(&Word, &ContractionParam)> {
        let mut out: Vec<_> = self.params.iter().collect();
        out.sort_by(|a, b| ctx.lex_cmp(a.0, b.0));
        out
    }

    fn lookup(&self, nu: &ClassCursor) -> Result<ContractionParam> {
        self.params.get(nu.rep()).cloned().ok_or_else(|| {
            Error::Invalid(format!("no parameter given for class {}", nu.rep()))
        })
    }

    /// Largest entrywise difference; `None` unless both sequences cover the
    /// same classes with the same shapes.
    pub fn max_diff(&self, other: &ParamSequence) -> Option<f64> {
        if self.params.len() != other.params.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (w, g) in &self.params {
            let h = other.params.get(w)?;
            if g.0.rows() != h.0.rows() || g.0.cols() != h.0.cols() {
                return None;
            }
            worst = worst.max(g.0.max_abs_diff(&h.0));
        }
        Some(worst)
    }
}

impl FromIterator<(Word, ContractionParam)> for ParamSequence {
    fn from_iter<I: IntoIterator<Item = (Word, ContractionParam)>>(iter: I) -> Self {
        ParamSequence {
            params: iter.into_iter().collect(),
        }
    }
}

impl ParamOracle for ParamSequence {
    fn gamma(&mut self, nu: &ClassCursor, _: &DefectData) -> Result<ContractionParam> {
        self.lookup(nu)
    }
}

impl ParamOracle for &ParamSequence {
    fn gamma(&mut self, nu: &ClassCursor, _: &DefectData) -> Result<ContractionParam> {
        self.lookup(nu)
    }
}

/// One extension step, recorded for audit and replay.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// Representative `s_ν` of the new class.
    pub class: Word,
    /// `C_ν`, in ⪯ order.
    pub clique: Vec<Word>,
    pub central_entry: CMatrix,
    pub gamma: ContractionParam,
    /// The new value `Φ(s_ν)`.
    pub value: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtensionTrace {
    pub steps: Vec<TraceStep>,
}

impl ExtensionTrace {
    pub fn params(&self) -> ParamSequence {
        self.steps
            .iter()
            .map(|s| (s.class.clone(), s.gamma.clone()))
            .collect()
    }
}

/// The partial Gram matrix over `C_ν` with the `(e, s_ν)` entry unknown.
fn clique_problem(phi: &PdFunction, nu: &ClassCursor) -> Result<(Vec<Word>, PartialBlockMatrix)> {
    let clique = clique_c(nu)?;
    let k = phi.k();
    let p = clique.len();
    let s_nu = nu.rep();
    let mut m = CMatrix::zeros(p * k, p * k);
    for (i, s) in clique.iter().enumerate() {
        for (j, t) in clique.iter().enumerate().skip(i) {
            if s.is_identity() && t == s_nu {
                continue;
            }
            let x = s.left_div(t);
            let v = phi.value(&x).ok_or_else(|| Error::MissingValue {
                word: x.clone(),
                left: s.clone(),
                right: t.clone(),
            })?;
            m.set_block(i * k, j * k, &v);
            if i != j {
                m.set_block(j * k, i * k, &v.adjoint());
            }
        }
    }
    let ie = clique.iter().position(Word::is_identity).expect("e ∈ C_ν");
    let is = clique.iter().position(|w| w == s_nu).expect("s_ν ∈ C_ν");
    let partial = PartialBlockMatrix::new(m, k, ie, is)?;
    Ok((clique, partial))
}

/// Scales `γ` back onto the unit ball when it overshoots by at most
/// [`RENORMALIZE_SLACK`].
fn admissible(gamma: ContractionParam) -> Result<ContractionParam> {
    if gamma.0.rows() == 0 || gamma.0.cols() == 0 {
        return Ok(gamma);
    }
    if !gamma.0.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = gamma.norm()?;
    if norm <= 1.0 {
        Ok(gamma)
    } else if norm <= 1.0 + RENORMALIZE_SLACK {
        Ok(ContractionParam(gamma.0.scale(1.0 / norm)))
    } else {
        Err(Error::NotContraction { norm })
    }
}

fn step(
    phi: &mut PdFunction,
    nu: &ClassCursor,
    oracle: &mut dyn ParamOracle,
    tol: &Tolerance,
) -> Result<TraceStep> {
    let (clique, partial) = clique_problem(phi, nu)?;
    let defects = completion::analyze(&partial, tol)?;
    let gamma = admissible(oracle.gamma(nu, &defects)?)?;
    defects.check_shape(&gamma)?;
    let value = defects.entry_for(&gamma)?;
    phi.insert_class(nu, value.clone());
    Ok(TraceStep {
        class: nu.rep().clone(),
        clique,
        central_entry: defects.central_entry,
        gamma,
        value,
    })
}

fn check_context(phi: &PdFunction, nu: &ClassCursor) -> Result<()> {
    if phi.ctx() != nu.ctx() {
        return Err(Error::ContextMismatch(
            "class cursor and function use different letter orders".into(),
        ));
    }
    Ok(())
}

/// Extends `phi` from `Σ_{ν⁻}` to `Σ_ν` with the contraction `gamma`.
pub fn extend_one(
    phi: &PdFunction,
    nu: &ClassCursor,
    gamma: &ContractionParam,
    tol: &Tolerance,
) -> Result<PdFunction> {
    check_context(phi, nu)?;
    if phi.last_class().successor() != *nu {
        return Err(Error::Invalid(format!(
            "function is not defined exactly up to the predecessor of {}",
            nu.rep()
        )));
    }
    let mut out = phi.clone();
    let mut fixed = |_: &ClassCursor, _: &DefectData| Ok(gamma.clone());
    step(&mut out, nu, &mut fixed, tol)?;
    Ok(out)
}

/// Extends `phi` from its current domain to `S_n`, asking `oracle` for the
/// contraction at every new class.
pub fn extend_to_ball(
    phi: &PdFunction,
    n: usize,
    oracle: &mut dyn ParamOracle,
    tol: &Tolerance,
) -> Result<(PdFunction, ExtensionTrace)> {
    let ctx = phi.ctx().clone();
    let target = ClassCursor::last_of_length(&ctx, n);
    let start = phi.last_class();
    if start.cmp_class(&target).is_gt() {
        return Err(Error::Invalid(format!(
            "target radius {n} is inside the current domain"
        )));
    }
    let size = ctx.ball_size(n);
    if size > DEFAULT_BALL_CAP {
        return Err(Error::SizeCap {
            radius: n,
            size,
            cap: DEFAULT_BALL_CAP,
        });
    }
    let report = pdfun::verify_pd(phi, tol)?;
    if !report.is_pd {
        return Err(Error::NotPsd {
            min_eigenvalue: report.min_eigenvalue,
        });
    }

    let mut out = phi.clone();
    let mut trace = ExtensionTrace::default();
    let mut nu = start;
    while nu != target {
        nu = nu.successor();
        trace.steps.push(step(&mut out, &nu, oracle, tol)?);
    }
    Ok((out, trace))
}

/// Re-runs a recorded extension and checks that every step agrees bit for bit.
pub fn replay(phi: &PdFunction, trace: &ExtensionTrace, tol: &Tolerance) -> Result<PdFunction> {
    let mut out = phi.clone();
    let mut nu = phi.last_class();
    for recorded in &trace.steps {
        nu = nu.successor();
        if nu.rep() != &recorded.class {
            return Err(Error::ReplayMismatch(recorded.class.clone()));
        }
        let mut fixed = |_: &ClassCursor, _: &DefectData| Ok(recorded.gamma.clone());
        let got = step(&mut out, &nu, &mut fixed, tol)?;
        if &got != recorded {
            return Err(Error::ReplayMismatch(recorded.class.clone()));
        }
    }
    Ok(out)
}

/// The contractions that produce `phi` from its restriction to `S_n`.
pub fn extract_params(phi: &PdFunction, n: usize, tol: &Tolerance) -> Result<ParamSequence> {
    let ctx = phi.ctx();
    if n > phi.radius() {
        return Err(Error::DomainTooSmall(format!(
            "base radius {n} exceeds the domain radius {}",
            phi.radius()
        )));
    }
    let last = phi.last_class();
    let mut nu = ClassCursor::last_of_length(ctx, n);
    let mut params = ParamSequence::new();
    while nu != last {
        nu = nu.successor();
        // hide Φ(s_ν) by restricting to Σ_{ν⁻}
        let (_, partial) = clique_problem(phi, &nu)?;
        let defects = completion::analyze(&partial, tol)?;
        let value = phi.value(nu.rep()).expect("inside domain");
        let gamma = completion::extract_gamma_with(&partial, &defects, &value, tol)?;
        params.insert(nu.rep().clone(), gamma);
    }
    Ok(params)
}

/// Result of a maximal-orthogonality check.
#[derive(Debug, Clone)]
pub struct OrthoReport {
    pub holds: bool,
    /// Largest `‖⟨ρ_e, ρ_t⟩‖` over the checked classes.
    pub worst_violation: f64,
    /// Representative `t` where it occurs.
    pub worst_class: Option<Word>,
}

/// Checks that for every `t` with `|t| = n + 1` the residuals of `ω_e` and
/// `ω_t` after projecting onto `span{ω_r : r ∈ Σ(e, t)}` are orthogonal.
pub fn check_max_orthogonal(phi: &PdFunction, n: usize, tol: f64) -> Result<OrthoReport> {
    if phi.radius() < n + 1 {
        return Err(Error::DomainTooSmall(format!(
            "level {} needs radius {}, have {}",
            n + 1,
            n + 1,
            phi.radius()
        )));
    }
    let ctx = phi.ctx();
    let k = phi.k();
    let lin_tol = Tolerance::default();
    let e = Word::identity();
    let mut report = OrthoReport {
        holds: true,
        worst_violation: 0.0,
        worst_class: None,
    };
    for t in ctx.sphere(n + 1) {
        if !ctx.is_class_rep(&t) {
            continue;
        }
        let sigma = sigma_set(ctx, &e, &t, n)?;
        let mut index = sigma.clone();
        index.push(e.clone());
        index.push(t.clone());
        let g = pdfun::gram(phi, &index)?;
        let w = linalg::gram_factor(&g.matrix, &lin_tol)?;
        let p = sigma.len();
        let omega_e = w.columns(p * k, k);
        let omega_t = w.columns((p + 1) * k, k);
        let (res_e, res_t) = if p == 0 {
            (omega_e, omega_t)
        } else {
            let span = w.columns(0, p * k);
            let proj = span.matmul(&linalg::pinv(&span, &lin_tol)?);
            (&omega_e - &proj.matmul(&omega_e), &omega_t - &proj.matmul(&omega_t))
        };
        let violation = res_e.adjoint_mul(&res_t).norm_op()?;
        if violation > report.worst_violation || report.worst_class.is_none() {
            report.worst_violation = violation;
            report.worst_class = Some(t.clone());
        }
    }
    report.holds = report.worst_violation <= tol;
    Ok(report)
}
