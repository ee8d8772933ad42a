//! Partially defined positive definite functions and their Gram matrices.
//!
//! A [`PdFunction`] stores one `k×k` block per class `{s, s⁻¹}` of its domain,
//! keyed by the ⪯-smaller word; the value at `s⁻¹` is always the adjoint of
//! the stored one. Values are normalized so that `Φ(e) = I_k`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Tolerance};
use crate::words::{ClassCursor, GroupContext, Word};

/// Relative slack when checking that supplied values for `s` and `s⁻¹` agree.
const ADJOINT_TOL: f64 = 1e-12;

/// Where a [`PdFunction`] is defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// `S_n`, all words of length at most `n`.
    Ball(usize),
    /// `Σ_ν`, the union of all classes ⪯ `ν`; holds the representative of `ν`.
    OrderIdeal(Word),
}

impl Domain {
    fn last_class(&self, ctx: &GroupContext) -> ClassCursor {
        match self {
            Domain::Ball(n) => ClassCursor::last_of_length(ctx, *n),
            Domain::OrderIdeal(rep) => ClassCursor::of(ctx, rep),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PdFunction {
    ctx: GroupContext,
    k: usize,
    domain: Domain,
    values: BTreeMap<Word, CMatrix>,
}

impl PdFunction {
    /// Builds a function by evaluating `f` on the representative of every class
    /// in `domain`. A non-identity `f(e)` is normalized away.
    pub fn from_fn(
        ctx: &GroupContext,
        k: usize,
        domain: Domain,
        mut f: impl FnMut(&Word) -> CMatrix,
    ) -> Result<Self> {
        let last = domain.last_class(ctx);
        let mut values = BTreeMap::new();
        let mut cur = ClassCursor::identity(ctx);
        loop {
            let v = f(cur.rep());
            check_block(&v, k, cur.rep())?;
            values.insert(cur.rep().clone(), v);
            if cur == last {
                break;
            }
            cur = cur.successor();
        }
        let mut phi = PdFunction {
            ctx: ctx.clone(),
            k,
            domain: canonical_domain(ctx, &last),
            values,
        };
        phi.check_hermitian_identity()?;
        phi.normalize()?;
        Ok(phi)
    }

    /// Builds a function from explicit `(word, value)` pairs. Either word of a
    /// class may be given; if both are, they must be adjoint to each other.
    pub fn from_entries(
        ctx: &GroupContext,
        k: usize,
        domain: Domain,
        entries: impl IntoIterator<Item = (Word, CMatrix)>,
    ) -> Result<Self> {
        let mut values: BTreeMap<Word, CMatrix> = BTreeMap::new();
        for (w, v) in entries {
            ctx.check_word(&w)?;
            check_block(&v, k, &w)?;
            let rep = ctx.class_rep(&w);
            let v = if rep == w { v } else { v.adjoint() };
            if let Some(prev) = values.get(&rep) {
                let scale = prev.norm_max().max(1.0);
                if prev.max_abs_diff(&v) > ADJOINT_TOL * scale {
                    return Err(Error::Invalid(format!(
                        "values given for {rep} and {} are not adjoint",
                        rep.inverse()
                    )));
                }
                continue;
            }
            values.insert(rep, v);
        }
        let last = domain.last_class(ctx);
        let mut cur = ClassCursor::identity(ctx);
        loop {
            if !values.contains_key(cur.rep()) {
                return Err(Error::MissingValue {
                    word: cur.rep().clone(),
                    left: Word::identity(),
                    right: cur.rep().clone(),
                });
            }
            if cur == last {
                break;
            }
            cur = cur.successor();
        }
        values.retain(|w, _| last.covers(w));
        let mut phi = PdFunction {
            ctx: ctx.clone(),
            k,
            domain: canonical_domain(ctx, &last),
            values,
        };
        phi.check_hermitian_identity()?;
        phi.normalize()?;
        Ok(phi)
    }

    fn check_hermitian_identity(&self) -> Result<()> {
        let e = &self.values[&Word::identity()];
        let asym = e.hermitian_asymmetry();
        if asym > ADJOINT_TOL {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(())
    }

    /// Replaces `Φ` by `P^{-1/2} Φ P^{-1/2}` with `P = Φ(e)`.
    fn normalize(&mut self) -> Result<()> {
        let e = Word::identity();
        let p = self.values[&e].hermitian_part();
        let ident = CMatrix::identity(self.k);
        if p == ident {
            self.values.insert(e, ident);
            return Ok(());
        }
        let eig = linalg::eig_hermitian(&p)?;
        let scale = eig.max_abs();
        if eig.min() <= 1e-12 * scale.max(1.0) {
            return Err(Error::SingularNormalization);
        }
        let inv_sqrt = eig.reconstruct(|x| 1.0 / x.sqrt());
        for v in self.values.values_mut() {
            *v = inv_sqrt.matmul(v).matmul(&inv_sqrt);
        }
        self.values.insert(e, ident);
        Ok(())
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Last class of the domain.
    pub fn last_class(&self) -> ClassCursor {
        self.domain.last_class(&self.ctx)
    }

    /// Largest `n` with `S_n` inside the domain.
    pub fn radius(&self) -> usize {
        match &self.domain {
            Domain::Ball(n) => *n,
            Domain::OrderIdeal(rep) => rep.len() - 1,
        }
    }

    pub fn contains(&self, s: &Word) -> bool {
        self.last_class().covers(s)
    }

    /// `Φ(s)`, or `None` outside the domain.
    pub fn value(&self, s: &Word) -> Option<CMatrix> {
        if let Some(v) = self.values.get(s) {
            return Some(v.clone());
        }
        self.values.get(&s.inverse()).map(CMatrix::adjoint)
    }

    /// Stored `(representative, value)` pairs, in ⪯ order of the representatives.
    pub fn class_values(&self) -> Vec<(&Word, &CMatrix)> {
        let mut out: Vec<_> = self.values.iter().collect();
        out.sort_by(|a, b| self.ctx.lex_cmp(a.0, b.0));
        out
    }

    pub(crate) fn insert_class(&mut self, nu: &ClassCursor, value: CMatrix) {
        self.values.insert(nu.rep().clone(), value);
        self.domain = canonical_domain(&self.ctx, nu);
    }

    /// Restriction to `S_n`; `n` must not exceed the radius.
    pub fn restrict_to_ball(&self, n: usize) -> Result<PdFunction> {
        if n > self.radius() {
            return Err(Error::DomainTooSmall(format!(
                "cannot restrict radius {} to {n}",
                self.radius()
            )));
        }
        let values = self
            .values
            .iter()
            .filter(|(w, _)| w.len() <= n)
            .map(|(w, v)| (w.clone(), v.clone()))
            .collect();
        Ok(PdFunction {
            ctx: self.ctx.clone(),
            k: self.k,
            domain: Domain::Ball(n),
            values,
        })
    }

    /// The same function viewed under another letter order. Only ball
    /// domains are order independent.
    pub fn with_context(&self, ctx: &GroupContext) -> Result<PdFunction> {
        if ctx.m() != self.ctx.m() {
            return Err(Error::ContextMismatch(format!(
                "m={} vs m={}",
                ctx.m(),
                self.ctx.m()
            )));
        }
        let Domain::Ball(n) = self.domain else {
            return Err(Error::Invalid(
                "order-ideal domains depend on the letter order".into(),
            ));
        };
        let values = self
            .values
            .iter()
            .map(|(w, v)| {
                let rep = ctx.class_rep(w);
                if &rep == w {
                    (rep, v.clone())
                } else {
                    (rep, v.adjoint())
                }
            })
            .collect();
        Ok(PdFunction {
            ctx: ctx.clone(),
            k: self.k,
            domain: Domain::Ball(n),
            values,
        })
    }

    /// Largest entrywise difference over the common ball.
    pub fn max_diff(&self, other: &PdFunction) -> Result<f64> {
        let n = self.radius().min(other.radius());
        let mut worst: f64 = 0.0;
        for s in self.ctx.ball(n)? {
            let a = self.value(&s).expect("inside ball");
            let b = other.value(&s).expect("inside ball");
            worst = worst.max(a.max_abs_diff(&b));
        }
        Ok(worst)
    }
}

fn canonical_domain(ctx: &GroupContext, last: &ClassCursor) -> Domain {
    if last.is_identity() || last.is_last_of_length() {
        Domain::Ball(last.len())
    } else {
        Domain::OrderIdeal(ctx.class_rep(last.rep()))
    }
}

fn check_block(v: &CMatrix, k: usize, w: &Word) -> Result<()> {
    if v.rows() != k || v.cols() != k {
        return Err(Error::Dimension(format!(
            "value at {w} is {}x{}, expected {k}x{k}",
            v.rows(),
            v.cols()
        )));
    }
    if !v.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// `A(Φ; S) = [Φ(s⁻¹t)]_{s,t ∈ S}`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub index: Vec<Word>,
    pub k: usize,
    pub matrix: CMatrix,
}

impl GramMatrix {
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        self.matrix.block(i, j, self.k)
    }
}

pub fn gram(phi: &PdFunction, set: &[Word]) -> Result<GramMatrix> {
    let k = phi.k;
    let n = set.len();
    let mut matrix = CMatrix::zeros(n * k, n * k);
    for (i, s) in set.iter().enumerate() {
        for (j, t) in set.iter().enumerate().skip(i) {
            let x = s.left_div(t);
            let v = phi.value(&x).ok_or_else(|| Error::MissingValue {
                word: x.clone(),
                left: s.clone(),
                right: t.clone(),
            })?;
            matrix.set_block(i * k, j * k, &v);
            if i != j {
                matrix.set_block(j * k, i * k, &v.adjoint());
            }
        }
    }
    Ok(GramMatrix {
        index: set.to_vec(),
        k,
        matrix,
    })
}

/// Outcome of a positivity check: the worst Gram matrix seen.
#[derive(Debug, Clone)]
pub struct PdReport {
    pub is_pd: bool,
    pub min_eigenvalue: f64,
    /// Index set of the Gram matrix with the smallest eigenvalue.
    pub witness: Vec<Word>,
}

/// Index sets whose Gram matrices decide positivity on `S_n`: `B(e, n/2)` for
/// even `n`, and `B(e, k) ∪ B(a_i, k)` for each generator when `n = 2k + 1`.
pub fn verification_sets(ctx: &GroupContext, n: usize) -> Result<Vec<Vec<Word>>> {
    let half = n / 2;
    let center = ctx.ball(half)?;
    if n % 2 == 0 {
        return Ok(vec![center]);
    }
    let mut sets = Vec::with_capacity(ctx.m());
    for i in 1..=ctx.m() as i32 {
        let a = Word::letter(i);
        let mut set = center.clone();
        for w in &center {
            let t = a.mul(w);
            if t.len() > half {
                set.push(t);
            }
        }
        sets.push(set);
    }
    Ok(sets)
}

/// Positivity of `Φ` on its largest ball, through [`verification_sets`].
pub fn verify_pd(phi: &PdFunction, tol: &Tolerance) -> Result<PdReport> {
    let sets = verification_sets(&phi.ctx, phi.radius())?;
    verify_pd_on(phi, &sets, tol)
}

/// Positivity of every `A(Φ; S)` for user-supplied index sets.
pub fn verify_pd_on(phi: &PdFunction, sets: &[Vec<Word>], tol: &Tolerance) -> Result<PdReport> {
    if sets.is_empty() {
        return Err(Error::Invalid("no index sets to check".into()));
    }
    let mut report = PdReport {
        is_pd: true,
        min_eigenvalue: f64::INFINITY,
        witness: Vec::new(),
    };
    for set in sets {
        let g = gram(phi, set).map_err(|e| match e {
            Error::MissingValue { word, .. } => Error::DomainTooSmall(format!(
                "Gram set needs {word}, outside the domain of radius {}",
                phi.radius()
            )),
            other => other,
        })?;
        let eig = linalg::eig_hermitian(&g.matrix)?;
        let floor = -tol.psd_eps * eig.max_abs().max(1.0);
        if eig.min() < report.min_eigenvalue {
            report.min_eigenvalue = eig.min();
            report.witness = set.clone();
        }
        if eig.min() < floor {
            report.is_pd = false;
        }
    }
    Ok(report)
}

/// The Toeplitz matrix `[Φ(s⁻¹t)]` over `S_n`; needs `Φ` on `S_{2n}`.
pub fn toeplitz_of(phi: &PdFunction, n: usize) -> Result<GramMatrix> {
    if 2 * n > phi.radius() {
        return Err(Error::DomainTooSmall(format!(
            "Toeplitz matrix over S_{n} needs radius {}, have {}",
            2 * n,
            phi.radius()
        )));
    }
    gram(phi, &phi.ctx.ball(n)?)
}

/// Reads `Φ` on `S_{2n}` off a PSD Toeplitz matrix indexed by `S_n`.
pub fn function_of_toeplitz(
    ctx: &GroupContext,
    m: &GramMatrix,
    tol: &Tolerance,
) -> Result<PdFunction> {
    let k = m.k;
    if k == 0 || m.matrix.rows() != m.index.len() * k || !m.matrix.is_square() {
        return Err(Error::Dimension("Toeplitz matrix shape".into()));
    }
    let n = m.index.iter().map(Word::len).max().unwrap_or(0);
    let mut expected = ctx.ball(n)?;
    let mut got = m.index.clone();
    expected.sort();
    got.sort();
    if expected != got {
        return Err(Error::Invalid(format!("index set is not the ball S_{n}")));
    }

    let scale = m.matrix.norm_max().max(1.0);
    let mut first: BTreeMap<Word, (usize, usize, CMatrix)> = BTreeMap::new();
    for (i, s) in m.index.iter().enumerate() {
        for (j, t) in m.index.iter().enumerate() {
            let x = s.left_div(t);
            let block = m.block(i, j);
            let (rep, value) = if ctx.is_class_rep(&x) {
                (x, block)
            } else {
                (x.inverse(), block.adjoint())
            };
            match first.get(&rep) {
                Some((i0, j0, v0)) => {
                    if v0.max_abs_diff(&value) > ADJOINT_TOL * scale {
                        return Err(Error::NotToeplitz {
                            s1: m.index[*i0].clone(),
                            t1: m.index[*j0].clone(),
                            s2: s.clone(),
                            t2: t.clone(),
                        });
                    }
                }
                None => {
                    first.insert(rep, (i, j, value));
                }
            }
        }
    }
    let (ok, min_eig) = linalg::psd_margin(&m.matrix.hermitian_part(), tol)?;
    if !ok {
        return Err(Error::NotPsd {
            min_eigenvalue: min_eig,
        });
    }
    PdFunction::from_entries(
        ctx,
        k,
        Domain::Ball(2 * n),
        first.into_iter().map(|(w, (_, _, v))| (w, v)),
    )
}

/// Vectors `ω_s` with `ω_s* ω_t = Φ(s⁻¹t)` for `s, t ∈ S_n`.
#[derive(Debug, Clone)]
pub struct KolmogorovData {
    pub index: Vec<Word>,
    /// One `r×k` block per index word.
    pub vectors: Vec<CMatrix>,
}

impl KolmogorovData {
    pub fn vector(&self, s: &Word) -> Option<&CMatrix> {
        self.index.iter().position(|w| w == s).map(|i| &self.vectors[i])
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, CMatrix::rows)
    }
}

/// Finite Kolmogorov decomposition of `Φ` over `S_n`, `n = radius / 2`.
pub fn kolmogorov(phi: &PdFunction, tol: &Tolerance) -> Result<KolmogorovData> {
    let n = phi.radius() / 2;
    let t = toeplitz_of(phi, n)?;
    let w = linalg::gram_factor(&t.matrix, tol)?;
    let k = phi.k;
    let vectors = (0..t.index.len()).map(|i| w.columns(i * k, k)).collect();
    Ok(KolmogorovData {
        index: t.index,
        vectors,
    })
}

/// Replaces `Φ(s)` by the mean of `Φ` over all words of length `|s|`.
pub fn radialize(phi: &PdFunction) -> Result<PdFunction> {
    let n = phi.radius();
    let k = phi.k;
    let mut means = Vec::with_capacity(n + 1);
    for len in 0..=n {
        // mean as first value plus mean deviation: exact on constant spheres
        let sphere = phi.ctx.sphere(len);
        let base = phi.value(&sphere[0]).expect("inside ball");
        let mut acc = CMatrix::zeros(k, k);
        for s in &sphere[1..] {
            acc = &acc + &(&phi.value(s).expect("inside ball") - &base);
        }
        means.push(&base + &acc.scale(1.0 / sphere.len() as f64));
    }
    PdFunction::from_fn(&phi.ctx, k, Domain::Ball(n), |s| means[s.len()].clone())
}
