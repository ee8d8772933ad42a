//! Quasi-multiplicative functions: `Φ(st) = Φ(s)Φ(t)` whenever `|st| = |s| + |t|`.
//!
//! Such a function is fixed by its values on the generators. With contractive
//! generator values it is positive definite, and it is the central extension
//! of its restriction to `S_1`.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pdfun::{Domain, PdFunction};
use crate::words::{GroupContext, Word};

/// Values `Φ(a_i)` for `i = 1..=m`.
#[derive(Debug, Clone)]
pub struct GeneratorAssignment {
    ctx: GroupContext,
    k: usize,
    values: Vec<CMatrix>,
}

impl GeneratorAssignment {
    pub fn new(ctx: &GroupContext, values: Vec<CMatrix>) -> Result<Self> {
        if values.len() != ctx.m() {
            return Err(Error::Dimension(format!(
                "{} generator values for m = {}",
                values.len(),
                ctx.m()
            )));
        }
        let k = values[0].rows();
        for (i, v) in values.iter().enumerate() {
            if v.rows() != k || v.cols() != k || k == 0 {
                return Err(Error::Dimension(format!("value of a_{} is not {k}x{k}", i + 1)));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            let norm = v.norm_op()?;
            if norm > 1.0 + 1e-12 {
                return Err(Error::NotContraction { norm });
            }
        }
        Ok(GeneratorAssignment {
            ctx: ctx.clone(),
            k,
            values,
        })
    }

    /// Every generator sent to `r·I_k`.
    pub fn uniform(ctx: &GroupContext, k: usize, r: f64) -> Result<Self> {
        Self::new(ctx, vec![CMatrix::identity(k).scale(r); ctx.m()])
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self, i: usize) -> &CMatrix {
        &self.values[i - 1]
    }

    /// `Φ(s)`: the ordered product of the generator values or their adjoints.
    pub fn eval(&self, s: &Word) -> CMatrix {
        let mut acc = CMatrix::identity(self.k);
        for &x in s.letters() {
            let v = &self.values[x.unsigned_abs() as usize - 1];
            acc = if x > 0 { acc.matmul(v) } else { acc.matmul(&v.adjoint()) };
        }
        acc
    }

    /// The function sampled on `S_n`.
    pub fn to_function(&self, n: usize) -> Result<PdFunction> {
        PdFunction::from_fn(&self.ctx, self.k, Domain::Ball(n), |s| self.eval(s))
    }
}

/// `Φ(s)` for the quasi-multiplicative extension of `g`.
pub fn quasi_mult(g: &GeneratorAssignment, s: &Word) -> Result<CMatrix> {
    g.ctx.check_word(s)?;
    Ok(g.eval(s))
}

/// `Φ(s) = e^{−t|s|} I_k` on `S_n`.
pub fn haagerup(ctx: &GroupContext, k: usize, t: f64, n: usize) -> Result<PdFunction> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Invalid(format!("Haagerup parameter must be positive, got {t}")));
    }
    if k == 0 {
        return Err(Error::Dimension("block size must be positive".into()));
    }
    let powers: Vec<f64> = (0..=n).map(|l| (-t * l as f64).exp()).collect();
    PdFunction::from_fn(ctx, k, Domain::Ball(n), |s| {
        CMatrix::identity(k).scale(powers[s.len()])
    })
}
