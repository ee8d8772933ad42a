//! JSON formats: `pdfun.v1`, `params.v1`, `trace.v1`, `ncpoly.v1`, `cert.v1`.
//!
//! Complex numbers are `[re, im]` pairs and blocks are arrays of rows. Every
//! document carries a `schema` tag; it may be omitted on input. Floats are
//! written in shortest round-trip form, so reading back is bit exact.

use serde::{Deserialize, Serialize};

use crate::completion::ContractionParam;
use crate::error::{Error, Result};
use crate::extend::{ExtensionTrace, ParamSequence, TraceStep};
use crate::linalg::{CMatrix, C64};
use crate::ncpoly::{NcPolynomial, SosCertificate};
use crate::pdfun::{Domain, PdFunction};
use crate::words::{GroupContext, Word};

pub const PDFUN_SCHEMA: &str = "pdfun.v1";
pub const PARAMS_SCHEMA: &str = "params.v1";
pub const TRACE_SCHEMA: &str = "trace.v1";
pub const NCPOLY_SCHEMA: &str = "ncpoly.v1";
pub const CERT_SCHEMA: &str = "cert.v1";

pub type BlockJson = Vec<Vec<[f64; 2]>>;

pub fn block_to_json(a: &CMatrix) -> BlockJson {
    a.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Reads a block and checks it is `rows×cols`.
pub fn block_from_json(b: &BlockJson, rows: usize, cols: usize) -> Result<CMatrix> {
    if b.len() != rows || b.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension(format!("expected a {rows}x{cols} block")));
    }
    let data = b.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    let m = CMatrix::from_vec(rows, cols, data)?;
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

fn check_schema(found: &Option<String>, expected: &str) -> Result<()> {
    match found {
        Some(s) if s != expected => Err(Error::Invalid(format!(
            "schema is {s:?}, expected {expected:?}"
        ))),
        _ => Ok(()),
    }
}

fn context(m: usize, letter_order: Option<Vec<i32>>) -> Result<GroupContext> {
    match letter_order {
        Some(order) => GroupContext::with_order(m, order),
        None => GroupContext::new(m),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainJson {
    Ball { n: usize },
    OrderIdeal { last: Word },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub word: Word,
    pub value: BlockJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdFunctionJson {
    #[serde(default)]
    pub schema: Option<String>,
    pub m: usize,
    pub k: usize,
    #[serde(default)]
    pub letter_order: Option<Vec<i32>>,
    pub domain: DomainJson,
    pub entries: Vec<EntryJson>,
}

impl From<&PdFunction> for PdFunctionJson {
    fn from(phi: &PdFunction) -> Self {
        let domain = match phi.domain() {
            Domain::Ball(n) => DomainJson::Ball { n: *n },
            Domain::OrderIdeal(w) => DomainJson::OrderIdeal { last: w.clone() },
        };
        PdFunctionJson {
            schema: Some(PDFUN_SCHEMA.into()),
            m: phi.ctx().m(),
            k: phi.k(),
            letter_order: Some(phi.ctx().letter_order().to_vec()),
            domain,
            entries: phi
                .class_values()
                .into_iter()
                .map(|(w, v)| EntryJson {
                    word: w.clone(),
                    value: block_to_json(v),
                })
                .collect(),
        }
    }
}

impl TryFrom<PdFunctionJson> for PdFunction {
    type Error = Error;

    fn try_from(doc: PdFunctionJson) -> Result<Self> {
        check_schema(&doc.schema, PDFUN_SCHEMA)?;
        let ctx = context(doc.m, doc.letter_order)?;
        let domain = match doc.domain {
            DomainJson::Ball { n } => Domain::Ball(n),
            DomainJson::OrderIdeal { last } => {
                ctx.check_word(&last)?;
                Domain::OrderIdeal(ctx.class_rep(&last))
            }
        };
        let k = doc.k;
        let entries = doc
            .entries
            .iter()
            .map(|e| Ok((e.word.clone(), block_from_json(&e.value, k, k)?)))
            .collect::<Result<Vec<_>>>()?;
        PdFunction::from_entries(&ctx, k, domain, entries)
    }
}

/// A contraction; `rows`/`cols` are explicit because either may be zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaJson {
    pub rows: usize,
    pub cols: usize,
    pub value: BlockJson,
}

impl From<&ContractionParam> for GammaJson {
    fn from(g: &ContractionParam) -> Self {
        GammaJson {
            rows: g.0.rows(),
            cols: g.0.cols(),
            value: block_to_json(&g.0),
        }
    }
}

impl TryFrom<&GammaJson> for ContractionParam {
    type Error = Error;

    fn try_from(g: &GammaJson) -> Result<Self> {
        if g.rows == 0 || g.cols == 0 {
            return Ok(ContractionParam::zero(g.rows, g.cols));
        }
        Ok(ContractionParam(block_from_json(&g.value, g.rows, g.cols)?))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamEntryJson {
    pub class: Word,
    pub gamma: GammaJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    #[serde(default)]
    pub schema: Option<String>,
    pub m: usize,
    pub k: usize,
    #[serde(default)]
    pub letter_order: Option<Vec<i32>>,
    /// Radius of the base function the parameters extend.
    pub base_radius: usize,
    pub params: Vec<ParamEntryJson>,
}

impl ParamsJson {
    pub fn new(ctx: &GroupContext, k: usize, base_radius: usize, params: &ParamSequence) -> Self {
        ParamsJson {
            schema: Some(PARAMS_SCHEMA.into()),
            m: ctx.m(),
            k,
            letter_order: Some(ctx.letter_order().to_vec()),
            base_radius,
            params: params
                .ordered(ctx)
                .into_iter()
                .map(|(w, g)| ParamEntryJson {
                    class: w.clone(),
                    gamma: g.into(),
                })
                .collect(),
        }
    }

    /// The context and the parameter sequence, keyed by class representative.
    pub fn decode(&self) -> Result<(GroupContext, ParamSequence)> {
        check_schema(&self.schema, PARAMS_SCHEMA)?;
        let ctx = context(self.m, self.letter_order.clone())?;
        let mut seq = ParamSequence::new();
        for e in &self.params {
            ctx.check_word(&e.class)?;
            seq.insert(ctx.class_rep(&e.class), (&e.gamma).try_into()?);
        }
        Ok((ctx, seq))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceStepJson {
    pub class: Word,
    pub clique: Vec<Word>,
    pub central_entry: BlockJson,
    pub gamma: GammaJson,
    pub value: BlockJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceJson {
    #[serde(default)]
    pub schema: Option<String>,
    pub m: usize,
    pub k: usize,
    #[serde(default)]
    pub letter_order: Option<Vec<i32>>,
    pub steps: Vec<TraceStepJson>,
}

impl TraceJson {
    pub fn new(ctx: &GroupContext, k: usize, trace: &ExtensionTrace) -> Self {
        TraceJson {
            schema: Some(TRACE_SCHEMA.into()),
            m: ctx.m(),
            k,
            letter_order: Some(ctx.letter_order().to_vec()),
            steps: trace
                .steps
                .iter()
                .map(|s| TraceStepJson {
                    class: s.class.clone(),
                    clique: s.clique.clone(),
                    central_entry: block_to_json(&s.central_entry),
                    gamma: (&s.gamma).into(),
                    value: block_to_json(&s.value),
                })
                .collect(),
        }
    }

    pub fn decode(&self) -> Result<(GroupContext, ExtensionTrace)> {
        check_schema(&self.schema, TRACE_SCHEMA)?;
        let ctx = context(self.m, self.letter_order.clone())?;
        let k = self.k;
        let steps = self
            .steps
            .iter()
            .map(|s| {
                Ok(TraceStep {
                    class: s.class.clone(),
                    clique: s.clique.clone(),
                    central_entry: block_from_json(&s.central_entry, k, k)?,
                    gamma: (&s.gamma).try_into()?,
                    value: block_from_json(&s.value, k, k)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((ctx, ExtensionTrace { steps }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NcPolyJson {
    #[serde(default)]
    pub schema: Option<String>,
    pub m: usize,
    pub c: usize,
    pub terms: Vec<EntryJson>,
}

impl From<&NcPolynomial> for NcPolyJson {
    fn from(p: &NcPolynomial) -> Self {
        let mut terms: Vec<_> = p.terms().iter().collect();
        terms.sort_by(|a, b| p.ctx().lex_cmp(a.0, b.0));
        NcPolyJson {
            schema: Some(NCPOLY_SCHEMA.into()),
            m: p.ctx().m(),
            c: p.c(),
            terms: terms
                .into_iter()
                .map(|(w, a)| EntryJson {
                    word: w.clone(),
                    value: block_to_json(a),
                })
                .collect(),
        }
    }
}

impl TryFrom<NcPolyJson> for NcPolynomial {
    type Error = Error;

    fn try_from(doc: NcPolyJson) -> Result<Self> {
        check_schema(&doc.schema, NCPOLY_SCHEMA)?;
        let ctx = GroupContext::new(doc.m)?;
        let c = doc.c;
        let terms = doc
            .terms
            .iter()
            .map(|e| Ok((e.word.clone(), block_from_json(&e.value, c, c)?)))
            .collect::<Result<Vec<_>>>()?;
        NcPolynomial::from_terms(&ctx, c, terms)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorJson {
    pub word: Word,
    /// `B_s`, `rank × c`.
    pub value: BlockJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertJson {
    #[serde(default)]
    pub schema: Option<String>,
    pub m: usize,
    pub c: usize,
    pub rank: usize,
    pub residual: f64,
    pub iterations: usize,
    pub index: Vec<Word>,
    pub gram: BlockJson,
    pub factors: Vec<FactorJson>,
}

impl From<&SosCertificate> for CertJson {
    fn from(cert: &SosCertificate) -> Self {
        CertJson {
            schema: Some(CERT_SCHEMA.into()),
            m: cert.ctx.m(),
            c: cert.c,
            rank: cert.rank(),
            residual: cert.residual,
            iterations: cert.iterations,
            index: cert.index.clone(),
            gram: block_to_json(&cert.gram),
            factors: cert
                .index
                .iter()
                .zip(&cert.factors)
                .map(|(w, b)| FactorJson {
                    word: w.clone(),
                    value: block_to_json(b),
                })
                .collect(),
        }
    }
}

impl TryFrom<CertJson> for SosCertificate {
    type Error = Error;

    fn try_from(doc: CertJson) -> Result<Self> {
        check_schema(&doc.schema, CERT_SCHEMA)?;
        let ctx = GroupContext::new(doc.m)?;
        let n = doc.index.len() * doc.c;
        if doc.factors.len() != doc.index.len()
            || doc.factors.iter().zip(&doc.index).any(|(f, w)| &f.word != w)
        {
            return Err(Error::Invalid("factors do not follow the index".into()));
        }
        let factors = doc
            .factors
            .iter()
            .map(|f| block_from_json(&f.value, doc.rank, doc.c))
            .collect::<Result<Vec<_>>>()?;
        Ok(SosCertificate {
            ctx,
            c: doc.c,
            index: doc.index,
            gram: block_from_json(&doc.gram, n, n)?,
            factors,
            residual: doc.residual,
            iterations: doc.iterations,
        })
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_string<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

pub fn pdfun_to_string(phi: &PdFunction) -> Result<String> {
    to_string(&PdFunctionJson::from(phi))
}

pub fn pdfun_from_str(s: &str) -> Result<PdFunction> {
    serde_json::from_str::<PdFunctionJson>(s)?.try_into()
}

pub fn ncpoly_from_str(s: &str) -> Result<NcPolynomial> {
    serde_json::from_str::<NcPolyJson>(s)?.try_into()
}

pub fn params_from_str(s: &str) -> Result<(GroupContext, ParamSequence)> {
    serde_json::from_str::<ParamsJson>(s)?.decode()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::{extend_to_ball, RandomOracle};
    use crate::linalg::Tolerance;
    use crate::sampling::{random_pd_function, seeded};

    #[test]
    fn pdfun_round_trip_is_bit_exact() {
        let ctx = GroupContext::with_order(2, vec![2, -1, 1, -2]).unwrap();
        let phi = random_pd_function(&ctx, 2, 2, &mut seeded(5)).unwrap();
        let text = pdfun_to_string(&phi).unwrap();
        let back = pdfun_from_str(&text).unwrap();
        assert_eq!(back.max_diff(&phi).unwrap(), 0.0);
        assert_eq!(back.ctx(), phi.ctx());
        assert_eq!(pdfun_to_string(&back).unwrap(), text);
    }

    #[test]
    fn pdfun_schema_example() {
        let doc = r#"{"m":1,"k":1,"domain":{"type":"ball","n":1},
            "entries":[{"word":[],"value":[[[1,0]]]},{"word":[-1],"value":[[[0.5,0.25]]]}]}"#;
        let phi = pdfun_from_str(doc).unwrap();
        let a = phi.value(&Word::letter(1)).unwrap();
        assert_eq!(a[(0, 0)], C64::new(0.5, -0.25));
        assert!(pdfun_from_str(&doc.replace("\"m\"", "\"schema\":\"x\",\"m\"")).is_err());
        assert!(pdfun_from_str(&doc.replace("[[[0.5,0.25]]]", "[[[0.5,0.25],[1,0]]]")).is_err());
    }

    #[test]
    fn trace_and_params_round_trip() {
        let ctx = GroupContext::new(2).unwrap();
        let tol = Tolerance::default();
        let phi = random_pd_function(&ctx, 1, 1, &mut seeded(2)).unwrap();
        let (_, trace) = extend_to_ball(&phi, 2, &mut RandomOracle::new(3, 1.0), &tol).unwrap();
        let doc = TraceJson::new(&ctx, 1, &trace);
        let text = to_string(&doc).unwrap();
        let (ctx2, back) = serde_json::from_str::<TraceJson>(&text).unwrap().decode().unwrap();
        assert_eq!(ctx2, ctx);
        assert_eq!(back, trace);

        let params = trace.params();
        let text = to_string(&ParamsJson::new(&ctx, 1, 1, &params)).unwrap();
        let (_, back) = serde_json::from_str::<ParamsJson>(&text).unwrap().decode().unwrap();
        assert_eq!(back, params);
    }
}
