//! Tree geometry of the Cayley graph of `F_m` and the graphs `Γ_ν`.
//!
//! `Γ_ν` joins `s ≠ t` whenever the class of `s⁻¹t` is ⪯ `ν`. The extension
//! engine only needs the clique `C_ν` around the new edge `{e, s_ν}`; the
//! chordality checker is kept as a verification oracle.

use crate::error::{Error, Result};
use crate::words::{common_beginning, ClassCursor, GroupContext, Word};

/// `d(s, t) = |s⁻¹t|`.
pub fn distance(s: &Word, t: &Word) -> usize {
    s.left_div(t).len()
}

/// The unique vertex on all three geodesics between `x`, `y`, `z`.
pub fn tree_median(x: &Word, y: &Word, z: &Word) -> Word {
    let y0 = x.left_div(y);
    let z0 = x.left_div(z);
    x.mul(&common_beginning(&[y0, z0]))
}

/// Edge relation of `Γ_ν`.
#[derive(Debug, Clone)]
pub struct EdgePredicate {
    cutoff: ClassCursor,
}

impl EdgePredicate {
    pub fn new(cutoff: ClassCursor) -> Self {
        EdgePredicate { cutoff }
    }

    /// `Γ̂_n`: edges between words at distance at most `n`.
    pub fn within_distance(ctx: &GroupContext, n: usize) -> Self {
        EdgePredicate {
            cutoff: ClassCursor::last_of_length(ctx, n),
        }
    }

    pub fn cutoff(&self) -> &ClassCursor {
        &self.cutoff
    }

    pub fn is_edge(&self, s: &Word, t: &Word) -> bool {
        s != t && self.cutoff.covers(&s.left_div(t))
    }
}

/// `C_ν`: `{e, s_ν}` together with every `t` such that both `t` and
/// `s_ν⁻¹t` have class strictly below `ν`. Sorted by ⪯.
pub fn clique_c(nu: &ClassCursor) -> Result<Vec<Word>> {
    if nu.is_identity() {
        return Err(Error::Invalid("C_ν is undefined for ν = {e}".into()));
    }
    let ctx = nu.ctx();
    let s_nu = nu.rep();
    let mut out = vec![Word::identity(), s_nu.clone()];
    for t in ctx.ball(nu.len())? {
        if t.is_identity() || &t == s_nu {
            continue;
        }
        if nu.strictly_covers(&t) && nu.strictly_covers(&s_nu.left_div(&t)) {
            out.push(t);
        }
    }
    out.sort_by(|a, b| ctx.lex_cmp(a, b));
    Ok(out)
}

/// Chordality of the graph induced on `vertices` by `pred`.
pub fn is_chordal(vertices: &[Word], pred: &EdgePredicate) -> bool {
    let n = vertices.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| pred.is_edge(&vertices[i], &vertices[j])).collect())
        .collect();
    is_chordal_graph(&adj)
}

/// Chordality of a graph given by a symmetric adjacency matrix, by repeated
/// removal of simplicial vertices.
pub fn is_chordal_graph(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut alive = vec![true; n];
    for _ in 0..n {
        let simplicial = (0..n).find(|&v| {
            if !alive[v] {
                return false;
            }
            let nbrs: Vec<usize> = (0..n).filter(|&u| alive[u] && u != v && adj[v][u]).collect();
            nbrs.iter()
                .enumerate()
                .all(|(i, &a)| nbrs[i + 1..].iter().all(|&b| adj[a][b]))
        });
        match simplicial {
            Some(v) => alive[v] = false,
            None => return false,
        }
    }
    true
}

/// Words within distance `n` of both `s` and `t`, where `d(s, t) = n + 1`.
pub fn sigma_set(ctx: &GroupContext, s: &Word, t: &Word, n: usize) -> Result<Vec<Word>> {
    let d = distance(s, t);
    if d != n + 1 {
        return Err(Error::Invalid(format!(
            "sigma_set needs d(s, t) = n + 1, got d = {d}, n = {n}"
        )));
    }
    let mut out: Vec<Word> = ctx
        .ball(n)?
        .into_iter()
        .map(|w| s.mul(&w))
        .filter(|r| distance(r, t) <= n)
        .collect();
    out.sort_by(|a, b| ctx.lex_cmp(a, b));
    Ok(out)
}
