//! Reduced words in the free group `F_m` and lexicographic orders on `F` and
//! on the quotient by `s ~ s⁻¹`.
//!
//! A letter is a nonzero signed generator index: `+i` is `a_i`, `-i` is its
//! inverse. Words are reduced as soon as they are built.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of words a ball enumeration may produce.
pub const DEFAULT_BALL_CAP: usize = 200_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Reduces `letters` by cancelling adjacent `x, -x` pairs. Zero letters are
    /// not generators and are rejected.
    pub fn new(letters: &[i32]) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::Invalid("0 is not a letter".into()));
        }
        Ok(Self::reduce(letters.iter().copied()))
    }

    /// The generator `a_i` (or `a_i⁻¹` for negative `i`).
    pub fn letter(i: i32) -> Self {
        assert!(i != 0, "0 is not a letter");
        Word(vec![i])
    }

    fn reduce(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for x in letters {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        // cancel the overlap between the tail of self and the head of other
        let mut cut = 0;
        while cut < self.0.len()
            && cut < other.0.len()
            && self.0[self.0.len() - 1 - cut] == -other.0[cut]
        {
            cut += 1;
        }
        let mut letters = self.0[..self.0.len() - cut].to_vec();
        letters.extend_from_slice(&other.0[cut..]);
        Word(letters)
    }

    /// `self⁻¹ · other`, the word labelling the Cayley-graph path from `self` to `other`.
    pub fn left_div(&self, other: &Word) -> Word {
        self.inverse().mul(other)
    }

    pub fn pow(&self, n: u32) -> Word {
        (0..n).fold(Word::identity(), |acc, _| acc.mul(self))
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }
}

impl TryFrom<Vec<i32>> for Word {
    type Error = Error;
    fn try_from(v: Vec<i32>) -> Result<Self> {
        Word::new(&v)
    }
}

impl From<Word> for Vec<i32> {
    fn from(w: Word) -> Vec<i32> {
        w.0
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Longest common prefix `CB(w_1, …, w_p)`.
pub fn common_beginning(words: &[Word]) -> Word {
    let Some(first) = words.first() else {
        return Word::identity();
    };
    let mut len = first.len();
    for w in &words[1..] {
        len = first
            .0
            .iter()
            .zip(&w.0)
            .take(len)
            .take_while(|(a, b)| a == b)
            .count();
    }
    first.prefix(len)
}

/// Number of generators and the restriction of the lexicographic order to
/// the letters `a_1, a_1⁻¹, …, a_m, a_m⁻¹`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupContext {
    m: usize,
    order: Vec<i32>,
    rank: Vec<usize>,
}

impl fmt::Debug for GroupContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupContext(m={}, order={:?})", self.m, self.order)
    }
}

fn letter_slot(x: i32) -> usize {
    2 * (x.unsigned_abs() as usize - 1) + usize::from(x < 0)
}

impl GroupContext {
    /// Default order `a_1 ≺ a_1⁻¹ ≺ a_2 ≺ a_2⁻¹ ≺ …`.
    pub fn new(m: usize) -> Result<Self> {
        let order = (1..=m as i32).flat_map(|i| [i, -i]).collect();
        Self::with_order(m, order)
    }

    pub fn with_order(m: usize, order: Vec<i32>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("need at least one generator".into()));
        }
        if order.len() != 2 * m {
            return Err(Error::Invalid(format!(
                "letter order has {} letters, expected {}",
                order.len(),
                2 * m
            )));
        }
        let mut rank = vec![usize::MAX; 2 * m];
        for (pos, &x) in order.iter().enumerate() {
            if x == 0 || x.unsigned_abs() as usize > m {
                return Err(Error::Invalid(format!("letter {x} out of range for m={m}")));
            }
            let slot = letter_slot(x);
            if rank[slot] != usize::MAX {
                return Err(Error::Invalid(format!("letter {x} repeated in order")));
            }
            rank[slot] = pos;
        }
        Ok(GroupContext { m, order, rank })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn letter_order(&self) -> &[i32] {
        &self.order
    }

    fn rank(&self, x: i32) -> usize {
        self.rank[letter_slot(x)]
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        if w.max_generator() as usize > self.m {
            return Err(Error::Invalid(format!(
                "word {w} uses a generator beyond m={}",
                self.m
            )));
        }
        Ok(())
    }

    /// Shorter words first; equal lengths compare the first letter after the
    /// common beginning.
    pub fn lex_cmp(&self, s: &Word, t: &Word) -> Ordering {
        s.len().cmp(&t.len()).then_with(|| {
            for (&a, &b) in s.0.iter().zip(&t.0) {
                if a != b {
                    return self.rank(a).cmp(&self.rank(b));
                }
            }
            Ordering::Equal
        })
    }

    /// The ⪯-smaller of `s` and `s⁻¹`.
    pub fn class_rep(&self, s: &Word) -> Word {
        let inv = s.inverse();
        if self.lex_cmp(s, &inv) == Ordering::Greater {
            inv
        } else {
            s.clone()
        }
    }

    pub fn is_class_rep(&self, s: &Word) -> bool {
        self.lex_cmp(s, &s.inverse()) != Ordering::Greater
    }

    /// Order on classes `{s, s⁻¹}`, compared through their representatives.
    pub fn class_cmp(&self, s: &Word, t: &Word) -> Ordering {
        self.lex_cmp(&self.class_rep(s), &self.class_rep(t))
    }

    fn smallest_after(&self, prev: Option<i32>) -> i32 {
        *self
            .order
            .iter()
            .find(|&&x| prev != Some(-x))
            .expect("m >= 1 leaves a letter")
    }

    fn largest_after(&self, prev: Option<i32>) -> i32 {
        *self
            .order
            .iter()
            .rev()
            .find(|&&x| prev != Some(-x))
            .expect("m >= 1 leaves a letter")
    }

    /// ⪯-least word of length `len`.
    pub fn first_word(&self, len: usize) -> Word {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.smallest_after(out.last().copied()));
        }
        Word(out)
    }

    /// ⪯-greatest word of length `len`.
    pub fn last_word(&self, len: usize) -> Word {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.largest_after(out.last().copied()));
        }
        Word(out)
    }

    /// Next word of the same length, or `None` past the last one.
    pub fn next_word(&self, w: &Word) -> Option<Word> {
        let n = w.len();
        for i in (0..n).rev() {
            let prev = if i > 0 { Some(w.0[i - 1]) } else { None };
            let r = self.rank(w.0[i]);
            let Some(&x) = self.order[r + 1..].iter().find(|&&x| prev != Some(-x)) else {
                continue;
            };
            let mut out = w.0[..i].to_vec();
            out.push(x);
            while out.len() < n {
                out.push(self.smallest_after(out.last().copied()));
            }
            return Some(Word(out));
        }
        None
    }

    /// Previous word of the same length, or `None` before the first one.
    pub fn prev_word(&self, w: &Word) -> Option<Word> {
        let n = w.len();
        for i in (0..n).rev() {
            let prev = if i > 0 { Some(w.0[i - 1]) } else { None };
            let r = self.rank(w.0[i]);
            let Some(&x) = self.order[..r].iter().rev().find(|&&x| prev != Some(-x)) else {
                continue;
            };
            let mut out = w.0[..i].to_vec();
            out.push(x);
            while out.len() < n {
                out.push(self.largest_after(out.last().copied()));
            }
            return Some(Word(out));
        }
        None
    }

    /// `|S'_n| = 2m(2m−1)^{n−1}` for `n ≥ 1`, saturating.
    pub fn sphere_size(&self, n: usize) -> usize {
        if n == 0 {
            return 1;
        }
        let m2 = 2 * self.m;
        (1..n).fold(m2, |acc, _| acc.saturating_mul(m2 - 1))
    }

    pub fn ball_size(&self, n: usize) -> usize {
        (0..=n).fold(0usize, |acc, l| acc.saturating_add(self.sphere_size(l)))
    }

    /// Words of length exactly `n`, in ⪯ order.
    pub fn sphere(&self, n: usize) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.sphere_size(n).min(DEFAULT_BALL_CAP));
        let mut w = Some(self.first_word(n));
        while let Some(cur) = w {
            w = self.next_word(&cur);
            out.push(cur);
        }
        out
    }

    /// `S_n` in ⪯ order, bounded by [`DEFAULT_BALL_CAP`].
    pub fn ball(&self, n: usize) -> Result<Vec<Word>> {
        self.ball_with_cap(n, DEFAULT_BALL_CAP)
    }

    pub fn ball_with_cap(&self, n: usize, cap: usize) -> Result<Vec<Word>> {
        let size = self.ball_size(n);
        if size > cap {
            return Err(Error::SizeCap {
                radius: n,
                size,
                cap,
            });
        }
        let mut out = Vec::with_capacity(size);
        for l in 0..=n {
            out.extend(self.sphere(l));
        }
        Ok(out)
    }
}

/// A class `{s, s⁻¹}` of `F̂`, identified by its ⪯-minimal element.
#[derive(Clone, PartialEq, Eq)]
pub struct ClassCursor {
    rep: Word,
    ctx: GroupContext,
}

impl fmt::Debug for ClassCursor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class{}", self.rep)
    }
}

impl ClassCursor {
    /// The class `{e}`.
    pub fn identity(ctx: &GroupContext) -> Self {
        ClassCursor {
            rep: Word::identity(),
            ctx: ctx.clone(),
        }
    }

    /// The class containing `w`.
    pub fn of(ctx: &GroupContext, w: &Word) -> Self {
        ClassCursor {
            rep: ctx.class_rep(w),
            ctx: ctx.clone(),
        }
    }

    /// Last class whose words have length `n`; `{e}` for `n = 0`.
    pub fn last_of_length(ctx: &GroupContext, n: usize) -> Self {
        if n == 0 {
            return Self::identity(ctx);
        }
        let mut w = ctx.last_word(n);
        while !ctx.is_class_rep(&w) {
            w = ctx.prev_word(&w).expect("every length has a class");
        }
        ClassCursor {
            rep: w,
            ctx: ctx.clone(),
        }
    }

    pub fn rep(&self) -> &Word {
        &self.rep
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_identity()
    }

    pub fn contains(&self, w: &Word) -> bool {
        *w == self.rep || w.inverse() == self.rep
    }

    /// Whether the class of `w` is ⪯ this class.
    pub fn covers(&self, w: &Word) -> bool {
        self.ctx.lex_cmp(&self.ctx.class_rep(w), &self.rep) != Ordering::Greater
    }

    /// Whether the class of `w` is strictly ≺ this class.
    pub fn strictly_covers(&self, w: &Word) -> bool {
        self.ctx.lex_cmp(&self.ctx.class_rep(w), &self.rep) == Ordering::Less
    }

    pub fn is_last_of_length(&self) -> bool {
        self.successor().len() > self.len()
    }

    pub fn successor(&self) -> ClassCursor {
        let ctx = &self.ctx;
        let mut w = self.rep.clone();
        loop {
            w = ctx
                .next_word(&w)
                .unwrap_or_else(|| ctx.first_word(w.len() + 1));
            if ctx.is_class_rep(&w) {
                return ClassCursor {
                    rep: w,
                    ctx: ctx.clone(),
                };
            }
        }
    }

    /// `None` for `{e}`.
    pub fn predecessor(&self) -> Option<ClassCursor> {
        if self.rep.is_identity() {
            return None;
        }
        let ctx = &self.ctx;
        let mut w = self.rep.clone();
        loop {
            w = match ctx.prev_word(&w) {
                Some(p) => p,
                None if w.len() == 1 => return Some(ClassCursor::identity(ctx)),
                None => ctx.last_word(w.len() - 1),
            };
            if ctx.is_class_rep(&w) {
                return Some(ClassCursor {
                    rep: w,
                    ctx: ctx.clone(),
                });
            }
        }
    }

    pub fn cmp_class(&self, other: &ClassCursor) -> Ordering {
        self.ctx.lex_cmp(&self.rep, &other.rep)
    }
}

/// Every class whose length lies in `(from_len, to_len]`, in ⪯ order.
pub fn classes_between(ctx: &GroupContext, from_len: usize, to_len: usize) -> Vec<ClassCursor> {
    let mut out = Vec::new();
    if to_len <= from_len {
        return out;
    }
    let mut cur = ClassCursor::last_of_length(ctx, from_len);
    loop {
        cur = cur.successor();
        if cur.len() > to_len {
            break;
        }
        out.push(cur.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(x: &[i32]) -> Word {
        Word::new(x).unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(w(&[1, 2]).mul(&w(&[-2, -1])), Word::identity());
        assert_eq!(w(&[1]).mul(&w(&[1])), w(&[1, 1]));
        assert_eq!(w(&[1, 2]).mul(&w(&[-2, 1])), w(&[1, 1]));
    }

    #[test]
    fn construction_reduces() {
        assert_eq!(w(&[1, 2, -2, 1]), w(&[1, 1]));
        assert!(Word::new(&[1, 0]).is_err());
        let parsed: Word = serde_json::from_str("[1,-1,2]").unwrap();
        assert_eq!(parsed, w(&[2]));
        assert_eq!(serde_json::to_string(&w(&[1, -2])).unwrap(), "[1,-2]");
    }

    #[test]
    fn common_beginning_examples() {
        assert_eq!(common_beginning(&[w(&[1, 2]), w(&[1, -2])]), w(&[1]));
        assert_eq!(common_beginning(&[w(&[1]), w(&[2])]), Word::identity());
        assert_eq!(
            common_beginning(&[w(&[1, 2, 1]), w(&[1, 2, -1]), w(&[1, 2])]),
            w(&[1, 2])
        );
    }

    #[test]
    fn lex_examples() {
        let ctx = GroupContext::new(2).unwrap();
        assert_eq!(ctx.lex_cmp(&w(&[1]), &w(&[1, 1])), Ordering::Less);
        assert_eq!(ctx.lex_cmp(&w(&[1, 1]), &w(&[-1, -1])), Ordering::Less);
        assert_eq!(ctx.lex_cmp(&w(&[2, -1]), &w(&[2, -1])), Ordering::Equal);
    }

    #[test]
    fn successor_examples() {
        let ctx = GroupContext::new(2).unwrap();
        let e = ClassCursor::identity(&ctx);
        let c1 = e.successor();
        assert_eq!(c1.rep(), &w(&[1]));
        assert!(c1.contains(&w(&[-1])));
        let c2 = c1.successor();
        assert_eq!(c2.rep(), &w(&[2]));
        let c3 = c2.successor();
        assert_eq!(c3.rep(), &w(&[1, 1]));
        assert_eq!(c3.predecessor().unwrap(), c2);
        assert_eq!(c1.predecessor().unwrap(), e);
        assert!(e.predecessor().is_none());
    }

    #[test]
    fn ball_sizes() {
        let ctx2 = GroupContext::new(2).unwrap();
        assert_eq!(ctx2.ball(1).unwrap().len(), 5);
        assert_eq!(ctx2.ball(2).unwrap().len(), 17);
        let ctx1 = GroupContext::new(1).unwrap();
        assert_eq!(ctx1.ball(3).unwrap().len(), 7);
        assert!(matches!(
            ctx2.ball_with_cap(3, 10),
            Err(Error::SizeCap { size: 53, .. })
        ));
    }

    #[test]
    fn ball_is_sorted_and_reduced() {
        let ctx = GroupContext::with_order(2, vec![-2, 1, 2, -1]).unwrap();
        let ball = ctx.ball(4).unwrap();
        assert_eq!(ball.len(), ctx.ball_size(4));
        for pair in ball.windows(2) {
            assert_eq!(ctx.lex_cmp(&pair[0], &pair[1]), Ordering::Less);
        }
        for s in &ball {
            assert_eq!(&Word::new(s.letters()).unwrap(), s);
        }
    }

    #[test]
    fn sphere_size_formula() {
        for m in 1..=3 {
            let ctx = GroupContext::new(m).unwrap();
            for n in 1..=4 {
                assert_eq!(ctx.sphere(n).len(), 2 * m * (2 * m - 1).pow(n as u32 - 1));
            }
        }
    }

    #[test]
    fn square_is_longer() {
        for m in 1..=3 {
            let ctx = GroupContext::new(m).unwrap();
            for s in ctx.ball(4).unwrap().into_iter().skip(1) {
                assert!(s.mul(&s).len() > s.len(), "{s}");
            }
        }
    }

    #[test]
    fn classes_exhaust_balls() {
        let ctx = GroupContext::with_order(2, vec![2, -1, -2, 1]).unwrap();
        let mut cur = ClassCursor::identity(&ctx);
        let mut seen = vec![Word::identity()];
        for n in 1..=3 {
            let last = ClassCursor::last_of_length(&ctx, n);
            while cur != last {
                let next = cur.successor();
                assert_eq!(next.predecessor().unwrap(), cur);
                assert!(next.len() >= cur.len());
                cur = next;
                seen.push(cur.rep().clone());
                seen.push(cur.rep().inverse());
            }
            let mut ball = ctx.ball(n).unwrap();
            let mut got = seen.clone();
            ball.sort();
            got.sort();
            assert_eq!(got, ball);
        }
        assert_eq!(classes_between(&ctx, 1, 3).len(), 6 + 18);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(GroupContext::with_order(2, vec![1, -1, 2]).is_err());
        assert!(GroupContext::with_order(2, vec![1, -1, 2, 2]).is_err());
        assert!(GroupContext::with_order(2, vec![1, -1, 2, 3]).is_err());
        assert!(GroupContext::new(0).is_err());
    }

    fn word_strategy(m: i32, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((1..=m, any::<bool>()), 0..max_len)
            .prop_map(|v| Word::reduce(v.into_iter().map(|(i, neg)| if neg { -i } else { i })))
    }

    fn order_strategy() -> impl Strategy<Value = GroupContext> {
        Just(vec![1, -1, 2, -2, 3, -3])
            .prop_shuffle()
            .prop_map(|o| GroupContext::with_order(3, o).unwrap())
    }

    proptest! {
        #[test]
        fn inverse_laws(s in word_strategy(3, 10)) {
            prop_assert_eq!(s.inverse().inverse(), s.clone());
            prop_assert!(s.mul(&s.inverse()).is_identity());
        }

        #[test]
        fn mul_is_associative_and_bounded(s in word_strategy(3, 8), t in word_strategy(3, 8), u in word_strategy(3, 8)) {
            prop_assert!(s.mul(&t).len() <= s.len() + t.len());
            prop_assert_eq!(s.mul(&t).mul(&u), s.mul(&t.mul(&u)));
        }

        #[test]
        fn lex_is_total_order(ctx in order_strategy(), a in word_strategy(3, 5), b in word_strategy(3, 5), c in word_strategy(3, 5)) {
            let ab = ctx.lex_cmp(&a, &b);
            prop_assert_eq!(ab, ctx.lex_cmp(&b, &a).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if ab != Ordering::Greater && ctx.lex_cmp(&b, &c) != Ordering::Greater {
                prop_assert!(ctx.lex_cmp(&a, &c) != Ordering::Greater);
            }
        }

        #[test]
        fn common_beginning_symmetric(a in word_strategy(2, 6), b in word_strategy(2, 6), c in word_strategy(2, 6)) {
            let x = common_beginning(&[a.clone(), b.clone(), c.clone()]);
            prop_assert_eq!(&x, &common_beginning(&[c.clone(), a.clone(), b.clone()]));
            prop_assert_eq!(&x, &common_beginning(&[b, c, a]));
        }
    }
}
