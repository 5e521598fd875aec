//! Boolean terms over named variables and the extension of a binary
//! relation from generators to terms.
//!
//! The extension evaluates `q R p` in two stages: first each generator is
//! related to `p` by evaluating `p` on the row of that generator, then `q`
//! is evaluated on the resulting column. Because both stages only read truth
//! tables, the result does not change when either term is rewritten by the
//! laws of Boolean algebra.
//!
//! The lattice order on negation-free terms is decided by comparing the
//! monotone Boolean functions the terms induce. This is sound and complete
//! for the free distributive lattice: two lattice terms are equal there iff
//! they induce the same function on `{0,1}^n`, and `p <= q` iff `p ∧ q = p`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::relation::BinaryRelation;

/// Hard cap on the number of distinct variables in truth-table queries.
pub const MAX_TABLE_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolTerm {
    Var(String),
    Zero,
    One,
    Meet(Box<BoolTerm>, Box<BoolTerm>),
    Join(Box<BoolTerm>, Box<BoolTerm>),
    Not(Box<BoolTerm>),
}

impl BoolTerm {
    pub fn var(name: impl Into<String>) -> Self {
        BoolTerm::Var(name.into())
    }

    pub fn meet(a: BoolTerm, b: BoolTerm) -> Self {
        BoolTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: BoolTerm, b: BoolTerm) -> Self {
        BoolTerm::Join(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: BoolTerm) -> Self {
        BoolTerm::Not(Box::new(a))
    }

    /// Left-folded meet of a non-empty list.
    pub fn meet_all(terms: impl IntoIterator<Item = BoolTerm>) -> Option<Self> {
        terms.into_iter().reduce(BoolTerm::meet)
    }

    /// Left-folded join of a non-empty list.
    pub fn join_all(terms: impl IntoIterator<Item = BoolTerm>) -> Option<Self> {
        terms.into_iter().reduce(BoolTerm::join)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let t = p.join()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(t)
    }

    /// Distinct variable names in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            BoolTerm::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            BoolTerm::Zero | BoolTerm::One => {}
            BoolTerm::Meet(a, b) | BoolTerm::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            BoolTerm::Not(a) => a.collect_vars(out),
        }
    }

    /// True when the term uses only variables, meets and joins.
    pub fn is_lattice_term(&self) -> bool {
        match self {
            BoolTerm::Var(_) => true,
            BoolTerm::Zero | BoolTerm::One | BoolTerm::Not(_) => false,
            BoolTerm::Meet(a, b) | BoolTerm::Join(a, b) => a.is_lattice_term() && b.is_lattice_term(),
        }
    }

    pub fn has_negation(&self) -> bool {
        match self {
            BoolTerm::Not(_) => true,
            BoolTerm::Var(_) | BoolTerm::Zero | BoolTerm::One => false,
            BoolTerm::Meet(a, b) | BoolTerm::Join(a, b) => a.has_negation() || b.has_negation(),
        }
    }

    /// Evaluates the term as a Boolean function.
    pub fn eval(&self, value: &impl Fn(&str) -> bool) -> bool {
        match self {
            BoolTerm::Var(v) => value(v),
            BoolTerm::Zero => false,
            BoolTerm::One => true,
            BoolTerm::Meet(a, b) => a.eval(value) && b.eval(value),
            BoolTerm::Join(a, b) => a.eval(value) || b.eval(value),
            BoolTerm::Not(a) => !a.eval(value),
        }
    }

    /// Replaces variables through `f`; names `f` does not map are kept.
    pub fn substitute(&self, f: &impl Fn(&str) -> Option<BoolTerm>) -> BoolTerm {
        match self {
            BoolTerm::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            BoolTerm::Zero | BoolTerm::One => self.clone(),
            BoolTerm::Meet(a, b) => BoolTerm::meet(a.substitute(f), b.substitute(f)),
            BoolTerm::Join(a, b) => BoolTerm::join(a.substitute(f), b.substitute(f)),
            BoolTerm::Not(a) => BoolTerm::not(a.substitute(f)),
        }
    }

    fn resolve(&self, rel: &BinaryRelation) -> Result<Compiled> {
        Ok(match self {
            BoolTerm::Var(v) => Compiled::Var(rel.index_of(v)?),
            BoolTerm::Zero => Compiled::Const(false),
            BoolTerm::One => Compiled::Const(true),
            BoolTerm::Meet(a, b) => Compiled::Meet(Box::new(a.resolve(rel)?), Box::new(b.resolve(rel)?)),
            BoolTerm::Join(a, b) => Compiled::Join(Box::new(a.resolve(rel)?), Box::new(b.resolve(rel)?)),
            BoolTerm::Not(a) => Compiled::Not(Box::new(a.resolve(rel)?)),
        })
    }

    fn prec(&self) -> u8 {
        match self {
            BoolTerm::Join(..) => 1,
            BoolTerm::Meet(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for BoolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, t: &BoolTerm, min: u8) -> fmt::Result {
            if t.prec() < min {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self {
            BoolTerm::Var(v) => write!(f, "{v}"),
            BoolTerm::Zero => write!(f, "0"),
            BoolTerm::One => write!(f, "1"),
            BoolTerm::Meet(a, b) => {
                side(f, a, 2)?;
                write!(f, "&")?;
                side(f, b, 3)
            }
            BoolTerm::Join(a, b) => {
                side(f, a, 1)?;
                write!(f, "|")?;
                side(f, b, 2)
            }
            BoolTerm::Not(a) => {
                write!(f, "!")?;
                side(f, a, 3)
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'\'')
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn join(&mut self) -> Result<BoolTerm> {
        let mut t = self.meet()?;
        while self.eat(b'|') {
            t = BoolTerm::join(t, self.meet()?);
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<BoolTerm> {
        let mut t = self.unary()?;
        while self.eat(b'&') {
            t = BoolTerm::meet(t, self.unary()?);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<BoolTerm> {
        if self.eat(b'!') {
            return Ok(BoolTerm::not(self.unary()?));
        }
        if self.eat(b'(') {
            let t = self.join()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(t);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && is_name_byte(self.src[self.pos]) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name, `0`, `1`, `!` or `(`"));
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(match word {
            "0" => BoolTerm::Zero,
            "1" => BoolTerm::One,
            _ => BoolTerm::Var(word.to_string()),
        })
    }
}

/// Term with variables resolved to element indices.
enum Compiled {
    Var(usize),
    Const(bool),
    Meet(Box<Compiled>, Box<Compiled>),
    Join(Box<Compiled>, Box<Compiled>),
    Not(Box<Compiled>),
}

impl Compiled {
    fn eval(&self, value: &impl Fn(usize) -> bool) -> bool {
        match self {
            Compiled::Var(i) => value(*i),
            Compiled::Const(c) => *c,
            Compiled::Meet(a, b) => a.eval(value) && b.eval(value),
            Compiled::Join(a, b) => a.eval(value) || b.eval(value),
            Compiled::Not(a) => !a.eval(value),
        }
    }

    fn eval_sets(&self, gen: &impl Fn(usize) -> BTreeSet<usize>, universe: &BTreeSet<usize>) -> BTreeSet<usize> {
        match self {
            Compiled::Var(i) => gen(*i),
            Compiled::Const(false) => BTreeSet::new(),
            Compiled::Const(true) => universe.clone(),
            Compiled::Meet(a, b) => &a.eval_sets(gen, universe) & &b.eval_sets(gen, universe),
            Compiled::Join(a, b) => &a.eval_sets(gen, universe) | &b.eval_sets(gen, universe),
            Compiled::Not(a) => universe - &a.eval_sets(gen, universe),
        }
    }
}

/// `q R p` for the extension of `rel` to Boolean terms.
pub fn eval_rel(rel: &BinaryRelation, q: &BoolTerm, p: &BoolTerm) -> Result<bool> {
    let q = q.resolve(rel)?;
    let p = p.resolve(rel)?;
    Ok(eval_compiled(rel, &q, &p))
}

fn eval_compiled(rel: &BinaryRelation, q: &Compiled, p: &Compiled) -> bool {
    // generator a_j related to p: evaluate p on row j
    let column: Vec<bool> = (0..rel.len()).map(|j| p.eval(&|k| rel.get(j, k))).collect();
    q.eval(&|j| column[j])
}

/// Pre-resolved evaluator for many queries against one relation.
pub struct TermRelation<'a> {
    rel: &'a BinaryRelation,
}

impl<'a> TermRelation<'a> {
    pub fn new(rel: &'a BinaryRelation) -> Self {
        TermRelation { rel }
    }

    /// Relation matrix between the given terms, `out[i][j] = terms[i] R terms[j]`.
    pub fn matrix(&self, terms: &[BoolTerm]) -> Result<Vec<Vec<bool>>> {
        let compiled = terms.iter().map(|t| t.resolve(self.rel)).collect::<Result<Vec<_>>>()?;
        let n = self.rel.len();
        let columns: Vec<Vec<bool>> = compiled
            .iter()
            .map(|p| (0..n).map(|j| p.eval(&|k| self.rel.get(j, k))).collect())
            .collect();
        Ok(compiled
            .iter()
            .map(|q| columns.iter().map(|col| q.eval(&|j| col[j])).collect())
            .collect())
    }
}

/// Which side of the relation a set evaluation describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetSide {
    /// `{y in F | t R y}`
    Lower,
    /// `{y | y R t}`, only over the full generator set.
    Upper,
}

/// Evaluates `t` on sets of generators: variables become their row (or
/// column) supports and the connectives become union, intersection and
/// complement relative to the universe. `universe` is given as element
/// indices.
pub fn eval_sets(
    rel: &BinaryRelation,
    t: &BoolTerm,
    universe: &BTreeSet<usize>,
    side: SetSide,
) -> Result<BTreeSet<usize>> {
    if universe.iter().any(|&i| i >= rel.len()) {
        return Err(Error::Argument("set contains an index outside the relation".into()));
    }
    let t = t.resolve(rel)?;
    match side {
        SetSide::Lower => Ok(t.eval_sets(
            &|i| universe.iter().copied().filter(|&y| rel.get(i, y)).collect(),
            universe,
        )),
        SetSide::Upper => {
            if universe.len() != rel.len() {
                return Err(Error::Argument(
                    "upper set evaluation is only defined over the full generator set".into(),
                ));
            }
            Ok(t.eval_sets(&|i| (0..rel.len()).filter(|&y| rel.get(y, i)).collect(), universe))
        }
    }
}

/// Same sets computed point by point through [`eval_rel`].
pub fn eval_sets_pointwise(
    rel: &BinaryRelation,
    t: &BoolTerm,
    universe: &BTreeSet<usize>,
    side: SetSide,
) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for &y in universe {
        let g = BoolTerm::Var(rel.elements()[y].clone());
        let hit = match side {
            SetSide::Lower => eval_rel(rel, t, &g)?,
            SetSide::Upper => eval_rel(rel, &g, t)?,
        };
        if hit {
            out.insert(y);
        }
    }
    Ok(out)
}

fn table_vars(terms: &[&BoolTerm]) -> Result<Vec<String>> {
    let mut vars: Vec<String> = Vec::new();
    for t in terms {
        for v in t.vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    if vars.len() > MAX_TABLE_VARS {
        return Err(Error::Capacity(format!(
            "{} variables exceed the truth-table limit of {MAX_TABLE_VARS}",
            vars.len()
        )));
    }
    Ok(vars)
}

fn for_all_assignments(vars: &[String], mut check: impl FnMut(&dyn Fn(&str) -> bool) -> bool) -> bool {
    for mask in 0u32..(1u32 << vars.len()) {
        let value = |name: &str| {
            let i = vars.iter().position(|v| v == name).expect("variable in table");
            mask >> i & 1 == 1
        };
        if !check(&value) {
            return false;
        }
    }
    true
}

/// Truth-table equivalence of two terms.
pub fn equivalent(p: &BoolTerm, q: &BoolTerm) -> Result<bool> {
    let vars = table_vars(&[p, q])?;
    Ok(for_all_assignments(&vars, |v| p.eval(&v) == q.eval(&v)))
}

/// `p <= q` in the free distributive lattice.
pub fn lattice_leq(p: &BoolTerm, q: &BoolTerm) -> Result<bool> {
    if p.has_negation() || q.has_negation() {
        return Err(Error::Argument("lattice order is only defined for negation-free terms".into()));
    }
    let vars = table_vars(&[p, q])?;
    Ok(for_all_assignments(&vars, |v| !p.eval(&v) || q.eval(&v)))
}
