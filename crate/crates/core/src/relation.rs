//! Finite binary relations on named elements.
//!
//! A [`BinaryRelation`] keeps its elements in declaration order and every
//! iteration in this module follows that order, so all derived objects
//! (dominance preorders, quotients, closures) are deterministic.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    elements: Vec<String>,
    bits: Vec<bool>,
}

impl fmt::Debug for BinaryRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryRelation {{ {:?}, pairs: [", self.elements)?;
        let mut first = true;
        for (a, b) in self.pairs() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "({a},{b})")?;
        }
        write!(f, "] }}")
    }
}

/// The closure operations offered by [`BinaryRelation::closure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureKind {
    Symmetric,
    /// Transitivity restricted to triples of pairwise distinct elements.
    SemiTransitive,
    /// Least relation that is both symmetric and semi-transitive.
    SymmetricSemiTransitive,
}

impl BinaryRelation {
    /// Builds a relation from names and a row-major 0/1 matrix.
    pub fn new(elements: Vec<String>, matrix: Vec<Vec<bool>>) -> Result<Self> {
        check_names(&elements)?;
        let n = elements.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Argument(format!(
                "relation matrix must be {n}x{n}"
            )));
        }
        Ok(BinaryRelation {
            elements,
            bits: matrix.into_iter().flatten().collect(),
        })
    }

    pub fn empty(elements: Vec<String>) -> Result<Self> {
        check_names(&elements)?;
        let n = elements.len();
        Ok(BinaryRelation {
            elements,
            bits: vec![false; n * n],
        })
    }

    pub fn full(elements: Vec<String>) -> Result<Self> {
        let mut r = Self::empty(elements)?;
        r.bits.iter_mut().for_each(|b| *b = true);
        Ok(r)
    }

    pub fn from_pairs<S: AsRef<str>>(elements: Vec<String>, pairs: &[(S, S)]) -> Result<Self> {
        let mut r = Self::empty(elements)?;
        for (a, b) in pairs {
            let i = r.index_of(a.as_ref())?;
            let j = r.index_of(b.as_ref())?;
            let n = r.len();
            r.bits[i * n + j] = true;
        }
        Ok(r)
    }

    /// Builds a relation by evaluating `f` on every ordered pair of indices.
    pub fn from_fn(elements: Vec<String>, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut r = Self::empty(elements)?;
        let n = r.len();
        for i in 0..n {
            for j in 0..n {
                r.bits[i * n + j] = f(i, j);
            }
        }
        Ok(r)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.elements.len() + j]
    }

    /// `x R y` by element name.
    pub fn relate(&self, x: &str, y: &str) -> Result<bool> {
        Ok(self.get(self.index_of(x)?, self.index_of(y)?))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        let n = self.len();
        (0..n * n)
            .filter(move |&k| self.bits[k])
            .map(move |k| (self.elements[k / n].as_str(), self.elements[k % n].as_str()))
    }

    pub fn pair_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_subset_of(&self, other: &BinaryRelation) -> bool {
        self.elements == other.elements && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|i| self.get(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_transitive(&self) -> bool {
        self.first_transitivity_failure(false).is_none()
    }

    pub fn is_semi_transitive(&self) -> bool {
        self.first_transitivity_failure(true).is_none()
    }

    fn first_transitivity_failure(&self, distinct_only: bool) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if !self.get(a, b) || (distinct_only && a == b) {
                    continue;
                }
                for c in 0..n {
                    if distinct_only && (c == a || c == b) {
                        continue;
                    }
                    if self.get(b, c) && !self.get(a, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// `a` dominates `b`: every edge out of `a` is also out of `b`, and
    /// every edge into `a` is also into `b`.
    pub fn dominates(&self, a: usize, b: usize) -> bool {
        (0..self.len()).all(|c| (!self.get(a, c) || self.get(b, c)) && (!self.get(c, a) || self.get(c, b)))
    }

    pub fn dominance(&self) -> Preorder {
        let n = self.len();
        let dom: Vec<bool> = (0..n * n).map(|k| self.dominates(k / n, k % n)).collect();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let members: Vec<usize> = (i..n)
                .filter(|&j| class_of[j] == usize::MAX && dom[i * n + j] && dom[j * n + i])
                .collect();
            for &j in &members {
                class_of[j] = id;
            }
            classes.push(members);
        }
        let names: Vec<String> = classes
            .iter()
            .map(|c| c.iter().map(|&i| self.elements[i].clone()).min().unwrap())
            .collect();
        let quotient = BinaryRelation::from_fn(names, |p, q| self.get(classes[p][0], classes[q][0]))
            .expect("class names are distinct members");
        Preorder {
            base: self.clone(),
            dominance: dom,
            class_of,
            classes,
            quotient,
        }
    }

    pub fn closure(&self, kind: ClosureKind) -> BinaryRelation {
        let mut r = self.clone();
        match kind {
            ClosureKind::Symmetric => {
                r.symmetric_step();
            }
            ClosureKind::SemiTransitive => while r.semi_transitive_step() {},
            ClosureKind::SymmetricSemiTransitive => loop {
                let a = r.symmetric_step();
                let b = r.semi_transitive_step();
                if !a && !b {
                    break;
                }
            },
        }
        r
    }

    /// Same as the symmetric+semi-transitive closure, but alternating the two
    /// rules in the opposite order.
    pub fn st_closure_transitive_first(&self) -> BinaryRelation {
        let mut r = self.clone();
        loop {
            let b = r.semi_transitive_step();
            let a = r.symmetric_step();
            if !a && !b {
                break;
            }
        }
        r
    }

    fn symmetric_step(&mut self) -> bool {
        let n = self.len();
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if self.get(i, j) && !self.get(j, i) {
                    self.bits[j * n + i] = true;
                    changed = true;
                }
            }
        }
        changed
    }

    fn semi_transitive_step(&mut self) -> bool {
        let mut changed = false;
        while let Some((a, _, c)) = self.first_transitivity_failure(true) {
            let n = self.len();
            self.bits[a * n + c] = true;
            changed = true;
        }
        changed
    }

    /// Returns a copy with one bit changed.
    pub fn with_bit(&self, i: usize, j: usize, value: bool) -> BinaryRelation {
        let mut r = self.clone();
        let n = r.len();
        r.bits[i * n + j] = value;
        r
    }

    /// Parses the `.rel` text format: a header line of element names followed
    /// by one 0/1 row per element. Lines starting with `#` are comments.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)), 1)
    }

    /// Parses `.rel` content given as numbered lines; `first_line` is used
    /// for errors when the block is empty.
    pub(crate) fn parse_lines<'a>(
        lines: impl Iterator<Item = (usize, &'a str)>,
        first_line: usize,
    ) -> Result<Self> {
        let mut lines = lines
            .map(|(i, l)| (i, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(first_line, "missing element header"))?;
        let elements: Vec<String> = header.split_whitespace().map(str::to_string).collect();
        check_names(&elements).map_err(|e| Error::parse(hline, e.to_string()))?;
        let mut rows = Vec::with_capacity(elements.len());
        for (lineno, line) in lines {
            if rows.len() == elements.len() {
                return Err(Error::parse(lineno, "too many rows"));
            }
            let row = line
                .split_whitespace()
                .map(|t| match t {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(Error::parse(lineno, format!("expected 0 or 1, found `{other}`"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            if row.len() != elements.len() {
                return Err(Error::parse(
                    lineno,
                    format!("row has {} entries, expected {}", row.len(), elements.len()),
                ));
            }
            rows.push(row);
        }
        if rows.len() != elements.len() {
            return Err(Error::parse(
                hline,
                format!("expected {} rows, found {}", elements.len(), rows.len()),
            ));
        }
        BinaryRelation::new(elements, rows)
    }

    pub fn to_rel_string(&self) -> String {
        let n = self.len();
        let mut out = self.elements.join(" ");
        out.push('\n');
        for i in 0..n {
            let row: Vec<&str> = (0..n).map(|j| if self.get(i, j) { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn check_names(elements: &[String]) -> Result<()> {
    let mut seen = HashMap::new();
    for (i, e) in elements.iter().enumerate() {
        if e.is_empty() || e.chars().any(char::is_whitespace) {
            return Err(Error::Argument(format!("invalid element name `{e}`")));
        }
        if seen.insert(e.as_str(), i).is_some() {
            return Err(Error::Argument(format!("duplicate element name `{e}`")));
        }
    }
    Ok(())
}

/// The dominance preorder of a relation together with its equivalence
/// classes and the induced relation on classes.
#[derive(Debug, Clone)]
pub struct Preorder {
    base: BinaryRelation,
    dominance: Vec<bool>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    quotient: BinaryRelation,
}

impl Preorder {
    pub fn base(&self) -> &BinaryRelation {
        &self.base
    }

    pub fn dominates(&self, a: usize, b: usize) -> bool {
        self.dominance[a * self.base.len() + b]
    }

    pub fn equivalent(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    /// Classes as lists of element indices, ordered by first member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Relation on classes; each class is named by its lexicographically
    /// least member.
    pub fn quotient(&self) -> &BinaryRelation {
        &self.quotient
    }
}

/// A total map between the element sets of two relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementMap {
    images: Vec<usize>,
}

impl ElementMap {
    pub fn new(src: &BinaryRelation, dst: &BinaryRelation, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut images = vec![usize::MAX; src.len()];
        for (a, b) in pairs {
            images[src.index_of(a)?] = dst.index_of(b)?;
        }
        if let Some(i) = images.iter().position(|&t| t == usize::MAX) {
            return Err(Error::Argument(format!(
                "map is not total: `{}` has no image",
                src.elements()[i]
            )));
        }
        Ok(ElementMap { images })
    }

    pub fn from_indices(images: Vec<usize>) -> Self {
        ElementMap { images }
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn compose(&self, then: &ElementMap) -> ElementMap {
        ElementMap {
            images: self.images.iter().map(|&i| then.images[i]).collect(),
        }
    }
}

/// Result of a monotonicity check: `None` when monotone, otherwise the first
/// related source pair whose images are unrelated.
pub fn monotone_violation(
    f: &ElementMap,
    src: &BinaryRelation,
    dst: &BinaryRelation,
) -> Option<(usize, usize)> {
    let n = src.len();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| src.get(i, j) && !dst.get(f.image(i), f.image(j)))
}

pub fn is_monotone(f: &ElementMap, src: &BinaryRelation, dst: &BinaryRelation) -> bool {
    monotone_violation(f, src, dst).is_none()
}
