//! Racks, quandles and their partial versions carrying a binary relation.

use std::fmt;

use crate::error::{Error, Result};
use crate::relation::{BinaryRelation, Preorder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    Rack,
    Quandle,
    PartialRack,
    PartialQuandle,
}

impl AlgebraKind {
    pub fn is_partial(self) -> bool {
        matches!(self, AlgebraKind::PartialRack | AlgebraKind::PartialQuandle)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "rack" => AlgebraKind::Rack,
            "quandle" => AlgebraKind::Quandle,
            "prack" | "partial_rack" | "partial_rack_rel" => AlgebraKind::PartialRack,
            "pquandle" | "partial_quandle" | "partial_quandle_rel" => AlgebraKind::PartialQuandle,
            other => return Err(Error::Argument(format!("unknown algebra kind `{other}`"))),
        })
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraKind::Rack => "rack",
            AlgebraKind::Quandle => "quandle",
            AlgebraKind::PartialRack => "partial_rack_rel",
            AlgebraKind::PartialQuandle => "partial_quandle_rel",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Star,
    Bar,
}

impl Op {
    fn name(self) -> &'static str {
        match self {
            Op::Star => "star",
            Op::Bar => "bar",
        }
    }
}

/// Standard total algebras on `{0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Standard {
    /// `i * j = 2j - i mod n`
    Dihedral(usize),
    /// Core quandle of the cyclic group, `a * b = b a^-1 b` written additively.
    Core(usize),
    /// Conjugation quandle `a * b = b^-k a b^k` of the cyclic group.
    Conj { n: usize, k: i64 },
    /// The cyclic group acting on itself by a fixed generator.
    GSetRack { n: usize, g: i64 },
}

/// A set with partial operations `*`, `bar *` and a relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAlgebra {
    elements: Vec<String>,
    star: Vec<Option<usize>>,
    bar: Vec<Option<usize>>,
    rel: BinaryRelation,
    kind: AlgebraKind,
}

/// One failed instance of an axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom: &'static str,
    pub elements: Vec<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({}): {}", self.axiom, self.elements.join(", "), self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub kind: AlgebraKind,
    pub checked: Vec<&'static str>,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PartialAlgebra {
    /// Builds an algebra from row-major tables. When `bar` is `None` it is
    /// solved from `*` column by column. A missing relation means the full one.
    pub fn new(
        elements: Vec<String>,
        star: Vec<Vec<Option<usize>>>,
        bar: Option<Vec<Vec<Option<usize>>>>,
        rel: Option<BinaryRelation>,
        kind: Option<AlgebraKind>,
    ) -> Result<Self> {
        let n = elements.len();
        let rel = match rel {
            Some(r) => {
                if r.elements() != elements.as_slice() {
                    return Err(Error::Argument("relation elements differ from algebra elements".into()));
                }
                r
            }
            None => BinaryRelation::full(elements.clone())?,
        };
        let flat = |t: Vec<Vec<Option<usize>>>, what: &str| -> Result<Vec<Option<usize>>> {
            if t.len() != n || t.iter().any(|r| r.len() != n) {
                return Err(Error::Argument(format!("{what} table must be {n}x{n}")));
            }
            let v: Vec<Option<usize>> = t.into_iter().flatten().collect();
            if v.iter().flatten().any(|&e| e >= n) {
                return Err(Error::Argument(format!("{what} table entry out of range")));
            }
            Ok(v)
        };
        let star = flat(star, "star")?;
        let bar = match bar {
            Some(b) => flat(b, "bar")?,
            None => solve_bar(&elements, &star, &rel)?,
        };
        let mut alg = PartialAlgebra {
            elements,
            star,
            bar,
            rel,
            kind: AlgebraKind::PartialRack,
        };
        alg.kind = match kind {
            Some(k) => k,
            None => alg.infer_kind(),
        };
        if !alg.kind.is_partial() {
            if !alg.is_total() {
                return Err(Error::Argument(format!("a {} needs total operations", alg.kind)));
            }
            if alg.rel.pair_count() != n * n {
                return Err(Error::Argument(format!("a {} carries the full relation", alg.kind)));
            }
        }
        Ok(alg)
    }

    fn infer_kind(&self) -> AlgebraKind {
        let n = self.len();
        let idem = |i: usize| self.star[i * n + i] == Some(i) && self.bar[i * n + i] == Some(i);
        if self.is_total() && self.rel.pair_count() == n * n {
            if (0..n).all(idem) {
                AlgebraKind::Quandle
            } else {
                AlgebraKind::Rack
            }
        } else if (0..n).filter(|&i| self.rel.get(i, i)).all(idem) {
            AlgebraKind::PartialQuandle
        } else {
            AlgebraKind::PartialRack
        }
    }

    pub fn standard(spec: Standard) -> Result<Self> {
        let (n, f, g): (usize, Box<dyn Fn(i64, i64, i64) -> i64>, Box<dyn Fn(i64, i64, i64) -> i64>) = match spec {
            Standard::Dihedral(n) | Standard::Core(n) => (
                n,
                Box::new(|i, j, m| (2 * j - i).rem_euclid(m)),
                Box::new(|i, j, m| (2 * j - i).rem_euclid(m)),
            ),
            // conjugation in an abelian group is trivial
            Standard::Conj { n, .. } => (n, Box::new(|i, _, _| i), Box::new(|i, _, _| i)),
            Standard::GSetRack { n, g } => (
                n,
                Box::new(move |i, _, m| (i + g).rem_euclid(m)),
                Box::new(move |i, _, m| (i - g).rem_euclid(m)),
            ),
        };
        if n < 1 {
            return Err(Error::Argument("the carrier needs at least one element".into()));
        }
        let m = n as i64;
        let elements: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let table = |op: &dyn Fn(i64, i64, i64) -> i64| -> Vec<Vec<Option<usize>>> {
            (0..m)
                .map(|i| (0..m).map(|j| Some(op(i, j, m) as usize)).collect())
                .collect()
        };
        let star = table(&*f);
        let bar = table(&*g);
        PartialAlgebra::new(elements, star, Some(bar), None, None)
    }

    /// Parses the `.alg` format: blocks separated by `%` lines holding the
    /// element names, the `*` table, an optional bar table (the block may be
    /// left empty) and an optional relation matrix.
    pub fn parse(text: &str) -> Result<Self> {
        let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line == "%" {
                blocks.push(Vec::new());
            } else if !line.is_empty() && !line.starts_with('#') {
                blocks.last_mut().unwrap().push((i + 1, line));
            }
        }
        if blocks.len() < 2 || blocks.len() > 4 {
            return Err(Error::parse(1, format!("expected 2 to 4 blocks, found {}", blocks.len())));
        }
        let names_block = &blocks[0];
        if names_block.len() != 1 {
            let line = names_block.get(1).map_or(1, |l| l.0);
            return Err(Error::parse(line, "the first block is a single line of element names"));
        }
        let elements: Vec<String> = names_block[0].1.split_whitespace().map(str::to_string).collect();
        BinaryRelation::empty(elements.clone()).map_err(|e| Error::parse(names_block[0].0, e.to_string()))?;
        let star = parse_table(&elements, &blocks[1], "star")?;
        let bar = match blocks.get(2) {
            Some(b) if !b.is_empty() => Some(parse_table(&elements, b, "bar")?),
            _ => None,
        };
        let rel = match blocks.get(3) {
            Some(b) if !b.is_empty() => {
                // the header line of names is optional here
                let header = elements.join(" ");
                let mut lines = b.clone();
                if lines[0].1.split_whitespace().ne(header.split(' ')) {
                    lines.insert(0, (b[0].0, header.as_str()));
                }
                Some(BinaryRelation::parse_lines(lines.into_iter(), b[0].0)?)
            }
            _ => None,
        };
        let line = blocks[1].first().map_or(1, |l| l.0);
        PartialAlgebra::new(elements, star, bar, rel, None).map_err(|e| match e {
            Error::Argument(msg) => Error::parse(line, msg),
            other => other,
        })
    }

    pub fn to_alg_string(&self) -> String {
        let n = self.len();
        let mut out = self.elements.join(" ");
        out.push_str("\n%\n");
        let table = |t: &[Option<usize>], out: &mut String| {
            for i in 0..n {
                let row: Vec<&str> = (0..n)
                    .map(|j| t[i * n + j].map_or("-", |e| self.elements[e].as_str()))
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        };
        table(&self.star, &mut out);
        out.push_str("%\n");
        table(&self.bar, &mut out);
        out.push_str("%\n");
        let rel = self.rel.to_rel_string();
        // matrix rows only
        for line in rel.lines().skip(1) {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn with_kind(mut self, kind: AlgebraKind) -> Result<Self> {
        if !kind.is_partial() && (!self.is_total() || self.rel.pair_count() != self.len() * self.len()) {
            return Err(Error::Argument(format!("a {kind} needs total operations and the full relation")));
        }
        self.kind = kind;
        Ok(self)
    }

    /// The same operation tables with the full relation, for total tables.
    pub fn forget_relation(&self) -> Result<Self> {
        if !self.is_total() {
            return Err(Error::Argument("operations are not total".into()));
        }
        let mut a = self.clone();
        a.rel = BinaryRelation::full(self.elements.clone())?;
        a.kind = a.infer_kind();
        Ok(a)
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

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn relation(&self) -> &BinaryRelation {
        &self.rel
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.rel.index_of(name)
    }

    pub fn is_total(&self) -> bool {
        self.star.iter().all(Option::is_some) && self.bar.iter().all(Option::is_some)
    }

    #[inline]
    pub fn star(&self, x: usize, y: usize) -> Option<usize> {
        self.star[x * self.len() + y]
    }

    #[inline]
    pub fn bar(&self, x: usize, y: usize) -> Option<usize> {
        self.bar[x * self.len() + y]
    }

    pub fn op(&self, x: usize, y: usize, which: Op) -> Option<usize> {
        match which {
            Op::Star => self.star(x, y),
            Op::Bar => self.bar(x, y),
        }
    }

    pub fn apply_op(&self, x: &str, y: &str, which: Op) -> Result<&str> {
        let i = self.index_of(x)?;
        let j = self.index_of(y)?;
        self.op(i, j, which)
            .map(|k| self.elements[k].as_str())
            .ok_or_else(|| Error::Partiality {
                x: x.to_string(),
                y: y.to_string(),
                which: which.name(),
            })
    }

    fn names(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.elements[i].clone()).collect()
    }

    fn show(&self, v: Option<usize>) -> &str {
        v.map_or("undefined", |i| self.elements[i].as_str())
    }

    /// Checks every axiom of the claimed kind exhaustively.
    pub fn check_axioms(&self) -> AxiomReport {
        self.check_as(self.kind)
    }

    pub fn check_as(&self, kind: AlgebraKind) -> AxiomReport {
        let n = self.len();
        let mut v = Vec::new();
        let checked: Vec<&'static str> = match kind {
            AlgebraKind::Quandle => vec!["Q1", "Q2", "Q3"],
            AlgebraKind::Rack => vec!["Q2", "Q3"],
            AlgebraKind::PartialQuandle => vec!["PQ1", "PQ2", "PQ3", "PQ4", "PQ5"],
            AlgebraKind::PartialRack => vec!["PQ1", "PQ2", "PQ4", "PQ5"],
        };
        let rel = if kind.is_partial() {
            self.rel.clone()
        } else {
            BinaryRelation::full(self.elements.clone()).expect("valid names")
        };
        let total = !kind.is_partial();
        let pre: Preorder = rel.dominance();
        let licensed = |x: usize, y: usize| rel.get(x, y);
        let axiom_names = |q: &'static str, p: &'static str| if total { q } else { p };

        if checked.contains(&"PQ1") {
            for x in 0..n {
                for y in 0..n {
                    if licensed(x, y) && (self.star(x, y).is_none() || self.bar(x, y).is_none()) {
                        v.push(Violation {
                            axiom: "PQ1",
                            elements: self.names(&[x, y]),
                            detail: "operation undefined on a related pair".into(),
                        });
                    }
                }
            }
        }
        if checked.contains(&"PQ2") {
            for x in 0..n {
                for y in 0..n {
                    if !licensed(x, y) {
                        continue;
                    }
                    for (which, r) in [("*", self.star(x, y)), ("bar *", self.bar(x, y))] {
                        if let Some(r) = r {
                            if !pre.equivalent(r, x) {
                                v.push(Violation {
                                    axiom: "PQ2",
                                    elements: self.names(&[x, y]),
                                    detail: format!("x {which} y = {} is not equivalent to x", self.elements[r]),
                                });
                            }
                        }
                    }
                }
            }
        }
        if checked.contains(&"Q1") || checked.contains(&"PQ3") {
            for x in 0..n {
                if !licensed(x, x) {
                    continue;
                }
                if self.star(x, x) != Some(x) || self.bar(x, x) != Some(x) {
                    v.push(Violation {
                        axiom: axiom_names("Q1", "PQ3"),
                        elements: self.names(&[x]),
                        detail: format!(
                            "x * x = {}, x bar* x = {}",
                            self.show(self.star(x, x)),
                            self.show(self.bar(x, x))
                        ),
                    });
                }
            }
        }
        if checked.contains(&"Q2") || checked.contains(&"PQ4") {
            for x in 0..n {
                for y in 0..n {
                    if !licensed(x, y) {
                        continue;
                    }
                    let a = self.star(x, y).and_then(|s| self.bar(s, y));
                    let b = self.bar(x, y).and_then(|s| self.star(s, y));
                    if a != Some(x) || b != Some(x) {
                        v.push(Violation {
                            axiom: axiom_names("Q2", "PQ4"),
                            elements: self.names(&[x, y]),
                            detail: format!("(x * y) bar* y = {}, (x bar* y) * y = {}", self.show(a), self.show(b)),
                        });
                    }
                }
            }
        }
        if checked.contains(&"Q3") || checked.contains(&"PQ5") {
            for (x, y, z) in self.licensed_triples(&rel) {
                if let Err(detail) = self.distributive_at(1, x, y, z) {
                    v.push(Violation {
                        axiom: axiom_names("Q3", "PQ5"),
                        elements: self.names(&[x, y, z]),
                        detail,
                    });
                }
            }
        }
        AxiomReport {
            kind,
            checked,
            violations: v,
        }
    }

    fn licensed_triples(&self, rel: &BinaryRelation) -> Vec<(usize, usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if !rel.get(x, y) {
                    continue;
                }
                for z in 0..n {
                    if rel.get(x, z) && rel.get(y, z) {
                        out.push((x, y, z));
                    }
                }
            }
        }
        out
    }

    /// One of the four forms of right distributivity, numbered as
    /// `(x a y) b z = (x b z) a (y b z)` with `a, b` ranging over `*, bar *`:
    /// 1 = (*, *), 2 = (bar, *), 3 = (*, bar), 4 = (bar, bar).
    fn distributive_at(&self, variant: u8, x: usize, y: usize, z: usize) -> std::result::Result<(), String> {
        let (a, b) = match variant {
            1 => (Op::Star, Op::Star),
            2 => (Op::Bar, Op::Star),
            3 => (Op::Star, Op::Bar),
            4 => (Op::Bar, Op::Bar),
            _ => unreachable!("variants are 1..=4"),
        };
        let lhs = self.op(x, y, a).and_then(|xy| self.op(xy, z, b));
        let rhs = match (self.op(x, z, b), self.op(y, z, b)) {
            (Some(xz), Some(yz)) => self.op(xz, yz, a),
            _ => None,
        };
        match (lhs, rhs) {
            (Some(l), Some(r)) if l == r => Ok(()),
            _ => Err(format!("left side {}, right side {}", self.show(lhs), self.show(rhs))),
        }
    }

    /// Triples related pairwise by the relation at which the given
    /// distributivity variant fails.
    pub fn distributivity_violations(&self, variant: u8) -> Vec<(usize, usize, usize)> {
        assert!((1..=4).contains(&variant), "variant must be 1..=4");
        self.licensed_triples(&self.rel)
            .into_iter()
            .filter(|&(x, y, z)| self.distributive_at(variant, x, y, z).is_err())
            .collect()
    }

    /// `x * x = x = x bar* x` wherever `x R x`.
    pub fn idempotent_on_relation(&self) -> bool {
        (0..self.len())
            .filter(|&x| self.rel.get(x, x))
            .all(|x| self.star(x, x) == Some(x) && self.bar(x, x) == Some(x))
    }
}

fn parse_table(elements: &[String], block: &[(usize, &str)], what: &str) -> Result<Vec<Vec<Option<usize>>>> {
    let n = elements.len();
    let first = block.first().map_or(1, |l| l.0);
    if block.len() != n {
        return Err(Error::parse(first, format!("{what} table has {} rows, expected {n}", block.len())));
    }
    block
        .iter()
        .map(|&(line, text)| {
            let row: Vec<Option<usize>> = text
                .split_whitespace()
                .map(|tok| {
                    if tok == "-" {
                        Ok(None)
                    } else {
                        elements
                            .iter()
                            .position(|e| e == tok)
                            .map(Some)
                            .ok_or_else(|| Error::parse(line, format!("unknown element `{tok}`")))
                    }
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::parse(line, format!("{what} row has {} entries, expected {n}", row.len())));
            }
            Ok(row)
        })
        .collect()
}

/// Inverts each column of `*`. Uses every defined entry when that is
/// injective, otherwise only the entries on related pairs.
fn solve_bar(elements: &[String], star: &[Option<usize>], rel: &BinaryRelation) -> Result<Vec<Option<usize>>> {
    let n = elements.len();
    let mut bar = vec![None; n * n];
    for y in 0..n {
        let attempt = |restrict: bool| -> Option<Vec<Option<usize>>> {
            let mut col = vec![None; n];
            for x in 0..n {
                if restrict && !rel.get(x, y) {
                    continue;
                }
                if let Some(z) = star[x * n + y] {
                    if col[z].is_some() {
                        return None;
                    }
                    col[z] = Some(x);
                }
            }
            Some(col)
        };
        let col = attempt(false).or_else(|| attempt(true)).ok_or_else(|| {
            Error::Argument(format!(
                "cannot solve for bar *: column {} of * is not injective on related pairs",
                elements[y]
            ))
        })?;
        for (z, x) in col.into_iter().enumerate() {
            bar[z * n + y] = x;
        }
    }
    Ok(bar)
}
