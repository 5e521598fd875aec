//! Chain complexes of relations, racks, quandles and their partial and
//! defect variants, and their integer homology.

pub mod snf;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::PartialAlgebra;
use crate::error::{Error, Result};
use crate::relation::BinaryRelation;

pub use snf::{smith_normal_form, sparse_invariants, SmithForm, SmithInvariants, SparseMatrix};

/// Default top degree of a complex.
pub const DEFAULT_MAX_DEGREE: usize = 8;

/// Number of missing left-to-right related pairs in a tuple.
pub fn defect(rel: &BinaryRelation, w: &[usize]) -> usize {
    let mut missing = 0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if !rel.get(w[i], w[j]) {
                missing += 1;
            }
        }
    }
    missing
}

pub fn is_degenerate(w: &[usize]) -> bool {
    w.windows(2).any(|p| p[0] == p[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theory {
    /// Tuples of defect at most `k`, boundary by deletion only.
    RelDefect(usize),
    Rack,
    /// Rack complex modulo degenerate tuples.
    Quandle,
    /// Defect-0 tuples with the rack boundary.
    PartialRack,
    /// Partial rack complex modulo degenerate tuples.
    PartialQuandle,
    /// Defect at most `k` with the rack boundary, for total operations
    /// compatible with the relation.
    GeneralDefect(usize),
}

impl Theory {
    fn quotient(self) -> bool {
        matches!(self, Theory::Quandle | Theory::PartialQuandle)
    }

    fn max_defect(self) -> Option<usize> {
        match self {
            Theory::RelDefect(k) | Theory::GeneralDefect(k) => Some(k),
            Theory::PartialRack | Theory::PartialQuandle => Some(0),
            Theory::Rack | Theory::Quandle => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Theory::RelDefect(_) => "rel",
            Theory::Rack => "rack",
            Theory::Quandle => "quandle",
            Theory::PartialRack => "prack",
            Theory::PartialQuandle => "pquandle",
            Theory::GeneralDefect(_) => "gendefect",
        }
    }
}

/// Finitely generated abelian group `Z^free_rank + sum Z/d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Invariant factors as machine integers, for tests and output.
    pub fn torsion_u64(&self) -> Vec<u64> {
        self.invariant_factors.iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The tuples generating one chain group, in a fixed order.
#[derive(Debug, Clone)]
pub struct TupleBasis {
    degree: usize,
    tuples: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, u32>,
}

impl TupleBasis {
    fn new(degree: usize, tuples: Vec<Vec<usize>>) -> Self {
        let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        TupleBasis { degree, tuples, index }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn position(&self, w: &[usize]) -> Option<usize> {
        self.index.get(w).map(|&i| i as usize)
    }
}

/// A chain: integer combination of tuples of one degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain {
    degree: usize,
    terms: BTreeMap<Vec<usize>, i64>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn add_term(&mut self, w: Vec<usize>, coef: i64) {
        assert_eq!(w.len(), self.degree, "tuple length must equal the degree");
        let e = self.terms.entry(w).or_insert(0);
        *e += coef;
        if *e == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], i64)> {
        self.terms.iter().map(|(w, &c)| (w.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Chain {
        let mut c = Chain::zero(self.degree);
        for (w, v) in self.terms() {
            c.add_term(w.to_vec(), v * k);
        }
        c
    }

    pub fn plus(&self, other: &Chain) -> Chain {
        assert_eq!(self.degree, other.degree);
        let mut c = self.clone();
        for (w, v) in other.terms() {
            c.add_term(w.to_vec(), v);
        }
        c
    }

    /// Formats with element names, e.g. `-(1,4) + (1,3)`.
    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let tuple: Vec<&str> = w.iter().map(|&i| names[i].as_str()).collect();
            let body = format!("({})", tuple.join(","));
            let mag = c.unsigned_abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            if k == 0 {
                out.push_str(if *c < 0 { "-" } else { "" });
            } else {
                out.push_str(if *c < 0 { " - " } else { " + " });
            }
            out.push_str(&coef);
            out.push_str(&body);
        }
        out
    }
}

/// Order of a homology class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassOrder {
    Finite(BigInt),
    Infinite,
}

/// Outcome of solving `boundary(x) = c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCheck {
    pub witness: Option<Chain>,
    pub order: ClassOrder,
}

enum Source {
    Relation(BinaryRelation),
    Algebra(PartialAlgebra),
}

/// Graded bases and boundary matrices up to a top degree.
pub struct ChainComplex {
    theory: Theory,
    source: Source,
    names: Vec<String>,
    bases: Vec<TupleBasis>,
    /// `boundaries[n]` is the boundary out of degree `n`; index 0 unused.
    boundaries: Vec<SparseMatrix>,
    invariants: Vec<OnceLock<SmithInvariants>>,
    smith: Vec<OnceLock<SmithForm>>,
}

impl fmt::Debug for ChainComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainComplex")
            .field("theory", &self.theory)
            .field("ranks", &self.bases.iter().map(TupleBasis::len).collect::<Vec<_>>())
            .finish()
    }
}

impl ChainComplex {
    /// The defect-`k` complex of a relation.
    pub fn of_relation(rel: &BinaryRelation, k: usize, max_degree: usize) -> Result<Self> {
        Self::build(Theory::RelDefect(k), Source::Relation(rel.clone()), max_degree)
    }

    /// Any algebra-based theory. `RelDefect` uses only the relation.
    pub fn of_algebra(theory: Theory, alg: &PartialAlgebra, max_degree: usize) -> Result<Self> {
        match theory {
            Theory::RelDefect(k) => Self::of_relation(alg.relation(), k, max_degree),
            _ => Self::build(theory, Source::Algebra(alg.clone()), max_degree),
        }
    }

    fn build(theory: Theory, source: Source, max_degree: usize) -> Result<Self> {
        if max_degree < 1 {
            return Err(Error::Argument("the top degree must be at least 1".into()));
        }
        let (names, rel) = match &source {
            Source::Relation(r) => (r.elements().to_vec(), r.clone()),
            Source::Algebra(a) => (a.elements().to_vec(), a.relation().clone()),
        };
        if let Source::Algebra(a) = &source {
            check_source(theory, a)?;
        }
        let bases = enumerate_bases(theory, &rel, max_degree)?;
        let mut complex = ChainComplex {
            theory,
            source,
            names,
            boundaries: vec![SparseMatrix::new(1, bases[0].len())],
            invariants: (0..=max_degree + 1).map(|_| OnceLock::new()).collect(),
            smith: (0..=max_degree + 1).map(|_| OnceLock::new()).collect(),
            bases,
        };
        complex.boundaries.push(SparseMatrix::new(1, complex.bases[1].len()));
        for n in 2..=max_degree {
            let m = complex.assemble(n)?;
            complex.boundaries.push(m);
        }
        for n in 2..=max_degree {
            if !complex.boundaries[n - 1].mul(&complex.boundaries[n]).is_zero() {
                return Err(Error::Axiom(format!(
                    "boundary squared is not zero from degree {n}; the operation is not right distributive on the tuples used"
                )));
            }
        }
        Ok(complex)
    }

    /// Raw boundary of one tuple before projection onto the basis.
    pub fn tuple_boundary(&self, w: &[usize]) -> Result<Vec<(Vec<usize>, i64)>> {
        let alg = match &self.source {
            Source::Algebra(a) => Some(a),
            Source::Relation(_) => None,
        };
        raw_boundary(self.theory, alg, &self.names, w)
    }

    fn assemble(&self, n: usize) -> Result<SparseMatrix> {
        let target = &self.bases[n - 1];
        let cols = self.bases[n]
            .tuples()
            .iter()
            .map(|w| {
                let mut col = Vec::new();
                for (t, c) in self.tuple_boundary(w)? {
                    match target.position(&t) {
                        Some(i) => col.push((i as u32, c)),
                        None if self.theory.quotient() && is_degenerate(&t) => {}
                        None => {
                            return Err(Error::Axiom(format!(
                                "boundary of ({}) leaves the chain group at ({})",
                                self.join(w),
                                self.join(&t)
                            )))
                        }
                    }
                }
                Ok(col)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::from_columns(target.len(), cols))
    }

    fn join(&self, w: &[usize]) -> String {
        w.iter().map(|&i| self.names[i].as_str()).collect::<Vec<_>>().join(",")
    }

    pub fn theory(&self) -> Theory {
        self.theory
    }

    pub fn max_degree(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn basis(&self, n: usize) -> &TupleBasis {
        &self.bases[n]
    }

    pub fn rank(&self, n: usize) -> usize {
        self.bases[n].len()
    }

    /// Boundary matrix out of degree `n >= 1`.
    pub fn boundary_matrix(&self, n: usize) -> &SparseMatrix {
        &self.boundaries[n]
    }

    fn invariants(&self, n: usize) -> &SmithInvariants {
        self.invariants[n].get_or_init(|| sparse_invariants(&self.boundaries[n]))
    }

    /// `H_n`, needing the boundary out of degree `n + 1`.
    pub fn homology(&self, n: usize) -> Result<AbelianGroup> {
        if n >= self.max_degree() {
            return Err(Error::Argument(format!(
                "H_{n} needs the boundary out of degree {}, but the complex stops at {}",
                n + 1,
                self.max_degree()
            )));
        }
        let out_rank = if n == 0 { 0 } else { self.invariants(n).rank };
        let inv = self.invariants(n + 1);
        Ok(AbelianGroup {
            free_rank: self.rank(n) - out_rank - inv.rank,
            invariant_factors: inv.torsion.clone(),
        })
    }

    /// Homology in degrees `0..max_degree`, computed in parallel.
    pub fn homology_all(&self) -> Vec<AbelianGroup> {
        (1..=self.max_degree()).into_par_iter().for_each(|n| {
            self.invariants(n);
        });
        (0..self.max_degree())
            .map(|n| self.homology(n).expect("degree in range"))
            .collect()
    }

    /// A chain from named tuples; degenerate tuples vanish in quotient
    /// theories.
    pub fn chain(&self, terms: &[(i64, &[&str])]) -> Result<Chain> {
        let degree = terms.first().map_or(0, |t| t.1.len());
        let mut c = Chain::zero(degree);
        for (coef, names) in terms {
            if names.len() != degree {
                return Err(Error::Argument("all tuples of a chain need the same length".into()));
            }
            let w = names
                .iter()
                .map(|n| {
                    self.names
                        .iter()
                        .position(|e| e == n)
                        .ok_or_else(|| Error::UnknownName(n.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            c.add_term(w, *coef);
        }
        self.project(&c)
    }

    /// Drops degenerate tuples in quotient theories and checks that every
    /// remaining tuple is a generator.
    pub fn project(&self, c: &Chain) -> Result<Chain> {
        if c.degree() > self.max_degree() {
            return Err(Error::Argument(format!("degree {} exceeds the complex", c.degree())));
        }
        let basis = &self.bases[c.degree()];
        let mut out = Chain::zero(c.degree());
        for (w, v) in c.terms() {
            if basis.position(w).is_some() {
                out.add_term(w.to_vec(), v);
            } else if !(self.theory.quotient() && is_degenerate(w)) {
                return Err(Error::Argument(format!("({}) is not a generator of this complex", self.join(w))));
            }
        }
        Ok(out)
    }

    fn to_vector(&self, c: &Chain) -> Result<Vec<i64>> {
        let c = self.project(c)?;
        let basis = &self.bases[c.degree()];
        let mut v = vec![0; basis.len()];
        for (w, coef) in c.terms() {
            v[basis.position(w).expect("projected")] += coef;
        }
        Ok(v)
    }

    fn from_vector(&self, degree: usize, v: &[i64]) -> Chain {
        let mut c = Chain::zero(degree);
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                c.add_term(self.bases[degree].tuples()[i].clone(), x);
            }
        }
        c
    }

    pub fn boundary(&self, c: &Chain) -> Result<Chain> {
        let n = c.degree();
        if n == 0 {
            return Err(Error::Argument("degree 0 chains have no boundary".into()));
        }
        let v = self.to_vector(c)?;
        Ok(self.from_vector(n - 1, &self.boundaries[n].mul_vec(&v)))
    }

    fn smith(&self, n: usize) -> &SmithForm {
        self.smith[n].get_or_init(|| smith_normal_form(&self.boundaries[n].to_dense()))
    }

    /// Solves `boundary(x) = c` for a cycle `c` and reports the order of its
    /// homology class.
    pub fn express_as_boundary(&self, c: &Chain) -> Result<BoundaryCheck> {
        let n = c.degree();
        if n >= self.max_degree() {
            return Err(Error::Argument(format!("degree {n} needs the boundary out of degree {}", n + 1)));
        }
        if n >= 1 && !self.boundary(c)?.is_zero() {
            return Err(Error::Argument("the chain is not a cycle".into()));
        }
        let cv = self.to_vector(c)?;
        let s = self.smith(n + 1);
        let uc: Vec<BigInt> = s
            .u
            .iter()
            .map(|row| row.iter().zip(&cv).map(|(a, &b)| a * b).sum())
            .collect();
        let mut order = BigInt::one();
        let mut infinite = false;
        let mut y = vec![BigInt::zero(); self.rank(n + 1)];
        for (i, x) in uc.iter().enumerate() {
            if i < s.rank {
                let d = &s.diagonal[i];
                let g = d.gcd(x);
                order = order.lcm(&(d / g));
                y[i] = x / d;
            } else if !x.is_zero() {
                infinite = true;
            }
        }
        let witness = if !infinite && order.is_one() {
            let x: Vec<i64> = s
                .v
                .iter()
                .map(|row| {
                    let t: BigInt = row.iter().zip(&y).map(|(a, b)| a * b).sum();
                    t.to_i64().expect("witness coefficient fits in i64")
                })
                .collect();
            Some(self.from_vector(n + 1, &x))
        } else {
            None
        };
        Ok(BoundaryCheck {
            witness,
            order: if infinite { ClassOrder::Infinite } else { ClassOrder::Finite(order) },
        })
    }
}

fn check_source(theory: Theory, a: &PartialAlgebra) -> Result<()> {
    match theory {
        Theory::Rack | Theory::Quandle => {
            if !a.is_total() {
                return Err(Error::Argument(format!("the {} complex needs total operations", theory.name())));
            }
            if theory == Theory::Quandle {
                let n = a.len();
                if let Some(x) = (0..n).find(|&x| a.star(x, x) != Some(x)) {
                    return Err(Error::Axiom(format!("{} * {0} is not {0}", a.elements()[x])));
                }
            }
        }
        Theory::PartialQuandle => {
            if !a.idempotent_on_relation() {
                return Err(Error::Axiom("x * x = x fails for some x related to itself".into()));
            }
        }
        Theory::GeneralDefect(_) => {
            let n = a.len();
            let rel = a.relation();
            let pre = rel.dominance();
            for x in 0..n {
                for y in 0..n {
                    let Some(xy) = a.star(x, y) else {
                        return Err(Error::Argument("the defect complex needs a total operation".into()));
                    };
                    if !pre.equivalent(x, xy) {
                        return Err(Error::Axiom(format!(
                            "{} * {} is not equivalent to {}",
                            a.elements()[x],
                            a.elements()[y],
                            a.elements()[x]
                        )));
                    }
                }
            }
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let l = a.star(a.star(x, y).unwrap(), z);
                        let r = a.star(a.star(x, z).unwrap(), a.star(y, z).unwrap());
                        if l != r {
                            return Err(Error::Axiom(format!(
                                "right distributivity fails at ({}, {}, {})",
                                a.elements()[x],
                                a.elements()[y],
                                a.elements()[z]
                            )));
                        }
                    }
                }
            }
        }
        Theory::PartialRack | Theory::RelDefect(_) => {}
    }
    Ok(())
}

/// Tuples kept per degree before giving up.
const MAX_TUPLES: usize = 2_000_000;

fn enumerate_bases(theory: Theory, rel: &BinaryRelation, max_degree: usize) -> Result<Vec<TupleBasis>> {
    let n = rel.len();
    let k = theory.max_defect();
    let mut bases = vec![TupleBasis::new(0, vec![Vec::new()])];
    // (tuple, defect) pairs of the previous degree, degenerate ones included
    let mut layer: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    for d in 1..=max_degree {
        let mut next = Vec::new();
        for (w, df) in &layer {
            for x in 0..n {
                let added = w.iter().filter(|&&y| !rel.get(y, x)).count();
                let ndf = df + added;
                if k.is_some_and(|k| ndf > k) {
                    continue;
                }
                let mut t = w.clone();
                t.push(x);
                next.push((t, ndf));
            }
            if next.len() > MAX_TUPLES {
                return Err(Error::Capacity(format!(
                    "more than {MAX_TUPLES} tuples in degree {d}; lower the top degree"
                )));
            }
        }
        let tuples = next
            .iter()
            .filter(|(t, _)| !(theory.quotient() && is_degenerate(t)))
            .map(|(t, _)| t.clone())
            .collect();
        bases.push(TupleBasis::new(d, tuples));
        layer = next;
    }
    Ok(bases)
}

fn raw_boundary(
    theory: Theory,
    alg: Option<&PartialAlgebra>,
    names: &[String],
    w: &[usize],
) -> Result<Vec<(Vec<usize>, i64)>> {
    let n = w.len();
    if n <= 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
        let mut del = w.to_vec();
        del.remove(i);
        match theory {
            Theory::RelDefect(_) => out.push((del, sign)),
            _ => {
                let alg = alg.expect("algebra theories carry an algebra");
                let mut act = Vec::with_capacity(n - 1);
                for &x in &w[..i] {
                    act.push(alg.star(x, w[i]).ok_or_else(|| Error::Partiality {
                        x: names[x].clone(),
                        y: names[w[i]].clone(),
                        which: "star",
                    })?);
                }
                act.extend_from_slice(&w[i + 1..]);
                if act != del {
                    out.push((del, sign));
                    out.push((act, -sign));
                }
            }
        }
    }
    let mut merged: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    for (t, c) in out {
        *merged.entry(t).or_insert(0) += c;
    }
    Ok(merged.into_iter().filter(|(_, c)| *c != 0).collect())
}
