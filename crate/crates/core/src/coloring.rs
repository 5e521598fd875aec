//! Colorings of diagrams with a relation on components by partial quandles.
//!
//! At a positive crossing the outgoing under-arc gets `f(ui) * f(o)`; at a
//! negative one the incoming under-arc gets `f(uo) * f(o)`. In both cases
//! the over-strand's normal points away from the first operand. Only good
//! crossings carry this rule. Type II colorings also give both under-arcs of
//! a bad crossing the same color.

use std::fmt;

use rayon::prelude::*;

use crate::algebra::{AlgebraKind, PartialAlgebra};
use crate::chain::{Chain, ChainComplex, Theory};
use crate::diagram::{LabeledDiagram, Mode, Sign};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColoringType {
    I,
    II,
}

impl ColoringType {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "I" | "1" => Ok(ColoringType::I),
            "II" | "2" => Ok(ColoringType::II),
            _ => Err(Error::Argument(format!("coloring type must be I or II, found `{s}`"))),
        }
    }
}

impl fmt::Display for ColoringType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColoringType::I => "I",
            ColoringType::II => "II",
        })
    }
}

/// Element index per arc, in the diagram's arc order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    pub kind: ColoringType,
    pub colors: Vec<usize>,
}

impl Coloring {
    /// Lines `arc = element`.
    pub fn to_text(&self, ld: &LabeledDiagram, alg: &PartialAlgebra) -> String {
        ld.diagram()
            .arcs()
            .iter()
            .zip(&self.colors)
            .map(|(a, &c)| format!("{} = {}\n", a.name, alg.elements()[c]))
            .collect()
    }

    pub fn parse(text: &str, ld: &LabeledDiagram, alg: &PartialAlgebra, kind: ColoringType) -> Result<Self> {
        let d = ld.diagram();
        let mut colors = vec![None; d.arcs().len()];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (arc, el) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected `arc = element`"))?;
            let a = d.arc_index(arc.trim())?;
            if colors[a].replace(alg.index_of(el.trim())?).is_some() {
                return Err(Error::parse(i + 1, format!("arc `{}` colored twice", arc.trim())));
            }
        }
        let colors = colors
            .into_iter()
            .enumerate()
            .map(|(a, c)| c.ok_or_else(|| Error::Argument(format!("arc `{}` has no color", d.arcs()[a].name))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Coloring { kind, colors })
    }
}

/// One crossing as seen by the coloring rules.
#[derive(Clone, Copy)]
struct Rule {
    sign: Sign,
    good: bool,
    ui: usize,
    uo: usize,
    o: usize,
}

struct Problem<'a> {
    alg: &'a PartialAlgebra,
    kind: ColoringType,
    rules: Vec<Rule>,
    /// `related[a][b]`: arcs related through their components.
    related: Vec<Vec<bool>>,
    /// Arcs in search order.
    order: Vec<usize>,
}

fn problem<'a>(ld: &LabeledDiagram, alg: &'a PartialAlgebra, kind: ColoringType) -> Result<Problem<'a>> {
    if ld.mode() != Mode::Components {
        return Err(Error::Argument("colorings need a relation on components".into()));
    }
    let report = alg.check_as(AlgebraKind::PartialQuandle);
    if !report.passed() {
        let first = report.violations.first().map(|v| v.to_string()).unwrap_or_default();
        return Err(Error::Axiom(format!("not a partial quandle with relation: {first}")));
    }
    let d = ld.diagram();
    let good = d.classify_crossings(ld.relation())?;
    let rules = (0..d.crossing_count())
        .map(|x| {
            let (ui, uo, o) = d.crossing_arcs(x);
            Rule {
                sign: d.crossings()[x].sign,
                good: good[x],
                ui,
                uo,
                o,
            }
        })
        .collect();
    let n = d.arcs().len();
    let related = (0..n)
        .map(|a| (0..n).map(|b| ld.arcs_related(a, b)).collect())
        .collect();
    // components in order, arcs along each strand
    let mut order = Vec::with_capacity(n);
    for c in d.components() {
        for &e in &c.edges {
            let a = d.arc_of_edge(e);
            if !order.contains(&a) {
                order.push(a);
            }
        }
    }
    Ok(Problem {
        alg,
        kind,
        rules,
        related,
        order,
    })
}

impl Problem<'_> {
    /// Fills forced colors; `false` on a contradiction.
    fn propagate(&self, f: &mut [Option<usize>]) -> bool {
        loop {
            let mut changed = false;
            for r in &self.rules {
                let (dst, value) = if r.good {
                    let (src, dst) = match r.sign {
                        Sign::Positive => (r.ui, r.uo),
                        Sign::Negative => (r.uo, r.ui),
                    };
                    let (Some(x), Some(y)) = (f[src], f[r.o]) else { continue };
                    let Some(z) = self.alg.star(x, y) else { return false };
                    (dst, z)
                } else if self.kind == ColoringType::II {
                    match (f[r.ui], f[r.uo]) {
                        (Some(x), None) => (r.uo, x),
                        (None, Some(y)) => (r.ui, y),
                        (Some(x), Some(y)) if x != y => return false,
                        _ => continue,
                    }
                } else {
                    continue;
                };
                match f[dst] {
                    Some(v) if v != value => return false,
                    Some(_) => {}
                    None => {
                        f[dst] = Some(value);
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn monotone(&self, f: &[Option<usize>]) -> bool {
        let rel = self.alg.relation();
        for (a, row) in self.related.iter().enumerate() {
            let Some(x) = f[a] else { continue };
            for (b, &r) in row.iter().enumerate() {
                if r {
                    if let Some(y) = f[b] {
                        if !rel.get(x, y) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn search(&self, mut f: Vec<Option<usize>>, out: &mut Vec<Vec<usize>>) {
        if !self.propagate(&mut f) || !self.monotone(&f) {
            return;
        }
        match self.order.iter().find(|&&a| f[a].is_none()) {
            None => out.push(f.into_iter().map(|c| c.expect("complete")).collect()),
            Some(&a) => {
                for c in 0..self.alg.len() {
                    let mut g = f.clone();
                    g[a] = Some(c);
                    self.search(g, out);
                }
            }
        }
    }

    fn run(&self) -> Vec<Vec<usize>> {
        let n = self.order.len();
        let Some(&first) = self.order.first() else { return vec![vec![]] };
        (0..self.alg.len())
            .into_par_iter()
            .map(|c| {
                let mut f = vec![None; n];
                f[first] = Some(c);
                let mut out = Vec::new();
                self.search(f, &mut out);
                out
            })
            .collect::<Vec<_>>()
            .concat()
    }
}

/// All colorings of the given type, in a fixed order: components in
/// declaration order, colors in element order.
pub fn enumerate_colorings(ld: &LabeledDiagram, alg: &PartialAlgebra, kind: ColoringType) -> Result<Vec<Coloring>> {
    let p = problem(ld, alg, kind)?;
    Ok(p.run().into_iter().map(|colors| Coloring { kind, colors }).collect())
}

pub fn count_colorings(ld: &LabeledDiagram, alg: &PartialAlgebra, kind: ColoringType) -> Result<usize> {
    Ok(problem(ld, alg, kind)?.run().len())
}

/// Checks a complete assignment against the rules of its type.
pub fn is_coloring(ld: &LabeledDiagram, alg: &PartialAlgebra, col: &Coloring) -> Result<bool> {
    let p = problem(ld, alg, col.kind)?;
    if col.colors.len() != ld.diagram().arcs().len() || col.colors.iter().any(|&c| c >= alg.len()) {
        return Ok(false);
    }
    let mut f: Vec<Option<usize>> = col.colors.iter().copied().map(Some).collect();
    Ok(p.propagate(&mut f) && p.monotone(&f))
}

/// The 2-chain of one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCycle {
    pub component: String,
    pub chain: Chain,
}

/// Per component, the sum over good crossings whose under-strand lies on it
/// of `sign * (x, y)`: `x` the under-arc color the normal points away from,
/// `y` the over-arc color. Each sum is a cycle of the partial quandle
/// complex.
pub fn cycle_from_coloring(ld: &LabeledDiagram, alg: &PartialAlgebra, col: &Coloring) -> Result<Vec<ComponentCycle>> {
    if col.kind != ColoringType::II {
        return Err(Error::Argument("cycles come from type II colorings".into()));
    }
    if !is_coloring(ld, alg, col)? {
        return Err(Error::Argument("not a coloring of this diagram".into()));
    }
    let complex = ChainComplex::of_algebra(Theory::PartialQuandle, alg, 2)?;
    let d = ld.diagram();
    let good = d.classify_crossings(ld.relation())?;
    let mut chains: Vec<Chain> = vec![Chain::zero(2); d.components().len()];
    for (x, c) in d.crossings().iter().enumerate() {
        if !good[x] {
            continue;
        }
        let (ui, uo, o) = d.crossing_arcs(x);
        let (arc, coef) = match c.sign {
            Sign::Positive => (ui, 1),
            Sign::Negative => (uo, -1),
        };
        let pair = vec![col.colors[arc], col.colors[o]];
        debug_assert!(alg.relation().get(pair[0], pair[1]));
        chains[d.component_of_edge(c.under_in())].add_term(pair, coef);
    }
    d.components()
        .iter()
        .zip(chains)
        .map(|(comp, chain)| {
            let chain = complex.project(&chain)?;
            if !complex.boundary(&chain)?.is_zero() {
                return Err(Error::Axiom(format!("chain of component {} is not a cycle", comp.name)));
            }
            Ok(ComponentCycle {
                component: comp.name.clone(),
                chain,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Indicator {
    Consistent,
    Obstructed,
}

/// Coloring counts are invariant under allowed moves, so different counts
/// rule out a move sequence in either direction.
pub fn coloring_indicator(
    ld1: &LabeledDiagram,
    ld2: &LabeledDiagram,
    alg: &PartialAlgebra,
    kind: ColoringType,
) -> Result<Indicator> {
    if ld1.mode() != Mode::Components || ld2.mode() != Mode::Components {
        return Err(Error::Argument("indicator needs relations on components".into()));
    }
    if ld1.relation() != ld2.relation() {
        return Err(Error::Argument("the diagrams have different components or relations".into()));
    }
    let (a, b) = (count_colorings(ld1, alg, kind)?, count_colorings(ld2, alg, kind)?);
    Ok(if a == b {
        Indicator::Consistent
    } else {
        Indicator::Obstructed
    })
}
