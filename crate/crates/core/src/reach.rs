//! Conditional theories over diagrams: which moves are allowed, and what
//! can be reached from a diagram within bounds.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;

use crate::diagram::{apply_move, enumerate_moves, Condition, LabeledDiagram, Mode, Move, MoveKind, MoveScheme};
use crate::error::{Error, Result};
use crate::term::BoolTerm;

/// Propositional formula over atoms `a1..an`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Wff {
    Const(bool),
    /// 1-based atom index.
    Atom(usize),
    Not(Box<Wff>),
    And(Box<Wff>, Box<Wff>),
    Or(Box<Wff>, Box<Wff>),
}

impl Wff {
    pub fn atom(i: usize) -> Wff {
        Wff::Atom(i)
    }

    pub fn not(w: Wff) -> Wff {
        Wff::Not(Box::new(w))
    }

    pub fn and(a: Wff, b: Wff) -> Wff {
        Wff::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Wff, b: Wff) -> Wff {
        Wff::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of `a1..an`; `T` when `n = 0`.
    pub fn all_atoms(n: usize) -> Wff {
        (1..=n).map(Wff::Atom).reduce(Wff::and).unwrap_or(Wff::Const(true))
    }

    /// Same syntax as lattice terms (`&`, `|`, `!`, parentheses) with atoms
    /// `a1`, `a2`, ... and constants `T`, `F` (or `1`, `0`).
    pub fn parse(text: &str) -> Result<Wff> {
        fn conv(t: &BoolTerm) -> Result<Wff> {
            Ok(match t {
                BoolTerm::Zero => Wff::Const(false),
                BoolTerm::One => Wff::Const(true),
                BoolTerm::Var(v) if v == "T" => Wff::Const(true),
                BoolTerm::Var(v) if v == "F" => Wff::Const(false),
                BoolTerm::Var(v) => {
                    let i = v
                        .strip_prefix('a')
                        .and_then(|n| n.parse::<usize>().ok())
                        .filter(|&i| i > 0)
                        .ok_or_else(|| Error::Argument(format!("`{v}` is not an atom a1, a2, ...")))?;
                    Wff::Atom(i)
                }
                BoolTerm::Not(a) => Wff::not(conv(a)?),
                BoolTerm::Meet(a, b) => Wff::and(conv(a)?, conv(b)?),
                BoolTerm::Join(a, b) => Wff::or(conv(a)?, conv(b)?),
            })
        }
        conv(&BoolTerm::parse(text)?)
    }

    /// Largest atom index used.
    pub fn atom_count(&self) -> usize {
        match self {
            Wff::Const(_) => 0,
            Wff::Atom(i) => *i,
            Wff::Not(a) => a.atom_count(),
            Wff::And(a, b) | Wff::Or(a, b) => a.atom_count().max(b.atom_count()),
        }
    }

    pub fn eval(&self, assignment: &[bool]) -> Result<bool> {
        if self.atom_count() > assignment.len() {
            return Err(Error::Argument(format!(
                "formula uses {} atoms but {} values were given",
                self.atom_count(),
                assignment.len()
            )));
        }
        Ok(self.eval_unchecked(assignment))
    }

    fn eval_unchecked(&self, v: &[bool]) -> bool {
        match self {
            Wff::Const(b) => *b,
            Wff::Atom(i) => v[i - 1],
            Wff::Not(a) => !a.eval_unchecked(v),
            Wff::And(a, b) => a.eval_unchecked(v) && b.eval_unchecked(v),
            Wff::Or(a, b) => a.eval_unchecked(v) || b.eval_unchecked(v),
        }
    }
}

impl fmt::Display for Wff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wff::Const(true) => f.write_str("T"),
            Wff::Const(false) => f.write_str("F"),
            Wff::Atom(i) => write!(f, "a{i}"),
            Wff::Not(a) => write!(f, "!{a}"),
            Wff::And(a, b) => write!(f, "({a} & {b})"),
            Wff::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// The shipped move predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    Always,
    /// Crossing counts of source and target have the same parity.
    Parity,
    /// The crossing count does not drop; `strict` also demands it grows.
    ValueMonotone { strict: bool },
    /// Every arc passed over relates to the moving arc.
    ArcC1,
    /// Same rule read on components.
    ComponentRel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalTheory {
    predicate: Predicate,
    scheme: MoveScheme,
}

impl ConditionalTheory {
    pub fn new(predicate: Predicate) -> Self {
        ConditionalTheory {
            predicate,
            scheme: MoveScheme::default(),
        }
    }

    pub fn with_scheme(mut self, scheme: MoveScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// `always`, `parity`, `value_monotone[:weak|strict]`, `arc_C1`,
    /// `component_rel`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (spec, None),
        };
        let p = match (name, param) {
            ("always", None) => Predicate::Always,
            ("parity", None) => Predicate::Parity,
            ("value_monotone", None | Some("weak") | Some("weak,crossing_count")) => {
                Predicate::ValueMonotone { strict: false }
            }
            ("value_monotone", Some("strict") | Some("strict,crossing_count")) => {
                Predicate::ValueMonotone { strict: true }
            }
            ("arc_C1" | "arc_c1", None) => Predicate::ArcC1,
            ("component_rel", None) => Predicate::ComponentRel,
            _ => return Err(Error::Argument(format!("unknown theory `{spec}`"))),
        };
        Ok(ConditionalTheory::new(p))
    }

    pub fn predicate(&self) -> Predicate {
        self.predicate
    }

    pub fn scheme(&self) -> &MoveScheme {
        &self.scheme
    }

    fn check_mode(&self, mode: Mode) -> Result<()> {
        match (self.predicate, mode) {
            (Predicate::ArcC1, Mode::Components) => {
                Err(Error::Argument("arc_C1 needs a relation on arcs".into()))
            }
            (Predicate::ComponentRel, Mode::Arcs) => {
                Err(Error::Argument("component_rel needs a relation on components".into()))
            }
            _ => Ok(()),
        }
    }

    /// Atom values and formula for one candidate move.
    pub fn atoms(&self, from: &LabeledDiagram, to: &LabeledDiagram, m: &Move) -> (Vec<bool>, Wff) {
        let (n1, n2) = (from.diagram().crossing_count(), to.diagram().crossing_count());
        match self.predicate {
            Predicate::Always => (vec![], Wff::Const(true)),
            Predicate::Parity => (vec![n1 % 2 == n2 % 2], Wff::atom(1)),
            Predicate::ValueMonotone { strict } => {
                let w = if strict {
                    Wff::and(Wff::atom(1), Wff::not(Wff::atom(2)))
                } else {
                    Wff::atom(1)
                };
                (vec![n1 <= n2, n2 <= n1], w)
            }
            Predicate::ArcC1 | Predicate::ComponentRel => {
                let d = from.diagram();
                let c = d.arc_index(&m.moving).ok();
                let bits: Vec<bool> = m
                    .passed
                    .iter()
                    .map(|a| match (d.arc_index(a), c) {
                        (Ok(a), Some(c)) => from.arcs_related(a, c),
                        _ => false,
                    })
                    .collect();
                let n = bits.len();
                (bits, Wff::all_atoms(n))
            }
        }
    }

    /// Whether `m` is a morphism of the theory.
    pub fn licensed(&self, from: &LabeledDiagram, m: &Move) -> Result<bool> {
        self.check_mode(from.mode())?;
        let to = apply_move(from, m, &self.scheme)?.result;
        let (bits, w) = self.atoms(from, &to, m);
        w.eval(&bits)
    }

    /// Licensed moves with their targets, in enumeration order.
    pub fn licensed_moves(&self, from: &LabeledDiagram) -> Result<Vec<(Move, LabeledDiagram)>> {
        self.check_mode(from.mode())?;
        let mut out = Vec::new();
        for m in enumerate_moves(from, Condition::Unconditional)? {
            let to = apply_move(from, &m, &self.scheme)?.result;
            let (bits, w) = self.atoms(from, &to, &m);
            if w.eval(&bits)? {
                out.push((m, to));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ConditionalTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.predicate {
            Predicate::Always => f.write_str("always"),
            Predicate::Parity => f.write_str("parity"),
            Predicate::ValueMonotone { strict: false } => f.write_str("value_monotone:weak"),
            Predicate::ValueMonotone { strict: true } => f.write_str("value_monotone:strict"),
            Predicate::ArcC1 => f.write_str("arc_C1"),
            Predicate::ComponentRel => f.write_str("component_rel"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// `None` means two more than the source diagram.
    pub max_crossings: Option<usize>,
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_crossings: None,
            max_states: 20_000,
            max_depth: 50,
        }
    }
}

impl Bounds {
    /// Defaults, with `RELKNOT_MAX_STATES` overriding the state bound.
    pub fn from_env() -> Self {
        let mut b = Bounds::default();
        if let Some(n) = std::env::var("RELKNOT_MAX_STATES").ok().and_then(|v| v.parse().ok()) {
            b.max_states = n;
        }
        b
    }
}

#[derive(Debug, Clone)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub kind: MoveKind,
    pub label: String,
}

/// States reached from a source, deduplicated up to isomorphism.
#[derive(Debug, Clone)]
pub struct MoveGraph {
    nodes: Vec<LabeledDiagram>,
    depth: Vec<usize>,
    /// First move reaching each node, from its BFS parent.
    parent: Vec<Option<(usize, Move)>>,
    edges: Vec<GraphEdge>,
    index: HashMap<Vec<u32>, usize>,
    truncated: bool,
}

impl MoveGraph {
    pub fn nodes(&self) -> &[LabeledDiagram] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    /// Some state had moves that were not followed because of a bound.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn find(&self, ld: &LabeledDiagram) -> Option<usize> {
        self.index.get(&ld.canonical_form()).copied()
    }

    /// Moves from the source to `node` along the BFS tree.
    pub fn path_to(&self, node: usize) -> Vec<Move> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some((p, m)) = &self.parent[cur] {
            path.push(m.clone());
            cur = *p;
        }
        path.reverse();
        path
    }

    fn closure(&self, start: usize, forward: bool) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            if forward {
                adj[e.from].push(e.to);
            } else {
                adj[e.to].push(e.from);
            }
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        (0..self.nodes.len()).filter(|&v| seen[v]).collect()
    }

    /// Nodes reachable from `node` inside the explored graph.
    pub fn out_set(&self, node: usize) -> Vec<usize> {
        self.closure(node, true)
    }

    /// Nodes from which `node` is reachable inside the explored graph.
    pub fn in_set(&self, node: usize) -> Vec<usize> {
        self.closure(node, false)
    }

    /// Strongly connected components as a partial order.
    pub fn condense(&self) -> Condensation {
        let mut g = DiGraph::<(), ()>::with_capacity(self.nodes.len(), self.edges.len());
        let ids: Vec<_> = (0..self.nodes.len()).map(|_| g.add_node(())).collect();
        for e in &self.edges {
            g.add_edge(ids[e.from], ids[e.to], ());
        }
        let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        classes.sort();
        let mut class_of = vec![0; self.nodes.len()];
        for (i, c) in classes.iter().enumerate() {
            for &v in c {
                class_of[v] = i;
            }
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| (class_of[e.from], class_of[e.to]))
            .filter(|(a, b)| a != b)
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut terminal = vec![true; classes.len()];
        for &(a, _) in &edges {
            terminal[a] = false;
        }
        Condensation {
            classes,
            class_of,
            edges,
            terminal,
        }
    }

    /// Graphviz text.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph moves {\n");
        for (i, ld) in self.nodes.iter().enumerate() {
            out.push_str(&format!(
                "  n{i} [label=\"{i}: {} crossings\"];\n",
                ld.diagram().crossing_count()
            ));
        }
        for e in &self.edges {
            out.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", e.from, e.to, e.kind));
        }
        out.push_str("}\n");
        out
    }
}

/// The poset of strongly connected components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// Covering-or-not edges between distinct classes, deduplicated.
    pub edges: Vec<(usize, usize)>,
    /// Classes with no outgoing edge.
    pub terminal: Vec<bool>,
}

impl Condensation {
    /// Whether class `b` is reachable from class `a`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.classes.len()];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            if v == b {
                return true;
            }
            for &(x, y) in &self.edges {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }
}

/// Breadth-first closure of licensed moves from `source`.
pub fn explore(theory: &ConditionalTheory, source: &LabeledDiagram, bounds: Bounds) -> Result<MoveGraph> {
    explore_until(theory, source, bounds, None)
}

fn explore_until(
    theory: &ConditionalTheory,
    source: &LabeledDiagram,
    bounds: Bounds,
    target: Option<&[u32]>,
) -> Result<MoveGraph> {
    theory.check_mode(source.mode())?;
    if bounds.max_states == 0 {
        return Err(Error::Argument("state bound must be positive".into()));
    }
    let max_crossings = bounds
        .max_crossings
        .unwrap_or(source.diagram().crossing_count() + 2);
    let mut g = MoveGraph {
        nodes: vec![source.clone()],
        depth: vec![0],
        parent: vec![None],
        edges: Vec::new(),
        index: HashMap::from([(source.canonical_form(), 0)]),
        truncated: false,
    };
    let mut frontier = vec![0usize];
    let mut level = 0;
    while !frontier.is_empty() {
        if target.is_some_and(|t| g.index.contains_key(t)) {
            break;
        }
        if level >= bounds.max_depth {
            // anything licensed from here is beyond the depth bound
            let more = frontier
                .par_iter()
                .map(|&v| theory.licensed_moves(&g.nodes[v]).map(|m| !m.is_empty()))
                .collect::<Result<Vec<_>>>()?;
            g.truncated |= more.into_iter().any(|b| b);
            break;
        }
        let expanded = frontier
            .par_iter()
            .map(|&v| {
                theory.licensed_moves(&g.nodes[v]).map(|ms| {
                    ms.into_iter()
                        .map(|(m, to)| {
                            let key = to.canonical_form();
                            (m, to, key)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut next = Vec::new();
        let mut seen_edges: HashSet<(usize, usize)> = HashSet::new();
        for (&v, succ) in frontier.iter().zip(expanded) {
            for (m, to, key) in succ {
                if to.diagram().crossing_count() > max_crossings {
                    g.truncated = true;
                    continue;
                }
                let w = match g.index.get(&key) {
                    Some(&w) => w,
                    None => {
                        if g.nodes.len() >= bounds.max_states {
                            g.truncated = true;
                            continue;
                        }
                        let w = g.nodes.len();
                        g.nodes.push(to);
                        g.depth.push(level + 1);
                        g.parent.push(Some((v, m.clone())));
                        g.index.insert(key, w);
                        next.push(w);
                        w
                    }
                };
                if seen_edges.insert((v, w)) {
                    g.edges.push(GraphEdge {
                        from: v,
                        to: w,
                        kind: m.kind,
                        label: m.to_string(),
                    });
                }
            }
        }
        frontier = next;
        level += 1;
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reach {
    Yes(Vec<Move>),
    /// Not found; exhaustive only if `truncated` is false.
    NoWithinBounds { truncated: bool, states: usize },
}

/// Searches for a licensed move sequence from `from` to `to`.
pub fn reachable(
    theory: &ConditionalTheory,
    from: &LabeledDiagram,
    to: &LabeledDiagram,
    bounds: Bounds,
) -> Result<Reach> {
    let key = to.canonical_form();
    let g = explore_until(theory, from, bounds, Some(&key))?;
    Ok(match g.index.get(&key) {
        Some(&w) => Reach::Yes(g.path_to(w)),
        None => Reach::NoWithinBounds {
            truncated: g.truncated,
            states: g.node_count(),
        },
    })
}
