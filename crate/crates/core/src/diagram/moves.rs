//! Reidemeister moves on labeled diagrams.
//!
//! Every move rewires a copy of the diagram, labels the arcs it creates by
//! lattice terms over the old arcs, and evaluates the new relation from
//! those labels. The labels come from a [`MoveScheme`].

use std::collections::HashSet;
use std::fmt;

use super::{assemble, ArcLabel, Crossing, Dart, Diagram, LabeledDiagram, Mode, Port, RawDiagram, RawEdge, Sign, Tag};
use crate::error::{Error, Result};
use crate::relation::BinaryRelation;
use crate::term::{lattice_leq, BoolTerm, TermRelation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    R1Plus,
    R1Minus,
    R2Plus,
    R2Minus,
    R3,
}

impl MoveKind {
    pub const ALL: [MoveKind; 5] = [
        MoveKind::R1Plus,
        MoveKind::R1Minus,
        MoveKind::R2Plus,
        MoveKind::R2Minus,
        MoveKind::R3,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "R1+" => MoveKind::R1Plus,
            "R1-" => MoveKind::R1Minus,
            "R2+" => MoveKind::R2Plus,
            "R2-" => MoveKind::R2Minus,
            "R3" => MoveKind::R3,
            _ => return Err(Error::Argument(format!("unknown move type `{s}`"))),
        })
    }

    /// Change in the number of crossings.
    pub fn crossing_delta(self) -> i64 {
        match self {
            MoveKind::R1Plus => 1,
            MoveKind::R1Minus => -1,
            MoveKind::R2Plus => 2,
            MoveKind::R2Minus => -2,
            MoveKind::R3 => 0,
        }
    }

    /// Placeholders a template of this move may use.
    fn placeholders(self) -> &'static [&'static str] {
        match self {
            MoveKind::R1Plus => &["c"],
            MoveKind::R1Minus => &["x", "y", "o"],
            MoveKind::R2Plus => &["a", "c"],
            MoveKind::R2Minus => &["c", "u1", "u2"],
            MoveKind::R3 => &["c", "a1", "a2", "a3", "b"],
        }
    }

    fn roles(self) -> &'static [&'static str] {
        match self {
            MoveKind::R1Plus => &["arc"],
            MoveKind::R1Minus => &["merged"],
            MoveKind::R2Plus => &["outer", "middle"],
            MoveKind::R2Minus => &["merged"],
            MoveKind::R3 => &["interior"],
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveKind::R1Plus => "R1+",
            MoveKind::R1Minus => "R1-",
            MoveKind::R2Plus => "R2+",
            MoveKind::R2Minus => "R2-",
            MoveKind::R3 => "R3",
        })
    }
}

/// Side of the strand on which a new kink's loop lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Where a move happens; indices refer to the source diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    Kink { edge: usize, side: Side, under_first: bool },
    Unkink { crossing: usize },
    /// Push the strand of `over` across the region on the left of both darts
    /// and over the strand of `under`.
    Poke { under: Dart, over: Dart },
    Unpoke { under: usize, over: usize },
    Triangle { face: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub site: Site,
    /// The arc moving over the others.
    pub moving: String,
    /// The arcs it passes over.
    pub passed: Vec<String>,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let passed = self.passed.join(",");
        match self.site {
            Site::Kink { edge, side, under_first } => write!(
                f,
                "{} kink on {} (edge {edge}, {}, {})",
                self.kind,
                self.moving,
                if side == Side::Left { "left" } else { "right" },
                if under_first { "under first" } else { "over first" }
            ),
            Site::Unkink { crossing } => {
                write!(f, "{} {} over {passed} at crossing {}", self.kind, self.moving, crossing + 1)
            }
            Site::Poke { under, over } => write!(
                f,
                "{} {} over {passed} (edges {}, {})",
                self.kind, self.moving, over.edge, under.edge
            ),
            Site::Unpoke { under, over } => {
                write!(f, "{} {} off {passed} (edges {over}, {under})", self.kind, self.moving)
            }
            Site::Triangle { face } => write!(f, "{} {} over {passed} (face {face})", self.kind, self.moving),
        }
    }
}

/// Which relation gates the moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Unconditional,
    /// Arc `c` may move over arc `a` only if `a R c`.
    ArcC1,
    /// Component `Cj` may move over `Ci` only if `Ci R Cj`.
    ComponentRel,
}

impl Condition {
    fn check_mode(self, mode: Mode) -> Result<()> {
        match (self, mode) {
            (Condition::ArcC1, Mode::Components) => {
                Err(Error::Argument("condition C1 needs a relation on arcs".into()))
            }
            (Condition::ComponentRel, Mode::Arcs) => {
                Err(Error::Argument("the component rule needs a relation on components".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub kind: MoveKind,
    pub role: String,
    pub term: BoolTerm,
    /// Placeholder naming the old arc that dominates the term.
    pub witness: String,
}

/// Label templates for every move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveScheme {
    name: String,
    templates: Vec<Template>,
}

impl Default for MoveScheme {
    fn default() -> Self {
        let t = |kind, role: &str, term: &str, witness: &str| Template {
            kind,
            role: role.into(),
            term: BoolTerm::parse(term).expect("valid template"),
            witness: witness.into(),
        };
        MoveScheme {
            name: "default".into(),
            templates: vec![
                t(MoveKind::R1Plus, "arc", "c", "c"),
                t(MoveKind::R1Minus, "merged", "x & y", "x"),
                t(MoveKind::R2Plus, "outer", "a", "a"),
                t(MoveKind::R2Plus, "middle", "a & c", "a"),
                t(MoveKind::R2Minus, "merged", "c & (u1 | u2)", "c"),
                t(MoveKind::R3, "interior", "c & (a1 | a2 | a3)", "c"),
            ],
        }
    }
}

impl MoveScheme {
    /// A scheme must give one template for every role of every move, using
    /// only that move's placeholders.
    pub fn new(name: impl Into<String>, templates: Vec<Template>) -> Result<Self> {
        for kind in MoveKind::ALL {
            for role in kind.roles() {
                let n = templates.iter().filter(|t| t.kind == kind && t.role == *role).count();
                if n != 1 {
                    return Err(Error::Argument(format!("scheme needs exactly one `{kind} {role}` template")));
                }
            }
        }
        for t in &templates {
            if !t.kind.roles().contains(&t.role.as_str()) {
                return Err(Error::Argument(format!("`{}` has no role `{}`", t.kind, t.role)));
            }
            let allowed = t.kind.placeholders();
            for v in t.term.vars().iter().chain(std::iter::once(&t.witness)) {
                if !allowed.contains(&v.as_str()) {
                    return Err(Error::Argument(format!(
                        "`{v}` is not a placeholder of {} (expected one of {})",
                        t.kind,
                        allowed.join(", ")
                    )));
                }
            }
        }
        Ok(MoveScheme {
            name: name.into(),
            templates,
        })
    }

    /// Registered schemes by name.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(MoveScheme::default()),
            _ => Err(Error::Argument(format!("unknown move scheme `{name}`"))),
        }
    }

    /// Reads lines `<move> <role> = <term> witness <placeholder>`, with an
    /// optional `name: <name>` line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = "custom".to_string();
        let mut templates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(n) = line.strip_prefix("name:") {
                name = n.trim().to_string();
                continue;
            }
            let bad = || Error::parse(i + 1, "expected `<move> <role> = <term> witness <arc>`");
            let (lhs, rhs) = line.split_once('=').ok_or_else(bad)?;
            let mut lhs = lhs.split_whitespace();
            let (kind, role) = match (lhs.next(), lhs.next(), lhs.next()) {
                (Some(k), Some(r), None) => (MoveKind::parse(k)?, r.to_string()),
                _ => return Err(bad()),
            };
            let (term, witness) = rhs.rsplit_once("witness").ok_or_else(bad)?;
            let term = BoolTerm::parse(term.trim()).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            templates.push(Template {
                kind,
                role,
                term,
                witness: witness.trim().to_string(),
            });
        }
        MoveScheme::new(name, templates)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("name: {}\n", self.name);
        for t in &self.templates {
            out.push_str(&format!("{} {} = {} witness {}\n", t.kind, t.role, t.term, t.witness));
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    fn label(&self, kind: MoveKind, role: &str, bind: &[(&str, &str)], hint: String) -> ArcLabel {
        let t = self
            .templates
            .iter()
            .find(|t| t.kind == kind && t.role == role)
            .expect("scheme is complete");
        let lookup = |v: &str| bind.iter().find(|(k, _)| *k == v).map(|(_, a)| a.to_string());
        ArcLabel {
            term: t.term.substitute(&|v| lookup(v).map(BoolTerm::Var)),
            hint,
            witness: lookup(&t.witness).unwrap_or_else(|| t.witness.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyEntry {
    pub template: Template,
    pub holds: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyReport {
    pub entries: Vec<EntropyEntry>,
}

impl EntropyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &EntropyEntry> {
        self.entries.iter().filter(|e| !e.holds)
    }
}

/// Checks `t <= a(t)` in the free distributive lattice for every template,
/// which makes each label dominated by its witness arc.
pub fn check_entropy_decreasing(scheme: &MoveScheme) -> EntropyReport {
    let entries = scheme
        .templates
        .iter()
        .map(|t| {
            let (holds, note) = match lattice_leq(&t.term, &BoolTerm::var(t.witness.clone())) {
                Ok(true) => (true, None),
                Ok(false) => (false, Some(format!("{} is not below {}", t.term, t.witness))),
                Err(e) => (false, Some(e.to_string())),
            };
            EntropyEntry {
                template: t.clone(),
                holds,
                note,
            }
        })
        .collect();
    EntropyReport { entries }
}

/// Label and witness of one arc after a move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcProvenance {
    pub arc: String,
    pub label: BoolTerm,
    pub witness: String,
}

#[derive(Debug, Clone)]
pub struct MoveOutcome {
    pub result: LabeledDiagram,
    /// One entry per arc of the result, in arc order.
    pub provenance: Vec<ArcProvenance>,
}

/// All moves available under `condition`, in a fixed order.
pub fn enumerate_moves(ld: &LabeledDiagram, condition: Condition) -> Result<Vec<Move>> {
    condition.check_mode(ld.mode())?;
    let d = ld.diagram();
    let scheme = MoveScheme::default();
    Ok(candidates(d)
        .into_iter()
        .filter(|m| condition == Condition::Unconditional || permitted(ld, m))
        .filter(|m| surgery(d, m, &scheme).is_ok())
        .collect())
}

/// Every passed-over arc must relate to the moving arc.
pub(crate) fn permitted(ld: &LabeledDiagram, m: &Move) -> bool {
    let d = ld.diagram();
    let Ok(c) = d.arc_index(&m.moving) else { return false };
    m.passed
        .iter()
        .all(|a| d.arc_index(a).is_ok_and(|a| ld.arcs_related(a, c)))
}

/// Applies a move and evaluates the relation on the new arcs. Permission is
/// not checked here.
pub fn apply_move(ld: &LabeledDiagram, m: &Move, scheme: &MoveScheme) -> Result<MoveOutcome> {
    let (diagram, labels) = surgery(ld.diagram(), m, scheme)?;
    let names = diagram.arc_names();
    let result = match ld.mode() {
        Mode::Arcs => {
            let terms: Vec<BoolTerm> = labels.iter().map(|l| l.term.clone()).collect();
            let matrix = TermRelation::new(ld.relation()).matrix(&terms)?;
            let rel = BinaryRelation::new(names.clone(), matrix)?;
            LabeledDiagram::new(diagram, Mode::Arcs, rel)?
        }
        Mode::Components => LabeledDiagram::new(diagram, Mode::Components, ld.relation().clone())?,
    };
    let provenance = names
        .into_iter()
        .zip(labels)
        .map(|(arc, l)| ArcProvenance {
            arc,
            label: l.term,
            witness: l.witness,
        })
        .collect();
    Ok(MoveOutcome { result, provenance })
}

fn arc_name(d: &Diagram, e: usize) -> String {
    d.arcs()[d.arc_of_edge(e)].name.clone()
}

fn region_is_simple(d: &Diagram, face: usize) -> bool {
    d.faces_in_region(d.faces()[face].region).count() == 1
}

fn candidates(d: &Diagram) -> Vec<Move> {
    let mut out = Vec::new();
    for arc in d.arcs() {
        for side in [Side::Left, Side::Right] {
            for under_first in [true, false] {
                out.push(Move {
                    kind: MoveKind::R1Plus,
                    site: Site::Kink {
                        edge: arc.edges[0],
                        side,
                        under_first,
                    },
                    moving: arc.name.clone(),
                    passed: vec![arc.name.clone()],
                });
            }
        }
    }

    let mut kinked = HashSet::new();
    for (f, face) in d.faces().iter().enumerate() {
        if face.darts.len() != 1 || !region_is_simple(d, f) {
            continue;
        }
        let e = &d.edges()[face.darts[0].edge];
        if let (Some((x, _)), Some((y, _))) = (e.tail, e.head) {
            if x == y && kinked.insert(x) {
                let (ui, uo, o) = d.crossing_arcs(x);
                out.push(Move {
                    kind: MoveKind::R1Minus,
                    site: Site::Unkink { crossing: x },
                    moving: d.arcs()[o].name.clone(),
                    passed: vec![d.arcs()[ui].name.clone(), d.arcs()[uo].name.clone()],
                });
            }
        }
    }

    for r in 0..d.region_count() {
        let darts: Vec<Dart> = d
            .faces_in_region(r)
            .flat_map(|f| d.faces()[f].darts.iter().copied())
            .collect();
        let mut seen = HashSet::new();
        for &under in &darts {
            for &over in &darts {
                if under.edge == over.edge {
                    continue;
                }
                let (a, c) = (d.arc_of_edge(under.edge), d.arc_of_edge(over.edge));
                if seen.insert((a, c)) {
                    out.push(Move {
                        kind: MoveKind::R2Plus,
                        site: Site::Poke { under, over },
                        moving: d.arcs()[c].name.clone(),
                        passed: vec![d.arcs()[a].name.clone()],
                    });
                }
            }
        }
    }

    for (f, face) in d.faces().iter().enumerate() {
        if face.darts.len() != 2 || !region_is_simple(d, f) {
            continue;
        }
        let (e0, e1) = (face.darts[0].edge, face.darts[1].edge);
        for (u, o) in [(e0, e1), (e1, e0)] {
            if let Some((u1, u2)) = bigon_under_arcs(d, u, o) {
                out.push(Move {
                    kind: MoveKind::R2Minus,
                    site: Site::Unpoke { under: u, over: o },
                    moving: arc_name(d, o),
                    passed: vec![u1, u2],
                });
            }
        }
    }

    for (f, face) in d.faces().iter().enumerate() {
        if face.darts.len() != 3 || !region_is_simple(d, f) {
            continue;
        }
        if let Some(t) = triangle(d, f) {
            out.push(Move {
                kind: MoveKind::R3,
                site: Site::Triangle { face: f },
                moving: arc_name(d, t.edges[0]),
                passed: t.passed.clone(),
            });
        }
    }
    out
}

fn over_at_tail(d: &Diagram, e: usize) -> Option<bool> {
    d.edges()[e].tail.map(|(_, s)| s != 2)
}

fn over_at_head(d: &Diagram, e: usize) -> Option<bool> {
    d.edges()[e].head.map(|(_, s)| s != 0)
}

/// For a coherent bigon with `u` under at both ends and `o` over at both,
/// the arcs of `u` before and after it.
fn bigon_under_arcs(d: &Diagram, u: usize, o: usize) -> Option<(String, String)> {
    let (eu, eo) = (&d.edges()[u], &d.edges()[o]);
    let ((x, _), (y, _)) = (eu.tail?, eu.head?);
    let ((p, _), (q, _)) = (eo.tail?, eo.head?);
    if x == y || !((p, q) == (x, y) || (p, q) == (y, x)) {
        return None;
    }
    if over_at_tail(d, u)? || over_at_head(d, u)? || !over_at_tail(d, o)? || !over_at_head(d, o)? {
        return None;
    }
    let cx = &d.crossings()[x];
    let cy = &d.crossings()[y];
    Some((arc_name(d, cx.under_in()), arc_name(d, cy.under_out())))
}

struct TriangleSite {
    /// Edges of the top, middle and bottom strands.
    edges: [usize; 3],
    passed: Vec<String>,
}

fn triangle(d: &Diagram, f: usize) -> Option<TriangleSite> {
    let darts = &d.faces()[f].darts;
    let mut crossings = Vec::new();
    for dart in darts {
        let e = &d.edges()[dart.edge];
        let (t, h) = (e.tail?.0, e.head?.0);
        if t == h {
            return None;
        }
        crossings.extend([t, h]);
    }
    crossings.sort_unstable();
    crossings.dedup();
    if crossings.len() != 3 {
        return None;
    }
    let mut top = None;
    let mut mid = None;
    let mut bottom = None;
    for dart in darts {
        let e = dart.edge;
        match (over_at_tail(d, e)?, over_at_head(d, e)?) {
            (true, true) => top = Some(e),
            (false, false) => bottom = Some(e),
            _ => mid = Some(e),
        }
    }
    let (top, mid, bottom) = (top?, mid?, bottom?);
    let te = &d.edges()[top];
    let (t0, t1) = (te.tail?.0, te.head?.0);
    let x_mb = *crossings.iter().find(|&&x| x != t0 && x != t1)?;
    let c = &d.crossings()[x_mb];
    let passed = vec![arc_name(d, c.under_in()), arc_name(d, c.over_in()), arc_name(d, c.under_out())];
    Some(TriangleSite {
        edges: [top, mid, bottom],
        passed,
    })
}

/// Mutable copy of a diagram used while rewiring.
struct Draft<'a> {
    d: &'a Diagram,
    crossings: Vec<Option<Crossing>>,
    edges: Vec<Option<RawEdge>>,
    unions: Vec<(usize, usize)>,
    labels: Vec<(usize, ArcLabel)>,
}

impl<'a> Draft<'a> {
    fn new(d: &'a Diagram) -> Self {
        let edges = d
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                Some(RawEdge {
                    tail: e.tail,
                    head: e.head,
                    left: Some(e.left),
                    right: Some(e.right),
                    comp: d.component_of_edge(i),
                    tag: Tag::Old(d.arc_of_edge(i)),
                })
            })
            .collect();
        Draft {
            d,
            crossings: d.crossings().iter().cloned().map(Some).collect(),
            edges,
            unions: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn edge(&self, e: usize) -> &RawEdge {
        self.edges[e].as_ref().expect("live edge")
    }

    fn add_edge(&mut self, left: Option<usize>, right: Option<usize>, comp: usize, tag: Tag) -> usize {
        self.edges.push(Some(RawEdge {
            tail: None,
            head: None,
            left,
            right,
            comp,
            tag,
        }));
        self.edges.len() - 1
    }

    /// New edge copying the sides, component and arc of `e`.
    fn piece_of(&mut self, e: usize, keep_sides: bool) -> usize {
        let old = self.edge(e).clone();
        let (l, r) = if keep_sides { (old.left, old.right) } else { (None, None) };
        self.add_edge(l, r, old.comp, old.tag)
    }

    fn add_crossing(&mut self, sign: Sign) -> usize {
        self.crossings.push(Some(Crossing {
            sign,
            slots: [usize::MAX; 4],
        }));
        self.crossings.len() - 1
    }

    fn attach(&mut self, (x, s): Port, e: usize) {
        let c = self.crossings[x].as_mut().expect("live crossing");
        c.slots[s] = e;
        let incoming = c.is_incoming(s);
        let edge = self.edges[e].as_mut().expect("live edge");
        if incoming {
            edge.head = Some((x, s));
        } else {
            edge.tail = Some((x, s));
        }
    }

    fn label(&mut self, e: usize, l: ArcLabel) {
        self.labels.push((e, l));
    }

    /// Removes crossings and joins the strands through them. Sides of the
    /// joined edges come from the non-interior edges of each chain. Returns
    /// each chain with its replacement edge.
    fn remove_and_splice(&mut self, removed: &[usize], interior: &[usize]) -> Vec<(Vec<usize>, usize)> {
        let gone = |p: Option<Port>| p.is_some_and(|(x, _)| removed.contains(&x));
        let touching: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.edges[e].as_ref().is_some_and(|r| gone(r.tail) || gone(r.head)))
            .collect();
        let next = |this: &Self, e: usize| {
            let (x, s) = this.edge(e).head.expect("edge at a crossing");
            this.crossings[x].as_ref().expect("live").slots[(s + 2) % 4]
        };
        let mut chains: Vec<Vec<usize>> = Vec::new();
        let mut used = HashSet::new();
        for &e in &touching {
            if gone(self.edge(e).tail) {
                continue;
            }
            let mut chain = vec![e];
            let mut cur = e;
            while gone(self.edge(cur).head) {
                cur = next(self, cur);
                chain.push(cur);
            }
            used.extend(chain.iter().copied());
            chains.push(chain);
        }
        for &e in &touching {
            if used.contains(&e) {
                continue;
            }
            let mut chain = vec![e];
            let mut cur = next(self, e);
            while cur != e {
                chain.push(cur);
                cur = next(self, cur);
            }
            used.extend(chain.iter().copied());
            chains.push(chain);
        }

        let mut out = Vec::new();
        for chain in chains {
            let first = self.edge(chain[0]).clone();
            let last = self.edge(*chain.last().expect("non-empty")).clone();
            let open = !gone(first.tail);
            let outer: Vec<RawEdge> = chain
                .iter()
                .filter(|e| !interior.contains(e))
                .map(|&e| self.edge(e).clone())
                .collect();
            let mut side = |pick: fn(&RawEdge) -> Option<usize>| {
                let ids: Vec<usize> = outer.iter().filter_map(pick).collect();
                for w in ids.windows(2) {
                    self.unions.push((w[0], w[1]));
                }
                ids.first().copied()
            };
            let left = side(|e| e.left);
            let right = side(|e| e.right);
            let tag = match outer.first() {
                Some(e) if outer.iter().all(|o| o.tag == e.tag) => e.tag,
                _ => Tag::Fresh,
            };
            for &e in &chain {
                self.edges[e] = None;
            }
            let new = self.add_edge(left, right, first.comp, tag);
            if open {
                self.attach(first.tail.expect("open chain"), new);
                self.attach(last.head.expect("open chain"), new);
            }
            out.push((chain, new));
        }
        for &x in removed {
            self.crossings[x] = None;
        }
        out
    }

    fn finish(self) -> Result<(Diagram, Vec<ArcLabel>)> {
        let mut cmap = vec![usize::MAX; self.crossings.len()];
        let mut emap = vec![usize::MAX; self.edges.len()];
        let mut n = 0;
        for (i, c) in self.crossings.iter().enumerate() {
            if c.is_some() {
                cmap[i] = n;
                n += 1;
            }
        }
        let mut m = 0;
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_some() {
                emap[i] = m;
                m += 1;
            }
        }
        let port = |p: Option<Port>| p.map(|(x, s)| (cmap[x], s));
        let crossings = self
            .crossings
            .into_iter()
            .flatten()
            .map(|c| {
                let mut slots = [usize::MAX; 4];
                for (s, &e) in c.slots.iter().enumerate() {
                    slots[s] = emap.get(e).copied().unwrap_or(usize::MAX);
                }
                Crossing { sign: c.sign, slots }
            })
            .collect();
        let edges = self
            .edges
            .into_iter()
            .flatten()
            .map(|e| RawEdge {
                tail: port(e.tail),
                head: port(e.head),
                ..e
            })
            .collect();
        let labels = self
            .labels
            .into_iter()
            .filter(|(e, _)| emap[*e] != usize::MAX)
            .map(|(e, l)| (emap[e], l))
            .collect();
        assemble(RawDiagram {
            crossings,
            edges,
            comp_names: self.d.component_names(),
            old_arc_names: self.d.arc_names(),
            region_bound: self.d.region_count(),
            unions: self.unions,
            labels,
            shared_outer: false,
        })
    }
}

fn precondition(msg: &str) -> Error {
    Error::Precondition(msg.to_string())
}

fn surgery(d: &Diagram, m: &Move, scheme: &MoveScheme) -> Result<(Diagram, Vec<ArcLabel>)> {
    let mut dr = Draft::new(d);
    match m.site {
        Site::Kink { edge, side, under_first } => {
            if edge >= d.edges().len() {
                return Err(precondition("no such edge"));
            }
            kink(&mut dr, edge, side, under_first, scheme);
        }
        Site::Unkink { crossing } => unkink(&mut dr, crossing, scheme)?,
        Site::Poke { under, over } => poke(&mut dr, under, over, scheme)?,
        Site::Unpoke { under, over } => unpoke(&mut dr, under, over, scheme)?,
        Site::Triangle { face } => third(&mut dr, face, scheme)?,
    }
    dr.finish()
}

fn kink(dr: &mut Draft, e: usize, side: Side, under_first: bool, scheme: &MoveScheme) {
    let d = dr.d;
    let old = dr.edge(e).clone();
    let c = arc_name(d, e);
    let sign = match (side, under_first) {
        (Side::Right, true) | (Side::Left, false) => Sign::Negative,
        _ => Sign::Positive,
    };
    let x = dr.add_crossing(sign);
    let e1 = dr.piece_of(e, true);
    let e2 = if old.tail.is_none() { e1 } else { dr.piece_of(e, true) };
    let l = dr.piece_of(e, false);
    dr.edges[e] = None;
    // counterclockwise from the incoming under-strand
    let slots = match (side, under_first) {
        (Side::Right, true) => [e1, l, l, e2],
        (Side::Right, false) => [l, l, e2, e1],
        (Side::Left, true) => [e1, e2, l, l],
        (Side::Left, false) => [l, e1, e2, l],
    };
    for (s, edge) in slots.into_iter().enumerate() {
        dr.attach((x, s), edge);
    }
    if let (Some(t), Some(h)) = (old.tail, old.head) {
        dr.attach(t, e1);
        dr.attach(h, e2);
    }
    let bind = [("c", c.as_str())];
    dr.label(e1, scheme.label(MoveKind::R1Plus, "arc", &bind, format!("{c}1")));
    dr.label(e2, scheme.label(MoveKind::R1Plus, "arc", &bind, format!("{c}2")));
}

fn unkink(dr: &mut Draft, x: usize, scheme: &MoveScheme) -> Result<()> {
    let d = dr.d;
    let c = d.crossings().get(x).ok_or_else(|| precondition("no such crossing"))?;
    // the loop edge bounding a monogon region
    let lp = (0..4)
        .map(|s| c.slots[s])
        .find(|&e| {
            let edge = &d.edges()[e];
            edge.tail.map(|p| p.0) == Some(x)
                && edge.head.map(|p| p.0) == Some(x)
                && [true, false].into_iter().any(|fwd| {
                    let f = d.face_of(Dart { edge: e, forward: fwd });
                    d.faces()[f].darts.len() == 1 && region_is_simple(d, f)
                })
        })
        .ok_or_else(|| precondition("crossing is not a removable kink"))?;
    let (ui, uo, o) = d.crossing_arcs(x);
    let names = |a: usize| d.arcs()[a].name.clone();
    let (xa, ya, oa) = (names(ui), names(uo), names(o));
    let spliced = dr.remove_and_splice(&[x], &[lp]);
    let bind = [("x", xa.as_str()), ("y", ya.as_str()), ("o", oa.as_str())];
    for (_, e) in spliced {
        let l = scheme.label(MoveKind::R1Minus, "merged", &bind, xa.clone());
        dr.label(e, l);
    }
    Ok(())
}

fn poke(dr: &mut Draft, under: Dart, over: Dart, scheme: &MoveScheme) -> Result<()> {
    let d = dr.d;
    let m = d.edges().len();
    if under.edge >= m || over.edge >= m || under.edge == over.edge {
        return Err(precondition("R2+ needs two distinct edges"));
    }
    if d.faces()[d.face_of(under)].region != d.faces()[d.face_of(over)].region {
        return Err(precondition("the two edges do not share a region"));
    }
    let (a, c) = (under.edge, over.edge);
    let (ea, ec) = (dr.edge(a).clone(), dr.edge(c).clone());
    let an = arc_name(d, a);
    let cn = arc_name(d, c);
    // local picture: `a` runs along the bottom, `c` along the top, the
    // region in between; X is west of Y
    let a_east = under.forward;
    let c_east = !over.forward;
    let (sx, sy) = if a_east == c_east {
        (Sign::Positive, Sign::Negative)
    } else {
        (Sign::Negative, Sign::Positive)
    };
    let x = dr.add_crossing(sx);
    let y = dr.add_crossing(sy);
    let a1 = dr.piece_of(a, true);
    let a2 = if ea.tail.is_none() { a1 } else { dr.piece_of(a, true) };
    let am = dr.piece_of(a, false);
    let c1 = dr.piece_of(c, true);
    let c2 = if ec.tail.is_none() { c1 } else { dr.piece_of(c, true) };
    let cm = dr.piece_of(c, false);
    dr.edges[a] = None;
    dr.edges[c] = None;
    // compass order E, N, W, S is counterclockwise
    let at_x = [am, c1, a1, cm];
    let at_y = [a2, c2, am, cm];
    let first = if a_east { 2 } else { 0 };
    for k in 0..4 {
        dr.attach((x, k), at_x[(first + k) % 4]);
        dr.attach((y, k), at_y[(first + k) % 4]);
    }
    if let (Some(t), Some(h)) = (ea.tail, ea.head) {
        let (from, to) = if a_east { (a1, a2) } else { (a2, a1) };
        dr.attach(t, from);
        dr.attach(h, to);
    }
    if let (Some(t), Some(h)) = (ec.tail, ec.head) {
        let (from, to) = if c_east { (c1, c2) } else { (c2, c1) };
        dr.attach(t, from);
        dr.attach(h, to);
    }
    let bind = [("a", an.as_str()), ("c", cn.as_str())];
    let (up, down) = if a_east { (a1, a2) } else { (a2, a1) };
    dr.label(up, scheme.label(MoveKind::R2Plus, "outer", &bind, format!("{an}1")));
    dr.label(am, scheme.label(MoveKind::R2Plus, "middle", &bind, format!("{an}2")));
    dr.label(down, scheme.label(MoveKind::R2Plus, "outer", &bind, format!("{an}3")));
    Ok(())
}

fn unpoke(dr: &mut Draft, u: usize, o: usize, scheme: &MoveScheme) -> Result<()> {
    let d = dr.d;
    if u >= d.edges().len() || o >= d.edges().len() || u == o {
        return Err(precondition("no such bigon"));
    }
    let (u1, u2) = bigon_under_arcs(d, u, o).ok_or_else(|| precondition("edges do not form a coherent bigon"))?;
    let f = d.face_of(Dart { edge: u, forward: true });
    let g = d.face_of(Dart { edge: u, forward: false });
    let bigon = [f, g].into_iter().find(|&f| {
        let ds = &d.faces()[f].darts;
        ds.len() == 2 && ds.iter().any(|dd| dd.edge == o) && region_is_simple(d, f)
    });
    if bigon.is_none() {
        return Err(precondition("the edges do not bound a bigon face"));
    }
    let cn = arc_name(d, o);
    let x = d.edges()[u].tail.expect("checked").0;
    let y = d.edges()[u].head.expect("checked").0;
    let start = d.crossings()[x].under_in();
    let spliced = dr.remove_and_splice(&[x, y], &[u, o]);
    let bind = [("c", cn.as_str()), ("u1", u1.as_str()), ("u2", u2.as_str())];
    for (chain, e) in spliced {
        if chain.contains(&start) {
            dr.label(e, scheme.label(MoveKind::R2Minus, "merged", &bind, u1.clone()));
        }
    }
    Ok(())
}

fn third(dr: &mut Draft, f: usize, scheme: &MoveScheme) -> Result<()> {
    let d = dr.d;
    if f >= d.faces().len() || d.faces()[f].darts.len() != 3 || !region_is_simple(d, f) {
        return Err(precondition("not a triangular face"));
    }
    let site = triangle(d, f).ok_or_else(|| precondition("triangle has no strand over both others"))?;
    let cn = arc_name(d, site.edges[0]);
    let bn = arc_name(d, site.edges[2]);
    struct Strand {
        t: usize,
        p: Port,
        q: Port,
        inn: usize,
        out: usize,
    }
    let strands: Vec<Strand> = site
        .edges
        .iter()
        .map(|&t| {
            let e = &d.edges()[t];
            let (p, q) = (e.tail.expect("checked"), e.head.expect("checked"));
            Strand {
                t,
                p,
                q,
                inn: d.crossings()[p.0].slots[(p.1 + 2) % 4],
                out: d.crossings()[q.0].slots[(q.1 + 2) % 4],
            }
        })
        .collect();
    let mut fresh = Vec::new();
    for s in &strands {
        let comp = d.component_of_edge(s.t);
        dr.edges[s.t] = None;
        fresh.push(dr.add_edge(None, None, comp, Tag::Fresh));
    }
    for (s, &t) in strands.iter().zip(&fresh) {
        dr.attach(s.q, s.inn);
        dr.attach(s.p, s.out);
        dr.attach((s.q.0, (s.q.1 + 2) % 4), t);
        dr.attach((s.p.0, (s.p.1 + 2) % 4), t);
    }
    let bind = [
        ("c", cn.as_str()),
        ("a1", site.passed[0].as_str()),
        ("a2", site.passed[1].as_str()),
        ("a3", site.passed[2].as_str()),
        ("b", bn.as_str()),
    ];
    dr.label(fresh[2], scheme.label(MoveKind::R3, "interior", &bind, bn.clone()));
    Ok(())
}
