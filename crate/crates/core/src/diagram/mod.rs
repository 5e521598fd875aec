//! Oriented link diagrams as 4-valent planar maps.
//!
//! A crossing lists its four edge ends counterclockwise starting from the
//! incoming under-strand. Regions are tracked explicitly so that diagrams
//! with several connected pieces keep their nesting.

mod build;
mod canon;
mod moves;
mod pd;

use std::fmt;

use crate::error::{Error, Result};
use crate::relation::BinaryRelation;

pub use moves::{
    apply_move, check_entropy_decreasing, enumerate_moves, ArcProvenance, Condition, EntropyReport, Move,
    MoveKind, MoveOutcome, MoveScheme, Side, Site, Template,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        })
    }
}

/// Slot 0 is the incoming under-strand, slot 2 the outgoing one. For a
/// positive crossing the over-strand enters at slot 3 and leaves at slot 1;
/// for a negative one it enters at 1 and leaves at 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub sign: Sign,
    pub slots: [usize; 4],
}

impl Crossing {
    pub fn over_in_slot(&self) -> usize {
        match self.sign {
            Sign::Positive => 3,
            Sign::Negative => 1,
        }
    }

    pub fn over_out_slot(&self) -> usize {
        (self.over_in_slot() + 2) % 4
    }

    pub fn is_incoming(&self, slot: usize) -> bool {
        slot == 0 || slot == self.over_in_slot()
    }

    pub fn under_in(&self) -> usize {
        self.slots[0]
    }

    pub fn under_out(&self) -> usize {
        self.slots[2]
    }

    pub fn over_in(&self) -> usize {
        self.slots[self.over_in_slot()]
    }

    pub fn over_out(&self) -> usize {
        self.slots[self.over_out_slot()]
    }
}

/// End of an edge at a crossing: `(crossing, slot)`.
pub type Port = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// `None` for both ends of a crossing-free loop.
    pub tail: Option<Port>,
    pub head: Option<Port>,
    pub left: usize,
    pub right: usize,
}

/// An edge traversed with (`forward`) or against its orientation. The face
/// of a dart is the one on its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

impl Dart {
    pub(crate) fn index(self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub region: usize,
    pub piece: usize,
    pub darts: Vec<Dart>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcInfo {
    pub name: String,
    /// Edges in strand order.
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInfo {
    pub name: String,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    edges: Vec<Edge>,
    edge_arc: Vec<usize>,
    edge_comp: Vec<usize>,
    edge_piece: Vec<usize>,
    arcs: Vec<ArcInfo>,
    components: Vec<ComponentInfo>,
    faces: Vec<Face>,
    dart_face: Vec<usize>,
    region_count: usize,
    piece_count: usize,
}

impl Diagram {
    pub fn parse(text: &str) -> Result<Diagram> {
        Ok(LabeledDiagram::parse(text)?.diagram)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn arcs(&self) -> &[ArcInfo] {
        &self.arcs
    }

    pub fn arc_names(&self) -> Vec<String> {
        self.arcs.iter().map(|a| a.name.clone()).collect()
    }

    pub fn arc_index(&self, name: &str) -> Result<usize> {
        self.arcs
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn components(&self) -> &[ComponentInfo] {
        &self.components
    }

    pub fn component_names(&self) -> Vec<String> {
        self.components.iter().map(|c| c.name.clone()).collect()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn region_count(&self) -> usize {
        self.region_count
    }

    pub fn piece_count(&self) -> usize {
        self.piece_count
    }

    /// Components without crossings.
    pub fn free_loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.tail.is_none()).count()
    }

    pub fn arc_of_edge(&self, e: usize) -> usize {
        self.edge_arc[e]
    }

    pub fn component_of_edge(&self, e: usize) -> usize {
        self.edge_comp[e]
    }

    pub fn component_of_arc(&self, a: usize) -> usize {
        self.edge_comp[self.arcs[a].edges[0]]
    }

    pub fn face_of(&self, d: Dart) -> usize {
        self.dart_face[d.index()]
    }

    /// Faces whose region is `r` (more than one when pieces are nested).
    pub fn faces_in_region(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(move |&f| self.faces[f].region == r)
    }

    /// Arcs meeting at a crossing: `(under_in, under_out, over)`.
    pub fn crossing_arcs(&self, x: usize) -> (usize, usize, usize) {
        let c = &self.crossings[x];
        (
            self.edge_arc[c.under_in()],
            self.edge_arc[c.under_out()],
            self.edge_arc[c.over_in()],
        )
    }

    /// Next edge along the strand.
    pub fn next_edge(&self, e: usize) -> usize {
        match self.edges[e].head {
            None => e,
            Some((x, s)) => self.crossings[x].slots[(s + 2) % 4],
        }
    }

    /// The relation on arcs induced by a relation on components: arcs are
    /// related iff their components are.
    pub fn induce_arc_relation(&self, comp_rel: &BinaryRelation) -> Result<BinaryRelation> {
        let idx = self.component_indices(comp_rel)?;
        BinaryRelation::from_fn(self.arc_names(), |i, j| {
            comp_rel.get(idx[self.component_of_arc(i)], idx[self.component_of_arc(j)])
        })
    }

    /// `true` for good crossings: the under-component is related to the
    /// over-component.
    pub fn classify_crossings(&self, comp_rel: &BinaryRelation) -> Result<Vec<bool>> {
        let idx = self.component_indices(comp_rel)?;
        Ok(self
            .crossings
            .iter()
            .map(|c| comp_rel.get(idx[self.edge_comp[c.under_in()]], idx[self.edge_comp[c.over_in()]]))
            .collect())
    }

    fn component_indices(&self, comp_rel: &BinaryRelation) -> Result<Vec<usize>> {
        if comp_rel.len() != self.components.len() {
            return Err(Error::Argument(format!(
                "relation has {} elements but the diagram has {} components",
                comp_rel.len(),
                self.components.len()
            )));
        }
        self.components.iter().map(|c| comp_rel.index_of(&c.name)).collect()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign.as_i64()).sum()
    }

    pub fn to_pd_string(&self) -> String {
        pd::write(self, None)
    }
}

/// Whether the relation lives on arcs or on components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Arcs,
    Components,
}

/// A diagram together with a relation on its arcs or its components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDiagram {
    diagram: Diagram,
    mode: Mode,
    rel: BinaryRelation,
}

impl LabeledDiagram {
    /// Reorders `rel` to follow the diagram's arc or component order.
    pub fn new(diagram: Diagram, mode: Mode, rel: BinaryRelation) -> Result<Self> {
        let names = match mode {
            Mode::Arcs => diagram.arc_names(),
            Mode::Components => diagram.component_names(),
        };
        if rel.len() != names.len() {
            return Err(Error::Argument(format!(
                "relation has {} elements, expected {}",
                rel.len(),
                names.len()
            )));
        }
        let idx = names.iter().map(|n| rel.index_of(n)).collect::<Result<Vec<_>>>()?;
        let rel = BinaryRelation::from_fn(names, |i, j| rel.get(idx[i], idx[j]))?;
        Ok(LabeledDiagram { diagram, mode, rel })
    }

    pub fn parse(text: &str) -> Result<Self> {
        pd::parse(text)
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn relation(&self) -> &BinaryRelation {
        &self.rel
    }

    pub fn with_relation(&self, rel: BinaryRelation) -> Result<Self> {
        LabeledDiagram::new(self.diagram.clone(), self.mode, rel)
    }

    /// The relation on arcs, induced from components when needed.
    pub fn arc_relation(&self) -> BinaryRelation {
        match self.mode {
            Mode::Arcs => self.rel.clone(),
            Mode::Components => self
                .diagram
                .induce_arc_relation(&self.rel)
                .expect("component relation matches the diagram"),
        }
    }

    /// Does arc `a` relate to arc `b`, reading the relation in either mode.
    pub fn arcs_related(&self, a: usize, b: usize) -> bool {
        match self.mode {
            Mode::Arcs => self.rel.get(a, b),
            Mode::Components => self
                .rel
                .get(self.diagram.component_of_arc(a), self.diagram.component_of_arc(b)),
        }
    }

    pub fn to_pd_string(&self) -> String {
        pd::write(&self.diagram, Some((self.mode, &self.rel)))
    }

    /// Isomorphism-invariant encoding; equal iff the labeled diagrams agree
    /// up to renaming arcs and relabeling crossings.
    pub fn canonical_form(&self) -> Vec<u32> {
        canon::canonical_form(self)
    }
}

pub(crate) use build::{assemble, ArcLabel, RawDiagram, RawEdge, Tag};
