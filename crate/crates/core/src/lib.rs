mod error;
pub mod algebra;
pub mod chain;
pub mod coloring;
pub mod diagram;
pub mod reach;
pub mod relation;
pub mod term;

pub use algebra::{AlgebraKind, AxiomReport, Op, PartialAlgebra, Standard, Violation};
pub use chain::{AbelianGroup, Chain, ChainComplex, ClassOrder, Theory};
pub use coloring::{count_colorings, enumerate_colorings, Coloring, ColoringType};
pub use diagram::{Diagram, LabeledDiagram, Mode};
pub use error::{Error, Result};
pub use reach::{explore, reachable, Bounds, ConditionalTheory, MoveGraph, Predicate, Reach, Wff};
pub use relation::{BinaryRelation, ClosureKind, ElementMap, Preorder};
pub use term::BoolTerm;
