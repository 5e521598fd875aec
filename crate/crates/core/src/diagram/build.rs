//! Assembly of a validated [`Diagram`] from raw crossings and edges:
//! strand cycles, arcs and their names, face tracing, region identities and
//! the planarity checks.

use std::collections::{HashMap, HashSet};

use super::{ArcInfo, ComponentInfo, Crossing, Dart, Diagram, Edge, Face, Port};
use crate::error::{Error, Result};
use crate::term::BoolTerm;

/// Which pre-existing arc an edge belonged to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tag {
    Old(usize),
    Fresh,
}

/// Term attached to a new arc, the name it should get if its own name is
/// not kept, and the old arc dominating the term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ArcLabel {
    pub term: BoolTerm,
    pub hint: String,
    pub witness: String,
}

#[derive(Debug, Clone)]
pub(crate) struct RawEdge {
    pub tail: Option<Port>,
    pub head: Option<Port>,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub comp: usize,
    pub tag: Tag,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RawDiagram {
    pub crossings: Vec<Crossing>,
    pub edges: Vec<RawEdge>,
    pub comp_names: Vec<String>,
    pub old_arc_names: Vec<String>,
    /// Region labels below this bound are known regions.
    pub region_bound: usize,
    pub unions: Vec<(usize, usize)>,
    pub labels: Vec<(usize, ArcLabel)>,
    /// Place all pieces in one shared region (used when reading files).
    pub shared_outer: bool,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn fresh(&mut self) -> usize {
        self.0.push(self.0.len());
        self.0.len() - 1
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            // keep the smaller root so older ids win
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.0[hi] = lo;
        }
    }
}

fn check_ports(raw: &RawDiagram) -> Result<()> {
    let m = raw.edges.len();
    for (x, c) in raw.crossings.iter().enumerate() {
        for s in 0..4 {
            let e = c.slots[s];
            if e >= m {
                return Err(Error::Diagram(format!("crossing {} slot {s} has no edge", x + 1)));
            }
            let end = if c.is_incoming(s) { raw.edges[e].head } else { raw.edges[e].tail };
            if end != Some((x, s)) {
                return Err(Error::Diagram(format!("port mismatch at crossing {} slot {s}", x + 1)));
            }
        }
    }
    for (e, edge) in raw.edges.iter().enumerate() {
        match (edge.tail, edge.head) {
            (None, None) => {}
            (Some(t), Some(h)) => {
                for (x, s) in [t, h] {
                    if raw.crossings.get(x).map(|c| c.slots[s]) != Some(e) {
                        return Err(Error::Diagram(format!("edge {e} points at a port that does not hold it")));
                    }
                }
            }
            _ => return Err(Error::Diagram(format!("edge {e} has a dangling end"))),
        }
    }
    Ok(())
}

pub(crate) fn assemble(raw: RawDiagram) -> Result<(Diagram, Vec<ArcLabel>)> {
    check_ports(&raw)?;
    let crossings = &raw.crossings;
    let m = raw.edges.len();
    let next = |e: usize| match raw.edges[e].head {
        None => e,
        Some((x, s)) => crossings[x].slots[(s + 2) % 4],
    };

    // strand cycles
    let mut comp_cycle: Vec<Option<Vec<usize>>> = vec![None; raw.comp_names.len()];
    let mut seen = vec![false; m];
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let comp = raw.edges[start].comp;
        let mut cycle = Vec::new();
        let mut e = start;
        loop {
            if seen[e] {
                return Err(Error::Diagram("strand following is not a permutation".into()));
            }
            seen[e] = true;
            if raw.edges[e].comp != comp {
                return Err(Error::Diagram("a strand changes component".into()));
            }
            cycle.push(e);
            e = next(e);
            if e == start {
                break;
            }
        }
        match comp_cycle.get_mut(comp) {
            Some(slot @ None) => *slot = Some(cycle),
            Some(Some(_)) => return Err(Error::Diagram(format!("component {comp} has two strand cycles"))),
            None => return Err(Error::Diagram(format!("unknown component index {comp}"))),
        }
    }
    let mut components = Vec::with_capacity(comp_cycle.len());
    let mut edge_comp = vec![0; m];
    for (i, cyc) in comp_cycle.into_iter().enumerate() {
        let edges = cyc.ok_or_else(|| Error::Diagram(format!("component {} has no strand", raw.comp_names[i])))?;
        for &e in &edges {
            edge_comp[e] = i;
        }
        components.push(ComponentInfo {
            name: raw.comp_names[i].clone(),
            edges,
        });
    }

    // arcs: runs from an under-out (or a free loop) up to the next under-in
    let starts_run = |e: usize| match raw.edges[e].tail {
        None => true,
        Some((_, s)) => s == 2,
    };
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut edge_run = vec![usize::MAX; m];
    for comp in &components {
        let first = comp.edges.iter().position(|&e| starts_run(e));
        match first {
            None => {
                for &e in &comp.edges {
                    edge_run[e] = runs.len();
                }
                runs.push(comp.edges.clone());
            }
            Some(p) => {
                let n = comp.edges.len();
                let mut current: Vec<usize> = Vec::new();
                for k in 0..n {
                    let e = comp.edges[(p + k) % n];
                    if starts_run(e) && !current.is_empty() {
                        runs.push(std::mem::take(&mut current));
                    }
                    edge_run[e] = runs.len();
                    current.push(e);
                }
                runs.push(current);
            }
        }
    }

    let mut run_label: Vec<Option<ArcLabel>> = vec![None; runs.len()];
    for (e, lab) in &raw.labels {
        let r = edge_run[*e];
        if run_label[r].is_none() {
            run_label[r] = Some(lab.clone());
        }
    }
    for (r, run) in runs.iter().enumerate() {
        if run_label[r].is_some() {
            continue;
        }
        let mut old: Vec<usize> = run
            .iter()
            .filter_map(|&e| match raw.edges[e].tag {
                Tag::Old(a) => Some(a),
                Tag::Fresh => None,
            })
            .collect();
        old.sort_unstable();
        old.dedup();
        match old.as_slice() {
            [a] => {
                let name = raw.old_arc_names[*a].clone();
                run_label[r] = Some(ArcLabel {
                    term: BoolTerm::var(name.clone()),
                    hint: name.clone(),
                    witness: name,
                });
            }
            [] => return Err(Error::Diagram("an arc has no name".into())),
            _ => return Err(Error::Diagram("an arc joins several named arcs".into())),
        }
    }
    let labels: Vec<ArcLabel> = run_label.into_iter().map(|l| l.expect("labelled")).collect();
    let names = arc_names(&labels);
    let mut edge_arc = vec![0; m];
    let arcs: Vec<ArcInfo> = runs
        .into_iter()
        .zip(names)
        .enumerate()
        .map(|(i, (edges, name))| {
            for &e in &edges {
                edge_arc[e] = i;
            }
            ArcInfo { name, edges }
        })
        .collect();

    // connected pieces; free loops are pieces of their own
    let mut uf = UnionFind::new(crossings.len());
    for e in &raw.edges {
        if let (Some(t), Some(h)) = (e.tail, e.head) {
            uf.union(t.0, h.0);
        }
    }
    let mut piece_of_root = HashMap::new();
    let mut crossing_piece = vec![0; crossings.len()];
    for (x, cp) in crossing_piece.iter_mut().enumerate() {
        let r = uf.find(x);
        let n = piece_of_root.len();
        *cp = *piece_of_root.entry(r).or_insert(n);
    }
    let mut piece_count = piece_of_root.len();
    let crossing_pieces = piece_count;
    let mut edge_piece = vec![0; m];
    for (e, edge) in raw.edges.iter().enumerate() {
        edge_piece[e] = match edge.tail {
            Some((x, _)) => crossing_piece[x],
            None => {
                piece_count += 1;
                piece_count - 1
            }
        };
    }

    // faces: the face of a dart lies on its left
    let next_dart = |d: Dart| -> Dart {
        let e = &raw.edges[d.edge];
        let arrival = if d.forward { e.head } else { e.tail };
        match arrival {
            None => d,
            Some((x, s)) => {
                let out = (s + 3) % 4;
                let edge = crossings[x].slots[out];
                Dart {
                    edge,
                    forward: !crossings[x].is_incoming(out),
                }
            }
        }
    };
    let mut dart_face = vec![usize::MAX; 2 * m];
    let mut face_darts: Vec<Vec<Dart>> = Vec::new();
    for idx in 0..2 * m {
        if dart_face[idx] != usize::MAX {
            continue;
        }
        let start = Dart {
            edge: idx / 2,
            forward: idx % 2 == 0,
        };
        let mut darts = Vec::new();
        let mut d = start;
        loop {
            if dart_face[d.index()] != usize::MAX {
                return Err(Error::Diagram("face tracing revisits a dart".into()));
            }
            dart_face[d.index()] = face_darts.len();
            darts.push(d);
            d = next_dart(d);
            if d == start {
                break;
            }
        }
        face_darts.push(darts);
    }
    let face_piece: Vec<usize> = face_darts.iter().map(|ds| edge_piece[ds[0].edge]).collect();

    // region identities
    let mut regions = UnionFind::new(raw.region_bound);
    for &(a, b) in &raw.unions {
        regions.union(a, b);
    }
    let dart_label = |d: Dart| {
        let e = &raw.edges[d.edge];
        if d.forward {
            e.left
        } else {
            e.right
        }
    };
    let mut shared = None;
    if raw.shared_outer {
        let mut outer_faces = vec![None::<usize>; crossing_pieces];
        for (f, ds) in face_darts.iter().enumerate() {
            let p = face_piece[f];
            if p < crossing_pieces && outer_faces[p].is_none_or(|g| face_darts[g].len() < ds.len()) {
                outer_faces[p] = Some(f);
            }
        }
        let id = regions.fresh();
        shared = Some((id, outer_faces));
    }
    let mut face_class = Vec::with_capacity(face_darts.len());
    for (f, ds) in face_darts.iter().enumerate() {
        let mut known: Vec<usize> = ds.iter().filter_map(|&d| dart_label(d)).collect();
        if let Some((id, outer)) = &shared {
            let p = face_piece[f];
            let is_outer = if p < crossing_pieces {
                outer[p] == Some(f)
            } else {
                !ds[0].forward
            };
            if is_outer {
                known.push(*id);
            }
        }
        let class = match known.split_first() {
            None => regions.fresh(),
            Some((&first, rest)) => {
                for &k in rest {
                    regions.union(first, k);
                }
                first
            }
        };
        face_class.push(class);
    }
    // a region met twice by the same piece was split by the move
    let mut claimed: HashMap<(usize, usize), usize> = HashMap::new();
    let mut face_root = Vec::with_capacity(face_class.len());
    for (f, &c) in face_class.iter().enumerate() {
        let root = regions.find(c);
        let root = match claimed.get(&(face_piece[f], root)) {
            None => {
                claimed.insert((face_piece[f], root), f);
                root
            }
            Some(_) => regions.fresh(),
        };
        face_root.push(root);
    }
    let mut compact = HashMap::new();
    for &r in &face_root {
        let n = compact.len();
        compact.entry(r).or_insert(n);
    }
    let region_count = compact.len();
    let faces: Vec<Face> = face_darts
        .into_iter()
        .enumerate()
        .map(|(f, darts)| Face {
            region: compact[&face_root[f]],
            piece: face_piece[f],
            darts,
        })
        .collect();

    // Euler characteristic of every piece with crossings
    let mut v = vec![0usize; piece_count];
    let mut fcount = vec![0usize; piece_count];
    for &p in &crossing_piece {
        v[p] += 1;
    }
    for face in &faces {
        fcount[face.piece] += 1;
    }
    for p in 0..crossing_pieces {
        let chi = v[p] as i64 - 2 * v[p] as i64 + fcount[p] as i64;
        if chi != 2 {
            return Err(Error::Diagram(format!(
                "shadow is not planar (V - E + F = {chi}); check crossing signs and port order"
            )));
        }
    }
    // pieces and regions must form a tree
    let mut incid: Vec<(usize, usize)> = faces.iter().map(|f| (f.piece, f.region)).collect();
    incid.sort_unstable();
    incid.dedup();
    let mut tree = UnionFind::new(piece_count + region_count);
    for &(p, r) in &incid {
        tree.union(p, piece_count + r);
    }
    let roots = (0..piece_count + region_count).filter(|&i| tree.find(i) == i).count();
    if incid.len() + 1 != piece_count + region_count || roots != 1 {
        return Err(Error::Diagram("pieces and regions do not nest consistently".into()));
    }

    let edges: Vec<Edge> = raw
        .edges
        .iter()
        .enumerate()
        .map(|(e, re)| Edge {
            tail: re.tail,
            head: re.head,
            left: faces[dart_face[2 * e]].region,
            right: faces[dart_face[2 * e + 1]].region,
        })
        .collect();

    let diagram = Diagram {
        crossings: raw.crossings,
        edges,
        edge_arc,
        edge_comp,
        edge_piece,
        arcs,
        components,
        faces,
        dart_face,
        region_count,
        piece_count,
    };
    Ok((diagram, labels))
}

/// Arcs labelled by a lone variable keep that name when no other arc claims
/// it; everything else takes its hint, primed until unique.
fn arc_names(labels: &[ArcLabel]) -> Vec<String> {
    let mut count: HashMap<&str, usize> = HashMap::new();
    for l in labels {
        if let BoolTerm::Var(x) = &l.term {
            *count.entry(x.as_str()).or_default() += 1;
        }
    }
    let keeps = |l: &ArcLabel| matches!(&l.term, BoolTerm::Var(x) if count[x.as_str()] == 1);
    let mut taken: HashSet<String> = labels
        .iter()
        .filter(|l| keeps(l))
        .filter_map(|l| match &l.term {
            BoolTerm::Var(x) => Some(x.clone()),
            _ => None,
        })
        .collect();
    labels
        .iter()
        .map(|l| {
            if keeps(l) {
                if let BoolTerm::Var(x) = &l.term {
                    return x.clone();
                }
            }
            let mut name = l.hint.clone();
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            name
        })
        .collect()
}
