//! Canonical encoding of labeled diagrams up to relabeling.
//!
//! Each connected piece is numbered by a breadth-first walk from a root
//! edge; only roots giving the piece its smallest rotation code are tried.
//! Pieces are ordered by that code and ties are permuted. The final code
//! adds region incidences, arc membership, components and the relation.

use super::{Diagram, LabeledDiagram, Mode};

struct Walk {
    edges: Vec<usize>,
    code: Vec<u32>,
}

fn walk(d: &Diagram, root: usize) -> Walk {
    let mut edge_no = std::collections::HashMap::new();
    let mut cross_no = std::collections::HashMap::new();
    let mut edges = vec![root];
    edge_no.insert(root, 0u32);
    let mut crossings = Vec::new();
    let mut i = 0;
    while i < edges.len() {
        let e = &d.edges[edges[i]];
        for (x, _) in [e.tail, e.head].into_iter().flatten() {
            if cross_no.contains_key(&x) {
                continue;
            }
            cross_no.insert(x, crossings.len() as u32);
            crossings.push(x);
            for &f in &d.crossings[x].slots {
                if let std::collections::hash_map::Entry::Vacant(e) = edge_no.entry(f) {
                    e.insert(edges.len() as u32);
                    edges.push(f);
                }
            }
        }
        i += 1;
    }
    let mut code = vec![crossings.len() as u32];
    for &x in &crossings {
        let c = &d.crossings[x];
        code.push(u32::from(c.sign == super::Sign::Positive));
        code.extend(c.slots.iter().map(|f| edge_no[f]));
    }
    Walk { edges, code }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

pub(crate) fn canonical_form(ld: &LabeledDiagram) -> Vec<u32> {
    let d = &ld.diagram;
    let mut pieces: Vec<Vec<usize>> = vec![Vec::new(); d.piece_count];
    for (e, &p) in d.edge_piece.iter().enumerate() {
        pieces[p].push(e);
    }
    // best walks per piece
    let mut options: Vec<(Vec<u32>, Vec<Walk>)> = pieces
        .iter()
        .map(|edges| {
            let walks: Vec<Walk> = edges.iter().map(|&r| walk(d, r)).collect();
            let best = walks.iter().map(|w| w.code.clone()).min().expect("piece has an edge");
            let walks = walks.into_iter().filter(|w| w.code == best).collect();
            (best, walks)
        })
        .collect();
    options.sort_by(|a, b| a.0.cmp(&b.0));

    // groups of pieces with equal codes may be permuted
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut s = 0;
    for i in 1..=options.len() {
        if i == options.len() || options[i].0 != options[s].0 {
            groups.push((s, i));
            s = i;
        }
    }
    let mut orders: Vec<Vec<usize>> = vec![Vec::new()];
    for &(a, b) in &groups {
        let perms = permutations(b - a);
        orders = orders
            .into_iter()
            .flat_map(|o| {
                perms.iter().map(move |p| {
                    let mut o = o.clone();
                    o.extend(p.iter().map(|&k| a + k));
                    o
                })
            })
            .collect();
    }

    let mut prefix = vec![options.len() as u32];
    for (code, _) in &options {
        prefix.extend_from_slice(code);
    }
    let mut best: Option<Vec<u32>> = None;
    for order in &orders {
        let mut choice = vec![0usize; order.len()];
        loop {
            let tail = encode(ld, &options, order, &choice);
            if best.as_ref().is_none_or(|b| tail < *b) {
                best = Some(tail);
            }
            // next combination of roots
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < options[order[k]].1.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    prefix.extend(best.unwrap_or_default());
    prefix
}

fn encode(ld: &LabeledDiagram, options: &[(Vec<u32>, Vec<Walk>)], order: &[usize], choice: &[usize]) -> Vec<u32> {
    let d = &ld.diagram;
    let mut edges = Vec::new();
    for (k, &p) in order.iter().enumerate() {
        let w = &options[p].1[choice[k]];
        edges.extend_from_slice(&w.edges);
    }
    let mut region_no = vec![u32::MAX; d.region_count];
    let mut arc_no = vec![u32::MAX; d.arcs.len()];
    let (mut nr, mut na) = (0u32, 0u32);
    let mut out = Vec::with_capacity(edges.len() * 4);
    for &e in &edges {
        let edge = &d.edges[e];
        for r in [edge.left, edge.right] {
            if region_no[r] == u32::MAX {
                region_no[r] = nr;
                nr += 1;
            }
            out.push(region_no[r]);
        }
        let a = d.edge_arc[e];
        if arc_no[a] == u32::MAX {
            arc_no[a] = na;
            na += 1;
        }
        out.push(arc_no[a]);
        out.push(d.edge_comp[e] as u32);
    }
    match ld.mode {
        Mode::Arcs => {
            out.push(0);
            let mut by_no = vec![0; d.arcs.len()];
            for (a, &n) in arc_no.iter().enumerate() {
                by_no[n as usize] = a;
            }
            for &i in &by_no {
                for &j in &by_no {
                    out.push(u32::from(ld.rel.get(i, j)));
                }
            }
        }
        Mode::Components => {
            out.push(1);
            let n = ld.rel.len();
            for i in 0..n {
                for j in 0..n {
                    out.push(u32::from(ld.rel.get(i, j)));
                }
            }
        }
    }
    out
}
