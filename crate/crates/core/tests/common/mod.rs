#![allow(dead_code)]

pub mod props;

use relknot::coloring::ColoringType;
use relknot::diagram::Sign;
use relknot::{BinaryRelation, LabeledDiagram, Mode, PartialAlgebra, Standard};

pub fn read(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub fn diagram(name: &str) -> LabeledDiagram {
    LabeledDiagram::parse(&read(name)).unwrap()
}

/// A fixture in arc mode with every pair of arcs related.
pub fn full_arcs(name: &str) -> LabeledDiagram {
    let d = diagram(name).diagram().clone();
    let full = BinaryRelation::full(d.arc_names()).unwrap();
    LabeledDiagram::new(d, Mode::Arcs, full).unwrap()
}

/// A fixture with the given relation on its components.
pub fn on_components(name: &str, matrix: Vec<Vec<bool>>) -> LabeledDiagram {
    let d = diagram(name).diagram().clone();
    let rel = BinaryRelation::new(d.component_names(), matrix).unwrap();
    LabeledDiagram::new(d, Mode::Components, rel).unwrap()
}

pub fn alg(name: &str) -> PartialAlgebra {
    PartialAlgebra::parse(&read(name)).unwrap()
}

/// Every assignment of elements to arcs, filtered by the rules.
pub fn brute_force(ld: &LabeledDiagram, a: &PartialAlgebra, kind: ColoringType) -> Vec<Vec<usize>> {
    let d = ld.diagram();
    let (n, k) = (d.arcs().len(), a.len());
    let good = d.classify_crossings(ld.relation()).unwrap();
    let comp = |arc: usize| d.component_of_arc(arc);
    let mut out = Vec::new();
    let mut f = vec![0usize; n];
    'outer: loop {
        let ok = (0..n).all(|x| {
            (0..n).all(|y| !ld.relation().get(comp(x), comp(y)) || a.relation().get(f[x], f[y]))
        }) && d.crossings().iter().zip(&good).all(|(c, &g)| {
            let (ui, uo, o) = (d.arc_of_edge(c.under_in()), d.arc_of_edge(c.under_out()), d.arc_of_edge(c.over_in()));
            if g {
                match c.sign {
                    Sign::Positive => a.star(f[ui], f[o]) == Some(f[uo]),
                    Sign::Negative => a.star(f[uo], f[o]) == Some(f[ui]),
                }
            } else {
                kind == ColoringType::I || f[ui] == f[uo]
            }
        });
        if ok {
            out.push(f.clone());
        }
        for i in (0..n).rev() {
            f[i] += 1;
            if f[i] < k {
                continue 'outer;
            }
            f[i] = 0;
        }
        break;
    }
    out.sort();
    out
}

pub const T: bool = true;
pub const F: bool = false;

/// Component-mode fixtures paired with algebras.
pub fn cases() -> Vec<(String, LabeledDiagram, PartialAlgebra)> {
    let ex312 = alg("ex3_12.alg");
    let ex319 = alg("ex3_19.alg");
    let d3 = PartialAlgebra::standard(Standard::Dihedral(3)).unwrap();
    let mut out = Vec::new();
    for (name, rels) in [
        ("hopf.pd", vec![vec![vec![F, T], vec![T, T]], vec![vec![T, T], vec![T, T]], vec![vec![T, F], vec![T, T]]]),
        ("r2_pair.pd", vec![vec![vec![F, T], vec![T, T]], vec![vec![T, T], vec![F, T]]]),
        ("unlink2.pd", vec![vec![vec![F, T], vec![T, T]]]),
        ("trefoil.pd", vec![vec![vec![T]]]),
        ("triangle.pd", vec![vec![vec![T]]]),
        ("kink.pd", vec![vec![vec![T]], vec![vec![F]]]),
    ] {
        for (i, m) in rels.into_iter().enumerate() {
            let ld = on_components(name, m);
            for (an, a) in [("ex3_12", &ex312), ("ex3_19", &ex319), ("dihedral3", &d3)] {
                out.push((format!("{name}#{i}/{an}"), ld.clone(), a.clone()));
            }
        }
    }
    out
}
