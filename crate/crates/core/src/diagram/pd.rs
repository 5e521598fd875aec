//! The `.pd` text format.
//!
//! ```text
//! components: K=a
//! X 1 under_in=c.2 under_out=a.1 over_in=b.1 over_out=b.2 sign=+
//! ...
//! %
//! on: arcs
//! a b c
//! 1 1 0
//! ...
//! ```
//!
//! Port values are edge labels; each label occurs once as an outgoing and
//! once as an incoming end. An edge belongs to the arc named by its label up
//! to the last `.`.

use std::collections::HashMap;
use std::fmt::Write;

use super::{assemble, Crossing, Diagram, LabeledDiagram, Mode, RawDiagram, RawEdge, Sign, Tag};
use crate::error::{Error, Result};
use crate::relation::BinaryRelation;

fn arc_of_label(label: &str) -> &str {
    match label.rfind('.') {
        Some(i) if i > 0 => &label[..i],
        _ => label,
    }
}

struct EdgeEnds {
    label: String,
    tail: Option<(usize, usize)>,
    head: Option<(usize, usize)>,
    line: usize,
}

pub(crate) fn parse(text: &str) -> Result<LabeledDiagram> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let split = lines.iter().position(|(_, l)| l.trim() == "%");
    let (body, rel_lines) = match split {
        Some(p) => (&lines[..p], Some(&lines[p + 1..])),
        None => (&lines[..], None),
    };

    let mut comp_header: Option<(usize, Vec<String>)> = None;
    let mut loops: Vec<String> = Vec::new();
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut ends: Vec<EdgeEnds> = Vec::new();
    let mut by_label: HashMap<String, usize> = HashMap::new();

    for &(lineno, raw_line) in body {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("components:") {
            comp_header = Some((lineno, rest.split_whitespace().map(str::to_string).collect()));
        } else if let Some(rest) = line.strip_prefix("loops:") {
            let words: Vec<&str> = rest.split_whitespace().collect();
            match words.as_slice() {
                [k] if k.chars().all(|c| c.is_ascii_digit()) => {
                    let k: usize = k.parse().map_err(|_| Error::parse(lineno, "bad loop count"))?;
                    loops.extend((1..=k).map(|i| format!("loop{i}")));
                }
                _ => loops.extend(words.iter().map(|w| w.to_string())),
            }
        } else if let Some(rest) = line.strip_prefix("X ") {
            let x = crossings.len();
            let mut fields: HashMap<&str, &str> = HashMap::new();
            for tok in rest.split_whitespace().skip(1) {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| Error::parse(lineno, format!("expected key=value, found `{tok}`")))?;
                if fields.insert(k, v).is_some() {
                    return Err(Error::parse(lineno, format!("`{k}` given twice")));
                }
            }
            let get = |k: &str| {
                fields
                    .get(k)
                    .copied()
                    .ok_or_else(|| Error::parse(lineno, format!("missing `{k}`")))
            };
            let sign = match get("sign")? {
                "+" => Sign::Positive,
                "-" => Sign::Negative,
                s => return Err(Error::parse(lineno, format!("sign must be + or -, found `{s}`"))),
            };
            if fields.len() != 5 {
                return Err(Error::parse(lineno, "unexpected field in crossing"));
            }
            let mut c = Crossing {
                sign,
                slots: [0; 4],
            };
            let (oi, oo) = (c.over_in_slot(), c.over_out_slot());
            for (key, slot) in [("under_in", 0), ("under_out", 2), ("over_in", oi), ("over_out", oo)] {
                let label = get(key)?;
                let n = ends.len();
                let e = *by_label.entry(label.to_string()).or_insert(n);
                if e == n {
                    ends.push(EdgeEnds {
                        label: label.to_string(),
                        tail: None,
                        head: None,
                        line: lineno,
                    });
                }
                let end = if c.is_incoming(slot) {
                    &mut ends[e].head
                } else {
                    &mut ends[e].tail
                };
                if end.is_some() {
                    return Err(Error::parse(
                        lineno,
                        format!("edge `{label}` is used twice as an {} end", if c.is_incoming(slot) { "incoming" } else { "outgoing" }),
                    ));
                }
                *end = Some((x, slot));
                c.slots[slot] = e;
            }
            crossings.push(c);
        } else {
            return Err(Error::parse(lineno, format!("unrecognized line `{line}`")));
        }
    }
    for e in &ends {
        if e.tail.is_none() || e.head.is_none() {
            return Err(Error::parse(e.line, format!("edge `{}` has a dangling port", e.label)));
        }
    }

    // arc names: label prefixes, then free loops
    let mut arc_names: Vec<String> = Vec::new();
    let mut arc_idx: HashMap<String, usize> = HashMap::new();
    let mut tags = Vec::new();
    for e in &ends {
        let a = arc_of_label(&e.label).to_string();
        let n = arc_names.len();
        let i = *arc_idx.entry(a.clone()).or_insert(n);
        if i == n {
            arc_names.push(a);
        }
        tags.push(i);
    }
    for l in &loops {
        if arc_idx.contains_key(l) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("loop name `{l}` is already an arc"),
            });
        }
        arc_idx.insert(l.clone(), arc_names.len());
        tags.push(arc_names.len());
        arc_names.push(l.clone());
    }

    // strand cycles decide components
    let m = ends.len() + loops.len();
    let next = |e: usize| -> usize {
        if e >= ends.len() {
            return e;
        }
        let (x, s) = ends[e].head.expect("checked");
        crossings[x].slots[(s + 2) % 4]
    };
    let mut cycle_of = vec![usize::MAX; m];
    let mut cycles = 0;
    for start in 0..m {
        if cycle_of[start] != usize::MAX {
            continue;
        }
        let mut e = start;
        loop {
            if cycle_of[e] != usize::MAX {
                return Err(Error::Diagram("strand following is not a permutation".into()));
            }
            cycle_of[e] = cycles;
            e = next(e);
            if e == start {
                break;
            }
        }
        cycles += 1;
    }
    let (comp_names, cycle_comp) = match comp_header {
        None => ((1..=cycles).map(|i| format!("K{i}")).collect::<Vec<_>>(), (0..cycles).collect::<Vec<_>>()),
        Some((lineno, words)) => {
            if words.len() != cycles {
                return Err(Error::parse(
                    lineno,
                    format!("{} component names for {cycles} components", words.len()),
                ));
            }
            let mut names = Vec::new();
            let mut cycle_comp = vec![usize::MAX; cycles];
            let explicit = words.iter().all(|w| w.contains('='));
            for (i, w) in words.iter().enumerate() {
                let (name, cyc) = if explicit {
                    let (name, arc) = w.split_once('=').expect("checked");
                    let a = *arc_idx
                        .get(arc)
                        .ok_or_else(|| Error::parse(lineno, format!("unknown arc `{arc}`")))?;
                    let e = tags.iter().position(|&t| t == a).expect("every arc has an edge");
                    (name, cycle_of[e])
                } else if w.contains('=') {
                    return Err(Error::parse(lineno, "mix of `name` and `name=arc` entries"));
                } else {
                    (w.as_str(), i)
                };
                if cycle_comp[cyc] != usize::MAX {
                    return Err(Error::parse(lineno, format!("component `{name}` names a component twice")));
                }
                cycle_comp[cyc] = i;
                names.push(name.to_string());
            }
            (names, cycle_comp)
        }
    };

    let mut edges: Vec<RawEdge> = ends
        .iter()
        .enumerate()
        .map(|(e, ends)| RawEdge {
            tail: ends.tail,
            head: ends.head,
            left: None,
            right: None,
            comp: cycle_comp[cycle_of[e]],
            tag: Tag::Old(tags[e]),
        })
        .collect();
    for i in 0..loops.len() {
        let e = ends.len() + i;
        edges.push(RawEdge {
            tail: None,
            head: None,
            left: None,
            right: None,
            comp: cycle_comp[cycle_of[e]],
            tag: Tag::Old(tags[e]),
        });
    }
    let expected_arcs = arc_names.len();
    let raw = RawDiagram {
        crossings,
        edges,
        comp_names,
        old_arc_names: arc_names,
        region_bound: 0,
        unions: Vec::new(),
        labels: Vec::new(),
        shared_outer: true,
    };
    let (diagram, _) = assemble(raw)?;
    if diagram.arcs().len() != expected_arcs {
        return Err(Error::Diagram(
            "edge labels do not match the arcs: each arc needs its own name".into(),
        ));
    }

    let (mode, rel) = match rel_lines {
        None => (Mode::Arcs, BinaryRelation::full(diagram.arc_names())?),
        Some(rest) => {
            let mut it = rest
                .iter()
                .copied()
                .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'));
            let (lineno, head) = it
                .next()
                .ok_or_else(|| Error::parse(lines.len(), "missing relation after `%`"))?;
            let mode = match head.trim().strip_prefix("on:").map(str::trim) {
                Some("arcs") => Mode::Arcs,
                Some("components") => Mode::Components,
                _ => return Err(Error::parse(lineno, "expected `on: arcs` or `on: components`")),
            };
            (mode, BinaryRelation::parse_lines(it, lineno)?)
        }
    };
    LabeledDiagram::new(diagram, mode, rel)
}

pub(crate) fn write(d: &Diagram, rel: Option<(Mode, &BinaryRelation)>) -> String {
    let mut label = vec![String::new(); d.edges().len()];
    for arc in d.arcs() {
        for (k, &e) in arc.edges.iter().enumerate() {
            label[e] = format!("{}.{}", arc.name, k + 1);
        }
    }
    let mut out = String::new();
    let comps: Vec<String> = d
        .components()
        .iter()
        .map(|c| format!("{}={}", c.name, d.arcs()[d.arc_of_edge(c.edges[0])].name))
        .collect();
    writeln!(out, "components: {}", comps.join(" ")).unwrap();
    let loops: Vec<&str> = (0..d.edges().len())
        .filter(|&e| d.edges()[e].tail.is_none())
        .map(|e| d.arcs()[d.arc_of_edge(e)].name.as_str())
        .collect();
    if !loops.is_empty() {
        writeln!(out, "loops: {}", loops.join(" ")).unwrap();
    }
    for (i, c) in d.crossings().iter().enumerate() {
        writeln!(
            out,
            "X {} under_in={} under_out={} over_in={} over_out={} sign={}",
            i + 1,
            label[c.under_in()],
            label[c.under_out()],
            label[c.over_in()],
            label[c.over_out()],
            c.sign
        )
        .unwrap();
    }
    if let Some((mode, rel)) = rel {
        out.push_str("%\n");
        out.push_str(match mode {
            Mode::Arcs => "on: arcs\n",
            Mode::Components => "on: components\n",
        });
        out.push_str(&rel.to_rel_string());
    }
    out
}
