use std::path::PathBuf;
use std::process::{Command, Output};

use relknot::{BinaryRelation, LabeledDiagram, PartialAlgebra};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relknot"))
        .args(args)
        .current_dir(root())
        .env_remove("RELKNOT_MAX_STATES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn term_not_related_to_itself() {
    let o = run(&["relate-terms", "fixtures/ex2_5.rel", "(a|b)&c", "(a|b)&c"]);
    assert_eq!(stdout(&o), "0\n");
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["relate-terms", "fixtures/ex2_5.rel", "1", "0"]);
    assert_eq!(stdout(&o), "1\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn partial_quandle_homology() {
    let o = run(&["homology", "--theory", "pquandle", "--max-degree", "3", "fixtures/ex3_19.alg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let h2 = out.lines().find(|l| l.starts_with("H_2 = ")).unwrap();
    assert!(h2.starts_with("H_2 = Z^") && h2.ends_with(" + Z/3"), "{h2}");
    assert_eq!(out.lines().count(), 3);

    let o = run(&["--porcelain", "homology", "--theory", "pquandle", "--max-degree", "3", "fixtures/ex3_19.alg"]);
    let lines: Vec<Vec<String>> = stdout(&o).lines().map(|l| l.split(' ').map(str::to_string).collect()).collect();
    let torsion: Vec<&[String]> = lines.iter().map(|l| &l[2..]).collect();
    assert_eq!(torsion[1], ["3"]);
    assert_eq!(torsion[2], ["3", "3", "3"]);
}

#[test]
fn relation_homology_takes_rel_files() {
    let o = run(&["--porcelain", "homology", "--theory", "rel", "--max-degree", "2", "fixtures/ex2_5.rel"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = run(&["homology", "--theory", "quandle", "fixtures/ex2_5.rel"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn terminal_state_has_no_moves() {
    let o = run(&["moves", "--diagram", "fixtures/trefoil_zero.pd", "--theory", "arc_C1", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}

#[test]
fn boundary_and_class_orders() {
    let o = run(&["boundary", "--theory", "pquandle", "fixtures/ex3_19.alg", "-(1,4) + (1,3)"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("order 3"), "{}", stdout(&o));

    let o = run(&["--porcelain", "boundary", "--theory", "pquandle", "fixtures/ex3_19.alg", "-(5,4)-(3,5)-(4,3)"]);
    let out = stdout(&o);
    assert!(out.starts_with("boundary\t0\nclass\tboundary\t"), "{out}");

    // not a cycle
    let o = run(&["boundary", "--theory", "pquandle", "fixtures/ex3_19.alg", "(1,2,3)"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["boundary", "--theory", "pquandle", "fixtures/ex3_19.alg", "(1,9)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dihedral_trefoil_colorings() {
    let dir = std::env::temp_dir().join(format!("relknot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let alg = dir.join("d3.alg");
    std::fs::write(&alg, "0 1 2\n%\n0 2 1\n2 1 0\n1 0 2\n").unwrap();
    let pd = dir.join("trefoil.pd");
    let text = std::fs::read_to_string(root().join("fixtures/trefoil.pd")).unwrap();
    let head = text.split("on: arcs").next().unwrap();
    std::fs::write(&pd, format!("{head}on: components\nK\n1\n")).unwrap();
    let o = run(&["--porcelain", "color", "--type", "II", "--diagram", pd.to_str().unwrap(), "--algebra", alg.to_str().unwrap()]);
    assert_eq!(stdout(&o), "9\n", "{}", stderr(&o));
    let o = run(&["--porcelain", "color", "--diagram", pd.to_str().unwrap(), "--algebra", alg.to_str().unwrap(), "--list"]);
    assert_eq!(stdout(&o).lines().count(), 9);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cycles_of_a_coloring() {
    let dir = std::env::temp_dir().join(format!("relknot-cycle-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let c = dir.join("c.txt");
    std::fs::write(&c, "a = 1\nb = 2\n").unwrap();
    let o = run(&[
        "--porcelain", "cycle", "--diagram", "fixtures/hopf.pd", "--algebra", "fixtures/ex3_19.alg", "--coloring",
        c.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), "A\t(1,2)\tfree\nB\t0\tzero\n", "{}", stderr(&o));
    // 1 * 2 = 2, so b cannot be 3 here
    std::fs::write(&c, "a = 1\nb = 3\n").unwrap();
    let o = run(&["cycle", "--diagram", "fixtures/hopf.pd", "--algebra", "fixtures/ex3_19.alg", "--coloring", c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reach_exit_codes() {
    let o = run(&["reach", "--theory", "always", "--from", "fixtures/kink.pd", "--to", "fixtures/unknot.pd"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("reachable in 1 move\n"));
    let o = run(&[
        "--porcelain", "reach", "--theory", "parity", "--from", "fixtures/kink.pd", "--to", "fixtures/unknot.pd",
        "--max-states", "200",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("no_within_bounds "));
}

#[test]
fn state_bound_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_relknot"))
        .args(["--porcelain", "explore", "--theory", "always", "--from", "fixtures/kink.pd"])
        .current_dir(root())
        .env("RELKNOT_MAX_STATES", "7")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("states 7\n"), "{}", stdout(&o));
}

#[test]
fn apply_prints_the_new_diagram() {
    let o = run(&["--porcelain", "apply", "--diagram", "fixtures/kink.pd", "--theory", "always", "--move", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let d = LabeledDiagram::parse(&stdout(&o)).unwrap();
    assert_eq!(d.diagram().crossing_count(), 0);
    let o = run(&["apply", "--diagram", "fixtures/kink.pd", "--theory", "always", "--move", "99"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explore_dot_output() {
    let o = run(&["explore", "--theory", "parity", "--from", "fixtures/kink.pd", "--max-states", "5", "--dot"]);
    let out = stdout(&o);
    assert!(out.starts_with("digraph moves {\n") && out.ends_with("}\n"));
}

#[test]
fn entropy_and_axioms() {
    assert_eq!(run(&["entropy-check"]).status.code(), Some(0));
    let o = run(&["--porcelain", "check-axioms", "fixtures/ex3_19.alg"]);
    assert_eq!(stdout(&o), "partial_quandle_rel ok\n");
    assert_eq!(run(&["check-axioms", "fixtures/ex3_19.alg", "--as", "quandle"]).status.code(), Some(0));
    // partial tables are not total quandles
    let o = run(&["--porcelain", "check-axioms", "fixtures/ex3_12.alg", "--as", "quandle"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("quandle fail\nQ1\t"));
}

#[test]
fn closures() {
    let o = run(&["closure", "fixtures/ex2_5.rel", "--kind", "symmetric"]);
    let r = BinaryRelation::parse(&stdout(&o)).unwrap();
    assert!(r.is_symmetric());
    assert_eq!(run(&["closure", "fixtures/ex2_5.rel", "--kind", "transitive"]).status.code(), Some(2));
}

#[test]
fn errors_name_the_file_and_line() {
    let dir = std::env::temp_dir().join(format!("relknot-err-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.rel");
    std::fs::write(&bad, "a b\n1 0\n1 x\n").unwrap();
    let o = run(&["relate-terms", bad.to_str().unwrap(), "a", "b"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.rel") && err.contains("line 3"), "{err}");
    assert_eq!(run(&["relate-terms", "fixtures/ex2_5.rel", "a &", "b"]).status.code(), Some(2));
    assert_eq!(run(&["homology", "--bogus"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn capacity_errors_exit_three() {
    let o = run(&["homology", "--theory", "rack", "--max-degree", "12", "fixtures/ex3_19.alg"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("capacity"));
}

#[test]
fn porcelain_is_stable() {
    let cmds: [&[&str]; 4] = [
        &["--porcelain", "homology", "--theory", "quandle", "--max-degree", "3", "fixtures/ex3_19.alg"],
        &["--porcelain", "moves", "--diagram", "fixtures/trefoil.pd", "--theory", "arc_C1", "--list"],
        &["--porcelain", "explore", "--theory", "always", "--from", "fixtures/hopf.pd", "--max-states", "40"],
        &["--porcelain", "color", "--diagram", "fixtures/hopf.pd", "--algebra", "fixtures/ex3_12.alg", "--list"],
    ];
    for args in cmds {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn every_fixture_round_trips() {
    let mut seen = 0;
    for entry in std::fs::read_dir(root().join("fixtures")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let name = path.display();
        match path.extension().and_then(|e| e.to_str()) {
            Some("rel") => {
                let r = BinaryRelation::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
                assert_eq!(BinaryRelation::parse(&r.to_rel_string()).unwrap(), r, "{name}");
            }
            Some("alg") => {
                let a = PartialAlgebra::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
                assert_eq!(PartialAlgebra::parse(&a.to_alg_string()).unwrap(), a, "{name}");
            }
            Some("pd") => {
                let d = LabeledDiagram::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
                let back = LabeledDiagram::parse(&d.to_pd_string()).unwrap();
                assert_eq!(back.canonical_form(), d.canonical_form(), "{name}");
                assert_eq!(back.to_pd_string(), d.to_pd_string(), "{name}");
            }
            _ => continue,
        }
        seen += 1;
    }
    assert!(seen >= 10);
}
