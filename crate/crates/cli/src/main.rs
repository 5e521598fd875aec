use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relknot::coloring::cycle_from_coloring;
use relknot::diagram::{apply_move, check_entropy_decreasing, MoveScheme};
use relknot::term::eval_rel;
use relknot::{
    AlgebraKind, BinaryRelation, BoolTerm, Bounds, Chain, ChainComplex, ClassOrder, ClosureKind, Coloring,
    ColoringType, ConditionalTheory, Error, LabeledDiagram, PartialAlgebra, Reach, Theory,
};

mod chain_text;

#[derive(Parser)]
#[command(name = "relknot", version, about = "Knot diagrams with relations on arcs, partial quandles and their homology")]
struct Cli {
    /// Stable machine-readable output.
    #[arg(long, global = true)]
    porcelain: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide `q R p` for Boolean terms over a relation; prints 0 or 1.
    RelateTerms {
        relation: PathBuf,
        q: String,
        p: String,
    },
    /// Print a closure of a relation.
    Closure {
        relation: PathBuf,
        #[arg(long, value_enum)]
        kind: ClosureArg,
    },
    /// Check the axioms of an algebra.
    CheckAxioms {
        algebra: PathBuf,
        /// Check as this kind instead of the declared one.
        #[arg(long = "as")]
        kind: Option<String>,
    },
    /// Homology groups H_1 .. H_N.
    Homology {
        #[command(flatten)]
        complex: ComplexArgs,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Boundary of a chain such as `-(1,4) + (1,3)`, and the class of a cycle.
    Boundary {
        #[command(flatten)]
        complex: ComplexArgs,
        #[arg(allow_hyphen_values = true)]
        chain: String,
    },
    /// Count or list colorings of a diagram.
    Color {
        #[arg(long = "type", default_value = "II")]
        kind: String,
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, conflicts_with = "list")]
        count: bool,
        #[arg(long)]
        list: bool,
    },
    /// Per-component 2-cycles of a type II coloring.
    Cycle {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Licensed moves of a diagram.
    Moves {
        #[arg(long)]
        diagram: PathBuf,
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long)]
        list: bool,
    },
    /// Apply the n-th licensed move (1-based, as listed by `moves --list`).
    Apply {
        #[arg(long)]
        diagram: PathBuf,
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long = "move")]
        index: usize,
    },
    /// Search for a licensed move sequence between two diagrams.
    Reach {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Breadth-first move graph from a diagram.
    Explore {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long)]
        from: PathBuf,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Emit Graphviz text.
        #[arg(long)]
        dot: bool,
    },
    /// Check that every label of a move scheme is dominated by its witness.
    EntropyCheck {
        #[arg(long, default_value = "default")]
        scheme: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosureArg {
    Symmetric,
    #[value(name = "semi_transitive")]
    SemiTransitive,
    St,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoryArg {
    Rel,
    Rack,
    Quandle,
    Prack,
    Pquandle,
    Gendefect,
}

#[derive(Args)]
struct ComplexArgs {
    #[arg(long, value_enum)]
    theory: TheoryArg,
    #[arg(long, default_value_t = 0)]
    defect: usize,
    /// A `.alg` file, or a `.rel` file for `--theory rel`.
    input: PathBuf,
}

#[derive(Args)]
struct TheoryArgs {
    /// always, parity, value_monotone[:weak|strict], arc_C1, component_rel
    #[arg(long)]
    theory: String,
    /// `default` or a scheme file.
    #[arg(long, default_value = "default")]
    scheme: String,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    max_crossings: Option<usize>,
    /// Overrides RELKNOT_MAX_STATES.
    #[arg(long)]
    max_states: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }

    fn from_core(context: Option<&Path>, e: Error) -> Self {
        let code = if matches!(e, Error::Capacity(_)) { 3 } else { 2 };
        let msg = match context {
            Some(p) => format!("{}: {e}", p.display()),
            None => e.to_string(),
        };
        Failure { code, msg }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

type Outcome = Result<bool, Failure>;

trait Context<T> {
    fn at(self, path: &Path) -> Result<T, Failure>;
    fn plain(self) -> Result<T, Failure>;
}

impl<T> Context<T> for relknot::Result<T> {
    fn at(self, path: &Path) -> Result<T, Failure> {
        self.map_err(|e| Failure::from_core(Some(path), e))
    }

    fn plain(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::from_core(None, e))
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_relation(path: &Path) -> Result<BinaryRelation, Failure> {
    BinaryRelation::parse(&read(path)?).at(path)
}

fn load_algebra(path: &Path) -> Result<PartialAlgebra, Failure> {
    PartialAlgebra::parse(&read(path)?).at(path)
}

fn load_diagram(path: &Path) -> Result<LabeledDiagram, Failure> {
    LabeledDiagram::parse(&read(path)?).at(path)
}

fn load_scheme(spec: &str) -> Result<MoveScheme, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        MoveScheme::parse(&read(path)?).at(path)
    } else {
        MoveScheme::named(spec).plain()
    }
}

fn load_theory(args: &TheoryArgs) -> Result<ConditionalTheory, Failure> {
    Ok(ConditionalTheory::parse(&args.theory).plain()?.with_scheme(load_scheme(&args.scheme)?))
}

fn bounds(args: &BoundArgs) -> Bounds {
    let mut b = Bounds::from_env();
    b.max_crossings = args.max_crossings.or(b.max_crossings);
    b.max_states = args.max_states.unwrap_or(b.max_states);
    b.max_depth = args.max_depth.unwrap_or(b.max_depth);
    b
}

fn is_rel_file(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "rel")
}

fn build_complex(args: &ComplexArgs, max_degree: usize) -> Result<ChainComplex, Failure> {
    let theory = match args.theory {
        TheoryArg::Rel => Theory::RelDefect(args.defect),
        TheoryArg::Rack => Theory::Rack,
        TheoryArg::Quandle => Theory::Quandle,
        TheoryArg::Prack => Theory::PartialRack,
        TheoryArg::Pquandle => Theory::PartialQuandle,
        TheoryArg::Gendefect => Theory::GeneralDefect(args.defect),
    };
    let path = args.input.as_path();
    if is_rel_file(path) {
        if !matches!(theory, Theory::RelDefect(_)) {
            return Err(Failure::usage(format!(
                "{}: theory {} needs an algebra file",
                path.display(),
                theory.name()
            )));
        }
        ChainComplex::of_relation(&load_relation(path)?, args.defect, max_degree).at(path)
    } else {
        ChainComplex::of_algebra(theory, &load_algebra(path)?, max_degree).at(path)
    }
}

fn relate_terms(relation: &Path, q: &str, p: &str) -> Outcome {
    let rel = load_relation(relation)?;
    let q = BoolTerm::parse(q).plain()?;
    let p = BoolTerm::parse(p).plain()?;
    let holds = eval_rel(&rel, &q, &p).plain()?;
    println!("{}", u8::from(holds));
    Ok(holds)
}

fn closure(relation: &Path, kind: ClosureArg) -> Outcome {
    let rel = load_relation(relation)?;
    let kind = match kind {
        ClosureArg::Symmetric => ClosureKind::Symmetric,
        ClosureArg::SemiTransitive => ClosureKind::SemiTransitive,
        ClosureArg::St => ClosureKind::SymmetricSemiTransitive,
    };
    print!("{}", rel.closure(kind).to_rel_string());
    Ok(true)
}

fn check_axioms(path: &Path, kind: Option<&str>, porcelain: bool) -> Outcome {
    let alg = load_algebra(path)?;
    let kind = match kind {
        Some(k) => AlgebraKind::parse(k).plain()?,
        None => alg.kind(),
    };
    let report = alg.check_as(kind);
    if porcelain {
        println!("{} {}", report.kind, if report.passed() { "ok" } else { "fail" });
        for v in &report.violations {
            println!("{}\t{}\t{}", v.axiom, v.elements.join(","), v.detail);
        }
    } else {
        println!("{}: {} ({} checked)", path.display(), report.kind, report.checked.join(", "));
        if report.passed() {
            println!("all axioms hold");
        } else {
            println!("{} violations", report.violations.len());
            for v in &report.violations {
                println!("  {v}");
            }
        }
    }
    Ok(report.passed())
}

fn homology(args: &ComplexArgs, max_degree: usize, porcelain: bool) -> Outcome {
    if max_degree == 0 {
        return Err(Failure::usage("--max-degree must be at least 1"));
    }
    let complex = build_complex(args, max_degree + 1)?;
    let groups = complex.homology_all();
    for (n, h) in groups.iter().enumerate().skip(1) {
        if porcelain {
            let mut line = format!("{n} {}", h.free_rank);
            for d in &h.invariant_factors {
                line.push_str(&format!(" {d}"));
            }
            println!("{line}");
        } else {
            println!("H_{n} = {h}");
        }
    }
    Ok(true)
}

fn class_of(complex: &ChainComplex, c: &Chain, porcelain: bool) -> Result<String, Failure> {
    if c.is_zero() {
        return Ok("zero".into());
    }
    let check = complex.express_as_boundary(c).plain()?;
    let names = complex.names();
    Ok(match (&check.witness, &check.order, porcelain) {
        (Some(w), _, false) => format!("boundary of {}", w.display(names)),
        (Some(w), _, true) => format!("boundary\t{}", w.display(names)),
        (None, ClassOrder::Finite(d), false) => format!("torsion class of order {d}"),
        (None, ClassOrder::Finite(d), true) => format!("torsion\t{d}"),
        (None, ClassOrder::Infinite, false) => "class of infinite order".into(),
        (None, ClassOrder::Infinite, true) => "free".into(),
    })
}

fn boundary(args: &ComplexArgs, text: &str, porcelain: bool) -> Outcome {
    let terms = chain_text::parse(text).map_err(Failure::usage)?;
    let degree = terms.first().map_or(0, |t| t.1.len());
    if degree == 0 {
        return Err(Failure::usage("the chain has no terms"));
    }
    let complex = build_complex(args, degree + 1)?;
    let borrowed: Vec<Vec<&str>> = terms.iter().map(|(_, w)| w.iter().map(String::as_str).collect()).collect();
    let refs: Vec<(i64, &[&str])> = terms.iter().zip(&borrowed).map(|((c, _), w)| (*c, w.as_slice())).collect();
    let c = complex.chain(&refs).plain()?;
    let d = complex.boundary(&c).plain()?;
    let names = complex.names();
    if porcelain {
        println!("boundary\t{}", d.display(names));
    } else {
        println!("d({}) = {}", c.display(names), d.display(names));
    }
    if d.is_zero() {
        let class = class_of(&complex, &c, porcelain)?;
        if porcelain {
            println!("class\t{class}");
        } else {
            println!("cycle: {class}");
        }
    }
    Ok(d.is_zero())
}

fn color(kind: &str, diagram: &Path, algebra: &Path, list: bool, porcelain: bool) -> Outcome {
    let kind = ColoringType::parse(kind).plain()?;
    let ld = load_diagram(diagram)?;
    let alg = load_algebra(algebra)?;
    let all = relknot::enumerate_colorings(&ld, &alg, kind).plain()?;
    if !list {
        if porcelain {
            println!("{}", all.len());
        } else {
            println!("{} type {kind} colorings", all.len());
        }
        return Ok(true);
    }
    for (i, c) in all.iter().enumerate() {
        if porcelain {
            let pairs: Vec<String> = ld
                .diagram()
                .arcs()
                .iter()
                .zip(&c.colors)
                .map(|(a, &x)| format!("{}={}", a.name, alg.elements()[x]))
                .collect();
            println!("{}", pairs.join(" "));
        } else {
            if i > 0 {
                println!();
            }
            println!("# coloring {}", i + 1);
            print!("{}", c.to_text(&ld, &alg));
        }
    }
    Ok(true)
}

fn cycle(diagram: &Path, algebra: &Path, coloring: &Path, porcelain: bool) -> Outcome {
    let ld = load_diagram(diagram)?;
    let alg = load_algebra(algebra)?;
    let col = Coloring::parse(&read(coloring)?, &ld, &alg, ColoringType::II).at(coloring)?;
    let cycles = cycle_from_coloring(&ld, &alg, &col).plain()?;
    let complex = ChainComplex::of_algebra(Theory::PartialQuandle, &alg, 3).at(algebra)?;
    for z in &cycles {
        let chain = z.chain.display(complex.names());
        let class = class_of(&complex, &z.chain, porcelain)?;
        if porcelain {
            println!("{}\t{chain}\t{class}", z.component);
        } else {
            println!("{}: {chain}  ({class})", z.component);
        }
    }
    Ok(true)
}

fn moves(diagram: &Path, theory: &TheoryArgs, list: bool, porcelain: bool) -> Outcome {
    let ld = load_diagram(diagram)?;
    let theory = load_theory(theory)?;
    let found = theory.licensed_moves(&ld).at(diagram)?;
    if list {
        for (i, (m, _)) in found.iter().enumerate() {
            if porcelain {
                println!("{}\t{m}", i + 1);
            } else {
                println!("{:>3}. {m}", i + 1);
            }
        }
    } else if porcelain {
        println!("{}", found.len());
    } else {
        println!("{} licensed moves under {theory}", found.len());
    }
    Ok(true)
}

fn apply(diagram: &Path, theory: &TheoryArgs, index: usize, porcelain: bool) -> Outcome {
    let ld = load_diagram(diagram)?;
    let theory = load_theory(theory)?;
    let found = theory.licensed_moves(&ld).at(diagram)?;
    let Some((m, _)) = index.checked_sub(1).and_then(|i| found.get(i)) else {
        return Err(Failure::usage(format!("no move {index}: {} licensed moves", found.len())));
    };
    let out = apply_move(&ld, m, theory.scheme()).plain()?;
    if !porcelain {
        println!("# applied {m}");
        for p in &out.provenance {
            println!("# {} = {} (dominated by {})", p.arc, p.label, p.witness);
        }
    }
    print!("{}", out.result.to_pd_string());
    Ok(true)
}

fn reach(theory: &TheoryArgs, from: &Path, to: &Path, b: &BoundArgs, porcelain: bool) -> Outcome {
    let theory = load_theory(theory)?;
    let src = load_diagram(from)?;
    let dst = load_diagram(to)?;
    match relknot::reachable(&theory, &src, &dst, bounds(b)).plain()? {
        Reach::Yes(path) => {
            if porcelain {
                println!("yes {}", path.len());
                for m in &path {
                    println!("{m}");
                }
            } else {
                let s = if path.len() == 1 { "" } else { "s" };
                println!("reachable in {} move{s}", path.len());
                for (i, m) in path.iter().enumerate() {
                    println!("{:>3}. {m}", i + 1);
                }
            }
            Ok(true)
        }
        Reach::NoWithinBounds { truncated, states } => {
            if porcelain {
                println!("no_within_bounds {states} {}", if truncated { "truncated" } else { "exhaustive" });
            } else if truncated {
                println!("not found within bounds ({states} states, search truncated)");
            } else {
                println!("not reachable ({states} states, search exhaustive)");
            }
            Ok(false)
        }
    }
}

fn explore(theory: &TheoryArgs, from: &Path, b: &BoundArgs, dot: bool, porcelain: bool) -> Outcome {
    let theory = load_theory(theory)?;
    let src = load_diagram(from)?;
    let g = relknot::explore(&theory, &src, bounds(b)).plain()?;
    if dot {
        print!("{}", g.to_dot());
        return Ok(true);
    }
    let poset = g.condense();
    let terminal = poset.terminal.iter().filter(|&&t| t).count();
    if porcelain {
        println!("states {}", g.node_count());
        println!("edges {}", g.edges().len());
        println!("classes {}", poset.classes.len());
        println!("terminal {terminal}");
        println!("truncated {}", u8::from(g.truncated()));
    } else {
        println!("{} states, {} moves", g.node_count(), g.edges().len());
        println!("{} classes of mutually reachable states, {terminal} terminal", poset.classes.len());
        if g.truncated() {
            println!("search truncated by bounds");
        }
    }
    Ok(true)
}

fn entropy_check(scheme: &str, porcelain: bool) -> Outcome {
    let scheme = load_scheme(scheme)?;
    let report = check_entropy_decreasing(&scheme);
    for e in &report.entries {
        let t = &e.template;
        if porcelain {
            println!("{}\t{}\t{}\t{}", t.kind, t.role, t.term, if e.holds { "ok" } else { "fail" });
        } else {
            let verdict = match &e.note {
                Some(note) => format!("FAIL: {note}"),
                None => format!("ok, below {}", t.witness),
            };
            println!("{} {} = {}  {verdict}", t.kind, t.role, t.term);
        }
    }
    if !porcelain {
        println!(
            "scheme {} is {}entropy decreasing",
            scheme.name(),
            if report.passed() { "" } else { "not " }
        );
    }
    Ok(report.passed())
}

fn run(cli: Cli) -> Outcome {
    let porcelain = cli.porcelain;
    match &cli.command {
        Command::RelateTerms { relation, q, p } => relate_terms(relation, q, p),
        Command::Closure { relation, kind } => closure(relation, *kind),
        Command::CheckAxioms { algebra, kind } => check_axioms(algebra, kind.as_deref(), porcelain),
        Command::Homology { complex, max_degree } => homology(complex, *max_degree, porcelain),
        Command::Boundary { complex, chain } => boundary(complex, chain, porcelain),
        Command::Color {
            kind,
            diagram,
            algebra,
            list,
            ..
        } => color(kind, diagram, algebra, *list, porcelain),
        Command::Cycle {
            diagram,
            algebra,
            coloring,
        } => cycle(diagram, algebra, coloring, porcelain),
        Command::Moves { diagram, theory, list } => moves(diagram, theory, *list, porcelain),
        Command::Apply { diagram, theory, index } => apply(diagram, theory, *index, porcelain),
        Command::Reach {
            theory,
            from,
            to,
            bounds,
        } => reach(theory, from, to, bounds, porcelain),
        Command::Explore {
            theory,
            from,
            bounds,
            dot,
        } => explore(theory, from, bounds, *dot, porcelain),
        Command::EntropyCheck { scheme } => entropy_check(scheme, porcelain),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("relknot: {f}");
            ExitCode::from(f.code)
        }
    }
}
