//! `avl-tamari`: enumeration, verification, series and export for balanced
//! trees in the Tamari lattice.
//!
//! Exit status: 0 on success or PASS, 1 when a verification fails, 2 on a
//! usage or input error.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use avl_tamari::balance_dynamics::{
    balanced_subposet, hypercube_labeling, hypercube_sweep, verify_closure, MAX_VERIFY_NODES,
};
use avl_tamari::grammar::{builtin_equation, builtin_grammar, Family, FunctionalEquation};
use avl_tamari::patterns::{avoids, maximal_balanced_trees, minimal_balanced_trees, occurs, PatternSet};
use avl_tamari::tamari::{build_poset, interval, DotLabels, TreePoset};
use avl_tamari::{all_balanced_trees, for_each_tree, Error, Tree};
use clap::{Args, Parser, Subcommand};

/// Largest lattice written without `--force`: 𝕋_13 already has 742900
/// elements.
const LATTICE_GUARD: usize = 13;

#[derive(Parser)]
#[command(name = "avl-tamari", version, about = "Balanced trees in the Tamari lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List trees with a given number of nodes as JSON lines, then `count=`.
    Enum(EnumArgs),
    /// Write the Hasse diagram of the Tamari lattice as DOT.
    Lattice(LatticeArgs),
    /// Write the Hasse diagram of the balanced trees under conservative
    /// rotations as DOT.
    BalancedPoset(PosetArgs),
    /// Print the interval between two trees and check it is a hypercube.
    Interval(IntervalArgs),
    /// Check that intervals with balanced ends contain only balanced trees.
    VerifyClosure(SweepArgs),
    /// Check that every interval with balanced ends is a hypercube.
    HypercubeSweep(SweepArgs),
    /// Print generating series coefficients, by number of leaves.
    Series(SeriesArgs),
    /// Run a synchronous grammar and print the finalized trees.
    Generate(GenerateArgs),
    /// Test which patterns of a set occur in a tree.
    Patterns(PatternArgs),
}

#[derive(Args)]
#[group(id = "filter", multiple = false)]
struct Filter {
    /// Only balanced trees.
    #[arg(long)]
    balanced: bool,
    /// Only maximal balanced trees.
    #[arg(long)]
    maximal: bool,
    /// Only minimal balanced trees.
    #[arg(long)]
    minimal: bool,
}

#[derive(Args)]
struct EnumArgs {
    #[arg(long)]
    nodes: usize,
    #[command(flatten)]
    filter: Filter,
}

#[derive(Args)]
struct DotOutput {
    /// Output file for the DOT graph.
    #[arg(long, value_name = "FILE")]
    dot: PathBuf,
    /// Label vertices by index and write an `index<TAB>json` table to
    /// FILE.index.tsv.
    #[arg(long)]
    index_labels: bool,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long)]
    nodes: usize,
    #[command(flatten)]
    output: DotOutput,
    /// Allow more than 13 nodes.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct PosetArgs {
    #[arg(long)]
    nodes: usize,
    #[command(flatten)]
    output: DotOutput,
}

#[derive(Args)]
struct IntervalArgs {
    /// Lower tree as JSON (`null` is a leaf, `{"l":..,"r":..}` a node).
    #[arg(long)]
    lower: String,
    /// Upper tree as JSON.
    #[arg(long)]
    upper: String,
    /// Also write the interval's Hasse diagram to FILE.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Check every size from 0 up to this many nodes (at most 14).
    #[arg(long)]
    max_nodes: usize,
}

#[derive(Args)]
struct SeriesArgs {
    /// Built-in equation: balanced, maximal, intervals or maximal-intervals.
    #[arg(long, required_unless_present = "sigma", conflicts_with = "sigma")]
    which: Option<Family>,
    /// Number of coefficients (leaves 1..=N).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    degree: u32,
    /// CSV output with header `leaves,count`.
    #[arg(long)]
    csv: bool,
    /// Custom substitution for `A = x + A(σ)`, one polynomial per variable
    /// in the order x, y, z, t, e.g. `--sigma "x^2 + 2*x*y" --sigma x`.
    #[arg(long, num_args = 1)]
    sigma: Vec<String>,
}

#[derive(Args)]
struct GenerateArgs {
    /// balanced, maximal, intervals or maximal-intervals.
    #[arg(long)]
    grammar: Family,
    /// Number of synchronous derivation steps (at most 8).
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=8))]
    steps: u64,
    /// Drop derivations with more leaves than this.
    #[arg(long, default_value_t = 12)]
    max_leaves: usize,
}

#[derive(Args)]
struct PatternArgs {
    /// The tree as JSON.
    #[arg(long)]
    tree: String,
    /// Pattern set: a keyword (pmax, pmin, balanced, perfect, right-comb,
    /// empty) or `;`-separated patterns.
    ///
    /// pattern := "(" label ["L:" pattern] ["R:" pattern] ")"
    /// label   := int | "*" | "!" int | "!{" int ("," int)* "}"
    ///
    /// `(-1 L:(-1))` is a node labeled -1 whose left child is labeled -1;
    /// `*` matches any label and `!{-1,0,1}` any label outside the set.
    #[arg(long, verbatim_doc_comment)]
    avoid: String,
}

enum Status {
    Pass,
    Fail,
}

type Outcome = Result<Status, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|s| {
        out.flush()?;
        Ok(s)
    });
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> Outcome {
    match command {
        Command::Enum(a) => enumerate(a, out),
        Command::Lattice(a) => lattice(a, out),
        Command::BalancedPoset(a) => {
            let poset = balanced_subposet(a.nodes)?;
            write_dot(&poset, &format!("B{}", a.nodes), &a.output)?;
            writeln!(
                out,
                "elements={} covers={} components={}",
                poset.len(),
                poset.covers().len(),
                poset.components().len()
            )?;
            Ok(Status::Pass)
        }
        Command::Interval(a) => interval_cmd(a, out),
        Command::VerifyClosure(a) => {
            check_sweep(a.max_nodes)?;
            let mut passed = true;
            for n in 0..=a.max_nodes {
                let report = verify_closure(n)?;
                writeln!(out, "{report}")?;
                passed &= report.passed();
            }
            verdict(passed, out)
        }
        Command::HypercubeSweep(a) => {
            check_sweep(a.max_nodes)?;
            let mut passed = true;
            for n in 0..=a.max_nodes {
                let report = hypercube_sweep(n)?;
                writeln!(out, "{report}")?;
                passed &= report.passed();
            }
            verdict(passed, out)
        }
        Command::Series(a) => {
            let eq = match a.which {
                Some(family) => builtin_equation(family),
                None => {
                    let sigma: Vec<&str> = a.sigma.iter().map(String::as_str).collect();
                    FunctionalEquation::parse(&sigma)?
                }
            };
            let series = eq.iterate_fixed_point(a.degree)?;
            let text = if a.csv { series.to_csv() } else { series.to_lines() };
            out.write_all(text.as_bytes())?;
            Ok(Status::Pass)
        }
        Command::Generate(a) => generate(a, out),
        Command::Patterns(a) => {
            let tree = Tree::from_json(&a.tree)?;
            let set: PatternSet = a.avoid.parse()?;
            for p in set.patterns() {
                writeln!(out, "{p} occurs={}", occurs(&tree, p))?;
            }
            writeln!(out, "avoids={}", avoids(&tree, &set))?;
            Ok(Status::Pass)
        }
    }
}

fn enumerate(a: EnumArgs, out: &mut impl Write) -> Outcome {
    let f = &a.filter;
    let trees = if f.maximal {
        maximal_balanced_trees(a.nodes)
    } else if f.minimal {
        minimal_balanced_trees(a.nodes)
    } else if f.balanced {
        all_balanced_trees(a.nodes)
    } else {
        let mut count = 0u128;
        let mut failure = None;
        for_each_tree(a.nodes, |t| {
            if failure.is_none() {
                match writeln!(out, "{}", t.to_json()) {
                    Ok(()) => count += 1,
                    Err(e) => failure = Some(e),
                }
            }
        });
        if let Some(e) = failure {
            return Err(e.into());
        }
        writeln!(out, "count={count}")?;
        return Ok(Status::Pass);
    };
    for t in &trees {
        writeln!(out, "{}", t.to_json())?;
    }
    writeln!(out, "count={}", trees.len())?;
    Ok(Status::Pass)
}

fn lattice(a: LatticeArgs, out: &mut impl Write) -> Outcome {
    if a.nodes > LATTICE_GUARD && !a.force {
        return Err(format!(
            "refusing to build the lattice for {} nodes (limit {LATTICE_GUARD}, sizes grow like 4^n); pass --force to override",
            a.nodes
        )
        .into());
    }
    let poset = build_poset(a.nodes)?;
    write_dot(&poset, &format!("T{}", a.nodes), &a.output)?;
    writeln!(out, "elements={} covers={}", poset.len(), poset.covers().len())?;
    Ok(Status::Pass)
}

fn index_path(dot: &Path) -> PathBuf {
    let mut name = dot.as_os_str().to_owned();
    name.push(".index.tsv");
    PathBuf::from(name)
}

fn write_dot(poset: &TreePoset, name: &str, output: &DotOutput) -> io::Result<()> {
    let labels = if output.index_labels { DotLabels::Index } else { DotLabels::Json };
    fs::write(&output.dot, poset.to_dot(name, labels))?;
    if output.index_labels {
        fs::write(index_path(&output.dot), poset.index_table())?;
    }
    Ok(())
}

fn interval_cmd(a: IntervalArgs, out: &mut impl Write) -> Outcome {
    let lower = Tree::from_json(&a.lower)?;
    let upper = Tree::from_json(&a.upper)?;
    let iv = interval(&lower, &upper)?;
    let order = iv.poset.topological_order().expect("intervals are acyclic");
    for i in order {
        writeln!(out, "{}", iv.elements()[i].to_json())?;
    }
    writeln!(out, "elements={}", iv.len())?;
    if let Some(path) = &a.dot {
        fs::write(path, iv.poset.to_dot("interval", DotLabels::Json))?;
    }
    match hypercube_labeling(&iv) {
        Ok(h) => {
            writeln!(out, "k={} hypercube=PASS", h.dimension)?;
            Ok(Status::Pass)
        }
        Err(Error::NotHypercube(reason)) => {
            writeln!(out, "hypercube=FAIL reason={reason}")?;
            Ok(Status::Fail)
        }
        Err(Error::NotBalanced) => {
            writeln!(out, "hypercube=SKIP reason=endpoints are not both balanced")?;
            Ok(Status::Pass)
        }
        Err(e) => Err(e.into()),
    }
}

fn check_sweep(max_nodes: usize) -> Result<(), Error> {
    if max_nodes > MAX_VERIFY_NODES {
        return Err(Error::TooLarge { what: "--max-nodes", value: max_nodes, bound: MAX_VERIFY_NODES });
    }
    Ok(())
}

fn verdict(passed: bool, out: &mut impl Write) -> Outcome {
    if passed {
        writeln!(out, "PASS")?;
        Ok(Status::Pass)
    } else {
        writeln!(out, "FAIL")?;
        Ok(Status::Fail)
    }
}

fn generate(a: GenerateArgs, out: &mut impl Write) -> Outcome {
    let grammar = builtin_grammar(a.grammar);
    let marked = matches!(a.grammar, Family::Intervals | Family::MaximalIntervals);
    let mut outputs = grammar.generate(a.steps as usize, Some(a.max_leaves));
    outputs.sort_by(|x, y| x.external().cmp(&y.external()).then_with(|| x.cmp(y)));
    let mut by_leaves = BTreeMap::new();
    for t in &outputs {
        *by_leaves.entry(t.external()).or_insert(0usize) += 1;
        let labels: Vec<String> = t.labels().iter().map(i64::to_string).collect();
        write!(out, "{} labels=[{}]", t.shape().to_json(), labels.join(","))?;
        if marked {
            let marks: Vec<String> = t.marks().iter().map(usize::to_string).collect();
            write!(out, " marks=[{}]", marks.join(","))?;
        }
        writeln!(out)?;
    }
    for (leaves, count) in by_leaves {
        writeln!(out, "leaves={leaves} count={count}")?;
    }
    writeln!(out, "count={}", outputs.len())?;
    Ok(Status::Pass)
}
