use std::process::{Command, Output};

use avl_tamari::grammar::{builtin_equation, builtin_grammar, Family};
use avl_tamari::patterns::maximal_balanced_trees;
use avl_tamari::tamari::build_poset;
use avl_tamari::{all_balanced_trees, all_trees, Tree};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avl-tamari")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn last_line(text: &str) -> &str {
    text.lines().last().unwrap()
}

#[test]
fn series_prints_counts_by_leaves() {
    let text = stdout(&["series", "--which", "maximal", "--degree", "10"]);
    let counts: Vec<u64> = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let (leaves, count) = l.split_once(' ').unwrap();
            assert_eq!(leaves, format!("leaves={}", i + 1));
            count.strip_prefix("count=").unwrap().parse().unwrap()
        })
        .collect();
    assert_eq!(counts, vec![1, 1, 1, 1, 2, 2, 2, 4, 6, 9]);
    let csv = stdout(&["series", "--which", "intervals", "--degree", "5", "--csv"]);
    assert_eq!(csv, "leaves,count\n1,1\n2,1\n3,3\n4,1\n5,7\n");
    for family in Family::ALL {
        let text = stdout(&["series", "--which", family.name(), "--degree", "12"]);
        assert_eq!(text, builtin_equation(family).iterate_fixed_point(12).unwrap().to_lines());
    }
}

#[test]
fn custom_series() {
    let text = stdout(&["series", "--sigma", "x^2 + 2*x*y", "--sigma", "x", "--degree", "8"]);
    assert_eq!(text, stdout(&["series", "--which", "balanced", "--degree", "8"]));
    assert_eq!(run(&["series", "--sigma", "x + 1", "--degree", "3"]).status.code(), Some(2));
    assert_eq!(run(&["series", "--degree", "3"]).status.code(), Some(2));
    assert_eq!(run(&["series", "--which", "balanced", "--degree", "0"]).status.code(), Some(2));
    assert_eq!(run(&["series", "--which", "avl", "--degree", "3"]).status.code(), Some(2));
}

#[test]
fn enumeration_matches_library() {
    let text = stdout(&["enum", "--nodes", "5", "--balanced"]);
    assert_eq!(last_line(&text), "count=6");
    let listed: Vec<Tree> = text.lines().filter(|l| !l.starts_with("count=")).map(|l| Tree::from_json(l).unwrap()).collect();
    assert_eq!(listed, all_balanced_trees(5));
    let all = stdout(&["enum", "--nodes", "6"]);
    assert_eq!(last_line(&all), "count=132");
    let listed: Vec<Tree> = all.lines().filter(|l| !l.starts_with("count=")).map(|l| Tree::from_json(l).unwrap()).collect();
    assert_eq!(listed, all_trees(6));
    let maximal = stdout(&["enum", "--nodes", "11", "--maximal"]);
    assert_eq!(last_line(&maximal), format!("count={}", maximal_balanced_trees(11).len()));
    assert_eq!(last_line(&stdout(&["enum", "--nodes", "7", "--minimal"])), "count=4");
    assert_eq!(run(&["enum", "--nodes", "4", "--balanced", "--maximal"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [&["enum", "--nodes", "7", "--balanced"][..], &["generate", "--grammar", "intervals", "--steps", "4", "--max-leaves", "8"]] {
        assert_eq!(stdout(args), stdout(args));
    }
}

#[test]
fn verification_sweeps() {
    let text = stdout(&["verify-closure", "--max-nodes", "9"]);
    assert_eq!(text.lines().count(), 11);
    assert_eq!(last_line(&text), "PASS");
    assert!(text.lines().nth(7).unwrap().starts_with("n=7 balanced=17 pairs=52 "));
    let text = stdout(&["hypercube-sweep", "--max-nodes", "8"]);
    assert_eq!(last_line(&text), "PASS");
    assert!(text.contains("n=8 balanced=32 pairs=119 max_k=4 PASS"));
    assert_eq!(run(&["verify-closure", "--max-nodes", "15"]).status.code(), Some(2));
}

#[test]
fn lattice_and_posets_write_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("t4.dot");
    let text = stdout(&["lattice", "--nodes", "4", "--dot", dot.to_str().unwrap()]);
    let p = build_poset(4).unwrap();
    assert_eq!(text, format!("elements={} covers={}\n", p.len(), p.covers().len()));
    assert_eq!(std::fs::read_to_string(&dot).unwrap(), p.to_dot("T4", avl_tamari::tamari::DotLabels::Json));

    let indexed = dir.path().join("t3.dot");
    stdout(&["lattice", "--nodes", "3", "--dot", indexed.to_str().unwrap(), "--index-labels"]);
    let table = std::fs::read_to_string(dir.path().join("t3.dot.index.tsv")).unwrap();
    assert_eq!(table.lines().count(), 5);

    let refused = run(&["lattice", "--nodes", "14", "--dot", dot.to_str().unwrap()]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--force"));

    let b = dir.path().join("b7.dot");
    let text = stdout(&["balanced-poset", "--nodes", "7", "--dot", b.to_str().unwrap()]);
    assert_eq!(text, "elements=17 covers=24 components=2\n");
    assert!(std::fs::read_to_string(&b).unwrap().starts_with("digraph \"B7\""));
}

#[test]
fn interval_verdicts() {
    let lower = Tree::left_comb(2).to_json();
    let upper = Tree::right_comb(2).to_json();
    let text = stdout(&["interval", "--lower", &lower, "--upper", &upper]);
    assert_eq!(text, format!("{lower}\n{upper}\nelements=2\nk=1 hypercube=PASS\n"));

    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("iv.dot");
    let (l3, r3) = (Tree::left_comb(3).to_json(), Tree::right_comb(3).to_json());
    let text = stdout(&["interval", "--lower", &l3, "--upper", &r3, "--dot", dot.to_str().unwrap()]);
    assert!(text.contains("elements=5\n"));
    assert!(text.ends_with("hypercube=SKIP reason=endpoints are not both balanced\n"));
    assert_eq!(std::fs::read_to_string(&dot).unwrap().matches(" -> ").count(), 5);

    assert_eq!(run(&["interval", "--lower", &r3, "--upper", &l3]).status.code(), Some(2));
    assert_eq!(run(&["interval", "--lower", "{", "--upper", &l3]).status.code(), Some(2));
}

#[test]
fn generate_matches_series() {
    for family in Family::ALL {
        let text = stdout(&["generate", "--grammar", family.name(), "--steps", "5", "--max-leaves", "8"]);
        let series = builtin_equation(family).iterate_fixed_point(8).unwrap();
        for (leaves, c) in series.coefficients.iter().enumerate() {
            let line = format!("leaves={} count={c}", leaves + 1);
            assert!(c == &0.into() || text.lines().any(|l| l == line), "{family}: {line}");
        }
        let total = builtin_grammar(family).generate(5, Some(8)).len();
        assert_eq!(last_line(&text), format!("count={total}"));
    }
    assert_eq!(run(&["generate", "--grammar", "balanced", "--steps", "9"]).status.code(), Some(2));
}

#[test]
fn pattern_queries() {
    let comb = Tree::right_comb(3).to_json();
    let text = stdout(&["patterns", "--tree", &comb, "--avoid", "(2)"]);
    assert_eq!(text, "(2) occurs=true\navoids=false\n");
    let perfect = Tree::perfect(3).to_json();
    assert!(stdout(&["patterns", "--tree", &perfect, "--avoid", "perfect"]).ends_with("avoids=true\n"));
    assert!(stdout(&["patterns", "--tree", &perfect, "--avoid", "empty"]).ends_with("avoids=true\n"));
    let text = stdout(&["patterns", "--tree", &perfect, "--avoid", "pmax"]);
    assert_eq!(text, "(-1 L:(-1)) occurs=false\n(-1 L:(0)) occurs=false\navoids=true\n");
    assert_eq!(run(&["patterns", "--tree", &comb, "--avoid", "(1"]).status.code(), Some(2));
}

#[test]
fn help_documents_pattern_syntax() {
    let help = stdout(&["patterns", "--help"]);
    assert!(help.contains("pattern := \"(\" label"));
}
