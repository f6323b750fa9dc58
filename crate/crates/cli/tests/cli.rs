use std::path::PathBuf;
use std::process::{Command, Output};

use treealg_core::formats::*;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_treealg"));
    for a in args {
        match a.strip_prefix('@') {
            Some(f) => cmd.arg(data(f)),
            None => cmd.arg(a),
        };
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_line(o: &Output) -> String {
    stdout(o).lines().last().unwrap_or_default().to_string()
}

#[test]
fn membership_both_methods_agree() {
    let o = run(&["membership", "--automaton", "@eventually_b.aut", "--tree", "@b_loop.graph", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("AGREE\n"));
    assert_eq!(last_line(&o), "RESULT: accept");
    let o = run(&["membership", "--automaton", "@eventually_b.aut", "--tree", "@a_spine.graph"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(last_line(&o), "RESULT: reject");
    for m in ["game", "algebraic"] {
        let o = run(&["membership", "--automaton", "@eventually_b.aut", "--tree", "@a_spine.graph", "--method", m]);
        assert_eq!(o.status.code(), Some(1), "{m}");
    }
}

#[test]
fn malformed_input_exits_64() {
    let o = run(&["membership", "--automaton", "@eventually_b.aut", "--tree", "@malformed.graph"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run(&["membership", "--automaton"]).status.code(), Some(64));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_exhaustion_exits_65_and_inconclusive_exits_2() {
    let conf = std::env::temp_dir().join("treealg-tiny-budget.conf");
    std::fs::write(&conf, "outer_section_budget = 1\n").unwrap();
    let args = ["alpha", "--automaton", "@eventually_b.aut", "--term", "a(a(c,c),b(c))", "--via-product"];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("product: "));
    let mut tight = args.to_vec();
    tight.extend(["--config", conf.to_str().unwrap()]);
    let o = run(&tight);
    assert_eq!(o.status.code(), Some(65));
    assert_eq!(last_line(&o), "RESULT: error");
    let small = std::env::temp_dir().join("treealg-tiny-annotations.conf");
    std::fs::write(&small, "annotation_budget = 1\n").unwrap();
    let args = ["membership", "--automaton", "@guess.aut", "--tree", "@a_full.graph", "--method", "algebraic"];
    let mut tight = args.to_vec();
    tight.extend(["--config", small.to_str().unwrap()]);
    let o = run(&tight);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(last_line(&o), "RESULT: inconclusive");
    assert_eq!(run(&args).status.code(), Some(0));
    let o = run(&["skeleton", "--automaton", "@eventually_b.aut", "--config", conf.to_str().unwrap(), "--samples", "2"]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)), "skeleton skips budget failures");
}

#[test]
fn alpha_and_traces() {
    let o = run(&["alpha", "--automaton", "@eventually_b.aut", "--term", "a(c,b(c))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "alpha: { {p}, {q} }\nRESULT: accept\n");
    let o = run(&["traces", "--wilke", "@visits.wilke", "--graph", "@traces.graph"]);
    assert_eq!(stdout(&o), "traces: {acc, e(x0)}\nundefined: no\nRESULT: {acc, e(x0)}\n");
}

#[test]
fn wilke_tools() {
    let o = run(&["wilke", "expand", "--wilke", "@visits.wilke", "--word", "1 1 ; 1"]);
    assert_eq!(last_line(&o), "RESULT: rej");
    let o = run(&["wilke", "check", "--wilke", "@visits.wilke"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn laws_are_reproducible_for_a_fixed_seed() {
    let args = ["laws", "check", "--wilke", "@visits.wilke", "--config", "@small.conf"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(last_line(&a), "RESULT: PASS");
    let o = run(&["laws", "check", "--algebra", "@mod2.table", "--linear", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn skeleton_verdicts() {
    let o = run(&["skeleton", "--automaton", "@eventually_b.aut", "--samples", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "RESULT: no counterexample up to bounds");
    let o = run(&["skeleton", "--automaton", "@eventually_b.aut", "--samples", "6", "--drop", "<p,1,p>"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(last_line(&o), "RESULT: counterexample to `cl(S) join-generates`");
    let o = run(&["skeleton", "--wilke", "@visits.wilke", "--samples", "6"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn fixtures_are_in_canonical_form() {
    let read = |f: &str| std::fs::read_to_string(data(f)).unwrap();
    let a = parse_automaton(&read("eventually_b.aut")).unwrap();
    assert_eq!(print_automaton(&a), read("eventually_b.aut"));
    for g in ["b_loop.graph", "a_spine.graph"] {
        assert_eq!(print_graph(&parse_graph(&read(g), a.alphabet()).unwrap()), read(g));
    }
    let w = parse_wilke(&read("visits.wilke")).unwrap();
    assert_eq!(print_wilke(&w), read("visits.wilke"));
    let ta = treealg_core::treesg::TaAlgebra::new(w, 2);
    let g = parse_graph_with(&read("traces.graph"), |t, k| parse_cl_label(&ta, t, k)).unwrap();
    assert_eq!(print_graph_with(&g, |u| print_cl_label(&ta, u)), read("traces.graph"));
    assert_eq!(print_table_algebra(&parse_table_algebra(&read("mod2.table")).unwrap()), read("mod2.table"));
    let c = parse_config(&read("small.conf"), WorkspaceConfig::default()).unwrap();
    assert_eq!(print_config(&c), read("small.conf"));
}
