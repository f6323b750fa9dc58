//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treealg_core::algebra::*;
use treealg_core::automaton::*;
use treealg_core::branch::show_branch;
use treealg_core::graphs::{random_graph, unravel_tree};
use treealg_core::omega::{
    check_meet_continuity_sg, limit_set, LabelledGraph, MeetBounds, PathEnd, PathValue, PathWitness, UpWord,
    WilkeAlgebra,
};
use treealg_core::report::SamplerConfig;
use treealg_core::skeleton::{skeleton_check, skeleton_verdict, SkeletonBounds, NO_COUNTEREXAMPLE};
use treealg_core::tree::{
    enumerate_closed_by_depth, enumerate_trees, random_tree_by, random_tree_in, HoleMode, LabelPool, RankedAlphabet,
    RankedTree, Term,
};
use treealg_core::treesg::{Generators, TaAlgebra};

type Check = Result<String, String>;

fn al() -> RankedAlphabet {
    RankedAlphabet::new(&[("a", 2), ("b", 1), ("c", 0)], &[]).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn monad_laws() -> Check {
    let cfg = SamplerConfig::default().with_samples(1200).with_size(8);
    assert_eq!(cfg.nesting, 2);
    let occ = occurrence_algebra(3);
    let pool = LabelPool::new((0..=3).flat_map(|n| occ.carrier(n).unwrap()));
    let rep = check_monad_laws(&occ, &pool, &cfg);
    ensure(rep.passed(), || format!("{rep}"))?;
    let n = rep.law("associativity").unwrap().checked;
    ensure(n >= 1000, || format!("only {n} associativity instances"))?;

    let free_al = RankedAlphabet::new(&[("f", 3), ("g", 2), ("h", 1), ("b", 0), ("c", 0)], &[("b", "c")]).unwrap();
    let free = free_algebra(free_al.clone(), 1000, 3);
    let pool = LabelPool::new((0..=3).flat_map(|k| enumerate_trees(&free_al.pool(), 2, k)));
    let rep = check_monad_laws(&free, &pool, &cfg);
    ensure(rep.passed(), || format!("{rep}"))?;
    let m = rep.law("associativity").unwrap().checked;
    ensure(m >= 1000, || format!("only {m} free associativity instances"))?;
    Ok(format!("{n} + {m} trees"))
}

fn dist_laws() -> Check {
    let rep = check_dist_law(6, &SamplerConfig::default().with_samples(500));
    ensure(rep.passed(), || format!("{rep}"))?;
    let least = rep.laws.iter().map(|l| l.checked).min().unwrap_or(0);
    ensure(least >= 500, || format!("a law checked only {least} instances"))?;
    Ok(format!("{} laws, ≥{least} instances each", rep.laws.len()))
}

fn naive_witness() -> Check {
    let naive = naive_occurrence_algebra(3);
    let bit = Bit::new;
    // root labelled 0_2(x1,x2) ∈ T_3; its first argument is discarded
    let a = RankedTree::from_term(3, &Term::App(bit(false, 2), vec![Term::Hole(1), Term::Hole(2)])).unwrap();
    let leaf = |one| Term::leaf(RankedTree::singleton(bit(one, 0)));
    let tt = RankedTree::from_term(0, &Term::App(a.clone(), vec![leaf(true), leaf(false), leaf(false)])).unwrap();
    ensure(naive.product(&a) == Some(bit(false, 3)), || "π(0_2(x1,x2)) ≠ 0_3".into())?;
    let res = check_associativity_on(&naive, &[tt]);
    let w = res.witness.as_ref().ok_or("no witness")?;
    let got: Vec<(&str, &str)> = w.sides.iter().map(|s| (s.tree.as_str(), s.value.as_str())).collect();
    let want = [("0_2(0_0,0_0)", "0_0"), ("0_3(1_0,0_0,0_0)", "1_0")];
    ensure(got == want, || format!("witness {got:?}"))?;
    let pool = LabelPool::new((0..=3).flat_map(|n| naive.carrier(n).unwrap()));
    let sampled = check_monad_laws(&naive, &pool, &SamplerConfig::default());
    ensure(!sampled.passed(), || "sampled check missed the failure".into())?;
    Ok("π(0_3(1_0,0_0,0_0)) = 1_0, π(0_2(0_0,0_0)) = 0_0".into())
}

fn sa_spot_checks() -> Check {
    let st = (0..6).map(|k| (format!("s{k}"), k)).collect();
    let a = ParityAutomaton::new(al(), st, 0, vec![]).unwrap();
    let sg = automaton_sg(&a);
    let w = sg.wilke();
    let (p, q, r) = (0, 1, 2);
    ensure(w.bin(sg.triple(p, 3, q), sg.triple(q, 0, r)) == Some(sg.triple(p, 0, r)), || "<p,3,q><q,0,r>".into())?;
    ensure(w.bin(sg.triple(p, 3, q), sg.triple(r, 0, r)).is_none(), || "mismatch defined".into())?;
    ensure(w.omega(sg.triple(p, 1, p)).is_none(), || "ω<p,1,p> defined".into())?;
    ensure(w.omega(sg.triple(p, 2, p)) == Some(p), || "ω<p,2,p> ≠ p".into())?;
    let chain = [1, 3, 5, 4, 2, 0];
    for (i, &k) in chain.iter().enumerate() {
        for (j, &l) in chain.iter().enumerate() {
            let le = w.leq1(sg.triple(p, k, q), sg.triple(p, l, q));
            ensure(le == (i <= j), || format!("order of {k} and {l}"))?;
        }
    }
    Ok("1⊏3⊏5⊏4⊏2⊏0".into())
}

fn left_zero() -> WilkeAlgebra {
    let mut w = WilkeAlgebra::new(vec!["z".into()], vec!["a".into(), "b".into()], vec![], vec![]).unwrap();
    for x in 0..2 {
        for y in 0..2 {
            w.set_bin(x, y, x);
        }
        w.set_mix(x, 0, 0);
        w.set_omega(x, 0);
    }
    w
}

fn meet_continuity() -> Check {
    let mut r = rng(5);
    for i in 0..24 {
        let a = random_automaton(&al(), 1 + i % 3, &[0, 1, 2], &mut r);
        let rep = check_sga_meet_continuity(&a, MeetBounds::default());
        ensure(rep.passed(), || format!("{a}\n{rep}"))?;
    }
    let rep = check_meet_continuity_sg(&left_zero(), MeetBounds::default());
    let w = rep.laws.iter().find_map(|l| l.witness.as_ref()).ok_or("left-zero semigroup passed")?;
    Ok(format!("24 automata; left-zero witness {}", w.input))
}

fn recognition() -> Check {
    let terms = enumerate_closed_by_depth(&al().pool(), 3);
    ensure(terms.len() == 183, || format!("{} terms", terms.len()))?;
    let mut r = rng(6);
    for i in 0..12 {
        let a = random_automaton(&al(), 1 + i % 2, &[0, 1, 2], &mut r);
        let rec = Recognizer::new(a.clone(), 2);
        for t in &terms {
            let e = rec.alpha(t).map_err(|e| e.to_string())?;
            let got = rec.recognizes(&e).map_err(|e| e.to_string())?;
            let want = accepts_finite(&a, t).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("{t}\n{a}"))?;
        }
    }
    Ok("183 terms × 12 automata".into())
}

fn alpha_morphism() -> Check {
    let mut r = rng(7);
    let pool = al().pool();
    let mut n = 0;
    for i in 0..220 {
        let a = random_automaton(&al(), 1 + i % 2, &[1, 2], &mut r);
        let rec = Recognizer::new(a, 2);
        let k = r.gen_range(0..=1);
        let tt = random_tree_by(&[0, 1, 2], 3, k, HoleMode::Affine, &mut r, |r, k| {
            random_tree_in(&pool, 4, k, HoleMode::Affine, r).ok()
        })
        .map_err(|e| e.to_string())?;
        let lhs = rec.alpha(&tt.flatten()).map_err(|e| e.to_string())?;
        let labelled = tt.map(|s| rec.alpha(s).ok()).ok_or("α undefined on a label")?;
        let rhs = rec.branch().try_product(&labelled).map_err(|e| e.to_string())?;
        ensure(show_branch(&lhs) == show_branch(&rhs), || format!("{}", tt.flatten()))?;
        n += 1;
    }
    Ok(format!("{n} two-level terms"))
}

fn membership() -> Check {
    let mut r = rng(8);
    let pool = al().pool();
    let (mut accepted, mut inconclusive) = (0, 0);
    for i in 0..240 {
        let prios: &[usize] = if i % 2 == 0 { &[0, 1, 2] } else { &[1, 2, 3] };
        let a = random_automaton(&al(), 1 + i % 3, prios, &mut r);
        let sg = automaton_sg(&a);
        let g = random_graph(&pool, 1 + i % 4, 0, 0, &mut r).map_err(|e| e.to_string())?;
        let game = membership_game(&a, &g).map_err(|e| e.to_string())?;
        match membership_algebraic(&a, &sg, &g, DEFAULT_ANNOTATION_BUDGET).map_err(|e| e.to_string())? {
            Verdict::Inconclusive => inconclusive += 1,
            v => ensure((v == Verdict::Accept) == game, || format!("{g}\n{a}"))?,
        }
        accepted += usize::from(game);
    }
    ensure(inconclusive == 0, || format!("{inconclusive} inconclusive"))?;
    Ok(format!("240 pairs, {accepted} accepted, 0 inconclusive"))
}

fn random_word(r: &mut ChaCha8Rng, n1: usize, min: usize, max: usize) -> Vec<usize> {
    let len = r.gen_range(min..=max);
    (0..len).map(|_| r.gen_range(0..n1)).collect()
}

fn up_product_invariance() -> Check {
    let mut r = rng(9);
    let mut n = 0;
    while n < 600 {
        let a = random_automaton(&al(), 1 + n % 3, &[0, 1, 2, 3], &mut r);
        let sg = automaton_sg(&a);
        let w = sg.wilke();
        for _ in 0..20 {
            let u = random_word(&mut r, w.n1(), 0, 3);
            let v = random_word(&mut r, w.n1(), 1, 3);
            let base = w.up_product(&UpWord::lasso(u.clone(), v.clone()));
            let uv = [u.clone(), v.clone()].concat();
            let vv = [v.clone(), v.clone()].concat();
            let mut u1 = u.clone();
            u1.push(v[0]);
            let rot = [v[1..].to_vec(), vec![v[0]]].concat();
            let variants = [
                ("(uv;v)", UpWord::lasso(uv, v.clone())),
                ("(u;vv)", UpWord::lasso(u.clone(), vv)),
                ("rotation", UpWord::lasso(u1, rot)),
            ];
            for (name, word) in variants {
                let got = w.up_product(&word);
                ensure(got == base, || format!("{name}: {} vs {}", w.show_word(&word), w.show_word(&UpWord::lasso(u.clone(), v.clone()))))?;
            }
            n += 1;
        }
    }
    Ok(format!("{n} words × 3 rewrites"))
}

fn random_labelled_graph(r: &mut ChaCha8Rng, w: &WilkeAlgebra) -> LabelledGraph {
    let n = r.gen_range(1..=5);
    let mut g = LabelledGraph { vertices: n, root: 0, ..Default::default() };
    for v in 0..n {
        for _ in 0..r.gen_range(0..=2) {
            g.edges.push((v, r.gen_range(0..n), r.gen_range(0..w.n1())));
        }
        if r.gen_bool(0.3) {
            g.stops.push((v, r.gen_range(0..w.n0())));
        }
        if r.gen_bool(0.2) {
            g.exits.push((v, r.gen_range(0..2)));
        }
    }
    g
}

/// A random maximal path: walk until a stop, an exit or a repeated vertex.
fn random_path(r: &mut ChaCha8Rng, g: &LabelledGraph) -> Option<PathWitness> {
    let mut at = g.root;
    let mut edges = Vec::new();
    let mut first_visit = vec![None; g.vertices];
    for _ in 0..4 * g.vertices + 4 {
        if let Some(start) = first_visit[at] {
            let lp = edges.split_off(start);
            return Some(PathWitness { prefix: edges, end: PathEnd::Loop(lp) });
        }
        first_visit[at] = Some(edges.len());
        let outs: Vec<usize> = (0..g.edges.len()).filter(|&e| g.edges[e].0 == at).collect();
        let stops: Vec<usize> = (0..g.stops.len()).filter(|&i| g.stops[i].0 == at).collect();
        // the empty path to an exit has no S1 value
        let exits: Vec<usize> =
            (0..g.exits.len()).filter(|&i| g.exits[i].0 == at && !edges.is_empty()).collect();
        let total = outs.len() + stops.len() + exits.len();
        if total == 0 {
            return None;
        }
        let k = r.gen_range(0..total);
        if k < stops.len() {
            return Some(PathWitness { prefix: edges, end: PathEnd::Stop(stops[k]) });
        }
        if k < stops.len() + exits.len() {
            return Some(PathWitness { prefix: edges, end: PathEnd::Exit(exits[k - stops.len()]) });
        }
        let e = outs[k - stops.len() - exits.len()];
        edges.push(e);
        at = g.edges[e].1;
    }
    None
}

fn limit_sets() -> Check {
    let mut r = rng(10);
    let (mut graphs, mut paths) = (0, 0);
    while graphs < 60 || paths < 240 {
        let a = random_automaton(&al(), 1 + graphs % 3, &[0, 1, 2], &mut r);
        let sg = automaton_sg(&a);
        let w = sg.wilke();
        let g = random_labelled_graph(&mut r, w);
        let ls = limit_set(w, &g);
        // soundness: every witness is a path denoting its value
        for (v, p) in &ls.values {
            let got = g.evaluate(w, p).map_err(|e| e.to_string())?;
            ensure(got == Some(PathValue::Closed(*v)), || format!("{g:?}: value {v} via {p:?}"))?;
        }
        for (&(s, k), p) in &ls.open {
            let got = g.evaluate(w, p).map_err(|e| e.to_string())?;
            ensure(got == Some(PathValue::Open(s, k)), || format!("{g:?}: open ({s},{k}) via {p:?}"))?;
        }
        if let Some(p) = &ls.undefined {
            let got = g.evaluate(w, p).map_err(|e| e.to_string())?;
            ensure(got.is_none(), || format!("{g:?}: undefined witness {p:?} has a value"))?;
        }
        // completeness: sampled maximal paths land in the limit set
        for _ in 0..8 {
            let Some(p) = random_path(&mut r, &g) else { continue };
            let ok = match g.evaluate(w, &p).map_err(|e| e.to_string())? {
                None => ls.is_undefined(),
                Some(PathValue::Closed(v)) => ls.values.contains_key(&v),
                Some(PathValue::Open(s, k)) => ls.open.contains_key(&(s, k)),
            };
            ensure(ok, || format!("{g:?}: path {p:?} missing from the limit set"))?;
            paths += 1;
        }
        graphs += 1;
    }
    Ok(format!("{graphs} graphs, {paths} paths"))
}

fn unravelling() -> Check {
    let mut r = rng(11);
    let mut n = 0;
    for i in 0..360 {
        let a = random_automaton(&al(), 1 + i % 2, &[1, 2], &mut r);
        let ta = TaAlgebra::new(automaton_sg(&a).into_wilke(), 2);
        let pool = LabelPool::new((0..=2).flat_map(|k| ta.elements(k)));
        let k = r.gen_range(0..=2);
        let Ok(t) = random_tree_in(&pool, 6, k, HoleMode::Affine, &mut r) else { continue };
        let u = unravel_tree(&t).map_err(|e| e.to_string())?;
        let uu = unravel_tree(&u).map_err(|e| e.to_string())?;
        ensure(uu == u, || format!("un(un(t)) ≠ un(t) for {t}"))?;
        ensure(ta.product(&u) == ta.product(&t), || format!("π(un(t)) ≠ π(t) for {t}"))?;
        n += 1;
    }
    ensure(n >= 300, || format!("only {n} trees"))?;
    Ok(format!("{n} trees"))
}

fn skeleton() -> Check {
    let a = random_automaton(&al(), 2, &[1, 2], &mut rng(12));
    let rec = Recognizer::new(a.clone(), 2);
    let gens = Generators::all(rec.ta().wilke());
    let bounds = SkeletonBounds { tree_size: 4, graph_vertices: 3, ..SkeletonBounds::default() };
    let rep = skeleton_check(rec.branch(), &gens, Some(&a), bounds);
    let v = skeleton_verdict(&rep);
    ensure(v == NO_COUNTEREXAMPLE, || format!("{v}\n{rep}"))?;
    Ok(v)
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("monad laws", monad_laws),
        ("distributive laws", dist_laws),
        ("naive algebra witness", naive_witness),
        ("S_A tables", sa_spot_checks),
        ("SG meet-continuity", meet_continuity),
        ("recognition of finite terms", recognition),
        ("α is a morphism", alpha_morphism),
        ("game = algebraic membership", membership),
        ("up_product invariance", up_product_invariance),
        ("limit sets", limit_sets),
        ("unravelling", unravelling),
        ("skeleton of Branch(S_A)", skeleton),
    ];
    let mut failed = BTreeSet::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                println!("criterion {}: FAIL {name}: {msg} ({secs:.1}s)", i + 1);
                failed.insert(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
