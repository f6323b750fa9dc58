//! Bounded refutation of the skeleton axioms of `Branch(S)` for a candidate
//! skeleton `S ⊆ TA(S)`: every tree shape up to a node bound and graphs up to
//! a vertex bound, with label assignments enumerated when there are few and
//! sampled deterministically otherwise.
//!
//! Conventions for partial products: a sup drops undefined values, an inf is
//! undefined as soon as one argument is, and an undefined inf counts as `⊥`
//! when compared with a sup.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::TreeAlgebra;
use crate::automaton::{membership_game, ParityAutomaton, Recognizer};
use crate::branch::{random_branch_elem, show_branch, BranchAlgebra, BranchElem};
use crate::graphs::{enumerate_closed_graphs, random_graph, TreeGraph};
use crate::omega::{check_meet_continuity_sg, MeetBounds};
use crate::order::{DownSet, UpSet};
use crate::report::{run_law, LawResult, Outcome, Report, Side, Witness};
use crate::tree::{enumerate_shapes, Node, Ranked, RankedTree, SectionIter, Slot};
use crate::treesg::{c_product, random_cl_label, Generators, TaElem};

pub const BOUNDED: &str = "bounded refuter: every shape within the bounds, label assignments \
     enumerated up to the sample cap and sampled beyond it; PASS means no counterexample up to bounds";

pub const NO_COUNTEREXAMPLE: &str = "no counterexample up to bounds";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkeletonBounds {
    /// Node bound for trees.
    pub tree_size: usize,
    /// Vertex bound for graphs.
    pub graph_vertices: usize,
    /// Size of the sets labelling trees in `T P(S)` and friends.
    pub set_size: usize,
    /// Label assignments per shape (and graphs per vertex count).
    pub samples: usize,
    pub seed: u64,
    pub meet: MeetBounds,
}

impl Default for SkeletonBounds {
    fn default() -> Self {
        SkeletonBounds {
            tree_size: 4,
            graph_vertices: 3,
            set_size: 2,
            samples: 24,
            seed: 0,
            meet: MeetBounds::default(),
        }
    }
}

/// `"no counterexample up to bounds"` or a pointer at the first witness.
pub fn skeleton_verdict(rep: &Report) -> String {
    match rep.laws.iter().find(|l| !l.passed()) {
        None => NO_COUNTEREXAMPLE.to_string(),
        Some(l) => format!("counterexample to `{}`", l.law),
    }
}

struct Ctx<'a> {
    b: &'a BranchAlgebra,
    gens: &'a Generators,
    bounds: SkeletonBounds,
    shapes: Vec<RankedTree<Slot>>,
}

impl Ctx<'_> {
    fn rng(&self, law: u64, i: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.bounds.seed ^ (law << 32));
        r.set_stream(i as u64);
        r
    }

    /// `samples` labellings of every shape; `None` labels discard the attempt.
    fn sampled<L>(
        &self,
        law: u64,
        mut label: impl FnMut(&mut ChaCha8Rng, usize) -> Option<L>,
    ) -> Vec<RankedTree<L>> {
        let mut out = Vec::new();
        for (i, shape) in self.shapes.iter().enumerate() {
            let mut rng = self.rng(law, i);
            for _ in 0..self.bounds.samples {
                if let Some(t) = shape.map(|&Slot(k)| label(&mut rng, k)) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// All labellings from finite option lists when there are at most
    /// `samples` per shape, a deterministic sample otherwise.
    fn labellings<L: Clone>(&self, law: u64, options: impl Fn(usize) -> Vec<L>) -> Vec<RankedTree<L>> {
        let mut out = Vec::new();
        for (i, shape) in self.shapes.iter().enumerate() {
            let it = SectionIter::new(shape, |&Slot(k)| options(k));
            if it.count_hint() <= self.bounds.samples {
                out.extend(it);
                continue;
            }
            let mut rng = self.rng(law, i);
            for _ in 0..self.bounds.samples {
                if let Some(t) = shape.map(|&Slot(k)| options(k).choose(&mut rng).cloned()) {
                    out.push(t);
                }
            }
        }
        out
    }

    fn gens_at(&self, k: usize) -> Vec<TaElem> {
        self.gens.elements(self.b.ta(), k)
    }
}

fn show_sets(t: &RankedTree<Vec<TaElem>>) -> String {
    t.map_total(|xs| {
        let names: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
        format!("{{{}}}", names.join(","))
    })
    .to_string()
}

fn show_up(u: &Option<UpSet<TaElem>>) -> String {
    u.as_ref().map_or("undefined".into(), |u| u.to_string())
}

fn fail(input: String, sides: Vec<Side>) -> Outcome {
    Outcome::Fail(Witness { input, sides })
}

/// Runs every axiom check. `automaton`, when given, must be the automaton
/// whose semigroup `b` is built over; it adds an exhaustive comparison with
/// the parity game on closed graphs.
pub fn skeleton_check(
    b: &BranchAlgebra,
    gens: &Generators,
    automaton: Option<&ParityAutomaton>,
    bounds: SkeletonBounds,
) -> Report {
    let ta = b.ta();
    let max = b.max_arity();
    let arities: Vec<usize> = (0..=max).collect();
    let shapes = (0..=max).flat_map(|n| enumerate_shapes(&arities, bounds.tree_size, n)).collect();
    let cx = Ctx { b, gens, bounds, shapes };
    let mut rep = Report::new(
        format!(
            "skeleton axioms (trees ≤ {} nodes, graphs ≤ {} vertices, sets ≤ {})",
            bounds.tree_size, bounds.graph_vertices, bounds.set_size
        ),
        BOUNDED,
    );

    rep.push(join_generation(&cx));
    rep.push(subalgebra(&cx));
    let sg = check_meet_continuity_sg(&ta.wilke().restrict(&gens.s0, &gens.s1), bounds.meet);
    for l in sg.laws {
        rep.push(LawResult { law: format!("SG(S) meet-continuous: {}", l.law), ..l });
    }
    rep.push(closure(&cx));
    rep.push(trace_equation(&cx));
    rep.push(acyclic_formula(&cx));
    rep.push(regular_over_s(&cx));
    if let Some(a) = automaton {
        rep.push(regular_by_game(&cx, a));
    }
    rep.push(join_extension(&cx));
    rep.push(meet_extension(&cx));
    rep
}

/// `S` is closed under the products of `TA(S)`.
fn subalgebra(cx: &Ctx) -> LawResult {
    let ta = cx.b.ta();
    let trees = cx.labellings(1, |k| cx.gens_at(k));
    run_law("S is a subalgebra", trees.len(), |i| {
        let t = &trees[i];
        match ta.product(t) {
            Some(x) if !cx.gens.contains(x.value()) => {
                fail(t.to_string(), vec![Side::new("π(t)", t.to_string(), format!("{x} ∉ S"))])
            }
            _ => Outcome::Pass,
        }
    })
}

/// Every element met is a union of principal downsets of `cl(S)`: the
/// embedded elements of `TA(S)`, and products of random trees over the whole
/// algebra.
fn join_generation(cx: &Ctx) -> LawResult {
    let (b, ta) = (cx.b, cx.b.ta());
    let all = Generators::all(ta.wilke());
    let mut elems: Vec<(String, BranchElem)> = Vec::new();
    for n in 0..=b.max_arity() {
        for a in ta.elements(n) {
            elems.push((format!("η(ζ({a}))"), b.embed(&a)));
        }
    }
    let trees = cx.sampled(2, |r, k| random_branch_elem(b, &all, k, false, r));
    let total = elems.len() + trees.len();
    run_law("cl(S) join-generates", total, |i| {
        let (input, e) = if i < elems.len() {
            elems[i].clone()
        } else {
            let t = &trees[i - elems.len()];
            match b.try_product(t) {
                Ok(e) => (format!("π({t})"), e),
                Err(_) => return Outcome::Skip,
            }
        };
        match e.maximals().iter().find(|u| !cx.gens.in_closure(u)) {
            None => Outcome::Pass,
            Some(u) => fail(
                input.clone(),
                vec![Side::new(input, "", show_branch(&e)), Side::new("member outside cl(S)", "", u.to_string())],
            ),
        }
    })
}

/// Products of trees over `cl(S)` stay in `cl(S)`.
fn closure(cx: &Ctx) -> LawResult {
    let ta = cx.b.ta();
    let trees = cx.sampled(3, |r, k| random_cl_label(ta, cx.gens, k, cx.bounds.set_size, r));
    run_law("cl(S) is closed under products", trees.len(), |i| {
        let t = &trees[i];
        match c_product(ta, t) {
            Some(u) if !cx.gens.in_closure(&u) => {
                fail(t.to_string(), vec![Side::new("π(t)", t.to_string(), format!("{u} ∉ cl(S)"))])
            }
            _ => Outcome::Pass,
        }
    })
}

/// A non-empty subset of `xs` of size at most `k`.
fn subset<R: Rng>(r: &mut R, xs: &[TaElem], k: usize) -> Option<Vec<TaElem>> {
    if xs.is_empty() {
        return None;
    }
    let m = r.gen_range(1..=k.max(1).min(xs.len()));
    let mut v: Vec<TaElem> = xs.choose_multiple(r, m).cloned().collect();
    v.sort();
    Some(v)
}

/// `inf` of the trace products of each section of `u`, met together;
/// `None` when some trace product is undefined.
fn inf_over_sections(cx: &Ctx, u: &RankedTree<Vec<TaElem>>) -> Option<UpSet<TaElem>> {
    let ta = cx.b.ta();
    let n = u.declared_arity();
    let mut mins = Vec::new();
    for s in SectionIter::new(u, |xs: &Vec<TaElem>| xs.clone()) {
        let principal = s.map_total(|a| UpSet::principal(a.arity(), a.clone()));
        mins.extend(cx.b.section_product(&principal)?.minimals().iter().cloned());
    }
    Some(ta.up_of(n, mins))
}

/// `sup{inf Tr(s) : s ∈ TC, s ≤ T inf(U)} = inf{inf Tr(s) : s ∈^T U}` for
/// `U ∈ T P(S)`. The left side ranges over `T inf(U)` and trees with one
/// more generator met into some labels.
fn trace_equation(cx: &Ctx) -> LawResult {
    let (b, ta) = (cx.b, cx.b.ta());
    let trees = cx.sampled(4, |r, k| subset(r, &cx.gens_at(k), cx.bounds.set_size));
    run_law("trace equation over T P(S)", trees.len(), |i| {
        let u = &trees[i];
        let mut rng = cx.rng(40, i);
        let below = u.map_total(|xs| {
            let k = xs.first().map_or(0, |x| x.arity());
            let base = ta.up_of(k, xs.iter().cloned());
            let mut opts = vec![base];
            let pool = cx.gens_at(k);
            for g in pool.choose_multiple(&mut rng, 2) {
                opts.push(ta.up_of(k, xs.iter().cloned().chain([g.clone()])));
            }
            opts
        });
        let n = u.declared_arity();
        let lhs = b.down_of(n, SectionIter::new(&below, |o: &Vec<UpSet<TaElem>>| o.clone()).filter_map(|s| c_product(ta, &s)));
        let inf = inf_over_sections(cx, u);
        let rhs = inf.clone().map_or_else(|| DownSet::empty(n), |m| DownSet::principal(n, m));
        if lhs == rhs {
            Outcome::Pass
        } else {
            fail(
                show_sets(u),
                vec![
                    Side::new("sup inf Tr(s), s ≤ T inf(U)", "", show_branch(&lhs)),
                    Side::new("inf inf Tr(s), s ∈ U", "", show_up(&inf)),
                ],
            )
        }
    })
}

/// Random acyclic graphs with holes: the regular formula must agree with the
/// product of the unravelling.
fn acyclic_formula(cx: &Ctx) -> LawResult {
    let b = cx.b;
    let all = Generators::all(b.ta().wilke());
    let max = b.max_arity();
    let mut graphs = Vec::new();
    for v in 1..=cx.bounds.graph_vertices {
        let mut rng = cx.rng(5, v);
        for _ in 0..cx.bounds.samples * 4 {
            let n = rng.gen_range(0..=max);
            let mut nodes = Vec::new();
            let mut succ = Vec::new();
            let mut free: Vec<usize> = (0..n).collect();
            for x in 0..v {
                if x > 0 && !free.is_empty() && rng.gen_bool(0.3) {
                    nodes.push(Node::Hole(free.swap_remove(rng.gen_range(0..free.len()))));
                    succ.push(Vec::new());
                    continue;
                }
                // edges only go forward, so the graph is acyclic
                let k = if x + 1 == v { 0 } else { rng.gen_range(0..=max) };
                let Some(e) = random_branch_elem(b, &all, k, false, &mut rng) else { continue };
                nodes.push(Node::Label(e));
                succ.push((0..k).map(|_| rng.gen_range(x + 1..v)).collect());
            }
            if nodes.len() == v {
                if let Ok(g) = TreeGraph::new(n, 0, nodes, succ) {
                    graphs.push(g);
                }
            }
        }
    }
    run_law("regular formula on acyclic graphs", graphs.len(), |i| {
        let g = &graphs[i];
        let t = g.unravel_finite().expect("acyclic");
        let (Ok(l), Ok(r)) = (b.regular_sup(g), b.try_product(&t)) else {
            return Outcome::Skip;
        };
        if l == r {
            Outcome::Pass
        } else {
            fail(
                g.map(show_branch).to_string(),
                vec![
                    Side::new("sup over graph sections", "", show_branch(&l)),
                    Side::new("π(unravelling)", t.map_total(show_branch).to_string(), show_branch(&r)),
                ],
            )
        }
    })
}

/// Regular trees labelled by `η(ζ(a))` for `a ∈ S`: the formula must give the
/// embedded product of `TA(S)` (or `⊥` when that is undefined).
fn regular_over_s(cx: &Ctx) -> LawResult {
    let (b, ta) = (cx.b, cx.b.ta());
    let pool = crate::tree::LabelPool::new((0..=b.max_arity()).flat_map(|k| cx.gens_at(k)));
    let mut graphs = Vec::new();
    if !pool.is_empty() {
        for v in 1..=cx.bounds.graph_vertices {
            let mut rng = cx.rng(6, v);
            for _ in 0..cx.bounds.samples * 4 {
                let n = rng.gen_range(0..=b.max_arity());
                if let Ok(g) = random_graph(&pool, v, n, n, &mut rng) {
                    graphs.push(g);
                }
            }
        }
    }
    run_law("regular formula on S-labelled graphs", graphs.len(), |i| {
        let g = &graphs[i];
        let n = g.declared_arity();
        let Ok(l) = b.regular_sup(&g.map(|a| b.embed(a))) else {
            return Outcome::Skip;
        };
        let p = ta.product_regular(g);
        let r = p.as_ref().map_or_else(|| DownSet::empty(n), |x| b.embed(x));
        if l == r {
            Outcome::Pass
        } else {
            fail(
                g.to_string(),
                vec![
                    Side::new("sup over graph sections", "", show_branch(&l)),
                    Side::new("η(ζ(π(g)))", "", p.map_or("undefined".into(), |x| x.to_string())),
                ],
            )
        }
    })
}

/// Every closed graph over the automaton's alphabet up to the vertex bound:
/// the formula applied to `Tα(G)` recognises exactly what the game accepts.
fn regular_by_game(cx: &Ctx, a: &ParityAutomaton) -> LawResult {
    let rec = Recognizer::new(a.clone(), cx.b.max_arity()).with_budget(cx.b.budget());
    let pool = a.alphabet().pool();
    let graphs: Vec<_> = (1..=cx.bounds.graph_vertices).flat_map(|v| enumerate_closed_graphs(&pool, v)).collect();
    run_law("regular formula against the parity game", graphs.len(), |i| {
        let g = &graphs[i];
        let Ok(lifted) = g.try_map(|s| rec.alpha(&RankedTree::singleton(s.clone()))) else {
            return Outcome::Skip;
        };
        let (Ok(e), Ok(game)) = (rec.branch().regular_sup(&lifted), membership_game(a, g)) else {
            return Outcome::Skip;
        };
        match rec.recognizes(&e) {
            Ok(alg) if alg == game => Outcome::Pass,
            Ok(alg) => fail(
                g.to_string(),
                vec![
                    Side::new("sup over graph sections", "", format!("{} (recognised: {alg})", show_branch(&e))),
                    Side::new("parity game", "", game.to_string()),
                ],
            ),
            Err(_) => Outcome::Skip,
        }
    })
}

/// Two labellings by subsets of `cl(S)` with the same pointwise sup give the
/// same sup over sections: the second adds elements below the first.
fn join_extension(cx: &Ctx) -> LawResult {
    let (b, ta) = (cx.b, cx.b.ta());
    let k_max = cx.bounds.set_size;
    let trees = cx.sampled(7, |r, k| {
        let m = r.gen_range(1..=k_max.max(1));
        (0..m).map(|_| random_cl_label(ta, cx.gens, k, k_max, r)).collect::<Option<Vec<_>>>()
    });
    run_law("join-extension condition", trees.len(), |i| {
        let u = &trees[i];
        let mut rng = cx.rng(70, i);
        let u2 = u.map_total(|xs| {
            let mut ys = xs.clone();
            let k = xs[0].arity();
            let pool = cx.gens_at(k);
            if let (Some(x), Some(g)) = (xs.choose(&mut rng), pool.choose(&mut rng)) {
                ys.push(ta.up_of(k, x.minimals().iter().cloned().chain([g.clone()])));
            }
            ys
        });
        let n = u.declared_arity();
        let side = |t: &RankedTree<Vec<UpSet<TaElem>>>| {
            b.down_of(n, SectionIter::new(t, |o: &Vec<UpSet<TaElem>>| o.clone()).filter_map(|s| c_product(ta, &s)))
        };
        let (l, r) = (side(u), side(&u2));
        if l == r {
            Outcome::Pass
        } else {
            let show = |t: &RankedTree<Vec<UpSet<TaElem>>>| {
                t.map_total(|xs| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ∨ ")).to_string()
            };
            fail(
                format!("U = {}, U' = {}", show(u), show(&u2)),
                vec![Side::new("over U", "", show_branch(&l)), Side::new("over U'", "", show_branch(&r))],
            )
        }
    })
}

/// Two labellings by subsets of `S` with the same pointwise inf give the
/// same inf over sections: the second adds elements of `S` above the first.
fn meet_extension(cx: &Ctx) -> LawResult {
    let ta = cx.b.ta();
    let trees = cx.sampled(8, |r, k| subset(r, &cx.gens_at(k), cx.bounds.set_size));
    run_law("meet-extension condition", trees.len(), |i| {
        let u = &trees[i];
        let mut rng = cx.rng(80, i);
        let u2 = u.map_total(|xs| {
            let mut ys = xs.clone();
            if let Some(x) = xs.choose(&mut rng) {
                let up: Vec<TaElem> = ta.above(x).into_iter().filter(|y| cx.gens.contains(y.value())).collect();
                if let Some(y) = up.choose(&mut rng) {
                    ys.push(y.clone());
                }
            }
            ys.sort();
            ys.dedup();
            ys
        });
        let (l, r) = (inf_over_sections(cx, u), inf_over_sections(cx, &u2));
        if l == r {
            Outcome::Pass
        } else {
            fail(
                format!("U = {}, U' = {}", show_sets(u), show_sets(&u2)),
                vec![Side::new("over U", "", show_up(&l)), Side::new("over U'", "", show_up(&r))],
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::automaton_sg;
    use crate::omega::WilkeAlgebra;
    use crate::tree::{RankedAlphabet, Symbol};
    use crate::treesg::TaAlgebra;

    fn small_bounds() -> SkeletonBounds {
        SkeletonBounds { tree_size: 3, graph_vertices: 2, samples: 6, ..Default::default() }
    }

    #[test]
    fn trivial_algebra_passes() {
        let mut w = WilkeAlgebra::new(vec!["a".into()], vec!["1".into()], vec![], vec![]).unwrap();
        w.set_mix(0, 0, 0);
        w.set_bin(0, 0, 0);
        w.set_omega(0, 0);
        let b = BranchAlgebra::new(TaAlgebra::new(w.clone(), 2));
        let rep = skeleton_check(&b, &Generators::all(&w), None, small_bounds());
        assert!(rep.passed(), "{rep}");
        assert_eq!(skeleton_verdict(&rep), NO_COUNTEREXAMPLE);
    }

    #[test]
    fn dropping_a_generator_breaks_join_generation() {
        let al = RankedAlphabet::new(&[("a", 2), ("c", 0)], &[]).unwrap();
        let (a2, c) = (Symbol::new("a", 2), Symbol::new("c", 0));
        let a = ParityAutomaton::new(
            al,
            vec![("p".into(), 1), ("q".into(), 2)],
            0,
            vec![(0, a2.clone(), vec![0, 1]), (1, a2, vec![1, 1]), (1, c.clone(), vec![]), (0, c, vec![])],
        )
        .unwrap();
        let w = automaton_sg(&a).into_wilke();
        let b = BranchAlgebra::new(TaAlgebra::new(w.clone(), 2));
        let full = Generators::all(&w);
        let rep = skeleton_check(&b, &full, Some(&a), small_bounds());
        assert!(rep.passed(), "{rep}");
        let mut gens = full.clone();
        gens.s1.remove(&0);
        let rep = skeleton_check(&b, &gens, Some(&a), small_bounds());
        assert!(!rep.law("cl(S) join-generates").unwrap().passed(), "{rep}");
        assert!(skeleton_verdict(&rep).starts_with("counterexample"));
    }
}
