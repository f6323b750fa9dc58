//! Sampled refuters for the equational laws of tree algebras.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::order::{DownSet, Order, PosetSlice};
use crate::report::{run_law, show, Outcome, Report, SamplerConfig, Side, Witness, EXHAUSTIVE, SAMPLED};
use crate::tree::{random_tree_by, random_tree_in, Address, LabelPool, Node, Ranked, RankedTree, SectionIter};

use super::{AlgebraMorphism, TreeAlgebra};

/// Prints a tree of trees with every inner tree in brackets.
pub fn show_tt<E: fmt::Display>(t: &RankedTree<RankedTree<E>>) -> String {
    fn go<E: fmt::Display>(t: &RankedTree<RankedTree<E>>, a: &Address, out: &mut String) {
        match t.get(a).expect("address of the tree") {
            Node::Hole(i) => out.push_str(&format!("x{i}")),
            Node::Label(l) => {
                out.push_str(&format!("[{l}]"));
                let k = t.child_count(a);
                if k > 0 {
                    out.push('(');
                    for i in 0..k {
                        if i > 0 {
                            out.push(',');
                        }
                        go(t, &a.child(i), out);
                    }
                    out.push(')');
                }
            }
        }
    }
    let mut s = String::new();
    go(t, &Address::root(), &mut s);
    s
}

fn arities<E>(pool: &LabelPool<E>, max: usize) -> Vec<usize>
where
    E: Ranked + Clone,
{
    (0..=max.min(pool.max_arity())).filter(|&k| !pool.of_arity(k).is_empty()).collect()
}

fn pick<E: Clone, R: Rng>(rng: &mut R, xs: &[E]) -> Option<E> {
    xs.choose(rng).cloned()
}

fn random_tree_over<E: Ranked + Clone>(
    pool: &LabelPool<E>,
    cfg: &SamplerConfig,
    max_arity: usize,
    rng: &mut ChaCha8Rng,
) -> Option<RankedTree<E>> {
    let n = rng.gen_range(0..=max_arity);
    random_tree_in(pool, cfg.size, n, cfg.holes, rng).ok()
}

/// A tree of trees: an outer shape whose node of arity `k` carries a random
/// inner tree in `T_k`.
fn random_tt<E: Ranked + Clone>(
    pool: &LabelPool<E>,
    cfg: &SamplerConfig,
    max_arity: usize,
    rng: &mut ChaCha8Rng,
) -> Option<RankedTree<RankedTree<E>>> {
    let n = rng.gen_range(0..=max_arity);
    let ks: Vec<usize> = (0..=max_arity).collect();
    random_tree_by(&ks, cfg.size, n, cfg.holes, rng, |rng, k| {
        random_tree_in(pool, cfg.size, k, cfg.holes, rng).ok()
    })
    .ok()
}

fn assoc_outcome<A: TreeAlgebra>(alg: &A, tt: &RankedTree<RankedTree<A::Elem>>) -> Outcome {
    let flat = tt.flatten();
    let lhs = alg.product(&flat);
    let inner = tt.map(|s| alg.product(s));
    let rhs = inner.as_ref().and_then(|t| alg.product(t));
    if lhs == rhs {
        return Outcome::Pass;
    }
    Outcome::Fail(Witness {
        input: show_tt(tt),
        sides: vec![
            Side::new("π(flat(T))", flat.to_string(), show(&lhs)),
            Side::new("π(Tπ(T))", show(&inner), show(&rhs)),
        ],
    })
}

/// Associativity `π ∘ flat = π ∘ Tπ` on the given trees, in order.
pub fn check_associativity_on<A: TreeAlgebra>(
    alg: &A,
    instances: &[RankedTree<RankedTree<A::Elem>>],
) -> crate::report::LawResult {
    run_law("associativity", instances.len(), |i| assoc_outcome(alg, &instances[i]))
}

/// Unit law on every pool element, associativity and monotonicity on samples.
/// "Both undefined" counts as agreement.
pub fn check_monad_laws<A: TreeAlgebra>(
    alg: &A,
    pool: &LabelPool<A::Elem>,
    cfg: &SamplerConfig,
) -> Report {
    let mut rep = Report::new(format!("monad laws of {}", alg.name()), SAMPLED);
    let elems: Vec<&A::Elem> = pool.all().collect();
    rep.push(run_law("unit", elems.len(), |i| {
        let a = elems[i];
        let v = alg.product(&RankedTree::singleton(a.clone()));
        if v.as_ref() == Some(a) {
            Outcome::Pass
        } else {
            Outcome::Fail(Witness {
                input: a.to_string(),
                sides: vec![
                    Side::new("π(sing(a))", RankedTree::singleton(a.clone()).to_string(), show(&v)),
                    Side::new("a", "", a.to_string()),
                ],
            })
        }
    }));
    let m = alg.max_arity();
    rep.push(run_law("associativity", cfg.samples, |i| {
        let mut rng = cfg.rng(i);
        match random_tt(pool, cfg, m, &mut rng) {
            Some(tt) => assoc_outcome(alg, &tt),
            None => Outcome::Skip,
        }
    }));
    rep.push(run_law("monotone", cfg.samples, |i| {
        let mut rng = cfg.rng(i);
        let Some(t) = random_tree_over(pool, cfg, m, &mut rng) else {
            return Outcome::Skip;
        };
        let s = t.map_total(|l| {
            let below: Vec<A::Elem> =
                pool.of_arity(l.arity()).iter().filter(|x| alg.leq(x, l)).cloned().collect();
            pick(&mut rng, &below).unwrap_or_else(|| l.clone())
        });
        match (alg.product(&s), alg.product(&t)) {
            (Some(a), Some(b)) if !alg.leq(&a, &b) => Outcome::Fail(Witness {
                input: format!("{s} <= {t}"),
                sides: vec![
                    Side::new("π(s)", s.to_string(), a.to_string()),
                    Side::new("π(t)", t.to_string(), b.to_string()),
                ],
            }),
            _ => Outcome::Pass,
        }
    }));
    rep
}

/// `f ∘ π = π ∘ Tf` on sampled trees.
pub fn check_morphism<A: TreeAlgebra, B: TreeAlgebra>(
    m: &AlgebraMorphism<'_, A, B>,
    pool: &LabelPool<A::Elem>,
    cfg: &SamplerConfig,
) -> Report {
    let mut rep = Report::new(
        format!("morphism {} -> {}", m.source.name(), m.target.name()),
        SAMPLED,
    );
    let max = m.source.max_arity();
    rep.push(run_law("preserves product", cfg.samples, |i| {
        let mut rng = cfg.rng(i);
        let Some(t) = random_tree_over(pool, cfg, max, &mut rng) else {
            return Outcome::Skip;
        };
        let lhs = m.source.product(&t).map(|a| m.apply(&a));
        let ft = t.map_total(|a| m.apply(a));
        let rhs = m.target.product(&ft);
        if lhs == rhs {
            Outcome::Pass
        } else {
            Outcome::Fail(Witness {
                input: t.to_string(),
                sides: vec![
                    Side::new("f(π(t))", "", show(&lhs)),
                    Side::new("π(Tf(t))", ft.to_string(), show(&rhs)),
                ],
            })
        }
    }));
    rep
}

fn random_subset<E: Clone>(rng: &mut ChaCha8Rng, xs: &[E], max: usize, allow_empty: bool) -> Vec<E> {
    let lo = usize::from(!allow_empty);
    let hi = max.min(xs.len());
    if hi < lo {
        return Vec::new();
    }
    let k = rng.gen_range(lo..=hi);
    let mut v: Vec<E> = xs.choose_multiple(rng, k).cloned().collect();
    v.shrink_to_fit();
    v
}

/// Sections of a tree labelled by explicit lists.
fn sections<E: Clone>(t: &RankedTree<Vec<E>>) -> SectionIter<E> {
    SectionIter::new(t, |l: &Vec<E>| l.clone())
}

struct ListLabel<E>(usize, Vec<E>);

impl<E> Ranked for ListLabel<E> {
    fn arity(&self) -> usize {
        self.0
    }
}

fn random_set_tree<E: Ranked + Clone>(
    pool: &LabelPool<E>,
    cfg: &SamplerConfig,
    max_arity: usize,
    rng: &mut ChaCha8Rng,
    mut label: impl FnMut(&mut ChaCha8Rng, &[E]) -> Vec<E>,
) -> Option<RankedTree<Vec<E>>> {
    let ks = arities(pool, max_arity);
    if ks.is_empty() {
        return None;
    }
    let n = rng.gen_range(0..=max_arity);
    let t = random_tree_by(&ks, cfg.size, n, cfg.holes, rng, |rng, k| {
        let l = label(rng, pool.of_arity(k));
        Some(ListLabel(k, l))
    })
    .ok()?;
    Some(t.map_total(|l| l.1.clone()))
}

fn show_list<E: fmt::Display>(xs: &[E]) -> String {
    let inner: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(" "))
}

/// `π(T sup(S)) = sup{π(s) : s ∈^T S, π(s) defined}` whenever the left side is
/// defined.
pub fn check_join_continuity<A: TreeAlgebra>(
    alg: &A,
    pool: &LabelPool<A::Elem>,
    cfg: &SamplerConfig,
) -> Report {
    let mut rep = Report::new(format!("join-continuity of {}", alg.name()), SAMPLED);
    let max = alg.max_arity();
    rep.push(run_law("join-continuous", cfg.samples, |i| {
        let mut rng = cfg.rng(i);
        let Some(s) = random_set_tree(pool, cfg, max, &mut rng, |r, xs| random_subset(r, xs, 2, false))
        else {
            return Outcome::Skip;
        };
        let Some(t) = s.map(|xs| alg.sup(arity_of(xs), xs)) else {
            return Outcome::Skip;
        };
        let Some(lhs) = alg.product(&t) else {
            return Outcome::Skip;
        };
        let vals: Vec<A::Elem> = sections(&s).filter_map(|u| alg.product(&u)).collect();
        let rhs = alg.sup(t.declared_arity(), &vals);
        if rhs.as_ref() == Some(&lhs) {
            Outcome::Pass
        } else {
            Outcome::Fail(Witness {
                input: s.map_total(|xs| show_list(xs)).to_string(),
                sides: vec![
                    Side::new("π(T sup(S))", t.to_string(), lhs.to_string()),
                    Side::new("sup π[S]", "", show(&rhs)),
                ],
            })
        }
    }));
    rep
}

fn arity_of<E: Ranked>(xs: &[E]) -> usize {
    xs.first().map_or(0, Ranked::arity)
}

/// `π(T inf(S)) = inf{π(s) : s ∈^T S}` for `S` labelled by subsets of `c`;
/// both sides must be defined for the same `S`.
pub fn check_meet_embedding<A: TreeAlgebra>(
    alg: &A,
    c: &LabelPool<A::Elem>,
    cfg: &SamplerConfig,
) -> Report {
    let mut rep = Report::new(format!("meet-continuous embedding into {}", alg.name()), SAMPLED);
    let max = alg.max_arity();
    rep.push(run_law("meet-continuous", cfg.samples, |i| {
        let mut rng = cfg.rng(i);
        let Some(s) = random_set_tree(c, cfg, max, &mut rng, |r, xs| random_subset(r, xs, 2, false))
        else {
            return Outcome::Skip;
        };
        let Some(t) = s.map(|xs| alg.inf(arity_of(xs), xs)) else {
            return Outcome::Skip;
        };
        let lhs = alg.product(&t);
        let rhs = sections(&s)
            .map(|u| alg.product(&u))
            .collect::<Option<Vec<_>>>()
            .and_then(|vals| alg.inf(t.declared_arity(), &vals));
        if lhs == rhs {
            Outcome::Pass
        } else {
            Outcome::Fail(Witness {
                input: s.map_total(|xs| show_list(xs)).to_string(),
                sides: vec![
                    Side::new("π(T inf(S))", t.to_string(), show(&lhs)),
                    Side::new("inf π[S]", "", show(&rhs)),
                ],
            })
        }
    }));
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionKind {
    Join,
    Meet,
}

/// For pairs `S, S′` of closed-set-labelled trees over `c` with the same
/// pointwise sup (inf), the sup (inf) of the section products must agree.
pub fn check_extension_condition<A: TreeAlgebra>(
    kind: ExtensionKind,
    alg: &A,
    c: &LabelPool<A::Elem>,
    cfg: &SamplerConfig,
) -> Report {
    let name = match kind {
        ExtensionKind::Join => "join-extension condition",
        ExtensionKind::Meet => "meet-extension condition",
    };
    let mut rep = Report::new(format!("{name} in {}", alg.name()), SAMPLED);
    let max = alg.max_arity();
    let close = |xs: &[A::Elem], all: &[A::Elem]| -> Vec<A::Elem> {
        all.iter()
            .filter(|y| {
                xs.iter().any(|x| match kind {
                    ExtensionKind::Join => alg.leq(y, x),
                    ExtensionKind::Meet => alg.leq(x, y),
                })
            })
            .cloned()
            .collect()
    };
    let bound = |n: usize, xs: &[A::Elem]| match kind {
        ExtensionKind::Join => alg.sup(n, xs),
        ExtensionKind::Meet => alg.inf(n, xs),
    };
    let side = |s: &RankedTree<Vec<A::Elem>>| -> Option<A::Elem> {
        let n = s.declared_arity();
        match kind {
            ExtensionKind::Join => {
                let vals: Vec<A::Elem> = sections(s).filter_map(|u| alg.product(&u)).collect();
                alg.sup(n, &vals)
            }
            ExtensionKind::Meet => {
                let vals = sections(s).map(|u| alg.product(&u)).collect::<Option<Vec<_>>>()?;
                alg.inf(n, &vals)
            }
        }
    };
    rep.push(run_law(name, cfg.samples, |i| {
        let mut rng = cfg.rng(i);
        let Some(s) = random_set_tree(c, cfg, max, &mut rng, |r, xs| {
            let seed = random_subset(r, xs, 2, false);
            close(&seed, xs)
        }) else {
            return Outcome::Skip;
        };
        // a second labelling with the same pointwise bound
        let mut ok = true;
        let s2 = s.map_total(|xs| {
            let k = arity_of(xs);
            let all = c.of_arity(k);
            let target = bound(k, xs);
            if target.is_none() {
                ok = false;
            }
            for _ in 0..16 {
                let cand = close(&random_subset(&mut rng, all, 3, false), all);
                if bound(k, &cand) == target {
                    return cand;
                }
            }
            xs.clone()
        });
        if !ok {
            return Outcome::Skip;
        }
        let (l, r) = (side(&s), side(&s2));
        if l == r {
            Outcome::Pass
        } else {
            Outcome::Fail(Witness {
                input: format!(
                    "S = {}, S' = {}",
                    s.map_total(|xs| show_list(xs)),
                    s2.map_total(|xs| show_list(xs))
                ),
                sides: vec![Side::new("over S", "", show(&l)), Side::new("over S'", "", show(&r))],
            })
        }
    }));
    rep
}

/// Element of a generated ranked poset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub arity: usize,
    pub id: usize,
}

impl Ranked for Point {
    fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}_{}", self.id, self.arity)
    }
}

/// A finite ranked poset: one slice per arity.
#[derive(Clone, Debug)]
pub struct RankedPoset<E> {
    pub slices: Vec<PosetSlice<E>>,
}

impl<E: Clone + Ord + fmt::Debug> RankedPoset<E> {
    pub fn leq(&self, a: &E, b: &E) -> bool
    where
        E: Ranked,
    {
        self.slices.get(a.arity()).is_some_and(|s| Order::leq(s, a, b))
    }
}

/// Random ranked poset with at most `max_elems` elements over arities
/// `0..=max_arity`, always with at least one nullary element.
pub fn random_ranked_poset(rng: &mut ChaCha8Rng, max_elems: usize, max_arity: usize) -> RankedPoset<Point> {
    let total = rng.gen_range(1..=max_elems.max(1));
    let mut counts = vec![0usize; max_arity + 1];
    counts[0] = 1;
    for _ in 1..total {
        counts[rng.gen_range(0..=max_arity)] += 1;
    }
    let mut id = 0;
    let slices = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let pts: Vec<Point> = (0..c)
                .map(|_| {
                    id += 1;
                    Point { arity: k, id }
                })
                .collect();
            let mut pairs = Vec::new();
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if rng.gen_bool(0.35) {
                        pairs.push((pts[i], pts[j]));
                    }
                }
            }
            PosetSlice::new(k, pts, &pairs).expect("forward edges are acyclic")
        })
        .collect();
    RankedPoset { slices }
}

type Forest<E> = BTreeSet<RankedTree<E>>;

fn dist<E: Clone + Ord + fmt::Debug>(p: &RankedPoset<E>, t: &RankedTree<DownSet<E>>) -> Forest<E> {
    SectionIter::new(t, |l: &DownSet<E>| l.denote(&p.slices[l.arity()])).collect()
}

fn down_close<E: Clone + Ord + fmt::Debug + Ranked>(p: &RankedPoset<E>, ts: &Forest<E>) -> Forest<E> {
    let mut out = Forest::new();
    for t in ts {
        let below = |l: &E| -> Vec<E> {
            p.slices[l.arity()].elements().iter().filter(|x| p.leq(x, l)).cloned().collect()
        };
        out.extend(SectionIter::new(t, below));
    }
    out
}

fn sub_downsets<E: Clone + Ord + fmt::Debug>(slice: &PosetSlice<E>, m: &DownSet<E>) -> Vec<DownSet<E>> {
    let sub = PosetSlice::from_order(slice.arity(), m.denote(slice), slice)
        .expect("restriction of a partial order");
    sub.downsets()
}

fn random_down<E: Clone + Ord + fmt::Debug>(rng: &mut ChaCha8Rng, slice: &PosetSlice<E>, allow_empty: bool) -> DownSet<E> {
    let xs = random_subset(rng, slice.elements(), 3, allow_empty);
    slice.down_of(xs)
}

fn compare_forests<E: fmt::Display + Ord>(
    input: String,
    lhs_name: &str,
    lhs: &Forest<E>,
    rhs_name: &str,
    rhs: &Forest<E>,
) -> Outcome {
    if lhs == rhs {
        return Outcome::Pass;
    }
    let diff = lhs.symmetric_difference(rhs).next().map(ToString::to_string).unwrap_or_default();
    Outcome::Fail(Witness {
        input,
        sides: vec![
            Side::new(lhs_name, "", format!("{} trees", lhs.len())),
            Side::new(rhs_name, "", format!("{} trees (first difference: {diff})", rhs.len())),
        ],
    })
}

/// The four equations of the distributive law `dist : TD ⇒ DT`, each checked
/// on `cfg.samples` random instances over random posets with at most
/// `max_elems` elements, comparing denoted sets of trees.
pub fn check_dist_law(max_elems: usize, cfg: &SamplerConfig) -> Report {
    let mut rep = Report::new("distributive law TD => DT", SAMPLED);
    let max_arity = 2;
    let setup = |i: usize, salt: u64| {
        let mut rng = cfg.rng(i);
        rng.set_word_pos(u128::from(salt) << 20);
        let p = random_ranked_poset(&mut rng, max_elems, max_arity);
        (rng, p)
    };
    let ks = |p: &RankedPoset<Point>| -> Vec<usize> {
        (0..p.slices.len()).filter(|&k| !p.slices[k].is_empty()).collect()
    };
    let dtree = |rng: &mut ChaCha8Rng, p: &RankedPoset<Point>, n: usize, size: usize| {
        random_tree_by(&ks(p), size, n, cfg.holes, rng, |r, k| {
            Some(random_down(r, &p.slices[k], cfg.empty_labels))
        })
    };

    rep.push(run_law("dist . flat = D flat . dist . T dist", cfg.samples, |i| {
        let (mut rng, p) = setup(i, 1);
        let n = rng.gen_range(0..=max_arity);
        let outer_ks: Vec<usize> = (0..=max_arity).collect();
        let inner_size = cfg.size.min(4);
        let Ok(tt) = random_tree_by(&outer_ks, cfg.size.min(4), n, cfg.holes, &mut rng, |r, k| {
            dtree(r, &p, k, inner_size).ok()
        }) else {
            return Outcome::Skip;
        };
        let lhs = dist(&p, &tt.flatten());
        let per_node: RankedTree<Vec<RankedTree<Point>>> =
            tt.map_total(|inner| dist(&p, inner).into_iter().collect());
        let flat: Forest<Point> = sections(&per_node).map(|s| s.flatten()).collect();
        let rhs = down_close(&p, &flat);
        compare_forests(show_tt(&tt), "dist(flat(t))", &lhs, "D flat(dist(T dist(t)))", &rhs)
    }));

    rep.push(run_law("dist . T union = union . D dist . dist", cfg.samples, |i| {
        let (mut rng, p) = setup(i, 2);
        let n = rng.gen_range(0..=max_arity);
        let dd_label = |r: &mut ChaCha8Rng, k: usize| {
            let slice = &p.slices[k];
            let m = r.gen_range(1..=2);
            let members: Vec<DownSet<Point>> =
                (0..m).map(|_| random_down(r, slice, cfg.empty_labels)).collect();
            let ord = |a: &DownSet<Point>, b: &DownSet<Point>| a.leq(slice, b);
            Some(DownSet::of(&ord, k, members))
        };
        let Ok(t) = random_tree_by(&ks(&p), cfg.size.min(4), n, cfg.holes, &mut rng, dd_label) else {
            return Outcome::Skip;
        };
        let unioned = t.map_total(|l| {
            let slice = &p.slices[l.arity()];
            DownSet::union_all(slice, l.arity(), l.maximals())
        });
        let lhs = dist(&p, &unioned);
        let denote_dd = |l: &DownSet<DownSet<Point>>| -> Vec<DownSet<Point>> {
            let slice = &p.slices[l.arity()];
            let all: BTreeSet<DownSet<Point>> =
                l.maximals().iter().flat_map(|m| sub_downsets(slice, m)).collect();
            all.into_iter().collect()
        };
        let mut rhs = Forest::new();
        for r in SectionIter::new(&t, denote_dd) {
            rhs.extend(dist(&p, &r));
        }
        compare_forests(t.to_string(), "dist(T union(t))", &lhs, "union(D dist(dist(t)))", &rhs)
    }));

    rep.push(run_law("dist . sing = D sing", cfg.samples, |i| {
        let (mut rng, p) = setup(i, 3);
        let k = *ks(&p).choose(&mut rng).expect("a nullary slice exists");
        let slice = &p.slices[k];
        let d = random_down(&mut rng, slice, cfg.empty_labels);
        let lhs = dist(&p, &RankedTree::singleton(d.clone()));
        let sing: Forest<Point> = d.denote(slice).into_iter().map(RankedTree::singleton).collect();
        let rhs = down_close(&p, &sing);
        compare_forests(d.to_string(), "dist(sing(I))", &lhs, "D sing(I)", &rhs)
    }));

    rep.push(run_law("dist . T pt = pt", cfg.samples, |i| {
        let (mut rng, p) = setup(i, 4);
        let n = rng.gen_range(0..=max_arity);
        let Ok(t) = random_tree_by(&ks(&p), cfg.size, n, cfg.holes, &mut rng, |r, k| {
            pick(r, p.slices[k].elements())
        }) else {
            return Outcome::Skip;
        };
        let lhs = dist(&p, &t.map_total(|a| DownSet::principal(a.arity(), *a)));
        let rhs = down_close(&p, &[t.clone()].into_iter().collect());
        compare_forests(t.to_string(), "dist(T pt(t))", &lhs, "pt(t)", &rhs)
    }));
    rep
}

/// Unit law, exhaustively over a finite list of elements.
pub fn check_unit_exhaustive<A: TreeAlgebra>(alg: &A, elems: &[A::Elem]) -> Report {
    let mut rep = Report::new(format!("unit law of {}", alg.name()), EXHAUSTIVE);
    rep.push(run_law("unit", elems.len(), |i| {
        let a = &elems[i];
        let v = alg.product(&RankedTree::singleton(a.clone()));
        if v.as_ref() == Some(a) {
            Outcome::Pass
        } else {
            Outcome::Fail(Witness {
                input: a.to_string(),
                sides: vec![Side::new("π(sing(a))", "", show(&v))],
            })
        }
    }));
    rep
}
