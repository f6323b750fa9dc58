//! `Branch(S) = D(U(TA(S)))`: downsets of upsets of `TA(S)`, with the product
//! obtained by lifting twice. Elements are only ever built from inputs; the
//! lattice itself is never enumerated.
//!
//! Both levels are evaluated along paths: a choice at the D level is only made
//! at nodes that some chosen upset actually reaches through its ports, and the
//! U level only follows traces. Labels at nodes no trace can reach therefore
//! never matter, exactly as under flattening.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::algebra::TreeAlgebra;
use crate::error::{Error, Result};
use crate::graphs::TreeGraph;
use crate::order::{DownSet, UpSet};
use crate::report::{run_law, Outcome, Report, SamplerConfig, Side, Witness, SAMPLED};
use crate::tree::{enumerate_sections, random_tree_by, Address, HoleMode, Node, Ranked, RankedTree};
use crate::treesg::{c_product, random_cl_label, traces_regular, Generators, TaAlgebra, TaElem, TaValue};

pub type BranchElem = DownSet<UpSet<TaElem>>;

pub const DEFAULT_SECTION_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct BranchAlgebra {
    ta: TaAlgebra,
    budget: usize,
}

impl BranchAlgebra {
    pub fn new(ta: TaAlgebra) -> Self {
        BranchAlgebra { ta, budget: DEFAULT_SECTION_BUDGET }
    }

    /// Caps the number of outer sections a single product may visit.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn ta(&self) -> &TaAlgebra {
        &self.ta
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// `η(ζ(a))`.
    pub fn embed(&self, a: &TaElem) -> BranchElem {
        DownSet::principal(a.arity(), UpSet::principal(a.arity(), a.clone()))
    }

    /// The downset generated by the given upsets.
    pub fn down_of(&self, arity: usize, members: impl IntoIterator<Item = UpSet<TaElem>>) -> BranchElem {
        let ord = |x: &UpSet<TaElem>, y: &UpSet<TaElem>| self.ta.up_leq(x, y);
        DownSet::of(&ord, arity, members)
    }

    /// The U-level product of one outer section, enumerating its traces one
    /// by one. `None` when some trace product is undefined.
    pub fn section_product(&self, s: &RankedTree<UpSet<TaElem>>) -> Option<UpSet<TaElem>> {
        let w = self.ta.wilke();
        let n = s.declared_arity();
        let mut vals = Vec::new();
        // (address, word read so far)
        let mut stack: Vec<(Address, Vec<usize>)> = vec![(Address::root(), Vec::new())];
        while let Some((at, word)) = stack.pop() {
            match s.get(&at).expect("address in tree") {
                Node::Hole(i) => vals.push(self.ta.open(w.product1(&word)?, *i, n)),
                Node::Label(u) => {
                    for m in self.ta.members(u) {
                        match m {
                            TaValue::Closed(a) => vals.push(self.ta.closed(w.apply_prefix(&word, a)?, n)),
                            TaValue::Open(b, k) => {
                                let mut next = word.clone();
                                next.push(b);
                                stack.push((at.child(k), next));
                            }
                        }
                    }
                }
            }
        }
        Some(self.ta.up_of(n, vals))
    }

    pub fn try_product(&self, t: &RankedTree<BranchElem>) -> Result<BranchElem> {
        let n = t.declared_arity();
        let mut chosen: BTreeMap<Address, UpSet<TaElem>> = BTreeMap::new();
        let mut results = BTreeSet::new();
        let mut count = 0usize;
        self.outer(t, vec![Address::root()], &mut chosen, &mut results, &mut count)?;
        Ok(self.down_of(n, results))
    }

    fn outer(
        &self,
        t: &RankedTree<BranchElem>,
        mut pending: Vec<Address>,
        chosen: &mut BTreeMap<Address, UpSet<TaElem>>,
        results: &mut BTreeSet<UpSet<TaElem>>,
        count: &mut usize,
    ) -> Result<()> {
        let Some(at) = pending.pop() else {
            *count += 1;
            if *count > self.budget {
                return Err(Error::Budget(format!("more than {} outer sections", self.budget)));
            }
            // unreached nodes get ⊤, which no trace passes
            let nodes = t
                .nodes()
                .map(|(a, node)| {
                    let node = match node {
                        Node::Hole(i) => Node::Hole(*i),
                        Node::Label(e) => {
                            Node::Label(chosen.get(a).cloned().unwrap_or_else(|| UpSet::top(e.arity())))
                        }
                    };
                    (a.clone(), node)
                })
                .collect();
            let s = RankedTree::from_nodes(t.declared_arity(), nodes).expect("same shape");
            if let Some(u) = self.section_product(&s) {
                results.insert(u);
            }
            return Ok(());
        };
        match t.get(&at).expect("address in tree") {
            Node::Hole(_) => self.outer(t, pending, chosen, results, count),
            Node::Label(e) => {
                for m in e.maximals() {
                    let ports: BTreeSet<usize> = m.minimals().iter().filter_map(TaElem::port).collect();
                    let mut next = pending.clone();
                    next.extend(ports.into_iter().map(|k| at.child(k)));
                    chosen.insert(at.clone(), m.clone());
                    self.outer(t, next, chosen, results, count)?;
                }
                chosen.remove(&at);
                Ok(())
            }
        }
    }

    /// The product through full sections of the maximal members and the
    /// `cl(S)` product of each: `sup { π(s) : s ∈ TC, s ≤ t }`.
    pub fn product_by_generators(&self, t: &RankedTree<BranchElem>) -> BranchElem {
        let secs = enumerate_sections(t, |e: &BranchElem| e.maximals().to_vec());
        let vals = secs.trees.iter().filter_map(|s| c_product(&self.ta, s));
        self.down_of(t.declared_arity(), vals)
    }

    /// Sup of the trace sets over all choices on a regular tree, where the
    /// choice at a vertex may depend on the set of prefix products that reach
    /// it (finitely many, so the result is a finite join).
    pub fn regular_sup(&self, g: &TreeGraph<BranchElem>) -> Result<BranchElem> {
        let mut st = RegularSearch {
            b: self,
            g,
            keys: Vec::new(),
            index: BTreeMap::new(),
            choice: Vec::new(),
            results: BTreeSet::new(),
            count: 0,
        };
        let root = st.key(g.root(), Reach::Start);
        st.search(vec![root])?;
        Ok(self.down_of(g.declared_arity(), st.results))
    }
}

impl TreeAlgebra for BranchAlgebra {
    type Elem = BranchElem;

    fn name(&self) -> String {
        "Branch(S)".into()
    }

    fn max_arity(&self) -> usize {
        self.ta.max_arity()
    }

    fn leq(&self, a: &BranchElem, b: &BranchElem) -> bool {
        let ord = |x: &UpSet<TaElem>, y: &UpSet<TaElem>| self.ta.up_leq(x, y);
        a.arity() == b.arity() && a.leq(&ord, b)
    }

    /// Total; panics when the outer section budget is exceeded (use
    /// [`BranchAlgebra::try_product`] to get an error instead).
    fn product(&self, t: &RankedTree<BranchElem>) -> Option<BranchElem> {
        Some(self.try_product(t).unwrap_or_else(|e| panic!("{e}")))
    }

    fn sup(&self, arity: usize, xs: &[BranchElem]) -> Option<BranchElem> {
        Some(self.down_of(arity, xs.iter().flat_map(|x| x.maximals().iter().cloned())))
    }
}

/// Prefix products reaching a vertex; `None` marks an undefined one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Reach {
    Start,
    Via(BTreeSet<Option<usize>>),
}

struct RegularSearch<'a> {
    b: &'a BranchAlgebra,
    g: &'a TreeGraph<BranchElem>,
    keys: Vec<(usize, Reach)>,
    index: BTreeMap<(usize, Reach), usize>,
    /// Chosen member per key (`None`: not chosen yet, or a hole).
    choice: Vec<Option<usize>>,
    results: BTreeSet<UpSet<TaElem>>,
    count: usize,
}

impl RegularSearch<'_> {
    fn key(&mut self, v: usize, r: Reach) -> usize {
        if let Some(&i) = self.index.get(&(v, r.clone())) {
            return i;
        }
        self.keys.push((v, r.clone()));
        self.choice.push(None);
        self.index.insert((v, r), self.keys.len() - 1);
        self.keys.len() - 1
    }

    fn search(&mut self, mut pending: Vec<usize>) -> Result<()> {
        let Some(k) = pending.pop() else {
            return self.evaluate();
        };
        let (v, reach) = self.keys[k].clone();
        let Node::Label(e) = self.g.node(v) else {
            return self.search(pending);
        };
        if self.choice[k].is_some() {
            return self.search(pending);
        }
        let w = self.b.ta.wilke();
        let mark = self.keys.len();
        for (mi, m) in e.maximals().iter().enumerate() {
            self.choice[k] = Some(mi);
            let mut next = pending.clone();
            let mut by_port: BTreeMap<usize, BTreeSet<Option<usize>>> = BTreeMap::new();
            for val in self.b.ta.members(m) {
                if let TaValue::Open(b, port) = val {
                    let out = by_port.entry(port).or_default();
                    match &reach {
                        Reach::Start => {
                            out.insert(Some(b));
                        }
                        Reach::Via(ps) => {
                            out.extend(ps.iter().map(|p| p.and_then(|p| w.bin(p, b))));
                        }
                    }
                }
            }
            for (port, ps) in by_port {
                next.push(self.key(self.g.succ(v)[port], Reach::Via(ps)));
            }
            self.search(next)?;
            // forget keys created below this choice
            for i in mark..self.keys.len() {
                let key = self.keys[i].clone();
                self.index.remove(&key);
            }
            self.keys.truncate(mark);
            self.choice.truncate(mark);
        }
        self.choice[k] = None;
        Ok(())
    }

    fn evaluate(&mut self) -> Result<()> {
        self.count += 1;
        if self.count > self.b.budget {
            return Err(Error::Budget(format!("more than {} choice functions", self.b.budget)));
        }
        let n = self.g.declared_arity();
        let sink = self.keys.len();
        let mut nodes = Vec::new();
        let mut succ = Vec::new();
        for (k, (v, reach)) in self.keys.iter().enumerate() {
            match (self.g.node(*v), self.choice[k]) {
                (Node::Hole(i), _) => {
                    nodes.push(Node::Hole(*i));
                    succ.push(Vec::new());
                }
                (Node::Label(e), Some(mi)) => {
                    let m = &e.maximals()[mi];
                    let out = (0..e.arity())
                        .map(|port| {
                            let ps: BTreeSet<Option<usize>> = self.successor_reach(reach, m, port);
                            if ps.is_empty() {
                                sink
                            } else {
                                self.index[&(self.g.succ(*v)[port], Reach::Via(ps))]
                            }
                        })
                        .collect();
                    nodes.push(Node::Label(m.clone()));
                    succ.push(out);
                }
                (Node::Label(_), None) => unreachable!("every reached key is chosen"),
            }
        }
        nodes.push(Node::Label(UpSet::top(0)));
        succ.push(Vec::new());
        let h = TreeGraph::new(n, 0, nodes, succ)?;
        let tr = traces_regular(&self.b.ta, &h);
        if !tr.undefined {
            self.results.insert(tr.values);
        }
        Ok(())
    }

    fn successor_reach(&self, reach: &Reach, m: &UpSet<TaElem>, port: usize) -> BTreeSet<Option<usize>> {
        let w = self.b.ta.wilke();
        let mut out = BTreeSet::new();
        for val in self.b.ta.members(m) {
            if let TaValue::Open(b, k) = val {
                if k != port {
                    continue;
                }
                match reach {
                    Reach::Start => {
                        out.insert(Some(b));
                    }
                    Reach::Via(ps) => out.extend(ps.iter().map(|p| p.and_then(|p| w.bin(p, b)))),
                }
            }
        }
        out
    }
}

/// Whether `η(q0)` lies in the nullary element `e`: some member upset is
/// contained in `↑q0`.
pub fn recognize(ta: &TaAlgebra, e: &BranchElem, q0: usize) -> Result<bool> {
    if e.arity() != 0 {
        return Err(Error::Invalid(format!("recognition needs a nullary element, got arity {}", e.arity())));
    }
    let w = ta.wilke();
    Ok(e.maximals().iter().any(|m| {
        m.minimals().iter().all(|x| matches!(x.value(), TaValue::Closed(a) if w.leq0(q0, a)))
    }))
}

/// Prints `{ {a, b(x0)}, {} }`.
pub fn show_branch(e: &BranchElem) -> String {
    let inner: Vec<String> = e
        .maximals()
        .iter()
        .map(|u| {
            let xs: Vec<String> = u.minimals().iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", xs.join(", "))
        })
        .collect();
    if inner.is_empty() {
        "{ }".into()
    } else {
        format!("{{ {} }}", inner.join(", "))
    }
}

/// A random element of arity `n` whose members are meets of generators;
/// `⊥` only when `allow_bottom`.
pub fn random_branch_elem<R: Rng>(
    b: &BranchAlgebra,
    gens: &Generators,
    n: usize,
    allow_bottom: bool,
    rng: &mut R,
) -> Option<BranchElem> {
    let lo = usize::from(!allow_bottom);
    let k = rng.gen_range(lo..=2);
    let members: Option<Vec<_>> = (0..k).map(|_| random_cl_label(b.ta(), gens, n, 2, rng)).collect();
    Some(b.down_of(n, members?))
}

/// The product against its formula through generator sections, on sampled
/// trees.
pub fn join_generator_formula_check(b: &BranchAlgebra, cfg: &SamplerConfig) -> Report {
    let mut rep = Report::new("π(t) = sup of products of generator sections", SAMPLED);
    let gens = Generators::all(b.ta().wilke());
    let arities: Vec<usize> = (0..=b.max_arity()).collect();
    rep.push(run_law("join-generator formula", cfg.samples, |i| {
        let mut rng = cfg.rng(i);
        let n = rng.gen_range(0..=b.max_arity());
        let Ok(t) = random_tree_by(&arities, cfg.size, n, HoleMode::Affine, &mut rng, |r, k| {
            random_branch_elem(b, &gens, k, cfg.empty_labels, r)
        }) else {
            return Outcome::Skip;
        };
        let lhs = match b.try_product(&t) {
            Ok(x) => x,
            Err(_) => return Outcome::Skip,
        };
        let rhs = b.product_by_generators(&t);
        if lhs == rhs {
            Outcome::Pass
        } else {
            Outcome::Fail(Witness {
                input: t.to_string(),
                sides: vec![
                    Side::new("π(t)", t.to_string(), show_branch(&lhs)),
                    Side::new("sup π(s)", "", show_branch(&rhs)),
                ],
            })
        }
    }));
    rep
}
