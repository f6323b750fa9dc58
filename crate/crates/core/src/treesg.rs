//! The semigroup-like tree algebra `TA(S)` over a Wilke algebra `S`, its
//! products on finite and regular trees, and trace sets of trees labelled by
//! meets of such elements.
//!
//! `TA_n(S) = S0 ∪ (S1 × [n])`: a nullary element is a terminated word value,
//! `⟨b, k⟩` is the unary value `b` waiting at port `x_k`. The product of a
//! tree follows the unique path that the cylinder structure leaves and
//! evaluates the word read along it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::algebra::TreeAlgebra;
use crate::error::{Error, Result};
use crate::graphs::{Cylindrical, TreeGraph};
use crate::omega::{limit_set, LabelledGraph, UpWord, WilkeAlgebra, WordEnd};
use crate::order::{PosetSlice, UpSet};
use crate::report::{run_law, Outcome, Report, SamplerConfig, Side, Witness, SAMPLED};
use crate::tree::{random_tree_by, Address, HoleMode, Node, Ranked, RankedTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaValue {
    /// An `S0` element.
    Closed(usize),
    /// `⟨b, k⟩`: `S1` element `b` at port `k`.
    Open(usize, usize),
}

/// An element of `TA_n(S)`; carries its printed name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaElem {
    arity: usize,
    value: TaValue,
    name: Arc<str>,
}

impl TaElem {
    pub fn value(&self) -> TaValue {
        self.value
    }

    /// The port of a unary element.
    pub fn port(&self) -> Option<usize> {
        match self.value {
            TaValue::Open(_, k) => Some(k),
            TaValue::Closed(_) => None,
        }
    }

    fn with(&self, arity: usize, value: TaValue) -> TaElem {
        TaElem { arity, value, name: self.name.clone() }
    }
}

impl Ranked for TaElem {
    fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for TaElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            TaValue::Closed(_) => f.write_str(&self.name),
            TaValue::Open(_, k) => write!(f, "{}(x{k})", self.name),
        }
    }
}

impl Cylindrical for TaElem {
    fn core(&self) -> (Self, Vec<usize>) {
        match self.value {
            TaValue::Closed(_) => (self.with(0, self.value), Vec::new()),
            TaValue::Open(b, k) => (self.with(1, TaValue::Open(b, 0)), vec![k]),
        }
    }
}

/// An injective map `σ: [m] → [n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylMap {
    map: Vec<usize>,
    target: usize,
}

impl CylMap {
    pub fn new(map: Vec<usize>, target: usize) -> Result<Self> {
        let distinct: BTreeSet<&usize> = map.iter().collect();
        if distinct.len() != map.len() {
            return Err(Error::NotInjective(format!("{map:?}")));
        }
        if let Some(k) = map.iter().find(|&&k| k >= target) {
            return Err(Error::Invalid(format!("{k} is outside [{target}]")));
        }
        Ok(CylMap { map, target })
    }

    pub fn identity(n: usize) -> Self {
        CylMap { map: (0..n).collect(), target: n }
    }

    pub fn source(&self) -> usize {
        self.map.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &CylMap) -> Result<CylMap> {
        if first.target != self.source() {
            return Err(Error::Invalid("maps do not compose".into()));
        }
        Ok(CylMap { map: first.map.iter().map(|&i| self.map[i]).collect(), target: self.target })
    }
}

/// `cy_σ(a)`: nullary elements are fixed, `⟨b, k⟩` becomes `⟨b, σ(k)⟩`.
pub fn cylinder(sigma: &CylMap, a: &TaElem) -> Result<TaElem> {
    if a.arity != sigma.source() {
        return Err(Error::Invalid(format!(
            "element of arity {} under a map from [{}]",
            a.arity,
            sigma.source()
        )));
    }
    let v = match a.value {
        TaValue::Closed(x) => TaValue::Closed(x),
        TaValue::Open(b, k) => TaValue::Open(b, sigma.apply(k)),
    };
    Ok(a.with(sigma.target(), v))
}

/// `cy_σ` on trees: hole `x_i` becomes `x_σ(i)`.
pub fn cylinder_tree<L: Clone>(sigma: &CylMap, t: &RankedTree<L>) -> Result<RankedTree<L>> {
    if t.declared_arity() != sigma.source() {
        return Err(Error::Invalid("tree arity differs from the map's source".into()));
    }
    Ok(t.renumber_holes(sigma.target(), |i| sigma.apply(i)))
}

/// `TA(S)` restricted to arities `≤ max_arity`.
#[derive(Clone, Debug)]
pub struct TaAlgebra {
    w: Arc<WilkeAlgebra>,
    max_arity: usize,
    names0: Vec<Arc<str>>,
    names1: Vec<Arc<str>>,
    slices: Vec<PosetSlice<TaElem>>,
}

impl TaAlgebra {
    pub fn new(w: WilkeAlgebra, max_arity: usize) -> Self {
        let names0 = w.names0().iter().map(|s| Arc::from(s.as_str())).collect();
        let names1 = w.names1().iter().map(|s| Arc::from(s.as_str())).collect();
        let mut ta = TaAlgebra { w: Arc::new(w), max_arity, names0, names1, slices: Vec::new() };
        ta.slices = (0..=max_arity)
            .map(|n| {
                let ord = |a: &TaElem, b: &TaElem| ta.leq(a, b);
                PosetSlice::from_order(n, ta.elements(n), &ord).expect("TA order is a partial order")
            })
            .collect();
        ta
    }

    pub fn wilke(&self) -> &WilkeAlgebra {
        &self.w
    }

    pub fn closed(&self, a: usize, arity: usize) -> TaElem {
        TaElem { arity, value: TaValue::Closed(a), name: self.names0[a].clone() }
    }

    pub fn open(&self, b: usize, port: usize, arity: usize) -> TaElem {
        debug_assert!(port < arity);
        TaElem { arity, value: TaValue::Open(b, port), name: self.names1[b].clone() }
    }

    pub fn make(&self, v: TaValue, arity: usize) -> TaElem {
        match v {
            TaValue::Closed(a) => self.closed(a, arity),
            TaValue::Open(b, k) => self.open(b, k, arity),
        }
    }

    pub fn elements(&self, n: usize) -> Vec<TaElem> {
        let mut out: Vec<TaElem> = (0..self.w.n0()).map(|a| self.closed(a, n)).collect();
        for k in 0..n {
            out.extend((0..self.w.n1()).map(|b| self.open(b, k, n)));
        }
        out
    }

    /// The arity-`n` slice; `n` must not exceed `max_arity`.
    pub fn slice(&self, n: usize) -> &PosetSlice<TaElem> {
        &self.slices[n]
    }

    /// Every element above `m`.
    pub fn above(&self, m: &TaElem) -> Vec<TaElem> {
        match m.value {
            TaValue::Closed(a) => {
                (0..self.w.n0()).filter(|&x| self.w.leq0(a, x)).map(|x| self.closed(x, m.arity)).collect()
            }
            TaValue::Open(b, k) => (0..self.w.n1())
                .filter(|&y| self.w.leq1(b, y))
                .map(|y| self.open(y, k, m.arity))
                .collect(),
        }
    }

    /// Every element of the upset, by value.
    pub fn members(&self, u: &UpSet<TaElem>) -> BTreeSet<TaValue> {
        u.minimals().iter().flat_map(|m| self.above(m)).map(|e| e.value).collect()
    }

    pub fn up_of(&self, arity: usize, xs: impl IntoIterator<Item = TaElem>) -> UpSet<TaElem> {
        let ord = |a: &TaElem, b: &TaElem| self.leq(a, b);
        UpSet::of(&ord, arity, xs)
    }

    /// Order on upsets (reverse inclusion).
    pub fn up_leq(&self, x: &UpSet<TaElem>, y: &UpSet<TaElem>) -> bool {
        let ord = |a: &TaElem, b: &TaElem| self.leq(a, b);
        x.leq(&ord, y)
    }

    /// The product on a regular tree, through the lasso its cylinder
    /// unravelling reduces to.
    pub fn product_regular(&self, g: &TreeGraph<TaElem>) -> Option<TaElem> {
        let mut word = Vec::new();
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut v = g.root();
        loop {
            if let Some(&at) = seen.get(&v) {
                let w = UpWord { prefix: word[..at].to_vec(), end: WordEnd::Loop(word[at..].to_vec()) };
                return self.w.up_product(&w).map(|a| self.closed(a, g.declared_arity()));
            }
            seen.insert(v, word.len());
            match g.node(v) {
                Node::Hole(i) => {
                    let s = self.w.product1(&word)?;
                    return Some(self.open(s, *i, g.declared_arity()));
                }
                Node::Label(a) => match a.value {
                    TaValue::Closed(x) => {
                        return self.w.apply_prefix(&word, x).map(|r| self.closed(r, g.declared_arity()))
                    }
                    TaValue::Open(b, k) => {
                        word.push(b);
                        v = g.succ(v)[k];
                    }
                },
            }
        }
    }
}

impl TreeAlgebra for TaAlgebra {
    type Elem = TaElem;

    fn name(&self) -> String {
        "TA(S)".into()
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn leq(&self, a: &TaElem, b: &TaElem) -> bool {
        a.arity == b.arity
            && match (a.value, b.value) {
                (TaValue::Closed(x), TaValue::Closed(y)) => self.w.leq0(x, y),
                (TaValue::Open(x, i), TaValue::Open(y, j)) => i == j && self.w.leq1(x, y),
                _ => false,
            }
    }

    /// Reads the word along the path chosen by the ports and evaluates it.
    fn product(&self, t: &RankedTree<TaElem>) -> Option<TaElem> {
        let n = t.declared_arity();
        let mut word = Vec::new();
        let mut at = Address::root();
        loop {
            match t.get(&at)? {
                Node::Hole(i) => return Some(self.open(self.w.product1(&word)?, *i, n)),
                Node::Label(a) => match a.value {
                    TaValue::Closed(x) => return Some(self.closed(self.w.apply_prefix(&word, x)?, n)),
                    TaValue::Open(b, k) => {
                        word.push(b);
                        at = at.child(k);
                    }
                },
            }
        }
    }

    fn carrier(&self, n: usize) -> Option<Vec<TaElem>> {
        Some(self.elements(n))
    }
}

/// A trace set: the upward closure of all trace products, and whether some
/// trace product is undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Traces {
    pub values: UpSet<TaElem>,
    pub undefined: bool,
}

impl Traces {
    /// The meet of the trace products, undefined when one of them is.
    pub fn product(self) -> Option<UpSet<TaElem>> {
        (!self.undefined).then_some(self.values)
    }
}

impl fmt::Display for Traces {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.values)?;
        if self.undefined {
            write!(f, " (some trace undefined)")?;
        }
        Ok(())
    }
}

/// Product of the prefix read so far: nothing yet, a value, or already
/// undefined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Prefix {
    Empty,
    Val(usize),
    Bad,
}

impl Prefix {
    fn then(self, w: &WilkeAlgebra, b: usize) -> Prefix {
        match self {
            Prefix::Empty => Prefix::Val(b),
            Prefix::Val(s) => w.bin(s, b).map_or(Prefix::Bad, Prefix::Val),
            Prefix::Bad => Prefix::Bad,
        }
    }

    fn stop(self, w: &WilkeAlgebra, a: usize) -> Option<usize> {
        match self {
            Prefix::Empty => Some(a),
            Prefix::Val(s) => w.mix(s, a),
            Prefix::Bad => None,
        }
    }
}

/// Trace set of a finite tree labelled by upsets of `TA(S)`. A trace follows
/// one branch, choosing above each label an element whose port continues the
/// branch; it ends at a nullary choice or at a hole. Labels that are `⊤` let
/// no trace through.
pub fn traces_finite(ta: &TaAlgebra, t: &RankedTree<UpSet<TaElem>>) -> Traces {
    let w = ta.wilke();
    let n = t.declared_arity();
    let mut memo: BTreeMap<(Address, Prefix), (BTreeSet<TaValue>, bool)> = BTreeMap::new();
    fn go(
        ta: &TaAlgebra,
        w: &WilkeAlgebra,
        t: &RankedTree<UpSet<TaElem>>,
        at: Address,
        p: Prefix,
        memo: &mut BTreeMap<(Address, Prefix), (BTreeSet<TaValue>, bool)>,
    ) -> (BTreeSet<TaValue>, bool) {
        if let Some(r) = memo.get(&(at.clone(), p)) {
            return r.clone();
        }
        let mut vals = BTreeSet::new();
        let mut undef = false;
        match t.get(&at).expect("address in tree") {
            Node::Hole(i) => match p {
                Prefix::Val(s) => {
                    vals.insert(TaValue::Open(s, *i));
                }
                Prefix::Bad => undef = true,
                Prefix::Empty => unreachable!("holes are never the root"),
            },
            Node::Label(u) => {
                for m in ta.members(u) {
                    match m {
                        TaValue::Closed(a) => match p.stop(w, a) {
                            Some(x) => {
                                vals.insert(TaValue::Closed(x));
                            }
                            None => undef = true,
                        },
                        TaValue::Open(b, k) => {
                            let (v, u) = go(ta, w, t, at.child(k), p.then(w, b), memo);
                            vals.extend(v);
                            undef |= u;
                        }
                    }
                }
            }
        }
        memo.insert((at, p), (vals.clone(), undef));
        (vals, undef)
    }
    let (vals, undefined) = go(ta, w, t, Address::root(), Prefix::Empty, &mut memo);
    let values = ta.up_of(n, vals.into_iter().map(|v| ta.make(v, n)));
    Traces { values, undefined }
}

/// The additive labelling whose maximal paths are the traces of `g`: one edge
/// per unary member of a label, one stop per nullary member, one exit per
/// hole.
pub fn trace_labelling(ta: &TaAlgebra, g: &TreeGraph<UpSet<TaElem>>) -> LabelledGraph {
    let mut lg = LabelledGraph { vertices: g.len(), root: g.root(), ..Default::default() };
    for v in 0..g.len() {
        match g.node(v) {
            Node::Hole(i) => lg.exits.push((v, *i)),
            Node::Label(u) => {
                for m in ta.members(u) {
                    match m {
                        TaValue::Closed(a) => lg.stops.push((v, a)),
                        TaValue::Open(b, k) => lg.edges.push((v, g.succ(v)[k], b)),
                    }
                }
            }
        }
    }
    lg
}

/// Trace set of a regular tree, via the limit set of its trace labelling.
pub fn traces_regular(ta: &TaAlgebra, g: &TreeGraph<UpSet<TaElem>>) -> Traces {
    let n = g.declared_arity();
    let ls = limit_set(ta.wilke(), &trace_labelling(ta, g));
    let vals = ls
        .values
        .keys()
        .map(|&a| ta.closed(a, n))
        .chain(ls.open.keys().map(|&(s, k)| ta.open(s, k, n)))
        .collect::<Vec<_>>();
    Traces { values: ta.up_of(n, vals), undefined: ls.is_undefined() }
}

/// Product of a tree over `cl(S)`: the union of its trace upsets.
pub fn c_product(ta: &TaAlgebra, t: &RankedTree<UpSet<TaElem>>) -> Option<UpSet<TaElem>> {
    traces_finite(ta, t).product()
}

/// Which elements of `S` form the skeleton candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generators {
    pub s0: BTreeSet<usize>,
    pub s1: BTreeSet<usize>,
}

impl Generators {
    pub fn all(w: &WilkeAlgebra) -> Self {
        Generators { s0: (0..w.n0()).collect(), s1: (0..w.n1()).collect() }
    }

    pub fn contains(&self, v: TaValue) -> bool {
        match v {
            TaValue::Closed(a) => self.s0.contains(&a),
            TaValue::Open(b, _) => self.s1.contains(&b),
        }
    }

    /// Whether an upset is a finite meet of generators (`⊤` included).
    pub fn in_closure(&self, u: &UpSet<TaElem>) -> bool {
        u.minimals().iter().all(|m| self.contains(m.value))
    }

    /// The generators at arity `n`.
    pub fn elements(&self, ta: &TaAlgebra, n: usize) -> Vec<TaElem> {
        ta.elements(n).into_iter().filter(|e| self.contains(e.value)).collect()
    }
}

/// A random element of `cl(S)` at arity `n`: the meet of up to `k` generators,
/// `⊤` with small probability.
pub fn random_cl_label<R: Rng>(
    ta: &TaAlgebra,
    gens: &Generators,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Option<UpSet<TaElem>> {
    let pool = gens.elements(ta, n);
    if pool.is_empty() || rng.gen_bool(0.05) {
        return Some(UpSet::top(n));
    }
    let m = rng.gen_range(1..=k.max(1));
    Some(ta.up_of(n, (0..m).map(|_| pool[rng.gen_range(0..pool.len())].clone())))
}

/// `⟨cl(S)⟩ = cl(S)` on sampled trees: every defined product of a tree over
/// `cl(S)` is again a meet of generators.
pub fn cl_subalgebra_closure_check(ta: &TaAlgebra, gens: &Generators, cfg: &SamplerConfig) -> Report {
    let mut rep = Report::new("closure of cl(S) under products", SAMPLED);
    let arities: Vec<usize> = (0..=ta.max_arity()).collect();
    rep.push(run_law("products stay in cl(S)", cfg.samples, |i| {
        let mut rng = cfg.rng(i);
        let n = rng.gen_range(0..=ta.max_arity());
        let Ok(t) = random_tree_by(&arities, cfg.size, n, HoleMode::Affine, &mut rng, |r, k| {
            random_cl_label(ta, gens, k, 2, r)
        }) else {
            return Outcome::Skip;
        };
        match c_product(ta, &t) {
            Some(u) if !gens.in_closure(&u) => Outcome::Fail(Witness {
                input: t.to_string(),
                sides: vec![Side::new("π(t)", t.to_string(), u.to_string())],
            }),
            _ => Outcome::Pass,
        }
    }));
    rep
}
