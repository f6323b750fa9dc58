//! Finite ranked trees with numbered holes and the tree-monad operations
//! (`map`, `flatten`, `singleton`) together with shape utilities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Anything carrying an arity: symbols, algebra elements, set-valued labels.
pub trait Ranked {
    fn arity(&self) -> usize;
}

impl<T: Ranked> Ranked for &T {
    fn arity(&self) -> usize {
        (**self).arity()
    }
}

/// A path from the root; ordered shortlex, i.e. breadth-first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Address(Vec<usize>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        Address(p)
    }

    pub fn concat(&self, other: &Address) -> Self {
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0);
        Address(p)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// Parent address and the index of `self` below it.
    pub fn parent(&self) -> Option<(Address, usize)> {
        let (&last, init) = self.0.split_last()?;
        Some((Address(init.to_vec()), last))
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl From<Vec<usize>> for Address {
    fn from(v: Vec<usize>) -> Self {
        Address(v)
    }
}

impl PartialOrd for Address {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Address {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ">")
    }
}

/// A named symbol of fixed arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Symbol { name: Arc::from(name), arity }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl Ranked for Symbol {
    fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A finite ranked alphabet with a partial order on each arity slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedAlphabet {
    symbols: Vec<Symbol>,
    // leq[i][j]: symbols[i] <= symbols[j]
    leq: Vec<Vec<bool>>,
    // generating pairs as given, kept for printing
    generators: Vec<(usize, usize)>,
}

impl RankedAlphabet {
    /// Symbols are `(name, arity)`; `order` lists generating pairs `a <= b`
    /// whose reflexive-transitive closure is taken.
    pub fn new(symbols: &[(&str, usize)], order: &[(&str, &str)]) -> Result<Self> {
        let syms: Vec<Symbol> = symbols.iter().map(|(n, a)| Symbol::new(n, *a)).collect();
        Self::from_symbols(syms, order.iter().map(|(a, b)| (a.to_string(), b.to_string())))
    }

    pub fn from_symbols(
        symbols: Vec<Symbol>,
        order: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if !seen.insert(s.name().to_string()) {
                return Err(Error::Invalid(format!("symbol `{}` declared twice", s.name())));
            }
            if !is_symbol_token(s.name()) || is_hole_token(s.name()).is_some() {
                return Err(Error::Invalid(format!("`{}` is not a valid symbol name", s.name())));
            }
        }
        let n = symbols.len();
        let idx = |name: &str| {
            symbols
                .iter()
                .position(|s| s.name() == name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
        };
        let mut leq = vec![vec![false; n]; n];
        let mut generators = Vec::new();
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in order {
            let (i, j) = (idx(&a)?, idx(&b)?);
            if symbols[i].arity != symbols[j].arity {
                return Err(Error::MixedArityOrder(a, b));
            }
            leq[i][j] = true;
            generators.push((i, j));
        }
        transitive_closure(&mut leq);
        for i in 0..n {
            for j in 0..i {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotAntisymmetric(
                        symbols[j].name().to_string(),
                        symbols[i].name().to_string(),
                    ));
                }
            }
        }
        Ok(RankedAlphabet { symbols, leq, generators })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.iter().find(|s| s.name() == name)
    }

    pub fn of_arity(&self, n: usize) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(move |s| s.arity == n)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    pub fn leq(&self, a: &Symbol, b: &Symbol) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) => self.leq[i][j],
            _ => false,
        }
    }

    /// The declared generating pairs (for printing).
    pub fn order_generators(&self) -> impl Iterator<Item = (&Symbol, &Symbol)> {
        self.generators.iter().map(|&(i, j)| (&self.symbols[i], &self.symbols[j]))
    }

    fn position(&self, s: &Symbol) -> Option<usize> {
        self.symbols.iter().position(|t| t == s)
    }

    pub fn pool(&self) -> LabelPool<Symbol> {
        LabelPool::new(self.symbols.iter().cloned())
    }
}

pub(crate) fn transitive_closure(m: &mut [Vec<bool>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node<L> {
    Label(L),
    Hole(usize),
}

impl<L> Node<L> {
    pub fn label(&self) -> Option<&L> {
        match self {
            Node::Label(l) => Some(l),
            Node::Hole(_) => None,
        }
    }
}

/// An element of `T_n A`: a finite tree whose leaves may be holes `x_i`,
/// each index at most once and never at the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankedTree<L> {
    arity: usize,
    nodes: BTreeMap<Address, Node<L>>,
}

/// Nested construction syntax, mostly for tests and parsers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term<L> {
    App(L, Vec<Term<L>>),
    Hole(usize),
}

impl<L> Term<L> {
    pub fn leaf(l: L) -> Self {
        Term::App(l, Vec::new())
    }
}

impl<L: Ranked> RankedTree<L> {
    /// Validating constructor from an explicit address map.
    pub fn from_nodes(arity: usize, nodes: BTreeMap<Address, Node<L>>) -> Result<Self> {
        match nodes.get(&Address::root()) {
            None => return Err(Error::MalformedTree("no root".into())),
            Some(Node::Hole(_)) => return Err(Error::HoleAtRoot),
            Some(_) => {}
        }
        let mut holes = BTreeSet::new();
        for (addr, node) in &nodes {
            if let Some((parent, i)) = addr.parent() {
                match nodes.get(&parent) {
                    Some(Node::Label(l)) if i < l.arity() => {}
                    _ => return Err(Error::MalformedTree(format!("dangling node at {addr}"))),
                }
            }
            match node {
                Node::Hole(h) => {
                    if *h >= arity {
                        return Err(Error::HoleOutOfRange { index: *h, arity });
                    }
                    if !holes.insert(*h) {
                        return Err(Error::DuplicateHole(*h));
                    }
                }
                Node::Label(l) => {
                    for i in 0..l.arity() {
                        if !nodes.contains_key(&addr.child(i)) {
                            return Err(Error::MalformedTree(format!(
                                "node at {addr} is missing child {i}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(RankedTree { arity, nodes })
    }

    pub fn from_term(arity: usize, term: &Term<L>) -> Result<Self>
    where
        L: Clone,
    {
        fn go<L: Ranked + Clone>(
            t: &Term<L>,
            at: Address,
            out: &mut BTreeMap<Address, Node<L>>,
        ) -> Result<()> {
            match t {
                Term::Hole(i) => {
                    out.insert(at, Node::Hole(*i));
                }
                Term::App(l, kids) => {
                    if kids.len() != l.arity() {
                        return Err(Error::ArityMismatch {
                            symbol: format!("{at}"),
                            expected: l.arity(),
                            found: kids.len(),
                        });
                    }
                    for (i, k) in kids.iter().enumerate() {
                        go(k, at.child(i), out)?;
                    }
                    out.insert(at, Node::Label(l.clone()));
                }
            }
            Ok(())
        }
        let mut nodes = BTreeMap::new();
        go(term, Address::root(), &mut nodes)?;
        Self::from_nodes(arity, nodes)
    }

    /// `sing(a)`: root `a` above holes `x_0 … x_{n-1}`.
    pub fn singleton(a: L) -> Self {
        let n = a.arity();
        let mut nodes = BTreeMap::new();
        for i in 0..n {
            nodes.insert(Address::root().child(i), Node::Hole(i));
        }
        nodes.insert(Address::root(), Node::Label(a));
        RankedTree { arity: n, nodes }
    }

    /// One-node tree of a nullary label, at a chosen declared arity.
    pub fn leaf_in(arity: usize, a: L) -> Self {
        debug_assert_eq!(a.arity(), 0);
        let mut nodes = BTreeMap::new();
        nodes.insert(Address::root(), Node::Label(a));
        RankedTree { arity, nodes }
    }
}

impl<L> Ranked for RankedTree<L> {
    fn arity(&self) -> usize {
        self.arity
    }
}

impl<L> RankedTree<L> {
    pub fn declared_arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&Address, &Node<L>)> {
        self.nodes.iter()
    }

    pub fn get(&self, a: &Address) -> Option<&Node<L>> {
        self.nodes.get(a)
    }

    pub fn root_label(&self) -> &L {
        match &self.nodes[&Address::root()] {
            Node::Label(l) => l,
            Node::Hole(_) => unreachable!("validated trees have a labelled root"),
        }
    }

    /// Non-hole labels in breadth-first order.
    pub fn labels(&self) -> impl Iterator<Item = (&Address, &L)> {
        self.nodes.iter().filter_map(|(a, n)| n.label().map(|l| (a, l)))
    }

    /// Hole index → address.
    pub fn holes(&self) -> BTreeMap<usize, Address> {
        self.nodes
            .iter()
            .filter_map(|(a, n)| match n {
                Node::Hole(i) => Some((*i, a.clone())),
                Node::Label(_) => None,
            })
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.nodes.values().all(|n| matches!(n, Node::Label(_)))
    }

    pub fn depth(&self) -> usize {
        self.nodes.keys().map(Address::depth).max().unwrap_or(0)
    }

    /// Number of children of the node at `a` (0 for holes and absent nodes).
    pub fn child_count(&self, a: &Address) -> usize {
        let mut k = 0;
        while self.nodes.contains_key(&a.child(k)) {
            k += 1;
        }
        k
    }

    /// `Tf`: relabel every non-hole node; `None` as soon as `f` is undefined
    /// on one label. `f` must preserve arity.
    pub fn map<M>(&self, mut f: impl FnMut(&L) -> Option<M>) -> Option<RankedTree<M>> {
        let mut nodes = BTreeMap::new();
        for (a, n) in &self.nodes {
            let m = match n {
                Node::Hole(i) => Node::Hole(*i),
                Node::Label(l) => Node::Label(f(l)?),
            };
            nodes.insert(a.clone(), m);
        }
        Some(RankedTree { arity: self.arity, nodes })
    }

    /// Total relabelling.
    pub fn map_total<M>(&self, mut f: impl FnMut(&L) -> M) -> RankedTree<M> {
        self.map(|l| Some(f(l))).expect("total map")
    }

    /// Renumber holes by `f` and re-declare the arity. The caller guarantees
    /// the result is valid (injective `f` into `0..arity`).
    pub fn renumber_holes(&self, arity: usize, f: impl Fn(usize) -> usize) -> RankedTree<L>
    where
        L: Clone,
    {
        let nodes = self
            .nodes
            .iter()
            .map(|(a, n)| {
                let n = match n {
                    Node::Hole(i) => Node::Hole(f(*i)),
                    Node::Label(l) => Node::Label(l.clone()),
                };
                (a.clone(), n)
            })
            .collect();
        RankedTree { arity, nodes }
    }

    /// Same tree with a different declared arity (must cover every hole).
    pub fn with_arity(&self, arity: usize) -> RankedTree<L>
    where
        L: Clone,
    {
        debug_assert!(self.holes().keys().all(|&i| i < arity));
        RankedTree { arity, nodes: self.nodes.clone() }
    }

    /// The subtree at `a`, holes kept with their indices.
    pub fn subtree(&self, a: &Address) -> RankedTree<L>
    where
        L: Clone,
    {
        let nodes = self
            .nodes
            .range(a.clone()..)
            .filter(|(b, _)| a.is_prefix_of(b))
            .map(|(b, n)| (Address(b.0[a.depth()..].to_vec()), n.clone()))
            .collect();
        RankedTree { arity: self.arity, nodes }
    }

    pub fn to_term(&self) -> Term<L>
    where
        L: Clone,
    {
        fn go<L: Clone>(t: &RankedTree<L>, a: Address) -> Term<L> {
            match &t.nodes[&a] {
                Node::Hole(i) => Term::Hole(*i),
                Node::Label(l) => {
                    let k = t.child_count(&a);
                    Term::App(l.clone(), (0..k).map(|i| go(t, a.child(i))).collect())
                }
            }
        }
        go(self, Address::root())
    }

    /// Root-to-leaf branches, each given by the address of its leaf.
    pub fn branches(&self) -> Vec<Address> {
        self.nodes
            .keys()
            .filter(|a| !self.nodes.contains_key(&a.child(0)))
            .cloned()
            .collect()
    }
}

impl<L: Clone> RankedTree<RankedTree<L>> {
    /// `flat`: substitute each node's tree for it, routing hole `x_i` of an
    /// inner tree to the `i`-th child of its node. Subtrees below holes that
    /// an inner tree does not use are discarded.
    pub fn flatten(&self) -> RankedTree<L> {
        fn go<L: Clone>(
            outer: &RankedTree<RankedTree<L>>,
            at: &Address,
            prefix: &Address,
            out: &mut BTreeMap<Address, Node<L>>,
        ) {
            match &outer.nodes[at] {
                Node::Hole(j) => {
                    out.insert(prefix.clone(), Node::Hole(*j));
                }
                Node::Label(inner) => {
                    for (a, n) in &inner.nodes {
                        let here = prefix.concat(a);
                        match n {
                            Node::Label(l) => {
                                out.insert(here, Node::Label(l.clone()));
                            }
                            Node::Hole(i) => go(outer, &at.child(*i), &here, out),
                        }
                    }
                }
            }
        }
        let mut nodes = BTreeMap::new();
        go(self, &Address::root(), &Address::root(), &mut nodes);
        RankedTree { arity: self.arity, nodes }
    }
}

/// Equal domains and identically numbered holes.
pub fn same_shape<A, B>(s: &RankedTree<A>, t: &RankedTree<B>) -> bool {
    s.arity == t.arity
        && s.nodes.len() == t.nodes.len()
        && s.nodes.iter().zip(&t.nodes).all(|((a, m), (b, n))| {
            a == b
                && match (m, n) {
                    (Node::Hole(i), Node::Hole(j)) => i == j,
                    (Node::Label(_), Node::Label(_)) => true,
                    _ => false,
                }
        })
}

/// `s θ^T t`: same shape and `θ` holds label-wise.
pub fn lift_relation<A, B>(
    theta: impl Fn(&A, &B) -> bool,
    s: &RankedTree<A>,
    t: &RankedTree<B>,
) -> bool {
    same_shape(s, t)
        && s.labels().zip(t.labels()).all(|((_, a), (_, b))| theta(a, b))
}

impl<L: fmt::Display> fmt::Display for RankedTree<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go<L: fmt::Display>(
            t: &RankedTree<L>,
            a: &Address,
            f: &mut fmt::Formatter<'_>,
        ) -> fmt::Result {
            match &t.nodes[a] {
                Node::Hole(i) => write!(f, "x{i}"),
                Node::Label(l) => {
                    write!(f, "{l}")?;
                    let k = t.child_count(a);
                    if k > 0 {
                        write!(f, "(")?;
                        for i in 0..k {
                            if i > 0 {
                                write!(f, ",")?;
                            }
                            go(t, &a.child(i), f)?;
                        }
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, &Address::root(), f)
    }
}

/// All sections `s ∈^T t` of a set-labelled tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sections<L> {
    pub trees: Vec<RankedTree<L>>,
    /// Set when some label was empty, which is why `trees` is empty.
    pub empty_label: bool,
}

/// Iterates the sections of a tree whose labels expand to finite option lists.
/// Order: odometer over labelled nodes in breadth-first order, last node fastest.
pub struct SectionIter<L> {
    arity: usize,
    holes: Vec<(Address, usize)>,
    slots: Vec<(Address, Vec<L>)>,
    counter: Vec<usize>,
    done: bool,
}

impl<L: Clone> SectionIter<L> {
    pub fn new<S>(t: &RankedTree<S>, mut options: impl FnMut(&S) -> Vec<L>) -> Self {
        let mut holes = Vec::new();
        let mut slots = Vec::new();
        for (a, n) in &t.nodes {
            match n {
                Node::Hole(i) => holes.push((a.clone(), *i)),
                Node::Label(l) => slots.push((a.clone(), options(l))),
            }
        }
        let done = slots.iter().any(|(_, o)| o.is_empty());
        let counter = vec![0; slots.len()];
        SectionIter { arity: t.arity, holes, slots, counter, done }
    }

    pub fn has_empty_label(&self) -> bool {
        self.slots.iter().any(|(_, o)| o.is_empty())
    }

    /// Number of sections (saturating).
    pub fn count_hint(&self) -> usize {
        self.slots.iter().fold(1usize, |acc, (_, o)| acc.saturating_mul(o.len()))
    }
}

impl<L: Clone> Iterator for SectionIter<L> {
    type Item = RankedTree<L>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut nodes = BTreeMap::new();
        for (a, i) in &self.holes {
            nodes.insert(a.clone(), Node::Hole(*i));
        }
        for ((a, opts), &c) in self.slots.iter().zip(&self.counter) {
            nodes.insert(a.clone(), Node::Label(opts[c].clone()));
        }
        let mut k = self.slots.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.counter[k] += 1;
            if self.counter[k] < self.slots[k].1.len() {
                break;
            }
            self.counter[k] = 0;
        }
        Some(RankedTree { arity: self.arity, nodes })
    }
}

pub fn enumerate_sections<S, L: Clone>(
    t: &RankedTree<S>,
    options: impl FnMut(&S) -> Vec<L>,
) -> Sections<L> {
    let it = SectionIter::new(t, options);
    let empty_label = it.has_empty_label();
    Sections { trees: it.collect(), empty_label }
}

/// Labels grouped by arity, the raw material of random generators.
#[derive(Clone, Debug)]
pub struct LabelPool<L> {
    by_arity: Vec<Vec<L>>,
}

impl<L: Ranked + Clone> LabelPool<L> {
    pub fn new(labels: impl IntoIterator<Item = L>) -> Self {
        let mut by_arity: Vec<Vec<L>> = Vec::new();
        for l in labels {
            let k = l.arity();
            if by_arity.len() <= k {
                by_arity.resize_with(k + 1, Vec::new);
            }
            by_arity[k].push(l);
        }
        LabelPool { by_arity }
    }

    pub fn of_arity(&self, k: usize) -> &[L] {
        self.by_arity.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn max_arity(&self) -> usize {
        self.by_arity.len().saturating_sub(1)
    }

    pub fn all(&self) -> impl Iterator<Item = &L> {
        self.by_arity.iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.by_arity.iter().all(Vec::is_empty)
    }

    /// Restrict to labels satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&L) -> bool) -> Self {
        LabelPool {
            by_arity: self
                .by_arity
                .iter()
                .map(|v| v.iter().filter(|l| keep(l)).cloned().collect())
                .collect(),
        }
    }
}

/// How holes are placed by the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HoleMode {
    /// Each hole at most once (the general case of `T_n`).
    #[default]
    Affine,
    /// Every hole exactly once.
    Linear,
}

const GEN_RETRIES: usize = 64;

/// Random tree in `T_arity` with at most `size_bound` nodes.
pub fn random_tree_in<L: Ranked + Clone, R: Rng>(
    pool: &LabelPool<L>,
    size_bound: usize,
    arity: usize,
    mode: HoleMode,
    rng: &mut R,
) -> Result<RankedTree<L>> {
    if size_bound == 0 {
        return Err(Error::Generator("size bound must be at least 1".into()));
    }
    for _ in 0..GEN_RETRIES {
        let mut free: Vec<usize> = (0..arity).collect();
        let mut nodes = BTreeMap::new();
        if grow(pool, rng, Address::root(), size_bound, mode, &mut free, &mut nodes)
            && (mode == HoleMode::Affine || free.is_empty())
        {
            return Ok(RankedTree { arity, nodes });
        }
    }
    Err(Error::Generator(format!(
        "no tree in T_{arity} of size <= {size_bound} from the given labels"
    )))
}

fn grow<L: Ranked + Clone, R: Rng>(
    pool: &LabelPool<L>,
    rng: &mut R,
    at: Address,
    budget: usize,
    mode: HoleMode,
    free: &mut Vec<usize>,
    out: &mut BTreeMap<Address, Node<L>>,
) -> bool {
    let inner: Vec<&L> = (1..budget.min(pool.by_arity.len()))
        .flat_map(|k| pool.of_arity(k))
        .collect();
    let nullary = pool.of_arity(0);
    let can_hole = !at.is_root() && !free.is_empty();
    let linear = mode == HoleMode::Linear;
    let go_inner = !inner.is_empty()
        && ((nullary.is_empty() && !can_hole) || (linear && free.len() > 1) || rng.gen_bool(0.55));
    if go_inner {
        let l = inner[rng.gen_range(0..inner.len())].clone();
        let k = l.arity();
        let mut shares = vec![1; k];
        for _ in 0..budget - 1 - k {
            shares[rng.gen_range(0..k)] += 1;
        }
        out.insert(at.clone(), Node::Label(l));
        for (i, b) in shares.into_iter().enumerate() {
            if !grow(pool, rng, at.child(i), b, mode, free, out) {
                return false;
            }
        }
        return true;
    }
    let want_hole = can_hole && (nullary.is_empty() || linear || rng.gen_bool(0.5));
    if want_hole {
        let i = free.swap_remove(rng.gen_range(0..free.len()));
        out.insert(at, Node::Hole(i));
        true
    } else if !nullary.is_empty() {
        out.insert(at, Node::Label(nullary[rng.gen_range(0..nullary.len())].clone()));
        true
    } else {
        false
    }
}

/// A bare node of a given arity: the label of a tree shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Slot(pub usize);

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Every tree shape in `T_arity` with node arities from `arities` and at most
/// `size_bound` nodes.
pub fn enumerate_shapes(arities: &[usize], size_bound: usize, arity: usize) -> Vec<RankedTree<Slot>> {
    enumerate_trees(&LabelPool::new(arities.iter().map(|&k| Slot(k))), size_bound, arity)
}

impl Ranked for Slot {
    fn arity(&self) -> usize {
        self.0
    }
}

/// Random tree whose node labels are drawn on demand: `arities` lists the
/// arities that may occur and `label(rng, k)` produces a label of arity `k`
/// (or gives up).
pub fn random_tree_by<L, R: Rng>(
    arities: &[usize],
    size_bound: usize,
    arity: usize,
    mode: HoleMode,
    rng: &mut R,
    mut label: impl FnMut(&mut R, usize) -> Option<L>,
) -> Result<RankedTree<L>> {
    let pool = LabelPool::new(arities.iter().map(|&k| Slot(k)));
    let shape = random_tree_in(&pool, size_bound, arity, mode, rng)?;
    let mut nodes = BTreeMap::new();
    for (a, n) in shape.nodes {
        let n = match n {
            Node::Hole(i) => Node::Hole(i),
            Node::Label(Slot(k)) => Node::Label(
                label(rng, k).ok_or_else(|| Error::Generator(format!("no label of arity {k}")))?,
            ),
        };
        nodes.insert(a, n);
    }
    Ok(RankedTree { arity, nodes })
}

/// Deterministic random tree over an alphabet (affine holes).
pub fn random_tree(
    alphabet: &RankedAlphabet,
    size_bound: usize,
    arity: usize,
    seed: u64,
) -> Result<RankedTree<Symbol>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree_in(&alphabet.pool(), size_bound, arity, HoleMode::Affine, &mut rng)
}

/// All trees in `T_arity` over `pool` with at most `size_bound` nodes, in a
/// deterministic order. Holes are placed affinely.
pub fn enumerate_trees<L: Ranked + Clone + Ord>(
    pool: &LabelPool<L>,
    size_bound: usize,
    arity: usize,
) -> Vec<RankedTree<L>> {
    // terms with their hole sets; a hole set is a bitmask
    fn terms<L: Ranked + Clone>(
        pool: &LabelPool<L>,
        budget: usize,
        arity: usize,
        root: bool,
    ) -> Vec<(Term<L>, u64, usize)> {
        let mut out = Vec::new();
        if budget == 0 {
            return out;
        }
        if !root {
            for i in 0..arity {
                out.push((Term::Hole(i), 1u64 << i, 1));
            }
        }
        for l in pool.of_arity(0) {
            out.push((Term::leaf(l.clone()), 0, 1));
        }
        for k in 1..=pool.max_arity() {
            if k + 1 > budget {
                break;
            }
            for l in pool.of_arity(k) {
                // children assembled left to right with disjoint hole masks
                let mut partial: Vec<(Vec<Term<L>>, u64, usize)> = vec![(Vec::new(), 0, 1)];
                for i in 0..k {
                    let mut next = Vec::new();
                    for (kids, mask, used) in &partial {
                        let left = k - i - 1;
                        if budget < used + 1 + left {
                            continue;
                        }
                        let room = budget - used - left;
                        for (c, cm, cs) in terms(pool, room, arity, false) {
                            if cm & mask == 0 {
                                let mut ks = kids.clone();
                                ks.push(c);
                                next.push((ks, mask | cm, used + cs));
                            }
                        }
                    }
                    partial = next;
                }
                for (kids, mask, used) in partial {
                    out.push((Term::App(l.clone(), kids), mask, used));
                }
            }
        }
        out
    }
    let mut trees: Vec<RankedTree<L>> = terms(pool, size_bound, arity, true)
        .into_iter()
        .map(|(t, _, _)| RankedTree::from_term(arity, &t).expect("generated terms are valid"))
        .collect();
    trees.sort();
    trees.dedup();
    trees
}

/// All closed trees over `pool` of depth at most `depth` (the root has depth
/// 0), sorted.
pub fn enumerate_closed_by_depth<L: Ranked + Clone + Ord>(pool: &LabelPool<L>, depth: usize) -> Vec<RankedTree<L>> {
    fn terms<L: Ranked + Clone>(pool: &LabelPool<L>, depth: usize) -> Vec<Term<L>> {
        let mut out: Vec<Term<L>> = pool.of_arity(0).iter().map(|l| Term::leaf(l.clone())).collect();
        if depth == 0 {
            return out;
        }
        let below = terms(pool, depth - 1);
        for k in 1..=pool.max_arity() {
            for l in pool.of_arity(k) {
                let mut partial: Vec<Vec<Term<L>>> = vec![Vec::new()];
                for _ in 0..k {
                    partial = partial
                        .into_iter()
                        .flat_map(|kids| {
                            below.iter().map(move |c| {
                                let mut ks = kids.clone();
                                ks.push(c.clone());
                                ks
                            })
                        })
                        .collect();
                }
                out.extend(partial.into_iter().map(|kids| Term::App(l.clone(), kids)));
            }
        }
        out
    }
    let mut trees: Vec<RankedTree<L>> = terms(pool, depth)
        .iter()
        .map(|t| RankedTree::from_term(0, t).expect("closed terms are valid"))
        .collect();
    trees.sort();
    trees.dedup();
    trees
}

pub(crate) fn is_symbol_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || "(),=;".contains(c))
}

/// `Some(i)` iff the token is a hole `x<i>`.
pub(crate) fn is_hole_token(s: &str) -> Option<usize> {
    let digits = s.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses `term := symbol | symbol '(' term {',' term} ')' | 'x' index`,
/// resolving symbol tokens with `resolve`. The declared arity is one more than
/// the largest hole index unless `arity` overrides it.
pub fn parse_term_with<L: Ranked + Clone>(
    text: &str,
    arity: Option<usize>,
    resolve: impl Fn(&str) -> Option<L>,
) -> Result<RankedTree<L>> {
    struct P<'a> {
        s: &'a str,
        pos: usize,
    }
    impl P<'_> {
        fn skip_ws(&mut self) {
            while let Some(c) = self.s[self.pos..].chars().next() {
                if c.is_whitespace() {
                    self.pos += c.len_utf8();
                } else {
                    break;
                }
            }
        }
        fn peek(&mut self) -> Option<char> {
            self.skip_ws();
            self.s[self.pos..].chars().next()
        }
        fn token(&mut self) -> Result<(usize, &str)> {
            self.skip_ws();
            let start = self.pos;
            while let Some(c) = self.s[self.pos..].chars().next() {
                if c.is_whitespace() || "(),".contains(c) {
                    break;
                }
                self.pos += c.len_utf8();
            }
            if start == self.pos {
                return Err(Error::Syntax { offset: start, msg: "expected a symbol or hole".into() });
            }
            Ok((start, &self.s[start..self.pos]))
        }
    }
    fn term<L: Ranked + Clone>(
        p: &mut P<'_>,
        resolve: &dyn Fn(&str) -> Option<L>,
    ) -> Result<Term<L>> {
        let (_, tok) = p.token()?;
        if let Some(i) = is_hole_token(tok) {
            return Ok(Term::Hole(i));
        }
        let tok = tok.to_string();
        let l = resolve(&tok).ok_or_else(|| Error::UnknownSymbol(tok.clone()))?;
        let mut kids = Vec::new();
        if p.peek() == Some('(') {
            p.pos += 1;
            loop {
                kids.push(term(p, resolve)?);
                match p.peek() {
                    Some(',') => p.pos += 1,
                    Some(')') => {
                        p.pos += 1;
                        break;
                    }
                    _ => {
                        return Err(Error::Syntax { offset: p.pos, msg: "expected `,` or `)`".into() })
                    }
                }
            }
        }
        if kids.len() != l.arity() {
            return Err(Error::ArityMismatch { symbol: tok, expected: l.arity(), found: kids.len() });
        }
        Ok(Term::App(l, kids))
    }
    let mut p = P { s: text, pos: 0 };
    let t = term(&mut p, &resolve)?;
    if p.peek().is_some() {
        return Err(Error::Syntax { offset: p.pos, msg: "trailing input".into() });
    }
    if matches!(t, Term::Hole(_)) {
        return Err(Error::HoleAtRoot);
    }
    let mut seen = BTreeSet::new();
    fn holes<L>(t: &Term<L>, seen: &mut BTreeSet<usize>) -> Result<()> {
        match t {
            Term::Hole(i) => {
                if !seen.insert(*i) {
                    return Err(Error::DuplicateHole(*i));
                }
            }
            Term::App(_, ks) => {
                for k in ks {
                    holes(k, seen)?;
                }
            }
        }
        Ok(())
    }
    holes(&t, &mut seen)?;
    let needed = seen.iter().next_back().map_or(0, |m| m + 1);
    let arity = match arity {
        Some(a) if a < needed => return Err(Error::HoleOutOfRange { index: needed - 1, arity: a }),
        Some(a) => a,
        None => needed,
    };
    RankedTree::from_term(arity, &t)
}

pub fn parse_term(text: &str, alphabet: &RankedAlphabet) -> Result<RankedTree<Symbol>> {
    parse_term_with(text, None, |s| alphabet.symbol(s).cloned())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> RankedAlphabet {
        RankedAlphabet::new(&[("a", 2), ("b", 0), ("c", 0), ("f", 1)], &[("b", "c")]).unwrap()
    }

    #[test]
    fn parse_denotes_tree() {
        let t = parse_term("a(b,x0)", &abc()).unwrap();
        assert_eq!(t.size(), 3);
        assert_eq!(t.declared_arity(), 1);
        assert_eq!(t.get(&Address::from(vec![1])), Some(&Node::Hole(0)));
        assert_eq!(t.to_string(), "a(b,x0)");
    }

    #[test]
    fn parse_errors() {
        let al = abc();
        assert_eq!(parse_term("a(x0,x0)", &al), Err(Error::DuplicateHole(0)));
        assert_eq!(parse_term("x0", &al), Err(Error::HoleAtRoot));
        assert!(matches!(parse_term("a(b)", &al), Err(Error::ArityMismatch { .. })));
        assert!(matches!(parse_term("q", &al), Err(Error::UnknownSymbol(_))));
        assert!(matches!(parse_term("a(b,c) b", &al), Err(Error::Syntax { .. })));
    }

    #[test]
    fn alphabet_order_checks() {
        assert!(matches!(
            RankedAlphabet::new(&[("a", 2), ("b", 0)], &[("a", "b")]),
            Err(Error::MixedArityOrder(..))
        ));
        assert!(matches!(
            RankedAlphabet::new(&[("b", 0), ("c", 0)], &[("b", "c"), ("c", "b")]),
            Err(Error::NotAntisymmetric(..))
        ));
        let al = RankedAlphabet::new(&[("b", 0), ("c", 0), ("d", 0)], &[("b", "c"), ("c", "d")])
            .unwrap();
        let s = |n| al.symbol(n).unwrap().clone();
        assert!(al.leq(&s("b"), &s("d")));
        assert!(!al.leq(&s("d"), &s("b")));
    }

    #[test]
    fn singleton_shape() {
        let t = RankedTree::singleton(Symbol::new("a", 2));
        assert_eq!(t.size(), 3);
        assert_eq!(t.holes().len(), 2);
        let leaf = RankedTree::singleton(Symbol::new("b", 0));
        assert_eq!(leaf.size(), 1);
    }

    #[test]
    fn flatten_substitutes_at_holes() {
        let al = abc();
        let s = parse_term("a(x0,x1)", &al).unwrap();
        let u0 = parse_term("f(b)", &al).unwrap().with_arity(0);
        let u1 = parse_term("c", &al).unwrap();
        let mut nodes = BTreeMap::new();
        nodes.insert(Address::root(), Node::Label(s));
        nodes.insert(Address::from(vec![0]), Node::Label(u0));
        nodes.insert(Address::from(vec![1]), Node::Label(u1));
        let tt = RankedTree { arity: 0, nodes };
        assert_eq!(tt.flatten().to_string(), "a(f(b),c)");
    }

    #[test]
    fn flatten_discards_unused_arguments() {
        // the inner tree ignores hole x0, so the first child disappears
        let al = abc();
        let inner = parse_term_with("f(x1)", Some(2), |s| al.symbol(s).cloned()).unwrap();
        let outer = RankedTree::from_term(
            1,
            &Term::App(
                inner,
                vec![Term::leaf(parse_term("b", &al).unwrap()), Term::Hole(0)],
            ),
        )
        .unwrap();
        let flat = outer.flatten();
        assert_eq!(flat.to_string(), "f(x0)");
        assert_eq!(flat.declared_arity(), 1);
    }

    #[test]
    fn sections_count_and_order() {
        #[derive(Clone)]
        struct Set(usize, Vec<&'static str>);
        impl Ranked for Set {
            fn arity(&self) -> usize {
                self.0
            }
        }
        let t = RankedTree::from_term(
            0,
            &Term::App(Set(1, vec!["a", "b"]), vec![Term::leaf(Set(0, vec!["c"]))]),
        )
        .unwrap();
        let secs = enumerate_sections(&t, |s| {
            s.1.iter().map(|n| Symbol::new(n, s.0)).collect::<Vec<_>>()
        });
        assert_eq!(secs.trees.len(), 2);
        assert!(!secs.empty_label);
        assert_eq!(secs.trees[0].to_string(), "a(c)");
        assert_eq!(secs.trees[1].to_string(), "b(c)");
        let e = RankedTree::from_term(0, &Term::leaf(Set(0, vec![]))).unwrap();
        let secs = enumerate_sections(&e, |s| s.1.clone());
        assert!(secs.trees.is_empty() && secs.empty_label);
    }

    #[test]
    fn branches_are_leaves() {
        let al = abc();
        assert_eq!(parse_term("b", &al).unwrap().branches(), vec![Address::root()]);
        let t = parse_term("a(b,c)", &al).unwrap();
        assert_eq!(t.branches(), vec![Address::from(vec![0]), Address::from(vec![1])]);
    }

    #[test]
    fn random_tree_is_deterministic_and_valid() {
        let al = abc();
        for seed in 0..200 {
            let t = random_tree(&al, 8, 2, seed).unwrap();
            assert_eq!(t, random_tree(&al, 8, 2, seed).unwrap());
            assert!(t.size() <= 8);
            RankedTree::from_nodes(t.declared_arity(), t.nodes.clone()).unwrap();
        }
        let unary = RankedAlphabet::new(&[("f", 1)], &[]).unwrap();
        assert!(random_tree(&unary, 4, 0, 1).is_err());
    }

    #[test]
    fn linear_mode_uses_every_hole() {
        let al = abc();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let t = random_tree_in(&al.pool(), 8, 3, HoleMode::Linear, &mut rng).unwrap();
            assert_eq!(t.holes().len(), 3);
        }
    }

    #[test]
    fn enumerate_trees_small() {
        let al = RankedAlphabet::new(&[("f", 1), ("b", 0)], &[]).unwrap();
        // b, f(b), f(f(b)) closed; with one hole also f(x0), f(f(x0))
        assert_eq!(enumerate_trees(&al.pool(), 3, 0).len(), 3);
        assert_eq!(enumerate_trees(&al.pool(), 3, 1).len(), 5);
    }
}
