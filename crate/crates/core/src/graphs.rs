//! Finite rooted graphs with ordered successors, read as regular trees via
//! their unravelling.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use rand::Rng;

use crate::algebra::Pair;
use crate::error::{Error, Result};
use crate::tree::{Address, LabelPool, Node, Ranked, RankedTree, Term};

/// A graph representation of a tree in `T_n A` (possibly infinite).
///
/// Every vertex is reachable from the root, a labelled vertex has exactly
/// `arity(label)` successors, holes have none, and each hole vertex is reached
/// by exactly one path from the root, so the unravelling keeps every hole
/// index at most once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeGraph<L> {
    arity: usize,
    root: usize,
    nodes: Vec<Node<L>>,
    succ: Vec<Vec<usize>>,
}

impl<L: Ranked> TreeGraph<L> {
    /// Validates and prunes unreachable vertices (keeping the relative order
    /// of the others).
    pub fn new(arity: usize, root: usize, nodes: Vec<Node<L>>, succ: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_pruning(arity, root, nodes, succ).map(|(g, _)| g)
    }

    /// As [`TreeGraph::new`], also returning the original index of each kept
    /// vertex.
    pub fn with_pruning(
        arity: usize,
        root: usize,
        nodes: Vec<Node<L>>,
        succ: Vec<Vec<usize>>,
    ) -> Result<(Self, Vec<usize>)> {
        let n = nodes.len();
        let bad = |m: String| Err(Error::MalformedGraph(m));
        if succ.len() != n {
            return bad(format!("{} vertices but {} successor lists", n, succ.len()));
        }
        if root >= n {
            return bad(format!("root {root} out of range"));
        }
        if let Node::Hole(_) = nodes[root] {
            return Err(Error::HoleAtRoot);
        }
        for (v, (node, out)) in nodes.iter().zip(&succ).enumerate() {
            let want = match node {
                Node::Label(l) => l.arity(),
                Node::Hole(_) => 0,
            };
            if out.len() != want {
                return bad(format!("vertex {v} needs {want} successors, has {}", out.len()));
            }
            if let Some(&w) = out.iter().find(|&&w| w >= n) {
                return bad(format!("vertex {v} points to missing vertex {w}"));
            }
        }
        let mut kept = bfs_order(root, &succ);
        kept.sort_unstable();
        let mut renum = vec![usize::MAX; n];
        for (i, &v) in kept.iter().enumerate() {
            renum[v] = i;
        }
        let mut slots: Vec<Option<Node<L>>> = nodes.into_iter().map(Some).collect();
        let nodes: Vec<Node<L>> = kept.iter().map(|&v| slots[v].take().expect("once")).collect();
        let succ: Vec<Vec<usize>> =
            kept.iter().map(|&v| succ[v].iter().map(|&w| renum[w]).collect()).collect();
        let g = TreeGraph { arity, root: renum[root], nodes, succ };
        g.check_holes()?;
        Ok((g, kept))
    }

    fn check_holes(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (v, node) in self.nodes.iter().enumerate() {
            if let Node::Hole(i) = node {
                if *i >= self.arity {
                    return Err(Error::HoleOutOfRange { index: *i, arity: self.arity });
                }
                if seen.insert(*i, v).is_some() {
                    return Err(Error::DuplicateHole(*i));
                }
            }
        }
        if seen.is_empty() {
            return Ok(());
        }
        // number of root paths per vertex, capped at 2
        let n = self.nodes.len();
        let mut count = vec![0u8; n];
        count[self.root] = 1;
        loop {
            let mut next = vec![0u8; n];
            next[self.root] = 1;
            for v in 0..n {
                for &w in &self.succ[v] {
                    next[w] = (next[w] + count[v]).min(2);
                }
            }
            if next == count {
                break;
            }
            count = next;
        }
        for (&i, &v) in &seen {
            if count[v] != 1 {
                return Err(Error::MalformedGraph(format!(
                    "hole x{i} is reached by more than one path"
                )));
            }
        }
        Ok(())
    }

    /// The graph of a finite tree: one vertex per node.
    pub fn from_tree(t: &RankedTree<L>) -> Self
    where
        L: Clone,
    {
        let addrs: Vec<&Address> = t.nodes().map(|(a, _)| a).collect();
        let index: HashMap<&Address, usize> = addrs.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let mut nodes = Vec::new();
        let mut succ = Vec::new();
        for (a, n) in t.nodes() {
            nodes.push(n.clone());
            let k = t.child_count(a);
            succ.push((0..k).map(|i| index[&a.child(i)]).collect());
        }
        TreeGraph { arity: t.declared_arity(), root: 0, nodes, succ }
    }
}

fn bfs_order(root: usize, succ: &[Vec<usize>]) -> Vec<usize> {
    let mut seen = vec![false; succ.len()];
    let mut order = vec![root];
    seen[root] = true;
    let mut i = 0;
    while i < order.len() {
        for &w in &succ[order[i]] {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
        i += 1;
    }
    order
}

impl<L> TreeGraph<L> {
    pub fn declared_arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, v: usize) -> &Node<L> {
        &self.nodes[v]
    }

    pub fn succ(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn nodes(&self) -> &[Node<L>] {
        &self.nodes
    }

    pub fn is_closed(&self) -> bool {
        self.nodes.iter().all(|n| matches!(n, Node::Label(_)))
    }

    /// Hole index → vertex.
    pub fn holes(&self) -> BTreeMap<usize, usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(v, n)| match n {
                Node::Hole(i) => Some((*i, v)),
                Node::Label(_) => None,
            })
            .collect()
    }

    /// Whether some cycle is reachable, i.e. the unravelling is infinite.
    pub fn is_cyclic(&self) -> bool {
        // vertices are all reachable; look for a back edge
        fn dfs(g: &[Vec<usize>], v: usize, state: &mut [u8]) -> bool {
            state[v] = 1;
            for &w in &g[v] {
                if state[w] == 1 || (state[w] == 0 && dfs(g, w, state)) {
                    return true;
                }
            }
            state[v] = 2;
            false
        }
        let mut state = vec![0u8; self.nodes.len()];
        dfs(&self.succ, self.root, &mut state)
    }

    /// Relabel every vertex; `f` must preserve arity.
    pub fn map<M>(&self, mut f: impl FnMut(&L) -> M) -> TreeGraph<M> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Label(l) => Node::Label(f(l)),
                Node::Hole(i) => Node::Hole(*i),
            })
            .collect();
        TreeGraph { arity: self.arity, root: self.root, nodes, succ: self.succ.clone() }
    }

    pub fn try_map<M, E>(&self, mut f: impl FnMut(&L) -> std::result::Result<M, E>) -> std::result::Result<TreeGraph<M>, E> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Label(l) => f(l).map(Node::Label),
                Node::Hole(i) => Ok(Node::Hole(*i)),
            })
            .collect::<std::result::Result<_, E>>()?;
        Ok(TreeGraph { arity: self.arity, root: self.root, nodes, succ: self.succ.clone() })
    }

    /// Unravelling down to `depth` (the root is at depth 0); nodes below it
    /// become [`Window::Cut`].
    pub fn unravel_prefix(&self, depth: usize) -> RankedTree<Window<L>>
    where
        L: Ranked + Clone,
    {
        fn go<L: Clone>(g: &TreeGraph<L>, v: usize, d: usize) -> Term<Window<L>> {
            match &g.nodes[v] {
                Node::Hole(i) => Term::Hole(*i),
                Node::Label(_) if d == 0 => Term::leaf(Window::Cut),
                Node::Label(l) => Term::App(
                    Window::Sym(l.clone()),
                    g.succ[v].iter().map(|&w| go(g, w, d - 1)).collect(),
                ),
            }
        }
        let t = go(self, self.root, depth + 1);
        RankedTree::from_term(self.arity, &t).expect("unravelling of a valid graph")
    }

    /// The unravelling when it is finite.
    pub fn unravel_finite(&self) -> Option<RankedTree<L>>
    where
        L: Ranked + Clone,
    {
        if self.is_cyclic() {
            return None;
        }
        let w = self.unravel_prefix(self.nodes.len());
        w.map(|x| match x {
            Window::Sym(l) => Some(l.clone()),
            Window::Cut => None,
        })
    }

    /// Bisimulation quotient, renumbered breadth-first from the root.
    pub fn canonical(&self) -> TreeGraph<L>
    where
        L: Clone + Ord,
    {
        let n = self.nodes.len();
        let mut class: Vec<usize> = {
            let mut keys: Vec<&Node<L>> = self.nodes.iter().collect();
            keys.sort();
            keys.dedup();
            self.nodes.iter().map(|x| keys.binary_search(&x).expect("present")).collect()
        };
        loop {
            let sig: Vec<(usize, Vec<usize>)> = (0..n)
                .map(|v| (class[v], self.succ[v].iter().map(|&w| class[w]).collect()))
                .collect();
            let mut keys = sig.clone();
            keys.sort();
            keys.dedup();
            let next: Vec<usize> = sig.iter().map(|s| keys.binary_search(s).expect("present")).collect();
            // signatures include the old class, so refinement only splits
            let stable = keys.len() == class.iter().max().map_or(0, |m| m + 1);
            class = next;
            if stable {
                break;
            }
        }
        // breadth-first over classes
        let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
        for v in (0..n).rev() {
            rep.insert(class[v], v);
        }
        let csucc: Vec<Vec<usize>> = (0..n).map(|v| self.succ[v].iter().map(|&w| class[w]).collect()).collect();
        let mut order = vec![class[self.root]];
        let mut number = BTreeMap::from([(class[self.root], 0usize)]);
        let mut i = 0;
        while i < order.len() {
            let v = rep[&order[i]];
            for &c in &csucc[v] {
                if !number.contains_key(&c) {
                    number.insert(c, order.len());
                    order.push(c);
                }
            }
            i += 1;
        }
        let nodes = order.iter().map(|c| self.nodes[rep[c]].clone()).collect();
        let succ = order.iter().map(|c| csucc[rep[c]].iter().map(|d| number[d]).collect()).collect();
        TreeGraph { arity: self.arity, root: 0, nodes, succ }
    }
}

/// A node of a truncated unravelling.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Window<L> {
    Sym(L),
    /// Reserved marker where the window stops; not part of any alphabet.
    Cut,
}

impl<L: Ranked> Ranked for Window<L> {
    fn arity(&self) -> usize {
        match self {
            Window::Sym(l) => l.arity(),
            Window::Cut => 0,
        }
    }
}

impl<L: fmt::Display> fmt::Display for Window<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Sym(l) => l.fmt(f),
            Window::Cut => f.write_str("…"),
        }
    }
}

impl<L: fmt::Display> fmt::Display for TreeGraph<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root={}", self.root)?;
        for (v, n) in self.nodes.iter().enumerate() {
            match n {
                Node::Hole(i) => write!(f, "; {v}=x{i}")?,
                Node::Label(l) => {
                    write!(f, "; {v}={l}")?;
                    if !self.succ[v].is_empty() {
                        let s: Vec<String> = self.succ[v].iter().map(|w| w.to_string()).collect();
                        write!(f, "({})", s.join(","))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Reachable pairs `(v, w)` from the two roots; `None` as soon as `same`
/// rejects a pair.
fn pair_closure<L, M>(
    g: &TreeGraph<L>,
    h: &TreeGraph<M>,
    same: impl Fn(&Node<L>, &Node<M>) -> bool,
) -> Option<Vec<(usize, usize)>> {
    let mut index = HashMap::new();
    let mut pairs = vec![(g.root, h.root)];
    index.insert((g.root, h.root), 0usize);
    let mut queue = VecDeque::from([(g.root, h.root)]);
    while let Some((v, w)) = queue.pop_front() {
        if !same(&g.nodes[v], &h.nodes[w]) || g.succ[v].len() != h.succ[w].len() {
            return None;
        }
        for (&a, &b) in g.succ[v].iter().zip(&h.succ[w]) {
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry((a, b)) {
                e.insert(pairs.len());
                pairs.push((a, b));
                queue.push_back((a, b));
            }
        }
    }
    Some(pairs)
}

/// `un(G) = un(H)`, decided by a product bisimulation from the roots.
pub fn unravel_equal<L: PartialEq>(g: &TreeGraph<L>, h: &TreeGraph<L>) -> bool {
    g.arity == h.arity && pair_closure(g, h, |a, b| a == b).is_some()
}

/// Same unravelled shape: equal arities at matched vertices and equal holes.
pub fn shape_equal<L: Ranked, M: Ranked>(g: &TreeGraph<L>, h: &TreeGraph<M>) -> bool {
    g.arity == h.arity && pair_closure(g, h, same_shape_node).is_some()
}

fn same_shape_node<L: Ranked, M: Ranked>(a: &Node<L>, b: &Node<M>) -> bool {
    match (a, b) {
        (Node::Hole(i), Node::Hole(j)) => i == j,
        (Node::Label(x), Node::Label(y)) => x.arity() == y.arity(),
        _ => false,
    }
}

/// The reachable product of two graphs with the same unravelled shape; its
/// projections unravel to `un(G)` and `un(H)`.
pub fn graph_product<L: Ranked + Clone, M: Ranked + Clone>(
    g: &TreeGraph<L>,
    h: &TreeGraph<M>,
) -> Result<TreeGraph<Pair<L, M>>> {
    if g.arity != h.arity {
        return Err(Error::ShapeMismatch(format!("arities {} and {}", g.arity, h.arity)));
    }
    let pairs = pair_closure(g, h, same_shape_node)
        .ok_or_else(|| Error::ShapeMismatch("the unravellings differ in shape".into()))?;
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let nodes = pairs
        .iter()
        .map(|&(v, w)| match (&g.nodes[v], &h.nodes[w]) {
            (Node::Label(a), Node::Label(b)) => Node::Label(Pair(a.clone(), b.clone())),
            (Node::Hole(i), _) => Node::Hole(*i),
            _ => unreachable!("shapes agree"),
        })
        .collect();
    let succ = pairs
        .iter()
        .map(|&(v, w)| g.succ[v].iter().zip(&h.succ[w]).map(|(&a, &b)| index[&(a, b)]).collect())
        .collect();
    TreeGraph::new(g.arity, 0, nodes, succ)
}

impl<L: Ranked> Ranked for TreeGraph<L> {
    fn arity(&self) -> usize {
        self.arity
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Spliced {
    Inner(usize, usize),
    Hole(usize),
}

/// `flat` on graphs: every vertex is replaced by its graph label, whose hole
/// `x_i` is routed to the root of the label of the `i`-th successor.
pub fn flatten_graph<L: Ranked + Clone>(g: &TreeGraph<TreeGraph<L>>) -> Result<TreeGraph<L>> {
    for (v, n) in g.nodes.iter().enumerate() {
        if let Node::Label(inner) = n {
            if inner.arity != g.succ[v].len() {
                return Err(Error::MalformedGraph(format!("label of vertex {v} has the wrong arity")));
            }
        }
    }
    let label = |v: usize| match &g.nodes[v] {
        Node::Label(inner) => inner,
        Node::Hole(_) => unreachable!("callers check"),
    };
    // where the i-th port of outer vertex v leads
    let port = |v: usize, i: usize| {
        let c = g.succ[v][i];
        match &g.nodes[c] {
            Node::Hole(_) => Spliced::Hole(c),
            Node::Label(inner) => Spliced::Inner(c, inner.root),
        }
    };
    let resolve = |v: usize, w: usize| match &label(v).nodes[w] {
        Node::Label(_) => Spliced::Inner(v, w),
        Node::Hole(i) => port(v, *i),
    };
    let start = Spliced::Inner(g.root, label(g.root).root);
    let mut index = HashMap::from([(start, 0usize)]);
    let mut order = vec![start];
    let mut nodes = Vec::new();
    let mut succ = Vec::new();
    let mut i = 0;
    while i < order.len() {
        match order[i] {
            Spliced::Hole(c) => {
                let Node::Hole(j) = g.nodes[c] else { unreachable!() };
                nodes.push(Node::Hole(j));
                succ.push(Vec::new());
            }
            Spliced::Inner(v, w) => {
                let inner = label(v);
                nodes.push(inner.nodes[w].clone());
                let mut out = Vec::new();
                for &x in &inner.succ[w] {
                    let key = resolve(v, x);
                    let id = *index.entry(key).or_insert_with(|| {
                        order.push(key);
                        order.len() - 1
                    });
                    out.push(id);
                }
                succ.push(out);
            }
        }
        i += 1;
    }
    TreeGraph::new(g.arity, 0, nodes, succ)
}

/// A cylindrical structure: every element `a` of arity `n` is
/// `cy_σ(a⁰)` for a core element `a⁰` of arity `m ≤ n` and an increasing
/// injection `σ: [m] → [n]`.
pub trait Cylindrical: Ranked + Clone {
    /// `(a⁰, σ)`.
    fn core(&self) -> (Self, Vec<usize>);
}

fn core_tree<L: Cylindrical>(a: &L) -> Result<RankedTree<L>> {
    let (a0, sigma) = a.core();
    let n = a.arity();
    if a0.arity() != sigma.len()
        || sigma.windows(2).any(|w| w[0] >= w[1])
        || sigma.iter().any(|&k| k >= n)
    {
        return Err(Error::Invalid(format!("inconsistent cylindrical data at arity {n}")));
    }
    RankedTree::from_term(n, &Term::App(a0, sigma.into_iter().map(Term::Hole).collect()))
}

/// `un(t) := flat(S)` with `S(v) = a⁰(x_σ(0), …)` for `t(v) = a`.
pub fn unravel_tree<L: Cylindrical>(t: &RankedTree<L>) -> Result<RankedTree<L>> {
    let mut err = None;
    let s = t.map(|a| match core_tree(a) {
        Ok(x) => Some(x),
        Err(e) => {
            err = Some(e);
            None
        }
    });
    match s {
        Some(s) => Ok(s.flatten()),
        None => Err(err.expect("set on failure")),
    }
}

/// The same construction on graphs.
pub fn unravel_graph_cyl<L: Cylindrical>(g: &TreeGraph<L>) -> Result<TreeGraph<L>> {
    let mut nodes = Vec::with_capacity(g.nodes.len());
    for n in &g.nodes {
        nodes.push(match n {
            Node::Hole(i) => Node::Hole(*i),
            Node::Label(a) => Node::Label(TreeGraph::from_tree(&core_tree(a)?)),
        });
    }
    let outer = TreeGraph { arity: g.arity, root: g.root, nodes, succ: g.succ.clone() };
    flatten_graph(&outer)
}

/// A random graph with at most `vertices` vertices before pruning. Labels of
/// arity `k` come from `pool`; up to `holes` vertices become holes (graphs
/// violating the one-path rule for holes are re-drawn).
pub fn random_graph<L: Ranked + Clone, R: Rng>(
    pool: &LabelPool<L>,
    vertices: usize,
    arity: usize,
    holes: usize,
    rng: &mut R,
) -> Result<TreeGraph<L>> {
    let labels: Vec<&L> = pool.all().collect();
    if labels.is_empty() || vertices == 0 {
        return Err(Error::Generator("no labels or no vertices".into()));
    }
    for _ in 0..256 {
        let mut free: Vec<usize> = (0..arity).collect();
        let mut nodes = Vec::new();
        let mut succ = Vec::new();
        for v in 0..vertices {
            if v > 0 && nodes.len() - 1 < holes && !free.is_empty() && rng.gen_bool(0.3) {
                let i = free.swap_remove(rng.gen_range(0..free.len()));
                nodes.push(Node::Hole(i));
                succ.push(Vec::new());
                continue;
            }
            let l = labels[rng.gen_range(0..labels.len())].clone();
            succ.push((0..l.arity()).map(|_| rng.gen_range(0..vertices)).collect());
            nodes.push(Node::Label(l));
        }
        if let Ok(g) = TreeGraph::new(arity, 0, nodes, succ) {
            return Ok(g);
        }
    }
    Err(Error::Generator("no valid graph found".into()))
}

/// Every graph on exactly `n` vertices (root 0) over the labels of `pool`,
/// closed, canonical and without duplicates.
pub fn enumerate_closed_graphs<L: Ranked + Clone + Ord>(pool: &LabelPool<L>, n: usize) -> Vec<TreeGraph<L>> {
    let labels: Vec<&L> = pool.all().collect();
    let mut out = std::collections::BTreeSet::new();
    let mut choice: Vec<(usize, Vec<usize>)> = Vec::new();
    fn go<L: Ranked + Clone + Ord>(
        labels: &[&L],
        n: usize,
        choice: &mut Vec<(usize, Vec<usize>)>,
        out: &mut std::collections::BTreeSet<TreeGraph<L>>,
    ) {
        if choice.len() == n {
            let nodes = choice.iter().map(|(l, _)| Node::Label(labels[*l].clone())).collect();
            let succ = choice.iter().map(|(_, s)| s.clone()).collect();
            if let Ok(g) = TreeGraph::new(0, 0, nodes, succ) {
                if g.len() == n {
                    out.insert(g.canonical());
                }
            }
            return;
        }
        for (li, l) in labels.iter().enumerate() {
            let k = l.arity();
            let total = n.pow(k as u32);
            for code in 0..total {
                let mut c = code;
                let s = (0..k)
                    .map(|_| {
                        let d = c % n;
                        c /= n;
                        d
                    })
                    .collect();
                choice.push((li, s));
                go(labels, n, choice, out);
                choice.pop();
            }
        }
    }
    go(&labels, n, &mut choice, &mut out);
    out.into_iter().collect()
}
