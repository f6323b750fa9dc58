//! Finite ordered Wilke algebras: a nullary sort `S0`, a unary sort `S1`, the
//! mixed product `S1 × S0 → S0`, the binary product `S1 × S1 → S1` and the
//! ω-power `S1 → S0`, all partial. Elements are indices into the sorts.
//!
//! Infinite products are only ever computed for ultimately periodic words, or
//! as limit sets of finite labelled graphs (via linked pairs).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::report::{run_law, LawResult, Outcome, Report, Side, Witness, EXHAUSTIVE};
use crate::tree::transitive_closure;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WilkeAlgebra {
    s0: Vec<String>,
    s1: Vec<String>,
    le0: Vec<Vec<bool>>,
    le1: Vec<Vec<bool>>,
    /// Order generators as given, kept for printing.
    gen0: Vec<(usize, usize)>,
    gen1: Vec<(usize, usize)>,
    mix: Vec<Vec<Option<usize>>>,
    bin: Vec<Vec<Option<usize>>>,
    omega: Vec<Option<usize>>,
}

/// A reference to an element of either sort.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Nullary(usize),
    Unary(usize),
}

fn closed_order(n: usize, gens: &[(usize, usize)], names: &[String]) -> Result<Vec<Vec<bool>>> {
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in gens {
        m[a][b] = true;
    }
    transitive_closure(&mut m);
    for a in 0..n {
        for b in a + 1..n {
            if m[a][b] && m[b][a] {
                return Err(Error::NotAntisymmetric(names[a].clone(), names[b].clone()));
            }
        }
    }
    Ok(m)
}

impl WilkeAlgebra {
    /// Empty tables; the orders are the reflexive-transitive closures of the
    /// generator pairs.
    pub fn new(
        s0: Vec<String>,
        s1: Vec<String>,
        gen0: Vec<(usize, usize)>,
        gen1: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for n in s0.iter().chain(&s1) {
            if !seen.insert(n.as_str()) {
                return Err(Error::Invalid(format!("element name `{n}` used twice")));
            }
        }
        for &(a, b) in &gen0 {
            if a >= s0.len() || b >= s0.len() {
                return Err(Error::Invalid("order pair outside S0".into()));
            }
        }
        for &(a, b) in &gen1 {
            if a >= s1.len() || b >= s1.len() {
                return Err(Error::Invalid("order pair outside S1".into()));
            }
        }
        let le0 = closed_order(s0.len(), &gen0, &s0)?;
        let le1 = closed_order(s1.len(), &gen1, &s1)?;
        let (n0, n1) = (s0.len(), s1.len());
        Ok(WilkeAlgebra {
            s0,
            s1,
            le0,
            le1,
            gen0,
            gen1,
            mix: vec![vec![None; n0]; n1],
            bin: vec![vec![None; n1]; n1],
            omega: vec![None; n1],
        })
    }

    pub fn set_mix(&mut self, s: usize, a: usize, b: usize) {
        self.mix[s][a] = Some(b);
    }

    pub fn set_bin(&mut self, s: usize, t: usize, u: usize) {
        self.bin[s][t] = Some(u);
    }

    pub fn set_omega(&mut self, s: usize, a: usize) {
        self.omega[s] = Some(a);
    }

    /// The partial algebra on the kept elements, renumbered in order; products
    /// leaving them become undefined.
    pub fn restrict(&self, keep0: &BTreeSet<usize>, keep1: &BTreeSet<usize>) -> WilkeAlgebra {
        let k0: Vec<usize> = keep0.iter().copied().filter(|&a| a < self.n0()).collect();
        let k1: Vec<usize> = keep1.iter().copied().filter(|&s| s < self.n1()).collect();
        let at0 = |a: usize| k0.iter().position(|&x| x == a);
        let at1 = |s: usize| k1.iter().position(|&x| x == s);
        let pairs = |k: &[usize], le: &Vec<Vec<bool>>| -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            for (i, &a) in k.iter().enumerate() {
                for (j, &b) in k.iter().enumerate() {
                    if i != j && le[a][b] {
                        out.push((i, j));
                    }
                }
            }
            out
        };
        let le0: Vec<Vec<bool>> = k0.iter().map(|&a| k0.iter().map(|&b| self.le0[a][b]).collect()).collect();
        let le1: Vec<Vec<bool>> = k1.iter().map(|&s| k1.iter().map(|&t| self.le1[s][t]).collect()).collect();
        WilkeAlgebra {
            s0: k0.iter().map(|&a| self.s0[a].clone()).collect(),
            s1: k1.iter().map(|&s| self.s1[s].clone()).collect(),
            gen0: pairs(&k0, &self.le0),
            gen1: pairs(&k1, &self.le1),
            le0,
            le1,
            mix: k1.iter().map(|&s| k0.iter().map(|&a| self.mix[s][a].and_then(at0)).collect()).collect(),
            bin: k1.iter().map(|&s| k1.iter().map(|&t| self.bin[s][t].and_then(at1)).collect()).collect(),
            omega: k1.iter().map(|&s| self.omega[s].and_then(at0)).collect(),
        }
    }

    pub fn n0(&self) -> usize {
        self.s0.len()
    }

    pub fn n1(&self) -> usize {
        self.s1.len()
    }

    pub fn name0(&self, a: usize) -> &str {
        &self.s0[a]
    }

    pub fn name1(&self, s: usize) -> &str {
        &self.s1[s]
    }

    pub fn names0(&self) -> &[String] {
        &self.s0
    }

    pub fn names1(&self) -> &[String] {
        &self.s1
    }

    pub fn order_generators0(&self) -> &[(usize, usize)] {
        &self.gen0
    }

    pub fn order_generators1(&self) -> &[(usize, usize)] {
        &self.gen1
    }

    pub fn lookup(&self, name: &str) -> Option<Sort> {
        if let Some(i) = self.s0.iter().position(|n| n == name) {
            return Some(Sort::Nullary(i));
        }
        self.s1.iter().position(|n| n == name).map(Sort::Unary)
    }

    pub fn mix(&self, s: usize, a: usize) -> Option<usize> {
        self.mix[s][a]
    }

    pub fn bin(&self, s: usize, t: usize) -> Option<usize> {
        self.bin[s][t]
    }

    pub fn omega(&self, s: usize) -> Option<usize> {
        self.omega[s]
    }

    pub fn leq0(&self, a: usize, b: usize) -> bool {
        self.le0[a][b]
    }

    pub fn leq1(&self, s: usize, t: usize) -> bool {
        self.le1[s][t]
    }

    pub fn inf0(&self, xs: &[usize]) -> Option<usize> {
        inf_in(&self.le0, xs)
    }

    pub fn inf1(&self, xs: &[usize]) -> Option<usize> {
        inf_in(&self.le1, xs)
    }

    /// Product of a non-empty finite word over `S1`.
    pub fn product1(&self, w: &[usize]) -> Option<usize> {
        let (&first, rest) = w.split_first()?;
        rest.iter().try_fold(first, |acc, &t| self.bin(acc, t))
    }

    /// `s_0 · (s_1 · (… · a))`.
    pub fn apply_prefix(&self, prefix: &[usize], a: usize) -> Option<usize> {
        prefix.iter().rev().try_fold(a, |acc, &s| self.mix(s, acc))
    }

    /// `π(u) · (π(v))^ω`, or the finite fold when the word stops.
    pub fn up_product(&self, w: &UpWord) -> Option<usize> {
        let tail = match &w.end {
            WordEnd::Stop(a) => *a,
            WordEnd::Loop(v) => self.omega(self.product1(v)?)?,
        };
        self.apply_prefix(&w.prefix, tail)
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.bin(e, e) == Some(e)
    }

    /// Parses `s t ; u v` (a loop after `;`) or `s t a` (a terminal `S0` element).
    pub fn parse_word(&self, text: &str) -> Result<UpWord> {
        let (pre, lp) = match text.split_once(';') {
            Some((p, l)) => (p, Some(l)),
            None => (text, None),
        };
        let unary = |tok: &str| match self.lookup(tok) {
            Some(Sort::Unary(s)) => Ok(s),
            Some(Sort::Nullary(_)) => {
                Err(Error::Invalid(format!("`{tok}` is nullary and can only end a word")))
            }
            None => Err(Error::UnknownSymbol(tok.to_string())),
        };
        let mut toks: Vec<&str> = pre.split_whitespace().collect();
        let end = match lp {
            Some(l) => {
                let v = l.split_whitespace().map(unary).collect::<Result<Vec<_>>>()?;
                if v.is_empty() {
                    return Err(Error::Invalid("empty loop".into()));
                }
                WordEnd::Loop(v)
            }
            None => match toks.pop().map(|t| (t, self.lookup(t))) {
                Some((_, Some(Sort::Nullary(a)))) => WordEnd::Stop(a),
                Some((t, Some(Sort::Unary(_)))) => {
                    return Err(Error::Invalid(format!(
                        "word must end in a nullary element or a loop, not `{t}`"
                    )))
                }
                Some((t, None)) => return Err(Error::UnknownSymbol(t.to_string())),
                None => return Err(Error::Invalid("empty word".into())),
            },
        };
        let prefix = toks.into_iter().map(unary).collect::<Result<Vec<_>>>()?;
        Ok(UpWord { prefix, end })
    }

    pub fn show_word(&self, w: &UpWord) -> String {
        let mut parts: Vec<&str> = w.prefix.iter().map(|&s| self.name1(s)).collect();
        match &w.end {
            WordEnd::Stop(a) => {
                parts.push(self.name0(*a));
                parts.join(" ")
            }
            WordEnd::Loop(v) => {
                let l: Vec<&str> = v.iter().map(|&s| self.name1(s)).collect();
                format!("{} ; {}", parts.join(" "), l.join(" ")).trim_start().to_string()
            }
        }
    }

    fn show0(&self, a: Option<usize>) -> String {
        a.map_or("undefined".into(), |a| self.s0[a].clone())
    }

    fn show1(&self, s: Option<usize>) -> String {
        s.map_or("undefined".into(), |s| self.s1[s].clone())
    }
}

fn inf_in(le: &[Vec<bool>], xs: &[usize]) -> Option<usize> {
    if xs.is_empty() {
        return None;
    }
    let lower: Vec<usize> = (0..le.len()).filter(|&l| xs.iter().all(|&x| le[l][x])).collect();
    lower.iter().copied().find(|&l| lower.iter().all(|&m| le[m][l]))
}

/// An ultimately periodic word `u v^ω`, or a finite word ending in `S0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpWord {
    pub prefix: Vec<usize>,
    pub end: WordEnd,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WordEnd {
    Stop(usize),
    /// Non-empty.
    Loop(Vec<usize>),
}

impl UpWord {
    pub fn stop(prefix: Vec<usize>, a: usize) -> Self {
        UpWord { prefix, end: WordEnd::Stop(a) }
    }

    pub fn lasso(prefix: Vec<usize>, lp: Vec<usize>) -> Self {
        assert!(!lp.is_empty(), "the loop of a lasso is non-empty");
        UpWord { prefix, end: WordEnd::Loop(lp) }
    }
}

/// Exhaustive check of the Wilke axioms over the finite tables. Equations use
/// Kleene equality; monotonicity is required where both sides are defined.
pub fn wilke_check(w: &WilkeAlgebra) -> Report {
    let mut rep = Report::new("Wilke algebra axioms", EXHAUSTIVE);
    let n1 = w.n1();
    let n0 = w.n0();
    let triples: Vec<(usize, usize, usize)> = (0..n1)
        .flat_map(|s| (0..n1).flat_map(move |t| (0..n1).map(move |u| (s, t, u))))
        .collect();
    rep.push(run_law("binary associativity", triples.len(), |i| {
        let (s, t, u) = triples[i];
        let l = w.bin(s, t).and_then(|st| w.bin(st, u));
        let r = w.bin(t, u).and_then(|tu| w.bin(s, tu));
        kleene(l, r, || {
            Witness {
                input: format!("s={}, t={}, u={}", w.name1(s), w.name1(t), w.name1(u)),
                sides: vec![
                    Side::new("(s·t)·u", "", w.show1(l)),
                    Side::new("s·(t·u)", "", w.show1(r)),
                ],
            }
        })
    }));
    let mixed: Vec<(usize, usize, usize)> = (0..n1)
        .flat_map(|s| (0..n1).flat_map(move |t| (0..n0).map(move |a| (s, t, a))))
        .collect();
    rep.push(run_law("mixed associativity", mixed.len(), |i| {
        let (s, t, a) = mixed[i];
        let l = w.bin(s, t).and_then(|st| w.mix(st, a));
        let r = w.mix(t, a).and_then(|ta| w.mix(s, ta));
        kleene(l, r, || Witness {
            input: format!("s={}, t={}, a={}", w.name1(s), w.name1(t), w.name0(a)),
            sides: vec![
                Side::new("(s·t)·a", "", w.show0(l)),
                Side::new("s·(t·a)", "", w.show0(r)),
            ],
        })
    }));
    let pairs: Vec<(usize, usize)> =
        (0..n1).flat_map(|s| (0..n1).map(move |t| (s, t))).collect();
    rep.push(run_law("(st)^ω = s(ts)^ω", pairs.len(), |i| {
        let (s, t) = pairs[i];
        let l = w.bin(s, t).and_then(|st| w.omega(st));
        let r = w.bin(t, s).and_then(|ts| w.omega(ts)).and_then(|x| w.mix(s, x));
        kleene(l, r, || Witness {
            input: format!("s={}, t={}", w.name1(s), w.name1(t)),
            sides: vec![
                Side::new("(s·t)^ω", "", w.show0(l)),
                Side::new("s·(t·s)^ω", "", w.show0(r)),
            ],
        })
    }));
    let powers: Vec<(usize, usize)> =
        (0..n1).flat_map(|s| (1..=n1 + 1).map(move |n| (s, n))).collect();
    rep.push(run_law("(s^n)^ω = s^ω", powers.len(), |i| {
        let (s, n) = powers[i];
        let l = w.product1(&vec![s; n]).and_then(|p| w.omega(p));
        let r = w.omega(s);
        kleene(l, r, || Witness {
            input: format!("s={}, n={n}", w.name1(s)),
            sides: vec![Side::new("(s^n)^ω", "", w.show0(l)), Side::new("s^ω", "", w.show0(r))],
        })
    }));
    rep.push(monotone_law(w));
    rep
}

fn kleene(l: Option<usize>, r: Option<usize>, wit: impl FnOnce() -> Witness) -> Outcome {
    if l == r {
        Outcome::Pass
    } else {
        Outcome::Fail(wit())
    }
}

fn monotone_law(w: &WilkeAlgebra) -> LawResult {
    let (n0, n1) = (w.n0(), w.n1());
    let mut res = LawResult { law: "monotone".into(), checked: 0, failures: 0, witness: None };
    let fail = |res: &mut LawResult, input: String, l: String, r: String| {
        res.failures += 1;
        res.witness.get_or_insert(Witness {
            input,
            sides: vec![Side::new("smaller", "", l), Side::new("larger", "", r)],
        });
    };
    for s in 0..n1 {
        for s2 in (0..n1).filter(|&s2| w.leq1(s, s2)) {
            for t in 0..n1 {
                for t2 in (0..n1).filter(|&t2| w.leq1(t, t2)) {
                    res.checked += 1;
                    if let (Some(x), Some(y)) = (w.bin(s, t), w.bin(s2, t2)) {
                        if !w.leq1(x, y) {
                            let input = format!(
                                "{}·{} vs {}·{}",
                                w.name1(s),
                                w.name1(t),
                                w.name1(s2),
                                w.name1(t2)
                            );
                            fail(&mut res, input, w.name1(x).into(), w.name1(y).into());
                        }
                    }
                }
            }
            for a in 0..n0 {
                for a2 in (0..n0).filter(|&a2| w.leq0(a, a2)) {
                    res.checked += 1;
                    if let (Some(x), Some(y)) = (w.mix(s, a), w.mix(s2, a2)) {
                        if !w.leq0(x, y) {
                            let input = format!(
                                "{}·{} vs {}·{}",
                                w.name1(s),
                                w.name0(a),
                                w.name1(s2),
                                w.name0(a2)
                            );
                            fail(&mut res, input, w.name0(x).into(), w.name0(y).into());
                        }
                    }
                }
            }
            res.checked += 1;
            if let (Some(x), Some(y)) = (w.omega(s), w.omega(s2)) {
                if !w.leq0(x, y) {
                    let input = format!("{}^ω vs {}^ω", w.name1(s), w.name1(s2));
                    fail(&mut res, input, w.name0(x).into(), w.name0(y).into());
                }
            }
        }
    }
    res
}

/// A finite rooted multigraph whose edges carry `S1` values, with three kinds
/// of path ends: stops (an `S0` value), exits (a hole index) and infinite
/// paths. Several edges may join the same pair of vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelledGraph {
    pub vertices: usize,
    pub root: usize,
    /// `(from, to, value)`.
    pub edges: Vec<(usize, usize, usize)>,
    /// `(vertex, value)`.
    pub stops: Vec<(usize, usize)>,
    /// `(vertex, port)`.
    pub exits: Vec<(usize, usize)>,
}

/// A path from the root: the edges of its prefix and how it ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathWitness {
    pub prefix: Vec<usize>,
    pub end: PathEnd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathEnd {
    /// Index into `stops`.
    Stop(usize),
    /// Index into `exits`.
    Exit(usize),
    /// Edge indices of a cycle repeated forever.
    Loop(Vec<usize>),
    /// The prefix alone: its product is already undefined.
    Prefix,
}

/// The values of all maximal paths from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LimitSet {
    /// `S0` values of paths that stop or run forever.
    pub values: BTreeMap<usize, PathWitness>,
    /// `(S1 product, port)` for paths that reach an exit. An exit at the root
    /// reached by the empty path has no `S1` value and is not listed.
    pub open: BTreeMap<(usize, usize), PathWitness>,
    /// Some maximal path has an undefined product.
    pub undefined: Option<PathWitness>,
}

impl LimitSet {
    pub fn is_undefined(&self) -> bool {
        self.undefined.is_some()
    }
}

/// The value a witness path denotes, recomputed from scratch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathValue {
    Closed(usize),
    Open(usize, usize),
}

impl LabelledGraph {
    /// Checks that the witness is a path from the root (and its loop a cycle)
    /// and evaluates it with `up_product`.
    pub fn evaluate(&self, w: &WilkeAlgebra, p: &PathWitness) -> Result<Option<PathValue>> {
        let mut at = self.root;
        let step = |e: usize, at: &mut usize| -> Result<usize> {
            let &(from, to, val) =
                self.edges.get(e).ok_or_else(|| Error::Invalid(format!("no edge {e}")))?;
            if from != *at {
                return Err(Error::Invalid(format!("edge {e} does not leave vertex {at}")));
            }
            *at = to;
            Ok(val)
        };
        let prefix = p.prefix.iter().map(|&e| step(e, &mut at)).collect::<Result<Vec<_>>>()?;
        Ok(match &p.end {
            PathEnd::Stop(i) => {
                let &(v, a) = &self.stops[*i];
                if v != at {
                    return Err(Error::Invalid("stop is not at the end of the prefix".into()));
                }
                w.up_product(&UpWord::stop(prefix, a)).map(PathValue::Closed)
            }
            PathEnd::Exit(i) => {
                let &(v, port) = &self.exits[*i];
                if v != at {
                    return Err(Error::Invalid("exit is not at the end of the prefix".into()));
                }
                w.product1(&prefix).map(|s| PathValue::Open(s, port))
            }
            PathEnd::Loop(lp) => {
                let start = at;
                let vals = lp.iter().map(|&e| step(e, &mut at)).collect::<Result<Vec<_>>>()?;
                if at != start || vals.is_empty() {
                    return Err(Error::Invalid("loop is not a cycle".into()));
                }
                w.up_product(&UpWord::lasso(prefix, vals)).map(PathValue::Closed)
            }
            PathEnd::Prefix => None,
        })
    }

    /// Vertices from which some maximal path starts: a stop, an exit, or a
    /// reachable cycle.
    fn live(&self) -> Vec<bool> {
        let n = self.vertices;
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b, _) in &self.edges {
            out[a].push(b);
            rev[b].push(a);
        }
        let mut live = vec![false; n];
        for &(v, _) in self.stops.iter().chain(&self.exits) {
            live[v] = true;
        }
        for v in 0..n {
            // v on a cycle iff v reaches itself
            let mut seen = vec![false; n];
            let mut stack = out[v].clone();
            while let Some(x) = stack.pop() {
                if x == v {
                    live[v] = true;
                    break;
                }
                if !std::mem::replace(&mut seen[x], true) {
                    stack.extend(&out[x]);
                }
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| live[v]).collect();
        while let Some(x) = stack.pop() {
            for &p in &rev[x] {
                if !std::mem::replace(&mut live[p], true) {
                    stack.push(p);
                }
            }
        }
        live
    }
}

type State = (usize, Option<usize>);

fn path_to(parent: &BTreeMap<State, Option<(State, usize)>>, mut s: State) -> Vec<usize> {
    let mut edges = Vec::new();
    while let Some(&Some((p, e))) = parent.get(&s) {
        edges.push(e);
        s = p;
    }
    edges.reverse();
    edges
}

/// Values of all maximal paths, by saturating reachable (vertex, prefix
/// product) pairs and cycle products, then combining each reachable prefix
/// with the idempotent cycle products at its end (linked pairs).
pub fn limit_set(w: &WilkeAlgebra, g: &LabelledGraph) -> LimitSet {
    let live = g.live();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); g.vertices];
    for (i, &(a, _, _)) in g.edges.iter().enumerate() {
        out_edges[a].push(i);
    }
    let mut res = LimitSet::default();

    let mut parent: BTreeMap<State, Option<(State, usize)>> = BTreeMap::new();
    let start = (g.root, None);
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    let mut order = Vec::new();
    while let Some(st @ (v, s)) = queue.pop_front() {
        order.push(st);
        for &e in &out_edges[v] {
            let (_, to, val) = g.edges[e];
            let next = match s {
                None => Some(val),
                Some(s) => w.bin(s, val),
            };
            match next {
                Some(n) => {
                    if let std::collections::btree_map::Entry::Vacant(slot) = parent.entry((to, Some(n))) {
                        slot.insert(Some((st, e)));
                        queue.push_back((to, Some(n)));
                    }
                }
                None if live[to] => {
                    if res.undefined.is_none() {
                        let mut prefix = path_to(&parent, st);
                        prefix.push(e);
                        res.undefined = Some(PathWitness { prefix, end: PathEnd::Prefix });
                    }
                }
                None => {}
            }
        }
    }

    let loops = cycle_products(w, g, &out_edges);

    for &st @ (v, s) in &order {
        for (i, &(sv, a)) in g.stops.iter().enumerate() {
            if sv != v {
                continue;
            }
            let val = match s {
                None => Some(a),
                Some(s) => w.mix(s, a),
            };
            let wit = || PathWitness { prefix: path_to(&parent, st), end: PathEnd::Stop(i) };
            match val {
                Some(x) => {
                    res.values.entry(x).or_insert_with(wit);
                }
                None => {
                    res.undefined.get_or_insert_with(wit);
                }
            }
        }
        for (i, &(ev, port)) in g.exits.iter().enumerate() {
            if ev != v {
                continue;
            }
            if let Some(s) = s {
                res.open
                    .entry((s, port))
                    .or_insert_with(|| PathWitness { prefix: path_to(&parent, st), end: PathEnd::Exit(i) });
            }
        }
        for (&(x, y, e), cyc) in loops.range((v, v, 0)..=(v, v, usize::MAX)) {
            debug_assert!(x == v && y == v);
            if !w.is_idempotent(e) {
                continue;
            }
            let val = w.omega(e).and_then(|o| match s {
                None => Some(o),
                Some(s) => w.mix(s, o),
            });
            let wit = || PathWitness { prefix: path_to(&parent, st), end: PathEnd::Loop(cyc.clone()) };
            match val {
                Some(x) => {
                    res.values.entry(x).or_insert_with(wit);
                }
                None => {
                    res.undefined.get_or_insert_with(wit);
                }
            }
        }
    }
    res
}

/// All `(x, y, p)` such that some non-empty path from `x` to `y` has defined
/// product `p`, each with one such path. Products over a cycle at `v` are the
/// entries `(v, v, p)`; they are closed under concatenation by construction.
fn cycle_products(
    w: &WilkeAlgebra,
    g: &LabelledGraph,
    out_edges: &[Vec<usize>],
) -> BTreeMap<(usize, usize, usize), Vec<usize>> {
    let mut paths: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (i, &(a, b, val)) in g.edges.iter().enumerate() {
        if paths.insert((a, b, val), vec![i]).is_none() {
            queue.push_back((a, b, val));
        }
    }
    while let Some(key @ (x, y, p)) = queue.pop_front() {
        for &e in &out_edges[y] {
            let (_, z, val) = g.edges[e];
            if let Some(q) = w.bin(p, val) {
                if !paths.contains_key(&(x, z, q)) {
                    let mut path = paths[&key].clone();
                    path.push(e);
                    paths.insert((x, z, q), path);
                    queue.push_back((x, z, q));
                }
            }
        }
    }
    paths
}

/// Bounds for the meet-continuity checker: word length and the size of each
/// letter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeetBounds {
    pub length: usize,
    pub set_size: usize,
}

impl Default for MeetBounds {
    fn default() -> Self {
        MeetBounds { length: 2, set_size: 2 }
    }
}

fn small_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == k {
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn cartesian(sets: &[&Vec<usize>]) -> Vec<Vec<usize>> {
    sets.iter().fold(vec![Vec::new()], |acc, s| {
        acc.into_iter()
            .flat_map(|p| {
                s.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect()
    })
}

/// A word with set-valued letters, for reporting.
fn show_sets(names: impl Fn(usize) -> String, sets: &[&Vec<usize>]) -> String {
    sets.iter()
        .map(|s| format!("{{{}}}", s.iter().map(|&x| names(x)).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Meet-continuity, `π(inf U) = inf {π(u) : u ∈ U}` with both sides defined
/// for the same `U`, over every word of set-valued letters up to the bounds:
/// finite words over `S1`, finite words ending in `S0`, and ultimately
/// periodic words, whose right-hand side ranges over *all* infinite words
/// through the letter sets (computed as a limit set).
pub fn check_meet_continuity_sg(w: &WilkeAlgebra, b: MeetBounds) -> Report {
    let mut rep = Report::new(
        format!("meet-continuity (words of length ≤ {}, letter sets of size ≤ {})", b.length, b.set_size),
        EXHAUSTIVE,
    );
    let sets1 = small_subsets(w.n1(), b.set_size);
    let sets0 = small_subsets(w.n0(), b.set_size);
    let n1 = |x: usize| w.name1(x).to_string();
    let words = |len: usize| -> Vec<Vec<&Vec<usize>>> {
        (0..len).fold(vec![Vec::new()], |acc, _| {
            acc.into_iter()
                .flat_map(|p| {
                    sets1.iter().map(move |s| {
                        let mut q = p.clone();
                        q.push(s);
                        q
                    })
                })
                .collect()
        })
    };

    // finite words over S1
    let mut finite: Vec<Vec<&Vec<usize>>> = Vec::new();
    for len in 1..=b.length {
        finite.extend(words(len));
    }
    rep.push(run_law("finite words", finite.len(), |i| {
        let u = &finite[i];
        let lhs = u.iter().map(|s| w.inf1(s)).collect::<Option<Vec<_>>>().and_then(|v| w.product1(&v));
        let vals: Option<Vec<usize>> = cartesian(u).iter().map(|c| w.product1(c)).collect();
        let rhs = vals.and_then(|v| w.inf1(&v));
        kleene(lhs, rhs, || Witness {
            input: show_sets(n1, u),
            sides: vec![
                Side::new("π(inf U)", "", w.show1(lhs)),
                Side::new("inf π[U]", "", w.show1(rhs)),
            ],
        })
    }));

    // finite words ending in S0
    let mut stopped: Vec<(Vec<&Vec<usize>>, &Vec<usize>)> = Vec::new();
    for len in 0..b.length {
        for p in words(len) {
            for a in &sets0 {
                stopped.push((p.clone(), a));
            }
        }
    }
    rep.push(run_law("terminated words", stopped.len(), |i| {
        let (u, a) = &stopped[i];
        let lhs = u
            .iter()
            .map(|s| w.inf1(s))
            .collect::<Option<Vec<_>>>()
            .and_then(|v| w.apply_prefix(&v, w.inf0(a)?));
        let vals: Option<Vec<usize>> = cartesian(u)
            .iter()
            .flat_map(|c| a.iter().map(move |&x| w.apply_prefix(c, x)))
            .collect();
        let rhs = vals.and_then(|v| w.inf0(&v));
        kleene(lhs, rhs, || Witness {
            input: format!(
                "{} {}",
                show_sets(n1, u),
                show_sets(|x| w.name0(x).to_string(), &[*a])
            )
            .trim_start()
            .to_string(),
            sides: vec![
                Side::new("π(inf U)", "", w.show0(lhs)),
                Side::new("inf π[U]", "", w.show0(rhs)),
            ],
        })
    }));

    // ultimately periodic words
    let mut lassos: Vec<(Vec<&Vec<usize>>, Vec<&Vec<usize>>)> = Vec::new();
    for total in 1..=b.length {
        for r in 1..=total {
            for p in words(total - r) {
                for l in words(r) {
                    lassos.push((p.clone(), l));
                }
            }
        }
    }
    rep.push(run_law("infinite words", lassos.len(), |i| {
        let (u, v) = &lassos[i];
        let lhs = (|| {
            let p = u.iter().map(|s| w.inf1(s)).collect::<Option<Vec<_>>>()?;
            let l = v.iter().map(|s| w.inf1(s)).collect::<Option<Vec<_>>>()?;
            w.up_product(&UpWord::lasso(p, l))
        })();
        let g = lasso_graph(u, v);
        let ls = limit_set(w, &g);
        let rhs = if ls.is_undefined() {
            None
        } else {
            w.inf0(&ls.values.keys().copied().collect::<Vec<_>>())
        };
        kleene(lhs, rhs, || Witness {
            input: format!("{} ; {}", show_sets(n1, u), show_sets(n1, v)).trim_start().to_string(),
            sides: vec![
                Side::new("π(inf U)", "", w.show0(lhs)),
                Side::new("inf π[U]", "", w.show0(rhs)),
            ],
        })
    }));
    rep
}

/// The lasso `u v^ω` with one parallel edge per letter choice.
fn lasso_graph(u: &[&Vec<usize>], v: &[&Vec<usize>]) -> LabelledGraph {
    let n = u.len() + v.len();
    let mut g = LabelledGraph { vertices: n, root: 0, ..Default::default() };
    for (i, set) in u.iter().chain(v.iter()).enumerate() {
        let to = if i + 1 == n { u.len() } else { i + 1 };
        for &s in set.iter() {
            g.edges.push((i, to, s));
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One element in each sort, every product defined.
    fn trivial() -> WilkeAlgebra {
        let mut w = WilkeAlgebra::new(vec!["a".into()], vec!["e".into()], vec![], vec![]).unwrap();
        w.set_mix(0, 0, 0);
        w.set_bin(0, 0, 0);
        w.set_omega(0, 0);
        w
    }

    /// Büchi-like: `1` marks a visit, `0` does not; `(…1…)^ω` accepts.
    fn buchi() -> WilkeAlgebra {
        let mut w = WilkeAlgebra::new(
            vec!["acc".into(), "rej".into()],
            vec!["o".into(), "i".into()],
            vec![],
            vec![],
        )
        .unwrap();
        for s in 0..2 {
            for t in 0..2 {
                w.set_bin(s, t, s.max(t));
            }
            for a in 0..2 {
                w.set_mix(s, a, a);
            }
        }
        w.set_omega(0, 1);
        w.set_omega(1, 0);
        w
    }

    #[test]
    fn trivial_and_buchi_pass() {
        assert!(wilke_check(&trivial()).passed());
        let r = wilke_check(&buchi());
        assert!(r.passed(), "{r}");
        assert!(check_meet_continuity_sg(&trivial(), MeetBounds::default()).passed());
    }

    #[test]
    fn broken_omega_rule_fails() {
        // o·acc = rej: (o·i)^ω = acc but o·(i·o)^ω = rej
        let mut w = buchi();
        w.set_mix(0, 0, 1);
        let r = wilke_check(&w);
        assert!(!r.law("(st)^ω = s(ts)^ω").unwrap().passed());
    }

    #[test]
    fn words() {
        let w = buchi();
        let word = w.parse_word("o i ; o").unwrap();
        assert_eq!(word, UpWord::lasso(vec![0, 1], vec![0]));
        assert_eq!(w.up_product(&word), Some(1));
        assert_eq!(w.up_product(&w.parse_word("; o i").unwrap()), Some(0));
        assert_eq!(w.up_product(&w.parse_word("o acc").unwrap()), Some(0));
        assert_eq!(w.show_word(&word), "o i ; o");
        assert!(w.parse_word("o i").is_err());
        assert!(w.parse_word("o ;").is_err());
    }

    #[test]
    fn limit_set_of_two_loops() {
        // root with a self-loop `o` and an edge `i` into a vertex looping on `o`
        let w = buchi();
        let g = LabelledGraph {
            vertices: 2,
            root: 0,
            edges: vec![(0, 0, 0), (0, 1, 1), (1, 1, 0), (1, 0, 1)],
            ..Default::default()
        };
        let ls = limit_set(&w, &g);
        assert_eq!(ls.values.keys().copied().collect::<Vec<_>>(), vec![0, 1]);
        for (v, p) in &ls.values {
            assert_eq!(g.evaluate(&w, p).unwrap(), Some(PathValue::Closed(*v)));
        }
        assert!(!ls.is_undefined());
    }

    #[test]
    fn left_zero_semigroup_is_not_meet_continuous() {
        // S1 = {a, b} incomparable, x·y = x; the letter set {a, b} has no
        // infimum, yet every choice gives the same value
        let mut w =
            WilkeAlgebra::new(vec!["z".into()], vec!["a".into(), "b".into()], vec![], vec![]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                w.set_bin(x, y, x);
            }
            w.set_mix(x, 0, 0);
            w.set_omega(x, 0);
        }
        assert!(wilke_check(&w).passed());
        let r = check_meet_continuity_sg(&w, MeetBounds::default());
        assert!(!r.passed());
        let wit = r.law("terminated words").unwrap().witness.as_ref().unwrap();
        assert_eq!(wit.input, "{a,b} {z}");
    }
}
