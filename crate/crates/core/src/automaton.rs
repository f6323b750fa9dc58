//! Nondeterministic parity tree automata: runs and profiles on finite trees,
//! the automaton's ω-semigroup, the recognising map into `Branch(S_A)`, and
//! membership of closed regular trees (parity game, and an algebraic route
//! through positional annotations and limit sets).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::algebra::TreeAlgebra;
use crate::branch::{recognize, BranchAlgebra, BranchElem};
use crate::error::{Error, Result};
use crate::game::ParityGame;
use crate::graphs::TreeGraph;
use crate::omega::{check_meet_continuity_sg, limit_set, LabelledGraph, MeetBounds, WilkeAlgebra};
use crate::report::Report;
use crate::tree::{Address, Node, Ranked, RankedAlphabet, RankedTree, Symbol};
use crate::treesg::{TaAlgebra, TaElem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAutomaton {
    alphabet: RankedAlphabet,
    states: Vec<String>,
    priority: Vec<usize>,
    init: usize,
    trans: BTreeMap<(usize, Symbol), Vec<Vec<usize>>>,
}

impl ParityAutomaton {
    /// `states` are `(name, priority)`; transitions are `(q, a, children)`.
    pub fn new(
        alphabet: RankedAlphabet,
        states: Vec<(String, usize)>,
        init: usize,
        transitions: Vec<(usize, Symbol, Vec<usize>)>,
    ) -> Result<Self> {
        if states.is_empty() || init >= states.len() {
            return Err(Error::Invalid("initial state out of range".into()));
        }
        let names: BTreeSet<&String> = states.iter().map(|(n, _)| n).collect();
        if names.len() != states.len() {
            return Err(Error::Invalid("duplicate state name".into()));
        }
        let mut trans: BTreeMap<(usize, Symbol), Vec<Vec<usize>>> = BTreeMap::new();
        for (q, a, kids) in transitions {
            if alphabet.symbol(a.name()) != Some(&a) {
                return Err(Error::UnknownSymbol(a.name().to_string()));
            }
            if kids.len() != a.arity() {
                return Err(Error::ArityMismatch {
                    symbol: a.name().to_string(),
                    expected: a.arity(),
                    found: kids.len(),
                });
            }
            if q >= states.len() || kids.iter().any(|&k| k >= states.len()) {
                return Err(Error::Invalid("transition mentions an unknown state".into()));
            }
            let list = trans.entry((q, a)).or_default();
            if !list.contains(&kids) {
                list.push(kids);
            }
        }
        for list in trans.values_mut() {
            list.sort();
        }
        let (states, priority) = states.into_iter().unzip();
        Ok(ParityAutomaton { alphabet, states, priority, init, trans })
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn priority(&self, q: usize) -> usize {
        self.priority[q]
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn transitions(&self, q: usize, a: &Symbol) -> &[Vec<usize>] {
        self.trans.get(&(q, a.clone())).map_or(&[], Vec::as_slice)
    }

    /// Every transition `(q, a, children)` in order.
    pub fn all_transitions(&self) -> impl Iterator<Item = (usize, &Symbol, &Vec<usize>)> {
        self.trans.iter().flat_map(|((q, a), l)| l.iter().map(move |k| (*q, a, k)))
    }

    /// The priorities in use, increasing.
    pub fn priorities(&self) -> Vec<usize> {
        self.priority.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }
}

impl fmt::Display for ParityAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, a, kids) in self.all_transitions() {
            let k: Vec<&str> = kids.iter().map(|&c| self.states[c].as_str()).collect();
            writeln!(f, "{} --{}--> ({})", self.states[q], a, k.join(", "))?;
        }
        Ok(())
    }
}

/// A state per node, holes included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub states: BTreeMap<Address, usize>,
}

/// Root state, and per hole the least priority on the way to it (root and
/// hole included) with the state there; `None` for holes the tree lacks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Profile {
    pub root: usize,
    pub holes: Vec<Option<(usize, usize)>>,
}

/// All locally consistent runs, root state first, then transitions in order.
pub fn enumerate_runs(a: &ParityAutomaton, t: &RankedTree<Symbol>) -> Vec<Run> {
    let labelled: Vec<(&Address, &Symbol)> = t.labels().collect();
    let mut out = Vec::new();
    fn go(
        a: &ParityAutomaton,
        labelled: &[(&Address, &Symbol)],
        i: usize,
        run: &mut BTreeMap<Address, usize>,
        out: &mut Vec<Run>,
    ) {
        let Some(&(at, sym)) = labelled.get(i) else {
            out.push(Run { states: run.clone() });
            return;
        };
        let q = run[at];
        for kids in a.transitions(q, sym) {
            for (j, &c) in kids.iter().enumerate() {
                run.insert(at.child(j), c);
            }
            go(a, labelled, i + 1, run, out);
        }
        for j in 0..sym.arity() {
            run.remove(&at.child(j));
        }
    }
    for q in 0..a.states.len() {
        let mut run = BTreeMap::from([(Address::root(), q)]);
        go(a, &labelled, 0, &mut run, &mut out);
    }
    out
}

pub fn profile_of(a: &ParityAutomaton, t: &RankedTree<Symbol>, run: &Run) -> Profile {
    let mut holes = vec![None; t.declared_arity()];
    for (i, at) in t.holes() {
        let mut d = a.priority(run.states[&Address::root()]);
        let mut here = Address::root();
        for &k in at.path() {
            here = here.child(k);
            d = d.min(a.priority(run.states[&here]));
        }
        holes[i] = Some((d, run.states[&at]));
    }
    Profile { root: run.states[&Address::root()], holes }
}

/// Bottom-up run existence with the root in `q0`.
pub fn accepts_finite(a: &ParityAutomaton, t: &RankedTree<Symbol>) -> Result<bool> {
    if !t.is_closed() {
        return Err(Error::Invalid("membership of a tree with holes".into()));
    }
    let mut ok: BTreeMap<&Address, BTreeSet<usize>> = BTreeMap::new();
    let labelled: Vec<(&Address, &Symbol)> = t.labels().collect();
    for &(at, sym) in labelled.iter().rev() {
        let kids: Vec<&BTreeSet<usize>> =
            (0..sym.arity()).map(|j| &ok[&at.child(j)]).collect();
        let here: BTreeSet<usize> = (0..a.states.len())
            .filter(|&q| {
                a.transitions(q, sym)
                    .iter()
                    .any(|tr| tr.iter().zip(&kids).all(|(c, set)| set.contains(c)))
            })
            .collect();
        ok.insert(at, here);
    }
    Ok(ok[&Address::root()].contains(&a.init))
}

/// The ω-semigroup of an automaton: `S0 = Q`, `S1 = Q × D × Q`.
#[derive(Clone, Debug)]
pub struct AutomatonSg {
    wilke: WilkeAlgebra,
    states: usize,
    prios: Vec<usize>,
}

/// Position of a priority in `1 ⊏ 3 ⊏ 5 ⊏ … ⊏ 4 ⊏ 2 ⊏ 0`.
pub fn priority_rank(k: usize) -> (u8, i64) {
    if k % 2 == 1 {
        (0, k as i64)
    } else {
        (1, -(k as i64))
    }
}

impl AutomatonSg {
    pub fn wilke(&self) -> &WilkeAlgebra {
        &self.wilke
    }

    pub fn into_wilke(self) -> WilkeAlgebra {
        self.wilke
    }

    pub fn priorities(&self) -> &[usize] {
        &self.prios
    }

    /// Index of `⟨p, k, q⟩`; `k` must be a priority of the automaton.
    pub fn triple(&self, p: usize, k: usize, q: usize) -> usize {
        let ki = self.prios.binary_search(&k).expect("priority in use");
        (p * self.prios.len() + ki) * self.states + q
    }

    pub fn decode(&self, s: usize) -> (usize, usize, usize) {
        let q = s % self.states;
        let rest = s / self.states;
        (rest / self.prios.len(), self.prios[rest % self.prios.len()], q)
    }
}

pub fn automaton_sg(a: &ParityAutomaton) -> AutomatonSg {
    let nq = a.states.len();
    let prios = a.priorities();
    let nd = prios.len();
    let mut names1 = Vec::with_capacity(nq * nd * nq);
    for p in 0..nq {
        for &k in &prios {
            for q in 0..nq {
                names1.push(format!("<{},{},{}>", a.states[p], k, a.states[q]));
            }
        }
    }
    let mut ranked = prios.clone();
    ranked.sort_by_key(|&k| priority_rank(k));
    let idx = |p: usize, k: usize, q: usize| (p * nd + prios.binary_search(&k).expect("in use")) * nq + q;
    let mut gen1 = Vec::new();
    for p in 0..nq {
        for q in 0..nq {
            for w in ranked.windows(2) {
                gen1.push((idx(p, w[0], q), idx(p, w[1], q)));
            }
        }
    }
    let mut w = WilkeAlgebra::new(a.states.clone(), names1, Vec::new(), gen1)
        .expect("state and triple names are distinct");
    for p in 0..nq {
        for &k in &prios {
            for q in 0..nq {
                let s = idx(p, k, q);
                w.set_mix(s, q, p);
                for &l in &prios {
                    for r in 0..nq {
                        w.set_bin(s, idx(q, l, r), idx(p, k.min(l), r));
                    }
                }
                if p == q && k % 2 == 0 {
                    w.set_omega(s, p);
                }
            }
        }
    }
    AutomatonSg { wilke: w, states: nq, prios }
}

/// The automaton together with `Branch(S_A)`, for evaluating `α_A`.
#[derive(Clone, Debug)]
pub struct Recognizer {
    automaton: ParityAutomaton,
    sg: AutomatonSg,
    branch: BranchAlgebra,
}

impl Recognizer {
    pub fn new(automaton: ParityAutomaton, max_arity: usize) -> Self {
        let sg = automaton_sg(&automaton);
        let branch = BranchAlgebra::new(TaAlgebra::new(sg.wilke.clone(), max_arity));
        Recognizer { automaton, sg, branch }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.branch = self.branch.with_budget(budget);
        self
    }

    pub fn automaton(&self) -> &ParityAutomaton {
        &self.automaton
    }

    pub fn sg(&self) -> &AutomatonSg {
        &self.sg
    }

    pub fn branch(&self) -> &BranchAlgebra {
        &self.branch
    }

    pub fn ta(&self) -> &TaAlgebra {
        self.branch.ta()
    }

    /// `p̃` and the hole triples of one run, as an upset.
    pub fn profile_upset(&self, t: &RankedTree<Symbol>, pf: &Profile) -> crate::order::UpSet<TaElem> {
        let n = t.declared_arity();
        let ta = self.ta();
        let has_leaf = t.labels().any(|(_, s)| s.arity() == 0);
        let mut elems = Vec::new();
        if has_leaf {
            elems.push(ta.closed(pf.root, n));
        }
        for (i, h) in pf.holes.iter().enumerate() {
            if let Some((d, q)) = *h {
                elems.push(ta.open(self.sg.triple(pf.root, d, q), i, n));
            }
        }
        ta.up_of(n, elems)
    }

    /// `α_A(t)`: the downset generated by the tilde-profiles of all runs.
    pub fn alpha(&self, t: &RankedTree<Symbol>) -> Result<BranchElem> {
        if t.declared_arity() > self.ta().max_arity() {
            return Err(Error::Invalid(format!(
                "arity {} exceeds the algebra's bound {}",
                t.declared_arity(),
                self.ta().max_arity()
            )));
        }
        let members: Vec<_> = enumerate_runs(&self.automaton, t)
            .iter()
            .map(|r| self.profile_upset(t, &profile_of(&self.automaton, t, r)))
            .collect();
        Ok(self.branch.down_of(t.declared_arity(), members))
    }

    /// Whether `α_A(t)` lies in the accepting set.
    pub fn recognizes(&self, e: &BranchElem) -> Result<bool> {
        recognize(self.ta(), e, self.automaton.init)
    }
}

/// Acceptance game on `G × Q`: Eve picks a transition, Adam a direction.
pub fn membership_game(a: &ParityAutomaton, g: &TreeGraph<Symbol>) -> Result<bool> {
    if !g.is_closed() {
        return Err(Error::Invalid("membership of a graph with holes".into()));
    }
    let nq = a.states.len();
    let mut game = ParityGame::default();
    let win = game.add_node(0, 0);
    game.add_edge(win, win);
    let lose = game.add_node(0, 1);
    game.add_edge(lose, lose);
    let eve: Vec<usize> = (0..g.len() * nq).map(|i| game.add_node(0, a.priority(i % nq))).collect();
    for v in 0..g.len() {
        let Node::Label(sym) = g.node(v) else { unreachable!("closed") };
        for q in 0..nq {
            let me = eve[v * nq + q];
            let trs = a.transitions(q, sym);
            if trs.is_empty() {
                game.add_edge(me, lose);
            }
            for kids in trs {
                let adam = game.add_node(1, a.priority(q));
                game.add_edge(me, adam);
                if kids.is_empty() {
                    game.add_edge(adam, win);
                }
                for (j, &c) in kids.iter().enumerate() {
                    game.add_edge(adam, eve[g.succ(v)[j] * nq + c]);
                }
            }
        }
    }
    Ok(game.solve()[eve[g.root() * nq + a.init]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

pub const DEFAULT_ANNOTATION_BUDGET: usize = 100_000;

/// Searches positional annotations `(v, q) ↦ transition` from `(root, q0)`;
/// one whose strategy graph has no undefined path value witnesses
/// acceptance. More than `budget` complete annotations gives up.
pub fn membership_algebraic(
    a: &ParityAutomaton,
    sg: &AutomatonSg,
    g: &TreeGraph<Symbol>,
    budget: usize,
) -> Result<Verdict> {
    if !g.is_closed() {
        return Err(Error::Invalid("membership of a graph with holes".into()));
    }
    struct Search<'a> {
        a: &'a ParityAutomaton,
        sg: &'a AutomatonSg,
        g: &'a TreeGraph<Symbol>,
        choice: BTreeMap<(usize, usize), usize>,
        count: usize,
        budget: usize,
    }
    impl Search<'_> {
        fn sym(&self, v: usize) -> &Symbol {
            match self.g.node(v) {
                Node::Label(s) => s,
                Node::Hole(_) => unreachable!("closed"),
            }
        }

        /// `Some(true)` on success, `None` when out of budget.
        fn go(&mut self, mut pending: Vec<(usize, usize)>) -> Option<bool> {
            let Some(key @ (v, q)) = pending.pop() else {
                self.count += 1;
                if self.count > self.budget {
                    return None;
                }
                return Some(self.evaluate());
            };
            if self.choice.contains_key(&key) {
                return self.go(pending);
            }
            let sym = self.sym(v).clone();
            let n = self.a.transitions(q, &sym).len();
            for i in 0..n {
                self.choice.insert(key, i);
                let kids = &self.a.transitions(q, &sym)[i];
                let mut next = pending.clone();
                for (j, &c) in kids.iter().enumerate() {
                    let k = (self.g.succ(v)[j], c);
                    if !self.choice.contains_key(&k) {
                        next.push(k);
                    }
                }
                match self.go(next) {
                    Some(false) => {}
                    other => {
                        self.choice.remove(&key);
                        return other;
                    }
                }
            }
            self.choice.remove(&key);
            Some(false)
        }

        fn evaluate(&self) -> bool {
            let keys: Vec<(usize, usize)> = self.choice.keys().copied().collect();
            let index: BTreeMap<(usize, usize), usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
            let mut lg = LabelledGraph {
                vertices: keys.len(),
                root: index[&(self.g.root(), self.a.init)],
                ..Default::default()
            };
            for (&(v, q), &i) in &self.choice {
                let kids = &self.a.transitions(q, self.sym(v))[i];
                let from = index[&(v, q)];
                if kids.is_empty() {
                    lg.stops.push((from, q));
                }
                for (j, &c) in kids.iter().enumerate() {
                    let to = index[&(self.g.succ(v)[j], c)];
                    lg.edges.push((from, to, self.sg.triple(q, self.a.priority(c), c)));
                }
            }
            !limit_set(self.sg.wilke(), &lg).is_undefined()
        }
    }
    let mut s = Search { a, sg, g, choice: BTreeMap::new(), count: 0, budget };
    Ok(match s.go(vec![(g.root(), a.init)]) {
        Some(true) => Verdict::Accept,
        Some(false) => Verdict::Reject,
        None => Verdict::Inconclusive,
    })
}

/// Meet-continuity of the automaton's ω-semigroup.
pub fn check_sga_meet_continuity(a: &ParityAutomaton, bounds: MeetBounds) -> Report {
    check_meet_continuity_sg(automaton_sg(a).wilke(), bounds)
}

/// A random automaton with `states` states (initial `q0`), priorities drawn
/// from `prios`, and 0–2 transitions per state and letter.
pub fn random_automaton<R: Rng>(
    alphabet: &RankedAlphabet,
    states: usize,
    prios: &[usize],
    rng: &mut R,
) -> ParityAutomaton {
    let st: Vec<(String, usize)> =
        (0..states).map(|q| (format!("q{q}"), prios[rng.gen_range(0..prios.len())])).collect();
    let mut trans = Vec::new();
    for q in 0..states {
        for a in alphabet.symbols() {
            for _ in 0..rng.gen_range(0..=2) {
                let kids = (0..a.arity()).map(|_| rng.gen_range(0..states)).collect();
                trans.push((q, a.clone(), kids));
            }
        }
    }
    ParityAutomaton::new(alphabet.clone(), st, 0, trans).expect("well-formed by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_term;

    fn al() -> RankedAlphabet {
        RankedAlphabet::new(&[("a", 2), ("b", 1), ("c", 0)], &[]).unwrap()
    }

    fn one_state(prio: usize) -> ParityAutomaton {
        let al = al();
        let s = |n: &str| al.symbol(n).unwrap().clone();
        ParityAutomaton::new(
            al.clone(),
            vec![("q0".into(), prio)],
            0,
            vec![(0, s("a"), vec![0, 0]), (0, s("b"), vec![0]), (0, s("c"), vec![])],
        )
        .unwrap()
    }

    #[test]
    fn sg_tables() {
        let st = vec![("p".into(), 0), ("q".into(), 1), ("r".into(), 3)];
        let a = ParityAutomaton::new(al(), st, 0, vec![]).unwrap();
        let sg = automaton_sg(&a);
        let w = sg.wilke();
        let (p, q, r) = (0, 1, 2);
        assert_eq!(w.bin(sg.triple(p, 3, q), sg.triple(q, 0, r)), Some(sg.triple(p, 0, r)));
        assert_eq!(w.bin(sg.triple(p, 3, q), sg.triple(r, 0, r)), None);
        assert_eq!(w.omega(sg.triple(p, 1, p)), None);
        assert_eq!(w.omega(sg.triple(p, 0, p)), Some(p));
        assert!(w.leq1(sg.triple(p, 1, q), sg.triple(p, 3, q)));
        assert!(w.leq1(sg.triple(p, 3, q), sg.triple(p, 0, q)));
        assert!(!w.leq1(sg.triple(p, 0, q), sg.triple(p, 1, q)));
        assert_eq!(sg.decode(sg.triple(2, 3, 1)), (2, 3, 1));
        assert!(crate::omega::wilke_check(w).passed());
    }

    #[test]
    fn runs_and_profiles() {
        let a = one_state(2);
        let t = parse_term("a(b(x0),c)", &al()).unwrap();
        let runs = enumerate_runs(&a, &t);
        assert_eq!(runs.len(), 1);
        let pf = profile_of(&a, &t, &runs[0]);
        assert_eq!(pf, Profile { root: 0, holes: vec![Some((2, 0))] });
        assert!(accepts_finite(&a, &parse_term("a(c,b(c))", &al()).unwrap()).unwrap());
    }

    #[test]
    fn loops_by_both_methods() {
        let g = TreeGraph::new(0, 0, vec![Node::Label(al().symbol("a").unwrap().clone())], vec![vec![0, 0]])
            .unwrap();
        for (prio, want) in [(0, true), (1, false)] {
            let a = one_state(prio);
            let sg = automaton_sg(&a);
            assert_eq!(membership_game(&a, &g).unwrap(), want);
            let v = membership_algebraic(&a, &sg, &g, DEFAULT_ANNOTATION_BUDGET).unwrap();
            assert_eq!(v, if want { Verdict::Accept } else { Verdict::Reject });
        }
    }

    #[test]
    fn alpha_of_small_terms() {
        let r = Recognizer::new(one_state(2), 2);
        let c = parse_term("c", &al()).unwrap();
        let e = r.alpha(&c).unwrap();
        assert_eq!(e, r.branch().embed(&r.ta().closed(0, 0)));
        assert!(r.recognizes(&e).unwrap());
        // unary letter over a hole: p̃ = ⊤, one triple
        let b = parse_term("b(x0)", &al()).unwrap();
        let e = r.alpha(&b).unwrap();
        assert_eq!(e.maximals().len(), 1);
        assert_eq!(e.maximals()[0].minimals(), &[r.ta().open(r.sg().triple(0, 2, 0), 0, 1)]);
    }
}
