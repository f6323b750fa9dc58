//! Line-based text formats, one per object kind. Every line is a keyword
//! followed by whitespace-separated fields; blank lines and lines starting
//! with `#` are ignored. Printers emit the canonical form, so
//! `print(parse(print(x))) == print(x)` byte for byte, and errors carry the
//! 1-based line number.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::algebra::TableAlgebra;
use crate::automaton::ParityAutomaton;
use crate::error::{Error, Result};
use crate::graphs::TreeGraph;
use crate::omega::{Sort, WilkeAlgebra};
use crate::order::UpSet;
use crate::tree::{parse_term_with, Node, Ranked, RankedAlphabet, RankedTree, Symbol};
use crate::treesg::{TaAlgebra, TaElem, TaValue};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Attaches a line number to errors that lack one.
fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Parse { .. } => e,
        e => err(line, e.to_string()),
    })
}

/// Non-comment lines as `(line number, fields)`.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn number(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| err(line, format!("expected a number, found `{s}`")))
}

fn expect_len(line: usize, f: &[&str], n: usize, shape: &str) -> Result<()> {
    if f.len() == n {
        Ok(())
    } else {
        Err(err(line, format!("expected `{shape}`")))
    }
}

// ---------------------------------------------------------------- alphabets

/// `symbol <name> <arity>` and `le <a> <b>` lines.
pub fn parse_alphabet(text: &str) -> Result<RankedAlphabet> {
    let mut syms = Vec::new();
    let mut order = Vec::new();
    let mut last = 0;
    for (ln, f) in lines(text) {
        last = ln;
        match f[0] {
            "symbol" => {
                expect_len(ln, &f, 3, "symbol <name> <arity>")?;
                syms.push(Symbol::new(f[1], number(ln, f[2])?));
            }
            "le" => {
                expect_len(ln, &f, 3, "le <a> <b>")?;
                order.push((f[1].to_string(), f[2].to_string()));
            }
            k => return Err(err(ln, format!("unknown keyword `{k}`"))),
        }
    }
    at(last, RankedAlphabet::from_symbols(syms, order))
}

pub fn print_alphabet(al: &RankedAlphabet) -> String {
    let mut out = String::new();
    for s in al.symbols() {
        let _ = writeln!(out, "symbol {} {}", s.name(), s.arity());
    }
    for (a, b) in al.order_generators() {
        let _ = writeln!(out, "le {a} {b}");
    }
    out
}

// ----------------------------------------------------------- table algebras

/// `name <n>` (optional), `elem <name> <arity>`, `le <a> <b>` and
/// `pi <term> = <element>` lines; the term takes the element's arity.
pub fn parse_table_algebra(text: &str) -> Result<TableAlgebra> {
    let mut name = "table".to_string();
    let mut elems = Vec::new();
    let mut order = Vec::new();
    let mut rows = Vec::new();
    let mut last = 0;
    for (ln, f) in lines(text) {
        last = ln;
        match f[0] {
            "name" => {
                expect_len(ln, &f, 2, "name <n>")?;
                name = f[1].to_string();
            }
            "elem" => {
                expect_len(ln, &f, 3, "elem <name> <arity>")?;
                elems.push(Symbol::new(f[1], number(ln, f[2])?));
            }
            "le" => {
                expect_len(ln, &f, 3, "le <a> <b>")?;
                order.push((f[1].to_string(), f[2].to_string()));
            }
            "pi" => {
                let rest = f[1..].join(" ");
                let (term, value) =
                    rest.rsplit_once('=').ok_or_else(|| err(ln, "expected `pi <term> = <element>`"))?;
                rows.push((ln, term.trim().to_string(), value.trim().to_string()));
            }
            k => return Err(err(ln, format!("unknown keyword `{k}`"))),
        }
    }
    let al = at(last, RankedAlphabet::from_symbols(elems, order))?;
    let mut table = BTreeMap::new();
    for (ln, term, value) in rows {
        let v = al.symbol(&value).cloned().ok_or_else(|| err(ln, format!("unknown element `{value}`")))?;
        let t = at(ln, parse_term_with(&term, Some(v.arity()), |s| al.symbol(s).cloned()))?;
        if table.insert(t, v).is_some() {
            return Err(err(ln, format!("`{term}` has two values")));
        }
    }
    Ok(TableAlgebra::new(name, al, table))
}

pub fn print_table_algebra(alg: &TableAlgebra) -> String {
    use crate::algebra::TreeAlgebra;
    let mut out = format!("name {}\n", alg.name());
    for s in alg.elements().symbols() {
        let _ = writeln!(out, "elem {} {}", s.name(), s.arity());
    }
    for (a, b) in alg.elements().order_generators() {
        let _ = writeln!(out, "le {a} {b}");
    }
    for (t, v) in alg.table() {
        let _ = writeln!(out, "pi {t} = {v}");
    }
    out
}

// ---------------------------------------------------------- Wilke algebras

/// `s0 <names…>`, `s1 <names…>`, `mix <s> <a> = <b>`, `bin <s> <t> = <u>`,
/// `omega <s> = <a>` and `le <x> <y>` lines. The sorts come first.
pub fn parse_wilke(text: &str) -> Result<WilkeAlgebra> {
    let mut s0: Option<Vec<String>> = None;
    let mut s1: Option<Vec<String>> = None;
    let mut rest = Vec::new();
    for (ln, f) in lines(text) {
        match f[0] {
            "s0" if s0.is_none() => s0 = Some(f[1..].iter().map(|s| s.to_string()).collect()),
            "s1" if s1.is_none() => s1 = Some(f[1..].iter().map(|s| s.to_string()).collect()),
            "s0" | "s1" => return Err(err(ln, format!("`{}` given twice", f[0]))),
            _ => rest.push((ln, f)),
        }
    }
    let (Some(s0), Some(s1)) = (s0, s1) else {
        return Err(err(1, "missing `s0` or `s1` line"));
    };
    let lookup0 = |ln: usize, n: &str| s0.iter().position(|x| x == n).ok_or_else(|| err(ln, format!("`{n}` is not in S0")));
    let lookup1 = |ln: usize, n: &str| s1.iter().position(|x| x == n).ok_or_else(|| err(ln, format!("`{n}` is not in S1")));
    let (mut g0, mut g1) = (Vec::new(), Vec::new());
    let mut ops = Vec::new();
    for (ln, f) in rest {
        match f[0] {
            "le" => {
                expect_len(ln, &f, 3, "le <x> <y>")?;
                match (lookup0(ln, f[1]), lookup0(ln, f[2]), lookup1(ln, f[1]), lookup1(ln, f[2])) {
                    (Ok(a), Ok(b), _, _) => g0.push((a, b)),
                    (_, _, Ok(s), Ok(t)) => g1.push((s, t)),
                    _ => return Err(err(ln, "`le` relates two elements of the same sort")),
                }
            }
            "mix" | "bin" => {
                expect_len(ln, &f, 5, &format!("{} <x> <y> = <z>", f[0]))?;
                if f[3] != "=" {
                    return Err(err(ln, "expected `=`"));
                }
                ops.push((ln, f));
            }
            "omega" => {
                expect_len(ln, &f, 4, "omega <s> = <a>")?;
                if f[2] != "=" {
                    return Err(err(ln, "expected `=`"));
                }
                ops.push((ln, f));
            }
            k => return Err(err(ln, format!("unknown keyword `{k}`"))),
        }
    }
    let mut w = at(1, WilkeAlgebra::new(s0.clone(), s1.clone(), g0, g1))?;
    for (ln, f) in ops {
        match f[0] {
            "mix" => w.set_mix(lookup1(ln, f[1])?, lookup0(ln, f[2])?, lookup0(ln, f[4])?),
            "bin" => w.set_bin(lookup1(ln, f[1])?, lookup1(ln, f[2])?, lookup1(ln, f[4])?),
            _ => w.set_omega(lookup1(ln, f[1])?, lookup0(ln, f[3])?),
        }
    }
    Ok(w)
}

pub fn print_wilke(w: &WilkeAlgebra) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "s0 {}", w.names0().join(" "));
    let _ = writeln!(out, "s1 {}", w.names1().join(" "));
    for &(a, b) in w.order_generators0() {
        let _ = writeln!(out, "le {} {}", w.name0(a), w.name0(b));
    }
    for &(s, t) in w.order_generators1() {
        let _ = writeln!(out, "le {} {}", w.name1(s), w.name1(t));
    }
    for s in 0..w.n1() {
        for a in 0..w.n0() {
            if let Some(b) = w.mix(s, a) {
                let _ = writeln!(out, "mix {} {} = {}", w.name1(s), w.name0(a), w.name0(b));
            }
        }
    }
    for s in 0..w.n1() {
        for t in 0..w.n1() {
            if let Some(u) = w.bin(s, t) {
                let _ = writeln!(out, "bin {} {} = {}", w.name1(s), w.name1(t), w.name1(u));
            }
        }
    }
    for s in 0..w.n1() {
        if let Some(a) = w.omega(s) {
            let _ = writeln!(out, "omega {} = {}", w.name1(s), w.name0(a));
        }
    }
    out
}

// ------------------------------------------------------------------ graphs

/// `arity <n>` (optional, default 0), `root <v>`, `vertex <v> <label> <succ…>`
/// and `hole <v> <i>` lines. Vertices are numbered `0..n` without gaps;
/// `label(token, k)` resolves a label for a vertex with `k` successors.
pub fn parse_graph_with<L: Ranked>(text: &str, label: impl Fn(&str, usize) -> Result<L>) -> Result<TreeGraph<L>> {
    let mut arity = 0;
    let mut root = None;
    let mut verts: BTreeMap<usize, (usize, Node<L>, Vec<usize>)> = BTreeMap::new();
    let mut last = 0;
    for (ln, f) in lines(text) {
        last = ln;
        match f[0] {
            "arity" => {
                expect_len(ln, &f, 2, "arity <n>")?;
                arity = number(ln, f[1])?;
            }
            "root" => {
                expect_len(ln, &f, 2, "root <v>")?;
                root = Some(number(ln, f[1])?);
            }
            "vertex" => {
                if f.len() < 3 {
                    return Err(err(ln, "expected `vertex <v> <label> <succ…>`"));
                }
                let v = number(ln, f[1])?;
                let succ = f[3..].iter().map(|s| number(ln, s)).collect::<Result<Vec<_>>>()?;
                let l = at(ln, label(f[2], succ.len()))?;
                if verts.insert(v, (ln, Node::Label(l), succ)).is_some() {
                    return Err(err(ln, format!("vertex {v} declared twice")));
                }
            }
            "hole" => {
                expect_len(ln, &f, 3, "hole <v> <i>")?;
                let v = number(ln, f[1])?;
                if verts.insert(v, (ln, Node::Hole(number(ln, f[2])?), Vec::new())).is_some() {
                    return Err(err(ln, format!("vertex {v} declared twice")));
                }
            }
            k => return Err(err(ln, format!("unknown keyword `{k}`"))),
        }
    }
    let root = root.ok_or_else(|| err(last.max(1), "missing `root` line"))?;
    let n = verts.len();
    let mut nodes = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    for (i, (v, (ln, node, s))) in verts.into_iter().enumerate() {
        if v != i {
            return Err(err(ln, format!("vertices must be numbered 0..{n} without gaps")));
        }
        if let Some(&bad) = s.iter().find(|&&w| w >= n) {
            return Err(err(ln, format!("successor {bad} is not a vertex")));
        }
        nodes.push(node);
        succ.push(s);
    }
    at(last, TreeGraph::new(arity, root, nodes, succ))
}

pub fn print_graph_with<L>(g: &TreeGraph<L>, label: impl Fn(&L) -> String) -> String {
    let mut out = String::new();
    if g.declared_arity() > 0 {
        let _ = writeln!(out, "arity {}", g.declared_arity());
    }
    let _ = writeln!(out, "root {}", g.root());
    for v in 0..g.len() {
        match g.node(v) {
            Node::Hole(i) => {
                let _ = writeln!(out, "hole {v} {i}");
            }
            Node::Label(l) => {
                let _ = write!(out, "vertex {v} {}", label(l));
                for w in g.succ(v) {
                    let _ = write!(out, " {w}");
                }
                out.push('\n');
            }
        }
    }
    out
}

/// A graph over an alphabet; every label's arity must match its successors.
pub fn parse_graph(text: &str, al: &RankedAlphabet) -> Result<TreeGraph<Symbol>> {
    parse_graph_with(text, |tok, k| {
        let s = al.symbol(tok).cloned().ok_or_else(|| Error::UnknownSymbol(tok.to_string()))?;
        if s.arity() != k {
            return Err(Error::ArityMismatch { symbol: tok.to_string(), expected: s.arity(), found: k });
        }
        Ok(s)
    })
}

pub fn print_graph(g: &TreeGraph<Symbol>) -> String {
    print_graph_with(g, |s| s.name().to_string())
}

/// A label of `cl(S)`: `top`, or members joined by `|`, each `a` (an `S0`
/// element) or `s@k` (an `S1` element on port `k`).
pub fn parse_cl_label(ta: &TaAlgebra, tok: &str, arity: usize) -> Result<UpSet<TaElem>> {
    if tok == "top" {
        return Ok(UpSet::top(arity));
    }
    let w = ta.wilke();
    let mut xs = Vec::new();
    for m in tok.split('|') {
        let v = match m.split_once('@') {
            Some((s, k)) => {
                let Some(Sort::Unary(s)) = w.lookup(s) else {
                    return Err(Error::Invalid(format!("`{s}` is not in S1")));
                };
                let k: usize = k.parse().map_err(|_| Error::Invalid(format!("bad port in `{m}`")))?;
                if k >= arity {
                    return Err(Error::HoleOutOfRange { index: k, arity });
                }
                TaValue::Open(s, k)
            }
            None => match w.lookup(m) {
                Some(Sort::Nullary(a)) => TaValue::Closed(a),
                _ => return Err(Error::Invalid(format!("`{m}` is not in S0"))),
            },
        };
        xs.push(ta.make(v, arity));
    }
    Ok(ta.up_of(arity, xs))
}

pub fn print_cl_label(ta: &TaAlgebra, u: &UpSet<TaElem>) -> String {
    if u.is_top() {
        return "top".into();
    }
    let w = ta.wilke();
    u.minimals()
        .iter()
        .map(|x| match x.value() {
            TaValue::Closed(a) => w.name0(a).to_string(),
            TaValue::Open(s, k) => format!("{}@{k}", w.name1(s)),
        })
        .collect::<Vec<_>>()
        .join("|")
}

// -------------------------------------------------------------- automata

/// `symbol <name> <arity>`, `le <a> <b>`, `state <q> priority <k>`,
/// `init <q>` and `trans <q> <symbol> <q1…qn>` lines.
pub fn parse_automaton(text: &str) -> Result<ParityAutomaton> {
    let mut al_text = String::new();
    let mut states: Vec<(String, usize)> = Vec::new();
    let mut init = None;
    let mut trans = Vec::new();
    let mut last = 0;
    for (ln, f) in lines(text) {
        last = ln;
        match f[0] {
            // keep line numbers for alphabet errors by padding
            "symbol" | "le" => {
                while al_text.lines().count() + 1 < ln {
                    al_text.push('\n');
                }
                al_text.push_str(&f.join(" "));
                al_text.push('\n');
            }
            "state" => {
                if f.len() != 4 || f[2] != "priority" {
                    return Err(err(ln, "expected `state <q> priority <k>`"));
                }
                if states.iter().any(|(n, _)| n == f[1]) {
                    return Err(err(ln, format!("state `{}` declared twice", f[1])));
                }
                states.push((f[1].to_string(), number(ln, f[3])?));
            }
            "init" => {
                expect_len(ln, &f, 2, "init <q>")?;
                init = Some((ln, f[1].to_string()));
            }
            "trans" => {
                if f.len() < 3 {
                    return Err(err(ln, "expected `trans <q> <symbol> <q1…qn>`"));
                }
                trans.push((ln, f.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
            }
            k => return Err(err(ln, format!("unknown keyword `{k}`"))),
        }
    }
    let al = parse_alphabet(&al_text)?;
    let state = |ln: usize, n: &str| {
        states.iter().position(|(m, _)| m == n).ok_or_else(|| err(ln, format!("unknown state `{n}`")))
    };
    let (iln, iname) = init.ok_or_else(|| err(last.max(1), "missing `init` line"))?;
    let init = state(iln, &iname)?;
    let mut ts = Vec::new();
    for (ln, f) in &trans {
        let q = state(*ln, &f[1])?;
        let a = al.symbol(&f[2]).cloned().ok_or_else(|| err(*ln, format!("unknown symbol `{}`", f[2])))?;
        let kids = f[3..].iter().map(|k| state(*ln, k)).collect::<Result<Vec<_>>>()?;
        if kids.len() != a.arity() {
            return Err(err(*ln, format!("`{}` has arity {} but got {} states", f[2], a.arity(), kids.len())));
        }
        ts.push((q, a, kids));
    }
    at(last, ParityAutomaton::new(al, states, init, ts))
}

pub fn print_automaton(a: &ParityAutomaton) -> String {
    let mut out = print_alphabet(a.alphabet());
    for (q, name) in a.states().iter().enumerate() {
        let _ = writeln!(out, "state {name} priority {}", a.priority(q));
    }
    let _ = writeln!(out, "init {}", a.states()[a.init()]);
    for (q, s, kids) in a.all_transitions() {
        let _ = write!(out, "trans {} {}", a.states()[q], s.name());
        for &k in kids {
            let _ = write!(out, " {}", a.states()[k]);
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------- configuration

/// Tunables shared by the command-line tools.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkspaceConfig {
    pub max_arity: usize,
    pub samples: usize,
    pub seed: u64,
    /// Node bound for sampled trees.
    pub tree_size: usize,
    /// Vertex bound for graphs.
    pub graph_vertices: usize,
    /// Size bound for set-valued labels.
    pub set_size: usize,
    pub annotation_budget: usize,
    pub outer_section_budget: usize,
}

impl Default for WorkspaceConfig {
    fn default() -> Self {
        WorkspaceConfig {
            max_arity: 2,
            samples: 500,
            seed: 0,
            tree_size: 8,
            graph_vertices: 3,
            set_size: 2,
            annotation_budget: crate::automaton::DEFAULT_ANNOTATION_BUDGET,
            outer_section_budget: crate::branch::DEFAULT_SECTION_BUDGET,
        }
    }
}

const CONFIG_KEYS: [&str; 8] = [
    "max_arity",
    "samples",
    "seed",
    "tree_size",
    "graph_vertices",
    "set_size",
    "annotation_budget",
    "outer_section_budget",
];

/// `key = value` lines overriding `base`. Every bound must be positive.
pub fn parse_config(text: &str, base: WorkspaceConfig) -> Result<WorkspaceConfig> {
    let mut c = base;
    for (ln, _) in lines(text) {
        let raw = text.lines().nth(ln - 1).unwrap_or_default();
        let (k, v) = raw.split_once('=').ok_or_else(|| err(ln, "expected `key = value`"))?;
        let (k, v) = (k.trim(), v.trim());
        let n: u64 = v.parse().map_err(|_| err(ln, format!("expected a number, found `{v}`")))?;
        if k != "seed" && n == 0 {
            return Err(err(ln, format!("`{k}` must be positive")));
        }
        let n_us = usize::try_from(n).map_err(|_| err(ln, "value too large"))?;
        match k {
            "max_arity" => c.max_arity = n_us,
            "samples" => c.samples = n_us,
            "seed" => c.seed = n,
            "tree_size" => c.tree_size = n_us,
            "graph_vertices" => c.graph_vertices = n_us,
            "set_size" => c.set_size = n_us,
            "annotation_budget" => c.annotation_budget = n_us,
            "outer_section_budget" => c.outer_section_budget = n_us,
            _ => return Err(err(ln, format!("unknown key `{k}` (known: {})", CONFIG_KEYS.join(", ")))),
        }
    }
    Ok(c)
}

pub fn print_config(c: &WorkspaceConfig) -> String {
    let vals = [
        c.max_arity as u64,
        c.samples as u64,
        c.seed,
        c.tree_size as u64,
        c.graph_vertices as u64,
        c.set_size as u64,
        c.annotation_budget as u64,
        c.outer_section_budget as u64,
    ];
    CONFIG_KEYS.iter().zip(vals).map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// A term over `al`, for command-line arguments.
pub fn parse_tree_arg(text: &str, al: &RankedAlphabet) -> Result<RankedTree<Symbol>> {
    crate::tree::parse_term(text, al)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WILKE: &str = "s0 acc rej\ns1 1 e\nle rej acc\nmix 1 acc = acc\nmix 1 rej = rej\nmix e acc = acc\n\
                         bin 1 1 = 1\nbin 1 e = e\nbin e 1 = e\nbin e e = e\nomega 1 = rej\nomega e = acc\n";

    #[test]
    fn wilke_round_trip() {
        let w = parse_wilke(WILKE).unwrap();
        assert_eq!(print_wilke(&w), WILKE);
        assert!(w.leq0(1, 0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "s0 a\ns1 u\n\nmix u b = a\n";
        assert_eq!(parse_wilke(bad).unwrap_err(), err(4, "`b` is not in S0"));
        let al = RankedAlphabet::new(&[("a", 2), ("c", 0)], &[]).unwrap();
        let e = parse_graph("root 0\nvertex 0 a 1\n", &al).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_automaton("symbol c 0\nstate p priority 0\ninit p\ntrans q c\n").unwrap_err();
        assert_eq!(e, err(4, "unknown state `q`"));
    }

    #[test]
    fn graph_and_cl_labels() {
        let ta = TaAlgebra::new(parse_wilke(WILKE).unwrap(), 2);
        let text = "arity 1\nroot 0\nvertex 0 acc|e@1 2 1\nhole 1 0\nvertex 2 acc\n";
        let g = parse_graph_with(text, |t, k| parse_cl_label(&ta, t, k)).unwrap();
        assert_eq!(print_graph_with(&g, |u| print_cl_label(&ta, u)), text);
        let top = parse_graph_with("root 0\nvertex 0 top\n", |t, k| parse_cl_label(&ta, t, k)).unwrap();
        assert!(top.node(0).label().unwrap().is_top());
    }

    #[test]
    fn automaton_and_config_round_trip() {
        let text = "symbol a 2\nsymbol c 0\nstate p priority 1\nstate q priority 2\ninit p\n\
                    trans p a p q\ntrans p c\ntrans q a q q\n";
        let a = parse_automaton(text).unwrap();
        assert_eq!(print_automaton(&a), text);
        let c = parse_config("seed = 7\n# comment\nsamples = 20\n", WorkspaceConfig::default()).unwrap();
        assert_eq!((c.seed, c.samples), (7, 20));
        assert_eq!(parse_config(&print_config(&c), WorkspaceConfig::default()).unwrap(), c);
        assert!(parse_config("samples = 0\n", c).is_err());
    }

    #[test]
    fn table_round_trip() {
        let text = "name mod2\nelem z 0\nelem o 0\nelem s 1\npi s(o) = z\npi s(z) = o\n";
        let alg = parse_table_algebra(text).unwrap();
        assert_eq!(print_table_algebra(&alg), text);
    }
}
