use std::collections::BTreeMap;

use crate::tree::{Address, Node, RankedAlphabet, RankedTree, Ranked, Symbol, Term};

use super::TreeAlgebra;

/// A finite algebra given by named elements and a table of products of small
/// trees. Other trees are evaluated by reducing every argument subtree to a
/// single element first (valid by associativity); whatever the table does not
/// cover stays undefined. Singletons always evaluate to their label.
#[derive(Clone, Debug)]
pub struct TableAlgebra {
    name: String,
    elements: RankedAlphabet,
    table: BTreeMap<RankedTree<Symbol>, Symbol>,
    max_arity: usize,
}

impl TableAlgebra {
    pub fn new(
        name: impl Into<String>,
        elements: RankedAlphabet,
        table: BTreeMap<RankedTree<Symbol>, Symbol>,
    ) -> Self {
        let max_arity = elements.max_arity();
        TableAlgebra { name: name.into(), elements, table, max_arity }
    }

    pub fn elements(&self) -> &RankedAlphabet {
        &self.elements
    }

    pub fn table(&self) -> &BTreeMap<RankedTree<Symbol>, Symbol> {
        &self.table
    }

    fn reduce(&self, t: &RankedTree<Symbol>) -> Option<RankedTree<Symbol>> {
        let root = t.root_label().clone();
        let mut kids = Vec::new();
        let mut changed = false;
        for i in 0..root.arity() {
            let at = Address::root().child(i);
            match t.get(&at)? {
                Node::Hole(h) => kids.push(Term::Hole(*h)),
                Node::Label(l) if l.arity() == 0 => kids.push(Term::leaf(l.clone())),
                Node::Label(_) => {
                    let sub = t.subtree(&at);
                    let holes: Vec<usize> = sub.holes().into_keys().collect();
                    let local = sub.renumber_holes(holes.len(), |h| {
                        holes.iter().position(|&g| g == h).expect("hole of the subtree")
                    });
                    let v = self.product(&local)?;
                    let is_flat = sub.size() == holes.len() + 1
                        && holes.iter().enumerate().all(|(j, &h)| {
                            sub.get(&Address::root().child(j)) == Some(&Node::Hole(h))
                        });
                    changed |= !is_flat;
                    kids.push(Term::App(v, holes.into_iter().map(Term::Hole).collect()));
                }
            }
        }
        if !changed {
            return None;
        }
        RankedTree::from_term(t.declared_arity(), &Term::App(root, kids)).ok()
    }
}

impl TreeAlgebra for TableAlgebra {
    type Elem = Symbol;

    fn name(&self) -> String {
        self.name.clone()
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn leq(&self, a: &Symbol, b: &Symbol) -> bool {
        self.elements.leq(a, b)
    }

    fn product(&self, t: &RankedTree<Symbol>) -> Option<Symbol> {
        if let Some(v) = self.table.get(t) {
            return Some(v.clone());
        }
        if *t == RankedTree::singleton(t.root_label().clone()) {
            return Some(t.root_label().clone());
        }
        let r = self.reduce(t)?;
        self.product(&r)
    }

    fn carrier(&self, n: usize) -> Option<Vec<Symbol>> {
        Some(self.elements.of_arity(n).cloned().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_term_with;

    #[test]
    fn reduces_through_the_table() {
        // a unary "successor mod 2" over {z, o}
        let el = RankedAlphabet::new(&[("z", 0), ("o", 0), ("s", 1)], &[]).unwrap();
        let p = |s: &str| parse_term_with(s, None, |n| el.symbol(n).cloned()).unwrap();
        let mut table = BTreeMap::new();
        table.insert(p("s(z)"), el.symbol("o").unwrap().clone());
        table.insert(p("s(o)"), el.symbol("z").unwrap().clone());
        let alg = TableAlgebra::new("mod2", el.clone(), table);
        assert_eq!(alg.product(&p("s(s(s(z)))")).unwrap().name(), "o");
        assert_eq!(alg.product(&p("s(x0)")).unwrap().name(), "s");
        assert_eq!(alg.product(&p("z")).unwrap().name(), "z");
    }
}
