//! Two small algebras recognising "some label is 1": a naive one that forgets
//! which variables a term uses (and therefore is not associative), and the
//! corrected one that remembers them.

use std::fmt;

use crate::tree::{Address, Node, Ranked, RankedTree};

use super::TreeAlgebra;

/// `0_n` / `1_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bit {
    pub one: bool,
    pub arity: usize,
}

impl Bit {
    pub fn new(one: bool, arity: usize) -> Self {
        Bit { one, arity }
    }
}

impl Ranked for Bit {
    fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", u8::from(self.one), self.arity)
    }
}

pub struct NaiveOccurrence {
    max_arity: usize,
}

pub fn naive_occurrence_algebra(max_arity: usize) -> NaiveOccurrence {
    NaiveOccurrence { max_arity }
}

impl TreeAlgebra for NaiveOccurrence {
    type Elem = Bit;

    fn name(&self) -> String {
        "naive 0/1".into()
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn leq(&self, a: &Bit, b: &Bit) -> bool {
        a.arity == b.arity && a.one <= b.one
    }

    fn product(&self, t: &RankedTree<Bit>) -> Option<Bit> {
        Some(Bit::new(t.labels().any(|(_, b)| b.one), t.declared_arity()))
    }

    fn carrier(&self, n: usize) -> Option<Vec<Bit>> {
        Some(vec![Bit::new(false, n), Bit::new(true, n)])
    }
}

/// `⟨b, u⟩_n`: whether a 1 occurs, and which variables the term uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occ {
    pub one: bool,
    pub vars: u32,
    pub arity: usize,
}

impl Occ {
    pub fn new(one: bool, vars: u32, arity: usize) -> Self {
        debug_assert!(arity >= 32 || vars >> arity == 0);
        Occ { one, vars, arity }
    }

    pub fn uses(&self, i: usize) -> bool {
        self.vars >> i & 1 == 1
    }
}

impl Ranked for Occ {
    fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Occ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", u8::from(self.one))?;
        let mut first = true;
        for i in (0..self.arity).filter(|&i| self.uses(i)) {
            if !first {
                write!(f, "|")?;
            }
            first = false;
            write!(f, "{i}")?;
        }
        write!(f, "}}_{}", self.arity)
    }
}

pub struct Occurrence {
    max_arity: usize,
}

pub fn occurrence_algebra(max_arity: usize) -> Occurrence {
    Occurrence { max_arity }
}

impl TreeAlgebra for Occurrence {
    type Elem = Occ;

    fn name(&self) -> String {
        "occurrence".into()
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn leq(&self, a: &Occ, b: &Occ) -> bool {
        a.arity == b.arity && a.vars == b.vars && a.one <= b.one
    }

    // Only the arguments an element actually uses are live; a 1 or a hole
    // below a dead argument is invisible.
    fn product(&self, t: &RankedTree<Occ>) -> Option<Occ> {
        let mut one = false;
        let mut vars = 0u32;
        let mut stack = vec![Address::root()];
        while let Some(a) = stack.pop() {
            match t.get(&a)? {
                Node::Hole(i) => vars |= 1 << i,
                Node::Label(o) => {
                    one |= o.one;
                    stack.extend((0..o.arity).filter(|&i| o.uses(i)).map(|i| a.child(i)));
                }
            }
        }
        Some(Occ::new(one, vars, t.declared_arity()))
    }

    fn carrier(&self, n: usize) -> Option<Vec<Occ>> {
        Some(
            (0..1u32 << n)
                .flat_map(|u| [Occ::new(false, u, n), Occ::new(true, u, n)])
                .collect(),
        )
    }
}
