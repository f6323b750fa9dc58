//! Finite poset slices and antichain-represented down/up sets.
//!
//! A `DownSet` stores its maximal elements, an `UpSet` its minimal ones, both
//! sorted and deduplicated so that equality is structural. Both use the empty
//! antichain for the empty set, which is the bottom of `D` but the top of `U`
//! (upsets are ordered by reverse inclusion).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::tree::{transitive_closure, Ranked};

/// A partial order, given by its `<=` test.
pub trait Order<E: ?Sized> {
    fn leq(&self, a: &E, b: &E) -> bool;
}

impl<E: ?Sized, F: Fn(&E, &E) -> bool> Order<E> for F {
    fn leq(&self, a: &E, b: &E) -> bool {
        self(a, b)
    }
}

/// Discrete order.
pub fn equality<E: PartialEq>(a: &E, b: &E) -> bool {
    a == b
}

/// One arity slice of a finite ordered set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetSlice<E> {
    arity: usize,
    elems: Vec<E>,
    leq: Vec<Vec<bool>>,
}

impl<E: Clone + Ord + fmt::Debug> PosetSlice<E> {
    /// Reflexive-transitive closure of the generating pairs; fails on cycles.
    pub fn new(arity: usize, elems: impl IntoIterator<Item = E>, pairs: &[(E, E)]) -> Result<Self> {
        let elems: Vec<E> = elems.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let n = elems.len();
        let pos = |e: &E| {
            elems
                .binary_search(e)
                .map_err(|_| Error::SliceMismatch(format!("{e:?}")))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            leq[pos(a)?][pos(b)?] = true;
        }
        transitive_closure(&mut leq);
        for i in 0..n {
            for j in 0..i {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotAntisymmetric(
                        format!("{:?}", elems[j]),
                        format!("{:?}", elems[i]),
                    ));
                }
            }
        }
        Ok(PosetSlice { arity, elems, leq })
    }

    /// Slice ordered by `ord`, which is checked to be a partial order.
    pub fn from_order(
        arity: usize,
        elems: impl IntoIterator<Item = E>,
        ord: &impl Order<E>,
    ) -> Result<Self> {
        let elems: Vec<E> = elems.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let leq: Vec<Vec<bool>> = elems
            .iter()
            .map(|a| elems.iter().map(|b| ord.leq(a, b)).collect())
            .collect();
        let n = elems.len();
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::Invalid(format!("order is not reflexive at {:?}", elems[i])));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::NotAntisymmetric(
                        format!("{:?}", elems[i]),
                        format!("{:?}", elems[j]),
                    ));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::Invalid(format!(
                            "order is not transitive at {:?}",
                            elems[j]
                        )));
                    }
                }
            }
        }
        Ok(PosetSlice { arity, elems, leq })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn elements(&self) -> &[E] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index(&self, e: &E) -> Option<usize> {
        self.elems.binary_search(e).ok()
    }

    pub fn contains(&self, e: &E) -> bool {
        self.index(e).is_some()
    }

    fn check(&self, e: &E) -> Result<usize> {
        self.index(e).ok_or_else(|| Error::SliceMismatch(format!("{e:?}")))
    }

    fn check_set<'a>(&self, arity: usize, it: impl IntoIterator<Item = &'a E>) -> Result<()>
    where
        E: 'a,
    {
        if arity != self.arity {
            return Err(Error::SliceMismatch(format!(
                "arity {arity} against a slice of arity {}",
                self.arity
            )));
        }
        for e in it {
            self.check(e)?;
        }
        Ok(())
    }

    pub fn down_of(&self, s: impl IntoIterator<Item = E>) -> DownSet<E> {
        DownSet::of(self, self.arity, s)
    }

    pub fn up_of(&self, s: impl IntoIterator<Item = E>) -> UpSet<E> {
        UpSet::of(self, self.arity, s)
    }

    pub fn dunion(&self, i: &DownSet<E>, j: &DownSet<E>) -> Result<DownSet<E>> {
        self.check_set(i.arity, &i.max)?;
        self.check_set(j.arity, &j.max)?;
        Ok(i.union(self, j))
    }

    pub fn dintersect(&self, i: &DownSet<E>, j: &DownSet<E>) -> Result<DownSet<E>> {
        self.check_set(i.arity, &i.max)?;
        self.check_set(j.arity, &j.max)?;
        Ok(i.intersect(self, j))
    }

    pub fn dleq(&self, i: &DownSet<E>, j: &DownSet<E>) -> Result<bool> {
        self.check_set(i.arity, &i.max)?;
        self.check_set(j.arity, &j.max)?;
        Ok(i.leq(self, j))
    }

    pub fn uunion(&self, i: &UpSet<E>, j: &UpSet<E>) -> Result<UpSet<E>> {
        self.check_set(i.arity, &i.min)?;
        self.check_set(j.arity, &j.min)?;
        Ok(i.union(self, j))
    }

    pub fn uintersect(&self, i: &UpSet<E>, j: &UpSet<E>) -> Result<UpSet<E>> {
        self.check_set(i.arity, &i.min)?;
        self.check_set(j.arity, &j.min)?;
        Ok(i.intersect(self, j))
    }

    pub fn uleq(&self, i: &UpSet<E>, j: &UpSet<E>) -> Result<bool> {
        self.check_set(i.arity, &i.min)?;
        self.check_set(j.arity, &j.min)?;
        Ok(i.leq(self, j))
    }

    /// Every downset of the slice, i.e. every antichain, in a fixed order.
    pub fn downsets(&self) -> Vec<DownSet<E>> {
        self.antichains()
            .into_iter()
            .map(|max| DownSet { arity: self.arity, max })
            .collect()
    }

    pub fn upsets(&self) -> Vec<UpSet<E>> {
        self.antichains()
            .into_iter()
            .map(|min| UpSet { arity: self.arity, min })
            .collect()
    }

    fn antichains(&self) -> Vec<Vec<E>> {
        let n = self.elems.len();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go<E: Clone>(
            s: &PosetSlice<E>,
            i: usize,
            n: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<E>>,
        ) {
            if i == n {
                out.push(cur.iter().map(|&k| s.elems[k].clone()).collect());
                return;
            }
            go(s, i + 1, n, cur, out);
            if cur.iter().all(|&k| !s.leq[k][i] && !s.leq[i][k]) {
                cur.push(i);
                go(s, i + 1, n, cur, out);
                cur.pop();
            }
        }
        go(self, 0, n, &mut cur, &mut out);
        out
    }

    /// Greatest lower bound of a non-empty set, when it exists.
    pub fn inf(&self, s: &[E]) -> Option<E> {
        let idx: Vec<usize> = s.iter().map(|e| self.index(e)).collect::<Option<_>>()?;
        let lower: Vec<usize> = (0..self.elems.len())
            .filter(|&x| idx.iter().all(|&i| self.leq[x][i]))
            .collect();
        lower
            .iter()
            .find(|&&g| lower.iter().all(|&x| self.leq[x][g]))
            .map(|&g| self.elems[g].clone())
    }

    /// Least upper bound, when it exists.
    pub fn sup(&self, s: &[E]) -> Option<E> {
        let idx: Vec<usize> = s.iter().map(|e| self.index(e)).collect::<Option<_>>()?;
        let upper: Vec<usize> = (0..self.elems.len())
            .filter(|&x| idx.iter().all(|&i| self.leq[i][x]))
            .collect();
        upper
            .iter()
            .find(|&&g| upper.iter().all(|&x| self.leq[g][x]))
            .map(|&g| self.elems[g].clone())
    }

    /// Closure of `s` under infima of non-empty subsets. Subsets without an
    /// infimum are skipped and returned separately.
    pub fn cl_meets(&self, s: &[E]) -> ClMeets<E> {
        let s: Vec<E> = s.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut closure = BTreeSet::new();
        let mut skipped = Vec::new();
        for mask in 1u64..(1u64 << s.len()) {
            let sub: Vec<E> =
                (0..s.len()).filter(|i| mask >> i & 1 == 1).map(|i| s[i].clone()).collect();
            match self.inf(&sub) {
                Some(m) => {
                    closure.insert(m);
                }
                None => skipped.push(sub),
            }
        }
        ClMeets { closure: closure.into_iter().collect(), skipped }
    }
}

impl<E: Clone + Ord + fmt::Debug> Order<E> for PosetSlice<E> {
    fn leq(&self, a: &E, b: &E) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.leq[i][j],
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClMeets<E> {
    pub closure: Vec<E>,
    pub skipped: Vec<Vec<E>>,
}

/// Meet-closure in the upset representation: the unions of all non-empty
/// subfamilies of the principal upsets `↑s`, deduplicated.
pub fn cl_meets_up<E: Clone + Ord>(
    ord: &impl Order<E>,
    arity: usize,
    s: &[E],
) -> Vec<UpSet<E>> {
    let s: Vec<E> = s.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = BTreeSet::new();
    for mask in 1u64..(1u64 << s.len()) {
        let sub = (0..s.len()).filter(|i| mask >> i & 1 == 1).map(|i| s[i].clone());
        out.insert(UpSet::of(ord, arity, sub));
    }
    out.into_iter().collect()
}

/// A downwards closed set, stored as its antichain of maximal elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DownSet<E> {
    arity: usize,
    max: Vec<E>,
}

/// An upwards closed set, stored as its antichain of minimal elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpSet<E> {
    arity: usize,
    min: Vec<E>,
}

fn extremal<E: Clone + Ord>(s: impl IntoIterator<Item = E>, above: impl Fn(&E, &E) -> bool) -> Vec<E> {
    let all: Vec<E> = s.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    all.iter()
        .filter(|x| !all.iter().any(|y| y != *x && above(x, y)))
        .cloned()
        .collect()
}

impl<E: Clone + Ord> DownSet<E> {
    pub fn of(ord: &impl Order<E>, arity: usize, s: impl IntoIterator<Item = E>) -> Self {
        DownSet { arity, max: extremal(s, |x, y| ord.leq(x, y)) }
    }

    pub fn empty(arity: usize) -> Self {
        DownSet { arity, max: Vec::new() }
    }

    pub fn principal(arity: usize, e: E) -> Self {
        DownSet { arity, max: vec![e] }
    }

    /// Builds from an antichain assumed to be canonical already.
    pub fn from_antichain_unchecked(arity: usize, mut max: Vec<E>) -> Self {
        max.sort();
        max.dedup();
        DownSet { arity, max }
    }

    pub fn maximals(&self) -> &[E] {
        &self.max
    }

    pub fn is_empty(&self) -> bool {
        self.max.is_empty()
    }

    pub fn contains(&self, ord: &impl Order<E>, x: &E) -> bool {
        self.max.iter().any(|m| ord.leq(x, m))
    }

    /// Inclusion of the denoted sets.
    pub fn leq(&self, ord: &impl Order<E>, other: &Self) -> bool {
        self.max.iter().all(|x| other.contains(ord, x))
    }

    pub fn union(&self, ord: &impl Order<E>, other: &Self) -> Self {
        Self::of(ord, self.arity, self.max.iter().chain(&other.max).cloned())
    }

    pub fn union_all<'a>(
        ord: &impl Order<E>,
        arity: usize,
        sets: impl IntoIterator<Item = &'a Self>,
    ) -> Self
    where
        E: 'a,
    {
        Self::of(ord, arity, sets.into_iter().flat_map(|s| s.max.iter().cloned()))
    }

    pub fn intersect(&self, slice: &PosetSlice<E>, other: &Self) -> Self
    where
        E: fmt::Debug,
    {
        let both = slice
            .elements()
            .iter()
            .filter(|x| self.contains(slice, x) && other.contains(slice, x))
            .cloned();
        Self::of(slice, self.arity, both)
    }

    /// Every element of the slice below some maximal element.
    pub fn denote(&self, slice: &PosetSlice<E>) -> Vec<E>
    where
        E: fmt::Debug,
    {
        slice.elements().iter().filter(|x| self.contains(slice, x)).cloned().collect()
    }

    /// `Df(I) = ↓f[I]`, image of the denoted set; undefined values are dropped.
    pub fn map<F: Clone + Ord>(
        &self,
        slice: &PosetSlice<E>,
        target: &impl Order<F>,
        arity: usize,
        f: impl Fn(&E) -> Option<F>,
    ) -> DownSet<F>
    where
        E: fmt::Debug,
    {
        DownSet::of(target, arity, self.denote(slice).iter().filter_map(f))
    }
}

impl<E: Clone + Ord> UpSet<E> {
    pub fn of(ord: &impl Order<E>, arity: usize, s: impl IntoIterator<Item = E>) -> Self {
        UpSet { arity, min: extremal(s, |x, y| ord.leq(y, x)) }
    }

    /// The empty upset, top of `U`.
    pub fn top(arity: usize) -> Self {
        UpSet { arity, min: Vec::new() }
    }

    pub fn principal(arity: usize, e: E) -> Self {
        UpSet { arity, min: vec![e] }
    }

    pub fn from_antichain_unchecked(arity: usize, mut min: Vec<E>) -> Self {
        min.sort();
        min.dedup();
        UpSet { arity, min }
    }

    pub fn minimals(&self) -> &[E] {
        &self.min
    }

    pub fn is_top(&self) -> bool {
        self.min.is_empty()
    }

    pub fn contains(&self, ord: &impl Order<E>, x: &E) -> bool {
        self.min.iter().any(|m| ord.leq(m, x))
    }

    /// `I <= J` iff `I ⊇ J`.
    pub fn leq(&self, ord: &impl Order<E>, other: &Self) -> bool {
        other.min.iter().all(|x| self.contains(ord, x))
    }

    /// Set union of the denoted sets: the meet in `U`.
    pub fn union(&self, ord: &impl Order<E>, other: &Self) -> Self {
        Self::of(ord, self.arity, self.min.iter().chain(&other.min).cloned())
    }

    pub fn union_all<'a>(
        ord: &impl Order<E>,
        arity: usize,
        sets: impl IntoIterator<Item = &'a Self>,
    ) -> Self
    where
        E: 'a,
    {
        Self::of(ord, arity, sets.into_iter().flat_map(|s| s.min.iter().cloned()))
    }

    /// Set intersection: the join in `U`.
    pub fn intersect(&self, slice: &PosetSlice<E>, other: &Self) -> Self
    where
        E: fmt::Debug,
    {
        let both = slice
            .elements()
            .iter()
            .filter(|x| self.contains(slice, x) && other.contains(slice, x))
            .cloned();
        Self::of(slice, self.arity, both)
    }

    pub fn denote(&self, slice: &PosetSlice<E>) -> Vec<E>
    where
        E: fmt::Debug,
    {
        slice.elements().iter().filter(|x| self.contains(slice, x)).cloned().collect()
    }

    /// `Uf(I) = ↑f[I]`, undefined unless `f` is defined on all of `I`.
    pub fn map<F: Clone + Ord>(
        &self,
        slice: &PosetSlice<E>,
        target: &impl Order<F>,
        arity: usize,
        f: impl Fn(&E) -> Option<F>,
    ) -> Option<UpSet<F>>
    where
        E: fmt::Debug,
    {
        let img: Option<Vec<F>> = self.denote(slice).iter().map(f).collect();
        Some(UpSet::of(target, arity, img?))
    }
}

impl<E> Ranked for DownSet<E> {
    fn arity(&self) -> usize {
        self.arity
    }
}

impl<E> Ranked for UpSet<E> {
    fn arity(&self) -> usize {
        self.arity
    }
}

pub(crate) fn fmt_set<E: fmt::Display>(f: &mut fmt::Formatter<'_>, xs: &[E]) -> fmt::Result {
    write!(f, "{{")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "}}")
}

impl<E: fmt::Display> fmt::Display for DownSet<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_set(f, &self.max)
    }
}

impl<E: fmt::Display> fmt::Display for UpSet<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_set(f, &self.min)
    }
}
