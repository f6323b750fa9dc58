//! Partial ordered tree algebras, their power-set lifts, products and the
//! free algebra.

mod instances;
mod laws;
mod table;

use std::fmt;

use crate::error::{Error, Result};
use crate::order::{DownSet, PosetSlice, UpSet};
use crate::tree::{enumerate_trees, lift_relation, RankedAlphabet, RankedTree, Ranked, SectionIter, Symbol};

pub use instances::{naive_occurrence_algebra, occurrence_algebra, Bit, NaiveOccurrence, Occ, Occurrence};
pub use laws::{
    check_associativity_on, check_dist_law, check_extension_condition, check_join_continuity,
    check_meet_embedding, check_monad_laws, check_morphism, check_unit_exhaustive,
    random_ranked_poset, show_tt, ExtensionKind, Point, RankedPoset,
};
pub use table::TableAlgebra;

/// A partial tree algebra `⟨A, π, ≤⟩` with arities bounded by `max_arity`.
/// `product` returns `None` where the product is undefined.
pub trait TreeAlgebra: Sync {
    type Elem: Clone + Ord + fmt::Debug + fmt::Display + Ranked + Send + Sync;

    fn name(&self) -> String;
    fn max_arity(&self) -> usize;
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn product(&self, t: &RankedTree<Self::Elem>) -> Option<Self::Elem>;

    /// The arity-`n` slice when it is finite and worth enumerating.
    fn carrier(&self, _n: usize) -> Option<Vec<Self::Elem>> {
        None
    }

    /// Least upper bound inside the slice, when it exists.
    fn sup(&self, arity: usize, xs: &[Self::Elem]) -> Option<Self::Elem> {
        let c = self.carrier(arity)?;
        let ub: Vec<&Self::Elem> =
            c.iter().filter(|u| xs.iter().all(|x| self.leq(x, u))).collect();
        ub.iter().find(|u| ub.iter().all(|v| self.leq(u, v))).map(|u| (*u).clone())
    }

    fn inf(&self, arity: usize, xs: &[Self::Elem]) -> Option<Self::Elem> {
        let c = self.carrier(arity)?;
        let lb: Vec<&Self::Elem> =
            c.iter().filter(|u| xs.iter().all(|x| self.leq(u, x))).collect();
        lb.iter().find(|u| lb.iter().all(|v| self.leq(v, u))).map(|u| (*u).clone())
    }
}

impl<A: TreeAlgebra> TreeAlgebra for &A {
    type Elem = A::Elem;
    fn name(&self) -> String {
        (**self).name()
    }
    fn max_arity(&self) -> usize {
        (**self).max_arity()
    }
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        (**self).leq(a, b)
    }
    fn product(&self, t: &RankedTree<Self::Elem>) -> Option<Self::Elem> {
        (**self).product(t)
    }
    fn carrier(&self, n: usize) -> Option<Vec<Self::Elem>> {
        (**self).carrier(n)
    }
    fn sup(&self, arity: usize, xs: &[Self::Elem]) -> Option<Self::Elem> {
        (**self).sup(arity, xs)
    }
    fn inf(&self, arity: usize, xs: &[Self::Elem]) -> Option<Self::Elem> {
        (**self).inf(arity, xs)
    }
}

/// Per-arity poset slices of an algebra with finite carrier.
pub fn carrier_slices<A: TreeAlgebra>(alg: &A) -> Result<Vec<PosetSlice<A::Elem>>> {
    (0..=alg.max_arity())
        .map(|n| {
            let c = alg
                .carrier(n)
                .ok_or_else(|| Error::Invalid(format!("{} has no finite carrier", alg.name())))?;
            PosetSlice::from_order(n, c, &|a: &A::Elem, b: &A::Elem| alg.leq(a, b))
        })
        .collect()
}

/// A map between two algebras, to be checked for the morphism property.
pub struct AlgebraMorphism<'a, A: TreeAlgebra, B: TreeAlgebra> {
    pub source: &'a A,
    pub target: &'a B,
    pub map: Box<dyn Fn(&A::Elem) -> B::Elem + Sync + 'a>,
}

impl<'a, A: TreeAlgebra, B: TreeAlgebra> AlgebraMorphism<'a, A, B> {
    pub fn new(source: &'a A, target: &'a B, map: impl Fn(&A::Elem) -> B::Elem + Sync + 'a) -> Self {
        AlgebraMorphism { source, target, map: Box::new(map) }
    }

    pub fn apply(&self, a: &A::Elem) -> B::Elem {
        (self.map)(a)
    }
}

/// `η : a ↦ ↓a`.
pub fn embed_down<'a, A: TreeAlgebra, L: TreeAlgebra<Elem = DownSet<A::Elem>>>(
    alg: &'a A,
    lifted: &'a L,
) -> AlgebraMorphism<'a, A, L> {
    AlgebraMorphism::new(alg, lifted, |a: &A::Elem| DownSet::principal(a.arity(), a.clone()))
}

/// `ζ : a ↦ ↑a`.
pub fn embed_up<'a, A: TreeAlgebra, L: TreeAlgebra<Elem = UpSet<A::Elem>>>(
    alg: &'a A,
    lifted: &'a L,
) -> AlgebraMorphism<'a, A, L> {
    AlgebraMorphism::new(alg, lifted, |a: &A::Elem| UpSet::principal(a.arity(), a.clone()))
}

/// `DA`: downsets of a finite algebra with product `↓{π(s) : s ∈^T t}`,
/// undefined inner products contributing nothing.
pub struct DownAlgebra<A: TreeAlgebra> {
    inner: A,
    slices: Vec<PosetSlice<A::Elem>>,
}

pub fn lift_down<A: TreeAlgebra>(alg: A) -> Result<DownAlgebra<A>> {
    let slices = carrier_slices(&alg)?;
    Ok(DownAlgebra { inner: alg, slices })
}

impl<A: TreeAlgebra> DownAlgebra<A> {
    pub fn inner(&self) -> &A {
        &self.inner
    }

    pub fn slice(&self, n: usize) -> &PosetSlice<A::Elem> {
        &self.slices[n]
    }
}

impl<A: TreeAlgebra> TreeAlgebra for DownAlgebra<A> {
    type Elem = DownSet<A::Elem>;

    fn name(&self) -> String {
        format!("D({})", self.inner.name())
    }

    fn max_arity(&self) -> usize {
        self.inner.max_arity()
    }

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a.arity() == b.arity() && a.leq(&|x: &A::Elem, y: &A::Elem| self.inner.leq(x, y), b)
    }

    fn product(&self, t: &RankedTree<Self::Elem>) -> Option<Self::Elem> {
        let n = t.declared_arity();
        let ord = |x: &A::Elem, y: &A::Elem| self.inner.leq(x, y);
        let vals = SectionIter::new(t, |l: &DownSet<A::Elem>| l.denote(&self.slices[l.arity()]))
            .filter_map(|s| self.inner.product(&s));
        Some(DownSet::of(&ord, n, vals))
    }

    fn carrier(&self, n: usize) -> Option<Vec<Self::Elem>> {
        Some(self.slices.get(n)?.downsets())
    }

    fn sup(&self, arity: usize, xs: &[Self::Elem]) -> Option<Self::Elem> {
        let ord = |x: &A::Elem, y: &A::Elem| self.inner.leq(x, y);
        Some(DownSet::union_all(&ord, arity, xs))
    }

    fn inf(&self, arity: usize, xs: &[Self::Elem]) -> Option<Self::Elem> {
        let slice = self.slices.get(arity)?;
        let all = slice.down_of(slice.elements().iter().cloned());
        Some(xs.iter().fold(all, |acc, x| acc.intersect(slice, x)))
    }
}

/// `UA`: upsets ordered by reverse inclusion, product `↑{π(s) : s ∈^T t}`,
/// undefined as soon as one section has no product.
pub struct UpAlgebra<A: TreeAlgebra> {
    inner: A,
    slices: Vec<PosetSlice<A::Elem>>,
}

pub fn lift_up<A: TreeAlgebra>(alg: A) -> Result<UpAlgebra<A>> {
    let slices = carrier_slices(&alg)?;
    Ok(UpAlgebra { inner: alg, slices })
}

impl<A: TreeAlgebra> UpAlgebra<A> {
    pub fn inner(&self) -> &A {
        &self.inner
    }

    pub fn slice(&self, n: usize) -> &PosetSlice<A::Elem> {
        &self.slices[n]
    }
}

impl<A: TreeAlgebra> TreeAlgebra for UpAlgebra<A> {
    type Elem = UpSet<A::Elem>;

    fn name(&self) -> String {
        format!("U({})", self.inner.name())
    }

    fn max_arity(&self) -> usize {
        self.inner.max_arity()
    }

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a.arity() == b.arity() && a.leq(&|x: &A::Elem, y: &A::Elem| self.inner.leq(x, y), b)
    }

    fn product(&self, t: &RankedTree<Self::Elem>) -> Option<Self::Elem> {
        let n = t.declared_arity();
        let ord = |x: &A::Elem, y: &A::Elem| self.inner.leq(x, y);
        let mut vals = Vec::new();
        for s in SectionIter::new(t, |l: &UpSet<A::Elem>| l.denote(&self.slices[l.arity()])) {
            vals.push(self.inner.product(&s)?);
        }
        Some(UpSet::of(&ord, n, vals))
    }

    fn carrier(&self, n: usize) -> Option<Vec<Self::Elem>> {
        Some(self.slices.get(n)?.upsets())
    }

    fn sup(&self, arity: usize, xs: &[Self::Elem]) -> Option<Self::Elem> {
        let slice = self.slices.get(arity)?;
        let all = slice.up_of(slice.elements().iter().cloned());
        Some(xs.iter().fold(all, |acc, x| acc.intersect(slice, x)))
    }

    fn inf(&self, arity: usize, xs: &[Self::Elem]) -> Option<Self::Elem> {
        let ord = |x: &A::Elem, y: &A::Elem| self.inner.leq(x, y);
        Some(UpSet::union_all(&ord, arity, xs))
    }
}

/// Pairs, ordered componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair<X, Y>(pub X, pub Y);

impl<X: Ranked, Y> Ranked for Pair<X, Y> {
    fn arity(&self) -> usize {
        self.0.arity()
    }
}

impl<X: fmt::Display, Y: fmt::Display> fmt::Display for Pair<X, Y> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{};{}>", self.0, self.1)
    }
}

pub struct ProductAlgebra<A, B> {
    pub left: A,
    pub right: B,
}

pub fn product_algebra<A: TreeAlgebra, B: TreeAlgebra>(left: A, right: B) -> Result<ProductAlgebra<A, B>> {
    if left.max_arity() != right.max_arity() {
        return Err(Error::Invalid("factors of a product must share the arity bound".into()));
    }
    Ok(ProductAlgebra { left, right })
}

impl<A: TreeAlgebra, B: TreeAlgebra> TreeAlgebra for ProductAlgebra<A, B> {
    type Elem = Pair<A::Elem, B::Elem>;

    fn name(&self) -> String {
        format!("{} x {}", self.left.name(), self.right.name())
    }

    fn max_arity(&self) -> usize {
        self.left.max_arity()
    }

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.left.leq(&a.0, &b.0) && self.right.leq(&a.1, &b.1)
    }

    fn product(&self, t: &RankedTree<Self::Elem>) -> Option<Self::Elem> {
        let l = self.left.product(&t.map_total(|p| p.0.clone()))?;
        let r = self.right.product(&t.map_total(|p| p.1.clone()))?;
        Some(Pair(l, r))
    }

    fn carrier(&self, n: usize) -> Option<Vec<Self::Elem>> {
        let ls = self.left.carrier(n)?;
        let rs = self.right.carrier(n)?;
        Some(ls.iter().flat_map(|l| rs.iter().map(move |r| Pair(l.clone(), r.clone()))).collect())
    }
}

/// Trees over an ordered alphabet with `flatten` as product, truncated to
/// trees of at most `size_bound` nodes (larger products are undefined).
pub struct FreeAlgebra {
    alphabet: RankedAlphabet,
    size_bound: usize,
    max_arity: usize,
}

pub fn free_algebra(alphabet: RankedAlphabet, size_bound: usize, max_arity: usize) -> FreeAlgebra {
    FreeAlgebra { alphabet, size_bound, max_arity }
}

impl FreeAlgebra {
    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }
}

impl TreeAlgebra for FreeAlgebra {
    type Elem = RankedTree<Symbol>;

    fn name(&self) -> String {
        format!("free(<= {} nodes)", self.size_bound)
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        lift_relation(|x, y| self.alphabet.leq(x, y), a, b)
    }

    fn product(&self, t: &RankedTree<Self::Elem>) -> Option<Self::Elem> {
        let f = t.flatten();
        (f.size() <= self.size_bound).then_some(f)
    }

    fn carrier(&self, n: usize) -> Option<Vec<Self::Elem>> {
        Some(enumerate_trees(&self.alphabet.pool(), self.size_bound, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{parse_term, Term};

    fn occ() -> Occurrence {
        occurrence_algebra(2)
    }

    #[test]
    fn free_algebra_unit_and_bound() {
        let al = RankedAlphabet::new(&[("f", 1), ("b", 0)], &[]).unwrap();
        let free = free_algebra(al.clone(), 3, 1);
        let t = parse_term("f(f(b))", &al).unwrap();
        assert_eq!(free.product(&RankedTree::singleton(t.clone())), Some(t.clone()));
        // f(f(x0)) substituted into itself has 5 nodes: undefined
        let ff = parse_term("f(f(x0))", &al).unwrap();
        let tt = RankedTree::from_term(
            1,
            &Term::App(ff.clone(), vec![Term::App(ff, vec![Term::Hole(0)])]),
        )
        .unwrap();
        assert_eq!(free.product(&tt), None);
        // b, f(b), f(f(b))
        assert_eq!(free.carrier(0).unwrap().len(), 3);
    }

    #[test]
    fn down_lift_matches_formula() {
        let alg = occ();
        let d = lift_down(&alg).unwrap();
        let zero0 = Occ::new(false, 0, 0);
        let one0 = Occ::new(true, 0, 0);
        let s1 = d.slice(1).clone();
        // root: downset of the unary slice; child: {0_0, 1_0}
        let f = Occ::new(false, 0b1, 1);
        let t = RankedTree::from_term(
            0,
            &Term::App(
                s1.down_of([f]),
                vec![Term::leaf(d.slice(0).down_of([zero0.clone(), one0.clone()]))],
            ),
        )
        .unwrap();
        let got = d.product(&t).unwrap();
        assert_eq!(got, d.slice(0).down_of([one0]));
        let empty = RankedTree::from_term(0, &Term::leaf(DownSet::empty(0))).unwrap();
        assert!(d.product(&empty).unwrap().is_empty());
    }

    #[test]
    fn principal_labels_give_principal_products() {
        let alg = occ();
        let d = lift_down(&alg).unwrap();
        let u = lift_up(&alg).unwrap();
        let a = Occ::new(false, 0b11, 2);
        let b = Occ::new(true, 0, 0);
        let t = RankedTree::from_term(
            0,
            &Term::App(a.clone(), vec![Term::leaf(b.clone()), Term::leaf(Occ::new(false, 0, 0))]),
        )
        .unwrap();
        let v = alg.product(&t).unwrap();
        let td = t.map_total(|x| DownSet::principal(x.arity(), x.clone()));
        assert_eq!(d.product(&td), Some(DownSet::principal(0, v.clone())));
        let tu = t.map_total(|x| UpSet::principal(x.arity(), x.clone()));
        assert_eq!(u.product(&tu), Some(UpSet::principal(0, v)));
    }

    #[test]
    fn up_lift_undefined_when_a_section_is() {
        let al = RankedAlphabet::new(&[("f", 1), ("b", 0)], &[]).unwrap();
        let free = free_algebra(al.clone(), 2, 1);
        let u = lift_up(&free).unwrap();
        let s1 = u.slice(1).clone();
        let s0 = u.slice(0).clone();
        let f = parse_term("f(x0)", &al).unwrap();
        let fb = parse_term("f(b)", &al).unwrap();
        let b = parse_term("b", &al).unwrap();
        // f(f(b)) has three nodes: outside the bound
        let t = RankedTree::from_term(
            0,
            &Term::App(s1.up_of([f]), vec![Term::leaf(s0.up_of([b.clone(), fb]))]),
        )
        .unwrap();
        assert_eq!(u.product(&t), None);
        let d = lift_down(&free).unwrap();
        let t = t.map_total(|x| d.slice(x.arity()).down_of(x.minimals().iter().cloned()));
        // the undefined section is dropped on the D side
        assert_eq!(d.product(&t), Some(d.slice(0).down_of([parse_term("f(b)", &al).unwrap()])));
    }

    #[test]
    fn embeddings_are_order_embeddings() {
        let d = lift_down(occ()).unwrap();
        let alg = d.inner();
        let eta = embed_down(alg, &d);
        for n in 0..=2 {
            let c = alg.carrier(n).unwrap();
            for a in &c {
                for b in &c {
                    assert_eq!(d.leq(&eta.apply(a), &eta.apply(b)), alg.leq(a, b));
                }
            }
        }
    }

    #[test]
    fn product_of_algebras_is_componentwise() {
        let p = product_algebra(occ(), naive_occurrence_algebra(2)).unwrap();
        let a = Pair(Occ::new(true, 0, 0), Bit::new(false, 0));
        assert_eq!(p.product(&RankedTree::singleton(a.clone())), Some(a));
        assert!(product_algebra(occ(), naive_occurrence_algebra(3)).is_err());
    }
}
