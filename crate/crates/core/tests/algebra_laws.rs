use treealg_core::algebra::*;
use treealg_core::order::{DownSet, UpSet};
use treealg_core::report::SamplerConfig;
use treealg_core::tree::{HoleMode, LabelPool, RankedAlphabet, RankedTree, Ranked, Term};

fn cfg(n: usize) -> SamplerConfig {
    SamplerConfig::default().with_samples(n)
}

fn occ_pool(alg: &Occurrence) -> LabelPool<Occ> {
    LabelPool::new((0..=alg.max_arity()).flat_map(|n| alg.carrier(n).unwrap()))
}

#[test]
fn free_algebra_passes() {
    let al = RankedAlphabet::new(&[("a", 2), ("f", 1), ("b", 0), ("c", 0)], &[("b", "c")]).unwrap();
    let free = free_algebra(al.clone(), 1000, 2);
    let pool = LabelPool::new((0..=2).flat_map(|n| {
        treealg_core::tree::enumerate_trees(&al.pool(), 3, n)
    }));
    let rep = check_monad_laws(&free, &pool, &cfg(300));
    assert!(rep.passed(), "{rep}");
}

#[test]
fn truncated_free_algebra_is_only_partially_associative() {
    // an argument that flattening discards can still overflow the bound on
    // the Tπ side, so one side is defined and the other is not
    let al = RankedAlphabet::new(&[("f", 1), ("b", 0)], &[]).unwrap();
    let free = free_algebra(al, 4, 1);
    let pool = LabelPool::new((0..=1).flat_map(|n| free.carrier(n).unwrap()));
    let rep = check_monad_laws(&free, &pool, &cfg(300).with_size(3));
    assert!(rep.law("unit").unwrap().passed());
    assert!(!rep.law("associativity").unwrap().passed());
    let linear = check_monad_laws(&free, &pool, &cfg(300).with_size(3).with_holes(HoleMode::Linear));
    assert!(linear.law("unit").unwrap().passed());
}

#[test]
fn naive_algebra_fails_and_corrected_one_passes() {
    let naive = naive_occurrence_algebra(3);
    let pool = LabelPool::new((0..=3).flat_map(|n| naive.carrier(n).unwrap()));
    assert!(!check_monad_laws(&naive, &pool, &cfg(500)).passed());
    let occ = occurrence_algebra(3);
    let rep = check_monad_laws(&occ, &occ_pool(&occ), &cfg(500));
    assert!(rep.passed(), "{rep}");
}

#[test]
fn dist_law_holds() {
    let rep = check_dist_law(6, &cfg(200));
    assert!(rep.passed(), "{rep}");
}

#[test]
fn dist_flat_equation_needs_non_empty_labels_under_discarded_arguments() {
    let mut c = cfg(400);
    c.empty_labels = true;
    let rep = check_dist_law(6, &c);
    assert!(!rep.law("dist . flat = D flat . dist . T dist").unwrap().passed());
    c.holes = HoleMode::Linear;
    let rep = check_dist_law(6, &c);
    assert!(rep.passed(), "{rep}");
}

#[test]
fn lifts_are_lawful_and_continuous() {
    let occ = occurrence_algebra(2);
    let d = lift_down(&occ).unwrap();
    let u = lift_up(&occ).unwrap();
    let c = cfg(200).with_size(4);
    let dpool = LabelPool::new((0..=2).flat_map(|n| d.carrier(n).unwrap()).filter(|x| !x.is_empty()));
    let upool = LabelPool::new((0..=2).flat_map(|n| u.carrier(n).unwrap()).filter(|x| !x.is_top()));
    let rep = check_monad_laws(&d, &dpool, &c);
    assert!(rep.passed(), "{rep}");
    let rep = check_monad_laws(&u, &upool, &c);
    assert!(rep.passed(), "{rep}");
    let rep = check_join_continuity(&d, &dpool, &c);
    assert!(rep.passed(), "{rep}");
    let rep = check_meet_embedding(&u, &upool, &c);
    assert!(rep.passed(), "{rep}");
    let eta = embed_down(&occ, &d);
    assert!(check_morphism(&eta, &occ_pool(&occ), &c).passed());
}

#[test]
fn empty_labels_under_discarded_arguments_break_lifted_associativity() {
    // ∅ below an argument the inner tree never uses: flat drops it, Tπ keeps it
    let occ = occurrence_algebra(1);
    let d = lift_down(&occ).unwrap();
    let inner = RankedTree::leaf_in(1, d.slice(0).down_of([Occ::new(false, 0, 0)]));
    let empty = RankedTree::from_term(0, &Term::leaf(DownSet::<Occ>::empty(0))).unwrap();
    let tt = RankedTree::from_term(0, &Term::App(inner, vec![Term::leaf(empty)])).unwrap();
    let r = check_associativity_on(&d, &[tt]);
    assert!(!r.passed());
}

#[test]
fn product_projections_are_morphisms() {
    let p = product_algebra(occurrence_algebra(2), naive_occurrence_algebra(2)).unwrap();
    let pool = LabelPool::new((0..=2).flat_map(|n| p.carrier(n).unwrap()));
    let pi1 = AlgebraMorphism::new(&p, &p.left, |x: &Pair<Occ, Bit>| x.0);
    assert!(check_morphism(&pi1, &pool, &cfg(200)).passed());
    // the naive factor is not associative, so the product is not either
    assert!(!check_monad_laws(&p, &pool, &cfg(300)).passed());
}

#[test]
fn broken_map_is_not_a_morphism() {
    let occ = occurrence_algebra(2);
    let naive = naive_occurrence_algebra(2);
    // forgets the 1 at nullary elements only
    let bad = AlgebraMorphism::new(&occ, &naive, |x: &Occ| Bit::new(x.one && x.arity > 0, x.arity));
    let rep = check_morphism(&bad, &occ_pool(&occ), &cfg(200));
    assert!(!rep.passed());
    assert!(rep.first_witness().is_some());
}

#[test]
fn extension_conditions() {
    let occ = occurrence_algebra(2);
    let d = lift_down(&occ).unwrap();
    let eta: Vec<DownSet<Occ>> = (0..=2)
        .flat_map(|n| occ.carrier(n).unwrap())
        .map(|a| DownSet::principal(a.arity(), a))
        .collect();
    let c = LabelPool::new(eta);
    let rep = check_extension_condition(ExtensionKind::Join, &d, &c, &cfg(150).with_size(4));
    assert!(rep.passed(), "{rep}");
    let u = lift_up(&occ).unwrap();
    let zeta: Vec<UpSet<Occ>> = (0..=2)
        .flat_map(|n| occ.carrier(n).unwrap())
        .map(|a| UpSet::principal(a.arity(), a))
        .collect();
    let rep = check_extension_condition(ExtensionKind::Meet, &u, &LabelPool::new(zeta), &cfg(150).with_size(4));
    assert!(rep.passed(), "{rep}");
}
