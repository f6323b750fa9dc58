use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treealg_core::algebra::{check_join_continuity, check_monad_laws, lift_down, lift_up, TreeAlgebra};
use treealg_core::automaton::*;
use treealg_core::branch::{join_generator_formula_check, random_branch_elem, show_branch, BranchAlgebra};
use treealg_core::graphs::{random_graph, unravel_equal, TreeGraph};
use treealg_core::omega::MeetBounds;
use treealg_core::report::SamplerConfig;
use treealg_core::tree::{
    enumerate_closed_by_depth, random_tree_by, random_tree_in, HoleMode, LabelPool, RankedAlphabet,
};
use treealg_core::treesg::{Generators, TaAlgebra};

fn al() -> RankedAlphabet {
    RankedAlphabet::new(&[("a", 2), ("b", 1), ("c", 0)], &[]).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn depth_three_terms() {
    assert_eq!(enumerate_closed_by_depth(&al().pool(), 3).len(), 183);
}

#[test]
fn recognition_matches_runs_on_small_terms() {
    let terms = enumerate_closed_by_depth(&al().pool(), 3);
    let mut r = rng(1);
    for _ in 0..10 {
        let q = r.gen_range(1..=2);
        let a = random_automaton(&al(), q, &[0, 1, 2], &mut r);
        let rec = Recognizer::new(a.clone(), 2);
        for t in &terms {
            let e = rec.alpha(t).unwrap();
            assert_eq!(rec.recognizes(&e).unwrap(), accepts_finite(&a, t).unwrap(), "{t}\n{a}");
        }
    }
}

#[test]
fn alpha_is_a_morphism() {
    let mut r = rng(2);
    let pool = al().pool();
    for i in 0..120 {
        let a = random_automaton(&al(), 1 + i % 2, &[1, 2], &mut r);
        let rec = Recognizer::new(a, 2);
        let n = r.gen_range(0..=1);
        let tt = random_tree_by(&[0, 1, 2], 3, n, HoleMode::Affine, &mut r, |r, k| {
            random_tree_in(&pool, 4, k, HoleMode::Affine, r).ok()
        })
        .unwrap();
        let lhs = rec.alpha(&tt.flatten()).unwrap();
        let labelled = tt.map(|s| rec.alpha(s).ok()).unwrap();
        let rhs = rec.branch().try_product(&labelled).unwrap();
        assert_eq!(show_branch(&lhs), show_branch(&rhs), "{}", tt.flatten());
    }
}

#[test]
fn game_and_algebraic_membership_agree() {
    let mut r = rng(3);
    let pool = al().pool();
    let mut accepted = 0;
    for i in 0..200 {
        let a = random_automaton(&al(), 1 + i % 3, &[0, 1, 2, 3], &mut r);
        let sg = automaton_sg(&a);
        let g = random_graph(&pool, 1 + i % 4, 0, 0, &mut r).unwrap();
        let game = membership_game(&a, &g).unwrap();
        let alg = membership_algebraic(&a, &sg, &g, DEFAULT_ANNOTATION_BUDGET).unwrap();
        assert_ne!(alg, Verdict::Inconclusive);
        assert_eq!(alg == Verdict::Accept, game, "{g}\n{a}");
        accepted += usize::from(game);
        let canon = g.canonical();
        assert!(unravel_equal(&g, &canon));
        assert_eq!(membership_game(&a, &canon).unwrap(), game);
    }
    assert!(accepted > 20 && accepted < 180, "{accepted}");
}

#[test]
fn automaton_semigroups_are_meet_continuous() {
    let mut r = rng(4);
    for i in 0..6 {
        let a = random_automaton(&al(), 1 + i % 3, &[0, 1, 2], &mut r);
        let rep = check_sga_meet_continuity(&a, MeetBounds::default());
        assert!(rep.passed(), "{rep}");
    }
}

fn small_branch(prios: &[usize], states: usize, seed: u64) -> BranchAlgebra {
    let a = random_automaton(&al(), states, prios, &mut rng(seed));
    BranchAlgebra::new(TaAlgebra::new(automaton_sg(&a).into_wilke(), 2))
}

fn branch_pool(b: &BranchAlgebra, count: usize, seed: u64) -> LabelPool<treealg_core::branch::BranchElem> {
    let gens = Generators::all(b.ta().wilke());
    let mut r = rng(seed);
    LabelPool::new((0..count).filter_map(|i| random_branch_elem(b, &gens, i % 3, false, &mut r)))
}

#[test]
fn branch_algebra_laws() {
    let b = small_branch(&[1, 2], 2, 5);
    let pool = branch_pool(&b, 60, 6);
    let cfg = SamplerConfig::default().with_samples(150).with_size(4);
    let rep = check_monad_laws(&b, &pool, &cfg);
    assert!(rep.passed(), "{rep}");
    let rep = check_join_continuity(&b, &pool, &cfg);
    assert!(rep.passed(), "{rep}");
    let rep = join_generator_formula_check(&b, &cfg);
    assert!(rep.passed(), "{rep}");
}

#[test]
fn path_aware_product_matches_the_double_lift_on_non_empty_labels() {
    let b = small_branch(&[1, 2], 1, 7);
    let d = lift_down(lift_up(b.ta().clone()).unwrap()).unwrap();
    let pool = branch_pool(&b, 40, 8);
    let pool = pool.filter(|e| e.maximals().iter().all(|m| !m.is_top()));
    let mut r = rng(9);
    let arities = [0, 1, 2];
    for _ in 0..100 {
        let n = r.gen_range(0..=2);
        let t = random_tree_by(&arities, 4, n, HoleMode::Affine, &mut r, |r, k| {
            let xs = pool.of_arity(k);
            (!xs.is_empty()).then(|| xs[r.gen_range(0..xs.len())].clone())
        });
        let Ok(t) = t else { continue };
        assert_eq!(b.product(&t), d.product(&t), "{t}");
    }
}

#[test]
fn regular_sup_recognizes_like_the_game() {
    let mut r = rng(10);
    let pool = al().pool();
    for i in 0..60 {
        let a = random_automaton(&al(), 1 + i % 2, &[1, 2], &mut r);
        let rec = Recognizer::new(a.clone(), 2);
        let g: TreeGraph<_> = random_graph(&pool, 1 + i % 3, 0, 0, &mut r).unwrap();
        let lifted = g.map(|s| rec.alpha(&treealg_core::tree::RankedTree::singleton(s.clone())).unwrap());
        let e = rec.branch().regular_sup(&lifted).unwrap();
        assert_eq!(rec.recognizes(&e).unwrap(), membership_game(&a, &g).unwrap(), "{g}\n{a}");
    }
}

#[test]
fn skeleton_of_a_two_state_automaton() {
    use treealg_core::skeleton::{skeleton_check, skeleton_verdict, SkeletonBounds, NO_COUNTEREXAMPLE};
    let a = random_automaton(&al(), 2, &[1, 2], &mut rng(11));
    let rec = Recognizer::new(a.clone(), 2);
    let gens = Generators::all(rec.ta().wilke());
    let rep = skeleton_check(rec.branch(), &gens, Some(&a), SkeletonBounds::default());
    assert_eq!(skeleton_verdict(&rep), NO_COUNTEREXAMPLE, "{rep}");
}
