use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treealg_core::automaton::{automaton_sg, random_automaton};
use treealg_core::formats::{parse_automaton, parse_graph, parse_wilke, print_automaton, print_graph, print_wilke};
use treealg_core::graphs::{random_graph, unravel_equal, TreeGraph};
use treealg_core::omega::UpWord;
use treealg_core::tree::{random_tree, random_tree_by, random_tree_in, HoleMode, RankedAlphabet, RankedTree};

fn al() -> RankedAlphabet {
    RankedAlphabet::new(&[("a", 2), ("b", 1), ("c", 0)], &[]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn flatten_has_units(seed in any::<u64>(), arity in 0usize..3) {
        let Ok(t) = random_tree(&al(), 8, arity, seed) else { return Ok(()) };
        prop_assert_eq!(RankedTree::singleton(t.clone()).flatten(), t.clone());
        let lifted = t.map(|s| Some(RankedTree::singleton(s.clone()))).unwrap();
        prop_assert_eq!(lifted.flatten(), t);
    }

    #[test]
    fn flatten_is_associative(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let pool = al().pool();
        let ks = [0, 1, 2];
        let ttt = random_tree_by(&ks, 3, 1, HoleMode::Affine, &mut r, |r, k| {
            random_tree_by(&ks, 3, k, HoleMode::Affine, r, |r, j| {
                random_tree_in(&pool, 3, j, HoleMode::Affine, r).ok()
            })
            .ok()
        });
        let Ok(ttt) = ttt else { return Ok(()) };
        let inner_first = ttt.map(|tt| Some(tt.flatten())).unwrap().flatten();
        prop_assert_eq!(ttt.flatten().flatten(), inner_first);
    }

    #[test]
    fn trees_survive_the_graph_round_trip(seed in any::<u64>(), arity in 0usize..3) {
        let Ok(t) = random_tree(&al(), 8, arity, seed) else { return Ok(()) };
        let g = TreeGraph::from_tree(&t);
        prop_assert_eq!(g.unravel_finite(), Some(t));
        prop_assert!(unravel_equal(&g, &g.canonical()));
    }

    #[test]
    fn graph_files_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&al().pool(), n, 0, 0, &mut r).unwrap();
        let text = print_graph(&g);
        let back = parse_graph(&text, &al()).unwrap();
        prop_assert_eq!(print_graph(&back), text);
        prop_assert!(unravel_equal(&g, &back));
    }

    #[test]
    fn automaton_and_wilke_files_round_trip(seed in any::<u64>(), q in 1usize..4) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = random_automaton(&al(), q, &[0, 1, 2], &mut r);
        let text = print_automaton(&a);
        prop_assert_eq!(print_automaton(&parse_automaton(&text).unwrap()), text);
        let w = automaton_sg(&a).into_wilke();
        let text = print_wilke(&w);
        prop_assert_eq!(print_wilke(&parse_wilke(&text).unwrap()), text);
    }

    #[test]
    fn lasso_products_ignore_unrolling(
        seed in any::<u64>(),
        u in prop::collection::vec(any::<prop::sample::Index>(), 0..3),
        v in prop::collection::vec(any::<prop::sample::Index>(), 1..4),
        k in 1usize..4,
    ) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let w = automaton_sg(&random_automaton(&al(), 2, &[0, 1, 2], &mut r)).into_wilke();
        let u: Vec<usize> = u.iter().map(|i| i.index(w.n1())).collect();
        let v: Vec<usize> = v.iter().map(|i| i.index(w.n1())).collect();
        let base = w.up_product(&UpWord::lasso(u.clone(), v.clone()));
        let unrolled = [u.clone(), v.repeat(k)].concat();
        prop_assert_eq!(w.up_product(&UpWord::lasso(unrolled, v.repeat(k))), base);
    }
}
