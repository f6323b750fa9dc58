//! Shared fixtures for the benchmarks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treealg_core::automaton::{random_automaton, ParityAutomaton};
use treealg_core::graphs::{random_graph, TreeGraph};
use treealg_core::tree::{RankedAlphabet, Symbol};

pub fn alphabet() -> RankedAlphabet {
    RankedAlphabet::new(&[("a", 2), ("b", 1), ("c", 0)], &[]).expect("distinct symbols")
}

pub fn automaton(states: usize, seed: u64) -> ParityAutomaton {
    random_automaton(&alphabet(), states, &[0, 1, 2, 3], &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn graphs(vertices: usize, count: usize, seed: u64) -> Vec<TreeGraph<Symbol>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let pool = alphabet().pool();
    (0..count).map(|_| random_graph(&pool, vertices, 0, 0, &mut r).expect("closed graphs exist")).collect()
}
