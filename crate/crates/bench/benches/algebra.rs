use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use treealg_bench::{alphabet, automaton, graphs};
use treealg_core::algebra::{check_monad_laws, occurrence_algebra, TreeAlgebra};
use treealg_core::automaton::{automaton_sg, membership_algebraic, membership_game, Recognizer, DEFAULT_ANNOTATION_BUDGET};
use treealg_core::omega::{check_meet_continuity_sg, MeetBounds};
use treealg_core::report::SamplerConfig;
use treealg_core::tree::{enumerate_closed_by_depth, LabelPool};

fn membership(c: &mut Criterion) {
    let mut group = c.benchmark_group("membership");
    for states in [1, 2, 3] {
        let a = automaton(states, 7);
        let sg = automaton_sg(&a);
        let gs = graphs(4, 16, 3);
        group.bench_with_input(BenchmarkId::new("game", states), &gs, |b, gs| {
            b.iter(|| gs.iter().filter(|g| membership_game(&a, g).unwrap()).count())
        });
        group.bench_with_input(BenchmarkId::new("algebraic", states), &gs, |b, gs| {
            b.iter(|| {
                gs.iter()
                    .map(|g| membership_algebraic(&a, &sg, g, DEFAULT_ANNOTATION_BUDGET).unwrap())
                    .collect::<Vec<_>>()
            })
        });
    }
    group.finish();
}

fn alpha(c: &mut Criterion) {
    let terms = enumerate_closed_by_depth(&alphabet().pool(), 3);
    let rec = Recognizer::new(automaton(2, 11), 2);
    c.bench_function("alpha on depth-3 terms", |b| {
        b.iter(|| terms.iter().map(|t| rec.alpha(black_box(t)).unwrap()).collect::<Vec<_>>())
    });
}

fn laws(c: &mut Criterion) {
    let occ = occurrence_algebra(3);
    let pool = LabelPool::new((0..=3).flat_map(|n| occ.carrier(n).unwrap()));
    let cfg = SamplerConfig::default().with_samples(200);
    c.bench_function("monad laws, 200 samples", |b| b.iter(|| check_monad_laws(&occ, &pool, &cfg).passed()));
    let w = automaton_sg(&automaton(2, 5)).into_wilke();
    c.bench_function("SG meet-continuity, |Q| = 2", |b| {
        b.iter(|| check_meet_continuity_sg(&w, MeetBounds::default()).passed())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = membership, alpha, laws
}
criterion_main!(benches);
