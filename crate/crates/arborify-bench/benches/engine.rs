use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use arborify::arborify::{arborify, arborify_cp};
use arborify::eval::{eval_wordpoly, EtaMode, EvalParams};
use arborify::gen::{random_tree, random_word, TreeGen};
use arborify::pairing::Model;
use arborify::word::shuffle;

fn bench_shuffle(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random_word(&mut rng, Model::Nls, 1, 50, 4);
    let v = random_word(&mut rng, Model::Nls, 1, 50, 4);
    c.bench_function("shuffle 4x4", |b| {
        b.iter(|| shuffle(std::hint::black_box(&u), std::hint::black_box(&v)).unwrap())
    });
}

fn bench_arborify(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let gen = TreeGen {
        model: Model::Nls,
        dim: 2,
        freq_bound: 3,
        t2_edges: 3,
        paired: true,
        hat_pair_prob: 0.25,
    };
    let (tree, pairing) = random_tree(&mut rng, &gen);
    c.bench_function("arborify 3-edge tree", |b| {
        b.iter(|| arborify(std::hint::black_box(&tree), &pairing, Model::Nls).unwrap())
    });
    c.bench_function("arborify via coproduct", |b| {
        b.iter(|| arborify_cp(std::hint::black_box(&tree), &pairing, Model::Nls).unwrap())
    });
}

fn bench_eval(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gen = TreeGen {
        model: Model::Wave,
        dim: 3,
        freq_bound: 1,
        t2_edges: 2,
        paired: true,
        hat_pair_prob: 0.0,
    };
    let (tree, pairing) = random_tree(&mut rng, &gen);
    let words = arborify(&tree, &pairing, Model::Wave).unwrap();
    let params = EvalParams {
        dim: 3,
        quad_order: 32,
        ..EvalParams::default()
    };
    c.bench_function("eval 3-letter wave words, order 32", |b| {
        b.iter(|| eval_wordpoly(std::hint::black_box(&words), &params, EtaMode::Paired).unwrap())
    });
}

criterion_group!(benches, bench_shuffle, bench_arborify, bench_eval);
criterion_main!(benches);
