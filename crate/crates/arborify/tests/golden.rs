//! Golden-corpus regeneration and byte-exact round trips.
//!
//! The corpus is deterministic: rerunning the ignored regeneration test must
//! reproduce the checked-in files bit for bit.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use arborify::catalog;
use arborify::coeff::ExactCoeff;
use arborify::dsl::{parse_tree, print_tree_poly};
use arborify::freq::Frequency;
use arborify::gen::{random_tree, TreeGen};
use arborify::pairing::{Model, Pairing};
use arborify::tree::{Forest, TreePoly};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn corpus() -> Vec<(String, String)> {
    let f = |v: i64| Frequency::new(vec![v]);
    let f3 = |a: i64, b: i64, c: i64| Frequency::new(vec![a, b, c]);
    let mut files: Vec<(String, String)> = Vec::new();
    let mut push = |files: &mut Vec<(String, String)>, body: String| {
        let name = format!("golden_{:02}.arb", files.len());
        files.push((name, body + "\n"));
    };

    // worked trees with pairings
    let catalog_cases: Vec<(arborify::tree::DecoratedTree, Pairing)> = vec![
        catalog::nls_t4(&f(1), &f(2), &f(4)),
        catalog::nls_t5(&f(1), &f(0), &f(2), &f(4)),
        catalog::nls_t6(&f(1), &f(0), &f(2), &f(4)),
        catalog::nls_t7(&f(1), &f(0), &f(2), &f(4)),
        catalog::nls_t5(&f(-2), &f(3), &f(1), &f(5)),
        catalog::wave_t1(&f3(1, 0, 0), &f3(0, 1, 0), &f3(0, 0, -1)),
        catalog::wave_t2(&f3(1, 0, 0), &f3(0, -1, 0), &f3(1, 1, 0)),
        catalog::wave_t1(&f3(0, 0, 0), &f3(1, -1, 0), &f3(-1, 1, 1)),
    ];
    for (tree, pairing) in catalog_cases {
        let body = print_tree_poly(&TreePoly::single(tree), Some(&pairing));
        push(&mut files, body);
    }

    // seeded random trees, paired and unpaired, both models
    let mut rng = ChaCha8Rng::seed_from_u64(20260810);
    for i in 0..22 {
        let model = if i % 2 == 0 { Model::Nls } else { Model::Wave };
        let gen = TreeGen {
            model,
            dim: if model == Model::Nls { 2 } else { 3 },
            freq_bound: 3,
            t2_edges: rng.gen_range(0..4),
            paired: i % 3 != 0,
            hat_pair_prob: 0.3,
        };
        let (tree, pairing) = random_tree(&mut rng, &gen);
        let body = print_tree_poly(&TreePoly::single(tree), Some(&pairing));
        push(&mut files, body);
    }

    // multi-term polynomials with exact coefficients
    for i in 0..20 {
        let model = if i % 2 == 0 { Model::Nls } else { Model::Wave };
        let n_terms = 2 + (i % 2);
        let mut poly = TreePoly::zero();
        for j in 0..n_terms {
            let gen = TreeGen {
                model,
                dim: 1,
                freq_bound: 6,
                t2_edges: rng.gen_range(0..3),
                paired: false,
                hat_pair_prob: 0.0,
            };
            let (tree, _) = random_tree(&mut rng, &gen);
            let coeff = match (i + j) % 4 {
                0 => ExactCoeff::from_int(rng.gen_range(1..5)),
                1 => ExactCoeff::i().mul(&ExactCoeff::from_int(-(rng.gen_range(1..4)))),
                2 => ExactCoeff::new(
                    num::BigRational::new(rng.gen_range(1..8).into(), rng.gen_range(2..5).into()),
                    num::BigRational::from_integer(0.into()),
                    0,
                ),
                _ => ExactCoeff {
                    mu2: rng.gen_range(1..3),
                    ..ExactCoeff::from_int(2)
                },
            };
            poly.add_term(Forest::from_tree(tree), coeff).unwrap();
        }
        push(&mut files, print_tree_poly(&poly, None));
    }

    assert_eq!(files.len(), 50);
    files
}

#[test]
#[ignore = "writes tests/golden; run when the corpus format changes"]
fn regenerate_golden_corpus() {
    let dir = golden_dir();
    std::fs::create_dir_all(&dir).unwrap();
    for (name, body) in corpus() {
        std::fs::write(dir.join(name), body).unwrap();
    }
}

#[test]
fn corpus_matches_generator() {
    // the checked-in files are exactly what the generator yields
    for (name, body) in corpus() {
        let on_disk = std::fs::read_to_string(golden_dir().join(&name))
            .unwrap_or_else(|e| panic!("missing golden file {name}: {e}"));
        assert_eq!(on_disk, body, "{name} diverged from the generator");
    }
}

#[test]
fn golden_files_roundtrip_byte_exactly() {
    let mut count = 0;
    for entry in std::fs::read_dir(golden_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map_or(true, |x| x != "arb") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = parse_tree(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        let printed = print_tree_poly(&parsed.poly, Some(&parsed.pairing));
        assert_eq!(printed.trim_end(), text.trim_end(), "{path:?}");
        count += 1;
    }
    assert!(count >= 50, "expected at least 50 golden files, found {count}");
}
