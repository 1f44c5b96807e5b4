//! Property tests over randomized algebraic structures.

use proptest::prelude::*;

use arborify::arborify::{arborify, arborify_cp};
use arborify::dsl::{parse_word, print_word_poly};
use arborify::freq::Frequency;
use arborify::gen::{random_tree, random_word, TreeGen};
use arborify::pairing::Model;
use arborify::word::{concat, shuffle, shuffle_poly, swap_green, WordPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model_from(b: bool) -> Model {
    if b {
        Model::Nls
    } else {
        Model::Wave
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shuffle_commutes(seed in any::<u64>(), nls in any::<bool>(), lu in 0usize..4, lv in 0usize..4) {
        let model = model_from(nls);
        let dim = if model == Model::Nls { 1 } else { 3 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_word(&mut rng, model, dim, 30, lu);
        let v = random_word(&mut rng, model, dim, 30, lv);
        prop_assert_eq!(shuffle(&u, &v).unwrap(), shuffle(&v, &u).unwrap());
    }

    #[test]
    fn shuffle_associates(seed in any::<u64>(), nls in any::<bool>()) {
        let model = model_from(nls);
        let dim = if model == Model::Nls { 1 } else { 3 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_word(&mut rng, model, dim, 30, 2);
        let v = random_word(&mut rng, model, dim, 30, 1);
        let w = random_word(&mut rng, model, dim, 30, 2);
        let left = shuffle_poly(&shuffle(&u, &v).unwrap(), &WordPoly::single(w.clone())).unwrap();
        let right = shuffle_poly(&WordPoly::single(u), &shuffle(&v, &w).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn concat_lives_inside_shuffle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_word(&mut rng, Model::Nls, 1, 30, 2);
        let v = random_word(&mut rng, Model::Nls, 1, 30, 2);
        let cat = concat(&u, &v).unwrap();
        prop_assert!(shuffle(&u, &v).unwrap().terms().any(|(w, _)| *w == cat));
    }

    #[test]
    fn arborification_routes_agree(seed in any::<u64>(), nls in any::<bool>(), edges in 0usize..3, paired in any::<bool>()) {
        let model = model_from(nls);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = TreeGen {
            model,
            dim: 1,
            freq_bound: 20,
            t2_edges: edges,
            paired,
            hat_pair_prob: 0.3,
        };
        let (tree, pairing) = random_tree(&mut rng, &gen);
        let a = arborify(&tree, &pairing, model).unwrap();
        let b = arborify_cp(&tree, &pairing, model).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn swap_green_is_involutive_on_arborified_words(seed in any::<u64>()) {
        // NLS arborifications carry hat slots at the split decorations; pick
        // the split frequency and a plain leaf frequency.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = TreeGen {
            model: Model::Nls,
            dim: 1,
            freq_bound: 25,
            t2_edges: 1,
            paired: false,
            hat_pair_prob: 0.0,
        };
        let (tree, pairing) = random_tree(&mut rng, &gen);
        let poly = arborify(&tree, &pairing, Model::Nls).unwrap();
        for (w, _) in poly.terms() {
            let infos = w.slot_infos();
            let hat = infos.iter().find(|(_, _, h)| *h).map(|(f, _, _)| f.clone());
            let plain_class = |f: &Frequency| {
                infos
                    .iter()
                    .filter(|(g, _, _)| g == f)
                    .all(|(_, _, h)| !h)
            };
            let plain = infos
                .iter()
                .map(|(f, _, _)| f.clone())
                .find(|f| Some(f) != hat.as_ref() && plain_class(f));
            if let (Some(k), Some(l)) = (hat, plain) {
                // the hatted class must also be uniform for ψ to apply
                let uniform_hat = infos.iter().filter(|(g, _, _)| *g == k).all(|(_, _, h)| *h);
                if !uniform_hat || k == l {
                    continue;
                }
                let once = swap_green(w, &k, &l).unwrap();
                let twice = swap_green(&once, &k, &l).unwrap();
                prop_assert_eq!(&twice, w);
            }
        }
    }

    #[test]
    fn kirchhoff_completion(seed in any::<u64>(), nls in any::<bool>(), edges in 0usize..4) {
        // recomputing inner decorations bottom-up from the leaves reproduces
        // the stored ones exactly
        let model = model_from(nls);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = TreeGen {
            model,
            dim: 2,
            freq_bound: 9,
            t2_edges: edges,
            paired: false,
            hat_pair_prob: 0.0,
        };
        let (tree, _) = random_tree(&mut rng, &gen);
        fn recompute(n: &arborify::tree::TreeNode) -> Frequency {
            if n.is_leaf() {
                return n.freq.clone();
            }
            let signed = Frequency::signed_sum(
                n.children
                    .iter()
                    .map(|c| (recompute(c), c.decor.conj))
                    .collect::<Vec<_>>()
                    .iter()
                    .map(|(f, c)| (f, *c)),
            );
            let expect = if n.decor.conj { -&signed } else { signed };
            assert_eq!(expect, n.freq, "inner decoration mismatch");
            n.freq.clone()
        }
        for r in tree.root_children() {
            recompute(r);
        }
    }

    #[test]
    fn word_polys_roundtrip_via_text(seed in any::<u64>(), nls in any::<bool>()) {
        let model = model_from(nls);
        let dim = if model == Model::Nls { 1 } else { 3 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = TreeGen {
            model,
            dim,
            freq_bound: 3,
            t2_edges: 2,
            paired: true,
            hat_pair_prob: 0.25,
        };
        let (tree, pairing) = random_tree(&mut rng, &gen);
        let poly = arborify(&tree, &pairing, model).unwrap();
        let text = print_word_poly(&poly);
        let back = parse_word(&text, model, false).unwrap();
        prop_assert_eq!(back.poly, poly);
    }

    #[test]
    fn json_roundtrip_preserves_words(seed in any::<u64>(), nls in any::<bool>()) {
        let model = model_from(nls);
        let dim = if model == Model::Nls { 2 } else { 3 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = TreeGen {
            model,
            dim,
            freq_bound: 4,
            t2_edges: 2,
            paired: true,
            hat_pair_prob: 0.3,
        };
        let (tree, pairing) = random_tree(&mut rng, &gen);
        let poly = arborify(&tree, &pairing, model).unwrap();
        let text = arborify::json::wordpoly_to_json(&poly, model);
        let (back, m) = arborify::json::wordpoly_from_json(&text).unwrap();
        prop_assert_eq!(m, model);
        prop_assert_eq!(back, poly);
    }
}
