//! Seeded random generators for model-legal trees and words.
//!
//! Shapes follow the cubic Duhamel structure: inner nodes carry exactly
//! three children (so every non-root letter has arity 4 and a vanishing
//! signed sum by the Kirchhoff relation), and root arities stay inside the
//! model's alphabet.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::freq::Frequency;
use crate::pairing::{Model, Pairing};
use crate::tree::{DecoratedTree, EdgeDecoration, RawNode};
use crate::word::{Letter, Slot, Word};

#[derive(Clone, Debug)]
pub struct TreeGen {
    pub model: Model,
    pub dim: usize,
    /// components drawn from `[-bound, bound]`
    pub freq_bound: i64,
    /// number of t2 edges (inner nodes)
    pub t2_edges: usize,
    /// fully pair the leaves (forces an even-arity root)
    pub paired: bool,
    /// probability that a pair is drawn green (hatted, class 1) — NLS only
    pub hat_pair_prob: f64,
}

enum Shape {
    Leaf,
    Inner(Vec<Shape>),
}

fn random_shape(rng: &mut impl Rng, root_arity: usize, t2_budget: usize) -> Shape {
    // Distribute the t2 budget over a root with `root_arity` children; each
    // inner node has exactly 3 children.
    let mut budget = t2_budget;
    fn child(rng: &mut impl Rng, budget: &mut usize, depth: usize) -> Shape {
        if *budget > 0 && depth < 4 && rng.gen_bool(0.6) {
            *budget -= 1;
            let kids = (0..3).map(|_| child(rng, budget, depth + 1)).collect();
            Shape::Inner(kids)
        } else {
            Shape::Leaf
        }
    }
    let mut children: Vec<Shape> = (0..root_arity)
        .map(|_| child(rng, &mut budget, 1))
        .collect();
    // Spend any remainder by deepening the first leaf found.
    while budget > 0 {
        fn deepen(s: &mut Shape, budget: &mut usize) -> bool {
            match s {
                Shape::Leaf => {
                    if *budget == 0 {
                        return false;
                    }
                    *budget -= 1;
                    *s = Shape::Inner(vec![Shape::Leaf, Shape::Leaf, Shape::Leaf]);
                    true
                }
                Shape::Inner(kids) => kids.iter_mut().any(|k| deepen(k, budget)),
            }
        }
        let mut progressed = false;
        for c in &mut children {
            if deepen(c, &mut budget) {
                progressed = true;
                break;
            }
        }
        if !progressed {
            break;
        }
    }
    Shape::Inner(children)
}

fn count_leaves(s: &Shape) -> usize {
    match s {
        Shape::Leaf => 1,
        Shape::Inner(kids) => kids.iter().map(count_leaves).sum(),
    }
}

fn random_freq(rng: &mut impl Rng, dim: usize, bound: i64) -> Frequency {
    Frequency::new((0..dim).map(|_| rng.gen_range(-bound..=bound)).collect())
}

/// A random decorated tree with its pairing. Leaf tags survive
/// canonicalization, so the returned pairing references the canonical leaf
/// ids.
pub fn random_tree(rng: &mut impl Rng, g: &TreeGen) -> (DecoratedTree, Pairing) {
    let root_arity = match (g.model, g.paired) {
        (Model::Nls, true) => 4,
        (Model::Nls, false) => *[1usize, 3].choose(rng).expect("choices"),
        (Model::Wave, true) | (Model::Wave, false) => 2,
    };
    let shape = random_shape(rng, root_arity, g.t2_edges);
    let children = match shape {
        Shape::Inner(c) => c,
        Shape::Leaf => unreachable!(),
    };
    let n_leaves: usize = children.iter().map(count_leaves).sum();

    // Decorations per leaf (DFS order of the shape).
    let mut conj = vec![false; n_leaves];
    let mut hat = vec![false; n_leaves];
    let mut freq: Vec<Frequency> = vec![Frequency::zero(g.dim); n_leaves];
    let mut pairing = Pairing::empty();
    if g.paired {
        debug_assert!(n_leaves.is_multiple_of(2));
        let mut order: Vec<usize> = (0..n_leaves).collect();
        order.shuffle(rng);
        for pair in order.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            let f = random_freq(rng, g.dim, g.freq_bound);
            match g.model {
                Model::Nls => {
                    freq[a] = f.clone();
                    freq[b] = f;
                    let flip: bool = rng.gen();
                    conj[a] = flip;
                    conj[b] = !flip;
                    if rng.gen_bool(g.hat_pair_prob) {
                        hat[a] = true;
                        hat[b] = true;
                        pairing.insert_class1(a as u32, b as u32);
                    } else {
                        pairing.insert_class2(a as u32, b as u32);
                    }
                }
                Model::Wave => {
                    freq[a] = f.clone();
                    freq[b] = -&f;
                    pairing.insert_class2(a as u32, b as u32);
                }
            }
        }
    } else {
        for i in 0..n_leaves {
            freq[i] = random_freq(rng, g.dim, g.freq_bound);
            if g.model == Model::Nls {
                conj[i] = rng.gen();
            }
        }
    }

    // Build raw nodes bottom-up; inner decorations from the Kirchhoff
    // relation.
    let mut next_leaf = 0usize;
    fn build(
        s: &Shape,
        rng: &mut impl Rng,
        model: Model,
        conj: &[bool],
        hat: &[bool],
        freq: &[Frequency],
        next_leaf: &mut usize,
    ) -> RawNode {
        match s {
            Shape::Leaf => {
                let i = *next_leaf;
                *next_leaf += 1;
                let decor = if hat[i] {
                    EdgeDecoration::t1_hat(conj[i])
                } else {
                    EdgeDecoration::t1(conj[i])
                };
                RawNode::leaf(decor, freq[i].clone()).tagged(&format!("leaf{i}"))
            }
            Shape::Inner(kids) => {
                let children: Vec<RawNode> = kids
                    .iter()
                    .map(|k| build(k, rng, model, conj, hat, freq, next_leaf))
                    .collect();
                let edge_conj = model == Model::Nls && rng.gen::<bool>();
                let signed = Frequency::signed_sum(
                    children.iter().map(|c| (&c.freq, c.decor.conj)),
                );
                let f = if edge_conj { -&signed } else { signed };
                RawNode::inner(EdgeDecoration::t2(edge_conj), f, children)
            }
        }
    }
    let raw: Vec<RawNode> = children
        .iter()
        .map(|c| build(c, rng, g.model, &conj, &hat, &freq, &mut next_leaf))
        .collect();
    let (tree, tags) = DecoratedTree::canonicalize(raw).expect("generated tree is well-formed");
    let remap = |i: u32| tags[&format!("leaf{i}")];
    let pairing = pairing.remap(remap);
    (tree, pairing)
}

/// A random single letter with model-legal arity and constraints.
pub fn random_letter(rng: &mut impl Rng, model: Model, dim: usize, bound: i64) -> Letter {
    match model {
        Model::Nls => {
            let arity = *[1usize, 3, 4].choose(rng).expect("choices");
            let mut slots: Vec<Slot> = (0..arity.saturating_sub(1))
                .map(|_| Slot::new(rng.gen(), false, random_freq(rng, dim, bound)))
                .collect();
            if arity == 4 {
                // last slot closes the signed sum
                let partial = Frequency::signed_sum(slots.iter().map(|s| (&s.freq, s.conj)));
                let conj: bool = rng.gen();
                let f = if conj { partial } else { -&partial };
                slots.push(Slot::new(conj, false, f));
            } else {
                slots.push(Slot::new(rng.gen(), false, random_freq(rng, dim, bound)));
            }
            Letter::new(model, slots, false).expect("legal letter").0
        }
        Model::Wave => {
            let arity = *[2usize, 4].choose(rng).expect("choices");
            let mut slots: Vec<Slot> = (0..arity - 1)
                .map(|_| Slot::new(false, false, random_freq(rng, dim, bound)))
                .collect();
            if arity == 4 {
                let partial = Frequency::signed_sum(slots.iter().map(|s| (&s.freq, false)));
                slots.push(Slot::new(false, false, -&partial));
            } else {
                slots.push(Slot::new(false, false, random_freq(rng, dim, bound)));
            }
            Letter::new(model, slots, false).expect("legal letter").0
        }
    }
}

/// A random unpaired word of the given length.
pub fn random_word(rng: &mut impl Rng, model: Model, dim: usize, bound: i64, len: usize) -> Word {
    let letters = (0..len)
        .map(|_| random_letter(rng, model, dim, bound))
        .collect();
    Word::new(model, letters, Pairing::empty()).expect("legal word")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn paired_trees_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for model in [Model::Nls, Model::Wave] {
            let g = TreeGen {
                model,
                dim: 2,
                freq_bound: 3,
                t2_edges: 3,
                paired: true,
                hat_pair_prob: 0.3,
            };
            for _ in 0..50 {
                let (tree, pairing) = random_tree(&mut rng, &g);
                let infos: Vec<_> = tree
                    .leaves()
                    .iter()
                    .map(|(d, f)| (f.clone(), d.conj, d.hat))
                    .collect();
                crate::pairing::validate_pairing(&pairing, &infos, model).unwrap();
                assert_eq!(pairing.paired_ids().len(), infos.len());
                assert_eq!(tree.t2_edge_count(), 3);
            }
        }
    }

    #[test]
    fn generated_trees_arborify() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for model in [Model::Nls, Model::Wave] {
            let g = TreeGen {
                model,
                dim: 1,
                freq_bound: 5,
                t2_edges: 2,
                paired: false,
                hat_pair_prob: 0.0,
            };
            for _ in 0..50 {
                let (tree, pairing) = random_tree(&mut rng, &g);
                crate::arborify::arborify(&tree, &pairing, model).unwrap();
            }
        }
    }

    #[test]
    fn random_letters_are_legal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let _ = random_letter(&mut rng, Model::Nls, 2, 9);
            let _ = random_letter(&mut rng, Model::Wave, 3, 9);
        }
    }
}
