//! Arborification: rewriting decorated trees as word polynomials, either by
//! structural recursion or through the Butcher–Connes–Kreimer style coproduct.
//!
//! Both routes must agree exactly — coefficients, letters and pairings — and
//! the test suites hold them to that.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::coeff::ExactCoeff;
use crate::error::{AlgebraError, AlgebraResult};
use crate::freq::Frequency;
use crate::pairing::{Model, Pairing};
use crate::tree::{DecoratedTree, EdgeDecoration, EdgeKind, RawNode, TreeNode};
use crate::word::{Letter, Slot, Word, WordPoly};

/// Where a word slot came from: an original leaf, or one of the two ends of a
/// split t2 edge.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum SlotOrigin {
    Leaf(u32),
    SplitRoot(u32),
    SplitChild(u32),
}

#[derive(Clone, Debug)]
struct MNode {
    decor: EdgeDecoration,
    freq: Frequency,
    children: Vec<MNode>,
    origin: Option<SlotOrigin>,
    edge_id: Option<u32>,
}

impl MNode {
    fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

fn mark_tree(tree: &DecoratedTree, next_leaf: &mut u32, next_edge: &mut u32) -> Vec<MNode> {
    fn walk(n: &TreeNode, next_leaf: &mut u32, next_edge: &mut u32) -> MNode {
        if n.is_leaf() {
            let id = *next_leaf;
            *next_leaf += 1;
            return MNode {
                decor: n.decor,
                freq: n.freq.clone(),
                children: Vec::new(),
                origin: Some(SlotOrigin::Leaf(id)),
                edge_id: None,
            };
        }
        let id = *next_edge;
        *next_edge += 1;
        MNode {
            decor: n.decor,
            freq: n.freq.clone(),
            children: n
                .children
                .iter()
                .map(|c| walk(c, next_leaf, next_edge))
                .collect(),
            origin: None,
            edge_id: Some(id),
        }
    }
    tree.root_children()
        .iter()
        .map(|r| walk(r, next_leaf, next_edge))
        .collect()
}

/// The two slots a split t2 edge turns into. For NLS the spawned slot in the
/// recursive factor flips the conjugation bit and both ends are hatted; for
/// the wave model the spawned slot negates the frequency and the root letter
/// keeps a plain slot.
fn split_slots(model: Model, conj: bool, freq: &Frequency) -> (Slot, Slot, ExactCoeff) {
    match model {
        Model::Nls => {
            let child = Slot::new(!conj, true, freq.clone());
            let root = Slot::new(conj, true, freq.clone());
            let coeff = if conj {
                ExactCoeff::i().neg()
            } else {
                ExactCoeff::i()
            };
            (child, root, coeff)
        }
        Model::Wave => {
            let child = Slot::new(false, true, -freq);
            let root = Slot::new(false, false, freq.clone());
            (child, root, ExactCoeff::one())
        }
    }
}

type ProtoLetter = Vec<(Slot, SlotOrigin)>;
type ProtoWord = Vec<ProtoLetter>;

fn proto_shuffle(a: &[ProtoWord], b: &[ProtoWord]) -> Vec<ProtoWord> {
    // all order-preserving interleavings for each pair
    let mut out = Vec::new();
    for wa in a {
        for wb in b {
            let m = wa.len();
            let n = wb.len();
            for positions in (0..m + n).combinations(m) {
                let mut take_a = vec![false; m + n];
                for p in &positions {
                    take_a[*p] = true;
                }
                let (mut ia, mut ib) = (0usize, 0usize);
                let mut merged = Vec::with_capacity(m + n);
                for t in &take_a {
                    if *t {
                        merged.push(wa[ia].clone());
                        ia += 1;
                    } else {
                        merged.push(wb[ib].clone());
                        ib += 1;
                    }
                }
                out.push(merged);
            }
        }
    }
    out
}

/// Recursive arborification of a node-children list (the virtual root of a
/// tree). Produces prototype words; the root letter comes last.
fn arb_children(children: &[MNode], model: Model) -> AlgebraResult<Vec<(ExactCoeff, ProtoWord)>> {
    let leaves: Vec<&MNode> = children.iter().filter(|c| c.is_leaf()).collect();
    let inner: Vec<&MNode> = children.iter().filter(|c| !c.is_leaf()).collect();

    let mut root_letter: ProtoLetter = leaves
        .iter()
        .map(|l| {
            (
                Slot::new(l.decor.conj, l.decor.hat, l.freq.clone()),
                l.origin.expect("leaf origin"),
            )
        })
        .collect();

    let mut coeff = ExactCoeff::one();
    let mut factors: Vec<Vec<(ExactCoeff, ProtoWord)>> = Vec::new();
    for t2 in &inner {
        let e = t2.edge_id.expect("t2 edge id");
        let (child_slot, root_slot, split_coeff) = split_slots(model, t2.decor.conj, &t2.freq);
        coeff = coeff.mul(&split_coeff);
        root_letter.push((root_slot, SlotOrigin::SplitRoot(e)));
        let spawned = MNode {
            decor: EdgeDecoration {
                kind: EdgeKind::T1,
                conj: child_slot.conj,
                hat: true,
            },
            freq: child_slot.freq.clone(),
            children: Vec::new(),
            origin: Some(SlotOrigin::SplitChild(e)),
            edge_id: None,
        };
        let mut sub = t2.children.clone();
        sub.push(spawned);
        factors.push(arb_children(&sub, model)?);
    }

    if children.is_empty() {
        return Ok(vec![(ExactCoeff::one(), Vec::new())]);
    }

    // Shuffle the recursive factors together, then append the root letter.
    let mut combined: Vec<(ExactCoeff, ProtoWord)> = vec![(coeff, Vec::new())];
    for f in factors {
        let mut next = Vec::new();
        for (ca, wa) in &combined {
            for (cb, wb) in &f {
                for merged in proto_shuffle(std::slice::from_ref(wa), std::slice::from_ref(wb)) {
                    next.push((ca.mul(cb), merged));
                }
            }
        }
        combined = next;
    }
    for (_, w) in &mut combined {
        w.push(root_letter.clone());
    }
    Ok(combined)
}

fn finalize_word(
    model: Model,
    proto: &ProtoWord,
    tree_pairing: &Pairing,
) -> AlgebraResult<Word> {
    let mut letters = Vec::with_capacity(proto.len());
    let mut flat_of: BTreeMap<SlotOrigin, u32> = BTreeMap::new();
    let mut offset = 0u32;
    for pl in proto {
        let (slots, origins): (Vec<Slot>, Vec<SlotOrigin>) = pl.iter().cloned().unzip();
        let (letter, perm) = Letter::new(model, slots, false)?;
        for (i, origin) in origins.into_iter().enumerate() {
            flat_of.insert(origin, offset + perm[i] as u32);
        }
        offset += letter.arity() as u32;
        letters.push(letter);
    }
    let mut pairing = Pairing::empty();
    for (origin, flat) in &flat_of {
        if let SlotOrigin::SplitRoot(e) = origin {
            let child = flat_of
                .get(&SlotOrigin::SplitChild(*e))
                .expect("both ends of a split");
            pairing.insert_class1(*flat, *child);
        }
    }
    for ((a, b), class1) in tree_pairing.all_pairs() {
        let fa = *flat_of
            .get(&SlotOrigin::Leaf(a))
            .ok_or_else(|| AlgebraError::InvalidPairing(format!("leaf id {a} not in tree")))?;
        let fb = *flat_of
            .get(&SlotOrigin::Leaf(b))
            .ok_or_else(|| AlgebraError::InvalidPairing(format!("leaf id {b} not in tree")))?;
        if class1 {
            pairing.insert_class1(fa, fb);
        } else {
            pairing.insert_class2(fa, fb);
        }
    }
    Word::new(model, letters, pairing)
}

fn check_model(trees: &[DecoratedTree], model: Model) -> AlgebraResult<()> {
    if model == Model::Wave {
        for t in trees {
            if !t.is_conj_free() {
                return Err(AlgebraError::InvalidDecoration(
                    "wave trees cannot carry conjugation bits".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Arborify a forest; the pairing references leaf ids counted across the
/// trees in order. The forest product maps to the shuffle product.
pub fn arborify_forest(
    trees: &[DecoratedTree],
    pairing: &Pairing,
    model: Model,
) -> AlgebraResult<WordPoly> {
    check_model(trees, model)?;
    let mut next_leaf = 0u32;
    let mut next_edge = 0u32;
    let marked: Vec<Vec<MNode>> = trees
        .iter()
        .map(|t| mark_tree(t, &mut next_leaf, &mut next_edge))
        .collect();
    let mut combined: Vec<(ExactCoeff, ProtoWord)> = vec![(ExactCoeff::one(), Vec::new())];
    for m in &marked {
        let words = arb_children(m, model)?;
        let mut next = Vec::new();
        for (ca, wa) in &combined {
            for (cb, wb) in &words {
                for merged in proto_shuffle(std::slice::from_ref(wa), std::slice::from_ref(wb)) {
                    next.push((ca.mul(cb), merged));
                }
            }
        }
        combined = next;
    }
    let mut out = WordPoly::zero();
    for (coeff, proto) in combined {
        let word = finalize_word(model, &proto, pairing)?;
        debug_assert!(word.class1_points_forward());
        out.add_term(word, coeff)?;
    }
    Ok(out)
}

/// Arborify a single decorated tree with its pairing.
pub fn arborify(
    tree: &DecoratedTree,
    pairing: &Pairing,
    model: Model,
) -> AlgebraResult<WordPoly> {
    arborify_forest(std::slice::from_ref(tree), pairing, model)
}

// ---------------------------------------------------------------------------
// Coproduct route
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct Cut {
    coeff: ExactCoeff,
    /// forest: each entry is a tree given by its root-children list
    left: Vec<Vec<MNode>>,
    /// product tree (root-children list); a letter once every node is a leaf
    right: Vec<MNode>,
}

fn delta_node(n: &MNode, model: Model) -> AlgebraResult<Vec<Cut>> {
    if n.is_leaf() {
        return Ok(vec![Cut {
            coeff: ExactCoeff::one(),
            left: Vec::new(),
            right: vec![n.clone()],
        }]);
    }
    let inner = delta_children(&n.children, model)?;
    let mut out = Vec::new();
    for cut in inner {
        out.push(Cut {
            coeff: cut.coeff.clone(),
            left: cut.left.clone(),
            right: vec![MNode {
                decor: n.decor,
                freq: n.freq.clone(),
                children: cut.right,
                origin: None,
                edge_id: n.edge_id,
            }],
        });
    }
    let e = n.edge_id.expect("t2 edge id");
    let (child_slot, root_slot, split_coeff) = split_slots(model, n.decor.conj, &n.freq);
    let spawned = MNode {
        decor: EdgeDecoration {
            kind: EdgeKind::T1,
            conj: child_slot.conj,
            hat: true,
        },
        freq: child_slot.freq,
        children: Vec::new(),
        origin: Some(SlotOrigin::SplitChild(e)),
        edge_id: None,
    };
    let mut left_tree = n.children.clone();
    left_tree.push(spawned);
    out.push(Cut {
        coeff: split_coeff,
        left: vec![left_tree],
        right: vec![MNode {
            decor: EdgeDecoration {
                kind: EdgeKind::T1,
                conj: root_slot.conj,
                hat: root_slot.hat,
            },
            freq: root_slot.freq,
            children: Vec::new(),
            origin: Some(SlotOrigin::SplitRoot(e)),
            edge_id: None,
        }],
    });
    Ok(out)
}

fn delta_children(children: &[MNode], model: Model) -> AlgebraResult<Vec<Cut>> {
    let mut acc = vec![Cut {
        coeff: ExactCoeff::one(),
        left: Vec::new(),
        right: Vec::new(),
    }];
    for c in children {
        let cuts = delta_node(c, model)?;
        let mut next = Vec::new();
        for a in &acc {
            for b in &cuts {
                let mut left = a.left.clone();
                left.extend(b.left.iter().cloned());
                let mut right = a.right.clone();
                right.extend(b.right.iter().cloned());
                next.push(Cut {
                    coeff: a.coeff.mul(&b.coeff),
                    left,
                    right,
                });
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// One fully expanded summand of the coproduct, with marks erased.
#[derive(Clone, Debug)]
pub struct CutTerm {
    pub coeff: ExactCoeff,
    pub left: Vec<DecoratedTree>,
    pub right: DecoratedTree,
}

impl CutTerm {
    /// True when the right factor is a letter (depth-one tree).
    pub fn right_is_letter(&self) -> bool {
        self.right
            .root_children()
            .iter()
            .all(|n| n.is_leaf())
            && !self.right.is_empty()
    }
}

fn unmark(nodes: &[MNode]) -> AlgebraResult<DecoratedTree> {
    fn conv(n: &MNode) -> RawNode {
        RawNode {
            decor: n.decor,
            freq: n.freq.clone(),
            children: n.children.iter().map(conv).collect(),
            tag: None,
        }
    }
    let raw: Vec<RawNode> = nodes.iter().map(conv).collect();
    let (tree, _) = DecoratedTree::canonicalize(raw)?;
    Ok(tree)
}

/// Full expansion of the model coproduct on a decorated tree.
pub fn coproduct(tree: &DecoratedTree, model: Model) -> AlgebraResult<Vec<CutTerm>> {
    check_model(std::slice::from_ref(tree), model)?;
    let mut next_leaf = 0u32;
    let mut next_edge = 0u32;
    let marked = mark_tree(tree, &mut next_leaf, &mut next_edge);
    let cuts = delta_children(&marked, model)?;
    cuts.into_iter()
        .map(|c| {
            Ok(CutTerm {
                coeff: c.coeff,
                left: c.left.iter().map(|t| unmark(t)).collect::<AlgebraResult<_>>()?,
                right: unmark(&c.right)?,
            })
        })
        .collect()
}

/// Arborification through the coproduct: concatenate `𝔞(left)` with the
/// letter projection of the right factor, summing over all cuts. Must agree
/// with [`arborify`] exactly.
pub fn arborify_cp(
    tree: &DecoratedTree,
    pairing: &Pairing,
    model: Model,
) -> AlgebraResult<WordPoly> {
    check_model(std::slice::from_ref(tree), model)?;
    if tree.is_empty() {
        let mut out = WordPoly::zero();
        out.add_term(Word::empty(model), ExactCoeff::one())?;
        return Ok(out);
    }
    let mut next_leaf = 0u32;
    let mut next_edge = 0u32;
    let marked = mark_tree(tree, &mut next_leaf, &mut next_edge);
    let cuts = delta_children(&marked, model)?;
    let mut out = WordPoly::zero();
    for cut in cuts {
        // projection on letters
        if cut.right.is_empty() || cut.right.iter().any(|n| !n.is_leaf()) {
            continue;
        }
        let letter: ProtoLetter = cut
            .right
            .iter()
            .map(|l| {
                (
                    Slot::new(l.decor.conj, l.decor.hat, l.freq.clone()),
                    l.origin.expect("leaf origin"),
                )
            })
            .collect();
        let mut combined: Vec<(ExactCoeff, ProtoWord)> = vec![(cut.coeff.clone(), Vec::new())];
        for t in &cut.left {
            let words = arb_children(t, model)?;
            let mut next = Vec::new();
            for (ca, wa) in &combined {
                for (cb, wb) in &words {
                    for merged in proto_shuffle(std::slice::from_ref(wa), std::slice::from_ref(wb)) {
                        next.push((ca.mul(cb), merged));
                    }
                }
            }
            combined = next;
        }
        for (coeff, mut proto) in combined {
            proto.push(letter.clone());
            let word = finalize_word(model, &proto, pairing)?;
            out.add_term(word, coeff)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::tree::linear_extensions;

    fn f(v: i64) -> Frequency {
        Frequency::new(vec![v])
    }

    #[test]
    fn leaf_tree_maps_to_single_letter() {
        let t = DecoratedTree::leaf(EdgeDecoration::t1(true), f(1)).unwrap();
        let p = arborify(&t, &Pairing::empty(), Model::Nls).unwrap();
        assert_eq!(p.len(), 1);
        let (w, c) = p.terms().next().unwrap();
        assert_eq!(*c, ExactCoeff::one());
        assert_eq!(w.len(), 1);
        assert_eq!(w.letters()[0].arity(), 1);
    }

    #[test]
    fn t4_words_and_coefficient() {
        let (t4, _) = catalog::nls_t4(&f(1), &f(2), &f(4));
        let p = arborify(&t4, &Pairing::empty(), Model::Nls).unwrap();
        // chain: one word, coefficient +i, two letters, hat pair between them
        assert_eq!(p.len(), 1);
        let (w, c) = p.terms().next().unwrap();
        assert_eq!(*c, ExactCoeff::i());
        assert_eq!(w.len(), 2);
        assert_eq!(w.pairing().class1.len(), 1);
        assert!(w.letters()[0].slots().iter().any(|s| s.hat));
        assert!(w.letters()[1].slots().iter().any(|s| s.hat));
    }

    #[test]
    fn t5_matches_displayed_word() {
        let (k1, k2, k4, k5) = (f(1), f(2), f(3), f(5));
        let l1 = &(&k1 + &k5) - &k4;
        let (t5, pairing) = catalog::nls_t5(&k1, &k2, &k4, &k5);
        let p = arborify(&t5, &pairing, Model::Nls).unwrap();
        assert_eq!(p.len(), 1);
        let (w, c) = p.terms().next().unwrap();
        assert_eq!(*c, ExactCoeff::i().neg());
        assert_eq!(w.len(), 2);
        // first letter: green l1 (conj 0), k4 (0), k5 (1), k1 (1)
        let first = &w.letters()[0];
        let mut got: Vec<(bool, bool, Frequency)> = first
            .slots()
            .iter()
            .map(|s| (s.conj, s.hat, s.freq.clone()))
            .collect();
        got.sort();
        let mut expect = vec![
            (false, true, l1.clone()),
            (false, false, k4.clone()),
            (true, false, k5.clone()),
            (true, false, k1.clone()),
        ];
        expect.sort();
        assert_eq!(got, expect);
        // second letter: k1 (0), k2 (0), green l1 (conj 1)
        let second = &w.letters()[1];
        let mut got2: Vec<(bool, bool, Frequency)> = second
            .slots()
            .iter()
            .map(|s| (s.conj, s.hat, s.freq.clone()))
            .collect();
        got2.sort();
        let mut expect2 = vec![
            (false, false, k1.clone()),
            (false, false, k2.clone()),
            (true, true, l1.clone()),
        ];
        expect2.sort();
        assert_eq!(got2, expect2);
        // one hat pair (the split), one standard pair (k1)
        assert_eq!(w.pairing().class1.len(), 1);
        assert_eq!(w.pairing().class2.len(), 1);
    }

    #[test]
    fn wave_t2_gives_two_words_with_root_letter_last() {
        let (t, pairing) = catalog::wave_t2(&f(1), &f(2), &f(-1));
        let p = arborify(&t, &pairing, Model::Wave).unwrap();
        assert_eq!(p.len(), 2);
        for (w, c) in p.terms() {
            assert_eq!(*c, ExactCoeff::one());
            assert_eq!(w.len(), 3);
            // root letter: two plain slots
            let last = w.letters().last().unwrap();
            assert_eq!(last.arity(), 2);
            assert!(last.slots().iter().all(|s| !s.hat));
        }
        // letter multisets identical across monomials
        let sets: Vec<Vec<Letter>> = p
            .terms()
            .map(|(w, _)| {
                let mut v = w.letters().to_vec();
                v.sort();
                v
            })
            .collect();
        assert_eq!(sets[0], sets[1]);
        assert_eq!(
            linear_extensions(&t).unwrap().count(),
            p.len(),
            "monomial count equals linear extension count"
        );
    }

    #[test]
    fn coproduct_of_a_leaf_is_one_tensor_leaf() {
        let t = DecoratedTree::leaf(EdgeDecoration::t1(false), f(3)).unwrap();
        let cuts = coproduct(&t, Model::Nls).unwrap();
        assert_eq!(cuts.len(), 1);
        assert!(cuts[0].left.is_empty());
        assert_eq!(cuts[0].right, t);
        assert_eq!(cuts[0].coeff, ExactCoeff::one());
    }

    #[test]
    fn coproduct_t4_has_two_terms() {
        let (t4, _) = catalog::nls_t4(&f(1), &f(2), &f(4));
        let cuts = coproduct(&t4, Model::Nls).unwrap();
        assert_eq!(cuts.len(), 2);
        let letters: Vec<&CutTerm> = cuts.iter().filter(|c| c.right_is_letter()).collect();
        assert_eq!(letters.len(), 1);
        assert_eq!(letters[0].coeff, ExactCoeff::i());
    }

    #[test]
    fn wave_split_negates_the_spawned_frequency() {
        // chain with inner decorations k3 and k123: every hatted leaf spawned
        // by a cut carries a negated edge decoration
        let (k1, k2, k3) = (f(2), f(1), f(-5));
        let k123 = &(&k1 + &k2) + &k3;
        let (t, _) = catalog::wave_t1(&k1, &k2, &k3);
        let cuts = coproduct(&t, Model::Wave).unwrap();
        let mut spawned: Vec<Frequency> = Vec::new();
        for c in &cuts {
            for treeside in &c.left {
                for (decor, freq) in treeside.leaves() {
                    if decor.hat {
                        spawned.push(freq);
                    }
                }
            }
            // wave coefficients stay +1
            assert_eq!(c.coeff, ExactCoeff::one());
        }
        assert!(!spawned.is_empty());
        for s in &spawned {
            assert!(
                *s == -&k3 || *s == -&k123,
                "spawned hat frequency {s} is not a negated edge decoration"
            );
        }
    }

    #[test]
    fn recursive_and_coproduct_routes_agree_on_catalog_trees() {
        let (t4, _) = catalog::nls_t4(&f(1), &f(2), &f(4));
        let a = arborify(&t4, &Pairing::empty(), Model::Nls).unwrap();
        let b = arborify_cp(&t4, &Pairing::empty(), Model::Nls).unwrap();
        assert_eq!(a, b);

        let (t5, p5) = catalog::nls_t5(&f(1), &f(2), &f(3), &f(5));
        let a = arborify(&t5, &p5, Model::Nls).unwrap();
        let b = arborify_cp(&t5, &p5, Model::Nls).unwrap();
        assert_eq!(a, b);

        let (t6, p6) = catalog::nls_t6(&f(1), &f(2), &f(3), &f(5));
        let a = arborify(&t6, &p6, Model::Nls).unwrap();
        let b = arborify_cp(&t6, &p6, Model::Nls).unwrap();
        assert_eq!(a, b);

        let (w1, q1) = catalog::wave_t1(&f(1), &f(0), &f(-1));
        let a = arborify(&w1, &q1, Model::Wave).unwrap();
        let b = arborify_cp(&w1, &q1, Model::Wave).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn morphism_law_on_forests() {
        let t_a = DecoratedTree::leaf(EdgeDecoration::t1(false), f(1)).unwrap();
        let (t_b, _) = catalog::nls_t4(&f(1), &f(2), &f(4));
        let lhs = arborify_forest(
            &[t_a.clone(), t_b.clone()],
            &Pairing::empty(),
            Model::Nls,
        )
        .unwrap();
        let pa = arborify(&t_a, &Pairing::empty(), Model::Nls).unwrap();
        let pb = arborify(&t_b, &Pairing::empty(), Model::Nls).unwrap();
        let rhs = crate::word::shuffle_poly(&pa, &pb).unwrap();
        assert_eq!(lhs, rhs);
    }
}
