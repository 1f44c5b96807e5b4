//! Constructors for the worked trees the cancellation checks rely on.
//!
//! Frequencies are passed in; inner decorations come out of the Kirchhoff
//! relation. Each constructor returns the canonical tree together with its
//! pairing on leaf ids.

use crate::error::AlgebraResult;
use crate::freq::Frequency;
use crate::pairing::Pairing;
use crate::tree::{DecoratedTree, EdgeDecoration, RawNode};

fn build(roots: Vec<RawNode>, pairs: &[(&str, &str, bool)]) -> (DecoratedTree, Pairing) {
    try_build(roots, pairs).expect("catalog tree must be well-formed")
}

fn try_build(
    roots: Vec<RawNode>,
    pairs: &[(&str, &str, bool)],
) -> AlgebraResult<(DecoratedTree, Pairing)> {
    let (tree, tags) = DecoratedTree::canonicalize(roots)?;
    let mut pairing = Pairing::empty();
    for (a, b, class1) in pairs {
        let ia = tags[*a];
        let ib = tags[*b];
        if *class1 {
            pairing.insert_class1(ia, ib);
        } else {
            pairing.insert_class2(ia, ib);
        }
    }
    Ok((tree, pairing))
}

/// `I_{(t2,0)}(λ_k [ λ̄_{k1} λ_{k2} λ_{k3} ])` with `k = -k1+k2+k3`; no pairing.
pub fn nls_t4(k1: &Frequency, k2: &Frequency, k3: &Frequency) -> (DecoratedTree, Pairing) {
    let k = &(&-k1 + k2) + k3;
    let node = RawNode::inner(
        EdgeDecoration::t2(false),
        k,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), k1.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), k2.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), k3.clone()),
        ],
    );
    build(vec![node], &[])
}

/// First tree of the first cancellation family: the `k1`-pair is standard.
/// The inner decoration is `ℓ1 = k1 + k5 - k4`.
pub fn nls_t5(
    k1: &Frequency,
    k2: &Frequency,
    k4: &Frequency,
    k5: &Frequency,
) -> (DecoratedTree, Pairing) {
    nls_t5_impl(k1, k2, k4, k5, false)
}

/// `T5` with the pair drawn green (hatted ends, class-1 pair).
pub fn nls_t7(
    k1: &Frequency,
    k2: &Frequency,
    k4: &Frequency,
    k5: &Frequency,
) -> (DecoratedTree, Pairing) {
    nls_t5_impl(k1, k2, k4, k5, true)
}

fn nls_t5_impl(
    k1: &Frequency,
    k2: &Frequency,
    k4: &Frequency,
    k5: &Frequency,
    hat: bool,
) -> (DecoratedTree, Pairing) {
    let l1 = &(k1 + k5) - k4;
    let leaf_decor = |conj| {
        if hat {
            EdgeDecoration::t1_hat(conj)
        } else {
            EdgeDecoration::t1(conj)
        }
    };
    let inner = RawNode::inner(
        EdgeDecoration::t2(true),
        l1,
        vec![
            RawNode::leaf(leaf_decor(true), k1.clone()).tagged("pair_inner"),
            RawNode::leaf(EdgeDecoration::t1(true), k5.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), k4.clone()),
        ],
    );
    let roots = vec![
        RawNode::leaf(leaf_decor(false), k1.clone()).tagged("pair_root"),
        RawNode::leaf(EdgeDecoration::t1(false), k2.clone()),
        inner,
    ];
    build(roots, &[("pair_root", "pair_inner", hat)])
}

/// Second tree of the first family; inner decoration `k1`, leaves carry
/// `ℓ1 = k1 + k5 - k4`.
pub fn nls_t6(
    k1: &Frequency,
    k2: &Frequency,
    k4: &Frequency,
    k5: &Frequency,
) -> (DecoratedTree, Pairing) {
    let l1 = &(k1 + k5) - k4;
    let inner = RawNode::inner(
        EdgeDecoration::t2(false),
        k1.clone(),
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), l1.clone()).tagged("pair_inner"),
            RawNode::leaf(EdgeDecoration::t1(false), k4.clone()),
            RawNode::leaf(EdgeDecoration::t1(true), k5.clone()),
        ],
    );
    let roots = vec![
        RawNode::leaf(EdgeDecoration::t1(true), l1).tagged("pair_root"),
        RawNode::leaf(EdgeDecoration::t1(false), k2.clone()),
        inner,
    ];
    build(roots, &[("pair_root", "pair_inner", false)])
}

/// Wave chain with fully paired leaves `{k_i, -k_i}`.
pub fn wave_t1(
    k1: &Frequency,
    k2: &Frequency,
    k3: &Frequency,
) -> (DecoratedTree, Pairing) {
    let k123 = &(k1 + k2) + k3;
    let deep = RawNode::inner(
        EdgeDecoration::t2(false),
        k123.clone(),
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), k1.clone()).tagged("p1"),
            RawNode::leaf(EdgeDecoration::t1(false), k2.clone()).tagged("p2"),
            RawNode::leaf(EdgeDecoration::t1(false), k3.clone()).tagged("p3"),
        ],
    );
    let mid_freq = &(&-k1 + &-k2) + &k123; // = k3
    let mid = RawNode::inner(
        EdgeDecoration::t2(false),
        mid_freq,
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), -k1).tagged("q1"),
            RawNode::leaf(EdgeDecoration::t1(false), -k2).tagged("q2"),
            deep,
        ],
    );
    let roots = vec![
        RawNode::leaf(EdgeDecoration::t1(false), -k3).tagged("q3"),
        mid,
    ];
    build(
        roots,
        &[("p1", "q1", false), ("p2", "q2", false), ("p3", "q3", false)],
    )
}

/// Wave product of two conjugate branches, fully paired.
pub fn wave_t2(
    k1: &Frequency,
    k2: &Frequency,
    k3: &Frequency,
) -> (DecoratedTree, Pairing) {
    let k123 = &(k1 + k2) + k3;
    let b1 = RawNode::inner(
        EdgeDecoration::t2(false),
        k123.clone(),
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), k1.clone()).tagged("p1"),
            RawNode::leaf(EdgeDecoration::t1(false), k2.clone()).tagged("p2"),
            RawNode::leaf(EdgeDecoration::t1(false), k3.clone()).tagged("p3"),
        ],
    );
    let b2 = RawNode::inner(
        EdgeDecoration::t2(false),
        -&k123,
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), -k1).tagged("q1"),
            RawNode::leaf(EdgeDecoration::t1(false), -k2).tagged("q2"),
            RawNode::leaf(EdgeDecoration::t1(false), -k3).tagged("q3"),
        ],
    );
    build(
        vec![b1, b2],
        &[("p1", "q1", false), ("p2", "q2", false), ("p3", "q3", false)],
    )
}

/// Doubly nested branch of the second cancellation family (as a standalone
/// tree hanging from the root): decorations `ℓ1 = -r1+r2+k3`,
/// `ℓ2 = -k1+k2+ℓ1`.
pub fn family2_branch1(
    k1: &Frequency,
    k2: &Frequency,
    k3: &Frequency,
    r1: &Frequency,
    r2: &Frequency,
) -> DecoratedTree {
    let l1 = &(&-r1 + r2) + k3;
    let l2 = &(&-k1 + k2) + &l1;
    let b = RawNode::inner(
        EdgeDecoration::t2(false),
        l1,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), r1.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), r2.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), k3.clone()),
        ],
    );
    let a = RawNode::inner(
        EdgeDecoration::t2(false),
        l2,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), k1.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), k2.clone()),
            b,
        ],
    );
    build(vec![a], &[]).0
}

/// Conjugated single-level branch of the second family: `ℓ3 = -k1+k2+k3`.
pub fn family2_branch2(k1: &Frequency, k2: &Frequency, k3: &Frequency) -> DecoratedTree {
    let l3 = &(&-k1 + k2) + k3;
    let node = RawNode::inner(
        EdgeDecoration::t2(true),
        l3,
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), k1.clone()),
            RawNode::leaf(EdgeDecoration::t1(true), k2.clone()),
            RawNode::leaf(EdgeDecoration::t1(true), k3.clone()),
        ],
    );
    build(vec![node], &[]).0
}

/// Plain single-level branch on the `h` decorations: `ℓ4 = -h1+h2+h3`.
pub fn family2_branch3(h1: &Frequency, h2: &Frequency, h3: &Frequency) -> DecoratedTree {
    let l4 = &(&-h1 + h2) + h3;
    let node = RawNode::inner(
        EdgeDecoration::t2(false),
        l4,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), h1.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), h2.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), h3.clone()),
        ],
    );
    build(vec![node], &[]).0
}

/// Doubly nested conjugated branch of the second family:
/// `ℓ5 = h3+r1-r2`, `ℓ6 = -h1+h2+ℓ5`.
pub fn family2_branch4(
    h1: &Frequency,
    h2: &Frequency,
    h3: &Frequency,
    r1: &Frequency,
    r2: &Frequency,
) -> DecoratedTree {
    let l5 = &(h3 + r1) - r2;
    let l6 = &(&-h1 + h2) + &l5;
    let b = RawNode::inner(
        EdgeDecoration::t2(true),
        l5,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), r1.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), r2.clone()),
            RawNode::leaf(EdgeDecoration::t1(true), h3.clone()),
        ],
    );
    let a = RawNode::inner(
        EdgeDecoration::t2(true),
        l6,
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), h1.clone()),
            RawNode::leaf(EdgeDecoration::t1(true), h2.clone()),
            b,
        ],
    );
    build(vec![a], &[]).0
}

/// Chain tree of the third cancellation family:
/// `ℓ1 = k1+r2-r1`, `ℓ2 = r3+k2-ℓ1`, `ℓ3 = k1-k2+ℓ2`.
pub fn family3_tree1(
    k1: &Frequency,
    k2: &Frequency,
    r1: &Frequency,
    r2: &Frequency,
    r3: &Frequency,
) -> DecoratedTree {
    let l1 = &(k1 + r2) - r1;
    let l2 = &(r3 + k2) - &l1;
    let l3 = &(&(-k2) + k1) + &l2;
    let c = RawNode::inner(
        EdgeDecoration::t2(true),
        l1,
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), r1.clone()),
            RawNode::leaf(EdgeDecoration::t1(true), r2.clone()),
            RawNode::leaf(EdgeDecoration::t1(true), k1.clone()),
        ],
    );
    let b = RawNode::inner(
        EdgeDecoration::t2(false),
        l2,
        vec![
            RawNode::leaf(EdgeDecoration::t1(false), r3.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), k2.clone()),
            c,
        ],
    );
    let a = RawNode::inner(
        EdgeDecoration::t2(false),
        l3,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), k2.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), k1.clone()),
            b,
        ],
    );
    build(vec![a], &[]).0
}

/// Two-branch tree of the third family with `h2 = k2+r1-r2`:
/// `ℓ5 = -k1+r3+h2`, `ℓ6 = -r2+r1+k1`, root node `ℓ3 = r3+r1-r2`.
pub fn family3_tree2(
    k1: &Frequency,
    k2: &Frequency,
    r1: &Frequency,
    r2: &Frequency,
    r3: &Frequency,
) -> DecoratedTree {
    let h2 = &(k2 + r1) - r2;
    let l5 = &(&-k1 + r3) + &h2;
    let l6 = &(&-r2 + r1) + k1;
    let l3 = &(&-&h2 + &l5) + &l6;
    let c = RawNode::inner(
        EdgeDecoration::t2(false),
        l5,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), k1.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), r3.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), h2.clone()),
        ],
    );
    let r = RawNode::inner(
        EdgeDecoration::t2(false),
        l6,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), r2.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), r1.clone()),
            RawNode::leaf(EdgeDecoration::t1(false), k1.clone()),
        ],
    );
    let root_node = RawNode::inner(
        EdgeDecoration::t2(false),
        l3,
        vec![
            RawNode::leaf(EdgeDecoration::t1(true), h2.clone()),
            c,
            r,
        ],
    );
    build(vec![root_node], &[]).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: i64) -> Frequency {
        Frequency::new(vec![v])
    }

    #[test]
    fn catalog_trees_are_well_formed() {
        let _ = nls_t4(&f(1), &f(2), &f(4));
        let _ = nls_t5(&f(1), &f(2), &f(3), &f(5));
        let _ = nls_t6(&f(1), &f(2), &f(3), &f(5));
        let _ = nls_t7(&f(1), &f(2), &f(3), &f(5));
        let _ = wave_t1(&f(1), &f(0), &f(-1));
        let _ = wave_t2(&f(1), &f(0), &f(-1));
        let _ = family2_branch1(&f(1), &f(2), &f(3), &f(4), &f(5));
        let _ = family2_branch2(&f(1), &f(2), &f(3));
        let _ = family2_branch3(&f(1), &f(2), &f(3));
        let _ = family2_branch4(&f(1), &f(2), &f(3), &f(4), &f(5));
        let _ = family3_tree1(&f(1), &f(2), &f(3), &f(4), &f(5));
        let _ = family3_tree2(&f(1), &f(2), &f(3), &f(4), &f(5));
    }

    #[test]
    fn t5_and_t6_pair_across_levels() {
        let (t5, p5) = nls_t5(&f(1), &f(2), &f(3), &f(5));
        assert_eq!(t5.leaves().len(), 5);
        assert_eq!(p5.class2.len(), 1);
        let (t7, p7) = nls_t7(&f(1), &f(2), &f(3), &f(5));
        assert_eq!(p7.class1.len(), 1);
        assert!(t7.leaves().iter().any(|(d, _)| d.hat));
    }
}
