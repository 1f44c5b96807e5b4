//! Decorated rooted trees: canonical forms, grafting, products, forests and
//! linear extensions of the inner-node poset.
//!
//! Trees are non-planar; every constructor restores the canonical sibling
//! order, so derived equality and hashing see one representative per tree.
//! The root carries no decoration and is represented implicitly: a
//! [`DecoratedTree`] is the list of the root's child subtrees.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeff::ExactCoeff;
use crate::error::{AlgebraError, AlgebraResult};
use crate::freq::Frequency;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum EdgeKind {
    T1,
    T2,
}

/// Decoration of the edge sitting above a node.
///
/// `conj` is the conjugation bit `c(e)` of the edge; `hat` marks the √w-free
/// (green) variant on NLS terminal edges and the time-derivative marker on
/// wave edges.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct EdgeDecoration {
    pub kind: EdgeKind,
    pub conj: bool,
    pub hat: bool,
}

impl EdgeDecoration {
    pub fn t1(conj: bool) -> Self {
        EdgeDecoration {
            kind: EdgeKind::T1,
            conj,
            hat: false,
        }
    }

    pub fn t1_hat(conj: bool) -> Self {
        EdgeDecoration {
            kind: EdgeKind::T1,
            conj,
            hat: true,
        }
    }

    pub fn t2(conj: bool) -> Self {
        EdgeDecoration {
            kind: EdgeKind::T2,
            conj,
            hat: false,
        }
    }

    pub fn validate(&self) -> AlgebraResult<()> {
        if self.kind == EdgeKind::T2 && self.hat {
            return Err(AlgebraError::InvalidDecoration(
                "hat flag is only meaningful on t1 edges".into(),
            ));
        }
        Ok(())
    }
}

/// A non-root node together with the decoration of its incoming edge.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TreeNode {
    pub decor: EdgeDecoration,
    pub freq: Frequency,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Canonical total order: (kind, conj, hat, leaf/inner flag, subtree, freq).
    fn canonical_cmp(&self, other: &TreeNode) -> Ordering {
        self.decor
            .cmp(&other.decor)
            .then_with(|| self.is_leaf().cmp(&other.is_leaf()).reverse())
            .then_with(|| cmp_children(&self.children, &other.children))
            .then_with(|| self.freq.cmp(&other.freq))
    }
}

fn cmp_children(a: &[TreeNode], b: &[TreeNode]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = x.canonical_cmp(y);
        if c != Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

impl PartialOrd for TreeNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TreeNode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

/// A decorated rooted tree in canonical form (the implicit root is
/// undecorated). The empty tree is the unit of the tree product.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct DecoratedTree {
    root_children: Vec<TreeNode>,
}

/// Unvalidated input shape for the parser and for randomized construction.
#[derive(Clone, Debug)]
pub struct RawNode {
    pub decor: EdgeDecoration,
    pub freq: Frequency,
    pub children: Vec<RawNode>,
    pub tag: Option<String>,
}

impl RawNode {
    pub fn leaf(decor: EdgeDecoration, freq: Frequency) -> Self {
        RawNode {
            decor,
            freq,
            children: Vec::new(),
            tag: None,
        }
    }

    pub fn inner(decor: EdgeDecoration, freq: Frequency, children: Vec<RawNode>) -> Self {
        RawNode {
            decor,
            freq,
            children,
            tag: None,
        }
    }

    pub fn tagged(mut self, tag: &str) -> Self {
        self.tag = Some(tag.to_string());
        self
    }
}

/// Signed child sum `Σ (-1)^{c(e)} f(v)` entering the Kirchhoff relation.
fn signed_child_sum(children: &[RawNode]) -> Frequency {
    Frequency::signed_sum(children.iter().map(|c| (&c.freq, c.decor.conj)))
}

fn validate_raw(node: &RawNode) -> AlgebraResult<()> {
    node.decor.validate()?;
    if node.children.is_empty() {
        if node.decor.kind != EdgeKind::T1 {
            return Err(AlgebraError::InvalidDecoration(
                "edges connected to leaves must be of kind t1".into(),
            ));
        }
        return Ok(());
    }
    if node.decor.kind != EdgeKind::T2 {
        return Err(AlgebraError::InvalidDecoration(
            "edges connected to inner nodes must be of kind t2".into(),
        ));
    }
    // (-1)^{c(e_u)} f(u) = Σ (-1)^{c(e)} f(v)
    let sum = signed_child_sum(&node.children);
    let lhs = if node.decor.conj {
        -&node.freq
    } else {
        node.freq.clone()
    };
    if lhs != sum {
        return Err(AlgebraError::Kirchhoff {
            node: node.freq.clone(),
            expected: sum,
        });
    }
    for c in &node.children {
        validate_raw(c)?;
    }
    Ok(())
}

fn sort_raw(node: &mut RawNode) {
    for c in &mut node.children {
        sort_raw(c);
    }
    node.children.sort_by(raw_cmp);
}

fn raw_cmp(a: &RawNode, b: &RawNode) -> Ordering {
    a.decor
        .cmp(&b.decor)
        .then_with(|| a.children.is_empty().cmp(&b.children.is_empty()).reverse())
        .then_with(|| {
            for (x, y) in a.children.iter().zip(b.children.iter()) {
                let c = raw_cmp(x, y);
                if c != Ordering::Equal {
                    return c;
                }
            }
            a.children.len().cmp(&b.children.len())
        })
        .then_with(|| a.freq.cmp(&b.freq))
        // Tags are not part of the canonical key; they only break ties between
        // structurally identical siblings so leaf ids stay deterministic.
        .then_with(|| a.tag.cmp(&b.tag))
}

fn strip_raw(node: RawNode, tags: &mut BTreeMap<String, u32>, next_leaf: &mut u32) -> AlgebraResult<TreeNode> {
    let leaf_here = node.children.is_empty();
    if leaf_here {
        if let Some(tag) = &node.tag {
            if tags.insert(tag.clone(), *next_leaf).is_some() {
                return Err(AlgebraError::Other(format!("duplicate leaf tag #{tag}")));
            }
        }
        *next_leaf += 1;
    }
    let children = node
        .children
        .into_iter()
        .map(|c| strip_raw(c, tags, next_leaf))
        .collect::<AlgebraResult<Vec<_>>>()?;
    Ok(TreeNode {
        decor: node.decor,
        freq: node.freq,
        children,
    })
}

impl DecoratedTree {
    /// The empty tree, unit of the tree product.
    pub fn unit() -> Self {
        DecoratedTree {
            root_children: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.root_children.is_empty()
    }

    pub fn root_children(&self) -> &[TreeNode] {
        &self.root_children
    }

    /// Validating construction: errors on Kirchhoff violations and malformed
    /// decorations, then restores the canonical sibling order. Returns the
    /// tree together with the positions of tagged leaves (DFS order of the
    /// canonical form).
    pub fn canonicalize(roots: Vec<RawNode>) -> AlgebraResult<(Self, BTreeMap<String, u32>)> {
        for r in &roots {
            validate_raw(r)?;
        }
        let mut roots = roots;
        for r in &mut roots {
            sort_raw(r);
        }
        roots.sort_by(raw_cmp);
        let mut tags = BTreeMap::new();
        let mut next = 0u32;
        let root_children = roots
            .into_iter()
            .map(|r| strip_raw(r, &mut tags, &mut next))
            .collect::<AlgebraResult<Vec<_>>>()?;
        Ok((DecoratedTree { root_children }, tags))
    }

    /// A single terminal edge `I_{(t1,conj)}(λ_freq)`.
    pub fn leaf(decor: EdgeDecoration, freq: Frequency) -> AlgebraResult<Self> {
        if decor.kind != EdgeKind::T1 {
            return Err(AlgebraError::InvalidDecoration(
                "a bare leaf must carry a t1 decoration".into(),
            ));
        }
        decor.validate()?;
        Ok(DecoratedTree {
            root_children: vec![TreeNode {
                decor,
                freq,
                children: Vec::new(),
            }],
        })
    }

    /// Merge roots of two trees; commutative and associative on canonical forms.
    pub fn product(&self, other: &DecoratedTree) -> DecoratedTree {
        let mut root_children = self.root_children.clone();
        root_children.extend(other.root_children.iter().cloned());
        root_children.sort();
        DecoratedTree { root_children }
    }

    /// Leaves in deterministic DFS (pre-order) order: `(decoration, frequency)`.
    pub fn leaves(&self) -> Vec<(EdgeDecoration, Frequency)> {
        let mut out = Vec::new();
        fn walk(n: &TreeNode, out: &mut Vec<(EdgeDecoration, Frequency)>) {
            if n.is_leaf() {
                out.push((n.decor, n.freq.clone()));
            }
            for c in &n.children {
                walk(c, out);
            }
        }
        for r in &self.root_children {
            walk(r, &mut out);
        }
        out
    }

    /// Number of t2 edges.
    pub fn t2_edge_count(&self) -> usize {
        fn walk(n: &TreeNode) -> usize {
            let own = usize::from(n.decor.kind == EdgeKind::T2);
            own + n.children.iter().map(walk).sum::<usize>()
        }
        self.root_children.iter().map(walk).sum()
    }

    /// Total node count including the implicit root.
    pub fn node_count(&self) -> usize {
        fn walk(n: &TreeNode) -> usize {
            1 + n.children.iter().map(walk).sum::<usize>()
        }
        1 + self.root_children.iter().map(walk).sum::<usize>()
    }

    /// True when every edge conjugation bit is 0 and no leaf is hatted, i.e.
    /// the tree lives in the wave formalism.
    pub fn is_conj_free(&self) -> bool {
        fn walk(n: &TreeNode) -> bool {
            !n.decor.conj && n.children.iter().all(walk)
        }
        self.root_children.iter().all(walk)
    }
}

/// Annihilating construction `I_decor(λ_freq · forest)`: returns the zero
/// polynomial when the Kirchhoff relation fails, mirroring the symbolic
/// convention; malformed decorations are still hard errors.
pub fn graft(
    decor: EdgeDecoration,
    freq: Frequency,
    children: &[DecoratedTree],
) -> AlgebraResult<TreePoly> {
    decor.validate()?;
    let merged = children
        .iter()
        .fold(DecoratedTree::unit(), |acc, t| acc.product(t));
    if merged.is_empty() {
        if decor.kind != EdgeKind::T1 {
            return Err(AlgebraError::InvalidDecoration(
                "t2 edge needs a nonempty argument".into(),
            ));
        }
        let tree = DecoratedTree::leaf(decor, freq)?;
        let mut poly = TreePoly::zero();
        poly.add_term(Forest::from_tree(tree), ExactCoeff::one())?;
        return Ok(poly);
    }
    if decor.kind != EdgeKind::T2 {
        return Err(AlgebraError::InvalidDecoration(
            "t1 edge cannot carry a subtree".into(),
        ));
    }
    let sum = Frequency::signed_sum(
        merged
            .root_children
            .iter()
            .map(|c| (&c.freq, c.decor.conj)),
    );
    let lhs = if decor.conj { -&freq } else { freq.clone() };
    if lhs != sum {
        return Ok(TreePoly::zero());
    }
    let node = TreeNode {
        decor,
        freq,
        children: merged.root_children,
    };
    let tree = DecoratedTree {
        root_children: vec![node],
    };
    let mut poly = TreePoly::zero();
    poly.add_term(Forest::from_tree(tree), ExactCoeff::one())?;
    Ok(poly)
}

/// A multiset of decorated trees (the forest product is multiset union).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Forest(Vec<DecoratedTree>);

impl Forest {
    pub fn empty() -> Self {
        Forest(Vec::new())
    }

    pub fn from_tree(t: DecoratedTree) -> Self {
        if t.is_empty() {
            Forest(Vec::new())
        } else {
            Forest(vec![t])
        }
    }

    pub fn from_trees(mut ts: Vec<DecoratedTree>) -> Self {
        ts.retain(|t| !t.is_empty());
        ts.sort();
        Forest(ts)
    }

    pub fn union(&self, other: &Forest) -> Forest {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Forest(v)
    }

    pub fn trees(&self) -> &[DecoratedTree] {
        &self.0
    }
}

/// Finite linear combination of forests with exact coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TreePoly {
    terms: BTreeMap<Forest, ExactCoeff>,
}

impl TreePoly {
    pub fn zero() -> Self {
        TreePoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Forest, &ExactCoeff)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, forest: Forest, coeff: ExactCoeff) -> AlgebraResult<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&forest) {
            None => {
                self.terms.insert(forest, coeff);
            }
            Some(old) => {
                let sum = old.add(&coeff)?;
                if !sum.is_zero() {
                    self.terms.insert(forest, sum);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &TreePoly) -> AlgebraResult<TreePoly> {
        let mut out = self.clone();
        for (f, c) in other.terms() {
            out.add_term(f.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ExactCoeff) -> TreePoly {
        if c.is_zero() {
            return TreePoly::zero();
        }
        TreePoly {
            terms: self
                .terms
                .iter()
                .map(|(f, k)| (f.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn single(tree: DecoratedTree) -> Self {
        let mut p = TreePoly::zero();
        p.add_term(Forest::from_tree(tree), ExactCoeff::one())
            .expect("fresh coefficient");
        p
    }
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::dsl::print_tree(self))
    }
}

/// All total orders of the inner nodes (implicit root included, always last)
/// extending the ancestor partial order. Orders list DFS indices of the inner
/// nodes; the root has the largest index.
pub struct LinearExtensions {
    pub orders: Vec<Vec<usize>>,
}

impl LinearExtensions {
    pub fn count(&self) -> usize {
        self.orders.len()
    }
}

pub fn linear_extensions(tree: &DecoratedTree) -> AlgebraResult<LinearExtensions> {
    // Collect inner nodes in DFS order; parent[] uses the root as the sink.
    struct Inner {
        parent: Option<usize>,
    }
    let mut inners: Vec<Inner> = Vec::new();
    fn walk(n: &TreeNode, parent: Option<usize>, inners: &mut Vec<Inner>) {
        if n.is_leaf() {
            return;
        }
        let id = inners.len();
        inners.push(Inner { parent });
        for c in &n.children {
            walk(c, Some(id), inners);
        }
    }
    for r in tree.root_children() {
        walk(r, None, &mut inners);
    }
    if tree.is_empty() {
        return Ok(LinearExtensions {
            orders: vec![Vec::new()],
        });
    }
    let root_id = inners.len();
    let n = root_id + 1;
    if n > 10 {
        return Err(AlgebraError::SizeGuard(format!(
            "{n} inner nodes exceed the factorial guard of 10"
        )));
    }
    // Children must appear before parents; enumerate orders whose last element
    // is forcibly the root (it dominates every inner node).
    let mut remaining_children = vec![0usize; n];
    for (i, inner) in inners.iter().enumerate() {
        let p = inner.parent.unwrap_or(root_id);
        let _ = i;
        remaining_children[p] += 1;
    }
    let mut orders = Vec::new();
    let mut current = Vec::new();
    let mut placed = vec![false; n];
    fn rec(
        n: usize,
        inners: &[Inner],
        root_id: usize,
        remaining: &mut Vec<usize>,
        placed: &mut Vec<bool>,
        current: &mut Vec<usize>,
        orders: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == n {
            orders.push(current.clone());
            return;
        }
        for i in 0..n {
            if placed[i] || remaining[i] > 0 {
                continue;
            }
            placed[i] = true;
            let parent = if i == root_id {
                None
            } else {
                Some(inners[i].parent.unwrap_or(root_id))
            };
            if let Some(p) = parent {
                remaining[p] -= 1;
            }
            current.push(i);
            rec(n, inners, root_id, remaining, placed, current, orders);
            current.pop();
            if let Some(p) = parent {
                remaining[p] += 1;
            }
            placed[i] = false;
        }
    }
    rec(
        n,
        &inners,
        root_id,
        &mut remaining_children,
        &mut placed,
        &mut current,
        &mut orders,
    );
    Ok(LinearExtensions { orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: &[i64]) -> Frequency {
        Frequency::new(v.to_vec())
    }

    fn leaf(conj: bool, v: &[i64]) -> DecoratedTree {
        DecoratedTree::leaf(EdgeDecoration::t1(conj), f(v)).unwrap()
    }

    #[test]
    fn graft_leaf_has_unit_coefficient() {
        let p = graft(EdgeDecoration::t1(true), f(&[1]), &[]).unwrap();
        assert_eq!(p.len(), 1);
        let (_, c) = p.terms().next().unwrap();
        assert_eq!(*c, ExactCoeff::one());
    }

    #[test]
    fn graft_checks_kirchhoff_and_annihilates() {
        // T4: k = -k1 + k2 + k3 passes, anything else gives zero.
        let children = [leaf(true, &[1]), leaf(false, &[2]), leaf(false, &[4])];
        let ok = graft(EdgeDecoration::t2(false), f(&[5]), &children).unwrap();
        assert_eq!(ok.len(), 1);
        let zero = graft(EdgeDecoration::t2(false), f(&[6]), &children).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn graft_rejects_hat_on_t2() {
        let children = [leaf(false, &[0])];
        let bad = EdgeDecoration {
            kind: EdgeKind::T2,
            conj: false,
            hat: true,
        };
        assert!(graft(bad, f(&[0]), &children).is_err());
    }

    #[test]
    fn product_is_commutative_and_unital() {
        let a = leaf(true, &[1]);
        let b = leaf(false, &[2]);
        let c = leaf(false, &[4]);
        let ab = a.product(&b).product(&c);
        let ba = c.product(&b).product(&a);
        assert_eq!(ab, ba);
        assert_eq!(a.product(&DecoratedTree::unit()), a);
    }

    #[test]
    fn canonicalize_is_idempotent_and_validates() {
        let raw = RawNode::inner(
            EdgeDecoration::t2(false),
            f(&[5]),
            vec![
                RawNode::leaf(EdgeDecoration::t1(false), f(&[2])),
                RawNode::leaf(EdgeDecoration::t1(true), f(&[1])),
                RawNode::leaf(EdgeDecoration::t1(false), f(&[4])),
            ],
        );
        let (t, _) = DecoratedTree::canonicalize(vec![raw.clone()]).unwrap();
        // Sibling permutation maps to the same canonical key.
        let mut raw2 = raw.clone();
        raw2.children.reverse();
        let (t2, _) = DecoratedTree::canonicalize(vec![raw2]).unwrap();
        assert_eq!(t, t2);

        let mut bad = raw;
        bad.freq = f(&[17]);
        assert!(matches!(
            DecoratedTree::canonicalize(vec![bad]),
            Err(AlgebraError::Kirchhoff { .. })
        ));
    }

    #[test]
    fn graft_zero_iff_canonicalize_errors() {
        // Randomized cross-check of the two construction paths.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let ks: Vec<i64> = (0..3).map(|_| rng.gen_range(-2..=2)).collect();
            let conjs: Vec<bool> = (0..3).map(|_| rng.gen_bool(0.5)).collect();
            let root_freq = f(&[rng.gen_range(-6..=6)]);
            let root_conj = rng.gen_bool(0.5);
            let children: Vec<DecoratedTree> = ks
                .iter()
                .zip(&conjs)
                .map(|(k, c)| leaf(*c, &[*k]))
                .collect();
            let grafted = graft(EdgeDecoration::t2(root_conj), root_freq.clone(), &children)
                .unwrap()
                .is_zero();
            let raw = RawNode::inner(
                EdgeDecoration::t2(root_conj),
                root_freq,
                ks.iter()
                    .zip(&conjs)
                    .map(|(k, c)| RawNode::leaf(EdgeDecoration::t1(*c), f(&[*k])))
                    .collect(),
            );
            let errored = DecoratedTree::canonicalize(vec![raw]).is_err();
            assert_eq!(grafted, errored);
        }
    }

    #[test]
    fn random_sibling_shuffles_share_one_key() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // depth-3 tree
        let base = RawNode::inner(
            EdgeDecoration::t2(false),
            f(&[3]),
            vec![
                RawNode::leaf(EdgeDecoration::t1(false), f(&[1])),
                RawNode::leaf(EdgeDecoration::t1(false), f(&[3])),
                RawNode::inner(
                    EdgeDecoration::t2(true),
                    f(&[1]),
                    vec![
                        RawNode::leaf(EdgeDecoration::t1(false), f(&[1])),
                        RawNode::leaf(EdgeDecoration::t1(true), f(&[2])),
                        RawNode::leaf(EdgeDecoration::t1(true), f(&[0])),
                    ],
                ),
            ],
        );
        let (reference, _) = DecoratedTree::canonicalize(vec![base.clone()]).unwrap();
        for _ in 0..100 {
            let mut shuffled = base.clone();
            fn shuffle(n: &mut RawNode, rng: &mut rand_chacha::ChaCha8Rng) {
                n.children.shuffle(rng);
                for c in &mut n.children {
                    shuffle(c, rng);
                }
            }
            shuffle(&mut shuffled, &mut rng);
            let (t, _) = DecoratedTree::canonicalize(vec![shuffled]).unwrap();
            assert_eq!(t, reference);
        }
    }

    #[test]
    fn linear_extension_counts() {
        // Chain of two inner nodes: a single extension.
        let deep = RawNode::inner(
            EdgeDecoration::t2(false),
            f(&[2]),
            vec![
                RawNode::leaf(EdgeDecoration::t1(false), f(&[1])),
                RawNode::leaf(EdgeDecoration::t1(false), f(&[1])),
                RawNode::leaf(EdgeDecoration::t1(true), f(&[0])),
            ],
        );
        let chain = RawNode::inner(EdgeDecoration::t2(false), f(&[2]), vec![deep.clone()]);
        let (t, _) = DecoratedTree::canonicalize(vec![chain]).unwrap();
        assert_eq!(linear_extensions(&t).unwrap().count(), 1);

        // Two incomparable inner children under the root: two extensions
        // (enumerate 3! orders by hand: only 2 respect the poset).
        let (t2, _) = DecoratedTree::canonicalize(vec![
            deep.clone(),
            RawNode::inner(
                EdgeDecoration::t2(true),
                f(&[2]),
                vec![
                    RawNode::leaf(EdgeDecoration::t1(false), f(&[1])),
                    RawNode::leaf(EdgeDecoration::t1(false), f(&[1])),
                    RawNode::leaf(EdgeDecoration::t1(true), f(&[4])),
                ],
            ),
        ])
        .unwrap();
        assert_eq!(linear_extensions(&t2).unwrap().count(), 2);
    }

    #[test]
    fn size_guard_trips() {
        // 10 nested chains exceed the guard once the root joins in.
        let mut node = RawNode::leaf(EdgeDecoration::t1(false), f(&[1]));
        for _ in 0..10 {
            node = RawNode::inner(EdgeDecoration::t2(false), node.freq.clone(), vec![node]);
        }
        let (t, _) = DecoratedTree::canonicalize(vec![node]).unwrap();
        assert!(matches!(
            linear_extensions(&t),
            Err(AlgebraError::SizeGuard(_))
        ));
    }
}
