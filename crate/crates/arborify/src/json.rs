//! Versioned JSON serialization ("arborify/v1") for trees, words and their
//! polynomials. Rationals travel as strings so coefficients stay exact.

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::coeff::ExactCoeff;
use crate::error::{AlgebraError, AlgebraResult};
use crate::freq::Frequency;
use crate::pairing::{Model, Pairing};
use crate::tree::{DecoratedTree, EdgeDecoration, EdgeKind, Forest, RawNode, TreeNode, TreePoly};
use crate::word::{Letter, Slot, Word, WordPoly};

pub const SCHEMA: &str = "arborify/v1";

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CoeffDoc {
    pub re: String,
    pub im: String,
    pub mu2: u32,
}

impl From<&ExactCoeff> for CoeffDoc {
    fn from(c: &ExactCoeff) -> Self {
        CoeffDoc {
            re: c.re.to_string(),
            im: c.im.to_string(),
            mu2: c.mu2,
        }
    }
}

impl CoeffDoc {
    pub fn to_coeff(&self) -> AlgebraResult<ExactCoeff> {
        let parse = |s: &str| -> AlgebraResult<BigRational> {
            s.parse()
                .map_err(|_| AlgebraError::Other(format!("bad rational {s:?}")))
        };
        Ok(ExactCoeff::new(parse(&self.re)?, parse(&self.im)?, self.mu2))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct NodeDoc {
    pub kind: String,
    pub conj: u8,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hat: bool,
    pub freq: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeDoc>,
    /// DFS position among the leaves; present on leaves only
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_id: Option<u32>,
}

fn node_doc(n: &TreeNode, next_leaf: &mut u32) -> NodeDoc {
    let leaf_id = if n.is_leaf() {
        let id = *next_leaf;
        *next_leaf += 1;
        Some(id)
    } else {
        None
    };
    NodeDoc {
        kind: match n.decor.kind {
            EdgeKind::T1 => "t1".into(),
            EdgeKind::T2 => "t2".into(),
        },
        conj: u8::from(n.decor.conj),
        hat: n.decor.hat,
        freq: n.freq.components().to_vec(),
        children: n.children.iter().map(|c| node_doc(c, next_leaf)).collect(),
        leaf_id,
    }
}

fn node_raw(d: &NodeDoc) -> AlgebraResult<RawNode> {
    let kind = match d.kind.as_str() {
        "t1" => EdgeKind::T1,
        "t2" => EdgeKind::T2,
        other => return Err(AlgebraError::Other(format!("unknown edge kind {other:?}"))),
    };
    Ok(RawNode {
        decor: EdgeDecoration {
            kind,
            conj: d.conj != 0,
            hat: d.hat,
        },
        freq: Frequency::new(d.freq.clone()),
        children: d
            .children
            .iter()
            .map(node_raw)
            .collect::<AlgebraResult<_>>()?,
        tag: None,
    })
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PairingDoc {
    #[serde(default)]
    pub pair1: Vec<[u32; 2]>,
    #[serde(default)]
    pub pair2: Vec<[u32; 2]>,
}

impl From<&Pairing> for PairingDoc {
    fn from(p: &Pairing) -> Self {
        PairingDoc {
            pair1: p.class1.iter().map(|(a, b)| [*a, *b]).collect(),
            pair2: p.class2.iter().map(|(a, b)| [*a, *b]).collect(),
        }
    }
}

impl PairingDoc {
    pub fn to_pairing(&self) -> Pairing {
        let mut p = Pairing::empty();
        for [a, b] in &self.pair1 {
            p.insert_class1(*a, *b);
        }
        for [a, b] in &self.pair2 {
            p.insert_class2(*a, *b);
        }
        p
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TreeDoc {
    pub schema: String,
    pub kind: String,
    pub roots: Vec<NodeDoc>,
    pub pairing: PairingDoc,
}

pub fn tree_to_json(tree: &DecoratedTree, pairing: &Pairing) -> String {
    let mut next = 0u32;
    let doc = TreeDoc {
        schema: SCHEMA.into(),
        kind: "tree".into(),
        roots: tree
            .root_children()
            .iter()
            .map(|n| node_doc(n, &mut next))
            .collect(),
        pairing: pairing.into(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn tree_from_json(text: &str) -> AlgebraResult<(DecoratedTree, Pairing)> {
    let doc: TreeDoc = serde_json::from_str(text)
        .map_err(|e| AlgebraError::Other(format!("json: {e}")))?;
    check_schema(&doc.schema)?;
    let raw: Vec<RawNode> = doc.roots.iter().map(node_raw).collect::<AlgebraResult<_>>()?;
    let (tree, _) = DecoratedTree::canonicalize(raw)?;
    Ok((tree, doc.pairing.to_pairing()))
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SlotDoc {
    pub conj: u8,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hat: bool,
    pub freq: Vec<i64>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct LetterDoc {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub green_node: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    pub slots: Vec<SlotDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct WordDoc {
    pub letters: Vec<LetterDoc>,
    pub pair1: Vec<[u32; 2]>,
    pub pair2: Vec<[u32; 2]>,
}

fn word_doc(w: &Word) -> WordDoc {
    WordDoc {
        letters: w
            .letters()
            .iter()
            .map(|l| LetterDoc {
                green_node: l.green_node(),
                tag: l.tag().map(|s| s.to_string()),
                slots: l
                    .slots()
                    .iter()
                    .map(|s| SlotDoc {
                        conj: u8::from(s.conj),
                        hat: s.hat,
                        freq: s.freq.components().to_vec(),
                    })
                    .collect(),
            })
            .collect(),
        pair1: w.pairing().class1.iter().map(|(a, b)| [*a, *b]).collect(),
        pair2: w.pairing().class2.iter().map(|(a, b)| [*a, *b]).collect(),
    }
}

fn word_from_doc(doc: &WordDoc, model: Model) -> AlgebraResult<Word> {
    let mut letters = Vec::with_capacity(doc.letters.len());
    for l in &doc.letters {
        let slots: Vec<Slot> = l
            .slots
            .iter()
            .map(|s| Slot::new(s.conj != 0, s.hat, Frequency::new(s.freq.clone())))
            .collect();
        let (mut letter, perm) = Letter::new_wide(model, slots, l.green_node)?;
        // identity permutation expected: documents store canonical order
        if perm.iter().enumerate().any(|(i, p)| i != *p) {
            return Err(AlgebraError::Other(
                "word document slots are not in canonical order".into(),
            ));
        }
        if let Some(t) = &l.tag {
            letter = letter.with_tag(t);
        }
        letters.push(letter);
    }
    let mut pairing = Pairing::empty();
    for [a, b] in &doc.pair1 {
        pairing.insert_class1(*a, *b);
    }
    for [a, b] in &doc.pair2 {
        pairing.insert_class2(*a, *b);
    }
    Word::new(model, letters, pairing)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct WordPolyDoc {
    pub schema: String,
    pub kind: String,
    pub model: Model,
    pub terms: Vec<WordTermDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct WordTermDoc {
    pub coeff: CoeffDoc,
    pub word: WordDoc,
}

pub fn wordpoly_to_json(poly: &WordPoly, model: Model) -> String {
    let doc = WordPolyDoc {
        schema: SCHEMA.into(),
        kind: "word-poly".into(),
        model,
        terms: poly
            .terms()
            .map(|(w, c)| WordTermDoc {
                coeff: c.into(),
                word: word_doc(w),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn wordpoly_from_json(text: &str) -> AlgebraResult<(WordPoly, Model)> {
    let doc: WordPolyDoc = serde_json::from_str(text)
        .map_err(|e| AlgebraError::Other(format!("json: {e}")))?;
    check_schema(&doc.schema)?;
    let mut poly = WordPoly::zero();
    for term in &doc.terms {
        poly.add_term(word_from_doc(&term.word, doc.model)?, term.coeff.to_coeff()?)?;
    }
    Ok((poly, doc.model))
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TreePolyDoc {
    pub schema: String,
    pub kind: String,
    pub terms: Vec<TreeTermDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TreeTermDoc {
    pub coeff: CoeffDoc,
    pub forest: Vec<Vec<NodeDoc>>,
}

pub fn treepoly_to_json(poly: &TreePoly) -> String {
    let doc = TreePolyDoc {
        schema: SCHEMA.into(),
        kind: "tree-poly".into(),
        terms: poly
            .terms()
            .map(|(forest, c)| TreeTermDoc {
                coeff: c.into(),
                forest: forest
                    .trees()
                    .iter()
                    .map(|t| {
                        let mut next = 0u32;
                        t.root_children()
                            .iter()
                            .map(|n| node_doc(n, &mut next))
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn treepoly_from_json(text: &str) -> AlgebraResult<TreePoly> {
    let doc: TreePolyDoc = serde_json::from_str(text)
        .map_err(|e| AlgebraError::Other(format!("json: {e}")))?;
    check_schema(&doc.schema)?;
    let mut poly = TreePoly::zero();
    for term in &doc.terms {
        let trees: Vec<DecoratedTree> = term
            .forest
            .iter()
            .map(|roots| {
                let raw: Vec<RawNode> =
                    roots.iter().map(node_raw).collect::<AlgebraResult<_>>()?;
                Ok(DecoratedTree::canonicalize(raw)?.0)
            })
            .collect::<AlgebraResult<_>>()?;
        poly.add_term(Forest::from_trees(trees), term.coeff.to_coeff()?)?;
    }
    Ok(poly)
}

fn check_schema(s: &str) -> AlgebraResult<()> {
    if s != SCHEMA {
        return Err(AlgebraError::Other(format!(
            "schema mismatch: expected {SCHEMA:?}, found {s:?}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn f(v: i64) -> Frequency {
        Frequency::new(vec![v])
    }

    #[test]
    fn tree_roundtrips_with_pairing() {
        let (t5, p5) = catalog::nls_t5(&f(1), &f(2), &f(3), &f(5));
        let text = tree_to_json(&t5, &p5);
        let (t, p) = tree_from_json(&text).unwrap();
        assert_eq!(t, t5);
        assert_eq!(p, p5);
    }

    #[test]
    fn wordpoly_roundtrips_exactly() {
        let (t5, p5) = catalog::nls_t5(&f(1), &f(2), &f(3), &f(5));
        let poly = crate::arborify::arborify(&t5, &p5, Model::Nls).unwrap();
        let text = wordpoly_to_json(&poly, Model::Nls);
        let (back, model) = wordpoly_from_json(&text).unwrap();
        assert_eq!(model, Model::Nls);
        assert_eq!(back, poly);
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let (t5, p5) = catalog::nls_t5(&f(1), &f(2), &f(3), &f(5));
        let text = tree_to_json(&t5, &p5).replace("arborify/v1", "arborify/v0");
        assert!(tree_from_json(&text).is_err());
    }

    #[test]
    fn empty_word_poly_roundtrips() {
        let poly = WordPoly::zero();
        let text = wordpoly_to_json(&poly, Model::Wave);
        let (back, _) = wordpoly_from_json(&text).unwrap();
        assert!(back.is_zero());
    }
}
