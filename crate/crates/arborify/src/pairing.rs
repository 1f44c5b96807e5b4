//! Pairings (partial perfect matchings) on leaf or slot identifiers and the
//! Wick enumeration of matchings.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, AlgebraResult};
use crate::freq::Frequency;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Nls,
    Wave,
}

/// Leaf data a pairing is validated against: `(frequency, conj, hat)`.
pub type LeafInfo = (Frequency, bool, bool);

/// Unordered id pairs split into the hat/green class (`class1`) and the
/// standard class (`class2`). Ids not mentioned are unpaired.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Pairing {
    pub class1: BTreeSet<(u32, u32)>,
    pub class2: BTreeSet<(u32, u32)>,
}

pub fn ordered(a: u32, b: u32) -> (u32, u32) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Pairing {
    pub fn empty() -> Self {
        Pairing::default()
    }

    pub fn is_empty(&self) -> bool {
        self.class1.is_empty() && self.class2.is_empty()
    }

    pub fn insert_class1(&mut self, a: u32, b: u32) {
        self.class1.insert(ordered(a, b));
    }

    pub fn insert_class2(&mut self, a: u32, b: u32) {
        self.class2.insert(ordered(a, b));
    }

    pub fn all_pairs(&self) -> impl Iterator<Item = ((u32, u32), bool)> + '_ {
        self.class1
            .iter()
            .map(|p| (*p, true))
            .chain(self.class2.iter().map(|p| (*p, false)))
    }

    pub fn paired_ids(&self) -> BTreeSet<u32> {
        self.all_pairs()
            .flat_map(|((a, b), _)| [a, b])
            .collect()
    }

    pub fn len(&self) -> usize {
        self.class1.len() + self.class2.len()
    }

    /// Partner of `id`, with the class flag, if paired.
    pub fn partner(&self, id: u32) -> Option<(u32, bool)> {
        for ((a, b), c1) in self.all_pairs() {
            if a == id {
                return Some((b, c1));
            }
            if b == id {
                return Some((a, c1));
            }
        }
        None
    }

    /// Remap ids through `f` (used when slots are renumbered).
    pub fn remap(&self, f: impl Fn(u32) -> u32) -> Pairing {
        Pairing {
            class1: self.class1.iter().map(|(a, b)| ordered(f(*a), f(*b))).collect(),
            class2: self.class2.iter().map(|(a, b)| ordered(f(*a), f(*b))).collect(),
        }
    }
}

/// Model validity of a pairing against host leaves/slots.
///
/// NLS: paired ends carry the same frequency and opposite conjugation bits
/// (the only nonvanishing Gaussian covariances), and the hat class must match
/// the hat flags (class-1 joins two hatted ends, class-2 two plain ends).
/// Wave: paired ends have frequencies summing to zero; class-1 pairs carry the
/// time derivative on exactly one (green) end, class-2 pairs none.
pub fn validate_pairing(pairing: &Pairing, leaves: &[LeafInfo], model: Model) -> AlgebraResult<()> {
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    for ((a, b), class1) in pairing.all_pairs() {
        if a == b {
            return Err(AlgebraError::InvalidPairing(format!(
                "id {a} paired with itself"
            )));
        }
        for id in [a, b] {
            if id as usize >= leaves.len() {
                return Err(AlgebraError::InvalidPairing(format!(
                    "id {id} outside the host's {} leaves",
                    leaves.len()
                )));
            }
            if !seen.insert(id) {
                return Err(AlgebraError::InvalidPairing(format!(
                    "id {id} appears in two pairs"
                )));
            }
        }
        let (fa, ca, ha) = &leaves[a as usize];
        let (fb, cb, hb) = &leaves[b as usize];
        match model {
            Model::Nls => {
                if fa != fb {
                    return Err(AlgebraError::InvalidPairing(format!(
                        "NLS pair ({a},{b}) joins distinct frequencies {fa} and {fb}"
                    )));
                }
                if ca == cb {
                    return Err(AlgebraError::InvalidPairing(format!(
                        "NLS pair ({a},{b}) needs opposite conjugation bits"
                    )));
                }
                let both_hat = *ha && *hb;
                let both_plain = !*ha && !*hb;
                if class1 && !both_hat {
                    return Err(AlgebraError::InvalidPairing(format!(
                        "NLS class-1 pair ({a},{b}) must join two hatted ends"
                    )));
                }
                if !class1 && !both_plain {
                    return Err(AlgebraError::InvalidPairing(format!(
                        "NLS class-2 pair ({a},{b}) must join two plain ends"
                    )));
                }
            }
            Model::Wave => {
                if *ca || *cb {
                    return Err(AlgebraError::InvalidPairing(
                        "wave ends cannot carry conjugation bits".into(),
                    ));
                }
                if !(fa + fb).is_zero() {
                    return Err(AlgebraError::InvalidPairing(format!(
                        "wave pair ({a},{b}) needs frequencies summing to zero, got {fa} and {fb}"
                    )));
                }
                let hats = u8::from(*ha) + u8::from(*hb);
                if class1 && hats != 1 {
                    return Err(AlgebraError::InvalidPairing(format!(
                        "wave class-1 pair ({a},{b}) needs exactly one green end"
                    )));
                }
                if !class1 && hats != 0 {
                    return Err(AlgebraError::InvalidPairing(format!(
                        "wave class-2 pair ({a},{b}) cannot touch green ends"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn pair_admissible(a: &(Frequency, bool), b: &(Frequency, bool), model: Option<Model>) -> bool {
    match model {
        None => true,
        Some(Model::Nls) => a.0 == b.0 && a.1 != b.1,
        Some(Model::Wave) => (&a.0 + &b.0).is_zero(),
    }
}

/// Enumerate matchings of `leaves`, optionally filtered by the model's
/// covariance rule, in a deterministic order (lexicographic on sorted pairs).
/// With `partial` set, matchings on every even-size subset are produced,
/// including the empty one; otherwise only full matchings. Output pairings
/// are class-2 throughout (moment pairings of plain leaves).
pub fn wick_pairings(
    leaves: &[(Frequency, bool)],
    model: Option<Model>,
    partial: bool,
) -> Vec<Pairing> {
    let n = leaves.len();
    if !partial && !n.is_multiple_of(2) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut current: Vec<(u32, u32)> = Vec::new();
    fn rec(
        leaves: &[(Frequency, bool)],
        model: Option<Model>,
        partial: bool,
        used: &mut Vec<bool>,
        current: &mut Vec<(u32, u32)>,
        out: &mut Vec<Pairing>,
    ) {
        let first = match used.iter().position(|u| !u) {
            None => {
                let mut p = Pairing::empty();
                for (a, b) in current.iter() {
                    p.insert_class2(*a, *b);
                }
                out.push(p);
                return;
            }
            Some(i) => i,
        };
        used[first] = true;
        if partial {
            // Leave `first` unpaired.
            rec(leaves, model, partial, used, current, out);
        }
        for j in first + 1..leaves.len() {
            if used[j] || !pair_admissible(&leaves[first], &leaves[j], model) {
                continue;
            }
            used[j] = true;
            current.push((first as u32, j as u32));
            rec(leaves, model, partial, used, current, out);
            current.pop();
            used[j] = false;
        }
        used[first] = false;
    }
    rec(leaves, model, partial, &mut used, &mut current, &mut out);
    out.sort();
    out.dedup();
    out
}

pub fn double_factorial_odd(n: usize) -> usize {
    // (2n-1)!!
    (1..=n).map(|i| 2 * i - 1).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: i64) -> Frequency {
        Frequency::new(vec![v])
    }

    #[test]
    fn unfiltered_counts_are_double_factorials() {
        for n in 1..=5usize {
            let leaves: Vec<_> = (0..2 * n).map(|i| (f(i as i64), false)).collect();
            let got = wick_pairings(&leaves, None, false).len();
            assert_eq!(got, double_factorial_odd(n));
        }
    }

    #[test]
    fn two_and_six_leaf_counts() {
        let l2: Vec<_> = (0..2).map(|i| (f(i), false)).collect();
        assert_eq!(wick_pairings(&l2, None, false).len(), 1);
        let l6: Vec<_> = (0..6).map(|i| (f(i), false)).collect();
        assert_eq!(wick_pairings(&l6, None, false).len(), 15);
    }

    #[test]
    fn nls_filter_keeps_single_pairing() {
        // [(k,0),(k,1),(m,0),(m,1)] with k≠±m: of the 3 matchings only
        // {(0,1),(2,3)} survives the same-frequency/opposite-conj rule.
        let leaves = vec![(f(1), false), (f(1), true), (f(2), false), (f(2), true)];
        let got = wick_pairings(&leaves, Some(Model::Nls), false);
        assert_eq!(got.len(), 1);
        let mut expect = Pairing::empty();
        expect.insert_class2(0, 1);
        expect.insert_class2(2, 3);
        assert_eq!(got[0], expect);
    }

    #[test]
    fn wave_filter_requires_zero_sum() {
        let leaves = vec![(f(2), false), (f(-2), false), (f(1), false), (f(-1), false)];
        let got = wick_pairings(&leaves, Some(Model::Wave), false);
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn partial_enumeration_includes_empty() {
        let leaves = vec![(f(1), false), (f(1), true)];
        let got = wick_pairings(&leaves, None, true);
        // empty + the single pair
        assert_eq!(got.len(), 2);
        assert!(got.iter().any(|p| p.is_empty()));
    }

    #[test]
    fn validation_rejects_bad_pairs() {
        let leaves: Vec<LeafInfo> = vec![
            (f(1), false, false),
            (f(1), true, false),
            (f(2), false, false),
        ];
        let mut ok = Pairing::empty();
        ok.insert_class2(0, 1);
        assert!(validate_pairing(&ok, &leaves, Model::Nls).is_ok());

        let mut bad_freq = Pairing::empty();
        bad_freq.insert_class2(0, 2);
        assert!(validate_pairing(&bad_freq, &leaves, Model::Nls).is_err());

        let mut bad_class = Pairing::empty();
        bad_class.insert_class1(0, 1);
        assert!(validate_pairing(&bad_class, &leaves, Model::Nls).is_err());

        let wave_leaves: Vec<LeafInfo> = vec![(f(1), false, false), (f(-1), false, true)];
        let mut wave_ok = Pairing::empty();
        wave_ok.insert_class1(0, 1);
        assert!(validate_pairing(&wave_ok, &wave_leaves, Model::Wave).is_ok());
        let mut wave_bad = Pairing::empty();
        wave_bad.insert_class2(0, 1);
        assert!(validate_pairing(&wave_bad, &wave_leaves, Model::Wave).is_err());
    }
}
