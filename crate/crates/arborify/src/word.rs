//! The star-letter alphabet, words with cross-letter pairings, the shuffle
//! product and the color-switching map.
//!
//! Letters are non-planar: slots are kept in a canonical order. A word's
//! pairing lives on flat slot ids (letters in time order, slots in canonical
//! order); when two slots of a letter are indistinguishable the pairing is
//! normalized to the lexicographically smallest relabelling, so word equality
//! does not depend on construction history.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::coeff::ExactCoeff;
use crate::error::{AlgebraError, AlgebraResult};
use crate::freq::Frequency;
use crate::pairing::{validate_pairing, LeafInfo, Model, Pairing};

/// One terminal edge of a star letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Slot {
    pub conj: bool,
    pub hat: bool,
    pub freq: Frequency,
}

impl Slot {
    pub fn new(conj: bool, hat: bool, freq: Frequency) -> Self {
        Slot { conj, hat, freq }
    }
}

/// A one-level star tree. `green_node` pins the letter's time to 0 (wave
/// lower boundary term of integration by parts).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Letter {
    green_node: bool,
    tag: Option<String>,
    slots: Vec<Slot>,
}

impl Letter {
    /// Canonical construction. Returns the letter and the permutation sending
    /// input slot index `i` to its canonical position.
    pub fn new(model: Model, slots: Vec<Slot>, green_node: bool) -> AlgebraResult<(Self, Vec<usize>)> {
        Self::build(model, slots, green_node, false, None)
    }

    /// Like [`Letter::new`] but admits the enlarged alphabet (merged boundary
    /// letters of arity 6 and 8).
    pub fn new_wide(
        model: Model,
        slots: Vec<Slot>,
        green_node: bool,
    ) -> AlgebraResult<(Self, Vec<usize>)> {
        Self::build(model, slots, green_node, true, None)
    }

    /// A bare positional marker with no slots (used when projecting a word
    /// polynomial onto letter tags).
    pub fn tag_only(tag: &str) -> Self {
        Letter {
            green_node: false,
            tag: Some(tag.to_string()),
            slots: Vec::new(),
        }
    }

    fn build(
        model: Model,
        slots: Vec<Slot>,
        green_node: bool,
        wide: bool,
        tag: Option<String>,
    ) -> AlgebraResult<(Self, Vec<usize>)> {
        let arity = slots.len();
        if arity == 0 {
            return Err(AlgebraError::InvalidLetter("letter with no slots".into()));
        }
        match model {
            Model::Nls => {
                if green_node {
                    return Err(AlgebraError::InvalidLetter(
                        "green-node letters exist only in the wave model".into(),
                    ));
                }
                if !wide && !matches!(arity, 1 | 3 | 4) {
                    return Err(AlgebraError::InvalidLetter(format!(
                        "NLS letter arity {arity} not in {{1,3,4}}"
                    )));
                }
                if arity == 4 {
                    let s = Frequency::signed_sum(slots.iter().map(|s| (&s.freq, s.conj)));
                    if !s.is_zero() {
                        return Err(AlgebraError::InvalidLetter(format!(
                            "arity-4 NLS letter needs a vanishing signed frequency sum, got {s}"
                        )));
                    }
                }
            }
            Model::Wave => {
                if slots.iter().any(|s| s.conj) {
                    return Err(AlgebraError::InvalidLetter(
                        "wave slots cannot carry conjugation bits".into(),
                    ));
                }
                let allowed = if wide {
                    matches!(arity, 2 | 4 | 6 | 8)
                } else {
                    matches!(arity, 2 | 4)
                };
                if !allowed {
                    return Err(AlgebraError::InvalidLetter(format!(
                        "wave letter arity {arity} not admitted"
                    )));
                }
                if arity == 4 && !wide {
                    let s = Frequency::signed_sum(slots.iter().map(|s| (&s.freq, false)));
                    if !s.is_zero() {
                        return Err(AlgebraError::InvalidLetter(format!(
                            "arity-4 wave letter needs a vanishing frequency sum, got {s}"
                        )));
                    }
                }
            }
        }
        let mut idx: Vec<usize> = (0..arity).collect();
        idx.sort_by(|a, b| slots[*a].cmp(&slots[*b]));
        let mut perm = vec![0usize; arity];
        for (new_pos, old) in idx.iter().enumerate() {
            perm[*old] = new_pos;
        }
        let sorted = idx.into_iter().map(|i| slots[i].clone()).collect();
        Ok((
            Letter {
                green_node,
                tag,
                slots: sorted,
            },
            perm,
        ))
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn green_node(&self) -> bool {
        self.green_node
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn with_tag(mut self, tag: &str) -> Self {
        self.tag = Some(tag.to_string());
        self
    }
}

/// A sequence of letters in time order (last letter sits at the final time)
/// with a pairing over the flat slot ids.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Word {
    model: Model,
    letters: Vec<Letter>,
    pairing: Pairing,
}

impl Word {
    pub fn empty(model: Model) -> Self {
        Word {
            model,
            letters: Vec::new(),
            pairing: Pairing::empty(),
        }
    }

    /// Builds a word, validating the pairing against the slots and
    /// normalizing pairing ids over indistinguishable slots. Green-node
    /// letters must form a prefix (their time is pinned to 0).
    pub fn new(model: Model, letters: Vec<Letter>, pairing: Pairing) -> AlgebraResult<Self> {
        let mut seen_normal = false;
        for l in &letters {
            if l.green_node {
                if seen_normal {
                    return Err(AlgebraError::InvalidLetter(
                        "green-node letters must precede all time-ordered letters".into(),
                    ));
                }
            } else {
                seen_normal = true;
            }
        }
        let infos: Vec<LeafInfo> = letters
            .iter()
            .flat_map(|l| l.slots.iter().map(|s| (s.freq.clone(), s.conj, s.hat)))
            .collect();
        validate_pairing(&pairing, &infos, model)?;
        let pairing = canonical_pairing(&letters, &pairing);
        Ok(Word {
            model,
            letters,
            pairing,
        })
    }

    pub fn single(model: Model, letter: Letter) -> AlgebraResult<Self> {
        Word::new(model, vec![letter], Pairing::empty())
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn slot_count(&self) -> usize {
        self.letters.iter().map(|l| l.arity()).sum()
    }

    /// Flat id of slot `slot_idx` in letter `letter_idx`.
    pub fn flat_id(&self, letter_idx: usize, slot_idx: usize) -> u32 {
        let offset: usize = self.letters[..letter_idx].iter().map(|l| l.arity()).sum();
        (offset + slot_idx) as u32
    }

    /// Inverse of [`Word::flat_id`].
    pub fn locate(&self, flat: u32) -> (usize, usize) {
        let mut rest = flat as usize;
        for (i, l) in self.letters.iter().enumerate() {
            if rest < l.arity() {
                return (i, rest);
            }
            rest -= l.arity();
        }
        panic!("flat slot id {flat} out of range");
    }

    pub fn slot(&self, flat: u32) -> &Slot {
        let (l, s) = self.locate(flat);
        &self.letters[l].slots[s]
    }

    pub fn slot_infos(&self) -> Vec<LeafInfo> {
        self.letters
            .iter()
            .flat_map(|l| l.slots.iter().map(|s| (s.freq.clone(), s.conj, s.hat)))
            .collect()
    }

    /// Structural sanity of arborification images. NLS class-1 pairs join
    /// two hatted ends, so nothing beyond validity is demanded; in the wave
    /// model the green (derivative) end must sit in the earlier-or-equal
    /// letter.
    pub fn class1_points_forward(&self) -> bool {
        if self.model == Model::Nls {
            return true;
        }
        self.pairing.class1.iter().all(|(a, b)| {
            let (la, sa) = self.locate(*a);
            let (lb, sb) = self.locate(*b);
            let a_hat = self.letters[la].slots[sa].hat;
            let b_hat = self.letters[lb].slots[sb].hat;
            let (green_letter, other_letter) = if a_hat {
                (la, lb)
            } else if b_hat {
                (lb, la)
            } else {
                return false;
            };
            green_letter <= other_letter
        })
    }
}

/// Normalize pairing ids over groups of indistinguishable slots: among all
/// relabellings that permute identical slots within a letter, keep the
/// lexicographically smallest (class1, class2) encoding. Falls back to a
/// partner-order greedy sort if the search space is degenerate.
fn canonical_pairing(letters: &[Letter], pairing: &Pairing) -> Pairing {
    if pairing.is_empty() {
        return pairing.clone();
    }
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut offset = 0u32;
    for l in letters {
        let mut i = 0;
        while i < l.slots.len() {
            let mut j = i + 1;
            while j < l.slots.len() && l.slots[j] == l.slots[i] {
                j += 1;
            }
            if j - i > 1 {
                groups.push((i..j).map(|k| offset + k as u32).collect());
            }
            i = j;
        }
        offset += l.arity() as u32;
    }
    if groups.is_empty() {
        return pairing.clone();
    }
    let space: usize = groups
        .iter()
        .map(|g| (1..=g.len()).product::<usize>())
        .product();
    if space > 20_000 {
        // Greedy fallback: stable within-group order by partner id.
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for g in &groups {
            let mut members: Vec<u32> = g.clone();
            members.sort_by_key(|id| pairing.partner(*id).map(|(p, _)| p).unwrap_or(u32::MAX));
            for (slot, id) in g.iter().zip(members) {
                map.insert(id, *slot);
            }
        }
        return pairing.remap(|id| *map.get(&id).unwrap_or(&id));
    }
    let perms_per_group: Vec<Vec<Vec<u32>>> = groups
        .iter()
        .map(|g| g.iter().cloned().permutations(g.len()).collect())
        .collect();
    let mut best: Option<Pairing> = None;
    for combo in perms_per_group.iter().multi_cartesian_product() {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for (g, perm) in groups.iter().zip(combo) {
            for (src, dst) in g.iter().zip(perm.iter()) {
                map.insert(*src, *dst);
            }
        }
        let candidate = pairing.remap(|id| *map.get(&id).unwrap_or(&id));
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    best.unwrap_or_else(|| pairing.clone())
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::dsl::print_word(self))
    }
}

/// Finite linear combination of words with exact coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WordPoly {
    terms: BTreeMap<Word, ExactCoeff>,
}

impl WordPoly {
    pub fn zero() -> Self {
        WordPoly::default()
    }

    pub fn single(word: Word) -> Self {
        let mut p = WordPoly::zero();
        p.add_term(word, ExactCoeff::one()).expect("fresh term");
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ExactCoeff)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, word: Word, coeff: ExactCoeff) -> AlgebraResult<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&word) {
            None => {
                self.terms.insert(word, coeff);
            }
            Some(old) => {
                let sum = old.add(&coeff)?;
                if !sum.is_zero() {
                    self.terms.insert(word, sum);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &WordPoly) -> AlgebraResult<WordPoly> {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ExactCoeff) -> WordPoly {
        if c.is_zero() {
            return WordPoly::zero();
        }
        WordPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, k)| (w.clone(), k.mul(c)))
                .collect(),
        }
    }
}

/// Sum over all order-preserving interleavings of `u` and `v`, with pairings
/// carried along. `C(|u|+|v|, |u|)` terms when all letters are distinct.
pub fn shuffle(u: &Word, v: &Word) -> AlgebraResult<WordPoly> {
    if u.model != v.model {
        return Err(AlgebraError::ModelMismatch {
            expected: u.model,
            got: v.model,
        });
    }
    if u.letters.iter().chain(&v.letters).any(|l| l.green_node) {
        return Err(AlgebraError::InvalidLetter(
            "green-node letters cannot be shuffled (their time is pinned)".into(),
        ));
    }
    let m = u.len();
    let n = v.len();
    let mut out = WordPoly::zero();
    for positions in (0..m + n).combinations(m) {
        let mut is_u = vec![false; m + n];
        for p in &positions {
            is_u[*p] = true;
        }
        let word = interleave(u, v, &is_u)?;
        out.add_term(word, ExactCoeff::one())?;
    }
    Ok(out)
}

fn interleave(u: &Word, v: &Word, is_u: &[bool]) -> AlgebraResult<Word> {
    let mut letters = Vec::with_capacity(is_u.len());
    // position of letter i of u (resp. v) in the merged word
    let mut u_pos = Vec::with_capacity(u.len());
    let mut v_pos = Vec::with_capacity(v.len());
    let (mut iu, mut iv) = (0usize, 0usize);
    for (pos, from_u) in is_u.iter().enumerate() {
        if *from_u {
            letters.push(u.letters[iu].clone());
            u_pos.push(pos);
            iu += 1;
        } else {
            letters.push(v.letters[iv].clone());
            v_pos.push(pos);
            iv += 1;
        }
    }
    let offsets: Vec<usize> = letters
        .iter()
        .scan(0usize, |acc, l| {
            let here = *acc;
            *acc += l.arity();
            Some(here)
        })
        .collect();
    let remap_u = |flat: u32| -> u32 {
        let (li, si) = u.locate(flat);
        (offsets[u_pos[li]] + si) as u32
    };
    let remap_v = |flat: u32| -> u32 {
        let (li, si) = v.locate(flat);
        (offsets[v_pos[li]] + si) as u32
    };
    let mut pairing = u.pairing.remap(remap_u);
    let vp = v.pairing.remap(remap_v);
    pairing.class1.extend(vp.class1);
    pairing.class2.extend(vp.class2);
    Word::new(u.model, letters, pairing)
}

/// Shuffle of polynomials: bilinear extension of [`shuffle`].
pub fn shuffle_poly(a: &WordPoly, b: &WordPoly) -> AlgebraResult<WordPoly> {
    let mut out = WordPoly::zero();
    for (wa, ca) in a.terms() {
        for (wb, cb) in b.terms() {
            let prod = shuffle(wa, wb)?;
            let scaled = prod.scale(&ca.mul(cb));
            out = out.add(&scaled)?;
        }
    }
    Ok(out)
}

/// Juxtaposition `uv`.
pub fn concat(u: &Word, v: &Word) -> AlgebraResult<Word> {
    if u.model != v.model {
        return Err(AlgebraError::ModelMismatch {
            expected: u.model,
            got: v.model,
        });
    }
    let offset = u.slot_count() as u32;
    let mut letters = u.letters.clone();
    letters.extend(v.letters.iter().cloned());
    let mut pairing = u.pairing.clone();
    let vp = v.pairing.remap(|id| id + offset);
    pairing.class1.extend(vp.class1);
    pairing.class2.extend(vp.class2);
    Word::new(u.model, letters, pairing)
}

/// Concatenation on polynomials.
pub fn concat_poly(a: &WordPoly, b: &WordPoly) -> AlgebraResult<WordPoly> {
    let mut out = WordPoly::zero();
    for (wa, ca) in a.terms() {
        for (wb, cb) in b.terms() {
            out.add_term(concat(wa, wb)?, ca.mul(cb))?;
        }
    }
    Ok(out)
}

/// The color-switching map `ψ_{k,l}`: hat flags on slots decorated `k` and on
/// slots decorated `l` are exchanged; frequencies stay put; pairs touching
/// the flipped slots move between the two classes accordingly.
pub fn swap_green(w: &Word, k: &Frequency, l: &Frequency) -> AlgebraResult<Word> {
    let infos = w.slot_infos();
    let k_slots: Vec<u32> = infos
        .iter()
        .enumerate()
        .filter(|(_, (f, _, _))| f == k)
        .map(|(i, _)| i as u32)
        .collect();
    let l_slots: Vec<u32> = infos
        .iter()
        .enumerate()
        .filter(|(_, (f, _, _))| f == l)
        .map(|(i, _)| i as u32)
        .collect();
    if k_slots.is_empty() {
        return Err(AlgebraError::NoSuchFrequency(k.clone()));
    }
    if l_slots.is_empty() {
        return Err(AlgebraError::NoSuchFrequency(l.clone()));
    }
    let uniform = |ids: &[u32]| -> AlgebraResult<bool> {
        let first = infos[ids[0] as usize].2;
        if ids.iter().any(|i| infos[*i as usize].2 != first) {
            return Err(AlgebraError::MixedHats(format!(
                "slots at frequency {} carry mixed hat flags",
                infos[ids[0] as usize].0
            )));
        }
        Ok(first)
    };
    let hat_k = uniform(&k_slots)?;
    let hat_l = uniform(&l_slots)?;
    if k == l || hat_k == hat_l {
        return Ok(w.clone());
    }

    // Rebuild letters with flipped hats, tracking the slot re-sort.
    let mut new_letters = Vec::with_capacity(w.letters.len());
    let mut id_map: BTreeMap<u32, u32> = BTreeMap::new();
    let mut old_offset = 0u32;
    let mut new_offset = 0u32;
    for letter in &w.letters {
        let slots: Vec<Slot> = letter
            .slots
            .iter()
            .map(|s| {
                let mut s = s.clone();
                if &s.freq == k {
                    s.hat = hat_l;
                } else if &s.freq == l {
                    s.hat = hat_k;
                }
                s
            })
            .collect();
        let (new_letter, perm) = Letter::build(
            w.model,
            slots,
            letter.green_node,
            true,
            letter.tag.clone(),
        )?;
        for (old_idx, new_idx) in perm.iter().enumerate() {
            id_map.insert(old_offset + old_idx as u32, new_offset + *new_idx as u32);
        }
        old_offset += letter.arity() as u32;
        new_offset += new_letter.arity() as u32;
        new_letters.push(new_letter);
    }
    let remapped = w.pairing.remap(|id| id_map[&id]);

    // Re-derive pair classes from the new hat flags.
    let new_infos: Vec<LeafInfo> = new_letters
        .iter()
        .flat_map(|l| l.slots.iter().map(|s| (s.freq.clone(), s.conj, s.hat)))
        .collect();
    let mut pairing = Pairing::empty();
    for ((a, b), _) in remapped.all_pairs() {
        let ha = new_infos[a as usize].2;
        let hb = new_infos[b as usize].2;
        let class1 = match w.model {
            Model::Nls => {
                if ha != hb {
                    return Err(AlgebraError::InvalidPairing(
                        "green switch produced a mixed-hat NLS pair".into(),
                    ));
                }
                ha && hb
            }
            Model::Wave => ha != hb,
        };
        if class1 {
            pairing.insert_class1(a, b);
        } else {
            pairing.insert_class2(a, b);
        }
    }
    Word::new(w.model, new_letters, pairing)
}

/// A pair given as `((letter, slot-index), (letter, slot-index), class1)`.
pub type PairRef = ((usize, usize), (usize, usize), bool);

/// Build a word from per-letter slot lists (in input order) and pairs given
/// as [`PairRef`] references into those lists. Wide letters are admitted.
pub fn assemble(
    model: Model,
    parts: &[(Vec<Slot>, bool)],
    pairs: &[PairRef],
) -> AlgebraResult<Word> {
    let mut letters = Vec::with_capacity(parts.len());
    let mut flat: Vec<Vec<u32>> = Vec::with_capacity(parts.len());
    let mut offset = 0u32;
    for (slots, green_node) in parts {
        let (letter, perm) = Letter::new_wide(model, slots.clone(), *green_node)?;
        flat.push(perm.iter().map(|p| offset + *p as u32).collect());
        offset += letter.arity() as u32;
        letters.push(letter);
    }
    let mut pairing = Pairing::empty();
    for ((la, sa), (lb, sb), class1) in pairs {
        let a = flat[*la][*sa];
        let b = flat[*lb][*sb];
        if *class1 {
            pairing.insert_class1(a, b);
        } else {
            pairing.insert_class2(a, b);
        }
    }
    Word::new(model, letters, pairing)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1usize;
    for i in 0..k {
        num = num * (n - i) / (i + 1);
    }
    num
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: i64) -> Frequency {
        Frequency::new(vec![v])
    }

    fn nls_letter(freqs: &[(bool, i64)]) -> Letter {
        let slots = freqs
            .iter()
            .map(|(c, k)| Slot::new(*c, false, f(*k)))
            .collect();
        Letter::new(Model::Nls, slots, false).unwrap().0
    }

    fn single(letter: Letter) -> Word {
        Word::single(Model::Nls, letter).unwrap()
    }

    #[test]
    fn shuffle_unit_and_two_letters() {
        let a = single(nls_letter(&[(false, 1)]));
        let unit = Word::empty(Model::Nls);
        let p = shuffle(&a, &unit).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.terms().next().unwrap().0, &a);

        let b = single(nls_letter(&[(false, 2)]));
        let p = shuffle(&a, &b).unwrap();
        // a1 ⧢ a2 = a1a2 + a2a1
        assert_eq!(p.len(), 2);
        for (_, c) in p.terms() {
            assert_eq!(*c, ExactCoeff::one());
        }
    }

    #[test]
    fn shuffle_counts_are_binomial() {
        let a = concat(
            &single(nls_letter(&[(false, 1)])),
            &single(nls_letter(&[(false, 2)])),
        )
        .unwrap();
        let b = single(nls_letter(&[(false, 3)]));
        let p = shuffle(&a, &b).unwrap();
        assert_eq!(p.len(), binomial(3, 1));
        // shuffle always contains the concatenation with coefficient 1
        let cat = concat(&a, &b).unwrap();
        let found = p.terms().find(|(w, _)| **w == cat);
        assert!(found.is_some());
        assert_eq!(*found.unwrap().1, ExactCoeff::one());
    }

    #[test]
    fn shuffle_is_commutative_and_associative() {
        let u = concat(
            &single(nls_letter(&[(false, 1)])),
            &single(nls_letter(&[(true, 2)])),
        )
        .unwrap();
        let v = single(nls_letter(&[(false, 3)]));
        let w = single(nls_letter(&[(false, 4)]));
        assert_eq!(shuffle(&u, &v).unwrap(), shuffle(&v, &u).unwrap());
        let left = shuffle_poly(&shuffle(&u, &v).unwrap(), &WordPoly::single(w.clone())).unwrap();
        let right = shuffle_poly(&WordPoly::single(u), &shuffle(&v, &w).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn model_mismatch_is_rejected() {
        let a = single(nls_letter(&[(false, 1)]));
        let wave_letter = Letter::new(
            Model::Wave,
            vec![
                Slot::new(false, false, f(1)),
                Slot::new(false, false, f(-1)),
            ],
            false,
        )
        .unwrap()
        .0;
        let b = Word::single(Model::Wave, wave_letter).unwrap();
        assert!(matches!(
            shuffle(&a, &b),
            Err(AlgebraError::ModelMismatch { .. })
        ));
    }

    #[test]
    fn letter_arity_rules() {
        // NLS arity 2 is rejected
        assert!(Letter::new(
            Model::Nls,
            vec![Slot::new(false, false, f(1)), Slot::new(false, false, f(2))],
            false,
        )
        .is_err());
        // arity-4 NLS letter needs the signed sum to vanish
        let bad = Letter::new(
            Model::Nls,
            vec![
                Slot::new(false, false, f(1)),
                Slot::new(false, false, f(2)),
                Slot::new(true, false, f(1)),
                Slot::new(true, false, f(1)),
            ],
            false,
        );
        assert!(bad.is_err());
        let good = Letter::new(
            Model::Nls,
            vec![
                Slot::new(false, false, f(1)),
                Slot::new(false, false, f(2)),
                Slot::new(true, false, f(1)),
                Slot::new(true, false, f(2)),
            ],
            false,
        );
        assert!(good.is_ok());
        // wave arity 6 only through the wide constructor
        let six: Vec<Slot> = (0..6).map(|i| Slot::new(false, false, f(i))).collect();
        assert!(Letter::new(Model::Wave, six.clone(), false).is_err());
        assert!(Letter::new_wide(Model::Wave, six, false).is_ok());
    }

    #[test]
    fn swap_green_is_involutive_and_moves_pairs() {
        // Two letters, hat pair on l-slots, plain pair on k-slots.
        let k = f(1);
        let l = f(5);
        let (l1, _) = Letter::new(
            Model::Nls,
            vec![
                Slot::new(false, true, l.clone()),
                Slot::new(true, false, k.clone()),
                Slot::new(false, false, f(2)),
            ],
            false,
        )
        .unwrap();
        let (l2, _) = Letter::new(
            Model::Nls,
            vec![
                Slot::new(true, true, l.clone()),
                Slot::new(false, false, k.clone()),
                Slot::new(false, false, f(3)),
            ],
            false,
        )
        .unwrap();
        let mut pairing = Pairing::empty();
        let letters = vec![l1, l2];
        // flat ids: letter sizes 3 + 3; find the slots
        let w0 = Word::new(Model::Nls, letters, Pairing::empty()).unwrap();
        let find = |hat: bool, freq: &Frequency, from: usize| -> u32 {
            (0..w0.slot_count() as u32)
                .find(|id| {
                    let (li, _) = w0.locate(*id);
                    let s = w0.slot(*id);
                    li == from && s.hat == hat && &s.freq == freq
                })
                .unwrap()
        };
        pairing.insert_class1(find(true, &l, 0), find(true, &l, 1));
        pairing.insert_class2(find(false, &k, 0), find(false, &k, 1));
        let w = Word::new(Model::Nls, w0.letters().to_vec(), pairing).unwrap();

        let swapped = swap_green(&w, &k, &l).unwrap();
        assert_ne!(swapped, w);
        // hats moved to the k-slots
        assert!(swapped
            .slot_infos()
            .iter()
            .all(|(fr, _, hat)| (fr == &k) == *hat || (fr != &k && fr != &l && !hat)));
        assert_eq!(swapped.pairing().class1.len(), 1);
        assert_eq!(swapped.pairing().class2.len(), 1);
        // involution
        let back = swap_green(&swapped, &k, &l).unwrap();
        assert_eq!(back, w);
        // identity without hats
        let plain = swap_green(&swapped, &f(2), &f(3)).unwrap();
        assert_eq!(plain, swapped);
    }

    #[test]
    fn swap_green_commutes_with_shuffle() {
        let k = f(1);
        let l = f(5);
        let (a, _) = Letter::new(
            Model::Nls,
            vec![
                Slot::new(false, true, l.clone()),
                Slot::new(true, false, k.clone()),
                Slot::new(false, false, f(2)),
            ],
            false,
        )
        .unwrap();
        let (b, _) = Letter::new(
            Model::Nls,
            vec![
                Slot::new(true, true, l.clone()),
                Slot::new(false, false, k.clone()),
                Slot::new(false, false, f(3)),
            ],
            false,
        )
        .unwrap();
        let u = Word::single(Model::Nls, a).unwrap();
        let v = Word::single(Model::Nls, b).unwrap();
        let lhs = {
            let p = shuffle(&u, &v).unwrap();
            let mut out = WordPoly::zero();
            for (w, c) in p.terms() {
                out.add_term(swap_green(w, &k, &l).unwrap(), c.clone()).unwrap();
            }
            out
        };
        let rhs = shuffle(
            &swap_green(&u, &k, &l).unwrap(),
            &swap_green(&v, &k, &l).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn indistinguishable_slots_normalize_the_pairing() {
        // two letters of identical zero slots: crossing or aligning the pairs
        // describes the same word, so the canonical keys must agree
        let z = Frequency::zero(3);
        let letter = vec![Slot::new(false, false, z.clone()), Slot::new(false, false, z)];
        let parts = vec![(letter.clone(), false), (letter, false)];
        let aligned = assemble(
            Model::Wave,
            &parts,
            &[((0, 0), (1, 0), false), ((0, 1), (1, 1), false)],
        )
        .unwrap();
        let crossed = assemble(
            Model::Wave,
            &parts,
            &[((0, 0), (1, 1), false), ((0, 1), (1, 0), false)],
        )
        .unwrap();
        assert_eq!(aligned, crossed);
    }

    #[test]
    fn swap_green_missing_frequency_errors() {
        let a = single(nls_letter(&[(false, 1)]));
        assert!(matches!(
            swap_green(&a, &f(9), &f(1)),
            Err(AlgebraError::NoSuchFrequency(_))
        ));
    }
}
