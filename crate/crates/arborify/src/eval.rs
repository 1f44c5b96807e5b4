//! Numeric semantics: kernels, covariances, and the evaluation maps on
//! decorated trees and words.
//!
//! The tree route integrates over the tree-shaped time domain with one
//! oscillatory kernel per t2 edge; the word route integrates over the full
//! simplex with one covariance kernel per pair. The equivalence theorems say
//! the two agree, and the acceptance suite holds them to 1e-8.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{EvalError, EvalResult};
use crate::freq::Frequency;
use crate::pairing::{validate_pairing, Model, Pairing};
use crate::quad::{integrate_simplex, integrate_simplex_adaptive, integrate_tree, integrate_tree_adaptive};
use crate::tree::{DecoratedTree, TreeNode};
use crate::word::{Word, WordPoly};

/// Weight function `w` on the lattice (NLS).
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    /// `exp(-|k/L|²)`
    Gaussian,
    /// `1 / (1 + |k/L|²)`
    Rational,
    /// explicit strictly positive table
    Table(BTreeMap<Frequency, f64>),
}

impl Weight {
    pub fn value(&self, k: &Frequency, lattice_l: f64) -> EvalResult<f64> {
        match self {
            Weight::Gaussian => Ok((-k.phys_norm_sq(lattice_l)).exp()),
            Weight::Rational => Ok(1.0 / (1.0 + k.phys_norm_sq(lattice_l))),
            Weight::Table(t) => t.get(k).copied().ok_or_else(|| {
                EvalError::BadParams(format!("weight table has no entry for {k}"))
            }),
        }
    }
}

/// All numeric context for evaluation.
#[derive(Clone, Debug)]
pub struct EvalParams {
    /// final time
    pub t: f64,
    /// ambient dimension
    pub dim: usize,
    /// NLS lattice scale; physical frequency is `k / L`
    pub lattice_l: f64,
    /// coupling μ
    pub mu: f64,
    pub weight: Weight,
    /// wave frequency cutoff (Euclidean `|n| ≤ N`)
    pub cutoff_n: u32,
    /// Gauss–Legendre points per nesting level
    pub quad_order: usize,
    pub seed: u64,
    /// interpret `k²` as `|2πk/L|²` instead of `|k/L|²`
    pub phase_two_pi: bool,
    /// re-run at half the order and report the disagreement
    pub quad_check: bool,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            t: 1.0,
            dim: 1,
            lattice_l: 1.0,
            mu: 1.0,
            weight: Weight::Gaussian,
            cutoff_n: 3,
            quad_order: 64,
            seed: 0,
            phase_two_pi: false,
            quad_check: false,
        }
    }
}

impl EvalParams {
    pub fn validate(&self) -> EvalResult<()> {
        if !(self.t > 0.0) {
            return Err(EvalError::BadParams("t must be positive".into()));
        }
        if self.quad_order < 2 {
            return Err(EvalError::BadParams("quad_order must be at least 2".into()));
        }
        if !(self.lattice_l > 0.0) {
            return Err(EvalError::BadParams("L must be positive".into()));
        }
        if let Weight::Table(t) = &self.weight {
            if t.values().any(|v| !(*v > 0.0)) {
                return Err(EvalError::BadParams(
                    "weight must be strictly positive on the lattice".into(),
                ));
            }
        }
        Ok(())
    }

    /// The squared phase frequency `k²` entering `e^{-itk²}`.
    pub fn phase_sq(&self, k: &Frequency) -> f64 {
        let base = k.phys_norm_sq(self.lattice_l);
        if self.phase_two_pi {
            let tau = 2.0 * std::f64::consts::PI;
            base * tau * tau
        } else {
            base
        }
    }

    pub fn in_cutoff(&self, k: &Frequency) -> bool {
        k.norm_sq() <= (self.cutoff_n as i64) * (self.cutoff_n as i64)
    }
}

/// How unpaired NLS leaves are treated.
#[derive(Clone, Copy)]
pub enum EtaMode<'a> {
    /// every leaf must be paired
    Paired,
    /// unpaired leaves contribute their deterministic factor with η ≡ 1
    EtaOne,
    /// unpaired leaves draw η from the given table (Monte Carlo)
    Sampled(&'a BTreeMap<Frequency, Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalOutput {
    pub value: Complex64,
    /// |full-order − half-order| when the self-check ran
    pub quad_disagreement: Option<f64>,
    /// word μ-convention applied to a word that is not shaped like an
    /// arborification image (letter count vs split pairs)
    pub mu_shape_warning: bool,
}

impl EvalOutput {
    fn plain(value: Complex64) -> Self {
        EvalOutput {
            value,
            quad_disagreement: None,
            mu_shape_warning: false,
        }
    }
}

/// Residual of the Schrödinger kernel-splitting identity
/// `e^{i(s-t)k²} = E(e^{-itk²}η_k · conj(e^{-isk²}η_k))` with `E(|η|²) = 1`
/// substituted.
pub fn nls_kernel_split_check(k: &Frequency, s: f64, t: f64, params: &EvalParams) -> f64 {
    let k2 = params.phase_sq(k);
    let lhs = Complex64::from_polar(1.0, (s - t) * k2);
    let a = Complex64::from_polar(1.0, -t * k2);
    let b = Complex64::from_polar(1.0, -s * k2).conj();
    (lhs - a * b).norm()
}

/// Wave covariance `E(v_n(t) v_{-n}(t')) = cos((t-t')⟨n⟩)/⟨n⟩²`.
pub fn wave_cov(n: &Frequency, t: f64, t_prime: f64) -> f64 {
    let b = n.bracket();
    ((t - t_prime) * b).cos() / (b * b)
}

/// Time derivative of [`wave_cov`] in its green (differentiated) end:
/// `∂_{t_green} cos((t_other - t_green)⟨n⟩)/⟨n⟩² = sin((t_other - t_green)⟨n⟩)/⟨n⟩`.
pub fn wave_cov_green(n: &Frequency, t_green: f64, t_other: f64) -> f64 {
    let b = n.bracket();
    ((t_other - t_green) * b).sin() / b
}

/// ξ-phase sign: conj 0 carries `e^{-iτk²}`, conj 1 its conjugate.
fn phase_sign(conj: bool) -> f64 {
    if conj {
        1.0
    } else {
        -1.0
    }
}

struct LeafSite {
    freq: Frequency,
    conj: bool,
    hat: bool,
    /// integration variable of the parent node; `None` means the root time
    parent_var: Option<usize>,
}

struct EdgeSite {
    freq: Frequency,
    conj: bool,
    child_var: usize,
    parent_var: Option<usize>,
}

fn collect_tree(
    tree: &DecoratedTree,
) -> (Vec<LeafSite>, Vec<EdgeSite>, Vec<Option<usize>>) {
    let mut leaves = Vec::new();
    let mut edges = Vec::new();
    let mut parents: Vec<Option<usize>> = Vec::new();
    fn walk(
        n: &TreeNode,
        parent_var: Option<usize>,
        leaves: &mut Vec<LeafSite>,
        edges: &mut Vec<EdgeSite>,
        parents: &mut Vec<Option<usize>>,
    ) {
        if n.is_leaf() {
            leaves.push(LeafSite {
                freq: n.freq.clone(),
                conj: n.decor.conj,
                hat: n.decor.hat,
                parent_var,
            });
            return;
        }
        let var = parents.len();
        parents.push(parent_var);
        edges.push(EdgeSite {
            freq: n.freq.clone(),
            conj: n.decor.conj,
            child_var: var,
            parent_var,
        });
        for c in &n.children {
            walk(c, Some(var), leaves, edges, parents);
        }
    }
    for r in tree.root_children() {
        walk(r, None, &mut leaves, &mut edges, &mut parents);
    }
    (leaves, edges, parents)
}

/// Evaluation of a paired decorated tree (explicit, non-recursive form).
pub fn eval_tree(
    tree: &DecoratedTree,
    pairing: &Pairing,
    params: &EvalParams,
    model: Model,
    mode: EtaMode,
) -> EvalResult<EvalOutput> {
    params.validate()?;
    let infos: Vec<_> = tree
        .leaves()
        .iter()
        .map(|(d, f)| (f.clone(), d.conj, d.hat))
        .collect();
    validate_pairing(pairing, &infos, model)?;
    if model == Model::Wave && !tree.is_conj_free() {
        return Err(EvalError::BadWord(
            "wave trees cannot carry conjugation bits".into(),
        ));
    }

    let (leaves, edges, parents) = collect_tree(tree);
    let paired = pairing.paired_ids();
    let mut unpaired: Vec<u32> = Vec::new();
    for id in 0..leaves.len() as u32 {
        if !paired.contains(&id) {
            unpaired.push(id);
        }
    }
    match mode {
        EtaMode::Paired => {
            if let Some(id) = unpaired.first() {
                return Err(EvalError::UnpairedLeaf(leaves[*id as usize].freq.clone()));
            }
        }
        EtaMode::EtaOne | EtaMode::Sampled(_) => {
            if model == Model::Wave && !unpaired.is_empty() {
                return Err(EvalError::UnpairedLeaf(
                    leaves[unpaired[0] as usize].freq.clone(),
                ));
            }
        }
    }

    // Wave cutoff over every decorated node.
    if model == Model::Wave {
        let all_in = leaves.iter().map(|l| &l.freq).chain(edges.iter().map(|e| &e.freq));
        for fr in all_in {
            if !params.in_cutoff(fr) {
                return Ok(EvalOutput::plain(Complex64::new(0.0, 0.0)));
            }
        }
    }

    // Precompute per-site constants.
    let weights: Vec<f64> = leaves
        .iter()
        .map(|l| params.weight.value(&l.freq, params.lattice_l))
        .collect::<EvalResult<_>>()?;
    let eta_of = |id: u32| -> EvalResult<Complex64> {
        let site = &leaves[id as usize];
        match mode {
            EtaMode::EtaOne => Ok(Complex64::new(1.0, 0.0)),
            EtaMode::Sampled(table) => {
                let eta = table.get(&site.freq).copied().ok_or_else(|| {
                    EvalError::BadParams(format!("no η sample for {}", site.freq))
                })?;
                Ok(if site.conj { eta.conj() } else { eta })
            }
            EtaMode::Paired => unreachable!("unpaired leaves rejected above"),
        }
    };
    let mut unpaired_etas = Vec::new();
    for id in &unpaired {
        unpaired_etas.push(eta_of(*id)?);
    }

    let mu2 = params.mu * params.mu;
    let t_final = params.t;
    let time_of = |var: Option<usize>, times: &[f64]| -> f64 {
        match var {
            None => t_final,
            Some(v) => times[v],
        }
    };

    let pairs: Vec<((u32, u32), bool)> = pairing.all_pairs().collect();
    let mut integrand = |times: &[f64]| -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        match model {
            Model::Nls => {
                for e in &edges {
                    let k2 = params.phase_sq(&e.freq);
                    let tc = times[e.child_var];
                    let tp = time_of(e.parent_var, times);
                    let sign = if e.conj { -1.0 } else { 1.0 };
                    // (-1)^c i μ² e^{(-1)^c i (t_c - t_p) k²}
                    acc *= Complex64::new(0.0, sign * mu2)
                        * Complex64::from_polar(1.0, sign * (tc - tp) * k2);
                }
                for ((a, b), class1) in &pairs {
                    let x = &leaves[*a as usize];
                    let y = &leaves[*b as usize];
                    let k2 = params.phase_sq(&x.freq);
                    let tx = time_of(x.parent_var, times);
                    let ty = time_of(y.parent_var, times);
                    let phase = (phase_sign(x.conj) * tx + phase_sign(y.conj) * ty) * k2;
                    let mut v = Complex64::from_polar(1.0, phase);
                    if !class1 {
                        v *= weights[*a as usize];
                    }
                    acc *= v;
                }
                for (pos, id) in unpaired.iter().enumerate() {
                    let l = &leaves[*id as usize];
                    let k2 = params.phase_sq(&l.freq);
                    let tau = time_of(l.parent_var, times);
                    let mut v = Complex64::from_polar(1.0, phase_sign(l.conj) * tau * k2);
                    if !l.hat {
                        v *= weights[*id as usize].sqrt();
                    }
                    acc *= v * unpaired_etas[pos];
                }
            }
            Model::Wave => {
                for e in &edges {
                    let b = e.freq.bracket();
                    let tc = times[e.child_var];
                    let tp = time_of(e.parent_var, times);
                    acc *= ((tp - tc) * b).sin() / b;
                }
                for ((a, b), class1) in &pairs {
                    let x = &leaves[*a as usize];
                    let y = &leaves[*b as usize];
                    let tx = time_of(x.parent_var, times);
                    let ty = time_of(y.parent_var, times);
                    let v = if *class1 {
                        // exactly one green end (validated)
                        if x.hat {
                            wave_cov_green(&x.freq, tx, ty)
                        } else {
                            wave_cov_green(&y.freq, ty, tx)
                        }
                    } else {
                        wave_cov(&x.freq, tx, ty)
                    };
                    acc *= v;
                }
            }
        }
        acc
    };

    let mut value = integrate_tree(params.quad_order, &parents, t_final, &mut integrand);
    let mut quad_disagreement = None;
    if params.quad_check && !parents.is_empty() {
        let half = (params.quad_order / 2).max(2);
        let v2 = integrate_tree(half, &parents, t_final, &mut integrand);
        let d = (value - v2).norm();
        quad_disagreement = Some(d);
        if d > 1e-9 * (1.0 + value.norm()) {
            // bisection fallback; the measured disagreement keeps the
            // warning status
            value = integrate_tree_adaptive(
                params.quad_order,
                &parents,
                t_final,
                1e-12 * (1.0 + value.norm()),
                &mut integrand,
            );
        }
    }
    Ok(EvalOutput {
        value,
        quad_disagreement,
        mu_shape_warning: false,
    })
}

enum SlotTime {
    Zero,
    Var(usize),
    Final,
}

/// Evaluation of a (fully paired) word: nested integral over
/// `0 < t_1 < … < t_{n-1} < t_n = t` of the pair kernels, with green-node
/// letters pinned to time 0 and, for NLS, the prefactor `μ^{2n-2}` and the
/// deterministic factors of unpaired slots.
pub fn eval_word(
    word: &Word,
    params: &EvalParams,
    mode: EtaMode,
) -> EvalResult<EvalOutput> {
    params.validate()?;
    let model = word.model();
    let n = word.len();
    if n == 0 {
        return Ok(EvalOutput::plain(Complex64::new(1.0, 0.0)));
    }

    if model == Model::Wave {
        for l in word.letters() {
            for s in l.slots() {
                if !params.in_cutoff(&s.freq) {
                    return Ok(EvalOutput::plain(Complex64::new(0.0, 0.0)));
                }
            }
        }
    }

    let greens = word.letters().iter().take_while(|l| l.green_node()).count();
    let free = n - greens; // letters with running times; the last sits at t
    let dims = free.saturating_sub(1);

    let letter_time: Vec<SlotTime> = (0..n)
        .map(|i| {
            if i < greens {
                SlotTime::Zero
            } else if i + 1 == n {
                SlotTime::Final
            } else {
                SlotTime::Var(i - greens)
            }
        })
        .collect();
    // When every letter is green there is no final-time letter.
    let letter_time: Vec<SlotTime> = if free == 0 {
        (0..n).map(|_| SlotTime::Zero).collect()
    } else {
        letter_time
    };

    let infos = word.slot_infos();
    let paired = word.pairing().paired_ids();
    let mut unpaired: Vec<u32> = Vec::new();
    for id in 0..infos.len() as u32 {
        if !paired.contains(&id) {
            unpaired.push(id);
        }
    }
    match (model, &mode) {
        (Model::Wave, _) if !unpaired.is_empty() => {
            return Err(EvalError::UnpairedLeaf(
                infos[unpaired[0] as usize].0.clone(),
            ));
        }
        (Model::Nls, EtaMode::Paired) => {
            if let Some(id) = unpaired.first() {
                return Err(EvalError::UnpairedLeaf(infos[*id as usize].0.clone()));
            }
        }
        _ => {}
    }

    let mut unpaired_etas = Vec::new();
    for id in &unpaired {
        let (freq, conj, _) = &infos[*id as usize];
        let eta = match mode {
            EtaMode::EtaOne => Complex64::new(1.0, 0.0),
            EtaMode::Sampled(table) => {
                let e = table
                    .get(freq)
                    .copied()
                    .ok_or_else(|| EvalError::BadParams(format!("no η sample for {freq}")))?;
                if *conj {
                    e.conj()
                } else {
                    e
                }
            }
            EtaMode::Paired => unreachable!(),
        };
        unpaired_etas.push(eta);
    }
    let weights: Vec<f64> = infos
        .iter()
        .map(|(f, _, _)| params.weight.value(f, params.lattice_l))
        .collect::<EvalResult<_>>()?;

    let t_final = params.t;
    let slot_letter: Vec<usize> = (0..infos.len() as u32)
        .map(|id| word.locate(id).0)
        .collect();
    let time_of = |slot: u32, times: &[f64]| -> f64 {
        match letter_time[slot_letter[slot as usize]] {
            SlotTime::Zero => 0.0,
            SlotTime::Var(v) => times[v],
            SlotTime::Final => t_final,
        }
    };

    let pairs: Vec<((u32, u32), bool)> = word.pairing().all_pairs().collect();
    let mut integrand = |times: &[f64]| -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for ((a, b), class1) in &pairs {
            let (fa, ca, ha) = &infos[*a as usize];
            let (_fb, cb, _hb) = &infos[*b as usize];
            let ta = time_of(*a, times);
            let tb = time_of(*b, times);
            match model {
                Model::Nls => {
                    let k2 = params.phase_sq(fa);
                    let phase = (phase_sign(*ca) * ta + phase_sign(*cb) * tb) * k2;
                    let mut v = Complex64::from_polar(1.0, phase);
                    if !class1 {
                        v *= weights[*a as usize];
                    }
                    acc *= v;
                }
                Model::Wave => {
                    let v = if *class1 {
                        if *ha {
                            wave_cov_green(fa, ta, tb)
                        } else {
                            wave_cov_green(fa, tb, ta)
                        }
                    } else {
                        wave_cov(fa, ta, tb)
                    };
                    acc *= v;
                }
            }
        }
        for (pos, id) in unpaired.iter().enumerate() {
            let (freq, conj, hat) = &infos[*id as usize];
            let k2 = params.phase_sq(freq);
            let tau = time_of(*id, times);
            let mut v = Complex64::from_polar(1.0, phase_sign(*conj) * tau * k2);
            if !hat {
                v *= weights[*id as usize].sqrt();
            }
            acc *= v * unpaired_etas[pos];
        }
        acc
    };

    let mut value = integrate_simplex(params.quad_order, dims, t_final, &mut integrand);
    let mut quad_disagreement = None;
    if params.quad_check && dims > 0 {
        let half = (params.quad_order / 2).max(2);
        let v2 = integrate_simplex(half, dims, t_final, &mut integrand);
        let d = (value - v2).norm();
        quad_disagreement = Some(d);
        if d > 1e-9 * (1.0 + value.norm()) {
            value = integrate_simplex_adaptive(
                params.quad_order,
                dims,
                t_final,
                1e-12 * (1.0 + value.norm()),
                &mut integrand,
            );
        }
    }

    let mut mu_shape_warning = false;
    if model == Model::Nls {
        value *= params.mu.powi(2 * (n as i32 - 1));
        mu_shape_warning = word.pairing().class1.len() != n - 1;
    }
    Ok(EvalOutput {
        value,
        quad_disagreement,
        mu_shape_warning,
    })
}

/// Linear extension of [`eval_word`] to word polynomials.
pub fn eval_wordpoly(
    poly: &WordPoly,
    params: &EvalParams,
    mode: EtaMode,
) -> EvalResult<EvalOutput> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut disagreement: Option<f64> = None;
    let mut warning = false;
    for (word, coeff) in poly.terms() {
        let out = eval_word(word, params, mode)?;
        value += coeff.to_complex(params.mu) * out.value;
        if let Some(d) = out.quad_disagreement {
            disagreement = Some(disagreement.map_or(d, |m: f64| m.max(d)));
        }
        warning |= out.mu_shape_warning;
    }
    Ok(EvalOutput {
        value,
        quad_disagreement: disagreement,
        mu_shape_warning: warning,
    })
}
