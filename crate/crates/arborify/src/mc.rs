//! Monte Carlo verification of the Wick formula on sampled Gaussian data.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EvalError, EvalResult};
use crate::eval::{eval_tree, EtaMode, EvalParams};
use crate::pairing::{wick_pairings, Model, Pairing};
use crate::tree::DecoratedTree;

#[derive(Clone, Debug)]
pub struct WickCheck {
    pub mc_mean: Complex64,
    pub exact: Complex64,
    pub stderr: f64,
    pub z: f64,
    pub samples: usize,
}

/// Standard complex Gaussian with `E|η|² = 1`: independent real and
/// imaginary parts of variance 1/2 (Box–Muller).
pub fn complex_std_normal(rng: &mut impl Rng) -> Complex64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt() * std::f64::consts::SQRT_2.recip();
    let phi = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * phi.cos(), r * phi.sin())
}

/// Compare the Monte Carlo mean of `Π T` over sampled η against the Wick
/// expansion `Σ_pairings Π T`, returning a z-score.
pub fn mc_wick_check(
    tree: &DecoratedTree,
    params: &EvalParams,
    samples: usize,
) -> EvalResult<WickCheck> {
    let leaves = tree.leaves();
    if leaves.iter().any(|(d, _)| d.hat) {
        return Err(EvalError::BadWord(
            "Wick moments are taken on plain (unhatted) leaves".into(),
        ));
    }
    let infos: Vec<_> = leaves.iter().map(|(d, f)| (f.clone(), d.conj)).collect();

    // Exact side: sum over model-valid full pairings (empty sum for an odd
    // number of Gaussian factors).
    let mut exact = Complex64::new(0.0, 0.0);
    for p in wick_pairings(&infos, Some(Model::Nls), false) {
        exact += eval_tree(tree, &p, params, Model::Nls, EtaMode::Paired)?.value;
    }

    // Monte Carlo side.
    let freqs: BTreeSet<_> = infos.iter().map(|(f, _)| f.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let empty = Pairing::empty();
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let table: BTreeMap<_, _> = freqs
            .iter()
            .map(|f| (f.clone(), complex_std_normal(&mut rng)))
            .collect();
        let v = eval_tree(tree, &empty, params, Model::Nls, EtaMode::Sampled(&table))?.value;
        values.push(v);
    }
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<Complex64>() / n;
    let var = values
        .iter()
        .map(|v| (v - mean).norm_sqr())
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let stderr = (var / n).sqrt();
    let diff = (mean - exact).norm();
    let z = if stderr > 0.0 {
        diff / stderr
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(WickCheck {
        mc_mean: mean,
        exact,
        stderr,
        z,
        samples,
    })
}
