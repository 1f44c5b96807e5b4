//! Lattice frequencies: exact integer vectors.
//!
//! Frequencies stay integral through every algebraic operation; the lattice
//! scale `L` enters only when a phase is evaluated numerically, as `k/L`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A signed integer lattice vector of length `d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Frequency(pub Vec<i64>);

impl Frequency {
    pub fn new(components: Vec<i64>) -> Self {
        Frequency(components)
    }

    pub fn zero(dim: usize) -> Self {
        Frequency(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0)
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// Exact squared Euclidean norm of the integer vector.
    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    /// Squared norm of the physical frequency `k / L`.
    pub fn phys_norm_sq(&self, lattice_l: f64) -> f64 {
        self.norm_sq() as f64 / (lattice_l * lattice_l)
    }

    /// The dispersion weight `⟨n⟩ = (1 + |n|²)^{1/2}` on the integer lattice.
    pub fn bracket(&self) -> f64 {
        (1.0 + self.norm_sq() as f64).sqrt()
    }

    /// Signed sum `Σ (-1)^{sign_i} f_i` of a list of frequencies.
    pub fn signed_sum<'a>(terms: impl IntoIterator<Item = (&'a Frequency, bool)>) -> Frequency {
        let mut acc: Option<Vec<i64>> = None;
        for (f, negate) in terms {
            let acc = acc.get_or_insert_with(|| vec![0; f.dim()]);
            for (a, c) in acc.iter_mut().zip(f.0.iter()) {
                *a += if negate { -c } else { *c };
            }
        }
        Frequency(acc.unwrap_or_default())
    }
}

impl Add for &Frequency {
    type Output = Frequency;
    fn add(self, rhs: &Frequency) -> Frequency {
        debug_assert_eq!(self.dim(), rhs.dim());
        Frequency(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Frequency {
    type Output = Frequency;
    fn sub(self, rhs: &Frequency) -> Frequency {
        debug_assert_eq!(self.dim(), rhs.dim());
        Frequency(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        Frequency(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
