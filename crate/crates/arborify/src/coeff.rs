//! Exact scalar coefficients: Gaussian rationals times a power of `μ²`.

use std::fmt;

use num::{BigRational, One, Signed, Zero};
use num_complex::Complex64;

use crate::error::{AlgebraError, AlgebraResult};

/// `(re + im·i) · μ^{2·mu2}` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactCoeff {
    pub re: BigRational,
    pub im: BigRational,
    pub mu2: u32,
}

impl ExactCoeff {
    pub fn zero() -> Self {
        ExactCoeff {
            re: BigRational::zero(),
            im: BigRational::zero(),
            mu2: 0,
        }
    }

    pub fn one() -> Self {
        ExactCoeff {
            re: BigRational::one(),
            im: BigRational::zero(),
            mu2: 0,
        }
    }

    pub fn i() -> Self {
        ExactCoeff {
            re: BigRational::zero(),
            im: BigRational::one(),
            mu2: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        ExactCoeff {
            re: BigRational::from_integer(n.into()),
            im: BigRational::zero(),
            mu2: 0,
        }
    }

    pub fn new(re: BigRational, im: BigRational, mu2: u32) -> Self {
        ExactCoeff { re, im, mu2 }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn neg(&self) -> Self {
        ExactCoeff {
            re: -self.re.clone(),
            im: -self.im.clone(),
            mu2: self.mu2,
        }
    }

    /// Product; μ-powers add.
    pub fn mul(&self, rhs: &ExactCoeff) -> Self {
        ExactCoeff {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
            mu2: self.mu2 + rhs.mu2,
        }
    }

    /// Sum. Adding terms carrying distinct μ-powers is not representable and
    /// reports an error; zero absorbs either power.
    pub fn add(&self, rhs: &ExactCoeff) -> AlgebraResult<Self> {
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if self.mu2 != rhs.mu2 {
            return Err(AlgebraError::MuMismatch(self.mu2, rhs.mu2));
        }
        Ok(ExactCoeff {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
            mu2: self.mu2,
        })
    }

    /// Numeric value at a given μ.
    pub fn to_complex(&self, mu: f64) -> Complex64 {
        let r = ratio_to_f64(&self.re);
        let i = ratio_to_f64(&self.im);
        Complex64::new(r, i) * mu.powi(2 * self.mu2 as i32)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    // Desk-scale rationals; fall back to string parsing only for huge terms.
    let n = r.numer();
    let d = r.denom();
    match (n.to_string().parse::<f64>(), d.to_string().parse::<f64>()) {
        (Ok(nf), Ok(df)) => nf / df,
        _ => f64::NAN,
    }
}

impl fmt::Display for ExactCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.re.is_zero() {
            parts.push(format!("{}", self.re));
        }
        if !self.im.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            let mag = self.im.abs();
            if mag.is_one() {
                parts.push(format!("{sign}i"));
            } else {
                parts.push(format!("{sign}{mag}i"));
            }
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        let body = parts.join("");
        let body = body.strip_prefix('+').unwrap_or(&body);
        if self.mu2 > 0 {
            write!(f, "{} mu^{}", body, 2 * self.mu2)
        } else {
            write!(f, "{body}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let c = ExactCoeff::i().mul(&ExactCoeff::i());
        assert_eq!(c, ExactCoeff::from_int(-1));
    }

    #[test]
    fn mu_powers_add_on_mul_and_block_on_add() {
        let a = ExactCoeff {
            mu2: 1,
            ..ExactCoeff::one()
        };
        let b = ExactCoeff {
            mu2: 2,
            ..ExactCoeff::one()
        };
        assert_eq!(a.mul(&b).mu2, 3);
        assert!(a.add(&b).is_err());
        assert_eq!(a.add(&ExactCoeff::zero()).unwrap(), a);
    }

    #[test]
    fn numeric_value_applies_mu() {
        let a = ExactCoeff {
            mu2: 1,
            ..ExactCoeff::i()
        };
        let v = a.to_complex(2.0);
        assert_eq!(v, Complex64::new(0.0, 4.0));
    }
}
