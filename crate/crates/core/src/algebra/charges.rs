use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::scalar::rational_to_f64;
use crate::{Error, Result};

/// Real antisymmetric matrix of central charges `α`, defining the brackets
/// `[X_i, X_j] = i α_ij` of the centrally extended abelian algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralCharges {
    n: usize,
    alpha: Vec<Vec<BigRational>>,
}

impl CentralCharges {
    /// Validates exact antisymmetry (including a zero diagonal).
    pub fn new(alpha: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::LengthMismatch { expected: 1, got: 0 });
        }
        for (r, row) in alpha.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            for (c, v) in row.iter().enumerate().take(r + 1) {
                if *v != -alpha[c][r].clone() {
                    return Err(Error::NotAntisymmetric { row: r, col: c });
                }
            }
        }
        Ok(CentralCharges { n, alpha })
    }

    /// The trivial sector `α = 0` on `n` generators.
    pub fn zero(n: usize) -> Self {
        CentralCharges { n, alpha: vec![vec![BigRational::zero(); n]; n] }
    }

    /// `n = 2` with `α_12 = b`.
    pub fn planar(b: BigRational) -> Self {
        let mut c = CentralCharges::zero(2);
        c.alpha[0][1] = b.clone();
        c.alpha[1][0] = -b;
        c
    }

    /// Convenience constructor from integer numerator/denominator pairs.
    pub fn from_ratios(entries: &[Vec<(i64, i64)>]) -> Result<Self> {
        CentralCharges::new(
            entries
                .iter()
                .map(|row| row.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `α_ij` with zero-based indices.
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.alpha[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.alpha
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().flatten().all(Zero::is_zero)
    }

    pub fn max_abs(&self) -> BigRational {
        self.alpha.iter().flatten().map(|v| v.abs()).max().unwrap_or_else(BigRational::zero)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| rational_to_f64(&self.alpha[i][j]))
    }
}
