//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use anomint::algebra::{CentralCharges, Monomial, Scalar, WeylPolynomial};
use nalgebra::DMatrix;
use num_rational::BigRational;
use rand::Rng;

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Random antisymmetric charges with entries `p/q`, `|p| ≤ 9`, `1 ≤ q ≤ 6`.
#[allow(clippy::needless_range_loop)]
pub fn random_charges<R: Rng>(rng: &mut R, n: usize) -> CentralCharges {
    let mut a = vec![vec![rat(0, 1); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rat(rng.random_range(-9..=9), rng.random_range(1..=6));
            a[j][i] = -v.clone();
            a[i][j] = v;
        }
    }
    CentralCharges::new(a).unwrap()
}

pub fn random_antisymmetric<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &g - g.transpose()
}

/// A generator letter: `(is_q, zero-based index)`.
pub type Letter = (bool, usize);

/// Normal orders a word by adjacent transpositions only: `P_i Q_j → Q_j P_i`
/// for `i ≠ j`, `P_i Q_i → Q_i P_i − i`, and sorting within each kind.
pub fn normal_order_word(n: usize, word: &[Letter]) -> BTreeMap<Monomial, Scalar> {
    let mut out = BTreeMap::new();
    let mut stack = vec![(word.to_vec(), Scalar::from_int(1))];
    while let Some((w, c)) = stack.pop() {
        match w.windows(2).position(|p| !p[0].0 && p[1].0) {
            Some(k) => {
                let (pi, qj) = (w[k].1, w[k + 1].1);
                let mut swapped = w.clone();
                swapped.swap(k, k + 1);
                stack.push((swapped, c.clone()));
                if pi == qj {
                    let mut shorter = w.clone();
                    shorter.drain(k..k + 2);
                    stack.push((shorter, &c * &(-Scalar::i())));
                }
            }
            None => {
                let mut m = Monomial::one(n);
                for &(is_q, i) in &w {
                    if is_q {
                        m.q[i] += 1;
                    } else {
                        m.p[i] += 1;
                    }
                }
                let e = out.entry(m).or_insert_with(|| Scalar::from_int(0));
                *e += &c;
            }
        }
    }
    out.retain(|_, c: &mut Scalar| !num_traits::Zero::is_zero(c));
    out
}

pub fn word_poly(n: usize, word: &[Letter]) -> WeylPolynomial {
    WeylPolynomial::from_terms(n, normal_order_word(n, word)).unwrap()
}

/// The product of generators in word order, computed by the library.
pub fn library_word(n: usize, word: &[Letter]) -> WeylPolynomial {
    word.iter().fold(WeylPolynomial::one(n), |acc, &(is_q, i)| {
        let g = if is_q { WeylPolynomial::q(n, i + 1) } else { WeylPolynomial::p(n, i + 1) };
        acc.product(&g.unwrap()).unwrap()
    })
}

/// Frequencies of an antisymmetric matrix from the real symmetric eigenproblem
/// of `−A² = AᵀA`, whose eigenvalues are each `β_k²` twice. Descending.
pub fn beta_oracle(a: &DMatrix<f64>) -> Vec<f64> {
    let s = a.transpose() * a;
    let mut ev: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

/// Frequencies from the Hermitian eigenproblem of `iA`: positive eigenvalues,
/// descending.
pub fn beta_oracle_hermitian(a: &DMatrix<f64>) -> Vec<f64> {
    let h = a.map(|v| nalgebra::Complex::new(0.0, v));
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().filter(|&v| v > 0.0).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}
