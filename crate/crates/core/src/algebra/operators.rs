//! Constructors for the operators of a charged sector.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::charges::CentralCharges;
use super::poly::WeylPolynomial;
use super::scalar::Scalar;
use crate::{Error, Result};

/// Which Hamiltonian to build for a sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianVariant {
    /// `H_α = Σ_i (F'_αi)²`, invariant under the centrally extended group.
    Anomalous,
    /// `H_0 = Σ_i P_i²`, the trivial-sector Hamiltonian.
    Naive,
}

fn half(r: &BigRational) -> Scalar {
    Scalar::real(r / BigRational::from_integer(2.into()))
}

fn shifted_momentum(charges: &CentralCharges, i: usize, sign: i64) -> Result<WeylPolynomial> {
    let n = charges.n();
    let mut out = WeylPolynomial::p(n, i)?;
    for j in 1..=n {
        let a = charges.get(i - 1, j - 1);
        if num_traits::Zero::is_zero(a) {
            continue;
        }
        let c = half(a).scale_int(&sign.into());
        out = out.add(&WeylPolynomial::q(n, j)?.scale(&c))?;
    }
    Ok(out)
}

/// `F_αi = P_i + ½ Σ_j α_ij Q_j` (one-based `i`).
pub fn build_f_alpha(charges: &CentralCharges, i: usize) -> Result<WeylPolynomial> {
    shifted_momentum(charges, i, 1)
}

/// `F'_αi = P_i − ½ Σ_j α_ij Q_j` (one-based `i`).
pub fn build_f_prime_alpha(charges: &CentralCharges, i: usize) -> Result<WeylPolynomial> {
    shifted_momentum(charges, i, -1)
}

pub fn build_h(charges: &CentralCharges, variant: HamiltonianVariant) -> Result<WeylPolynomial> {
    let n = charges.n();
    let mut h = WeylPolynomial::zero(n);
    for i in 1..=n {
        let f = match variant {
            HamiltonianVariant::Anomalous => build_f_prime_alpha(charges, i)?,
            HamiltonianVariant::Naive => WeylPolynomial::p(n, i)?,
        };
        h = h.add(&f.product(&f)?)?;
    }
    Ok(h)
}

/// Oscillator Hamiltonian `Σ_k (I_k² + J_k²)` in canonical form, realized on
/// `l` generator pairs with `I_k = β_k Q_k` and `J_k = P_k`, so that
/// `[I_k, J_m] = i δ_km β_k`.
pub fn canonical_hamiltonian(beta: &[BigRational]) -> Result<WeylPolynomial> {
    let l = beta.len();
    if l == 0 {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    let mut h = WeylPolynomial::zero(l);
    for (k, b) in beta.iter().enumerate() {
        let i = WeylPolynomial::q(l, k + 1)?.scale(&Scalar::real(b.clone()));
        let j = WeylPolynomial::p(l, k + 1)?;
        h = h.add(&i.product(&i)?)?.add(&j.product(&j)?)?;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn f_alpha_planar() {
        let c = CentralCharges::planar(rat(3, 1));
        let parse = |s: &str| WeylPolynomial::parse(s, 2).unwrap();
        assert_eq!(build_f_alpha(&c, 1).unwrap(), parse("1 * P1 + 3/2 * Q2"));
        assert_eq!(build_f_alpha(&c, 2).unwrap(), parse("1 * P2 + -3/2 * Q1"));
        assert_eq!(build_f_prime_alpha(&c, 1).unwrap(), parse("1 * P1 + -3/2 * Q2"));
        assert_eq!(build_f_prime_alpha(&c, 2).unwrap(), parse("1 * P2 + 3/2 * Q1"));
    }

    #[test]
    fn trivial_sector_collapses() {
        let c = CentralCharges::zero(4);
        for i in 1..=4 {
            let p = WeylPolynomial::p(4, i).unwrap();
            assert_eq!(build_f_alpha(&c, i).unwrap(), p);
            assert_eq!(build_f_prime_alpha(&c, i).unwrap(), p);
        }
        assert_eq!(
            build_h(&c, HamiltonianVariant::Anomalous).unwrap(),
            build_h(&c, HamiltonianVariant::Naive).unwrap()
        );
    }

    #[test]
    fn index_out_of_range() {
        let c = CentralCharges::zero(2);
        assert_eq!(build_f_alpha(&c, 3), Err(Error::IndexOutOfRange { index: 3, n: 2 }));
        assert!(build_f_prime_alpha(&c, 0).is_err());
    }

    #[test]
    fn anomalous_hamiltonian_expansion() {
        // F'_1 = P1 - (b/2)Q2 and F'_2 = P2 + (b/2)Q1 involve commuting pairs
        // only, so no normal-ordering constant appears.
        let c = CentralCharges::planar(rat(2, 1));
        let h = build_h(&c, HamiltonianVariant::Anomalous).unwrap();
        let want = WeylPolynomial::parse(
            "1 * Q1^2 + 1 * Q2^2 + 2 * Q1 P2 + -2 * Q2 P1 + 1 * P1^2 + 1 * P2^2",
            2,
        )
        .unwrap();
        assert_eq!(h, want);
        assert!(h.is_self_adjoint());
    }

    #[test]
    fn naive_hamiltonian_anomaly_is_minus_i_alpha_p() {
        let b = rat(5, 3);
        let c = CentralCharges::planar(b.clone());
        let h0 = build_h(&c, HamiltonianVariant::Naive).unwrap();
        let f1 = build_f_alpha(&c, 1).unwrap();
        let got = h0.commutator(&f1).unwrap();
        let want = WeylPolynomial::p(2, 2).unwrap().scale(&Scalar::imag(-b));
        assert_eq!(got, want);
    }

    #[test]
    fn canonical_hamiltonian_terms() {
        let h = canonical_hamiltonian(&[rat(1, 2)]).unwrap();
        assert_eq!(h, WeylPolynomial::parse("1/4 * Q1^2 + 1 * P1^2", 1).unwrap());
        assert!(canonical_hamiltonian(&[]).is_err());
    }
}
