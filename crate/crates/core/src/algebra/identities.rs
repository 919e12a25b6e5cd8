//! Exact verification of the commutator identities of a charged sector.

use num_rational::BigRational;
use serde::Serialize;

use super::charges::CentralCharges;
use super::operators::{build_f_alpha, build_f_prime_alpha, build_h, HamiltonianVariant};
use super::poly::WeylPolynomial;
use super::scalar::Scalar;
use crate::Result;

/// One residual polynomial; `indices` are one-based.
#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub indices: Vec<usize>,
    #[serde(serialize_with = "serialize_poly")]
    pub residual: WeylPolynomial,
}

fn serialize_poly<S: serde::Serializer>(p: &WeylPolynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub identity: &'static str,
    pub residuals: Vec<Residual>,
}

impl IdentityCheck {
    pub fn is_zero(&self) -> bool {
        self.residuals.iter().all(|r| r.residual.is_zero())
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.residual.is_zero())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_zero(&self) -> bool {
        self.checks.iter().all(IdentityCheck::is_zero)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const ANOMALY: &str = "naive_anomaly";

/// Computes the eight residual families of a sector. Every residual is
/// exactly zero when the algebra is consistent.
///
/// The naive-Hamiltonian anomaly is checked as `[H_0, F_αi] + i α_ij P_j`,
/// the value forced by `[P_i, Q_j] = -i δ_ij`; see [`printed_anomaly_residuals`]
/// for the opposite sign.
pub fn verify_identity_suite(charges: &CentralCharges) -> Result<IdentityReport> {
    let n = charges.n();
    let f: Vec<_> = (1..=n).map(|i| build_f_alpha(charges, i)).collect::<Result<_>>()?;
    let fp: Vec<_> = (1..=n).map(|i| build_f_prime_alpha(charges, i)).collect::<Result<_>>()?;
    let q: Vec<_> = (1..=n).map(|i| WeylPolynomial::q(n, i)).collect::<Result<_>>()?;
    let p: Vec<_> = (1..=n).map(|i| WeylPolynomial::p(n, i)).collect::<Result<_>>()?;
    let h_alpha = build_h(charges, HamiltonianVariant::Anomalous)?;
    let h0 = build_h(charges, HamiltonianVariant::Naive)?;
    let i_alpha = |i: usize, j: usize| WeylPolynomial::constant(n, Scalar::imag(charges.get(i, j).clone()));
    let i_unit = Scalar::i();

    let pairs = |mut g: Box<dyn FnMut(usize, usize) -> Result<WeylPolynomial> + '_>| -> Result<Vec<Residual>> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(Residual { indices: vec![i + 1, j + 1], residual: g(i, j)? });
            }
        }
        Ok(out)
    };
    let singles = |mut g: Box<dyn FnMut(usize) -> Result<WeylPolynomial> + '_>| -> Result<Vec<Residual>> {
        (0..n).map(|i| Ok(Residual { indices: vec![i + 1], residual: g(i)? })).collect()
    };
    // Σ_j α_ij X_j
    let contract = |i: usize, xs: &[WeylPolynomial]| -> Result<WeylPolynomial> {
        let mut acc = WeylPolynomial::zero(n);
        for (j, x) in xs.iter().enumerate() {
            acc = acc.add(&x.scale(&Scalar::real(charges.get(i, j).clone())))?;
        }
        Ok(acc)
    };

    let mut checks = Vec::with_capacity(8);
    checks.push(IdentityCheck {
        name: "f_f_bracket",
        identity: "[F_ai, F_aj] - i a_ij",
        residuals: pairs(Box::new(|i, j| f[i].commutator(&f[j])?.sub(&i_alpha(i, j))))?,
    });
    checks.push(IdentityCheck {
        name: "fprime_f_commute",
        identity: "[F'_ai, F_aj]",
        residuals: pairs(Box::new(|i, j| fp[i].commutator(&f[j])))?,
    });
    checks.push(IdentityCheck {
        name: "fprime_fprime_bracket",
        identity: "[F'_ai, F'_aj] + i a_ij",
        residuals: pairs(Box::new(|i, j| fp[i].commutator(&fp[j])?.add(&i_alpha(i, j))))?,
    });
    checks.push(IdentityCheck {
        name: "f_q_ccr",
        identity: "[F_ai, Q_j] + i d_ij",
        residuals: pairs(Box::new(|i, j| {
            let c = f[i].commutator(&q[j])?;
            if i == j {
                c.add(&WeylPolynomial::constant(n, i_unit.clone()))
            } else {
                Ok(c)
            }
        }))?,
    });
    checks.push(IdentityCheck {
        name: "conservation",
        identity: "[H_a, F_ai]",
        residuals: singles(Box::new(|i| h_alpha.commutator(&f[i])))?,
    });
    checks.push(IdentityCheck {
        name: ANOMALY,
        identity: "[H_0, F_ai] + i a_ij P_j",
        residuals: singles(Box::new(|i| h0.commutator(&f[i])?.add(&contract(i, &p)?.scale(&i_unit))))?,
    });
    checks.push(IdentityCheck {
        name: "angle_velocity",
        identity: "i[H_a, Q_i] - 2 F'_ai",
        residuals: singles(Box::new(|i| {
            h_alpha.commutator(&q[i])?.scale(&i_unit).sub(&fp[i].scale(&Scalar::from_int(2)))
        }))?,
    });
    checks.push(IdentityCheck {
        name: "angle_acceleration",
        identity: "2i[H_a, F'_ai] + 4 a_ij F'_aj",
        residuals: singles(Box::new(|i| {
            let lhs = h_alpha.commutator(&fp[i])?.scale(&Scalar::imag(BigRational::from_integer(2.into())));
            lhs.add(&contract(i, &fp)?.scale(&Scalar::from_int(4)))
        }))?,
    });
    Ok(IdentityReport { n, checks })
}

/// Residuals `[H_0, F_αi] − i α_ij P_j` of the anomaly written with a `+i`
/// prefactor. Under `[P_i, Q_j] = -i δ_ij` these equal `-2i α_ij P_j`, so they
/// vanish only in the trivial sector.
pub fn printed_anomaly_residuals(charges: &CentralCharges) -> Result<Vec<Residual>> {
    let n = charges.n();
    let h0 = build_h(charges, HamiltonianVariant::Naive)?;
    (0..n)
        .map(|i| {
            let mut rhs = WeylPolynomial::zero(n);
            for j in 0..n {
                rhs = rhs.add(&WeylPolynomial::p(n, j + 1)?.scale(&Scalar::imag(charges.get(i, j).clone())))?;
            }
            let residual = h0.commutator(&build_f_alpha(charges, i + 1)?)?.sub(&rhs)?;
            Ok(Residual { indices: vec![i + 1], residual })
        })
        .collect()
}
