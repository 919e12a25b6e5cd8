use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::scalar::Scalar;
use crate::{Error, Result};

/// Normal-ordered monomial `Q_1^{a_1} … Q_n^{a_n} P_1^{b_1} … P_n^{b_n}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub q: Vec<u32>,
    pub p: Vec<u32>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial { q: vec![0; n], p: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn degree(&self) -> u32 {
        self.q.iter().chain(&self.p).sum()
    }

    pub fn is_one(&self) -> bool {
        self.degree() == 0
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, exps) in [('Q', &self.q), ('P', &self.p)] {
            for (k, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                write!(f, "{}{}", name, k + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Exact polynomial in the canonical generators, stored as a sparse map from
/// normal-ordered monomials to nonzero coefficients.
///
/// The only nontrivial relation is `P_i Q_i = Q_i P_i - i`, i.e.
/// `[P_i, Q_j] = -i δ_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylPolynomial {
    n: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl WeylPolynomial {
    pub fn zero(n: usize) -> Self {
        WeylPolynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut p = WeylPolynomial::zero(n);
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        WeylPolynomial::constant(n, Scalar::one())
    }

    /// `Q_k` with a one-based index.
    pub fn q(n: usize, k: usize) -> Result<Self> {
        Self::generator(n, k, true)
    }

    /// `P_k` with a one-based index.
    pub fn p(n: usize, k: usize) -> Result<Self> {
        Self::generator(n, k, false)
    }

    fn generator(n: usize, k: usize, is_q: bool) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        let mut m = Monomial::one(n);
        if is_q {
            m.q[k - 1] = 1;
        } else {
            m.p[k - 1] = 1;
        }
        let mut out = WeylPolynomial::zero(n);
        out.add_term(m, Scalar::one());
        Ok(out)
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Result<Self> {
        let mut out = WeylPolynomial::zero(n);
        for (m, c) in terms {
            if m.q.len() != n || m.p.len() != n {
                return Err(Error::GeneratorCountMismatch { left: n, right: m.n() });
            }
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GeneratorCountMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = WeylPolynomial::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Normal-ordered product `self · other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        let mut out = WeylPolynomial::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                for (m, k) in monomial_product(ma, mb) {
                    out.add_term(m, c.scale_int(&k.0).mul_phase(k.1));
                }
            }
        }
        Ok(out)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.product(other)?.sub(&other.product(self)?)
    }

    /// Formal adjoint: conjugate coefficients and reverse every word. Under
    /// `Q† = Q`, `P† = P` the reversed word `P^b Q^a` is re-normal-ordered.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = WeylPolynomial::zero(n);
        for (m, c) in &self.terms {
            let p_part = Monomial { q: vec![0; n], p: m.p.clone() };
            let q_part = Monomial { q: m.q.clone(), p: vec![0; n] };
            for (mm, k) in monomial_product(&p_part, &q_part) {
                out.add_term(mm, c.conj().scale_int(&k.0).mul_phase(k.1));
            }
        }
        out
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    /// Parses the text rendering produced by `Display`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let t = text.trim();
        let mut out = WeylPolynomial::zero(n);
        if t == "0" {
            return Ok(out);
        }
        for term in t.split(" + ") {
            let (coeff, mono) = match term.split_once(" * ") {
                Some((c, m)) => (c, Some(m)),
                None => (term, None),
            };
            let c = Scalar::parse(coeff)?;
            let mut m = Monomial::one(n);
            for factor in mono.into_iter().flat_map(str::split_whitespace) {
                let (name, rest) = factor.split_at(factor.chars().next().map_or(0, char::len_utf8));
                let (idx, exp) = match rest.split_once('^') {
                    Some((i, e)) => (i, e),
                    None => (rest, "1"),
                };
                let bad = || Error::Parse(format!("bad factor `{factor}`"));
                let idx: usize = idx.parse().map_err(|_| bad())?;
                let exp: u32 = exp.parse().map_err(|_| bad())?;
                if idx == 0 || idx > n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
                match name {
                    "Q" => m.q[idx - 1] += exp,
                    "P" => m.p[idx - 1] += exp,
                    _ => return Err(bad()),
                }
            }
            out.add_term(m, c);
        }
        Ok(out)
    }
}

/// Multiplier attached to each normal-ordered term: an integer and a power
/// of `-i`.
struct TermFactor(BigInt, u32);

trait MulPhase {
    fn mul_phase(self, k: u32) -> Scalar;
}

impl MulPhase for Scalar {
    fn mul_phase(self, k: u32) -> Scalar {
        &self * &Scalar::minus_i_pow(k)
    }
}

/// Normal orders `(Q^a P^b)(Q^c P^d)`.
///
/// Per index, `P^b Q^c = Σ_k k! C(b,k) C(c,k) (-i)^k Q^{c-k} P^{b-k}`; distinct
/// indices commute, so the full product is the Cartesian product over the
/// per-index expansions.
fn monomial_product(a: &Monomial, b: &Monomial) -> Vec<(Monomial, TermFactor)> {
    let n = a.n();
    let mut acc = vec![(
        Monomial {
            q: a.q.iter().zip(&b.q).map(|(x, y)| x + y).collect(),
            p: a.p.iter().zip(&b.p).map(|(x, y)| x + y).collect(),
        },
        TermFactor(BigInt::one(), 0),
    )];
    for i in 0..n {
        let kmax = a.p[i].min(b.q[i]);
        if kmax == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(acc.len() * (kmax as usize + 1));
        for (m, f) in &acc {
            for k in 0..=kmax {
                let mut mm = m.clone();
                mm.q[i] -= k;
                mm.p[i] -= k;
                let w = factorial(k) * binomial(a.p[i], k) * binomial(b.q[i], k);
                next.push((mm, TermFactor(&f.0 * w, f.1 + k)));
            }
        }
        acc = next;
    }
    acc
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, v| acc * v)
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * (n - j) / (j + 1))
}

impl fmt::Display for WeylPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c} * {m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: usize) -> WeylPolynomial {
        WeylPolynomial::q(2, k).unwrap()
    }
    fn p(k: usize) -> WeylPolynomial {
        WeylPolynomial::p(2, k).unwrap()
    }

    #[test]
    fn p_times_q_rewrites() {
        let got = p(1).product(&q(1)).unwrap();
        let want = WeylPolynomial::parse("1 * Q1 P1 + -1i", 2).unwrap();
        assert_eq!(got, want);
        assert_eq!(got.to_string(), "-1i + 1 * Q1 P1");
    }

    #[test]
    fn q_squared() {
        assert_eq!(q(1).product(&q(1)).unwrap().to_string(), "1 * Q1^2");
    }

    #[test]
    fn creation_times_annihilation() {
        // P^2 - iPQ + iQP + Q^2 = P^2 + Q^2 - i(QP - i) + iQP = P^2 + Q^2 - 1
        let i = Scalar::i();
        let a = p(1).add(&q(1).scale(&i)).unwrap();
        let b = p(1).sub(&q(1).scale(&i)).unwrap();
        let got = a.product(&b).unwrap();
        let want = WeylPolynomial::parse("-1 + 1 * Q1^2 + 1 * P1^2", 2).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn canonical_commutator() {
        let c = p(1).commutator(&q(1)).unwrap();
        assert_eq!(c, WeylPolynomial::constant(2, -Scalar::i()));
        assert!(p(1).commutator(&q(2)).unwrap().is_zero());
    }

    #[test]
    fn higher_powers() {
        // P^2 Q^2 = Q^2 P^2 - 4i Q P - 2
        let p2 = p(1).product(&p(1)).unwrap();
        let q2 = q(1).product(&q(1)).unwrap();
        let got = p2.product(&q2).unwrap();
        let want = WeylPolynomial::parse("-2 + -4i * Q1 P1 + 1 * Q1^2 P1^2", 2).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = WeylPolynomial::q(2, 1).unwrap();
        let b = WeylPolynomial::q(3, 1).unwrap();
        assert_eq!(a.product(&b), Err(Error::GeneratorCountMismatch { left: 2, right: 3 }));
        assert!(WeylPolynomial::q(2, 3).is_err());
        assert!(WeylPolynomial::p(2, 0).is_err());
    }

    #[test]
    fn adjoint_of_qp() {
        // (QP)† = PQ = QP - i
        let qp = q(1).product(&p(1)).unwrap();
        assert_eq!(qp.adjoint(), p(1).product(&q(1)).unwrap());
        assert!(!qp.is_self_adjoint());
        let sym = qp.add(&qp.adjoint()).unwrap();
        assert!(sym.is_self_adjoint());
    }

    #[test]
    fn text_round_trip() {
        let s = "(1/2-3i) + 2/3 * Q1 + -1i * Q1^2 P2^3";
        let poly = WeylPolynomial::parse(s, 2).unwrap();
        assert_eq!(WeylPolynomial::parse(&poly.to_string(), 2).unwrap(), poly);
        assert!(WeylPolynomial::parse("1 * Q3", 2).is_err());
        assert!(WeylPolynomial::parse("1 * X1", 2).is_err());
        assert!(WeylPolynomial::parse("0", 2).unwrap().is_zero());
    }
}
