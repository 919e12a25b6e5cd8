//! Exact oscillator levels `E_ν = Σ_k ε_k (ν_k + ½)` and their arithmetic
//! degeneracies.
//!
//! Two spacing conventions are supported. `Paper` uses `ε_k = β_k²`; `Oracle`
//! uses `ε_k = 2|β_k|`, the spacing found by diagonalizing `I² + J²` with
//! `[I, J] = iβ` numerically (see [`crate::fock`]).
//!
//! All counting is done on integers: every energy is a multiple of the unit
//! `1/(2L)` where `L` is the lcm of the spacing denominators.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::io::{ser_rational, ser_rationals};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Paper,
    Oracle,
}

impl std::str::FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Normalization::Paper),
            "oracle" => Ok(Normalization::Oracle),
            _ => Err(Error::Parse(format!("unknown normalization `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeQuanta {
    #[serde(serialize_with = "ser_rationals")]
    pub epsilon: Vec<BigRational>,
    #[serde(serialize_with = "ser_rational")]
    pub zero_point: BigRational,
    pub normalization: Normalization,
    #[serde(skip)]
    scaled: Scaled,
}

/// Integer image of the spacings in units of `1/den`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Scaled {
    den: BigInt,
    eps: Vec<i128>,
    zero: i128,
}

impl ModeQuanta {
    pub fn l(&self) -> usize {
        self.epsilon.len()
    }

    /// Builds quanta from spacings directly (they must be positive).
    pub fn from_spacings(epsilon: Vec<BigRational>, normalization: Normalization) -> Result<Self> {
        if epsilon.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, got: 0 });
        }
        if let Some(k) = epsilon.iter().position(|e| !e.is_positive()) {
            return Err(Error::ZeroBeta(k));
        }
        let two = BigInt::from(2);
        let l = epsilon.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let den = &l * &two;
        let eps = epsilon
            .iter()
            .map(|e| (e * BigRational::from_integer(den.clone())).to_integer().to_i128().ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        let zero = eps.iter().try_fold(0i128, |a, &e| a.checked_add(e)).ok_or(Error::Overflow)? / 2;
        let zero_point = epsilon.iter().fold(BigRational::zero(), |a, e| a + e) / BigRational::from_integer(two);
        Ok(ModeQuanta { epsilon, zero_point, normalization, scaled: Scaled { den, eps, zero } })
    }

    /// Lowest level, equal to the zero point.
    pub fn ground(&self) -> &BigRational {
        &self.zero_point
    }

    /// Exact level of an occupation tuple.
    pub fn energy(&self, nu: &[u32]) -> BigRational {
        self.epsilon
            .iter()
            .zip(nu)
            .fold(self.zero_point.clone(), |acc, (e, &n)| acc + e * BigRational::from_integer(n.into()))
    }

    /// `E` in scaled units, or `None` when it is not a multiple of the unit.
    fn scale_exact(&self, e: &BigRational) -> Option<i128> {
        let s = e * BigRational::from_integer(self.scaled.den.clone());
        if s.is_integer() {
            s.to_integer().to_i128()
        } else {
            None
        }
    }

    fn scale_floor(&self, e: &BigRational) -> Option<i128> {
        (e * BigRational::from_integer(self.scaled.den.clone())).floor().to_integer().to_i128()
    }

    fn unscale(&self, v: i128) -> BigRational {
        BigRational::new(v.into(), self.scaled.den.clone())
    }

    /// Mode indices ordered by decreasing spacing (stable).
    fn search_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.l()).collect();
        order.sort_by(|&a, &b| self.scaled.eps[b].cmp(&self.scaled.eps[a]).then(a.cmp(&b)));
        order
    }
}

pub fn mode_quanta(beta: &[BigRational], normalization: Normalization) -> Result<ModeQuanta> {
    if let Some(k) = beta.iter().position(Zero::is_zero) {
        return Err(Error::ZeroBeta(k));
    }
    let epsilon = beta
        .iter()
        .map(|b| match normalization {
            Normalization::Paper => b * b,
            Normalization::Oracle => b.abs() * BigRational::from_integer(2.into()),
        })
        .collect();
    ModeQuanta::from_spacings(epsilon, normalization)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Level {
    #[serde(rename = "E", serialize_with = "ser_rational")]
    pub energy: BigRational,
    pub degeneracy: usize,
    pub tuples: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumTable {
    pub quanta: ModeQuanta,
    #[serde(rename = "E_max", serialize_with = "ser_rational")]
    pub e_max: BigRational,
    #[serde(rename = "entries")]
    pub levels: Vec<Level>,
}

impl SpectrumTable {
    pub fn total_states(&self) -> usize {
        self.levels.iter().map(|l| l.degeneracy).sum()
    }

    /// `(E, degeneracy)` pairs in ascending order.
    pub fn multiset(&self) -> Vec<(BigRational, usize)> {
        self.levels.iter().map(|l| (l.energy.clone(), l.degeneracy)).collect()
    }

    /// Tab-separated rendering: `E`, `degeneracy`, `tuples` (`(a,b);(c,d)`).
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("E\tdegeneracy\ttuples\n");
        for lv in &self.levels {
            let tuples: Vec<String> = lv
                .tuples
                .iter()
                .map(|t| format!("({})", t.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
                .collect();
            let _ = writeln!(out, "{}\t{}\t{}", lv.energy, lv.degeneracy, tuples.join(";"));
        }
        out
    }

    /// Level-diagram CSV for plotting: `E` as a float, `degeneracy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("E,degeneracy\n");
        for lv in &self.levels {
            let _ = writeln!(out, "{},{}", crate::algebra::rational_to_f64(&lv.energy), lv.degeneracy);
        }
        out
    }
}

/// Every level up to and including `e_max`, each with its full list of
/// occupation tuples (lexicographic). An `e_max` below the ground level gives
/// an empty table.
pub fn enumerate_levels(quanta: &ModeQuanta, e_max: &BigRational) -> Result<SpectrumTable> {
    let cap = quanta.scale_floor(e_max).ok_or(Error::Overflow)?;
    let budget = cap - quanta.scaled.zero;
    let mut by_level: BTreeMap<i128, Vec<Vec<u32>>> = BTreeMap::new();
    if budget >= 0 {
        let order = quanta.search_order();
        let mut nu = vec![0u32; quanta.l()];
        dfs_all(&quanta.scaled.eps, &order, 0, budget, 0, &mut nu, &mut by_level);
    }
    let levels = by_level
        .into_iter()
        .map(|(e, mut tuples)| {
            tuples.sort();
            Level { energy: quanta.unscale(e + quanta.scaled.zero), degeneracy: tuples.len(), tuples }
        })
        .collect();
    Ok(SpectrumTable { quanta: quanta.clone(), e_max: e_max.clone(), levels })
}

fn dfs_all(
    eps: &[i128],
    order: &[usize],
    depth: usize,
    budget: i128,
    used: i128,
    nu: &mut [u32],
    out: &mut BTreeMap<i128, Vec<Vec<u32>>>,
) {
    if depth == order.len() {
        out.entry(used).or_default().push(nu.to_vec());
        return;
    }
    let k = order[depth];
    let mut n = 0u32;
    let mut spent = used;
    while spent <= budget {
        nu[k] = n;
        dfs_all(eps, order, depth + 1, budget, spent, nu, out);
        n += 1;
        spent += eps[k];
    }
    nu[k] = 0;
}

/// Number of occupation tuples at exactly `E`, with the tuples themselves
/// (lexicographic).
pub fn degeneracy_of(quanta: &ModeQuanta, energy: &BigRational) -> (usize, Vec<Vec<u32>>) {
    let Some(target) = quanta.scale_exact(energy) else {
        return (0, Vec::new());
    };
    let rest = target - quanta.scaled.zero;
    if rest < 0 {
        return (0, Vec::new());
    }
    let order = quanta.search_order();
    let mut nu = vec![0u32; quanta.l()];
    let mut tuples = Vec::new();
    dfs_exact(&quanta.scaled.eps, &order, 0, rest, &mut nu, &mut tuples);
    tuples.sort();
    (tuples.len(), tuples)
}

fn dfs_exact(eps: &[i128], order: &[usize], depth: usize, rest: i128, nu: &mut [u32], out: &mut Vec<Vec<u32>>) {
    let k = order[depth];
    if depth + 1 == order.len() {
        if rest % eps[k] == 0 {
            nu[k] = (rest / eps[k]) as u32;
            out.push(nu.to_vec());
            nu[k] = 0;
        }
        return;
    }
    let mut n = 0u32;
    let mut left = rest;
    while left >= 0 {
        nu[k] = n;
        dfs_exact(eps, order, depth + 1, left, nu, out);
        n += 1;
        left -= eps[k];
    }
    nu[k] = 0;
}

/// Independent count of solutions by exhaustive iteration over the box
/// `0 ≤ ν_k ≤ (E − E_0)/ε_k`. Uses its own integer scaling (including the
/// denominator of `E`) so it shares no arithmetic with [`degeneracy_of`].
pub fn brute_force_count(quanta: &ModeQuanta, energy: &BigRational) -> u64 {
    let rest = energy - &quanta.zero_point;
    if rest.is_negative() {
        return 0;
    }
    let den = quanta.epsilon.iter().fold(rest.denom().clone(), |acc, e| acc.lcm(e.denom()));
    let to_int = |r: &BigRational| (r * BigRational::from_integer(den.clone())).to_integer();
    let target = to_int(&rest);
    let eps: Vec<BigInt> = quanta.epsilon.iter().map(to_int).collect();
    let (Some(target), Some(eps)) =
        (target.to_i128(), eps.iter().map(ToPrimitive::to_i128).collect::<Option<Vec<i128>>>())
    else {
        panic!("brute force arithmetic overflow");
    };
    let bounds: Vec<i128> = eps.iter().map(|e| target / e).collect();
    let l = eps.len();
    let mut nu = vec![0i128; l];
    let mut count = 0u64;
    loop {
        let s: i128 = nu.iter().zip(&eps).map(|(n, e)| n * e).sum();
        if s == target {
            count += 1;
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == l {
                return count;
            }
            if nu[k] < bounds[k] {
                nu[k] += 1;
                break;
            }
            nu[k] = 0;
            k += 1;
        }
    }
}

/// Size of the box [`brute_force_count`] would sweep for `E`.
pub fn brute_force_box(quanta: &ModeQuanta, energy: &BigRational) -> f64 {
    let rest = crate::algebra::rational_to_f64(&(energy - &quanta.zero_point));
    if rest < 0.0 {
        return 0.0;
    }
    quanta
        .epsilon
        .iter()
        .map(|e| (rest / crate::algebra::rational_to_f64(e)).floor() + 1.0)
        .product()
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions with semiconvergents).
pub fn best_rational(x: f64, max_den: u64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("cannot rationalize {x}")));
    }
    if max_den == 0 {
        return Err(Error::Parse("denominator bound must be positive".into()));
    }
    let exact = BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("cannot rationalize {x}")))?;
    let bound = BigInt::from(max_den);
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut r = exact.clone();
    loop {
        let a = r.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if q2 > bound {
            // largest admissible semiconvergent
            let t = (&bound - &q0) / &q1;
            let semi = BigRational::new(&p0 + &t * &p1, &q0 + &t * &q1);
            let conv = BigRational::new(p1.clone(), q1.clone());
            let better = if (&semi - &exact).abs() < (&conv - &exact).abs() { semi } else { conv };
            return Ok(better);
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &r - BigRational::from_integer(a);
        if frac.is_zero() {
            return Ok(BigRational::new(p1, q1));
        }
        r = frac.recip();
    }
}
