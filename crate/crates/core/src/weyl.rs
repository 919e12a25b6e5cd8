//! The Weyl group of `SO(2l)` as signed permutations with an even number of
//! sign flips (type `D_l`), optionally the full hyperoctahedral group `B_l`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Neg;

use nalgebra::DMatrix;
use num_rational::BigRational;
use serde::Serialize;

use crate::canonical::assert_cartan_form;
use crate::io::ser_rational;
use crate::spectrum::{enumerate_levels, mode_quanta, Normalization, SpectrumTable};
use crate::{Error, Result};

pub const DEFAULT_MAX_L: usize = 6;
pub const MAX_L_ENV: &str = "ANOMINT_MAX_L";

/// Enumeration cap from `ANOMINT_MAX_L`, falling back to [`DEFAULT_MAX_L`].
pub fn max_l_from_env() -> usize {
    std::env::var(MAX_L_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_L)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GroupKind {
    /// Even number of sign flips: the Weyl group of `SO(2l)`.
    D,
    /// Any number of sign flips.
    B,
}

impl std::str::FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" => Ok(GroupKind::D),
            "B" | "b" => Ok(GroupKind::B),
            _ => Err(Error::Parse(format!("unknown group `{s}` (expected D or B)"))),
        }
    }
}

impl GroupKind {
    pub fn order(self, l: usize) -> u64 {
        let fact: u64 = (1..=l as u64).product();
        match self {
            GroupKind::D => (1u64 << (l - 1)) * fact,
            GroupKind::B => (1u64 << l) * fact,
        }
    }
}

/// `perm[j]` is the image of position `j` (zero-based); `signs[k]` is the sign
/// attached to target slot `k`. Acts by `β'_k = signs[k] · β_{perm⁻¹(k)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(l: usize) -> Self {
        SignedPermutation { perm: (0..l).collect(), signs: vec![1; l] }
    }

    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let l = perm.len();
        if signs.len() != l {
            return Err(Error::LengthMismatch { expected: l, got: signs.len() });
        }
        let mut seen = vec![false; l];
        for &p in &perm {
            if p >= l || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Parse(format!("{perm:?} is not a permutation")));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parse(format!("signs {signs:?} must be ±1")));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn l(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn flips(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn is_even(&self) -> bool {
        self.flips().is_multiple_of(2)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.l())
    }

    fn perm_inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.l()];
        for (j, &k) in self.perm.iter().enumerate() {
            inv[k] = j;
        }
        inv
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.l() != other.l() {
            return Err(Error::LengthMismatch { expected: self.l(), got: other.l() });
        }
        let inv = self.perm_inverse();
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let signs = (0..self.l()).map(|k| self.signs[k] * other.signs[inv[k]]).collect();
        Ok(SignedPermutation { perm, signs })
    }

    pub fn inverse(&self) -> Self {
        let perm = self.perm_inverse();
        let signs = (0..self.l()).map(|j| self.signs[self.perm[j]]).collect();
        SignedPermutation { perm, signs }
    }

    pub fn act_on_beta<T: Clone + Neg<Output = T>>(&self, beta: &[T]) -> Result<Vec<T>> {
        if beta.len() != self.l() {
            return Err(Error::LengthMismatch { expected: self.l(), got: beta.len() });
        }
        let inv = self.perm_inverse();
        Ok((0..self.l())
            .map(|k| {
                let b = beta[inv[k]].clone();
                if self.signs[k] < 0 {
                    -b
                } else {
                    b
                }
            })
            .collect())
    }

    /// `[[|P|, 0], [0, P]]` with `P[k, perm⁻¹(k)] = signs[k]`; its determinant
    /// is the product of the signs.
    pub fn matrix(&self) -> DMatrix<f64> {
        let l = self.l();
        let mut m = DMatrix::zeros(2 * l, 2 * l);
        for (j, &k) in self.perm.iter().enumerate() {
            m[(k, j)] = 1.0;
            m[(l + k, l + j)] = f64::from(self.signs[k]);
        }
        m
    }

    /// `M_w C M_wᵀ` for a Cartan-form `C`.
    pub fn act_on_cartan(&self, c: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
        if c.nrows() != 2 * self.l() || c.ncols() != 2 * self.l() {
            return Err(Error::DimensionMismatch { left: 2 * self.l(), right: c.nrows() });
        }
        if !assert_cartan_form(c, tol) {
            return Err(Error::NonCartan);
        }
        let m = self.matrix();
        Ok(&m * c * m.transpose())
    }

    /// Permutation action on occupation tuples (signs act trivially).
    pub fn act_on_tuple(&self, nu: &[u32]) -> Vec<u32> {
        let inv = self.perm_inverse();
        (0..self.l()).map(|k| nu[inv[k]]).collect()
    }
}

impl fmt::Display for SignedPermutation {
    /// One-line form: images with signs, e.g. `[2, -1]` for `β ↦ (β_2, −β_1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv = self.perm_inverse();
        let parts: Vec<String> = (0..self.l())
            .map(|k| format!("{}{}", if self.signs[k] < 0 { "-" } else { "" }, inv[k] + 1))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// The whole group in lexicographic `(perm, signs)` order, `+` before `−`,
/// so the identity comes first.
pub fn generate_weyl_group(l: usize, kind: GroupKind) -> Result<Vec<SignedPermutation>> {
    generate_weyl_group_bounded(l, kind, max_l_from_env())
}

pub fn generate_weyl_group_bounded(l: usize, kind: GroupKind, bound: usize) -> Result<Vec<SignedPermutation>> {
    if l == 0 {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    if l > bound {
        return Err(Error::RankTooLarge { l, bound });
    }
    let mut out = Vec::with_capacity(kind.order(l) as usize);
    let mut perm: Vec<usize> = (0..l).collect();
    loop {
        for mask in 0u32..(1 << l) {
            if kind == GroupKind::D && mask.count_ones() % 2 == 1 {
                continue;
            }
            // bit (l-1-k) ↔ slot k keeps the sign vectors lexicographic
            let signs = (0..l).map(|k| if mask >> (l - 1 - k) & 1 == 1 { -1 } else { 1 }).collect();
            out.push(SignedPermutation { perm: perm.clone(), signs });
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementCheck {
    pub element: String,
    pub beta: Vec<String>,
    pub invariant: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelOrbits {
    #[serde(rename = "E", serialize_with = "ser_rational")]
    pub energy: BigRational,
    pub degeneracy: usize,
    pub orbit_sizes: Vec<usize>,
    /// The level set is a union of orbits (always expected).
    pub closed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub l: usize,
    pub group: GroupKind,
    pub order: usize,
    pub normalization: Normalization,
    pub elements: Vec<ElementCheck>,
    /// Order of the subgroup whose permutation part fixes the spacings; it is
    /// the group acting on occupation tuples within a level.
    pub stabilizer_order: usize,
    pub orbits: Vec<LevelOrbits>,
    pub all_invariant: bool,
}

/// Checks that every group element leaves the `(E, degeneracy)` multiset of
/// the spectrum unchanged, and decomposes each degenerate level into orbits.
pub fn verify_spectrum_invariance(
    beta: &[BigRational],
    normalization: Normalization,
    e_max: &BigRational,
    kind: GroupKind,
) -> Result<InvarianceReport> {
    let group = generate_weyl_group(beta.len(), kind)?;
    verify_with_group(beta, normalization, e_max, kind, &group)
}

pub fn verify_with_group(
    beta: &[BigRational],
    normalization: Normalization,
    e_max: &BigRational,
    kind: GroupKind,
    group: &[SignedPermutation],
) -> Result<InvarianceReport> {
    let quanta = mode_quanta(beta, normalization)?;
    let reference = enumerate_levels(&quanta, e_max)?;
    let want = reference.multiset();
    let mut elements = Vec::with_capacity(group.len());
    for w in group {
        let moved = w.act_on_beta(beta)?;
        let table = enumerate_levels(&mode_quanta(&moved, normalization)?, e_max)?;
        elements.push(ElementCheck {
            element: w.to_string(),
            beta: moved.iter().map(ToString::to_string).collect(),
            invariant: table.multiset() == want,
        });
    }
    let stabilizer: Vec<&SignedPermutation> =
        group.iter().filter(|w| w.act_on_tuple_values(&quanta.epsilon) == quanta.epsilon).collect();
    let orbits = orbit_decomposition(&reference, &stabilizer);
    let all_invariant = elements.iter().all(|e| e.invariant) && orbits.iter().all(|o| o.closed);
    Ok(InvarianceReport {
        l: beta.len(),
        group: kind,
        order: group.len(),
        normalization,
        elements,
        stabilizer_order: stabilizer.len(),
        orbits,
        all_invariant,
    })
}

impl SignedPermutation {
    fn act_on_tuple_values<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        let inv = self.perm_inverse();
        (0..self.l()).map(|k| xs[inv[k]].clone()).collect()
    }
}

/// Orbits of the stabilizer on the tuples of every degenerate level.
pub fn orbit_decomposition(table: &SpectrumTable, stabilizer: &[&SignedPermutation]) -> Vec<LevelOrbits> {
    table
        .levels
        .iter()
        .filter(|lv| lv.degeneracy > 1)
        .map(|lv| {
            let members: BTreeSet<&Vec<u32>> = lv.tuples.iter().collect();
            let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
            let mut sizes = Vec::new();
            let mut closed = true;
            for t in &lv.tuples {
                if seen.contains(t) {
                    continue;
                }
                let orbit: BTreeSet<Vec<u32>> = stabilizer.iter().map(|w| w.act_on_tuple(t)).collect();
                closed &= orbit.iter().all(|o| members.contains(o));
                sizes.push(orbit.len());
                seen.extend(orbit);
            }
            LevelOrbits { energy: lv.energy.clone(), degeneracy: lv.degeneracy, orbit_sizes: sizes, closed }
        })
        .collect()
}
