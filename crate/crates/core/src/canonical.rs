//! Orthogonal congruence of a real antisymmetric matrix to Cartan block form
//! `C = [[0, B], [-B, 0]]`, `B = diag(β_1..β_l)`.
//!
//! `S = AᵀA` is diagonalized by Jacobi rotations. Its eigenvalues come in
//! equal pairs `β_k²`; for each pair a unit eigenvector `v_k` is chosen and
//! completed by `w_k = Aᵀv_k / β_k`. The rows of `M` are
//! `(v_1..v_l, w_1..w_l)`, so `M A Mᵀ = C` with every `β_k > 0`. `M` may have
//! determinant `-1`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::CentralCharges;
use crate::linalg::symmetric_jacobi;
use crate::{Error, Result};

/// Default singularity threshold, relative to `‖A‖_max`.
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-12;
/// Orthogonality and reconstruction tolerance, relative to `‖A‖_max`.
pub const DEFAULT_RECON_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalForm {
    pub m: DMatrix<f64>,
    /// Strictly positive, descending.
    pub beta: Vec<f64>,
    pub det_m: i8,
    pub c: DMatrix<f64>,
}

impl CanonicalForm {
    pub fn l(&self) -> usize {
        self.beta.len()
    }

    /// `‖M Mᵀ − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.m.nrows();
        (&self.m * self.m.transpose() - DMatrix::identity(n, n)).abs().max()
    }

    /// `‖M A Mᵀ − C‖_max`.
    pub fn reconstruction_defect(&self, a: &DMatrix<f64>) -> f64 {
        (&self.m * a * self.m.transpose() - &self.c).abs().max()
    }

    /// `‖Mᵀ C M − A‖_max`.
    pub fn round_trip_defect(&self, a: &DMatrix<f64>) -> f64 {
        (self.m.transpose() * &self.c * &self.m - a).abs().max()
    }
}

#[derive(Serialize, Deserialize)]
struct CanonicalFormJson {
    #[serde(rename = "M")]
    m: Vec<Vec<f64>>,
    beta: Vec<f64>,
    #[serde(rename = "detM")]
    det_m: i8,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, rows.first().map_or(0, Vec::len), |i, j| rows[i][j])
}

impl Serialize for CanonicalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CanonicalFormJson {
            m: matrix_rows(&self.m),
            beta: self.beta.clone(),
            det_m: self.det_m,
            c: matrix_rows(&self.c),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CanonicalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CanonicalFormJson::deserialize(d)?;
        Ok(CanonicalForm { m: from_rows(&j.m), beta: j.beta, det_m: j.det_m, c: from_rows(&j.c) })
    }
}

/// Cartan block matrix for (possibly signed) frequencies.
pub fn cartan_matrix(beta: &[f64]) -> DMatrix<f64> {
    let l = beta.len();
    let mut c = DMatrix::zeros(2 * l, 2 * l);
    for (k, &b) in beta.iter().enumerate() {
        c[(k, l + k)] = b;
        c[(l + k, k)] = -b;
    }
    c
}

/// Signed frequencies read off the upper-right block diagonal of a Cartan
/// matrix.
pub fn cartan_beta(c: &DMatrix<f64>) -> Vec<f64> {
    let l = c.nrows() / 2;
    (0..l).map(|k| c[(k, l + k)]).collect()
}

/// True iff `x` is antisymmetric with vanishing diagonal blocks and diagonal
/// off-diagonal blocks, all within `tol` (absolute).
pub fn assert_cartan_form(x: &DMatrix<f64>, tol: f64) -> bool {
    let n = x.nrows();
    if n != x.ncols() || !n.is_multiple_of(2) {
        return false;
    }
    let l = n / 2;
    for i in 0..n {
        for j in 0..n {
            let allowed = (j == i + l && i < l) || (i == j + l && j < l);
            if !allowed && x[(i, j)].abs() > tol {
                return false;
            }
        }
    }
    (0..l).all(|k| (x[(k, l + k)] + x[(l + k, k)]).abs() <= tol)
}

pub fn canonicalize(charges: &CentralCharges, tol: f64) -> Result<CanonicalForm> {
    canonicalize_matrix(&charges.to_f64(), tol)
}

/// Canonicalizes a floating-point antisymmetric matrix. `tol` is the
/// singularity threshold relative to `‖A‖_max`: the call fails when the
/// smallest frequency is at or below `tol·‖A‖_max`.
pub fn canonicalize_matrix(a: &DMatrix<f64>, tol: f64) -> Result<CanonicalForm> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::LengthMismatch { expected: n, got: a.ncols() });
    }
    if n == 0 {
        return Err(Error::LengthMismatch { expected: 2, got: 0 });
    }
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    let scale = a.abs().max();
    for i in 0..n {
        for j in 0..=i {
            if (a[(i, j)] + a[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::NotAntisymmetric { row: i, col: j });
            }
        }
    }
    let l = n / 2;

    let s = a.transpose() * a;
    let (lam, vecs) = symmetric_jacobi(&s);
    let smallest = lam.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let threshold = tol * scale;
    if smallest <= threshold {
        return Err(Error::SingularCharges { smallest, threshold });
    }

    let cluster_tol = 1e-9 * lam[0];
    let at = a.transpose();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(l);
    for _ in 0..l {
        let residuals: Vec<(usize, DVector<f64>, f64)> = (0..n)
            .map(|j| {
                let r = project_out(vecs.column(j).into_owned(), &basis);
                let norm = r.norm();
                (j, r, norm)
            })
            .collect();
        let top = residuals
            .iter()
            .filter(|(_, _, r)| *r > 0.5)
            .map(|(j, _, _)| lam[*j])
            .fold(f64::NEG_INFINITY, f64::max);
        let (_, r, norm) = residuals
            .into_iter()
            .filter(|(j, _, r)| *r > 0.5 && lam[*j] >= top - cluster_tol)
            .fold(None::<(usize, DVector<f64>, f64)>, |best, cand| match best {
                Some(b) if b.2 >= cand.2 => Some(b),
                _ => Some(cand),
            })
            .expect("eigenvector basis exhausted before l pairs were formed");
        let mut v = r / norm;
        fix_sign(&mut v);
        let aw = &at * &v;
        let beta = aw.norm();
        let w = project_out(aw / beta, &basis);
        let w = project_out(w.clone(), std::slice::from_ref(&v)).normalize();
        basis.push(v.clone());
        basis.push(w.clone());
        pairs.push((beta, v, w));
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut m = DMatrix::zeros(n, n);
    for (k, (_, v, w)) in pairs.iter().enumerate() {
        m.set_row(k, &v.transpose());
        m.set_row(l + k, &w.transpose());
    }
    let beta: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let det_m = if m.clone().determinant() < 0.0 { -1 } else { 1 };
    let c = cartan_matrix(&beta);
    Ok(CanonicalForm { m, beta, det_m, c })
}

fn project_out(mut x: DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let d = b.dot(&x);
            x.axpy(-d, b, 1.0);
        }
    }
    x
}

/// Makes the largest-magnitude component positive (first index on ties).
fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}
