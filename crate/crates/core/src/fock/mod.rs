//! Finite matrix realizations on a truncated occupation-number basis.
//!
//! Each mode carries `n_max + 1` states; the `modes`-fold tensor basis is
//! ordered with mode 1 most significant. Generators are realized as
//! `Q = (a + a†)/√2` and `P = i(a† − a)/√2`, so `[P, Q] = −i` away from the
//! cutoff. Residuals are measured on interior states only (every
//! `ν_k ≤ n_max − margin`), where the truncated relations are exact.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::algebra::{build_f_alpha, build_f_prime_alpha, build_h, CentralCharges, HamiltonianVariant, WeylPolynomial};
use crate::canonical::{canonicalize, DEFAULT_SINGULAR_TOL};
use crate::linalg::{hermitian_defect, hermitian_eigen};
use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Relative Hermiticity tolerance accepted by [`diagonalize`].
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationConfig {
    modes: usize,
    n_max: usize,
    margin: usize,
}

impl TruncationConfig {
    pub fn new(modes: usize, n_max: usize, margin: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidTruncation("at least one mode is required".into()));
        }
        if n_max < 2 {
            return Err(Error::InvalidTruncation(format!("n_max = {n_max} must be at least 2")));
        }
        if margin < 1 || margin >= n_max {
            return Err(Error::InvalidTruncation(format!("margin = {margin} must satisfy 1 <= margin < n_max = {n_max}")));
        }
        let dim = (n_max as u64 + 1).checked_pow(modes as u32).filter(|&d| d <= 1 << 16);
        if dim.is_none() {
            return Err(Error::InvalidTruncation(format!("{}^{modes} states exceed the dense limit", n_max + 1)));
        }
        Ok(TruncationConfig { modes, n_max, margin })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1).pow(self.modes as u32)
    }

    /// Occupation tuple of a basis index.
    pub fn occupation(&self, mut index: usize) -> Vec<usize> {
        let base = self.n_max + 1;
        let mut nu = vec![0; self.modes];
        for k in (0..self.modes).rev() {
            nu[k] = index % base;
            index /= base;
        }
        nu
    }

    pub fn is_interior(&self, index: usize) -> bool {
        self.occupation(index).iter().all(|&v| v + self.margin <= self.n_max)
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.is_interior(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<C64>,
    pub label: String,
}

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<C64>, label: impl Into<String>) -> Self {
        OperatorMatrix { matrix, label: label.into() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Hermiticity defect relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            hermitian_defect(&self.matrix) / scale
        }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        let (x, y) = (sparse_rows(&self.matrix), sparse_rows(&other.matrix));
        // separate products so that [X, X] is exactly zero
        let mut xy = DMatrix::<C64>::zeros(self.dim(), self.dim());
        let mut yx = xy.clone();
        accumulate_product(&mut xy, &x, &y);
        accumulate_product(&mut yx, &y, &x);
        let m = xy - yx;
        Ok(OperatorMatrix::new(m, format!("[{}, {}]", self.label, other.label)))
    }
}

// Operators assembled from low-degree polynomials have a handful of entries
// per row, so products go through row lists instead of dense matmuls.
type SparseRows = Vec<Vec<(usize, C64)>>;

fn sparse_rows(m: &DMatrix<C64>) -> SparseRows {
    let mut rows = vec![Vec::new(); m.nrows()];
    for c in 0..m.ncols() {
        for (r, z) in m.column(c).iter().enumerate() {
            if *z != C64::new(0.0, 0.0) {
                rows[r].push((c, *z));
            }
        }
    }
    rows
}

/// `out += X Y`.
fn accumulate_product(out: &mut DMatrix<C64>, x: &SparseRows, y: &SparseRows) {
    for (i, row) in x.iter().enumerate() {
        for &(k, xv) in row {
            for &(j, yv) in &y[k] {
                out[(i, j)] += xv * yv;
            }
        }
    }
}

fn single_ladder(n_max: usize) -> DMatrix<C64> {
    let d = n_max + 1;
    let mut a = DMatrix::zeros(d, d);
    for v in 1..d {
        a[(v - 1, v)] = C64::new((v as f64).sqrt(), 0.0);
    }
    a
}

fn embed(single: &DMatrix<C64>, mode: usize, config: &TruncationConfig) -> DMatrix<C64> {
    let d = config.n_max + 1;
    let mut out = DMatrix::<C64>::identity(1, 1);
    for k in 0..config.modes {
        out = if k == mode { out.kronecker(single) } else { out.kronecker(&DMatrix::identity(d, d)) };
    }
    out
}

/// `(a_k, a_k†)` for every mode, embedded in the full tensor space.
pub fn ladder_matrices(config: &TruncationConfig) -> Vec<(DMatrix<C64>, DMatrix<C64>)> {
    let a = single_ladder(config.n_max);
    let ad = a.adjoint();
    (0..config.modes).map(|k| (embed(&a, k, config), embed(&ad, k, config))).collect()
}

/// Single-mode `Q` and `P`.
fn single_qp(n_max: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let a = single_ladder(n_max);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad) * C64::new(s, 0.0);
    let p = (&ad - &a) * C64::new(0.0, s);
    (q, p)
}

/// Matrix realization of a polynomial; each normal-ordered monomial maps to
/// `Q^a P^b` on every mode, tensored together.
///
/// Products are formed before truncating, so the result is the compression
/// `Π X Π` of the operator onto the kept states. Eigenvalues of a compressed
/// Hamiltonian are therefore Ritz values: upper bounds, monotone in `n_max`.
pub fn assemble(poly: &WeylPolynomial, config: &TruncationConfig) -> Result<OperatorMatrix> {
    if poly.n() != config.modes {
        return Err(Error::GeneratorCountMismatch { left: poly.n(), right: config.modes });
    }
    let d = config.n_max + 1;
    let mut cache: HashMap<(u32, u32), DMatrix<C64>> = HashMap::new();
    let mut block = |a: u32, b: u32| -> DMatrix<C64> {
        cache
            .entry((a, b))
            .or_insert_with(|| {
                // padding by the degree makes the product exact on the kept block
                let big = config.n_max + (a + b) as usize;
                let (q, p) = single_qp(big);
                let mut m = DMatrix::<C64>::identity(big + 1, big + 1);
                for _ in 0..a {
                    m = &m * &q;
                }
                for _ in 0..b {
                    m = &m * &p;
                }
                m.view((0, 0), (d, d)).into_owned()
            })
            .clone()
    };
    let dim = config.dim();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for (mono, coeff) in poly.terms() {
        let (re, im) = coeff.to_f64_pair();
        let mut m = DMatrix::<C64>::identity(1, 1);
        for k in 0..config.modes {
            m = m.kronecker(&block(mono.q[k], mono.p[k]));
        }
        out += m * C64::new(re, im);
    }
    Ok(OperatorMatrix::new(out, poly.to_string()))
}

/// Max-norm of `XY − YX − expected` over interior rows and columns.
pub fn interior_residual(
    x: &OperatorMatrix,
    y: &OperatorMatrix,
    expected: Option<&DMatrix<C64>>,
    config: &TruncationConfig,
) -> Result<f64> {
    let dim = x.dim();
    if y.dim() != dim || dim != config.dim() {
        return Err(Error::DimensionMismatch { left: dim, right: y.dim() });
    }
    let mut c = x.commutator(y)?.matrix;
    if let Some(e) = expected {
        if e.nrows() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: e.nrows() });
        }
        c -= e;
    }
    Ok(interior_max(&c, config))
}

pub fn interior_max(m: &DMatrix<C64>, config: &TruncationConfig) -> f64 {
    let idx = config.interior_indices();
    let mut worst = 0.0f64;
    for &j in &idx {
        for &i in &idx {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

fn check_hermitian(h: &OperatorMatrix) -> Result<()> {
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitian(defect));
    }
    Ok(())
}

/// The `k_lowest` smallest eigenvalues, ascending.
pub fn diagonalize(h: &OperatorMatrix, k_lowest: usize) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let (mut vals, _) = hermitian_eigen(&h.matrix, false);
    vals.truncate(k_lowest);
    Ok(vals)
}

/// Eigenvalues (ascending) and eigenvectors as columns.
pub fn eigensystem(h: &OperatorMatrix) -> Result<(Vec<f64>, DMatrix<C64>)> {
    check_hermitian(h)?;
    let (vals, vecs) = hermitian_eigen(&h.matrix, true);
    Ok((vals, vecs.expect("vectors requested")))
}

/// `Σ_k (I_k² + J_k²)` with `I_k = √|β_k| Q_k`, `J_k = sgn(β_k) √|β_k| P_k`,
/// which satisfies `[I_k, J_k] = iβ_k`. Works for irrational `β`.
pub fn canonical_hamiltonian_matrix(beta: &[f64], config: &TruncationConfig) -> Result<OperatorMatrix> {
    if beta.len() != config.modes {
        return Err(Error::GeneratorCountMismatch { left: beta.len(), right: config.modes });
    }
    let (q, p) = single_qp(config.n_max + 2);
    let d = config.n_max + 1;
    let single = (&q * &q + &p * &p).view((0, 0), (d, d)).into_owned();
    let dim = config.dim();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for (k, b) in beta.iter().enumerate() {
        out += embed(&single, k, config) * C64::new(b.abs(), 0.0);
    }
    let label = format!("sum_k |beta_k| (Q_k^2 + P_k^2), beta = {beta:?}");
    Ok(OperatorMatrix::new(out, label))
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderCheck {
    pub i: usize,
    pub j: usize,
    /// `+1` for `F_i + iF_j`, `−1` for `F_i − iF_j`.
    pub sign: i8,
    /// `‖K v‖` for the chosen ground vector `v`.
    pub image_norm: f64,
    /// `‖(H − E_0) K v‖ / ‖K v‖`; small when `K v` stays in the ground space.
    pub relative_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutantReport {
    pub config: TruncationConfig,
    pub dim: usize,
    /// Interior `‖[H_α, F_αi]‖_max`, one per generator.
    pub conservation_residuals: Vec<f64>,
    /// `‖F_αi − F'_αi‖_max`; all zero exactly when `α = 0`.
    pub f_fprime_difference: Vec<f64>,
    /// `Σ_k |β_k|`, the lowest Landau-type level.
    pub ground_level: Option<f64>,
    pub ground_multiplicity: usize,
    pub multiplicity_tol: f64,
    pub lowest: Vec<f64>,
    pub ladder: Vec<LadderCheck>,
}

/// Numeric shadow of the factorization of `H_α`: the `F_αi` commute with
/// `H_α`, and the lowest level carries a multiplicity that grows with the
/// cutoff, populated by the `F_αi ± i F_αj` ladders.
pub fn commutant_multiplicity_check(
    charges: &CentralCharges,
    config: &TruncationConfig,
    k_lowest: usize,
) -> Result<CommutantReport> {
    let n = charges.n();
    let h = assemble(&build_h(charges, HamiltonianVariant::Anomalous)?, config)?;
    let f: Vec<OperatorMatrix> =
        (1..=n).map(|i| assemble(&build_f_alpha(charges, i)?, config)).collect::<Result<_>>()?;
    let fp: Vec<OperatorMatrix> =
        (1..=n).map(|i| assemble(&build_f_prime_alpha(charges, i)?, config)).collect::<Result<_>>()?;
    let conservation_residuals = f.iter().map(|fi| interior_residual(&h, fi, None, config)).collect::<Result<_>>()?;
    let f_fprime_difference =
        f.iter().zip(&fp).map(|(a, b)| (&a.matrix - &b.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)).collect();

    let (vals, vecs) = eigensystem(&h)?;
    let ground_level: Option<f64> = if charges.is_zero() {
        None
    } else {
        let form = canonicalize(charges, DEFAULT_SINGULAR_TOL)?;
        Some(form.beta.iter().map(|b| b.abs()).sum())
    };
    let multiplicity_tol = MULTIPLICITY_TOL;
    let (ground_multiplicity, ladder) = match ground_level {
        Some(e0) => {
            let cluster: Vec<usize> =
                (0..vals.len()).filter(|&k| (vals[k] - e0).abs() <= multiplicity_tol * e0.max(1.0)).collect();
            let ladder = match least_edge_weight(&vecs, &cluster, config) {
                Some(col) => ladder_checks(&h, &f, &DMatrix::from_column_slice(config.dim(), 1, vecs.column(col).as_slice()), e0)?,
                None => Vec::new(),
            };
            (cluster.len(), ladder)
        }
        None => (0, Vec::new()),
    };
    Ok(CommutantReport {
        config: *config,
        dim: config.dim(),
        conservation_residuals,
        f_fprime_difference,
        ground_level,
        ground_multiplicity,
        multiplicity_tol,
        lowest: vals.iter().take(k_lowest).copied().collect(),
        ladder,
    })
}

/// Relative window for counting eigenvalues in the lowest level.
pub const MULTIPLICITY_TOL: f64 = 1e-6;

/// Column among `candidates` with the least weight on non-interior states.
fn least_edge_weight(vecs: &DMatrix<C64>, candidates: &[usize], config: &TruncationConfig) -> Option<usize> {
    let edge: Vec<usize> = (0..config.dim()).filter(|&i| !config.is_interior(i)).collect();
    let weight = |c: usize| edge.iter().map(|&i| vecs[(i, c)].norm_sqr()).sum::<f64>();
    candidates.iter().copied().min_by(|&a, &b| weight(a).total_cmp(&weight(b)))
}

fn ladder_checks(h: &OperatorMatrix, f: &[OperatorMatrix], v: &DMatrix<C64>, e0: f64) -> Result<Vec<LadderCheck>> {
    let dim = h.dim();
    let shifted = &h.matrix - DMatrix::<C64>::identity(dim, dim) * C64::new(e0, 0.0);
    let mut out = Vec::new();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            for sign in [1i8, -1] {
                let k = &f[i].matrix + &f[j].matrix * C64::new(0.0, f64::from(sign));
                let kv = &k * v;
                let image_norm = kv.norm();
                let relative_residual = if image_norm > 0.0 { (&shifted * &kv).norm() / image_norm } else { 0.0 };
                out.push(LadderCheck { i: i + 1, j: j + 1, sign, image_norm, relative_residual });
            }
        }
    }
    Ok(out)
}
