//! Self-contained dense eigensolvers.
//!
//! `nalgebra` is used for storage and products only; both decompositions
//! below are written out so their iteration order (and therefore output) is
//! fixed.

use nalgebra::{Complex, DMatrix};

type C64 = Complex<f64>;

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// columns. Equal eigenvalues keep the order in which the sweep produced
/// them, which is deterministic.
pub fn symmetric_jacobi(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    const MAX_SWEEPS: usize = 100;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for p in 0..n {
            diag += a[(p, p)] * a[(p, p)];
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * diag * 1e-4 || off == 0.0 {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Maximum of `|H_ij - conj(H_ji)|`.
pub fn hermitian_defect(h: &DMatrix<C64>) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a complex Hermitian matrix: Householder reduction to
/// real tridiagonal form followed by implicit QL. Eigenvalues ascend; with
/// `want_vectors` the unitary eigenvector matrix is returned (columns).
///
/// Only the lower triangle of `h` is read.
pub fn hermitian_eigen(h: &DMatrix<C64>, want_vectors: bool) -> (Vec<f64>, Option<DMatrix<C64>>) {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "square matrix required");
    if n == 0 {
        return (Vec::new(), want_vectors.then(|| DMatrix::zeros(0, 0)));
    }
    // column-major working copy, a[c * n + r]
    let mut a: Vec<C64> = vec![C64::new(0.0, 0.0); n * n];
    for c in 0..n {
        for r in c..n {
            a[c * n + r] = h[(r, c)];
            a[r * n + c] = h[(r, c)].conj();
        }
        a[c * n + c] = C64::new(h[(c, c)].re, 0.0);
    }
    // Householder vectors, kept for the back-transformation
    let mut reflectors: Vec<Vec<C64>> = Vec::new();

    let mut sub = vec![C64::new(0.0, 0.0); n];
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut u = vec![C64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let lo = k + 1;
        let m = n - lo;
        let x0 = a[k * n + lo];
        let sigma = (lo..n).map(|r| a[k * n + r].norm_sqr()).sum::<f64>().sqrt();
        let tail = (lo + 1..n).map(|r| a[k * n + r].norm_sqr()).sum::<f64>();
        if sigma == 0.0 || (tail == 0.0 && x0.im == 0.0) {
            sub[k] = x0;
            if want_vectors {
                reflectors.push(Vec::new());
            }
            continue;
        }
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * sigma;
        for r in 0..m {
            v[r] = a[k * n + lo + r];
        }
        v[0] -= alpha;
        let vnorm = v[..m].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v[..m] {
            *z /= vnorm;
        }
        // u = B v on the trailing block (column sweeps), c = v* u
        u[..m].fill(C64::new(0.0, 0.0));
        for c in 0..m {
            let vc = v[c];
            let col = &a[(lo + c) * n + lo..(lo + c) * n + n];
            for (ur, b) in u[..m].iter_mut().zip(col) {
                *ur += b * vc;
            }
        }
        let cdot: f64 = (0..m).map(|r| (v[r].conj() * u[r]).re).sum();
        // B <- B - 2 v u* - 2 u v* + 4c v v*
        for c in 0..m {
            let vc = v[c].conj();
            let uc = u[c].conj();
            let col = (lo + c) * n + lo;
            for r in 0..m {
                a[col + r] -= 2.0 * (v[r] * uc + u[r] * vc) - 4.0 * cdot * v[r] * vc;
            }
        }
        sub[k] = alpha;
        for r in lo + 1..n {
            a[k * n + r] = C64::new(0.0, 0.0);
        }
        if want_vectors {
            reflectors.push(v[..m].to_vec());
        }
    }

    let mut d: Vec<f64> = (0..n).map(|k| a[k * n + k].re).collect();
    let mut e: Vec<f64> = vec![0.0; n];
    let mut phi = C64::new(1.0, 0.0);
    let mut phases = vec![C64::new(1.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let s = sub[k];
        let mag = s.norm();
        e[k] = mag;
        if mag > 0.0 {
            phi *= s / mag;
        }
        phases[k + 1] = phi;
    }

    let mut z: Vec<f64> = Vec::new();
    if want_vectors {
        z = vec![0.0; n * n];
        for k in 0..n {
            z[k * n + k] = 1.0;
        }
    }
    tridiagonal_ql(&mut d, &mut e, if want_vectors { Some((&mut z, n)) } else { None });

    // eigenvectors of the Hermitian matrix: H_1 ⋯ H_{n-1} · diag(phases) · Z,
    // both stored column-major
    let q = want_vectors.then(|| {
        let mut q = vec![C64::new(0.0, 0.0); n * n];
        for col in 0..n {
            for row in 0..n {
                q[col * n + row] = phases[row] * z[col * n + row];
            }
        }
        for (k, v) in reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let lo = k + 1;
            for col in 0..n {
                let x = &mut q[col * n + lo..col * n + n];
                let s: C64 = v.iter().zip(x.iter()).map(|(vi, xi)| vi.conj() * xi).sum();
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi -= 2.0 * s * vi;
                }
            }
        }
        q
    });

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = q.map(|q| DMatrix::from_fn(n, n, |r, c| q[order[c] * n + r]));
    (values, vectors)
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// subdiagonal `e[0..n-1]`), after the EISPACK `tql2` routine. Rotations are
/// accumulated into the columns of `z` when given.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<(&mut Vec<f64>, usize)>) {
    let n = d.len();
    if n < 2 {
        return;
    }
    e[n - 1] = 0.0;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= f64::EPSILON * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                assert!(iter < 300, "tridiagonal QL failed to converge");
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some((ref mut zz, nn)) = z {
                        for k in 0..nn {
                            let zi1 = zz[(i + 1) * nn + k];
                            let zi = zz[i * nn + k];
                            zz[(i + 1) * nn + k] = zi * s + zi1 * c;
                            zz[i * nn + k] = zi * c - zi1 * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= f64::EPSILON * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(n: usize, seed: u64) -> DMatrix<C64> {
        // small LCG keeps this module free of dev-dependency plumbing
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m = DMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        m = &m + m.adjoint();
        m
    }

    #[test]
    fn jacobi_reconstructs() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, -2.0, 1.0, 2.0, 0.5, -2.0, 0.5, 3.0]);
        let (w, v) = symmetric_jacobi(&a);
        assert!(w.windows(2).all(|p| p[0] >= p[1]));
        let recon = &v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(w)) * v.transpose();
        assert!((recon - &a).abs().max() < 1e-13);
        assert!((v.transpose() * &v - DMatrix::identity(3, 3)).abs().max() < 1e-14);
    }

    #[test]
    fn jacobi_on_diagonal_is_identity_rotation() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![9.0, 9.0]));
        let (w, v) = symmetric_jacobi(&a);
        assert_eq!(w, vec![9.0, 9.0]);
        assert_eq!(v, DMatrix::identity(2, 2));
    }

    #[test]
    fn hermitian_reconstructs() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (17, 4), (40, 5)] {
            let h = herm(n, seed);
            let (w, z) = hermitian_eigen(&h, true);
            let z = z.unwrap();
            assert!(w.windows(2).all(|p| p[0] <= p[1]));
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, w.iter().map(|&x| C64::new(x, 0.0))));
            let recon = &z * lam * z.adjoint();
            assert!((recon - &h).map(|c| c.norm()).max() < 1e-12, "n = {n}");
            assert!((z.adjoint() * &z - DMatrix::identity(n, n)).map(|c| c.norm()).max() < 1e-12);
            let (w2, none) = hermitian_eigen(&h, false);
            assert!(none.is_none());
            assert_eq!(w, w2);
        }
    }

    #[test]
    fn hermitian_matches_jacobi_on_real_input() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, -2.0, 1.0, 2.0, 0.5, -2.0, 0.5, 3.0]);
        let (mut wj, _) = symmetric_jacobi(&a);
        wj.reverse();
        let (wh, _) = hermitian_eigen(&a.map(|x| C64::new(x, 0.0)), false);
        for (x, y) in wj.iter().zip(&wh) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn defect_detects_asymmetry() {
        let mut h = herm(4, 9);
        assert!(hermitian_defect(&h) < 1e-15);
        h[(0, 1)] += C64::new(0.0, 1e-3);
        assert!(hermitian_defect(&h) > 9e-4);
    }
}
