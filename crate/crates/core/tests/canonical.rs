mod common;

use anomint::canonical::{assert_cartan_form, canonicalize_matrix, DEFAULT_SINGULAR_TOL};
use anomint::Error;
use common::{beta_oracle, beta_oracle_hermitian, random_antisymmetric};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_matrices_agree_with_both_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..60 {
        let n = 2 * rng.random_range(1..=6);
        let a = random_antisymmetric(&mut rng, n);
        let scale = a.abs().max();
        let cf = canonicalize_matrix(&a, DEFAULT_SINGULAR_TOL).unwrap();
        assert!(cf.orthogonality_defect() <= 1e-10);
        assert!(cf.reconstruction_defect(&a) <= 1e-10 * scale);
        assert!(assert_cartan_form(&cf.c, 1e-10 * scale));
        assert!(cf.beta.windows(2).all(|w| w[0] >= w[1]) && cf.beta.iter().all(|&b| b > 0.0));
        let det = cf.m.determinant();
        assert!((det - f64::from(cf.det_m)).abs() < 1e-8, "det {det} vs {}", cf.det_m);
        for oracle in [beta_oracle(&a), beta_oracle_hermitian(&a)] {
            for (x, y) in cf.beta.iter().zip(&oracle) {
                assert!((x - y).abs() <= 1e-9 * scale.max(1.0), "{:?} vs {oracle:?}", cf.beta);
            }
        }
    }
}

#[test]
fn scale_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_antisymmetric(&mut rng, 6);
    let base = canonicalize_matrix(&a, DEFAULT_SINGULAR_TOL).unwrap();
    for s in [1e-3, 0.5, 7.0, 1e4] {
        let cf = canonicalize_matrix(&(&a * s), DEFAULT_SINGULAR_TOL).unwrap();
        for (x, y) in cf.beta.iter().zip(&base.beta) {
            assert!((x - s * y).abs() <= 1e-10 * s * base.beta[0]);
        }
    }
}

#[test]
fn orthogonal_congruence_preserves_frequencies() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_antisymmetric(&mut rng, 8);
    let g = DMatrix::from_fn(8, 8, |_, _| rng.random_range(-1.0..1.0));
    let o = g.qr().q();
    let b = &o * &a * o.transpose();
    let x = canonicalize_matrix(&a, DEFAULT_SINGULAR_TOL).unwrap();
    let y = canonicalize_matrix(&b, DEFAULT_SINGULAR_TOL).unwrap();
    for (u, v) in x.beta.iter().zip(&y.beta) {
        assert!((u - v).abs() < 1e-10);
    }
}

#[test]
fn deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let a = random_antisymmetric(&mut rng, 10);
    let x = canonicalize_matrix(&a, DEFAULT_SINGULAR_TOL).unwrap();
    let y = canonicalize_matrix(&a, DEFAULT_SINGULAR_TOL).unwrap();
    assert_eq!(x, y);
}

#[test]
fn rank_deficient_rejected() {
    let mut a = DMatrix::zeros(4, 4);
    a[(0, 1)] = 1.0;
    a[(1, 0)] = -1.0;
    assert!(matches!(canonicalize_matrix(&a, DEFAULT_SINGULAR_TOL), Err(Error::SingularCharges { .. })));
    assert!(matches!(canonicalize_matrix(&DMatrix::zeros(3, 3), DEFAULT_SINGULAR_TOL), Err(Error::OddDimension(3))));
}
