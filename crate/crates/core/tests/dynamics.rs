mod common;

use anomint::algebra::CentralCharges;
use anomint::dynamics::{anomaly_demo, exact_flow, rk4_flow, symbolic_generator, time_series};
use common::rat;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `exp` of the augmented generator `[[−2A, 0], [2I, 0]]`: its first block
/// column is `(F'(t), G(t))`.
fn van_loan(charges: &CentralCharges, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = charges.n();
    let mut l = DMatrix::zeros(2 * n, 2 * n);
    l.view_mut((0, 0), (n, n)).copy_from(&(charges.to_f64() * -2.0));
    l.view_mut((n, 0), (n, n)).copy_from(&(DMatrix::<f64>::identity(n, n) * 2.0));
    let e = (l * t).exp();
    (e.view((0, 0), (n, n)).into_owned(), e.view((n, 0), (n, n)).into_owned())
}

#[test]
fn exact_flow_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [2, 4, 6] {
        let charges = common::random_charges(&mut rng, n);
        if anomint::canonical::canonicalize(&charges, 1e-12).is_err() {
            continue;
        }
        for t in [0.1, 0.7, 2.5] {
            let s = exact_flow(&charges, t).unwrap();
            let (f, g) = van_loan(&charges, t);
            let scale = charges.to_f64().amax().max(1.0);
            assert!((&s.fprime_coeffs - f).amax() < 1e-9 * scale, "n={n} t={t}");
            assert!((&s.q_offsets - g).amax() < 1e-9 * scale, "n={n} t={t}");
        }
    }
}

#[test]
fn one_parameter_group() {
    let charges = CentralCharges::from_ratios(&[
        vec![(0, 1), (3, 2), (-1, 1), (0, 1)],
        vec![(-3, 2), (0, 1), (2, 3), (1, 1)],
        vec![(1, 1), (-2, 3), (0, 1), (5, 4)],
        vec![(0, 1), (-1, 1), (-5, 4), (0, 1)],
    ])
    .unwrap();
    let (s, t) = (0.4, 1.3);
    let fs = exact_flow(&charges, s).unwrap();
    let ft = exact_flow(&charges, t).unwrap();
    let fst = exact_flow(&charges, s + t).unwrap();
    assert!((&ft.fprime_coeffs * &fs.fprime_coeffs - &fst.fprime_coeffs).amax() < 1e-12);
    // G(s+t) = G(s) + G(t) F'(s)
    assert!((&fs.q_offsets + &ft.q_offsets * &fs.fprime_coeffs - &fst.q_offsets).amax() < 1e-12);
    for t in [1.0, 10.0, 100.0] {
        assert!(exact_flow(&charges, t).unwrap().orthogonality_defect() < 1e-12);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let charges = CentralCharges::planar(rat(1, 1));
    let exact = exact_flow(&charges, 1.0).unwrap();
    let e1 = rk4_flow(&charges, 1.0, 10).unwrap().distance(&exact);
    let e2 = rk4_flow(&charges, 1.0, 40).unwrap().distance(&exact);
    let ratio = e1 / e2;
    assert!((200.0..=320.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn symbolic_generator_is_minus_two_alpha() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let charges = common::random_charges(&mut rng, 4);
    let (k, v) = symbolic_generator(&charges).unwrap();
    assert_eq!(k, charges.to_f64() * -2.0);
    assert_eq!(v, DMatrix::<f64>::identity(4, 4) * 2.0);
}

#[test]
fn naive_flow_drifts_and_anomalous_flow_is_constant() {
    let b = 3.0;
    let charges = CentralCharges::planar(rat(3, 1));
    let t = 0.5;
    let r = anomaly_demo(&charges, t).unwrap();
    assert!(r.anomalous.max_change < 1e-14);
    // F_1 = P_1 + (b/2) Q_2 drifts by t·b·P_2 (coordinates Q_1 Q_2 P_1 P_2)
    assert!((r.naive.coefficients[0][3] - t * b).abs() < 1e-12);
    assert!((r.naive.coefficients[1][2] + t * b).abs() < 1e-12);
    assert!((r.naive.max_change - t * b).abs() < 1e-12);
    assert_eq!(anomaly_demo(&CentralCharges::zero(2), 1.0).unwrap().flow_difference, 0.0);
}

#[test]
fn series_has_one_row_per_sample() {
    let csv = time_series(&CentralCharges::planar(rat(1, 2)), 2.0, 5, 100).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    // header plus samples at t = 0, 0.4, …, 2
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0,") || lines[1].starts_with("0.0"));
    let cols = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == cols));
}
