//! Heisenberg equations of motion under a quadratic Hamiltonian, as linear
//! flows on operator coefficients.
//!
//! With `H_α = Σ F'²` the equations `F'̇ = i[H_α, F'] = −2A F'` and
//! `Q̇ = i[H_α, Q] = 2F'` close on the basis `{F'_αj(0)}`, so
//! `F'(t) = exp(−2At) F'(0)` and `Q(t) − Q(0) = G(t) F'(0)` with
//! `Ġ = 2 exp(−2At)`, `G(0) = 0`.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{
    build_f_alpha, build_f_prime_alpha, build_h, rational_to_f64, CentralCharges, HamiltonianVariant, Scalar,
    WeylPolynomial,
};
use crate::canonical::{canonicalize, matrix_rows, DEFAULT_SINGULAR_TOL};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientState {
    /// Row `i`: coefficients of `F'_αi(t)` in `{F'_αj(0)}`.
    pub fprime_coeffs: DMatrix<f64>,
    /// Row `i`: coefficients of `Q_i(t) − Q_i(0)` in `{F'_αj(0)}`.
    pub q_offsets: DMatrix<f64>,
    pub t: f64,
}

impl CoefficientState {
    pub fn initial(n: usize) -> Self {
        CoefficientState { fprime_coeffs: DMatrix::identity(n, n), q_offsets: DMatrix::zeros(n, n), t: 0.0 }
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.fprime_coeffs.nrows();
        (&self.fprime_coeffs * self.fprime_coeffs.transpose() - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// `Σ_i |row_i|²`; equals `n` on an orthogonal flow.
    pub fn energy_coefficient(&self) -> f64 {
        self.fprime_coeffs.norm_squared()
    }

    /// Max-norm distance to another state over both matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.fprime_coeffs - &other.fprime_coeffs).amax().max((&self.q_offsets - &other.q_offsets).amax())
    }
}

impl Serialize for CoefficientState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CoefficientState", 3)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("fprime_coeffs", &matrix_rows(&self.fprime_coeffs))?;
        st.serialize_field("q_offsets", &matrix_rows(&self.q_offsets))?;
        st.end()
    }
}

/// Closed-form flow through the canonical form `A = Mᵀ C M`: each frequency
/// pair rotates by `2β_k t`, and `G` integrates each rotation block exactly.
pub fn exact_flow(charges: &CentralCharges, t: f64) -> Result<CoefficientState> {
    let form = canonicalize(charges, DEFAULT_SINGULAR_TOL)?;
    let l = form.l();
    let n = 2 * l;
    let mut rot = DMatrix::<f64>::zeros(n, n);
    let mut g = DMatrix::<f64>::zeros(n, n);
    for (k, &b) in form.beta.iter().enumerate() {
        let (s2, c2) = (2.0 * b * t).sin_cos();
        let s1 = (b * t).sin();
        let (i, j) = (k, l + k);
        rot[(i, i)] = c2;
        rot[(i, j)] = -s2;
        rot[(j, i)] = s2;
        rot[(j, j)] = c2;
        let diag = s2 / b;
        let off = 2.0 * s1 * s1 / b;
        g[(i, i)] = diag;
        g[(i, j)] = -off;
        g[(j, i)] = off;
        g[(j, j)] = diag;
    }
    let mt = form.m.transpose();
    Ok(CoefficientState { fprime_coeffs: &mt * rot * &form.m, q_offsets: &mt * g * &form.m, t })
}

/// Classical RK4 on `Ḟ' = −2A F'`, `Ġ = 2F'`.
pub fn rk4_flow(charges: &CentralCharges, t: f64, steps: usize) -> Result<CoefficientState> {
    if steps == 0 {
        return Err(Error::Parse("steps must be at least 1".into()));
    }
    let n = charges.n();
    let gen = charges.to_f64() * -2.0;
    let h = t / steps as f64;
    let mut f = DMatrix::<f64>::identity(n, n);
    let mut g = DMatrix::<f64>::zeros(n, n);
    for _ in 0..steps {
        // G does not feed back, so its stages are 2× the F stages
        let k1 = &gen * &f;
        let f2 = &f + &k1 * (h / 2.0);
        let k2 = &gen * &f2;
        let f3 = &f + &k2 * (h / 2.0);
        let k3 = &gen * &f3;
        let f4 = &f + &k3 * h;
        let k4 = &gen * &f4;
        g += (&f + &f2 * 2.0 + &f3 * 2.0 + &f4) * (2.0 * h / 6.0);
        f += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(CoefficientState { fprime_coeffs: f, q_offsets: g, t })
}

/// Real coefficients `(c_Q, c_P)` of a polynomial that is a linear form in
/// the generators.
pub fn linear_coefficients(poly: &WeylPolynomial) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    let n = poly.n();
    let mut cq = vec![BigRational::zero(); n];
    let mut cp = vec![BigRational::zero(); n];
    for (m, c) in poly.terms() {
        if m.degree() != 1 || !c.im.is_zero() {
            return Err(Error::NotLinear(poly.to_string()));
        }
        let slot = |v: &[u32]| v.iter().position(|&e| e == 1);
        match (slot(&m.q), slot(&m.p)) {
            (Some(k), None) => cq[k] = c.re.clone(),
            (None, Some(k)) => cp[k] = c.re.clone(),
            _ => return Err(Error::NotLinear(poly.to_string())),
        }
    }
    Ok((cq, cp))
}

/// Generators read off the algebra: `i[H_α, F'_αi] = Σ_j K_ij F'_αj` and
/// `i[H_α, Q_i] = Σ_j V_ij F'_αj`. Returns `(K, V)`; exact values are
/// `K = −2A`, `V = 2I`.
pub fn symbolic_generator(charges: &CentralCharges) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = charges.n();
    let h = build_h(charges, HamiltonianVariant::Anomalous)?;
    let fp: Vec<WeylPolynomial> = (1..=n).map(|i| build_f_prime_alpha(charges, i)).collect::<Result<_>>()?;
    let i_unit = Scalar::i();
    // F'_j is the only basis element containing P_j, so the P-coefficients
    // are the coordinates; the remainder must vanish.
    let coords = |x: &WeylPolynomial| -> Result<Vec<BigRational>> {
        let (_, cp) = linear_coefficients(x)?;
        let mut rest = x.clone();
        for (j, c) in cp.iter().enumerate() {
            rest = rest.sub(&fp[j].scale(&Scalar::real(c.clone())))?;
        }
        if !rest.is_zero() {
            return Err(Error::NotLinear(format!("{x} is outside span{{F'}}")));
        }
        Ok(cp)
    };
    let mut k = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for i in 0..n {
        let df = coords(&h.commutator(&fp[i])?.scale(&i_unit))?;
        let dq = coords(&h.commutator(&WeylPolynomial::q(n, i + 1)?)?.scale(&i_unit))?;
        for j in 0..n {
            k[(i, j)] = rational_to_f64(&df[j]);
            v[(i, j)] = rational_to_f64(&dq[j]);
        }
    }
    Ok((k, v))
}

/// Velocity matrix `L` on the generator basis `(Q_1..Q_n, P_1..P_n)`:
/// `i[H, X_a] = Σ_b L_ab X_b`.
fn generator_on_qp(h: &WeylPolynomial) -> Result<DMatrix<f64>> {
    let n = h.n();
    let mut l = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..2 * n {
        let x = if a < n { WeylPolynomial::q(n, a + 1)? } else { WeylPolynomial::p(n, a - n + 1)? };
        let (cq, cp) = linear_coefficients(&h.commutator(&x)?.scale(&Scalar::i()))?;
        for b in 0..n {
            l[(a, b)] = rational_to_f64(&cq[b]);
            l[(a, n + b)] = rational_to_f64(&cp[b]);
        }
    }
    Ok(l)
}

fn qp_row(poly: &WeylPolynomial) -> Result<Vec<f64>> {
    let (cq, cp) = linear_coefficients(poly)?;
    Ok(cq.iter().chain(&cp).map(rational_to_f64).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct AnomalyFlow {
    pub hamiltonian: HamiltonianVariant,
    /// `dF_αi/dt` at `t = 0` on `(Q, P)`, row `i`.
    pub velocity: Vec<Vec<f64>>,
    /// `F_αi(t)` on `(Q, P)`, row `i`.
    pub coefficients: Vec<Vec<f64>>,
    /// `max |F_αi(t) − F_αi(0)|` over all coefficients.
    pub max_change: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnomalyReport {
    pub t: f64,
    /// `F_αi(0)` on `(Q, P)`.
    pub initial: Vec<Vec<f64>>,
    pub naive: AnomalyFlow,
    pub anomalous: AnomalyFlow,
    /// Max difference between the two evolved coefficient sets.
    pub flow_difference: f64,
}

/// Evolves the `F_αi` under `H_0` and under `H_α`. The velocity generators are
/// read off the exact commutators and exponentiated. Under `H_0` the
/// generators drift, `F_αi(t) = F_αi(0) + t α_ij P_j`; under `H_α` they are
/// constant.
pub fn anomaly_demo(charges: &CentralCharges, t: f64) -> Result<AnomalyReport> {
    let n = charges.n();
    let f: Vec<WeylPolynomial> = (1..=n).map(|i| build_f_alpha(charges, i)).collect::<Result<_>>()?;
    let init = DMatrix::from_row_iterator(n, 2 * n, f.iter().map(qp_row).collect::<Result<Vec<_>>>()?.concat());
    let flow = |variant: HamiltonianVariant| -> Result<(AnomalyFlow, DMatrix<f64>)> {
        let h = build_h(charges, variant)?;
        let l = generator_on_qp(&h)?;
        let evolved = &init * (&l * t).exp();
        let velocity = &init * &l;
        let max_change = (&evolved - &init).amax();
        Ok((
            AnomalyFlow {
                hamiltonian: variant,
                velocity: matrix_rows(&velocity),
                coefficients: matrix_rows(&evolved),
                max_change,
            },
            evolved,
        ))
    };
    let (naive, a) = flow(HamiltonianVariant::Naive)?;
    let (anomalous, b) = flow(HamiltonianVariant::Anomalous)?;
    Ok(AnomalyReport { t, initial: matrix_rows(&init), naive, anomalous, flow_difference: (a - b).amax() })
}

/// One row per sample of `exact_flow` and `rk4_flow` (with `steps` scaled to
/// the sample time), for plotting.
pub fn time_series(charges: &CentralCharges, t_end: f64, samples: usize, steps: usize) -> Result<String> {
    let n = charges.n();
    let mut header = vec!["t".to_string()];
    for i in 1..=n {
        for j in 1..=n {
            header.push(format!("F{i}{j}"));
        }
    }
    header.push("rk4_max_err".into());
    header.push("orthogonality_defect".into());
    let mut out = header.join(",") + "\n";
    for s in 0..=samples {
        let t = t_end * s as f64 / samples.max(1) as f64;
        let ex = exact_flow(charges, t)?;
        let sub = ((steps as f64) * s as f64 / samples.max(1) as f64).ceil().max(1.0) as usize;
        let rk = rk4_flow(charges, t, sub)?;
        let mut row = vec![format!("{t}")];
        row.extend(ex.fprime_coeffs.transpose().iter().map(|v| format!("{v}")));
        row.push(format!("{:e}", ex.distance(&rk)));
        row.push(format!("{:e}", ex.orthogonality_defect()));
        out += &(row.join(",") + "\n");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar(b: i64) -> CentralCharges {
        CentralCharges::planar(BigRational::from_integer(b.into()))
    }

    #[test]
    fn identity_at_zero() {
        let c = planar(1);
        assert_eq!(exact_flow(&c, 0.0).unwrap().distance(&CoefficientState::initial(2)), 0.0);
        for steps in [1, 7, 100] {
            assert_eq!(rk4_flow(&c, 0.0, steps).unwrap().distance(&CoefficientState::initial(2)), 0.0);
        }
        assert!(rk4_flow(&c, 1.0, 0).is_err());
    }

    #[test]
    fn half_rotation() {
        let b = 3.0;
        let s = exact_flow(&planar(3), std::f64::consts::PI / (2.0 * b)).unwrap();
        assert!((&s.fprime_coeffs + DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(exact_flow(&CentralCharges::zero(2), 1.0), Err(Error::SingularCharges { .. })));
    }

    #[test]
    fn energy_coefficient_conserved() {
        for t in [0.3, 5.0, 100.0] {
            let s = exact_flow(&planar(2), t).unwrap();
            assert!((s.energy_coefficient() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symbolic_generator_values() {
        let c = CentralCharges::from_ratios(&[
            vec![(0, 1), (1, 2), (-3, 4), (2, 1)],
            vec![(-1, 2), (0, 1), (5, 3), (-1, 7)],
            vec![(3, 4), (-5, 3), (0, 1), (1, 1)],
            vec![(-2, 1), (1, 7), (-1, 1), (0, 1)],
        ])
        .unwrap();
        let (k, v) = symbolic_generator(&c).unwrap();
        assert!((k + c.to_f64() * 2.0).amax() < 1e-15);
        assert_eq!(v, DMatrix::<f64>::identity(4, 4) * 2.0);
    }

    #[test]
    fn not_linear() {
        let p = WeylPolynomial::parse("1 * Q1^2", 1).unwrap();
        assert!(matches!(linear_coefficients(&p), Err(Error::NotLinear(_))));
        let p = WeylPolynomial::parse("i * Q1", 1).unwrap();
        assert!(linear_coefficients(&p).is_err());
    }

    #[test]
    fn anomaly_drift_and_conservation() {
        let r = anomaly_demo(&planar(2), 0.5).unwrap();
        assert!(r.anomalous.max_change < 1e-12);
        // F_1 = P1 + Q2, velocity α_12 P_2 = 2 P_2
        assert_eq!(r.naive.velocity[0], vec![0.0, 0.0, 0.0, 2.0]);
        assert_eq!(r.naive.velocity[1], vec![0.0, 0.0, -2.0, 0.0]);
        assert!((r.naive.coefficients[0][3] - 1.0).abs() < 1e-12);
        assert!((r.naive.max_change - 1.0).abs() < 1e-12);
        let trivial = anomaly_demo(&CentralCharges::zero(2), 0.5).unwrap();
        assert_eq!(trivial.flow_difference, 0.0);
    }
}
