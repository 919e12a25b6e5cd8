//! Exact computer algebra over the canonical generators `Q_1..Q_n`,
//! `P_1..P_n` with `[P_i, Q_j] = -i δ_ij`.

mod charges;
mod identities;
mod operators;
mod poly;
mod scalar;

pub use charges::CentralCharges;
pub use identities::{printed_anomaly_residuals, verify_identity_suite, IdentityCheck, IdentityReport, Residual, ANOMALY};
pub use operators::{build_f_alpha, build_f_prime_alpha, build_h, canonical_hamiltonian, HamiltonianVariant};
pub use poly::{Monomial, WeylPolynomial};
pub use scalar::{parse_rational, rational_to_f64, Scalar};
