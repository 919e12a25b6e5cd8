//! Exact and numerical tools for quantum systems whose abelian symmetry
//! algebra carries central charges.
//!
//! * [`algebra`] builds every operator as an exact normal-ordered polynomial
//!   in canonical generators `Q_i`, `P_i` and verifies commutator identities
//!   with zero residual.
//! * [`canonical`] brings a real antisymmetric charge matrix to Cartan block
//!   form by an orthogonal congruence.
//! * [`spectrum`] enumerates oscillator levels and counts their degeneracy
//!   exactly.
//! * [`weyl`] realizes the Weyl group of `SO(2l)` as signed permutations.
//! * [`fock`] realizes operators on a truncated occupation-number basis and
//!   diagonalizes them.
//! * [`dynamics`] integrates the Heisenberg equations on coefficient matrices.

pub mod algebra;
pub mod canonical;
pub mod dynamics;
mod error;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod spectrum;
pub mod weyl;

pub use error::{Error, Result};
