//! Identity verification suites. Each suite recomputes both sides of
//! a correspondence from independent engines and records exact
//! equalities into a [`VerificationReport`](crate::report::VerificationReport).
//!
//! - [`check_theorem18`]: the cBGW <-> NBI free-energy resummations
//!   (both directions), the antisymmetry of their linear/quadratic
//!   exponents, and NBI route-independence.
//! - [`check_cor41`] / [`check_cor42`]: the kappa-class consequences
//!   (vanishing, the 2-adic resummation of c_g, the Bernoulli value of
//!   the zero-pointed integral, and the inverse relations).
//! - [`check_kdv`]: the KdV equation as a windowed residual on a
//!   truncated solution.
//! - [`check_hirota`]: the bilinear residue equations on a truncated
//!   tau-function, with a derived exactness window.
//! - [`check_galilean_group`]: generator and group-law properties of
//!   the symmetry itself.
//! - [`check_initial_values`]: the closed-form initial data of the
//!   cBGW and NBI solutions.

mod correspondence;
mod group;
mod hirota;
mod kdv;

pub use correspondence::{check_cor41, check_cor42, check_initial_values, check_theorem18};
pub use group::check_galilean_group;
pub use hirota::{check_hirota, HirotaWindow};
pub use kdv::check_kdv;
