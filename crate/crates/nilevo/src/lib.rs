//! Nilpotent evolution algebras of maximal index: power sequences, the
//! γ-norm, derivations, automorphisms, exponentials of derivations and the
//! linear ODE they drive.
//!
//! Matrices follow the row convention: row `i` of a [`LinearMap`] is the
//! image of `e_i`, and row `i` of the structural matrix is `e_i²`.

pub mod algebra;
pub mod automorphisms;
pub mod cli;
pub mod derivations;
pub mod error;
pub mod exp_group;
pub mod linalg;
pub mod norm;
pub mod numeric;
pub mod ode;

pub use algebra::{max_nilpotency_index, EvolutionAlgebra, Subspace};
pub use automorphisms::{build_automorphism, eta, is_automorphism, AutomorphismParams, Eta};
pub use derivations::{
    build_derivation, classify_case, derivation_space, is_derivation, Case, DerivationParams,
};
pub use error::{Error, Result};
pub use exp_group::{
    exp_derivation_closed, exp_series, membership_exp_der, quotient_report, ExpResult,
};
pub use linalg::{Element, LinearMap};
pub use numeric::{Field, FieldTag, Rational, Scalar, Transcendental};
pub use ode::{solve_closed, solve_numeric, Trajectory};
