//! Term algebra over a finite signature: positions, compositions,
//! essentiality relative to an equational theory, deduction with checkable
//! certificates, hypersubstitutions and balanced identities.

pub mod algebra;
pub mod balanced;
pub mod deduction;
pub mod error;
pub mod essentiality;
pub mod hyper;
pub mod parse;
pub mod sample;
pub mod sigma;
pub mod term;
pub mod theory;
pub mod witness;

pub use algebra::{enumerate_models, Assignment, FiniteAlgebra};
pub use balanced::{is_sigma_balanced, Balance};
pub use error::{Error, Result};
pub use parse::{parse_identity, parse_term};
pub use term::{Identity, Position, PositionStyle, Signature, Symbol, Term};
pub use deduction::{check_proof, derive, Derivation, Proof, Rule, System};
pub use essentiality::{Mode, Status};
pub use hyper::Hypersubstitution;
pub use sigma::sigma_compose;
pub use theory::{Budget, OracleKind, Theory, Verdict};
pub use witness::Witness;
