//! Deduction systems: proof scripts, checking, rewriting and saturation.

pub mod check;
pub mod proof;
pub mod rewrite;
pub mod saturate;

pub use check::{check_proof, check_proof_with, CheckFailure, CheckOptions, SideConditions};
pub use proof::{Instantiation, Proof, ProofBuilder, ProofStep, Rule};
pub use saturate::{closure_from_seeds, closure_sample, derive, ClosureConfig, ClosureSample, Derivation, System};
