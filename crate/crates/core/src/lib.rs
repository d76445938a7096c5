//! Computable reductions of countable-structure isomorphism to conjugacy of
//! automorphisms: linear orders into `Aut(ℚ)`, graphs into `Aut(Γ)` for the
//! random graph `Γ`, with the verification tooling around them.

pub mod backforth;
pub mod dlo;
pub mod error;
pub mod graph;
pub mod invariants;
pub mod nat;
pub mod pairing;
pub mod rado;
pub mod staged;
pub mod structure;

pub use error::{Error, Result};
pub use nat::Nat;
pub use staged::{PartialMap, StagedMap};
