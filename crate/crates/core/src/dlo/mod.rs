//! Linear orders reduced to conjugacy of automorphisms of ℚ.

pub mod embed;
pub mod glass;
pub mod phi;
pub mod rational;

pub use embed::{closed_embed, ClosedEmbedding, Location};
pub use glass::{canonical_matching, glass_conjugator, recover_order_iso, GlassConjugator, OrbitalMatching};
pub use phi::{
    build_phi_dlo, dlo_reduce, orbital_classify, same_orbital, IndexMap, Orbital, OrbitalSpan, Orbitality,
    OrderAutomorphism, Parity, PhiDlo, RationalMap, Translation,
};
pub use rational::{cw_rational, rational_index, Rational, RationalInterval};
