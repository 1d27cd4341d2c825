//! Hilbert symbols, the corestricted quaternion algebras and Brauer–Manin
//! verdicts.

pub mod algebra;
pub mod hilbert;
pub mod profile;
pub mod quadratic;
pub mod verdict;

#[cfg(test)]
mod tests;

pub use algebra::{
    algebra_generators, cor_invariant, global_pairing_check, support, Coordinate, EvalPoint, GeneratorSet,
    GeneratorShape, PairingReport, QuatAlgebraSpec, SpecialCase,
};
pub use hilbert::{hilbert_symbol_q, sum_over_places, support_places, Invariant, Place};
pub use profile::{invariant_profile, InvariantProfile, ProfileConfig, ProfileSample, ProfileStatus, SamplePoint};
pub use quadratic::{
    hilbert_symbol_quadratic_local, places_above, quadratic_local_data, FElem, IsotropyConfig, PlaceAbove,
    QuadraticLocalData,
};
pub use verdict::{bm_verdict, bm_verdict_with, candidate_places, spot_check, BMVerdict, BrauerConfig, VerdictKind};
