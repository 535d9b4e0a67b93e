//! Isometric embeddings of separable Banach spaces into `ℓ∞` that avoid the
//! convergent sequences `c`, with finite certificates for every construction.
//!
//! * [`seq`]: bounded sequences as lazy coordinate oracles.
//! * [`spaces`]: separable spaces with a dense unit-sphere net and norming functionals.
//! * [`embed`]: `T(x) = (φ_1(x), −φ_1(x), φ_2(x), …)` and its defect and oscillation certificates.
//! * [`extend`]: subsequence extraction over a subspace `D` and the placement avoiding `D + c`.
//! * [`verify`]: classification against `c`, certificate suites and brute-force oracles.

pub mod embed;
pub mod error;
pub mod extend;
pub mod seq;
pub mod seqspec;
pub mod spaces;
pub mod verify;
pub mod witness;

pub use embed::{embed_t1, isometry_defect, oscillation_witness, Embedding, IsometryDefect};
pub use error::{Error, Exhausted, Result};
pub use extend::{
    bw_extract, diagonal_extract, limit_along, scheme_embed, separation_witness, IndexScheme, SubspaceD,
};
pub use seq::{cluster_estimates, combine, coordinate, prefix_sup, BoundedSeq, ClusterEstimate, SeqTag};
pub use spaces::{apply_functional, net_distance, net_point, norm, norming_functional, Element, Functional, SeparableSpace};
pub use verify::{brute_force_sup, classify_c, Verdict};
pub use witness::{OscillationWitness, WitnessError};
