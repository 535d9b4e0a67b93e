//! Placing `T(E)` on an extracted subsequence so that it avoids `D + c`.

mod limit;
mod placement;
mod scheme;
mod subspace;

pub use limit::{limit_along, LimitEstimate, LimitFunctional, LinearityCheck};
pub use placement::{
    build_extension, d_probes, extract_for, scheme_coordinate, scheme_embed, scheme_isometry_defect,
    separation_certificate, separation_sequence, separation_witness, ExtensionConfig, ExtensionRecord,
    LimitEntry, SeparationCertificate,
};
pub use scheme::{bw_extract, diagonal_extract, IndexScheme, SchemeMode, Stage, DEFAULT_SCAN_LIMIT};
pub use subspace::{probe_rank, DMode, SubspaceD, PROBE_WINDOW};
