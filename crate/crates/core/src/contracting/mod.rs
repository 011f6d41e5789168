//! Nearest-point projections, contracting certificates, barriers and admissible paths.

mod admissible;
mod axis;
mod barrier;
mod certify;

pub use admissible::{
    fellow_travel_check, measured_constants, truncate, verify_admissible, AdmissibilityReport,
    AdmissiblePath, FellowTravelReport, SegmentCheck,
};
pub use axis::{canonical_coset_rep, cyclic_reduction, primitive_root, proj_distance, Axis, ProjectionResult};
pub use barrier::{count_barriers, extend, find_barriers, is_barrier, BarrierWitness, ExtensionDiagnostic};
pub use certify::{
    bounded_intersection, certify_contracting, smallest_contracting_constant, ContractingCertificate,
    Counterexample, Verdict,
};
