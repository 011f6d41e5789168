//! Horofunctions on finite balls, shadows, conical and Myrberg witnesses, and
//! North-South dynamics.

mod conical;
mod horo;
mod myrberg;
mod ns;
mod shadow;

pub use conical::{conical_witness, AxisSpread, CertifiedElement, ConicalParams, ConicalWitness};
pub use horo::{
    busemann_cocycle, finite_difference, horo_limit, horofunction_vector, Divergence, FiniteDifference, HoroLimit,
    HoroSource, HoroVector,
};
pub use myrberg::{myrberg_stats, random_geodesic_ray, MyrbergStats};
pub use ns::{ns_dynamics, NsReport};
pub use shadow::{shadow_members, GeodesicSemantics, Shadow, ShadowSpec, SOME_GEODESIC_MAX_RADIUS};

/// Default number of consecutive agreeing terms for a horofunction limit.
pub const DEFAULT_STABILIZATION_WINDOW: usize = 5;
