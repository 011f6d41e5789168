//! Projection axioms, the projection complex of a windowed axis family, and the
//! diagnostics built on it.

mod axioms;
mod family;
mod graph;
mod interval;
mod lift;
mod pipeline;
mod spheres;

pub use axioms::{check_axioms, large_projections, scan_kappa, AxiomReport, AxiomStatus};
pub use family::{AxisFamily, ProjSet};
pub use graph::{
    build_complex, check_forcing, check_tripod, hyperbolicity_scan, scan_forcing, ForcingReport, Hyperbolicity,
    PCGraph, TripodReport, EXHAUSTIVE_HYPERBOLICITY_CAP, UNREACHABLE,
};
pub use interval::{all_intervals, interval_set, order_interval, sandwich_defect, scan_k, Interval, LargeProjectionTable};
pub use lift::{lift_path, LiftSummary, LiftedPath};
pub use pipeline::{run_pipeline, Pipeline, PipelineOptions, PipelineSummary};
pub use spheres::{net, slab, tn_series, visual_spheres, SphereReport, TnSeries, VisualSphere};
