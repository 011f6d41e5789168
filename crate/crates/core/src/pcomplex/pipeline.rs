use serde::Serialize;

use super::axioms::{axioms_12, fill_axiom3, AxiomReport};
use super::graph::{build_complex, check_tripod, hyperbolicity_scan, scan_forcing, Hyperbolicity, PCGraph, TripodReport};
use super::interval::{all_intervals, scan_k, Interval, LargeProjectionTable};
use super::AxisFamily;
use crate::error::{Error, Result};
use crate::space::{ModelSpace, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOptions {
    /// Fixed κ; scanned when `None`.
    pub kappa: Option<u64>,
    /// Fixed K; scanned from κ when `None`.
    pub k: Option<u64>,
    /// The K scan stops at `κ + k_scan_span`.
    pub k_scan_span: u64,
    /// Sampled four-point scan `(count, seed)` above the exhaustive cap.
    pub hyperbolicity_samples: (u64, u64),
    /// The tripod check runs on families with at most this many axes.
    pub tripod_cap: usize,
    /// Scan the forcing constant up to `K + span`; skipped when `None`.
    pub forcing_span: Option<u64>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            kappa: None,
            k: None,
            k_scan_span: 60,
            hyperbolicity_samples: (200_000, 1),
            tripod_cap: 200,
            forcing_span: Some(60),
        }
    }
}

/// The projection complex of an axis family with its intermediate objects.
pub struct Pipeline {
    pub family: AxisFamily,
    pub kappa: u64,
    pub k: u64,
    pub table: LargeProjectionTable,
    pub intervals: Vec<Interval>,
    pub graph: PCGraph,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineSummary {
    pub axes: usize,
    pub r_fam: u64,
    pub window: u64,
    pub axioms: AxiomReport,
    pub kappa: u64,
    pub k: u64,
    pub intervals: usize,
    /// Largest sandwich defect `D` over all intervals.
    pub sandwich_max: u64,
    pub interval_len_max: usize,
    pub vertices: usize,
    pub edges: usize,
    pub connected: bool,
    pub diameter: Option<u32>,
    pub interval_path_breaks: usize,
    pub hyperbolicity: Hyperbolicity,
    /// Smallest forcing constant found by the scan.
    pub forcing_k_hat: Option<u64>,
    pub tripod: Option<TripodReport>,
    pub warnings: Vec<String>,
}

/// Builds the family, fixes κ (axioms 1 and 2) and K (total order with edge paths),
/// computes every interval and the complex, then runs the graph diagnostics.
pub fn run_pipeline(
    space: &ModelSpace,
    fs: &[Word],
    r_fam: u64,
    window: u64,
    opts: &PipelineOptions,
) -> Result<(Pipeline, PipelineSummary)> {
    let family = AxisFamily::build(space, fs, r_fam, window)?;
    let mut axioms = axioms_12(&family, opts.kappa);
    let kappa = axioms.kappa;
    let table = LargeProjectionTable::build(&family, kappa);
    fill_axiom3(&mut axioms, &family, &table);
    let k = match opts.k {
        Some(k) => k,
        None => scan_k(&family, &table, kappa, kappa + opts.k_scan_span).ok_or_else(|| {
            Error::Order(format!(
                "no K in {kappa}..={} orders every interval",
                kappa + opts.k_scan_span
            ))
        })?,
    };
    let intervals = all_intervals(&family, &table, kappa, k, true)?;
    let graph = build_complex(&family, &table, kappa, k);
    let samples = (graph.len() > super::EXHAUSTIVE_HYPERBOLICITY_CAP).then_some(opts.hyperbolicity_samples);
    let hyperbolicity = hyperbolicity_scan(&graph, samples)?;
    let forcing_k_hat = opts
        .forcing_span
        .and_then(|span| scan_forcing(&graph, &table, k + span))
        .map(|f| f.k_hat);
    let tripod = (family.len() <= opts.tripod_cap).then(|| check_tripod(&family, &intervals));
    let summary = PipelineSummary {
        axes: family.len(),
        r_fam,
        window,
        axioms,
        kappa,
        k,
        intervals: intervals.len(),
        sandwich_max: intervals.iter().map(|i| i.sandwich).max().unwrap_or(0),
        interval_len_max: intervals.iter().map(|i| i.members.len()).max().unwrap_or(0),
        vertices: graph.len(),
        edges: graph.edge_count(),
        connected: graph.connected,
        diameter: graph.diameter(),
        interval_path_breaks: graph.interval_path_breaks,
        hyperbolicity,
        forcing_k_hat,
        tripod,
        warnings: graph.warnings.clone(),
    };
    Ok((
        Pipeline {
            family,
            kappa,
            k,
            table,
            intervals,
            graph,
        },
        summary,
    ))
}
