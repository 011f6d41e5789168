use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "convbound/1";

pub const EXIT_CODES: &str = "\
Exit codes:
  0  success (all verdicts passed, or no verdict)
  1  a verdict failed, or a search found no witness
  2  usage, parse, validation, I/O or config-schema error
  3  a resource cap was exceeded
  4  the requested mode is not available for this space
  5  a computation was inconclusive at the configured window

Spaces: presets f2, f3, z, z2, z3, z2*z (generators a b | t), or free:K, lattice:K,
fpa:R1,R2,..+F (free product of Z^Ri factors and F copies of Z).
Predicates: whole, exp:W1,W2,.. (kernel of the weighted exponent sum to Z),
parity:W1,W2,.. (kernel of the weighted exponent sum to Z/2).";

#[derive(Parser, Debug)]
#[command(name = "convbound", version, about = "Contracting geometry and Patterson-Sullivan estimators on model groups", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    /// Run the configuration in this TOML file instead of a subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    pub emit_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunArgs {
    /// Output format: JSON lines for records, CSV for tables.
    #[arg(long, global = true, value_enum, default_value = "jsonl")]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of elements any single enumeration may visit.
    #[arg(long, global = true)]
    pub enum_cap: Option<u64>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

impl Default for RunArgs {
    fn default() -> Self {
        Cli::parse_from(["convbound"]).run
    }
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    #[serde(default)]
    pub run: RunArgs,
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Sphere counts, optionally constrained to a subgroup, and normal forms.
    Space(SpaceArgs),
    /// Exhaustive contracting certification of an axis on a ball.
    Certify(CertifyArgs),
    /// Barriers along a canonical geodesic.
    Barriers(BarriersArgs),
    /// Projection complex of a windowed axis family and its diagnostics.
    Pcomplex(PcomplexArgs),
    /// Visual spheres of the projection complex and their series.
    Spheres(SpheresArgs),
    /// Horofunction vectors, limits along rays and finite differences.
    Horo(HoroArgs),
    /// Members of a plain or partial shadow inside a ball.
    Shadow(ShadowArgs),
    /// Barrier counts along a random geodesic ray.
    Myrberg(MyrbergArgs),
    /// North-South dynamics of an element on shadows.
    Nsdyn(NsdynArgs),
    /// Growth quotients and the critical exponent estimate.
    Exponent(ExponentArgs),
    /// Truncated Patterson-Sullivan measure, shadow masses and conformality.
    Psmeasure(PsmeasureArgs),
    /// Shadow-lemma ratio tables in exact or estimator mode.
    Shadowlemma(ShadowlemmaArgs),
    /// Divergence evidence at the critical exponent.
    Hts(HtsArgs),
    /// Cogrowth of a normal subgroup and the doubling-map audit.
    Cogrowth(CogrowthArgs),
    /// Random walks: drift, horofunction convergence, barrier recurrence.
    Walk(WalkArgs),
}

// Config files and the command line share one set of defaults: the clap ones.
macro_rules! defaults_from_clap {
    ($($t:ident => $v:ident $name:literal),* $(,)?) => {$(
        impl Default for $t {
            fn default() -> Self {
                match Cli::parse_from(["convbound", $name]).command {
                    Some(Command::$v(a)) => a,
                    _ => unreachable!("subcommand {} parses with defaults", $name),
                }
            }
        }
    )*};
}

defaults_from_clap! {
    SpaceArgs => Space "space",
    CertifyArgs => Certify "certify",
    BarriersArgs => Barriers "barriers",
    PcomplexArgs => Pcomplex "pcomplex",
    SpheresArgs => Spheres "spheres",
    HoroArgs => Horo "horo",
    ShadowArgs => Shadow "shadow",
    MyrbergArgs => Myrberg "myrberg",
    NsdynArgs => Nsdyn "nsdyn",
    ExponentArgs => Exponent "exponent",
    PsmeasureArgs => Psmeasure "psmeasure",
    ShadowlemmaArgs => Shadowlemma "shadowlemma",
    HtsArgs => Hts "hts",
    CogrowthArgs => Cogrowth "cogrowth",
    WalkArgs => Walk "walk",
}

impl Default for FamilyArgs {
    fn default() -> Self {
        PcomplexArgs::default().family
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    #[arg(long, default_value_t = 10)]
    pub nmax: u64,
    /// Also report the normal form and length of this word.
    #[arg(long)]
    pub word: Option<String>,
    /// Subgroup for the constrained counts.
    #[arg(long, default_value = "whole")]
    pub predicate: String,
    /// auto, dp or stream.
    #[arg(long, default_value = "auto")]
    pub method: String,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    /// Axis element.
    #[arg(long, default_value = "a b")]
    pub f: String,
    /// Contracting constant to certify.
    #[arg(long, default_value_t = 0)]
    pub c: u64,
    /// Verification radius.
    #[arg(long, default_value_t = 10)]
    pub radius: u64,
    /// Axis window (default 4·radius + 2|f|).
    #[arg(long)]
    pub window: Option<u64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BarriersArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    #[arg(long, default_value = "1")]
    pub from: String,
    #[arg(long, default_value = "a b a b a b a b")]
    pub to: String,
    /// Barrier elements (repeatable; default depends on the space).
    #[arg(long = "f")]
    pub f: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub r: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    /// Family elements (repeatable; default: the shipped family of the space).
    #[arg(long = "f")]
    pub f: Vec<String>,
    /// Family radius.
    #[arg(long, default_value_t = 6)]
    pub rfam: u64,
    /// Axis window.
    #[arg(long, default_value_t = 14)]
    pub window: u64,
    /// Fixed projection constant (scanned when absent).
    #[arg(long)]
    pub kappa: Option<u64>,
    /// Fixed complex constant (scanned when absent).
    #[arg(long)]
    pub k: Option<u64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PcomplexArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Write the adjacency list here.
    #[arg(long)]
    pub adjacency: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpheresArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Base vertex: the axis of this family element through the origin.
    #[arg(long, default_value_t = 0)]
    pub base_kind: usize,
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Series exponent (default log(2k-1) on free groups).
    #[arg(long)]
    pub s: Option<f64>,
    /// Verdict bound on max/min of the per-n sums.
    #[arg(long, default_value_t = 10.0)]
    pub max_ratio: f64,
    /// Verdict bound on the submultiplicativity defect.
    #[arg(long, default_value_t = 10.0)]
    pub max_defect: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HoroArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    /// Point whose horofunction is reported.
    #[arg(long)]
    pub y: Option<String>,
    /// Limit along y_k = ray^k instead of a single point.
    #[arg(long)]
    pub ray: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub terms: usize,
    #[arg(long, default_value_t = 2)]
    pub radius: u64,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    /// Second point (or ray, with --ray) for the finite difference.
    #[arg(long)]
    pub other: Option<String>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShadowArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    #[arg(long, default_value = "1")]
    pub source: String,
    #[arg(long, default_value = "a")]
    pub target: String,
    #[arg(long, default_value_t = 0)]
    pub r: u64,
    /// Barrier elements; a partial shadow when given.
    #[arg(long = "f")]
    pub f: Vec<String>,
    /// canonical or some-geodesic.
    #[arg(long, default_value = "canonical")]
    pub semantics: String,
    /// Members are listed from this ball around o.
    #[arg(long, default_value_t = 6)]
    pub ball: u64,
    /// Emit every member.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MyrbergArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    #[arg(long, default_value_t = 1000)]
    pub length: usize,
    #[arg(long = "f")]
    pub f: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub r: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NsdynArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    #[arg(long, default_value = "a b")]
    pub h: String,
    /// Attracting shadow target (default h^3).
    #[arg(long)]
    pub u: Option<String>,
    /// Repelling shadow target (default h^-3).
    #[arg(long)]
    pub v: Option<String>,
    /// Shadow radius.
    #[arg(long, default_value_t = 0)]
    pub r: u64,
    /// Samples: the sphere of this radius.
    #[arg(long, default_value_t = 6)]
    pub sphere: u64,
    #[arg(long, default_value_t = 10)]
    pub nmax: u32,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    #[arg(long, default_value = "whole")]
    pub predicate: String,
    #[arg(long, default_value_t = 14)]
    pub nmax: u64,
    /// Annulus half-width.
    #[arg(long, default_value_t = 0)]
    pub delta: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsmeasureArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    /// Exponent (default: growth quotient at the radius + 0.05).
    #[arg(long)]
    pub s: Option<f64>,
    /// Basepoint of the measure.
    #[arg(long, default_value = "1")]
    pub x: String,
    /// Truncation radius.
    #[arg(long, default_value_t = 12)]
    pub radius: u64,
    /// Report the mass of the shadow of this point seen from o.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub r: u64,
    /// Compare μ_{go} with μ_o on the cylinders of this depth.
    #[arg(long)]
    pub conformal_g: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub depth: u64,
    /// Exact limiting measure for the conformality table (free groups).
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShadowlemmaArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    /// Exact-limit mode (free groups).
    #[arg(long)]
    pub exact: bool,
    /// Estimator exponent (default: growth quotient at the radius + 0.05).
    #[arg(long)]
    pub s: Option<f64>,
    /// Estimator truncation radius.
    #[arg(long, default_value_t = 14)]
    pub radius: u64,
    #[arg(long, default_value_t = 1)]
    pub n1: u64,
    #[arg(long, default_value_t = 8)]
    pub n2: u64,
    #[arg(long, default_value_t = 0)]
    pub r: u64,
    #[arg(long = "f")]
    pub f: Vec<String>,
    /// Exponent in the ratios (default log(2k-1) on free groups, else the growth quotient).
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub overlap_samples: usize,
    /// Verdict: every ratio at least this.
    #[arg(long)]
    pub ratio_min: Option<f64>,
    /// Verdict: every ratio at most this.
    #[arg(long)]
    pub ratio_max: Option<f64>,
    /// Emit one row per target.
    #[arg(long)]
    pub rows: bool,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HtsArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    #[arg(long, default_value = "whole")]
    pub predicate: String,
    /// Critical exponent (default: the estimate at --nmax).
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 14)]
    pub nmax: u64,
    #[arg(long, default_value_t = 20)]
    pub radius: u64,
    #[arg(long, default_value_t = 0.2)]
    pub conv_offset: f64,
    #[arg(long, default_value_t = 60)]
    pub conv_radius: u64,
    /// Deep points sampled for the conical-mass proxy (0 disables it).
    #[arg(long, default_value_t = 0)]
    pub proxy_samples: usize,
    #[arg(long = "f")]
    pub f: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub r: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CogrowthArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    /// Normal subgroup H.
    #[arg(long, default_value = "exp:1,0")]
    pub predicate: String,
    #[arg(long, default_value_t = 24)]
    pub nmax: u64,
    /// Annulus radius of the doubling audit (0 skips it).
    #[arg(long, default_value_t = 8)]
    pub audit_n: u64,
    #[arg(long, default_value_t = 0)]
    pub delta: u64,
    /// Extension barrier radius.
    #[arg(long, default_value_t = 0)]
    pub r: u64,
    /// Extension elements inside H (default depends on the space).
    #[arg(long = "f")]
    pub f: Vec<String>,
    /// Separation radius (default ‖Fo‖ + 4r + 4Δ).
    #[arg(long)]
    pub rsep: Option<u64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkArgs {
    #[arg(long, default_value = "f2")]
    pub space: String,
    /// Step distribution: srw, lazy, or a file of `weight word` lines.
    #[arg(long, default_value = "srw")]
    pub mu: String,
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    /// Trajectories, seeded seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Horovector ball radius.
    #[arg(long, default_value_t = 4)]
    pub radius: u64,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, default_value_t = 1000)]
    pub checkpoint: u64,
    /// Barrier elements for the Myrberg counts (default depends on the space).
    #[arg(long = "f")]
    pub f: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub barrier_r: u64,
}
