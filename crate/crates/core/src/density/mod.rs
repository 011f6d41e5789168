//! Poincaré series, growth exponents, Patterson-Sullivan estimators and the shadow,
//! conformality, divergence and cogrowth checks built on them.

mod cogrowth;
mod conformal;
mod hts;
mod measure;
mod series;

pub use cogrowth::{cogrowth_check, doubling_audit, separated_subset, AuditFlag, AuditParams, CogrowthReport, DoublingAudit};
pub use conformal::{conformality_check, ConformalityMode, ConformalityReport, ConformalityRow};
pub use hts::{hts_evidence, ConicalProxy, ConicalProxyParams, ConvergenceCheck, HtsParams, HtsReport};
pub use measure::{
    exact_cylinder_mass, exact_shadow_report, extends_spelling, is_spelling_prefix, ps_measure, shadow_report,
    AnnulusSummary, MeasureEstimate, ShadowReport, ShadowReportParams, ShadowRow,
};
pub use series::{critical_exponent, orbit_counts, poincare_partial, slope, ExponentEstimate, ExponentRow, KahanSum, PoincareEstimate};
