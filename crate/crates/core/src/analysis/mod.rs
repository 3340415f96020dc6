//! Measurements: densities, confidence error, distances, entropies,
//! independence, list recovery and predicted bounds.

pub mod bounds;
pub mod confidence;
pub mod dist;
pub mod family;

pub use bounds::{bound_calculator, Applicability, Bound, BoundQuery};
pub use confidence::{
    confidence_error, list_recovery, mu_t_rows, twise_check, write_histogram_csv, EvalOptions, EvalReport, Mode, EVAL_REPORT_SCHEMA,
    TwiseReport, DEFAULT_CAP_STATES,
};
pub use dist::{block_source_check, min_entropy_q, stat_distance, BlockReport, DistributionTable};
pub use family::{densities, Family, FamilySpec, Member};
