//! Monte-Carlo experiments on `M_n`: sentence-probability series with
//! convergence diagnostics, growth classification of pairs, and closure
//! scans.

mod classify;
mod scans;
mod series;
mod stats;

pub use classify::{
    classify_pair, weakly_nice_scan, ClassificationReport, FamilyReport, GrowthRow, Pair, PairVerdict, Placement,
    ScanConfig, COUNT_LIMIT, DEFAULT_EPS_HI, DEFAULT_EPS_LO, MAX_NEW_VERTICES,
};
pub use scans::{
    closure_size_scan, empty_closure_scan, local_relation_check, simply_good_check, ClosureSizeRow,
    EmptyClosureRow, GoodConfig, GoodReport, LocalRelationReport, EXTENSION_LIMIT, LOCAL_RELATION_BOUND,
};
pub use series::{
    convergence_diagnostics, estimate_prob, estimate_prob_at_level, prob_series, ConvergenceVerdict,
    EstimateSeries, GrowthFunction, SeriesEntry, Thresholds, Verdict, DEFAULT_LEVEL,
};
pub use stats::{linear_fit, median, wilson, z_for_level, LinearFit};
