//! Accuracy assessors: noise, outliers, incompleteness, redundancy, and
//! inconsistency.

mod consistency;
mod duplicates;
mod incompleteness;
mod noise;
mod outliers;

pub use consistency::{
    check_consistency, ConsistencyFinding, ConsistencyReport, FindingKind, FormulaCheck, Mismatch,
    Tolerance, DEFAULT_RELATIVE_TOLERANCE, LABEL_SWAP_SHARE,
};
pub use duplicates::detect_duplicates;
pub use incompleteness::{assess_incompleteness, AttributeMissing, IncompletenessSummary};
pub use noise::{apply_pre_steps, assess_noise, NoiseAssessment, Prepared};
pub use outliers::{detect_outliers, quartiles, OutlierReport, OutlierSummary, QuartileMethod, Quartiles};
