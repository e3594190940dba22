//! Target discretization, gain-ratio decision trees, and cross-validated
//! misclassification.

mod cv;
mod discretize;
mod folds;
mod tree;

pub use cv::{misclassification_rate, misclassification_with_plan, FoldResult, NoiseParams, NoiseResult};
pub use discretize::{
    discretize, discretize_equal_frequency, discretize_equal_width, DiscretizationMethod,
    Discretizer,
};
pub use folds::{stratified_folds, FoldPlan};
pub use tree::{
    added_errors, argmax, build_tree, build_tree_on, feature_columns, DecisionTree, Node,
    TreeParams, GAIN_EPS,
};
