use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of records to cross-validation folds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// `assignments[i]` is the fold of record `i`.
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl FoldPlan {
    pub fn members(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified k-fold plan.
///
/// Records are shuffled with a ChaCha8 stream seeded from `seed`, grouped by
/// class (stable), and dealt round-robin across the folds. Dealing the
/// concatenated class groups keeps both overall fold sizes and per-class
/// fold counts within one of each other.
pub fn stratified_folds(target_classes: &[usize], k: usize, seed: u64) -> Result<FoldPlan> {
    let n = target_classes.len();
    if k < 2 {
        return Err(Error::Usage(format!("fold count must be at least 2, got {k}")));
    }
    if n < k {
        return Err(Error::InsufficientData(format!(
            "{n} records cannot be split into {k} folds; use leave-one-out (k = {n})"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order.sort_by_key(|&i| target_classes[i]);

    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }

    let mut class_sizes = std::collections::BTreeMap::new();
    for &c in target_classes {
        *class_sizes.entry(c).or_insert(0usize) += 1;
    }
    let warnings = class_sizes
        .iter()
        .filter(|(_, &size)| size < k)
        .map(|(c, size)| format!("class {c} has {size} records, fewer than {k} folds"))
        .collect();

    Ok(FoldPlan { k, assignments, seed, warnings })
}
