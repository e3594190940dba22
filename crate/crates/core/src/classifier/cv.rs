use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discretize::{discretize, DiscretizationMethod, Discretizer};
use super::folds::{stratified_folds, FoldPlan};
use super::tree::{build_tree_on, TreeParams};
use crate::dataset::{Cell, Dataset};
use crate::error::{Error, Result};
use crate::stats::percent_rounded;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub folds: usize,
    pub classes: usize,
    pub method: DiscretizationMethod,
    pub seed: u64,
    pub tree: TreeParams,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            folds: 5,
            classes: 4,
            method: DiscretizationMethod::EqualFrequency,
            seed: 42,
            tree: TreeParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub size: usize,
    pub misclassified: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseResult {
    /// Percentage rounded half-up to one decimal.
    pub noisy_percent: f64,
    pub misclassified: usize,
    pub evaluated: usize,
    pub per_fold: Vec<FoldResult>,
    /// Record indices (into the input dataset) misclassified in their fold.
    pub flagged_records: Vec<usize>,
    pub discretizer: Discretizer,
    pub warnings: Vec<String>,
}

/// Cross-validated misclassification of the discretized target.
///
/// Records with a missing target are left out (and reported in the
/// warnings). Only attributes with the feature role are used for training.
pub fn misclassification_rate(ds: &Dataset, params: &NoiseParams) -> Result<NoiseResult> {
    let target = ds
        .target_index()?
        .ok_or_else(|| Error::Config("no target attribute declared".into()))?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in ds.records.iter().enumerate() {
        match &rec[target] {
            Cell::Missing => {}
            Cell::Number(v) => {
                rows.push(i);
                values.push(*v);
            }
            other => {
                return Err(Error::Config(format!(
                    "target `{}` must be numeric, record {} holds {other:?}",
                    ds.attributes[target].name,
                    i + 1
                )))
            }
        }
    }
    let mut warnings = Vec::new();
    if rows.len() < ds.len() {
        warnings.push(format!(
            "{} records with a missing target were left out",
            ds.len() - rows.len()
        ));
    }
    if rows.len() < params.folds {
        return Err(Error::InsufficientData(format!(
            "{} usable records for {}-fold cross-validation; use leave-one-out (k = {})",
            rows.len(),
            params.folds,
            rows.len()
        )));
    }
    let discretizer = discretize(&values, params.classes, params.method)?;
    if discretizer.tie_adjusted {
        warnings.push(format!(
            "tied target values gave uneven class sizes {:?}",
            discretizer.class_sizes
        ));
    }
    let sub_classes: Vec<usize> = values.iter().map(|&v| discretizer.class_of(v)).collect();
    let plan = stratified_folds(&sub_classes, params.folds, params.seed)?;
    warnings.extend(plan.warnings.iter().cloned());

    let mut classes = vec![0; ds.len()];
    for (&r, &c) in rows.iter().zip(&sub_classes) {
        classes[r] = c;
    }
    let mut result =
        misclassification_with_plan(ds, &classes, discretizer.class_count, &rows, &plan, &params.tree)?;
    result.discretizer = discretizer;
    result.warnings = warnings;
    Ok(result)
}

/// Cross-validation with a given plan. `plan.assignments[j]` is the fold of
/// record `rows[j]`; `classes` is indexed by record of `ds`.
pub fn misclassification_with_plan(
    ds: &Dataset,
    classes: &[usize],
    class_count: usize,
    rows: &[usize],
    plan: &FoldPlan,
    tree: &TreeParams,
) -> Result<NoiseResult> {
    if plan.assignments.len() != rows.len() {
        return Err(Error::Usage(format!(
            "fold plan covers {} records, {} given",
            plan.assignments.len(),
            rows.len()
        )));
    }
    let folds: Vec<(FoldResult, Vec<usize>)> = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let (test, train): (Vec<(usize, usize)>, Vec<(usize, usize)>) = rows
                .iter()
                .copied()
                .zip(plan.assignments.iter().copied())
                .partition(|&(_, f)| f == fold);
            let train: Vec<usize> = train.into_iter().map(|(r, _)| r).collect();
            let model = build_tree_on(ds, classes, class_count, &train, tree)?;
            let mut flagged = Vec::new();
            for &(r, _) in &test {
                if model.classify(&ds.records[r])? != classes[r] {
                    flagged.push(r);
                }
            }
            Ok((FoldResult { fold, size: test.len(), misclassified: flagged.len() }, flagged))
        })
        .collect::<Result<_>>()?;

    let mut flagged_records: Vec<usize> = folds.iter().flat_map(|(_, f)| f.iter().copied()).collect();
    flagged_records.sort_unstable();
    let misclassified = flagged_records.len();
    Ok(NoiseResult {
        noisy_percent: percent_rounded(misclassified, rows.len(), 1),
        misclassified,
        evaluated: rows.len(),
        per_fold: folds.into_iter().map(|(f, _)| f).collect(),
        flagged_records,
        discretizer: Discretizer {
            method: DiscretizationMethod::EqualFrequency,
            boundaries: Vec::new(),
            class_count,
            class_sizes: Vec::new(),
            tie_adjusted: false,
        },
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Kind, Role};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn ds_from(rows: &[(f64, f64, f64)]) -> Dataset {
        let attrs = vec![
            AttributeSpec::new("x", Kind::Numeric),
            AttributeSpec::new("z", Kind::Numeric),
            AttributeSpec::new("effort", Kind::Numeric).with_role(Role::Target),
        ];
        let records = rows
            .iter()
            .map(|&(x, z, e)| vec![Cell::Number(x), Cell::Number(z), Cell::Number(e)])
            .collect();
        Dataset::new("t", attrs, records, "").unwrap()
    }

    #[test]
    fn separable_is_zero() {
        let rows: Vec<(f64, f64, f64)> =
            (0..40).map(|i| (f64::from(i / 10 * 100 + i % 10), 0.0, f64::from(i))).collect();
        let r = misclassification_rate(&ds_from(&rows), &NoiseParams::default()).unwrap();
        assert_eq!(r.noisy_percent, 0.0);
        assert!(r.flagged_records.is_empty());
        assert_eq!(r.per_fold.iter().map(|f| f.size).sum::<usize>(), 40);
    }

    #[test]
    fn too_few_records() {
        let rows = [(1.0, 1.0, 1.0), (2.0, 2.0, 2.0), (3.0, 3.0, 3.0), (4.0, 4.0, 4.0)];
        let err = misclassification_rate(&ds_from(&rows), &NoiseParams::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
        assert!(err.to_string().contains("leave-one-out"));
    }

    #[test]
    fn identifiers_are_not_features() {
        // The identifier tracks effort exactly; with it ignored the noise is high.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<(f64, f64, f64)> = (0..40)
            .map(|i| (f64::from(i / 10 * 100 + i % 10), rng.gen_range(0.0..1.0), f64::from(i)))
            .collect();
        let mut ds = ds_from(&rows);
        let with_id = misclassification_rate(&ds, &NoiseParams::default()).unwrap();
        assert_eq!(with_id.noisy_percent, 0.0);
        ds.attributes[0].role = Role::Identifier;
        let without = misclassification_rate(&ds, &NoiseParams::default()).unwrap();
        assert!(without.noisy_percent > 20.0);
    }

    #[test]
    fn missing_target_skipped() {
        let mut rows: Vec<(f64, f64, f64)> =
            (0..20).map(|i| (f64::from(i), 0.0, f64::from(i))).collect();
        rows.push((99.0, 0.0, 0.0));
        let mut ds = ds_from(&rows);
        ds.records[20][2] = Cell::Missing;
        let r = misclassification_rate(&ds, &NoiseParams::default()).unwrap();
        assert_eq!(r.evaluated, 20);
        assert!(r.warnings[0].contains("missing target"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn permutation_with_keyed_plan(seed: u64, n in 10usize..40) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<(f64, f64, f64)> = (0..n)
                .map(|_| (f64::from(rng.gen_range(0u8..8)), f64::from(rng.gen_range(0u8..5)), f64::from(rng.gen_range(0u16..100))))
                .collect();
            let params = NoiseParams::default();
            let ds = ds_from(&rows);
            let base = misclassification_rate(&ds, &params).unwrap();

            let values: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let disc = discretize(&values, params.classes, params.method).unwrap();
            let classes: Vec<usize> = values.iter().map(|&v| disc.class_of(v)).collect();
            let plan = stratified_folds(&classes, params.folds, params.seed).unwrap();

            // reverse-rotate the records, carrying each record's fold with it
            let perm: Vec<usize> = (0..n).map(|i| (n - 1 - i + 3) % n).collect();
            let permuted = ds.select_records(&perm);
            let p_classes: Vec<usize> = perm.iter().map(|&i| classes[i]).collect();
            let p_plan = FoldPlan { assignments: perm.iter().map(|&i| plan.assignments[i]).collect(), ..plan.clone() };
            let all: Vec<usize> = (0..n).collect();
            let r = misclassification_with_plan(&permuted, &p_classes, disc.class_count, &all, &p_plan, &params.tree).unwrap();
            prop_assert_eq!(r.noisy_percent, base.noisy_percent);
            let mut back: Vec<usize> = r.flagged_records.iter().map(|&j| perm[j]).collect();
            back.sort_unstable();
            prop_assert_eq!(back, base.flagged_records.clone());
            prop_assert!((0.0..=100.0).contains(&base.noisy_percent));
        }
    }
}
