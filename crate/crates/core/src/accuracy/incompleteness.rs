use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeMissing {
    pub attribute: String,
    pub missing: usize,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncompletenessSummary {
    pub per_attribute: Vec<AttributeMissing>,
    pub records_with_missing: usize,
    /// Records with at least one missing cell, as a percentage of all records.
    pub record_percent: f64,
    pub total_missing_cells: usize,
    pub any_missing: bool,
}

impl IncompletenessSummary {
    pub fn get(&self, attribute: &str) -> Option<&AttributeMissing> {
        self.per_attribute.iter().find(|a| a.attribute == attribute)
    }
}

fn pct(k: usize, n: usize) -> f64 {
    if n == 0 { 0.0 } else { 100.0 * k as f64 / n as f64 }
}

/// Count missing cells. Missing markers must already be applied.
pub fn assess_incompleteness(ds: &Dataset) -> IncompletenessSummary {
    let n = ds.len();
    let per_attribute: Vec<AttributeMissing> = ds
        .attributes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let missing = ds.column(i).filter(|c| c.is_missing()).count();
            AttributeMissing { attribute: a.name.clone(), missing, percent: pct(missing, n) }
        })
        .collect();
    let records_with_missing = ds.records.iter().filter(|r| r.iter().any(|c| c.is_missing())).count();
    let total_missing_cells = per_attribute.iter().map(|a| a.missing).sum();
    IncompletenessSummary {
        per_attribute,
        records_with_missing,
        record_percent: pct(records_with_missing, n),
        total_missing_cells,
        any_missing: total_missing_cells > 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Cell, Kind};
    use proptest::prelude::*;

    fn ds(rows: &[Vec<Option<f64>>]) -> Dataset {
        let width = rows.first().map_or(1, Vec::len);
        Dataset::new(
            "d",
            (0..width).map(|i| AttributeSpec::new(format!("a{i}"), Kind::Numeric)).collect(),
            rows.iter().map(|r| r.iter().map(|v| v.map_or(Cell::Missing, Cell::Number)).collect()).collect(),
            "",
        )
        .unwrap()
    }

    #[test]
    fn counts() {
        let s = assess_incompleteness(&ds(&[
            vec![Some(1.0), None],
            vec![Some(1.0), Some(2.0)],
            vec![None, None],
            vec![Some(1.0), Some(1.0)],
        ]));
        assert_eq!(s.get("a0").unwrap().missing, 1);
        assert_eq!(s.get("a1").unwrap().percent, 50.0);
        assert_eq!(s.records_with_missing, 2);
        assert_eq!(s.record_percent, 50.0);
        assert!(s.any_missing);
        let clean = assess_incompleteness(&ds(&[vec![Some(1.0)]]));
        assert!(!clean.any_missing);
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            rows in prop::collection::vec(prop::collection::vec(prop::option::of(0.0f64..3.0), 3), 1..30),
            rot in 0usize..30,
        ) {
            let base = assess_incompleteness(&ds(&rows));
            prop_assert!(base.any_missing == (base.total_missing_cells > 0));
            let mut shuffled = rows.clone();
            shuffled.rotate_left(rot % rows.len());
            shuffled.reverse();
            // swap the first and last attribute too
            let swapped: Vec<Vec<Option<f64>>> = shuffled.iter().map(|r| vec![r[2], r[1], r[0]]).collect();
            let other = assess_incompleteness(&ds(&swapped));
            prop_assert_eq!(other.record_percent, base.record_percent);
            prop_assert_eq!(other.get("a0").unwrap().percent, base.get("a2").unwrap().percent);
            prop_assert_eq!(other.get("a1").unwrap().percent, base.get("a1").unwrap().percent);
            for a in &base.per_attribute {
                prop_assert!((0.0..=100.0).contains(&a.percent));
            }
        }
    }
}
