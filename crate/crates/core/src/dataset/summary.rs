use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Cell, Dataset, Kind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation; `None` with fewer than two values.
    pub sd: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSummary {
    pub name: String,
    pub kind: Kind,
    pub count: usize,
    pub missing: usize,
    pub numeric: Option<NumericSummary>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub levels: BTreeMap<String, usize>,
}

/// Per-attribute statistics over non-missing cells.
pub fn summarize_attributes(ds: &Dataset) -> Vec<AttributeSummary> {
    ds.attributes
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let missing = ds.column(i).filter(|c| c.is_missing()).count();
            let count = ds.len() - missing;
            let numeric = if spec.kind == Kind::Numeric {
                numeric_summary(&ds.numeric_values(i))
            } else {
                None
            };
            let mut levels = BTreeMap::new();
            if matches!(spec.kind, Kind::Categorical | Kind::Text) {
                for c in ds.column(i) {
                    if let Cell::Text(s) = c {
                        *levels.entry(s.clone()).or_insert(0) += 1;
                    }
                }
            }
            AttributeSummary {
                name: spec.name.clone(),
                kind: spec.kind,
                count,
                missing,
                numeric,
                levels,
            }
        })
        .collect()
}

pub(crate) fn numeric_summary(values: &[f64]) -> Option<NumericSummary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.len() > 1).then(|| {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    });
    Some(NumericSummary {
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        sd,
    })
}
