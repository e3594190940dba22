use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Kind};
use crate::error::{Error, Result};
use crate::stats::percent_rounded;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuartileMethod {
    /// Interpolate between order statistics at `(n - 1) p`.
    #[default]
    Linear,
    /// Tukey hinges (medians of the lower and upper halves).
    Hinges,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Quartiles of a non-empty list (any order).
pub fn quartiles(values: &[f64], method: QuartileMethod) -> Quartiles {
    assert!(!values.is_empty(), "quartiles of an empty list");
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    match method {
        QuartileMethod::Linear => {
            let at = |p: f64| {
                let h = (n - 1) as f64 * p;
                let lo = h.floor() as usize;
                let hi = (lo + 1).min(n - 1);
                x[lo] + (h - lo as f64) * (x[hi] - x[lo])
            };
            Quartiles { q1: at(0.25), median: at(0.5), q3: at(0.75) }
        }
        QuartileMethod::Hinges => {
            // 1-based depths; half depths average the two neighbours.
            let n4 = ((n + 3) / 2) as f64 / 2.0;
            let at = |d: f64| 0.5 * (x[d.floor() as usize - 1] + x[d.ceil() as usize - 1]);
            Quartiles {
                q1: at(n4),
                median: at((n + 1) as f64 / 2.0),
                q3: at((n + 1) as f64 - n4),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutlierSummary {
    pub attribute: String,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub outlier_indices: Vec<usize>,
    pub non_missing: usize,
    /// `outlier_indices.len() / non_missing`.
    pub outlier_fraction: f64,
    /// Percentage rounded half-up to a whole number.
    pub outlier_percent: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub summaries: Vec<OutlierSummary>,
    pub warnings: Vec<String>,
}

impl OutlierReport {
    pub fn get(&self, attribute: &str) -> Option<&OutlierSummary> {
        self.summaries.iter().find(|s| s.attribute == attribute)
    }
}

/// Boxplot-fence outliers. Without `attributes`, every numeric feature or
/// target attribute is checked.
pub fn detect_outliers(
    ds: &Dataset,
    attributes: Option<&[String]>,
    method: QuartileMethod,
) -> Result<OutlierReport> {
    let columns: Vec<usize> = match attributes {
        Some(names) => names
            .iter()
            .map(|n| {
                let i = ds.require_attribute(n)?;
                if ds.attributes[i].kind != Kind::Numeric {
                    return Err(Error::Usage(format!(
                        "outliers need a numeric attribute; `{n}` is {}",
                        ds.attributes[i].kind
                    )));
                }
                Ok(i)
            })
            .collect::<Result<_>>()?,
        None => (0..ds.attribute_count())
            .filter(|&i| ds.attributes[i].kind == Kind::Numeric && ds.attributes[i].is_predictive())
            .collect(),
    };
    let mut report = OutlierReport::default();
    for idx in columns {
        let name = &ds.attributes[idx].name;
        let present: Vec<(usize, f64)> = ds
            .column(idx)
            .enumerate()
            .filter_map(|(i, c)| c.as_number().map(|v| (i, v)))
            .collect();
        if present.len() < 4 {
            report.warnings.push(format!(
                "`{name}` skipped: {} non-missing values, at least 4 needed",
                present.len()
            ));
            continue;
        }
        let values: Vec<f64> = present.iter().map(|p| p.1).collect();
        let q = quartiles(&values, method);
        let iqr = q.q3 - q.q1;
        let lower_fence = q.q1 - 1.5 * iqr;
        let upper_fence = q.q3 + 1.5 * iqr;
        let outlier_indices: Vec<usize> = present
            .iter()
            .filter(|(_, v)| *v < lower_fence || *v > upper_fence)
            .map(|p| p.0)
            .collect();
        let k = outlier_indices.len();
        report.summaries.push(OutlierSummary {
            attribute: name.clone(),
            q1: q.q1,
            median: q.median,
            q3: q.q3,
            iqr,
            lower_fence,
            upper_fence,
            outlier_fraction: k as f64 / present.len() as f64,
            outlier_percent: percent_rounded(k, present.len(), 0),
            non_missing: present.len(),
            outlier_indices,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Cell, Role};
    use proptest::prelude::*;

    fn one_column(values: &[Option<f64>]) -> Dataset {
        Dataset::new(
            "d",
            vec![AttributeSpec::new("Effort", Kind::Numeric)],
            values.iter().map(|v| vec![v.map_or(Cell::Missing, Cell::Number)]).collect(),
            "",
        )
        .unwrap()
    }

    #[test]
    fn hand_example() {
        let ds = one_column(&[Some(1.0), Some(2.0), Some(3.0), Some(4.0), Some(100.0)]);
        let r = detect_outliers(&ds, None, QuartileMethod::Linear).unwrap();
        let s = &r.summaries[0];
        assert_eq!((s.q1, s.q3, s.lower_fence, s.upper_fence), (2.0, 4.0, -1.0, 7.0));
        assert_eq!(s.outlier_indices, vec![4]);
        assert_eq!(s.outlier_percent, 20.0);
    }

    #[test]
    fn constant_column() {
        let ds = one_column(&[Some(5.0); 4]);
        let s = &detect_outliers(&ds, None, QuartileMethod::Linear).unwrap().summaries[0];
        assert_eq!((s.iqr, s.lower_fence, s.upper_fence), (0.0, 5.0, 5.0));
        assert!(s.outlier_indices.is_empty());
    }

    #[test]
    fn fence_values_are_inliers() {
        // q1 = 2, q3 = 4, fences [-1, 7]; 7 sits on the fence.
        let ds = one_column(&[Some(1.0), Some(2.0), Some(3.0), Some(4.0), Some(7.0)]);
        let s = &detect_outliers(&ds, None, QuartileMethod::Linear).unwrap().summaries[0];
        assert_eq!(s.upper_fence, 7.0);
        assert!(s.outlier_indices.is_empty());
    }

    #[test]
    fn hinges_differ() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let lin = quartiles(&v, QuartileMethod::Linear);
        let hin = quartiles(&v, QuartileMethod::Hinges);
        assert_eq!((lin.q1, lin.q3), (2.25, 4.75));
        assert_eq!((hin.q1, hin.median, hin.q3), (2.0, 3.5, 5.0));
        let hin5 = quartiles(&[1.0, 2.0, 3.0, 4.0, 100.0], QuartileMethod::Hinges);
        assert_eq!((hin5.q1, hin5.q3), (2.0, 4.0));
    }

    #[test]
    fn skips_and_errors() {
        let ds = one_column(&[Some(1.0), None, Some(2.0), Some(3.0)]);
        let r = detect_outliers(&ds, None, QuartileMethod::Linear).unwrap();
        assert!(r.summaries.is_empty() && r.warnings.len() == 1);

        let ds = Dataset::new(
            "d",
            vec![
                AttributeSpec::new("Lang", Kind::Categorical),
                AttributeSpec::new("ID", Kind::Numeric).with_role(Role::Identifier),
            ],
            vec![vec![Cell::Text("a".into()), Cell::Number(1.0)]],
            "",
        )
        .unwrap();
        assert!(matches!(
            detect_outliers(&ds, Some(&["Lang".to_string()]), QuartileMethod::Linear),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            detect_outliers(&ds, Some(&["Nope".to_string()]), QuartileMethod::Linear),
            Err(Error::Config(_))
        ));
        // default set leaves out categorical and identifier attributes
        assert!(detect_outliers(&ds, None, QuartileMethod::Linear).unwrap().warnings.is_empty());
    }

    proptest! {
        #[test]
        fn fence_ordering(values in prop::collection::vec(-1e6f64..1e6, 4..60)) {
            let ds = one_column(&values.iter().map(|&v| Some(v)).collect::<Vec<_>>());
            let s = &detect_outliers(&ds, None, QuartileMethod::Linear).unwrap().summaries[0];
            prop_assert!(s.lower_fence <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.upper_fence);
            for &i in &s.outlier_indices {
                prop_assert!(values[i] < s.lower_fence || values[i] > s.upper_fence);
            }
            let count = values.iter().filter(|&&v| v < s.lower_fence || v > s.upper_fence).count();
            prop_assert_eq!(count, s.outlier_indices.len());
        }
    }
}
