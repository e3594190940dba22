use std::collections::{BTreeMap, BTreeSet};

use super::{format_date, parse_number, Cell, Dataset};
use crate::error::{Error, Result};

/// Attribute name → tokens that mean "missing" for that attribute.
pub type MissingPolicy = BTreeMap<String, BTreeSet<String>>;

/// Mark cells equal to a declared marker as missing. Numeric cells compare
/// numerically ("-1" matches -1.0); everything else compares trimmed text,
/// case-sensitively. Idempotent.
pub fn apply_missing_policy(ds: &Dataset, policy: &MissingPolicy) -> Result<Dataset> {
    let mut out = ds.clone();
    for (name, markers) in policy {
        let idx = ds.require_attribute(name)?;
        let spec = &mut out.attributes[idx];
        let markers: BTreeSet<String> = markers.iter().map(|m| m.trim().to_string()).collect();
        if let Some(levels) = &spec.levels {
            if let Some(m) = markers.iter().find(|m| levels.contains(m)) {
                return Err(Error::Config(format!(
                    "missing marker `{m}` is a declared level of `{name}`"
                )));
            }
        }
        let numeric: Vec<f64> = markers.iter().filter_map(|m| parse_number(m)).collect();
        let formats = spec.date_formats.clone();
        for rec in &mut out.records {
            let hit = match &rec[idx] {
                Cell::Missing => false,
                Cell::Number(v) => numeric.contains(v),
                Cell::Text(s) => markers.contains(s),
                Cell::Date { date, format } => formats
                    .get(*format as usize)
                    .is_some_and(|f| markers.contains(&format_date(*date, f))),
            };
            if hit {
                rec[idx] = Cell::Missing;
            }
        }
        spec.missing_markers.extend(markers);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_csv_str;

    fn policy(entries: &[(&str, &[&str])]) -> MissingPolicy {
        entries
            .iter()
            .map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    #[test]
    fn zero_becomes_missing_only_where_declared() {
        let ds = parse_csv_str("a,b\n0,0\n1,0\n0,2\n", "t", None).unwrap();
        let out = apply_missing_policy(&ds, &policy(&[("a", &["0"])])).unwrap();
        assert_eq!(out.missing_cells(), 2);
        assert!(out.records[0][1] == Cell::Number(0.0));
        assert!(out.attributes[0].missing_markers.contains("0"));
    }

    #[test]
    fn numeric_comparison() {
        let ds = parse_csv_str("a\n-1.0\n-1\n1\n", "t", None).unwrap();
        let out = apply_missing_policy(&ds, &policy(&[("a", &["-1"])])).unwrap();
        assert_eq!(out.missing_cells(), 2);
    }

    #[test]
    fn text_comparison_is_case_sensitive() {
        let ds = parse_csv_str("a\nNA\nna\nx\n", "t", None).unwrap();
        let out = apply_missing_policy(&ds, &policy(&[("a", &[" NA "])])).unwrap();
        assert_eq!(out.missing_cells(), 1);
    }

    #[test]
    fn unknown_attribute_is_config_error() {
        let ds = parse_csv_str("a\n1\n", "t", None).unwrap();
        assert!(matches!(
            apply_missing_policy(&ds, &policy(&[("zz", &["0"])])),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn marker_equal_to_level_rejected() {
        let ds = crate::dataset::parse_arff_str(
            "@relation t\n@attribute c {a,none}\n@data\na\nnone\n",
        )
        .unwrap();
        assert!(matches!(
            apply_missing_policy(&ds, &policy(&[("c", &["none"])])),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn empty_policy_is_identity() {
        let ds = parse_csv_str("a,b\n1,x\n", "t", None).unwrap();
        assert_eq!(apply_missing_policy(&ds, &MissingPolicy::new()).unwrap(), ds);
    }
}
