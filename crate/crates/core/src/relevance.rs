//! Relevance assessors: amount of data, organizational heterogeneity, and
//! timeliness (era).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{year_of, Dataset};
use crate::error::{Error, Result};
use crate::manifest::TemplateManifest;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmountThresholds {
    /// Datasets with fewer records are flagged as small.
    pub small_below: usize,
    /// Minimum expected records per class after stratification.
    pub min_class_size: usize,
}

impl Default for AmountThresholds {
    fn default() -> Self {
        AmountThresholds { small_below: 30, min_class_size: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmountResult {
    pub records: usize,
    pub small_flag: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_warning: Option<String>,
}

pub fn assess_amount(ds: &Dataset) -> AmountResult {
    assess_amount_with(ds, 4, &AmountThresholds::default())
}

pub fn assess_amount_with(ds: &Dataset, class_count: usize, t: &AmountThresholds) -> AmountResult {
    let records = ds.len();
    let split_warning = (class_count > 0 && records < class_count * t.min_class_size).then(|| {
        format!(
            "{records} records over {class_count} classes leaves fewer than {} records per class",
            t.min_class_size
        )
    });
    AmountResult { records, small_flag: records < t.small_below, split_warning }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeterogeneityStatus {
    Single,
    Multi,
    NoEvidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneityResult {
    pub status: HeterogeneityStatus,
    pub organization_count: Option<usize>,
    pub per_org_record_counts: Option<BTreeMap<String, usize>>,
}

impl fmt::Display for HeterogeneityResult {
    /// `Yes: 20`, `Yes: number unknown`, `No`, or `No evidence`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.status, self.organization_count) {
            (HeterogeneityStatus::Multi, Some(n)) => write!(f, "Yes: {n}"),
            (HeterogeneityStatus::Multi, None) => f.write_str("Yes: number unknown"),
            (HeterogeneityStatus::Single, _) => f.write_str("No"),
            (HeterogeneityStatus::NoEvidence, _) => f.write_str("No evidence"),
        }
    }
}

/// Organizational make-up as declared by the manifest.
pub fn assess_heterogeneity(m: &TemplateManifest) -> Result<HeterogeneityResult> {
    let none = HeterogeneityResult {
        status: HeterogeneityStatus::NoEvidence,
        organization_count: None,
        per_org_record_counts: None,
    };
    let Some(h) = &m.heterogeneity else { return Ok(none) };
    let listed = [h.organizations.len(), h.records_per_organization.len(), h.project_groups.len()]
        .into_iter()
        .max()
        .unwrap_or(0);
    if h.organization_count == Some(0) {
        return Err(Error::manifest("heterogeneity.organization_count", "count must be at least 1"));
    }
    if let Some(n) = h.organization_count {
        if listed > n {
            return Err(Error::manifest(
                "heterogeneity",
                format!("organization_count {n} but {listed} organizations listed"),
            ));
        }
    }
    let count = h.organization_count.or((listed > 0).then_some(listed));
    let status = match (h.multi_organization, count) {
        (Some(false), Some(n)) if n > 1 => {
            return Err(Error::manifest(
                "heterogeneity.multi_organization",
                format!("single organization claimed with {n} organizations"),
            ))
        }
        (Some(true), Some(1)) => {
            return Err(Error::manifest(
                "heterogeneity.multi_organization",
                "multiple organizations claimed with an organization count of 1",
            ))
        }
        (Some(true), _) => HeterogeneityStatus::Multi,
        (Some(false), _) => HeterogeneityStatus::Single,
        (None, Some(1)) => HeterogeneityStatus::Single,
        (None, Some(_)) => HeterogeneityStatus::Multi,
        (None, None) => return Ok(none),
    };
    let organization_count = match status {
        HeterogeneityStatus::Single => Some(1),
        _ => count,
    };
    let per_org = (!h.records_per_organization.is_empty()).then(|| h.records_per_organization.clone());
    Ok(HeterogeneityResult { status, organization_count, per_org_record_counts: per_org })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimelinessCriterion {
    RecordedDates,
    PublicationPeriod,
    FirstPublication,
}

impl TimelinessCriterion {
    pub fn number(self) -> u8 {
        match self {
            TimelinessCriterion::RecordedDates => 1,
            TimelinessCriterion::PublicationPeriod => 2,
            TimelinessCriterion::FirstPublication => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimelinessResult {
    pub has_dates: bool,
    pub era: String,
    pub criterion_used: TimelinessCriterion,
}

fn year4(s: &str) -> Option<i32> {
    let digits: String = s.chars().take(4).collect();
    (digits.len() == 4 && digits.chars().all(|c| c.is_ascii_digit()))
        .then(|| digits.parse().ok())
        .flatten()
}

/// `YYYY`, `YYYY-YYYY` (ascending), `YYYY[P]`, or a decade such as `2000s`.
pub fn is_valid_era(s: &str) -> bool {
    let four = |t: &str| t.len() == 4 && t.chars().all(|c| c.is_ascii_digit());
    if four(s) {
        return true;
    }
    if let Some(y) = s.strip_suffix("[P]") {
        return four(y);
    }
    if let Some(y) = s.strip_suffix('s') {
        return four(y) && y.ends_with('0');
    }
    match s.split_once('-') {
        Some((a, b)) if four(a) && four(b) => a <= b,
        _ => false,
    }
}

fn era_from(starts: &[i32], ends: &[i32]) -> Option<String> {
    let first = starts.iter().min().or_else(|| ends.iter().min())?;
    let last = ends.iter().max().or_else(|| starts.iter().max())?;
    let (first, last) = ((*first).min(*last), (*first).max(*last));
    Some(if first == last { first.to_string() } else { format!("{first}-{last}") })
}

/// Era spanned by per-project dates in the dataset columns named by the
/// manifest, when any are present.
pub fn data_era(m: &TemplateManifest, ds: &Dataset) -> Option<String> {
    let t = m.timeliness.as_ref()?;
    let years = |attr: &Option<String>| -> Vec<i32> {
        attr.as_deref()
            .and_then(|a| ds.attribute_index(a))
            .map(|i| ds.column(i).filter_map(year_of).collect())
            .unwrap_or_default()
    };
    era_from(&years(&t.start_date_attribute), &years(&t.completion_date_attribute))
}

/// Era by the three-step fallback: recorded project dates, then a
/// publication-stated period, then the first-publication year marked `[P]`.
pub fn assess_timeliness(m: &TemplateManifest, ds: Option<&Dataset>) -> Result<TimelinessResult> {
    let recorded = |era: String| TimelinessResult {
        has_dates: true,
        era,
        criterion_used: TimelinessCriterion::RecordedDates,
    };
    let Some(t) = &m.timeliness else {
        return Err(Error::Timeliness("manifest has no timeliness section".into()));
    };
    if let Some(p) = &t.recorded_period {
        if !is_valid_era(p) {
            return Err(Error::manifest("timeliness.recorded_period", format!("`{p}` is not an era")));
        }
        return Ok(recorded(p.clone()));
    }
    if let Some(era) = ds.and_then(|ds| data_era(m, ds)) {
        return Ok(recorded(era));
    }
    let starts: Vec<i32> = t.start_dates.iter().filter_map(|s| year4(s)).collect();
    let ends: Vec<i32> = t.completion_dates.iter().filter_map(|s| year4(s)).collect();
    if let Some(era) = era_from(&starts, &ends) {
        return Ok(recorded(era));
    }
    if let Some(p) = &t.publication_period {
        if !is_valid_era(p) {
            return Err(Error::manifest("timeliness.publication_period", format!("`{p}` is not an era")));
        }
        return Ok(TimelinessResult {
            has_dates: false,
            era: p.clone(),
            criterion_used: TimelinessCriterion::PublicationPeriod,
        });
    }
    if let Some(y) = t.first_publication_year {
        return Ok(TimelinessResult {
            has_dates: false,
            era: format!("{y:04}[P]"),
            criterion_used: TimelinessCriterion::FirstPublication,
        });
    }
    Err(Error::Timeliness(
        "no project dates, publication period, or first-publication year".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Cell, Kind};
    use crate::manifest::{parse_manifest_str, HeterogeneitySection, TimelinessSection};

    fn manifest(json: &str) -> TemplateManifest {
        parse_manifest_str(json).unwrap().manifest
    }

    #[test]
    fn amount_flags() {
        let rec = |n: usize| {
            Dataset::new(
                "d",
                vec![AttributeSpec::new("a", Kind::Numeric)],
                (0..n).map(|i| vec![Cell::Number(i as f64)]).collect(),
                "",
            )
            .unwrap()
        };
        let small = assess_amount(&rec(12));
        assert!(small.small_flag && small.split_warning.is_some());
        let big = assess_amount(&rec(499));
        assert!(!big.small_flag && big.split_warning.is_none());
        assert!(assess_amount(&rec(0)).small_flag);
        assert!(!assess_amount(&rec(30)).small_flag);
    }

    #[test]
    fn heterogeneity_cases() {
        let multi = assess_heterogeneity(&manifest(r#"{"heterogeneity": {"organization_count": 20}}"#)).unwrap();
        assert_eq!(multi.status, HeterogeneityStatus::Multi);
        assert_eq!(multi.to_string(), "Yes: 20");
        let single = assess_heterogeneity(&manifest(r#"{"heterogeneity": {"multi_organization": false}}"#)).unwrap();
        assert_eq!(single.status, HeterogeneityStatus::Single);
        assert_eq!(single.organization_count, Some(1));
        let none = assess_heterogeneity(&TemplateManifest::default()).unwrap();
        assert_eq!(none.status, HeterogeneityStatus::NoEvidence);
        let unknown = assess_heterogeneity(&manifest(r#"{"heterogeneity": {"multi_organization": true}}"#)).unwrap();
        assert_eq!(unknown.to_string(), "Yes: number unknown");
    }

    #[test]
    fn heterogeneity_contradictions() {
        let mut m = TemplateManifest::default();
        m.heterogeneity = Some(HeterogeneitySection {
            multi_organization: Some(false),
            organizations: vec!["a".into(), "b".into(), "c".into()],
            ..Default::default()
        });
        assert!(matches!(assess_heterogeneity(&m), Err(Error::Manifest { .. })));
        let m = manifest(r#"{"heterogeneity": {"organization_count": 2, "organizations": ["a", "b", "c"]}}"#);
        assert!(assess_heterogeneity(&m).is_err());
        let m = manifest(r#"{"heterogeneity": {"multi_organization": true, "organization_count": 1}}"#);
        assert!(assess_heterogeneity(&m).is_err());
    }

    #[test]
    fn era_formats() {
        for ok in ["1993", "1974-1979", "1997[P]", "2000s", "1993-1993"] {
            assert!(is_valid_era(ok), "{ok}");
        }
        for bad in ["93", "1979-1974", "1997[p]", "2001s", "1997 [P]", ""] {
            assert!(!is_valid_era(bad), "{bad}");
        }
    }

    #[test]
    fn timeliness_criteria() {
        let m = manifest(r#"{"timeliness": {"start_dates": ["1998-02-01", "2001"], "completion_dates": ["2006-12-31"]}}"#);
        let r = assess_timeliness(&m, None).unwrap();
        assert_eq!((r.era.as_str(), r.criterion_used.number(), r.has_dates), ("1998-2006", 1, true));

        let m = manifest(r#"{"timeliness": {"first_publication_year": 1997}}"#);
        let r = assess_timeliness(&m, None).unwrap();
        assert_eq!((r.era.as_str(), r.criterion_used.number(), r.has_dates), ("1997[P]", 3, false));

        let m = manifest(r#"{"timeliness": {"publication_period": "1974-1979", "first_publication_year": 1979}}"#);
        assert_eq!(assess_timeliness(&m, None).unwrap().criterion_used.number(), 2);

        let m = manifest(r#"{"timeliness": {"recorded_period": "1993", "start_dates": ["1985"]}}"#);
        assert_eq!(assess_timeliness(&m, None).unwrap().era, "1993");

        let m = manifest(r#"{"timeliness": {"start_dates": ["1993"], "completion_dates": ["1993"]}}"#);
        assert_eq!(assess_timeliness(&m, None).unwrap().era, "1993");

        assert!(matches!(assess_timeliness(&TemplateManifest::default(), None), Err(Error::Timeliness(_))));
        let mut m = TemplateManifest::default();
        m.timeliness = Some(TimelinessSection::default());
        assert!(matches!(assess_timeliness(&m, None), Err(Error::Timeliness(_))));
    }

    #[test]
    fn timeliness_from_data_columns() {
        let ds = Dataset::new(
            "d",
            vec![AttributeSpec::new("YearEnd", Kind::Numeric)],
            [85.0, 82.0, 88.0].iter().map(|&y| vec![Cell::Number(y)]).collect(),
            "",
        )
        .unwrap();
        let m = manifest(r#"{"timeliness": {"completion_date_attribute": "YearEnd", "first_publication_year": 1989}}"#);
        let r = assess_timeliness(&m, Some(&ds)).unwrap();
        assert_eq!((r.era.as_str(), r.criterion_used.number()), ("1982-1988", 1));
        assert_eq!(assess_timeliness(&m, None).unwrap().era, "1989[P]");
    }
}
