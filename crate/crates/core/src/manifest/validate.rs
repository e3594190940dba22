use serde::{Deserialize, Serialize};

use super::{PreStep, TemplateManifest};
use crate::dataset::{summarize_attributes, Dataset, Predicate};
use crate::formula::Formula;
use crate::relevance::{assess_heterogeneity, data_era, is_valid_era};

/// Number of scored template parameters (the effort-over-time series is not scored).
pub const COMPLETENESS_PARAMETERS: usize = 38;
/// Relative tolerance for declared counts.
pub const COUNT_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for declared means, standard deviations and extremes.
pub const STAT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    pub populated: usize,
    pub total: usize,
    pub completeness: f64,
}

fn text(s: &Option<String>) -> bool {
    s.as_deref().is_some_and(|s| !s.trim().is_empty())
}

fn list(v: &[String]) -> bool {
    v.iter().any(|s| !s.trim().is_empty())
}

/// Populated template parameters, out of [`COMPLETENESS_PARAMETERS`].
pub fn completeness(m: &TemplateManifest) -> usize {
    let mut flags: Vec<bool> = Vec::with_capacity(COMPLETENESS_PARAMETERS);
    let n = m.noise.clone().unwrap_or_default();
    flags.extend([!n.formulas.is_empty(), n.classification.is_some(), text(&n.method)]);
    let o = m.outliers.clone().unwrap_or_default();
    flags.extend([
        list(&o.attributes),
        list(&o.record_ids),
        o.count.is_some() || o.proportion.is_some(),
        text(&o.method),
    ]);
    let i = m.inconsistency.clone().unwrap_or_default();
    flags.extend([
        i.attribute_count.is_some(),
        !i.explanations.is_empty(),
        !i.ranges.is_empty(),
        !i.summary_statistics.is_empty(),
    ]);
    let c = m.incompleteness.clone().unwrap_or_default();
    flags.extend([
        list(&c.attributes),
        list(&c.record_ids),
        !c.missing_per_attribute.is_empty(),
        c.count.is_some() || c.proportion.is_some(),
        text(&c.reasons),
    ]);
    flags.push(m.redundancy.as_ref().is_some_and(|r| text(&r.reasons)));
    flags.push(m.amount_of_data.as_ref().is_some_and(|a| a.records.is_some()));
    let h = m.heterogeneity.clone().unwrap_or_default();
    flags.extend([
        h.organization_count.is_some() || list(&h.organizations),
        !h.records_per_organization.is_empty(),
        !h.project_groups.is_empty(),
        list(&h.industry_types),
    ]);
    let t = m.timeliness.clone().unwrap_or_default();
    flags.extend([
        list(&t.start_dates) || text(&t.start_date_attribute),
        list(&t.completion_dates) || text(&t.completion_date_attribute),
    ]);
    let s = m.commercial_sensitivity.clone().unwrap_or_default();
    flags.extend([list(&s.anonymized_attributes), text(&s.reasons)]);
    flags.push(m.accessibility.as_ref().is_some_and(|a| list(&a.collection_problems)));
    let p = m.provenance.clone().unwrap_or_default();
    flags.extend([
        list(&p.source_organizations),
        text(&p.collecting_organization),
        text(&p.contact),
        text(&p.purpose),
        text(&p.methodology),
        text(&p.collection_method),
        text(&p.preprocessing),
        list(&p.donors),
        text(&p.collection_date),
        text(&p.dataset_name),
        text(&p.version),
    ]);
    debug_assert_eq!(flags.len(), COMPLETENESS_PARAMETERS);
    flags.into_iter().filter(|&f| f).count()
}

fn differs(declared: f64, actual: f64, rel: f64) -> bool {
    (declared - actual).abs() > rel * declared.abs().max(actual.abs())
}

/// Check a manifest on its own and, when a dataset is supplied, against it.
/// Findings never abort: everything lands in the report.
pub fn validate_manifest(m: &TemplateManifest, ds: Option<&Dataset>) -> ValidationReport {
    let mut r = ValidationReport { total: COMPLETENESS_PARAMETERS, ..Default::default() };
    r.populated = completeness(m);
    r.completeness = r.populated as f64 / r.total as f64;

    if let Some(p) = &m.provenance {
        if !text(&p.dataset_name) {
            r.errors.push("provenance.dataset_name is required when provenance is present".into());
        }
        if !text(&p.version) {
            r.errors.push("provenance.version is required when provenance is present".into());
        }
    }
    if let Some(inc) = &m.inconsistency {
        for (name, range) in &inc.ranges {
            if range.min > range.max {
                r.errors.push(format!("range for `{name}` has min > max"));
            }
        }
    }
    if let Err(e) = assess_heterogeneity(m) {
        r.errors.push(e.to_string());
    }
    if let Some(t) = &m.timeliness {
        for (key, v) in [("recorded_period", &t.recorded_period), ("publication_period", &t.publication_period)] {
            if let Some(v) = v {
                if !is_valid_era(v) {
                    r.errors.push(format!("timeliness.{key} `{v}` is not an era"));
                }
            }
        }
    }
    let mut formulas = Vec::new();
    for (i, f) in m.formulas().iter().enumerate() {
        match Formula::parse(&f.expression) {
            Ok(parsed) => formulas.push((f, parsed)),
            Err(e) => r.errors.push(format!("noise.formulas[{i}]: {e}")),
        }
    }
    for (i, step) in m.pre_steps().iter().enumerate() {
        if let PreStep::Filter { rule, .. } = step {
            if let Err(e) = Predicate::parse(rule) {
                r.errors.push(format!("noise.pre_steps[{i}]: {e}"));
            }
        }
    }

    let Some(ds) = ds else { return r };

    let has = |name: &str| ds.attribute_index(name).is_some();
    for a in &m.attributes {
        if !has(&a.name) {
            r.warnings.push(format!("declared attribute `{}` not in the dataset header", a.name));
        }
    }
    for (f, parsed) in &formulas {
        for a in std::iter::once(f.attribute.clone()).chain(parsed.attributes()) {
            if !has(&a) {
                r.errors.push(format!("formula for `{}` references unknown attribute `{a}`", f.attribute));
            }
        }
    }
    if let Some(n) = m.amount_of_data.as_ref().and_then(|a| a.records) {
        if differs(n as f64, ds.len() as f64, COUNT_TOLERANCE) {
            r.warnings.push(format!(
                "possible version drift: manifest declares {n} records, dataset has {}",
                ds.len()
            ));
        }
    }
    if let Some(inc) = &m.inconsistency {
        if let Some(n) = inc.attribute_count {
            if differs(n as f64, ds.attribute_count() as f64, COUNT_TOLERANCE) {
                r.warnings.push(format!(
                    "possible version drift: manifest declares {n} attributes, dataset has {}",
                    ds.attribute_count()
                ));
            }
        }
        let summaries = summarize_attributes(ds);
        for (name, decl) in &inc.summary_statistics {
            let Some(s) = summaries.iter().find(|s| &s.name == name) else {
                r.warnings.push(format!("summary statistics declared for unknown attribute `{name}`"));
                continue;
            };
            let mut check = |label: &str, declared: Option<f64>, actual: Option<f64>, tol: f64| {
                if let Some(d) = declared {
                    match actual {
                        Some(a) if !differs(d, a, tol) => {}
                        Some(a) => r.warnings.push(format!(
                            "possible version drift: `{name}` {label} declared {d}, recomputed {a}"
                        )),
                        None => r.warnings.push(format!(
                            "possible version drift: `{name}` {label} declared {d}, not computable"
                        )),
                    }
                }
            };
            let num = s.numeric.as_ref();
            check("count", decl.count.map(|c| c as f64), Some(s.count as f64), COUNT_TOLERANCE);
            check("missing", decl.missing.map(|c| c as f64), Some(s.missing as f64), COUNT_TOLERANCE);
            check("mean", decl.mean, num.map(|n| n.mean), STAT_TOLERANCE);
            check("sd", decl.sd, num.and_then(|n| n.sd), STAT_TOLERANCE);
            check("min", decl.min, num.map(|n| n.min), STAT_TOLERANCE);
            check("max", decl.max, num.map(|n| n.max), STAT_TOLERANCE);
        }
        for (name, range) in &inc.ranges {
            if let Some(idx) = ds.attribute_index(name) {
                let outside = ds.numeric_values(idx).iter().filter(|&&v| v < range.min || v > range.max).count();
                if outside > 0 {
                    r.warnings.push(format!(
                        "{outside} values of `{name}` fall outside the declared range [{}, {}]",
                        range.min, range.max
                    ));
                }
            }
        }
    }
    if let Some(t) = &m.timeliness {
        for a in [&t.start_date_attribute, &t.completion_date_attribute].into_iter().flatten() {
            if !has(a) {
                r.warnings.push(format!("timeliness date attribute `{a}` not in the dataset"));
            }
        }
        if let (Some(stated), Some(derived)) = (&t.recorded_period, data_era(m, ds)) {
            if stated != &derived {
                r.warnings.push(format!(
                    "recorded period `{stated}` differs from the dates in the data (`{derived}`)"
                ));
            }
        }
    }
    r
}
