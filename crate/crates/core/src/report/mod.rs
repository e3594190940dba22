//! Per-dataset quality reports, their renderings, and corpus-wide matrices.

mod corpus;
mod render;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::accuracy::{
    assess_incompleteness, assess_noise, check_consistency, detect_duplicates, detect_outliers,
    ConsistencyReport, IncompletenessSummary, NoiseAssessment, OutlierReport, QuartileMethod,
};
use crate::classifier::NoiseParams;
use crate::dataset::{apply_missing_policy, load_file, Dataset};
use crate::error::Result;
use crate::fisma::{fisma_score, FismaScore, Rubric};
use crate::manifest::TemplateManifest;
use crate::provenance::{
    assess_accessibility, assess_commercial_sensitivity, assess_trustworthiness_with,
    AccessibilityResult, SensitivityResult, SensitivityStatus, Strictness, TrustworthinessResult,
};
use crate::relevance::{
    assess_amount_with, assess_heterogeneity, assess_timeliness, AmountResult, AmountThresholds,
    HeterogeneityResult, HeterogeneityStatus, TimelinessResult,
};
use crate::TOOL_VERSION;

pub use corpus::{
    render_matrix_csv, render_matrix_json, render_matrix_markdown, run_corpus, CorpusConfig, CorpusEntry, CorpusResult,
    CorpusRow, MatrixDocument,
};
pub use render::{render, table_cells, Format, TABLE_COLUMNS};

/// Outcome of one assessor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Dimension<T> {
    Assessed { value: T },
    NoEvidence { reason: String },
    NotAssessed { reason: String },
}

impl<T> Dimension<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Dimension::Assessed { value } => Some(value),
            _ => None,
        }
    }

    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(value) => Dimension::Assessed { value },
            Err(e) => Dimension::NotAssessed { reason: e.to_string() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutlierDimension {
    /// Attribute whose outlier share is reported in the matrix (the target).
    pub highlighted: Option<String>,
    pub highlighted_percent: Option<f64>,
    pub report: OutlierReport,
}

/// Everything needed to reproduce a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AssessParams {
    pub noise: NoiseParams,
    pub quartiles: QuartileMethod,
    pub strictness: Strictness,
    pub amount: AmountThresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rubric: Option<Rubric>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub dataset: String,
    pub source_digest: String,
    pub target: Option<String>,
    pub noise: Dimension<NoiseAssessment>,
    pub outliers: Dimension<OutlierDimension>,
    pub inconsistency: Dimension<ConsistencyReport>,
    pub incompleteness: Dimension<IncompletenessSummary>,
    pub redundancy: Dimension<Vec<Vec<usize>>>,
    pub amount: Dimension<AmountResult>,
    pub heterogeneity: Dimension<HeterogeneityResult>,
    pub timeliness: Dimension<TimelinessResult>,
    pub commercial_sensitivity: Dimension<SensitivityResult>,
    pub accessibility: Dimension<AccessibilityResult>,
    pub trustworthiness: Dimension<TrustworthinessResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fisma: Option<FismaScore>,
    pub warnings: Vec<String>,
    pub tool_version: String,
    pub seed: u64,
    pub parameters: AssessParams,
}

impl QualityReport {
    pub fn noise_percent(&self) -> Option<f64> {
        self.noise.value().map(|n| n.result.noisy_percent)
    }

    pub fn records(&self) -> Option<usize> {
        self.amount.value().map(|a| a.records)
    }
}

/// Load a data file with the manifest's attribute declarations and missing
/// markers. `target` overrides the manifest's target role.
pub fn load_dataset(path: &Path, manifest: Option<&TemplateManifest>, target: Option<&str>) -> Result<Dataset> {
    let overrides = manifest.map(TemplateManifest::overrides).unwrap_or_default();
    let ds = load_file(path, &overrides)?;
    let mut ds = match manifest {
        Some(m) => apply_missing_policy(&ds, &m.missing_policy())?,
        None => ds,
    };
    if let Some(name) = manifest.and_then(|m| m.name.clone()) {
        ds.name = name;
    }
    match target {
        Some(t) => ds.with_target(t),
        None => Ok(ds),
    }
}

/// Run every assessor. Assessor failures become "not assessed" entries.
pub fn assemble_report(ds: &Dataset, manifest: Option<&TemplateManifest>, params: &AssessParams) -> QualityReport {
    let empty = TemplateManifest::default();
    let m = manifest.unwrap_or(&empty);
    let mut warnings = Vec::new();
    let target = ds.target_index().ok().flatten().map(|i| ds.attributes[i].name.clone());

    let (noise, rest) = rayon::join(
        || Dimension::from_result(assess_noise(ds, m, &params.noise)),
        || {
            let outliers = detect_outliers(ds, None, params.quartiles).map(|report| {
                let t = target.as_ref().and_then(|t| report.get(t));
                OutlierDimension {
                    highlighted: t.map(|s| s.attribute.clone()),
                    highlighted_percent: t.map(|s| s.outlier_percent),
                    report,
                }
            });
            let inconsistency = check_consistency(ds, m);
            (outliers, inconsistency)
        },
    );
    let (outliers, inconsistency) = rest;
    if let Dimension::Assessed { value } = &noise {
        warnings.extend(value.result.warnings.iter().cloned());
    }
    if let Ok(o) = &outliers {
        warnings.extend(o.report.warnings.iter().cloned());
    }
    let inconsistency = match inconsistency {
        Ok(r) if r.findings.is_empty() => {
            warnings.extend(r.warnings);
            Dimension::NoEvidence { reason: "no violated formula, unit or date-format constraint found".into() }
        }
        other => Dimension::from_result(other),
    };

    let heterogeneity = match assess_heterogeneity(m) {
        Ok(h) if h.status == HeterogeneityStatus::NoEvidence => {
            Dimension::NoEvidence { reason: "manifest gives no organizational information".into() }
        }
        other => Dimension::from_result(other),
    };
    let sensitivity = assess_commercial_sensitivity(m);
    let commercial_sensitivity = match sensitivity.status {
        SensitivityStatus::Yes => Dimension::Assessed { value: sensitivity },
        SensitivityStatus::NoEvidence => {
            Dimension::NoEvidence { reason: "manifest declares no anonymization".into() }
        }
    };
    let accessibility = assess_accessibility(m);
    warnings.extend(accessibility.warnings.iter().cloned());

    let fisma = params.rubric.as_ref().and_then(|r| match fisma_score(m, Some(ds), r) {
        Ok(s) => Some(s),
        Err(e) => {
            warnings.push(format!("fisma not scored: {e}"));
            None
        }
    });

    QualityReport {
        dataset: ds.name.clone(),
        source_digest: ds.source_digest.clone(),
        target,
        noise,
        outliers: Dimension::from_result(outliers),
        inconsistency,
        incompleteness: Dimension::Assessed { value: assess_incompleteness(ds) },
        redundancy: Dimension::Assessed { value: detect_duplicates(ds) },
        amount: Dimension::Assessed { value: assess_amount_with(ds, params.noise.classes, &params.amount) },
        heterogeneity,
        timeliness: Dimension::from_result(assess_timeliness(m, Some(ds))),
        commercial_sensitivity,
        accessibility: Dimension::Assessed { value: accessibility },
        trustworthiness: Dimension::Assessed { value: assess_trustworthiness_with(m, params.strictness) },
        fisma,
        warnings,
        tool_version: TOOL_VERSION.to_string(),
        seed: params.noise.seed,
        parameters: params.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Cell, Kind, Role};

    pub(crate) fn toy() -> Dataset {
        Dataset::new(
            "toy",
            vec![
                AttributeSpec::new("size", Kind::Numeric),
                AttributeSpec::new("effort", Kind::Numeric).with_role(Role::Target),
            ],
            (0..40)
                .map(|i| vec![Cell::Number(f64::from(i / 10 * 100 + i % 10)), Cell::Number(f64::from(i))])
                .collect(),
            "abc",
        )
        .unwrap()
    }

    #[test]
    fn empty_manifest_absence_propagates() {
        let r = assemble_report(&toy(), None, &AssessParams::default());
        assert!(matches!(r.heterogeneity, Dimension::NoEvidence { .. }));
        assert!(matches!(r.timeliness, Dimension::NotAssessed { .. }));
        assert!(matches!(r.commercial_sensitivity, Dimension::NoEvidence { .. }));
        assert_eq!(r.noise_percent(), Some(0.0));
        assert_eq!(r.records(), Some(40));
        assert_eq!(r.target.as_deref(), Some("effort"));
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = AssessParams::default();
        let a = render(&assemble_report(&toy(), None, &p), Format::Json);
        let b = render(&assemble_report(&toy(), None, &p), Format::Json);
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip() {
        let r = assemble_report(&toy(), None, &AssessParams { rubric: Some(Rubric::default()), ..Default::default() });
        let text = render(&r, Format::Json);
        let back: QualityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(render(&back, Format::Json), text);
    }

    #[test]
    fn missing_target_is_not_assessed() {
        let mut ds = toy();
        ds.attributes[1].role = Role::Feature;
        let r = assemble_report(&ds, None, &AssessParams::default());
        assert!(matches!(r.noise, Dimension::NotAssessed { .. }));
    }
}
