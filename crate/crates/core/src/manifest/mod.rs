//! Dataset collection/submission manifest: typed model, parsing with
//! unknown-key warnings, and validation against a dataset.

mod parse;
mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeOverride, Kind, MissingPolicy, Role};

pub use parse::{parse_manifest, parse_manifest_str, to_json, ParsedManifest};
pub use validate::{
    completeness, validate_manifest, ValidationReport, COMPLETENESS_PARAMETERS, COUNT_TOLERANCE,
    STAT_TOLERANCE,
};

/// The eleven section keys, in template order.
pub const SECTION_KEYS: [&str; 11] = [
    "noise",
    "outliers",
    "inconsistency",
    "incompleteness",
    "redundancy",
    "amount_of_data",
    "heterogeneity",
    "timeliness",
    "commercial_sensitivity",
    "accessibility",
    "provenance",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TemplateManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<AttributeDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outliers: Option<OutliersSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inconsistency: Option<InconsistencySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incompleteness: Option<IncompletenessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redundancy: Option<RedundancySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amount_of_data: Option<AmountSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heterogeneity: Option<HeterogeneitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeliness: Option<TimelinessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commercial_sensitivity: Option<SensitivitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accessibility: Option<AccessibilitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceSection>,
}

/// Per-attribute declarations.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AttributeDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    /// Semantic quantity shared by attributes that should use one unit,
    /// e.g. "functional size".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<String>,
    /// Attribute holding the unit name for each record, when units vary per row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_attribute: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing_markers: Vec<String>,
    /// One format or a list, tried in order.
    #[serde(
        default,
        skip_serializing_if = "Vec::is_empty",
        deserialize_with = "one_or_many"
    )]
    pub date_format: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fisma_field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(String),
        Many(Vec<String>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(s) => vec![s],
        OneOrMany::Many(v) => v,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FormulaDecl {
    pub attribute: String,
    pub expression: String,
    /// Absolute tolerance; the default is relative 1e-6.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub correct: usize,
    pub incorrect: usize,
}

/// Record-level transformation applied before noise assessment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PreStep {
    /// Remove records by zero-based index.
    DropRecords {
        records: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
    /// Keep records satisfying `rule`.
    Filter {
        rule: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
    /// Remove records with a missing value in any listed attribute (all when empty).
    DropIncomplete {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        attributes: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
    DropAttributes {
        attributes: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
    /// Remove the `count` records with the largest values of `attribute`.
    DropTop {
        attribute: String,
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formulas: Vec<FormulaDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pre_steps: Vec<PreStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutliersSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub record_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proportion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StatDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    /// Sample standard deviation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InconsistencySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute_count: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub explanations: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ranges: BTreeMap<String, Range>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary_statistics: BTreeMap<String, StatDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IncompletenessSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub record_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub missing_per_attribute: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proportion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasons: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RedundancySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasons: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AmountSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneitySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multi_organization: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub organization_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub organizations: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub records_per_organization: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub project_groups: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub industry_types: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimelinessSection {
    /// Per-project start dates (any text beginning with a four-digit year).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub start_dates: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub completion_dates: Vec<String>,
    /// Dataset columns holding per-project dates or years.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_date_attribute: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_date_attribute: Option<String>,
    /// Era of the recorded project dates, reported verbatim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recorded_period: Option<String>,
    /// Period stated by a publication describing the data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publication_period: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_publication_year: Option<i32>,
    /// Free-form; not scored for completeness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effort_distribution: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anonymized_attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasons: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AccessibilitySection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub collection_problems: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license_restricted: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub source_organizations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collecting_organization: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purpose: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methodology: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collection_method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preprocessing: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub donors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collection_date: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
}

impl TemplateManifest {
    pub fn attribute(&self, name: &str) -> Option<&AttributeDecl> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Overrides for dataset loading, from the attribute declarations.
    pub fn overrides(&self) -> Vec<AttributeOverride> {
        self.attributes
            .iter()
            .map(|a| AttributeOverride {
                name: a.name.clone(),
                kind: a.kind,
                role: a.role,
                unit: a.unit.clone(),
                date_formats: a.date_format.clone(),
            })
            .collect()
    }

    pub fn missing_policy(&self) -> MissingPolicy {
        self.attributes
            .iter()
            .filter(|a| !a.missing_markers.is_empty())
            .map(|a| (a.name.clone(), a.missing_markers.iter().cloned().collect()))
            .collect()
    }

    /// Name of the attribute declared with the target role.
    pub fn target(&self) -> Option<&str> {
        self.attributes
            .iter()
            .find(|a| a.role == Some(Role::Target))
            .map(|a| a.name.as_str())
    }

    pub fn formulas(&self) -> &[FormulaDecl] {
        self.noise.as_ref().map_or(&[], |n| &n.formulas)
    }

    pub fn pre_steps(&self) -> &[PreStep] {
        self.noise.as_ref().map_or(&[], |n| &n.pre_steps)
    }
}
