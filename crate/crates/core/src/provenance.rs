//! Provenance assessors: commercial sensitivity, accessibility, and
//! trustworthiness.

use serde::{Deserialize, Serialize};

use crate::manifest::TemplateManifest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitivityStatus {
    Yes,
    NoEvidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub status: SensitivityStatus,
    /// Anonymized or removed attributes, then the stated reasons.
    pub details: Vec<String>,
}

fn filled(s: &Option<String>) -> Option<&str> {
    s.as_deref().map(str::trim).filter(|s| !s.is_empty())
}

pub fn assess_commercial_sensitivity(m: &TemplateManifest) -> SensitivityResult {
    let mut details = Vec::new();
    if let Some(s) = &m.commercial_sensitivity {
        details.extend(s.anonymized_attributes.iter().filter(|a| !a.trim().is_empty()).cloned());
        details.extend(filled(&s.reasons).map(String::from));
    }
    let status = if details.is_empty() { SensitivityStatus::NoEvidence } else { SensitivityStatus::Yes };
    SensitivityResult { status, details }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccessibilityResult {
    pub public: bool,
    pub location: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub fn assess_accessibility(m: &TemplateManifest) -> AccessibilityResult {
    let a = m.accessibility.clone().unwrap_or_default();
    let location = filled(&a.location).map(String::from);
    let mut warnings = Vec::new();
    if location.is_none() {
        warnings.push("no repository location declared".into());
    }
    let restricted = a.license_restricted.unwrap_or(false);
    AccessibilityResult { public: location.is_some() && !restricted, location, warnings }
}

/// How many provenance fields a dataset needs to count as trustworthy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// Contact or donor details.
    Minimal,
    /// Contact details and collection method.
    #[default]
    Standard,
    /// All eleven fields.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrustworthinessResult {
    pub status: bool,
    pub strictness: Strictness,
    pub present_provenance_fields: Vec<String>,
    pub absent: Vec<String>,
}

pub const PROVENANCE_FIELDS: [&str; 11] = [
    "source_organizations",
    "collecting_organization",
    "contact",
    "purpose",
    "methodology",
    "collection_method",
    "preprocessing",
    "donors",
    "collection_date",
    "dataset_name",
    "version",
];

pub fn assess_trustworthiness(m: &TemplateManifest) -> TrustworthinessResult {
    assess_trustworthiness_with(m, Strictness::default())
}

pub fn assess_trustworthiness_with(m: &TemplateManifest, strictness: Strictness) -> TrustworthinessResult {
    let p = m.provenance.clone().unwrap_or_default();
    let list = |v: &[String]| v.iter().any(|s| !s.trim().is_empty());
    let present = [
        list(&p.source_organizations),
        filled(&p.collecting_organization).is_some(),
        filled(&p.contact).is_some(),
        filled(&p.purpose).is_some(),
        filled(&p.methodology).is_some(),
        filled(&p.collection_method).is_some(),
        filled(&p.preprocessing).is_some(),
        list(&p.donors),
        filled(&p.collection_date).is_some(),
        filled(&p.dataset_name).is_some(),
        filled(&p.version).is_some(),
    ];
    let (mut have, mut absent) = (Vec::new(), Vec::new());
    for (name, &ok) in PROVENANCE_FIELDS.iter().zip(&present) {
        if ok { have.push(name.to_string()) } else { absent.push(name.to_string()) }
    }
    let contact = present[2];
    let status = match strictness {
        Strictness::Minimal => contact || present[7],
        Strictness::Standard => contact && present[5],
        Strictness::Full => absent.is_empty(),
    };
    TrustworthinessResult { status, strictness, present_provenance_fields: have, absent }
}
