//! FiSMA-style quality rating: per-field points out of 100, seven bands,
//! and outright rejection when a mandatory field is missing.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::manifest::TemplateManifest;

/// Ordered from worst (`X`, rejected) to best.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rating {
    X,
    D,
    C,
    B,
    A,
    AA,
    AAA,
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn rating_for(total: u32) -> Rating {
    match total {
        90.. => Rating::AAA,
        80..=89 => Rating::AA,
        70..=79 => Rating::A,
        60..=69 => Rating::B,
        50..=59 => Rating::C,
        40..=49 => Rating::D,
        _ => Rating::X,
    }
}

pub const DEFAULT_RUBRIC: &str = include_str!("../fixtures/rubrics/default.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rubric {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub fields: BTreeMap<String, u32>,
    #[serde(default)]
    pub mandatory: Vec<String>,
}

impl Rubric {
    pub fn from_json(text: &str) -> Result<Self> {
        let r: Rubric = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("rubric: {e}")))?;
        r.check()?;
        Ok(r)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Rubric::from_json(&text)
    }

    pub fn check(&self) -> Result<()> {
        let sum: u32 = self.fields.values().sum();
        if sum != 100 {
            return Err(Error::Config(format!("rubric points sum to {sum}, expected 100")));
        }
        if let Some(m) = self.mandatory.iter().find(|m| !self.fields.contains_key(*m)) {
            return Err(Error::Config(format!("mandatory field `{m}` has no points in the rubric")));
        }
        Ok(())
    }
}

impl Default for Rubric {
    fn default() -> Self {
        Rubric::from_json(DEFAULT_RUBRIC).expect("bundled rubric is valid")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FismaScore {
    pub per_attribute_scores: BTreeMap<String, u32>,
    pub total: u32,
    pub rating: Rating,
    pub mandatory_missing: Vec<String>,
}

impl FismaScore {
    /// Total capped at 100; any mandatory gap forces `X`.
    pub fn from_points(per_attribute_scores: BTreeMap<String, u32>, mandatory_missing: Vec<String>) -> Self {
        let total = per_attribute_scores.values().sum::<u32>().min(100);
        let rating = if mandatory_missing.is_empty() { rating_for(total) } else { Rating::X };
        FismaScore { per_attribute_scores, total, rating, mandatory_missing }
    }
}

/// Score the rubric fields mapped by the manifest (`fisma_field` on an
/// attribute). With a dataset, each field earns its points in proportion to
/// the non-missing share of its column (rounded down), and a mandatory field
/// with any missing value is reported missing.
pub fn fisma_score(m: &TemplateManifest, ds: Option<&Dataset>, rubric: &Rubric) -> Result<FismaScore> {
    rubric.check()?;
    let mut scores = BTreeMap::new();
    let mut missing = Vec::new();
    for (field, &points) in &rubric.fields {
        let mandatory = rubric.mandatory.contains(field);
        let attr = m.attributes.iter().find(|a| a.fisma_field.as_deref() == Some(field.as_str()));
        let (earned, complete) = match (attr, ds) {
            (None, _) => (0, false),
            (Some(_), None) => (points, true),
            (Some(a), Some(ds)) => match ds.attribute_index(&a.name) {
                None => (0, false),
                Some(idx) => {
                    let n = ds.len() as u64;
                    let present = ds.column(idx).filter(|c| !c.is_missing()).count() as u64;
                    let earned = if n == 0 { 0 } else { (u64::from(points) * present / n) as u32 };
                    (earned, n > 0 && present == n)
                }
            },
        };
        if mandatory && !complete {
            missing.push(field.clone());
        }
        scores.insert(field.clone(), earned);
    }
    Ok(FismaScore::from_points(scores, missing))
}
