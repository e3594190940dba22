//! Typed in-memory datasets parsed from CSV and ARFF files.
//!
//! A [`Dataset`] is immutable once built: every transformation
//! (missing-value policy, record filtering, subsetting) returns a new value.

mod arff;
mod build;
mod csv;
mod dates;
mod filter;
mod policy;
mod summary;
mod write;

use std::collections::BTreeSet;
use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use self::arff::{parse_arff, parse_arff_str};
pub use self::build::{load_file, AttributeOverride};
pub use self::csv::{parse_csv, parse_csv_str};
pub use self::dates::{format_date, parse_date, year_of};
pub use self::filter::{filter_records, Predicate};
pub use self::policy::{apply_missing_policy, MissingPolicy};
pub use self::summary::{summarize_attributes, AttributeSummary, NumericSummary};
pub use self::write::to_canonical_csv;

/// Tokens treated as missing in every attribute, before any policy.
pub const DEFAULT_MISSING_TOKENS: [&str; 2] = ["", "?"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Numeric,
    Categorical,
    Date,
    Text,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    #[default]
    Feature,
    Target,
    Identifier,
    Derived,
    Excluded,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Numeric => "numeric",
            Kind::Categorical => "categorical",
            Kind::Date => "date",
            Kind::Text => "text",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: Kind,
    pub role: Role,
    pub unit: Option<String>,
    /// Tokens that mean "missing" for this attribute, in addition to
    /// [`DEFAULT_MISSING_TOKENS`].
    pub missing_markers: BTreeSet<String>,
    /// Declared categorical levels (ARFF nominal types). `None` when undeclared.
    pub levels: Option<Vec<String>>,
    /// strftime-style formats tried in order for date attributes.
    pub date_formats: Vec<String>,
}

impl AttributeSpec {
    pub fn new(name: impl Into<String>, kind: Kind) -> Self {
        AttributeSpec {
            name: name.into(),
            kind,
            ..Default::default()
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    /// Attributes that can feed a classifier or an outlier plot.
    pub fn is_predictive(&self) -> bool {
        matches!(self.role, Role::Feature | Role::Target)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Missing,
    Number(f64),
    Text(String),
    /// A parsed date plus the index of the declared format it matched.
    Date { date: NaiveDate, format: u8 },
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    /// Numeric view used by the classifier: dates become day numbers.
    pub fn as_ordinal(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            Cell::Date { date, .. } => Some(f64::from(date.num_days_from_ce())),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

/// Parse a token as a finite number. `inf` and `NaN` are not numbers here.
pub fn parse_number(token: &str) -> Option<f64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub attributes: Vec<AttributeSpec>,
    pub records: Vec<Vec<Cell>>,
    /// Hex SHA-256 of the raw input bytes.
    pub source_digest: String,
}

impl Dataset {
    /// Build a dataset, checking the shape invariants.
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<AttributeSpec>,
        records: Vec<Vec<Cell>>,
        source_digest: impl Into<String>,
    ) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::Structural("dataset has no attributes".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if !seen.insert(a.name.as_str()) {
                return Err(Error::Structural(format!(
                    "duplicate attribute name `{}`",
                    a.name
                )));
            }
        }
        for (i, r) in records.iter().enumerate() {
            if r.len() != attributes.len() {
                return Err(Error::Structural(format!(
                    "row {} has {} cells, expected {}",
                    i + 1,
                    r.len(),
                    attributes.len()
                )));
            }
        }
        Ok(Dataset {
            name: name.into(),
            attributes,
            records,
            source_digest: source_digest.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Like [`attribute_index`](Self::attribute_index) but an unknown name is
    /// a configuration error.
    pub fn require_attribute(&self, name: &str) -> Result<usize> {
        self.attribute_index(name).ok_or_else(|| {
            Error::Config(format!(
                "unknown attribute `{name}` in dataset `{}`",
                self.name
            ))
        })
    }

    pub fn column(&self, idx: usize) -> impl Iterator<Item = &Cell> + '_ {
        self.records.iter().map(move |r| &r[idx])
    }

    /// Non-missing numeric values of a column, in record order.
    pub fn numeric_values(&self, idx: usize) -> Vec<f64> {
        self.column(idx).filter_map(Cell::as_number).collect()
    }

    pub fn missing_cells(&self) -> usize {
        self.records
            .iter()
            .flat_map(|r| r.iter())
            .filter(|c| c.is_missing())
            .count()
    }

    /// Index of the single target attribute. More than one is a
    /// configuration error; none is `Ok(None)`.
    pub fn target_index(&self) -> Result<Option<usize>> {
        let targets: Vec<usize> = self
            .attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == Role::Target)
            .map(|(i, _)| i)
            .collect();
        match targets.as_slice() {
            [] => Ok(None),
            [i] => Ok(Some(*i)),
            _ => Err(Error::Config(format!(
                "dataset `{}` declares {} target attributes; exactly one is required",
                self.name,
                targets.len()
            ))),
        }
    }

    /// Mark `name` as the only target attribute. A previous target becomes a
    /// feature.
    pub fn with_target(mut self, name: &str) -> Result<Self> {
        let idx = self.require_attribute(name)?;
        for (i, a) in self.attributes.iter_mut().enumerate() {
            if i == idx {
                a.role = Role::Target;
            } else if a.role == Role::Target {
                a.role = Role::Feature;
            }
        }
        Ok(self)
    }

    /// A new dataset holding the given records, in the given order.
    pub fn select_records(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            attributes: self.attributes.clone(),
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            source_digest: self.source_digest.clone(),
        }
    }

    /// A new dataset without the named attributes.
    pub fn drop_attributes(&self, names: &[String]) -> Result<Dataset> {
        let mut drop = BTreeSet::new();
        for n in names {
            drop.insert(self.require_attribute(n)?);
        }
        let keep: Vec<usize> = (0..self.attributes.len())
            .filter(|i| !drop.contains(i))
            .collect();
        Dataset::new(
            self.name.clone(),
            keep.iter().map(|&i| self.attributes[i].clone()).collect(),
            self.records
                .iter()
                .map(|r| keep.iter().map(|&i| r[i].clone()).collect())
                .collect(),
            self.source_digest.clone(),
        )
    }

    /// Cell-for-cell equality of schema and records, ignoring the digest.
    pub fn same_content(&self, other: &Dataset) -> bool {
        self.name == other.name
            && self.attributes == other.attributes
            && self.records == other.records
    }
}
