use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{
    parse_date, parse_number, AttributeSpec, Cell, Dataset, Kind, Role, DEFAULT_MISSING_TOKENS,
};
use crate::error::{Error, Result};

/// Tokenized file contents before typing.
#[derive(Debug)]
pub(crate) struct RawTable {
    pub name: String,
    pub header: Vec<String>,
    /// Trimmed tokens, one row per record.
    pub rows: Vec<Vec<String>>,
    /// Per-column declarations carried by the file itself (ARFF).
    pub declared: Vec<Option<AttributeSpec>>,
    pub digest: String,
}

pub(crate) fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Per-attribute adjustments applied by name while typing a raw table.
/// Anything left `None` keeps the file's declaration or the inferred value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttributeOverride {
    pub name: String,
    pub kind: Option<Kind>,
    pub role: Option<Role>,
    pub unit: Option<String>,
    pub date_formats: Vec<String>,
}

impl RawTable {
    /// Type the table. `schema`, when given, replaces the header entirely;
    /// `overrides` patch individual attributes by name.
    pub fn build(
        self,
        schema: Option<&[AttributeSpec]>,
        overrides: &[AttributeOverride],
    ) -> Result<Dataset> {
        let width = self.header.len();
        let mut specs: Vec<(AttributeSpec, bool)> = match schema {
            Some(s) => {
                if s.len() != width {
                    return Err(Error::Structural(format!(
                        "schema declares {} attributes but the file has {} columns",
                        s.len(),
                        width
                    )));
                }
                s.iter().map(|a| (a.clone(), true)).collect()
            }
            None => self
                .header
                .iter()
                .zip(&self.declared)
                .map(|(name, decl)| match decl {
                    Some(d) => (d.clone(), true),
                    None => (AttributeSpec::new(name.clone(), Kind::Numeric), false),
                })
                .collect(),
        };

        let by_name: BTreeMap<String, usize> = specs
            .iter()
            .enumerate()
            .map(|(i, (a, _))| (a.name.clone(), i))
            .collect();
        for o in overrides {
            let &i = by_name.get(o.name.as_str()).ok_or_else(|| {
                Error::Config(format!(
                    "attribute `{}` is not present in `{}`",
                    o.name, self.name
                ))
            })?;
            let (spec, explicit) = &mut specs[i];
            if let Some(k) = o.kind {
                spec.kind = k;
                *explicit = true;
            }
            if let Some(r) = o.role {
                spec.role = r;
            }
            if o.unit.is_some() {
                spec.unit = o.unit.clone();
            }
            if !o.date_formats.is_empty() {
                spec.date_formats = o.date_formats.clone();
                if o.kind.is_none() {
                    spec.kind = Kind::Date;
                    *explicit = true;
                }
            }
        }

        for (col, (spec, explicit)) in specs.iter_mut().enumerate() {
            if spec.kind == Kind::Date && spec.date_formats.is_empty() {
                return Err(Error::Config(format!(
                    "date attribute `{}` declares no date format",
                    spec.name
                )));
            }
            if !*explicit {
                spec.kind = infer_kind(self.rows.iter().map(|r| r[col].as_str()), spec);
            }
        }

        let mut records = Vec::with_capacity(self.rows.len());
        for (row_idx, row) in self.rows.iter().enumerate() {
            let mut rec = Vec::with_capacity(width);
            for (col, token) in row.iter().enumerate() {
                rec.push(convert(token, &specs[col].0, row_idx + 1)?);
            }
            records.push(rec);
        }
        let attributes = specs.into_iter().map(|(a, _)| a).collect();
        let ds = Dataset::new(self.name, attributes, records, self.digest)?;

        // Numeric markers ("-1" vs "-1.0") are matched after typing.
        let policy: super::MissingPolicy = ds
            .attributes
            .iter()
            .filter(|a| !a.missing_markers.is_empty())
            .map(|a| (a.name.clone(), a.missing_markers.clone()))
            .collect();
        if policy.is_empty() {
            Ok(ds)
        } else {
            super::apply_missing_policy(&ds, &policy)
        }
    }
}

fn is_missing_token(token: &str, spec: &AttributeSpec) -> bool {
    DEFAULT_MISSING_TOKENS.contains(&token) || spec.missing_markers.contains(token)
}

/// Numeric iff every non-missing raw token parses as a finite number.
fn infer_kind<'a>(tokens: impl Iterator<Item = &'a str>, spec: &AttributeSpec) -> Kind {
    let mut tokens = tokens.filter(|t| !is_missing_token(t, spec));
    if tokens.all(|t| parse_number(t).is_some()) {
        Kind::Numeric
    } else {
        Kind::Categorical
    }
}

fn convert(token: &str, spec: &AttributeSpec, row: usize) -> Result<Cell> {
    if is_missing_token(token, spec) {
        return Ok(Cell::Missing);
    }
    let invalid = |detail: String| Error::Validation {
        row,
        attribute: spec.name.clone(),
        detail,
    };
    match spec.kind {
        Kind::Numeric => parse_number(token)
            .map(Cell::Number)
            .ok_or_else(|| invalid(format!("`{token}` is not a number"))),
        Kind::Categorical => {
            if let Some(levels) = &spec.levels {
                if !levels.iter().any(|l| l == token) {
                    return Err(invalid(format!("`{token}` is not a declared level")));
                }
            }
            Ok(Cell::Text(token.to_string()))
        }
        Kind::Text => Ok(Cell::Text(token.to_string())),
        Kind::Date => {
            for (i, f) in spec.date_formats.iter().enumerate() {
                if let Some(date) = parse_date(token, f) {
                    return Ok(Cell::Date {
                        date,
                        format: i as u8,
                    });
                }
            }
            // Unparseable dates stay as text; the consistency check reports them.
            Ok(Cell::Text(token.to_string()))
        }
    }
}

/// Read a CSV or ARFF file (chosen by extension) and apply `overrides`.
pub fn load_file(path: &Path, overrides: &[AttributeOverride]) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Structural(format!("{} is not valid UTF-8", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let is_arff = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("arff"));
    if is_arff {
        super::arff::tokenize_arff(&text)?.build(None, overrides)
    } else {
        super::csv::tokenize_csv(&text, &name)?.build(None, overrides)
    }
}
