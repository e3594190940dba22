use std::collections::BTreeSet;
use std::path::Path;

use super::build::{digest, RawTable};
use super::{AttributeSpec, Dataset};
use crate::error::{Error, Result};

/// Parse a comma-delimited file whose first row is a header.
///
/// With `schema`, attribute names and kinds come from the schema; a first
/// row that repeats the schema names exactly is skipped as a header.
pub fn parse_csv(path: &Path, schema: Option<&[AttributeSpec]>) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Structural(format!("{} is not valid UTF-8", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv_str(&text, &name, schema)
}

pub fn parse_csv_str(text: &str, name: &str, schema: Option<&[AttributeSpec]>) -> Result<Dataset> {
    let mut raw = tokenize_csv(text, name)?;
    if let Some(schema) = schema {
        let header_matches = raw.header.len() == schema.len()
            && raw.header.iter().zip(schema).all(|(h, a)| *h == a.name);
        if !header_matches {
            let first = std::mem::take(&mut raw.header);
            raw.rows.insert(0, first);
        }
        raw.header = schema.iter().map(|a| a.name.clone()).collect();
        raw.declared = vec![None; schema.len()];
    }
    raw.build(schema, &[])
}

pub(crate) fn tokenize_csv(text: &str, name: &str) -> Result<RawTable> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Structural(format!("malformed CSV: {e}")))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        rows.push(rec.iter().map(str::to_string).collect::<Vec<_>>());
        lines.push(line);
    }
    if rows.is_empty() {
        return Err(Error::Structural(format!("`{name}` is empty")));
    }
    let header = rows.remove(0);
    lines.remove(0);

    let mut seen = BTreeSet::new();
    for h in &header {
        if h.is_empty() {
            return Err(Error::Structural("empty column name in header".into()));
        }
        if !seen.insert(h.as_str()) {
            return Err(Error::Structural(format!("duplicate header name `{h}`")));
        }
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != header.len() {
            return Err(Error::Structural(format!(
                "row {} (line {}) has {} fields, expected {}",
                i + 1,
                lines[i],
                r.len(),
                header.len()
            )));
        }
    }
    Ok(RawTable {
        name: name.to_string(),
        declared: vec![None; header.len()],
        header,
        rows,
        digest: digest(text.as_bytes()),
    })
}
