//! Reader for the Weka ARFF format (dense data only).

use std::path::Path;

use super::build::{digest, RawTable};
use super::{AttributeSpec, Dataset, Kind};
use crate::error::{Error, Result};

/// ARFF's default date pattern, `yyyy-MM-dd'T'HH:mm:ss`.
const DEFAULT_DATE_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

pub fn parse_arff(path: &Path) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Structural(format!("{} is not valid UTF-8", path.display())))?;
    parse_arff_str(&text)
}

pub fn parse_arff_str(text: &str) -> Result<Dataset> {
    tokenize_arff(text)?.build(None, &[])
}

pub(crate) fn tokenize_arff(text: &str) -> Result<RawTable> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<AttributeSpec> = Vec::new();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut in_data = false;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(Error::Structural(format!(
                    "line {}: sparse ARFF rows are not supported",
                    lineno + 1
                )));
            }
            let tokens = split_row(line)
                .map_err(|e| Error::Structural(format!("line {}: {e}", lineno + 1)))?;
            if tokens.len() != attributes.len() {
                return Err(Error::Structural(format!(
                    "row {} (line {}) has {} values, expected {}",
                    rows.len() + 1,
                    lineno + 1,
                    tokens.len(),
                    attributes.len()
                )));
            }
            rows.push(tokens);
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            let rest = line["@relation".len()..].trim();
            let (name, _) = take_name(rest)
                .map_err(|e| Error::Structural(format!("line {}: {e}", lineno + 1)))?;
            relation = Some(name);
        } else if lower.starts_with("@attribute") {
            let rest = line["@attribute".len()..].trim();
            let attr = parse_attribute(rest)
                .map_err(|e| Error::Structural(format!("line {}: {e}", lineno + 1)))?;
            if attributes.iter().any(|a| a.name == attr.name) {
                return Err(Error::Structural(format!(
                    "duplicate attribute `{}`",
                    attr.name
                )));
            }
            attributes.push(attr);
        } else if lower.starts_with("@data") {
            in_data = true;
        } else {
            return Err(Error::Structural(format!(
                "line {}: unexpected header line `{line}`",
                lineno + 1
            )));
        }
    }

    if !in_data {
        return Err(Error::Structural("missing @data section".into()));
    }
    if attributes.is_empty() {
        return Err(Error::Structural("no @attribute declarations".into()));
    }
    Ok(RawTable {
        name: relation.unwrap_or_default(),
        header: attributes.iter().map(|a| a.name.clone()).collect(),
        declared: attributes.into_iter().map(Some).collect(),
        rows,
        digest: digest(text.as_bytes()),
    })
}

/// Read a possibly quoted name from the front of `s`; returns the name and
/// the remainder.
fn take_name(s: &str) -> Result<(String, &str), String> {
    let mut chars = s.char_indices();
    match chars.next() {
        None => Err("expected a name".into()),
        Some((_, q @ ('\'' | '"'))) => {
            let mut name = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    name.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((name, &s[i + 1..]));
                } else {
                    name.push(c);
                }
            }
            Err("unterminated quoted name".into())
        }
        Some(_) => {
            let end = s
                .find(|c: char| c.is_whitespace() || c == '{')
                .unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
    }
}

fn parse_attribute(rest: &str) -> Result<AttributeSpec, String> {
    let (name, ty) = take_name(rest)?;
    let ty = ty.trim();
    let lower = ty.to_ascii_lowercase();
    let mut spec = AttributeSpec::new(name, Kind::Numeric);
    if lower.starts_with("numeric") || lower.starts_with("real") || lower.starts_with("integer") {
        spec.kind = Kind::Numeric;
    } else if lower.starts_with("string") {
        spec.kind = Kind::Text;
    } else if lower.starts_with("date") {
        spec.kind = Kind::Date;
        let fmt = ty["date".len()..].trim();
        let fmt = if fmt.is_empty() {
            DEFAULT_DATE_FORMAT.to_string()
        } else {
            let (pattern, _) = take_name(fmt)?;
            java_to_strftime(&pattern)
        };
        spec.date_formats = vec![fmt];
    } else if ty.starts_with('{') {
        let close = ty.rfind('}').ok_or("unterminated level list")?;
        let levels = split_row(&ty[1..close])?;
        spec.kind = Kind::Categorical;
        spec.levels = Some(levels);
    } else {
        return Err(format!("unsupported attribute type `{ty}`"));
    }
    Ok(spec)
}

/// Split a data row (or level list) on commas, honouring quotes.
fn split_row(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for c in line.chars() {
        if escaped {
            cur.push(c);
            escaped = false;
            continue;
        }
        match (quote, c) {
            (_, '\\') => escaped = true,
            (Some(q), c) if c == q => quote = None,
            (Some(_), c) => cur.push(c),
            (None, '\'' | '"') if cur.trim().is_empty() => {
                cur.clear();
                quote = Some(c);
            }
            (None, ',') => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            (None, c) => cur.push(c),
        }
    }
    if quote.is_some() {
        return Err("unterminated quote".into());
    }
    out.push(cur.trim().to_string());
    Ok(out)
}

/// Translate a Java `SimpleDateFormat` pattern into strftime.
fn java_to_strftime(pattern: &str) -> String {
    let mut out = String::new();
    let chars: Vec<char> = pattern.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\'' {
            i += 1;
            while i < chars.len() && chars[i] != '\'' {
                out.push(chars[i]);
                i += 1;
            }
            i += 1;
            continue;
        }
        let mut run = 1;
        while i + run < chars.len() && chars[i + run] == c {
            run += 1;
        }
        let piece = match (c, run) {
            ('y', 2) => "%y".to_string(),
            ('y', _) => "%Y".to_string(),
            ('M', 1 | 2) => "%m".to_string(),
            ('M', 3) => "%b".to_string(),
            ('M', _) => "%B".to_string(),
            ('d', _) => "%d".to_string(),
            ('H', _) => "%H".to_string(),
            ('m', _) => "%M".to_string(),
            ('s', _) => "%S".to_string(),
            _ => std::iter::repeat_n(c, run).collect(),
        };
        out.push_str(&piece);
        i += run;
    }
    out
}
