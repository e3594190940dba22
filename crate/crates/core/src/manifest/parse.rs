use std::collections::BTreeSet;
use std::path::Path;

use super::TemplateManifest;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedManifest {
    pub manifest: TemplateManifest,
    /// Unknown keys, as `ignored key `path``.
    pub warnings: Vec<String>,
}

pub fn parse_manifest(path: &Path) -> Result<ParsedManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest_str(&text)
}

pub fn parse_manifest_str(text: &str) -> Result<ParsedManifest> {
    let mut de = serde_json::Deserializer::from_str(text);
    let mut warnings = Vec::new();
    let manifest: TemplateManifest = {
        let mut on_ignored = |path: serde_ignored::Path| {
            // Option layers show up as `?` segments.
            let path = path.to_string().replace(".?", "");
            warnings.push(format!("ignored unknown key `{path}`"));
        };
        let tracked = serde_ignored::Deserializer::new(&mut de, &mut on_ignored);
        serde_path_to_error::deserialize(tracked).map_err(|e| {
            let path = e.path().to_string();
            Error::manifest(path, e.into_inner().to_string())
        })?
    };
    de.end().map_err(|e| Error::manifest(".", e.to_string()))?;
    check(&manifest)?;
    Ok(ParsedManifest { manifest, warnings })
}

fn check(m: &TemplateManifest) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, a) in m.attributes.iter().enumerate() {
        if a.name.trim().is_empty() {
            return Err(Error::manifest(format!("attributes[{i}].name"), "empty attribute name"));
        }
        if !seen.insert(a.name.as_str()) {
            return Err(Error::manifest(
                format!("attributes[{i}].name"),
                format!("attribute `{}` declared twice", a.name),
            ));
        }
    }
    if let Some(inc) = &m.inconsistency {
        for (name, r) in &inc.ranges {
            if r.min > r.max {
                return Err(Error::manifest(
                    format!("inconsistency.ranges.{name}"),
                    format!("range for `{name}` has min {} > max {}", r.min, r.max),
                ));
            }
        }
    }
    Ok(())
}

/// Pretty JSON with sections in template order.
pub fn to_json(m: &TemplateManifest) -> String {
    serde_json::to_string_pretty(m).expect("manifest serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_manifest() {
        let p = parse_manifest_str(r#"{"name": "x", "version": "1"}"#).unwrap();
        assert_eq!(p.manifest.name.as_deref(), Some("x"));
        assert!(p.manifest.noise.is_none() && p.manifest.provenance.is_none());
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn unknown_keys_warn_with_paths() {
        let p = parse_manifest_str(
            r#"{"name": "x", "colour": 1, "noise": {"formulae": []}, "attributes": [{"name": "a", "weird": true}]}"#,
        )
        .unwrap();
        assert_eq!(p.warnings.len(), 3, "{:?}", p.warnings);
        assert!(p.warnings.iter().any(|w| w.contains("noise.formulae")));
        assert!(p.warnings.iter().any(|w| w.contains("attributes.0.weird")));
    }

    #[test]
    fn type_errors_carry_paths() {
        let err = parse_manifest_str(r#"{"amount_of_data": {"records": "many"}}"#).unwrap_err();
        match err {
            Error::Manifest { path, .. } => assert_eq!(path, "amount_of_data.records"),
            e => panic!("{e}"),
        }
        assert!(parse_manifest_str("{").is_err());
        assert!(parse_manifest_str("{} {}").is_err());
    }

    #[test]
    fn range_violation_names_attribute() {
        let err = parse_manifest_str(
            r#"{"inconsistency": {"ranges": {"Effort": {"min": 10, "max": 1}}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("Effort"));
    }

    #[test]
    fn date_format_string_or_list() {
        let p = parse_manifest_str(
            r#"{"attributes": [{"name": "d", "date_format": "%Y"}, {"name": "e", "date_format": ["%Y", "%d/%m/%Y"]}]}"#,
        )
        .unwrap();
        assert_eq!(p.manifest.attributes[0].date_format, vec!["%Y"]);
        assert_eq!(p.manifest.attributes[1].date_format.len(), 2);
    }

    #[test]
    fn pre_steps_tagged() {
        let p = parse_manifest_str(
            r#"{"noise": {"pre_steps": [{"op": "drop_top", "attribute": "Effort", "count": 1}, {"op": "filter", "rule": "Effort > 0"}]}}"#,
        )
        .unwrap();
        assert_eq!(p.manifest.pre_steps().len(), 2);
        assert!(parse_manifest_str(r#"{"noise": {"pre_steps": [{"op": "explode"}]}}"#).is_err());
    }

    #[test]
    fn duplicate_attribute_rejected() {
        assert!(parse_manifest_str(r#"{"attributes": [{"name": "a"}, {"name": "a"}]}"#).is_err());
    }
}
