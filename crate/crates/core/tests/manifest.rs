mod common;

use dqbench::manifest::{parse_manifest, parse_manifest_str, to_json, validate_manifest};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_serialize_parse_identity(m in common::arb_manifest()) {
        let text = to_json(&m);
        let parsed = parse_manifest_str(&text).unwrap();
        prop_assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
        prop_assert_eq!(&parsed.manifest, &m);
        prop_assert_eq!(to_json(&parsed.manifest), text);
    }
}

#[test]
fn fixture_manifests_parse_without_warnings() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifests");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let parsed = parse_manifest(&path).unwrap();
        assert!(parsed.warnings.is_empty(), "{}: {:?}", path.display(), parsed.warnings);
        let report = validate_manifest(&parsed.manifest, None);
        assert!(report.errors.is_empty(), "{}: {:?}", path.display(), report.errors);
        n += 1;
    }
    assert_eq!(n, 12);
}

#[test]
fn wrong_type_names_the_path() {
    let err = parse_manifest_str(r#"{"heterogeneity": {"organization_count": "ten"}}"#).unwrap_err();
    assert!(err.to_string().contains("heterogeneity.organization_count"), "{err}");
}
