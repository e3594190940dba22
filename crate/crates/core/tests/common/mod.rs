#![allow(dead_code)]

use dqbench::manifest::*;
use dqbench::{Kind, Role, TemplateManifest};
use proptest::collection::{btree_map, vec};
use proptest::option::of;
use proptest::prelude::*;

fn word() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,7}"
}

fn text() -> impl Strategy<Value = String> {
    "[ -~]{0,20}"
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Numeric), Just(Kind::Categorical), Just(Kind::Date), Just(Kind::Text)]
}

fn role() -> impl Strategy<Value = Role> {
    prop_oneof![
        Just(Role::Feature),
        Just(Role::Target),
        Just(Role::Identifier),
        Just(Role::Derived),
        Just(Role::Excluded)
    ]
}

fn number() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, (-1000i32..1000).prop_map(f64::from)]
}

fn attributes() -> impl Strategy<Value = Vec<AttributeDecl>> {
    btree_map(
        word(),
        (of(kind()), of(role()), of(word()), of(word()), vec(text(), 0..3), vec("%[YmdbHy]".prop_map(String::from), 0..3), of(word()), of(text())),
        0..6,
    )
    .prop_map(|m| {
        m.into_iter()
            .map(|(name, (kind, role, unit, quantity, missing_markers, date_format, fisma_field, description))| AttributeDecl {
                name,
                kind,
                role,
                unit,
                quantity,
                unit_attribute: None,
                missing_markers,
                date_format,
                fisma_field,
                description,
            })
            .collect()
    })
}

fn pre_step() -> impl Strategy<Value = PreStep> {
    prop_oneof![
        (vec(0usize..100, 0..4), of(text())).prop_map(|(records, reason)| PreStep::DropRecords { records, reason }),
        (word(), 0i32..100, of(text())).prop_map(|(a, v, reason)| PreStep::Filter { rule: format!("{a} > {v}"), reason }),
        (vec(word(), 0..3), of(text())).prop_map(|(attributes, reason)| PreStep::DropIncomplete { attributes, reason }),
        (vec(word(), 0..3), of(text())).prop_map(|(attributes, reason)| PreStep::DropAttributes { attributes, reason }),
        (word(), 0usize..5, of(text())).prop_map(|(attribute, count, reason)| PreStep::DropTop { attribute, count, reason }),
    ]
}

fn noise() -> impl Strategy<Value = NoiseSection> {
    (
        vec((word(), word(), word(), of(0.0..10.0f64)), 0..3),
        of((0usize..500, 0usize..500)),
        of(text()),
        vec(pre_step(), 0..3),
        of(text()),
    )
        .prop_map(|(f, c, method, pre_steps, notes)| NoiseSection {
            formulas: f
                .into_iter()
                .map(|(attribute, a, b, tolerance)| FormulaDecl { attribute, expression: format!("{a} * {b}"), tolerance })
                .collect(),
            classification: c.map(|(correct, incorrect)| ClassificationRecord { correct, incorrect }),
            method,
            pre_steps,
            notes,
        })
}

fn stat() -> impl Strategy<Value = StatDecl> {
    (of(0usize..1000), of(0usize..1000), of(number()), of(0.0..1e4f64), of(number()), of(number())).prop_map(
        |(count, missing, mean, sd, min, max)| StatDecl { count, missing, mean, sd, min, max },
    )
}

fn inconsistency() -> impl Strategy<Value = InconsistencySection> {
    (
        of(0usize..50),
        btree_map(word(), text(), 0..3),
        btree_map(word(), (number(), 0.0..1e5f64), 0..3),
        btree_map(word(), stat(), 0..3),
        of(text()),
    )
        .prop_map(|(attribute_count, explanations, ranges, summary_statistics, notes)| InconsistencySection {
            attribute_count,
            explanations,
            ranges: ranges.into_iter().map(|(k, (min, w))| (k, Range { min, max: min + w })).collect(),
            summary_statistics,
            notes,
        })
}

fn era() -> impl Strategy<Value = String> {
    prop_oneof![
        (1950i32..2030).prop_map(|y| y.to_string()),
        (1950i32..2000, 0i32..30).prop_map(|(a, d)| format!("{a}-{}", a + d)),
        (195i32..203).prop_map(|d| format!("{}s", d * 10)),
    ]
}

fn timeliness() -> impl Strategy<Value = TimelinessSection> {
    (
        vec((1970i32..2020).prop_map(|y| format!("{y}-01-15")), 0..3),
        vec((1970i32..2020).prop_map(|y| format!("{y}-12-31")), 0..3),
        of(word()),
        of(word()),
        of(era()),
        of(era()),
        of(1950i32..2030),
        of(btree_map((1970i32..2020).prop_map(|y| y.to_string()), 0.0..1.0f64, 0..3)),
        of(text()),
    )
        .prop_map(|(start_dates, completion_dates, sa, ca, recorded_period, publication_period, fy, dist, notes)| {
            TimelinessSection {
                start_dates,
                completion_dates,
                start_date_attribute: sa,
                completion_date_attribute: ca,
                recorded_period,
                publication_period,
                first_publication_year: fy,
                effort_distribution: dist.map(|d| serde_json::to_value(d).unwrap()),
                notes,
            }
        })
}

fn heterogeneity() -> impl Strategy<Value = HeterogeneitySection> {
    (of(any::<bool>()), of(1usize..30), vec(word(), 0..3), btree_map(word(), 0usize..100, 0..3), btree_map(word(), vec(word(), 0..3), 0..2), vec(word(), 0..2), of(text()))
        .prop_map(|(multi_organization, organization_count, organizations, records_per_organization, project_groups, industry_types, notes)| {
            HeterogeneitySection {
                multi_organization,
                organization_count,
                organizations,
                records_per_organization,
                project_groups,
                industry_types,
                notes,
            }
        })
}

fn provenance() -> impl Strategy<Value = ProvenanceSection> {
    (
        vec(word(), 0..3),
        (of(text()), of(text()), of(text()), of(text()), of(text()), of(text())),
        vec(word(), 0..2),
        of(text()),
        word(),
        word(),
    )
        .prop_map(|(source_organizations, (co, contact, purpose, methodology, cm, pre), donors, collection_date, name, version)| {
            ProvenanceSection {
                source_organizations,
                collecting_organization: co,
                contact,
                purpose,
                methodology,
                collection_method: cm,
                preprocessing: pre,
                donors,
                collection_date,
                dataset_name: Some(name),
                version: Some(version),
            }
        })
}

/// Random manifests that satisfy the parse-time invariants.
pub fn arb_manifest() -> impl Strategy<Value = TemplateManifest> {
    let small = (
        of((vec(word(), 0..3), vec(word(), 0..3), of(0usize..50), of(0.0..1.0f64), of(text()), of(text()))),
        of((vec(word(), 0..3), vec(word(), 0..3), btree_map(word(), 0usize..50, 0..3), of(0usize..50), of(0.0..1.0f64), of(text()), of(text()))),
        of((of(text()), of(text()))),
        of((of(0usize..5000), of(text()))),
        of((vec(word(), 0..3), of(text()), of(text()))),
        of((vec(text(), 0..3), of(text()), of(any::<bool>()), of(text()))),
    );
    (
        (of(word()), of(word()), attributes()),
        (of(noise()), of(inconsistency()), of(heterogeneity()), of(timeliness()), of(provenance())),
        small,
    )
        .prop_map(|((name, version, attributes), (noise, inconsistency, heterogeneity, timeliness, provenance), (o, inc, red, amt, cs, acc))| {
            TemplateManifest {
                name,
                version,
                attributes,
                noise,
                outliers: o.map(|(attributes, record_ids, count, proportion, method, notes)| OutliersSection {
                    attributes,
                    record_ids,
                    count,
                    proportion,
                    method,
                    notes,
                }),
                inconsistency,
                incompleteness: inc.map(|(attributes, record_ids, missing_per_attribute, count, proportion, reasons, notes)| {
                    IncompletenessSection { attributes, record_ids, missing_per_attribute, count, proportion, reasons, notes }
                }),
                redundancy: red.map(|(reasons, notes)| RedundancySection { reasons, notes }),
                amount_of_data: amt.map(|(records, notes)| AmountSection { records, notes }),
                heterogeneity,
                timeliness,
                commercial_sensitivity: cs.map(|(anonymized_attributes, reasons, notes)| SensitivitySection {
                    anonymized_attributes,
                    reasons,
                    notes,
                }),
                accessibility: acc.map(|(collection_problems, location, license_restricted, notes)| AccessibilitySection {
                    collection_problems,
                    location,
                    license_restricted,
                    notes,
                }),
                provenance,
            }
        })
}

