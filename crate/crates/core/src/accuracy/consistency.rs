use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{Cell, Dataset, Kind};
use crate::error::{Error, Result};
use crate::formula::{BoundFormula, EvalError, Formula};
use crate::manifest::TemplateManifest;

pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-6;
/// Share of records that must fit better with two labels swapped.
pub const LABEL_SWAP_SHARE: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    FormulaViolation,
    UnitMixture,
    DateFormatMixture,
    LabelSwapSuspicion,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

impl Tolerance {
    fn exceeded(self, stated: f64, computed: f64) -> bool {
        let diff = (stated - computed).abs();
        match self {
            Tolerance::Relative(r) => diff > r * stated.abs().max(computed.abs()),
            Tolerance::Absolute(a) => diff > a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub record: usize,
    pub stated: f64,
    /// `None` when the expression is undefined (division by zero).
    pub computed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub attribute: String,
    pub expression: String,
    pub tolerance: Tolerance,
    pub evaluated: usize,
    /// Records skipped for a missing or non-numeric operand or stored value.
    pub unevaluated: usize,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyFinding {
    pub kind: FindingKind,
    pub attributes: Vec<String>,
    pub records: Vec<usize>,
    pub detail: String,
    /// Stated vs computed values and the tolerance, for formula violations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<FormulaCheck>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub findings: Vec<ConsistencyFinding>,
    pub formula_checks: Vec<FormulaCheck>,
    pub warnings: Vec<String>,
}

enum Outcome {
    Skipped,
    Value { stated: f64, computed: Option<f64> },
}

fn outcome<'c>(f: &BoundFormula, target: usize, get: &dyn Fn(usize) -> &'c Cell) -> Outcome {
    let Some(stated) = get(target).as_number() else { return Outcome::Skipped };
    match f.eval_with(get) {
        Ok(v) => Outcome::Value { stated, computed: Some(v) },
        Err(EvalError::Undefined) => Outcome::Value { stated, computed: None },
        Err(EvalError::MissingOperand | EvalError::NotNumeric) => Outcome::Skipped,
    }
}

fn residual(stated: f64, computed: Option<f64>) -> f64 {
    computed.map_or(f64::INFINITY, |c| (stated - c).abs())
}

/// Check declared formulas, unit declarations and date formats.
pub fn check_consistency(ds: &Dataset, m: &TemplateManifest) -> Result<ConsistencyReport> {
    let mut report = ConsistencyReport::default();
    for (i, decl) in m.formulas().iter().enumerate() {
        let path = format!("noise.formulas[{i}]");
        let formula = Formula::parse(&decl.expression)
            .map_err(|e| Error::manifest(format!("{path}.expression"), e.to_string()))?;
        let bound = formula
            .bind(ds)
            .map_err(|e| Error::manifest(format!("{path}.expression"), e.to_string()))?;
        let target = ds.attribute_index(&decl.attribute).ok_or_else(|| {
            Error::manifest(format!("{path}.attribute"), format!("unknown attribute `{}`", decl.attribute))
        })?;
        let tolerance = match decl.tolerance {
            Some(t) if t.is_finite() && t >= 0.0 => Tolerance::Absolute(t),
            Some(t) => return Err(Error::manifest(format!("{path}.tolerance"), format!("invalid tolerance {t}"))),
            None => Tolerance::Relative(DEFAULT_RELATIVE_TOLERANCE),
        };

        let mut check = FormulaCheck {
            attribute: decl.attribute.clone(),
            expression: decl.expression.clone(),
            tolerance,
            evaluated: 0,
            unevaluated: 0,
            mismatches: Vec::new(),
        };
        for (r, rec) in ds.records.iter().enumerate() {
            match outcome(&bound, target, &|c| &rec[c]) {
                Outcome::Skipped => check.unevaluated += 1,
                Outcome::Value { stated, computed } => {
                    check.evaluated += 1;
                    let bad = computed.is_none_or(|c| tolerance.exceeded(stated, c));
                    if bad {
                        check.mismatches.push(Mismatch {
                            record: r,
                            stated,
                            computed,
                            detail: computed.is_none().then(|| "undefined".to_string()),
                        });
                    }
                }
            }
        }
        let mut attrs = vec![decl.attribute.clone()];
        attrs.extend(formula.attributes().into_iter().filter(|a| a != &decl.attribute));
        if !check.mismatches.is_empty() {
            report.findings.push(ConsistencyFinding {
                kind: FindingKind::FormulaViolation,
                attributes: attrs.clone(),
                records: check.mismatches.iter().map(|x| x.record).collect(),
                detail: format!(
                    "{} of {} evaluated records disagree with `{} = {}`",
                    check.mismatches.len(),
                    check.evaluated,
                    decl.attribute,
                    decl.expression
                ),
                formula: Some(check.clone()),
            });
        }
        report.findings.extend(label_swaps(ds, &bound, target, &check));
        report.formula_checks.push(check);
    }
    unit_mixtures(ds, m, &mut report);
    date_mixtures(ds, &mut report);
    Ok(report)
}

fn label_swaps(ds: &Dataset, f: &BoundFormula, target: usize, base: &FormulaCheck) -> Vec<ConsistencyFinding> {
    let mut cols = vec![target];
    cols.extend(f.columns().into_iter().filter(|&c| c != target));
    let mut out = Vec::new();
    for (ai, &a) in cols.iter().enumerate() {
        for &b in &cols[ai + 1..] {
            let mut both = 0;
            let mut better = Vec::new();
            let mut swapped_violations = 0;
            for (r, rec) in ds.records.iter().enumerate() {
                let swap = |c: usize| -> &Cell {
                    if c == a {
                        &rec[b]
                    } else if c == b {
                        &rec[a]
                    } else {
                        &rec[c]
                    }
                };
                let normal = outcome(f, target, &|c| &rec[c]);
                let swapped = outcome(f, target, &swap);
                if let Outcome::Value { stated, computed } = &swapped {
                    if computed.is_none_or(|c| base.tolerance.exceeded(*stated, c)) {
                        swapped_violations += 1;
                    }
                }
                if let (
                    Outcome::Value { stated: s0, computed: c0 },
                    Outcome::Value { stated: s1, computed: c1 },
                ) = (normal, swapped)
                {
                    both += 1;
                    if residual(s1, c1) < residual(s0, c0) {
                        better.push(r);
                    }
                }
            }
            let share = if both == 0 { 0.0 } else { better.len() as f64 / both as f64 };
            if both > 0 && swapped_violations < base.mismatches.len() && share >= LABEL_SWAP_SHARE {
                let (na, nb) = (&ds.attributes[a].name, &ds.attributes[b].name);
                out.push(ConsistencyFinding {
                    kind: FindingKind::LabelSwapSuspicion,
                    attributes: vec![na.clone(), nb.clone()],
                    detail: format!(
                        "swapping `{na}` and `{nb}` fits {} of {both} records better and cuts violations from {} to {swapped_violations}",
                        better.len(),
                        base.mismatches.len()
                    ),
                    records: better,
                    formula: None,
                });
            }
        }
    }
    out
}

fn unit_mixtures(ds: &Dataset, m: &TemplateManifest, report: &mut ConsistencyReport) {
    let mut by_quantity: BTreeMap<&str, Vec<(&str, Option<&str>)>> = BTreeMap::new();
    for a in &m.attributes {
        if let Some(q) = a.quantity.as_deref() {
            by_quantity.entry(q).or_default().push((&a.name, a.unit.as_deref()));
        }
    }
    for (q, attrs) in by_quantity {
        let mut units: Vec<&str> = attrs.iter().filter_map(|a| a.1).collect();
        units.sort_unstable();
        units.dedup();
        if units.len() > 1 {
            report.findings.push(ConsistencyFinding {
                kind: FindingKind::UnitMixture,
                attributes: attrs.iter().map(|a| a.0.to_string()).collect(),
                records: Vec::new(),
                detail: format!("{q} is declared in {}", units.join(", ")),
                formula: None,
            });
        }
    }
    for a in &m.attributes {
        let Some(ua) = a.unit_attribute.as_deref() else { continue };
        let Some(idx) = ds.attribute_index(ua) else {
            report.warnings.push(format!("unit attribute `{ua}` for `{}` not in the dataset", a.name));
            continue;
        };
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for c in ds.column(idx) {
            let unit = match c {
                Cell::Text(s) => s.trim().to_string(),
                Cell::Number(v) => v.to_string(),
                _ => continue,
            };
            *counts.entry(unit).or_default() += 1;
        }
        if counts.len() > 1 {
            let major = counts.iter().max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0))).unwrap().0.clone();
            let records = ds
                .column(idx)
                .enumerate()
                .filter(|(_, c)| match c {
                    Cell::Text(s) => s.trim() != major,
                    Cell::Number(v) => v.to_string() != major,
                    _ => false,
                })
                .map(|(i, _)| i)
                .collect();
            let units: Vec<String> = counts.iter().map(|(u, n)| format!("{u} ({n})")).collect();
            report.findings.push(ConsistencyFinding {
                kind: FindingKind::UnitMixture,
                attributes: vec![a.name.clone(), ua.to_string()],
                records,
                detail: format!("`{}` is recorded in several units: {}", a.name, units.join(", ")),
                formula: None,
            });
        }
    }
}

fn date_mixtures(ds: &Dataset, report: &mut ConsistencyReport) {
    for (idx, spec) in ds.attributes.iter().enumerate() {
        if spec.kind != Kind::Date {
            continue;
        }
        let mut counts = vec![0usize; spec.date_formats.len().max(1)];
        let mut unparsed = 0;
        for c in ds.column(idx) {
            match c {
                Cell::Date { format, .. } => counts[*format as usize] += 1,
                Cell::Text(_) => unparsed += 1,
                _ => {}
            }
        }
        if unparsed > 0 {
            report.warnings.push(format!(
                "{unparsed} values of `{}` match no declared date format",
                spec.name
            ));
        }
        if counts.iter().filter(|&&n| n > 0).count() > 1 {
            let major = crate::classifier::argmax(&counts);
            let records = ds
                .column(idx)
                .enumerate()
                .filter(|(_, c)| matches!(c, Cell::Date { format, .. } if *format as usize != major))
                .map(|(i, _)| i)
                .collect();
            let used: Vec<String> = counts
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(f, n)| format!("{} ({n})", spec.date_formats[f]))
                .collect();
            report.findings.push(ConsistencyFinding {
                kind: FindingKind::DateFormatMixture,
                attributes: vec![spec.name.clone()],
                records,
                detail: format!("`{}` mixes date formats: {}", spec.name, used.join(", ")),
                formula: None,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_csv_str, AttributeSpec};
    use crate::manifest::parse_manifest_str;
    use proptest::prelude::*;

    fn abc(rows: &[(f64, f64, f64)]) -> Dataset {
        Dataset::new(
            "d",
            ["a", "b", "c"].iter().map(|n| AttributeSpec::new(*n, Kind::Numeric)).collect(),
            rows.iter().map(|&(a, b, c)| vec![Cell::Number(a), Cell::Number(b), Cell::Number(c)]).collect(),
            "",
        )
        .unwrap()
    }

    fn manifest(json: &str) -> TemplateManifest {
        parse_manifest_str(json).unwrap().manifest
    }

    const SUM: &str = r#"{"noise": {"formulas": [{"attribute": "c", "expression": "a + b"}]}}"#;

    #[test]
    fn forced_arithmetic() {
        let ok = check_consistency(&abc(&[(1.0, 2.0, 3.0)]), &manifest(SUM)).unwrap();
        assert!(ok.findings.is_empty());
        let bad = check_consistency(&abc(&[(1.0, 2.0, 4.0)]), &manifest(SUM)).unwrap();
        assert_eq!(bad.findings.len(), 1);
        let f = bad.findings[0].formula.as_ref().unwrap();
        assert_eq!((f.mismatches[0].stated, f.mismatches[0].computed), (4.0, Some(3.0)));
        assert_eq!(f.tolerance, Tolerance::Relative(1e-6));
    }

    #[test]
    fn absolute_tolerance_and_unevaluated() {
        let m = manifest(r#"{"noise": {"formulas": [{"attribute": "c", "expression": "a + b", "tolerance": 1.0}]}}"#);
        let mut ds = abc(&[(1.0, 2.0, 3.5), (1.0, 1.0, 9.0)]);
        ds.records.push(vec![Cell::Missing, Cell::Number(1.0), Cell::Number(1.0)]);
        let r = check_consistency(&ds, &m).unwrap();
        let c = &r.formula_checks[0];
        assert_eq!((c.evaluated, c.unevaluated, c.mismatches.len()), (2, 1, 1));
    }

    #[test]
    fn division_by_zero_is_undefined() {
        let m = manifest(r#"{"noise": {"formulas": [{"attribute": "c", "expression": "a / b"}]}}"#);
        let r = check_consistency(&abc(&[(1.0, 0.0, 1.0)]), &m).unwrap();
        let mm = &r.formula_checks[0].mismatches[0];
        assert_eq!((mm.computed, mm.detail.as_deref()), (None, Some("undefined")));
    }

    #[test]
    fn unknown_attribute_is_manifest_error() {
        let m = manifest(r#"{"noise": {"formulas": [{"attribute": "c", "expression": "a + zz"}]}}"#);
        assert!(matches!(check_consistency(&abc(&[(1.0, 2.0, 3.0)]), &m), Err(Error::Manifest { .. })));
    }

    #[test]
    fn swapped_labels_detected() {
        // adj = raw * (0.65 + 0.01 * f), then the adj and raw columns swapped.
        let rows: Vec<(f64, f64, f64)> = (0..30)
            .map(|i| {
                let raw = 100.0 + 7.0 * f64::from(i);
                // stays below 35, where the factor is exactly 1
                let f = f64::from(i + 5);
                let adj = raw * (0.65 + 0.01 * f);
                (adj, f, raw)
            })
            .collect();
        let ds = Dataset::new(
            "d",
            ["raw", "f", "adj"].iter().map(|n| AttributeSpec::new(*n, Kind::Numeric)).collect(),
            rows.iter().map(|&(a, b, c)| vec![Cell::Number(a), Cell::Number(b), Cell::Number(c)]).collect(),
            "",
        )
        .unwrap();
        let m = manifest(r#"{"noise": {"formulas": [{"attribute": "adj", "expression": "raw * (0.65 + 0.01 * f)"}]}}"#);
        let r = check_consistency(&ds, &m).unwrap();
        let swap: Vec<_> = r.findings.iter().filter(|f| f.kind == FindingKind::LabelSwapSuspicion).collect();
        assert_eq!(swap.len(), 1, "{:#?}", r.findings);
        assert_eq!(swap[0].attributes, vec!["adj", "raw"]);
    }

    #[test]
    fn unit_and_date_mixtures() {
        let m = manifest(
            r#"{"attributes": [
                {"name": "fp", "unit": "IFPUG", "quantity": "functional size"},
                {"name": "cfp", "unit": "COSMIC", "quantity": "functional size"},
                {"name": "size", "unit_attribute": "method"}
            ]}"#,
        );
        let mut spec = AttributeSpec::new("d", Kind::Date);
        spec.date_formats = vec!["%Y-%m-%d".into(), "%d/%m/%Y".into()];
        let ds = parse_csv_str(
            "fp,cfp,size,method,d\n1,2,3,IFPUG,1990-01-02\n1,2,3,IFPUG,03/04/1991\n1,2,3,COSMIC,1992-01-01\n1,2,3,IFPUG,junk\n",
            "t",
            Some(&[
                AttributeSpec::new("fp", Kind::Numeric),
                AttributeSpec::new("cfp", Kind::Numeric),
                AttributeSpec::new("size", Kind::Numeric),
                AttributeSpec::new("method", Kind::Categorical),
                spec,
            ]),
        )
        .unwrap();
        let r = check_consistency(&ds, &m).unwrap();
        let kinds: Vec<FindingKind> = r.findings.iter().map(|f| f.kind).collect();
        assert_eq!(kinds, vec![FindingKind::UnitMixture, FindingKind::UnitMixture, FindingKind::DateFormatMixture]);
        assert_eq!(r.findings[1].records, vec![2]);
        assert_eq!(r.findings[2].records, vec![1]);
        assert_eq!(r.warnings.len(), 1);
    }

    proptest! {
        #[test]
        fn generated_from_formula_is_consistent(rows in prop::collection::vec((-1e4f64..1e4, 0.5f64..100.0), 1..40)) {
            let data: Vec<(f64, f64, f64)> = rows.iter().map(|&(a, b)| (a, b, a * (0.65 + 0.01 * b) - a / b)).collect();
            let m = manifest(r#"{"noise": {"formulas": [{"attribute": "c", "expression": "a × (0.65 + 0.01 × b) − a ÷ b"}]}}"#);
            let r = check_consistency(&abc(&data), &m).unwrap();
            prop_assert!(r.findings.iter().all(|f| f.kind != FindingKind::FormulaViolation));
            prop_assert_eq!(r.formula_checks[0].evaluated, data.len());
        }
    }
}
