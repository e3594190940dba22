use serde::{Deserialize, Serialize};

use super::{Dimension, QualityReport};
use crate::relevance::HeterogeneityStatus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Markdown,
    CsvRow,
}

/// Matrix columns, one row per dataset.
pub const TABLE_COLUMNS: [&str; 13] = [
    "Dataset",
    "Noise",
    "Outliers",
    "Inconsistency",
    "Incompleteness",
    "Redundancy",
    "Amount of data",
    "Heterogeneity",
    "Timeliness Dates",
    "Timeliness Year",
    "Commercial Sensitivity",
    "Accessibility",
    "Provenance/Trustworthiness",
];

const NOT_ASSESSED: &str = "not assessed";

fn yes_no(b: bool) -> String {
    if b { "Yes" } else { "No" }.to_string()
}

fn cell<T>(d: &Dimension<T>, f: impl FnOnce(&T) -> String) -> String {
    match d {
        Dimension::Assessed { value } => f(value),
        Dimension::NoEvidence { .. } => "No evidence".into(),
        Dimension::NotAssessed { .. } => NOT_ASSESSED.into(),
    }
}

/// Matrix cells for one report. `percent_sign` controls the noise suffix.
pub fn table_cells(r: &QualityReport, percent_sign: bool) -> Vec<String> {
    let pct = if percent_sign { "%" } else { "" };
    vec![
        r.dataset.clone(),
        cell(&r.noise, |n| format!("{:.1}{pct}", n.result.noisy_percent)),
        cell(&r.outliers, |o| match &o.highlighted {
            Some(_) => yes_no(o.highlighted_percent.unwrap_or(0.0) > 0.0
                || o.report.summaries.iter().any(|s| Some(&s.attribute) == o.highlighted.as_ref() && !s.outlier_indices.is_empty())),
            None => yes_no(o.report.summaries.iter().any(|s| !s.outlier_indices.is_empty())),
        }),
        cell(&r.inconsistency, |c| yes_no(!c.findings.is_empty())),
        cell(&r.incompleteness, |i| yes_no(i.any_missing)),
        cell(&r.redundancy, |g| yes_no(!g.is_empty())),
        cell(&r.amount, |a| a.records.to_string()),
        cell(&r.heterogeneity, |h| match h.status {
            HeterogeneityStatus::Multi => "Yes".into(),
            HeterogeneityStatus::Single => "No".into(),
            HeterogeneityStatus::NoEvidence => "No evidence".into(),
        }),
        cell(&r.timeliness, |t| yes_no(t.has_dates)),
        cell(&r.timeliness, |t| t.era.clone()),
        cell(&r.commercial_sensitivity, |_| "Yes".into()),
        cell(&r.accessibility, |a| yes_no(a.public)),
        cell(&r.trustworthiness, |t| yes_no(t.status)),
    ]
}

pub(crate) fn markdown_table(rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", TABLE_COLUMNS.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(TABLE_COLUMNS.len())));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

pub(crate) fn csv_lines(rows: &[Vec<String>], header: bool) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    if header {
        w.write_record(TABLE_COLUMNS).expect("write to memory");
    }
    for row in rows {
        w.write_record(row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
}

pub fn render(r: &QualityReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Markdown => markdown_table(&[table_cells(r, true)]),
        Format::CsvRow => csv_lines(&[table_cells(r, false)], false),
    }
}
