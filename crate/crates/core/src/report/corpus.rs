use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::render::{csv_lines, markdown_table};
use super::{assemble_report, load_dataset, table_cells, AssessParams, QualityReport, TABLE_COLUMNS};
use crate::error::{Error, Result};
use crate::manifest::parse_manifest;
use crate::stats::spearman;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub data: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub entries: Vec<CorpusEntry>,
}

impl CorpusConfig {
    /// Read a config file. Relative entry paths resolve against its directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut de = serde_json::Deserializer::from_str(&text);
        let mut cfg: CorpusConfig = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| Error::Config(format!("{}: {} at `{}`", path.display(), e.inner(), e.path())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for e in &mut cfg.entries {
            e.data = base.join(&e.data);
            if let Some(m) = &mut e.manifest {
                *m = base.join(&*m);
            }
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub name: String,
    pub cells: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub columns: Vec<String>,
    pub rows: Vec<CorpusRow>,
    /// Rank correlation between record count and noise percentage, over the
    /// datasets where both were assessed.
    pub records_noise_spearman: Option<f64>,
    pub tool_version: String,
    pub parameters: AssessParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusResult {
    /// Per entry, in config order.
    pub reports: Vec<std::result::Result<QualityReport, String>>,
    pub names: Vec<String>,
    pub params: AssessParams,
}

impl CorpusResult {
    pub fn spearman_records_noise(&self) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .reports
            .iter()
            .filter_map(|r| r.as_ref().ok())
            .filter_map(|r| Some((r.records()? as f64, r.noise_percent()?)))
            .unzip();
        spearman(&x, &y)
    }

    pub fn matrix(&self) -> MatrixDocument {
        let rows = self
            .reports
            .iter()
            .zip(&self.names)
            .map(|(r, name)| match r {
                Ok(rep) => CorpusRow { name: name.clone(), cells: table_cells(rep, false), error: None },
                Err(e) => {
                    let mut cells = vec![name.clone()];
                    cells.resize(TABLE_COLUMNS.len(), "error".into());
                    CorpusRow { name: name.clone(), cells, error: Some(e.clone()) }
                }
            })
            .collect();
        MatrixDocument {
            columns: TABLE_COLUMNS.iter().map(|s| s.to_string()).collect(),
            rows,
            records_noise_spearman: self.spearman_records_noise(),
            tool_version: crate::TOOL_VERSION.to_string(),
            parameters: self.params.clone(),
        }
    }
}

fn run_entry(e: &CorpusEntry, params: &AssessParams) -> Result<QualityReport> {
    let manifest = e.manifest.as_deref().map(parse_manifest).transpose()?.map(|p| p.manifest);
    let target = e.target.as_deref().or_else(|| manifest.as_ref().and_then(|m| m.target()));
    let mut ds = load_dataset(&e.data, manifest.as_ref(), target)?;
    if let Some(n) = &e.name {
        ds.name = n.clone();
    }
    Ok(assemble_report(&ds, manifest.as_ref(), params))
}

/// Assess every entry. A failing entry is recorded, not fatal.
pub fn run_corpus(config: &CorpusConfig, params: &AssessParams) -> CorpusResult {
    let reports: Vec<_> = config
        .entries
        .par_iter()
        .map(|e| run_entry(e, params).map_err(|err| err.to_string()))
        .collect();
    let names = config
        .entries
        .iter()
        .zip(&reports)
        .map(|(e, r)| match (r, &e.name) {
            (Ok(rep), _) => rep.dataset.clone(),
            (Err(_), Some(n)) => n.clone(),
            (Err(_), None) => e.data.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        })
        .collect();
    CorpusResult { reports, names, params: params.clone() }
}

pub fn render_matrix_csv(doc: &MatrixDocument) -> String {
    csv_lines(&doc.rows.iter().map(|r| r.cells.clone()).collect::<Vec<_>>(), true)
}

pub fn render_matrix_json(doc: &MatrixDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("matrix serializes");
    s.push('\n');
    s
}

pub fn render_matrix_markdown(doc: &MatrixDocument) -> String {
    let mut out = markdown_table(&doc.rows.iter().map(|r| r.cells.clone()).collect::<Vec<_>>());
    match doc.records_noise_spearman {
        Some(r) => out.push_str(&format!("\nSpearman(records, noise) = {r:.3}\n")),
        None => out.push_str("\nSpearman(records, noise) = n/a\n"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_corpus(dir: &Path) -> PathBuf {
        for (name, n) in [("a", 40), ("b", 20)] {
            let mut text = String::from("size,effort\n");
            for i in 0..n {
                text.push_str(&format!("{},{}\n", i / 10 * 100 + i % 10, i * 3 % 17));
            }
            std::fs::write(dir.join(format!("{name}.csv")), text).unwrap();
        }
        let cfg = r#"{"entries": [
            {"data": "a.csv", "target": "effort"},
            {"data": "b.csv", "target": "effort", "name": "bee"},
            {"data": "missing.csv"}
        ]}"#;
        let p = dir.join("corpus.json");
        std::fs::write(&p, cfg).unwrap();
        p
    }

    #[test]
    fn order_errors_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = CorpusConfig::from_path(&write_corpus(dir.path())).unwrap();
        let params = AssessParams::default();
        let one = render_matrix_json(&run_corpus(&cfg, &params).matrix());
        let two = render_matrix_json(&run_corpus(&cfg, &params).matrix());
        assert_eq!(one, two);
        let doc: MatrixDocument = serde_json::from_str(&one).unwrap();
        let names: Vec<&str> = doc.rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["a", "bee", "missing"]);
        assert!(doc.rows[2].error.is_some());
        assert_eq!(doc.rows[2].cells.len(), TABLE_COLUMNS.len());
        let csv = render_matrix_csv(&doc);
        assert_eq!(csv.lines().count(), 4);
        assert!(render_matrix_markdown(&doc).contains("Spearman"));
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"entries": [], "extra": 1}"#).unwrap();
        assert!(matches!(CorpusConfig::from_path(&p), Err(Error::Config(_))));
    }
}
