use serde::{Deserialize, Serialize};

use crate::classifier::{misclassification_rate, NoiseParams, NoiseResult};
use crate::dataset::{Dataset, Predicate, Role};
use crate::error::{Error, Result};
use crate::manifest::{PreStep, TemplateManifest};

/// A dataset after pre-steps, with each row's index in the original.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub dataset: Dataset,
    pub origin: Vec<usize>,
    pub log: Vec<String>,
}

impl Prepared {
    fn keep(&mut self, rows: Vec<usize>) {
        self.dataset = self.dataset.select_records(&rows);
        self.origin = rows.iter().map(|&r| self.origin[r]).collect();
    }
}

fn note(reason: &Option<String>) -> String {
    reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default()
}

/// Apply manifest pre-steps in order.
pub fn apply_pre_steps(ds: &Dataset, steps: &[PreStep]) -> Result<Prepared> {
    let mut p = Prepared { dataset: ds.clone(), origin: (0..ds.len()).collect(), log: Vec::new() };
    for step in steps {
        let before = p.dataset.len();
        match step {
            PreStep::DropRecords { records, reason } => {
                if let Some(bad) = records.iter().find(|&&r| r >= ds.len()) {
                    return Err(Error::Config(format!("drop_records: record {bad} out of range")));
                }
                let rows = (0..before).filter(|&i| !records.contains(&p.origin[i])).collect();
                p.keep(rows);
                p.log.push(format!("dropped {} listed records{}", before - p.dataset.len(), note(reason)));
            }
            PreStep::Filter { rule, reason } => {
                let pred = Predicate::parse(rule)?;
                for a in pred.attributes() {
                    p.dataset.require_attribute(&a)?;
                }
                let rows = (0..before).filter(|&i| pred.matches(&p.dataset, &p.dataset.records[i])).collect();
                p.keep(rows);
                p.log.push(format!("kept {} of {before} records where {rule}{}", p.dataset.len(), note(reason)));
            }
            PreStep::DropIncomplete { attributes, reason } => {
                let cols: Vec<usize> = if attributes.is_empty() {
                    (0..p.dataset.attribute_count()).collect()
                } else {
                    attributes.iter().map(|a| p.dataset.require_attribute(a)).collect::<Result<_>>()?
                };
                let rows = (0..before)
                    .filter(|&i| cols.iter().all(|&c| !p.dataset.records[i][c].is_missing()))
                    .collect();
                p.keep(rows);
                p.log.push(format!("dropped {} incomplete records{}", before - p.dataset.len(), note(reason)));
            }
            PreStep::DropAttributes { attributes, reason } => {
                p.dataset = p.dataset.drop_attributes(attributes)?;
                p.log.push(format!("dropped attributes {}{}", attributes.join(", "), note(reason)));
            }
            PreStep::DropTop { attribute, count, reason } => {
                let c = p.dataset.require_attribute(attribute)?;
                let mut ranked: Vec<(usize, f64)> = (0..before)
                    .filter_map(|i| p.dataset.records[i][c].as_number().map(|v| (i, v)))
                    .collect();
                ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                let drop: Vec<usize> = ranked.iter().take(*count).map(|r| r.0).collect();
                let rows = (0..before).filter(|i| !drop.contains(i)).collect();
                p.keep(rows);
                p.log.push(format!("dropped the {count} largest `{attribute}` records{}", note(reason)));
            }
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseAssessment {
    /// Flagged records are indices into the dataset before pre-steps.
    pub result: NoiseResult,
    pub records_used: usize,
    pub pre_steps: Vec<String>,
    pub dropped_attributes: Vec<String>,
}

/// Pre-steps, then removal of identifier, derived and excluded attributes,
/// then cross-validated misclassification.
pub fn assess_noise(ds: &Dataset, m: &TemplateManifest, params: &NoiseParams) -> Result<NoiseAssessment> {
    let prepared = apply_pre_steps(ds, m.pre_steps())?;
    let drop: Vec<String> = prepared
        .dataset
        .attributes
        .iter()
        .filter(|a| matches!(a.role, Role::Identifier | Role::Derived | Role::Excluded))
        .map(|a| a.name.clone())
        .collect();
    let training = prepared.dataset.drop_attributes(&drop)?;
    let mut result = misclassification_rate(&training, params)?;
    result.flagged_records = result.flagged_records.iter().map(|&r| prepared.origin[r]).collect();
    Ok(NoiseAssessment {
        result,
        records_used: training.len(),
        pre_steps: prepared.log,
        dropped_attributes: drop,
    })
}
