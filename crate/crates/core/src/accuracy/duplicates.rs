use std::collections::HashMap;

use chrono::NaiveDate;

use crate::dataset::{Cell, Dataset, Role};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key<'a> {
    Missing,
    Number(u64),
    Text(&'a str),
    Date(NaiveDate),
}

fn key(c: &Cell) -> Key<'_> {
    match c {
        Cell::Missing => Key::Missing,
        // -0.0 and 0.0 are the same number
        Cell::Number(v) => Key::Number(if *v == 0.0 { 0 } else { v.to_bits() }),
        Cell::Text(s) => Key::Text(s.trim()),
        Cell::Date { date, .. } => Key::Date(*date),
    }
}

/// Groups of records identical over every non-identifier attribute. Groups
/// are ordered by their first member; members are ascending.
pub fn detect_duplicates(ds: &Dataset) -> Vec<Vec<usize>> {
    let cols: Vec<usize> = (0..ds.attribute_count())
        .filter(|&i| ds.attributes[i].role != Role::Identifier)
        .collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<Vec<Key<'_>>, usize> = HashMap::new();
    for (i, rec) in ds.records.iter().enumerate() {
        let k: Vec<Key<'_>> = cols.iter().map(|&c| key(&rec[c])).collect();
        match seen.get(&k) {
            Some(&g) => groups[g].push(i),
            None => {
                seen.insert(k, groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups.retain(|g| g.len() > 1);
    groups
}
