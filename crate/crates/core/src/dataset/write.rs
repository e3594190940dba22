use super::{format_date, Cell, Dataset};

/// Canonical serialized form: CSV with a header row and `?` for missing cells.
pub fn to_canonical_csv(ds: &Dataset) -> String {
    let mut w = ::csv::WriterBuilder::new()
        .quote_style(::csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    w.write_record(ds.attributes.iter().map(|a| a.name.as_str()))
        .expect("in-memory write");
    for rec in &ds.records {
        let fields: Vec<String> = rec
            .iter()
            .zip(&ds.attributes)
            .map(|(cell, spec)| match cell {
                Cell::Missing => "?".to_string(),
                Cell::Number(v) => v.to_string(),
                Cell::Text(s) => s.clone(),
                Cell::Date { date, format } => {
                    format_date(*date, &spec.date_formats[*format as usize])
                }
            })
            .collect();
        w.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}
