use chrono::{Datelike, NaiveDate, NaiveDateTime};

use super::Cell;

/// Parse `token` with a strftime-style format. Formats that omit the day or
/// the month (`%Y`, `%m/%Y`) resolve to the first day of the period.
pub fn parse_date(token: &str, format: &str) -> Option<NaiveDate> {
    let token = token.trim();
    if let Ok(d) = NaiveDate::parse_from_str(token, format) {
        return Some(d);
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(token, format) {
        return Some(dt.date());
    }
    let with_day = format!("{token} 01");
    let fmt_day = format!("{format} %d");
    if let Ok(d) = NaiveDate::parse_from_str(&with_day, &fmt_day) {
        return Some(d);
    }
    let with_month_day = format!("{token} 01 01");
    let fmt_month_day = format!("{format} %m %d");
    NaiveDate::parse_from_str(&with_month_day, &fmt_month_day).ok()
}

pub fn format_date(date: NaiveDate, format: &str) -> String {
    date.format(format).to_string()
}

/// Calendar year carried by a cell. Numbers are read as years; two-digit
/// values are taken as 19xx, as in the older effort datasets.
pub fn year_of(cell: &Cell) -> Option<i32> {
    match cell {
        Cell::Date { date, .. } => Some(date.year()),
        Cell::Number(v) if v.fract() == 0.0 => {
            let y = *v as i64;
            match y {
                0..=99 => Some(1900 + y as i32),
                1000..=9999 => Some(y as i32),
                _ => None,
            }
        }
        Cell::Text(s) => {
            let digits: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
            if digits.len() == 4 {
                digits.parse().ok()
            } else {
                None
            }
        }
        _ => None,
    }
}
