//! Reading observed series for `estimate`.

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    /// Time of `values[0]`.
    pub first_time: i64,
    pub values: Vec<f64>,
}

fn bad(msg: String) -> CliError {
    CliError::Usage(format!("input CSV: {msg}"))
}

/// Accepts the path CSV written by `simulate` (uses `x`, and `t` for the
/// start time) or a single numeric column with or without a header.
pub fn parse_series(text: &str) -> CliResult<Series> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push(rec);
    }
    let Some(first) = rows.first() else {
        return Err(bad("no rows".into()));
    };
    let header = first.get(0).map_or(true, |f| f.parse::<f64>().is_err());
    let (column, time_column) = if header {
        let names: Vec<String> = first.iter().map(str::to_ascii_lowercase).collect();
        match names.iter().position(|n| n == "x") {
            Some(x) => (x, names.iter().position(|n| n == "t")),
            None if names.len() == 1 => (0, None),
            None => return Err(bad(format!("no `x` column among {}", names.join(",")))),
        }
    } else {
        if first.len() != 1 {
            return Err(bad(format!(
                "headerless input must have one column, found {}",
                first.len()
            )));
        }
        (0, None)
    };
    let body = &rows[usize::from(header)..];
    let mut values = Vec::with_capacity(body.len());
    for (k, rec) in body.iter().enumerate() {
        let line = k + 1 + usize::from(header);
        let field = rec.get(column).ok_or_else(|| bad(format!("line {line}: missing value")))?;
        let v: f64 = field
            .parse()
            .map_err(|_| bad(format!("line {line}: '{field}' is not a number")))?;
        if !v.is_finite() {
            return Err(bad(format!("line {line}: non-finite value")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(bad("no data rows".into()));
    }
    let first_time = match time_column {
        Some(tc) => {
            let field = body[0].get(tc).unwrap_or("");
            field
                .parse()
                .map_err(|_| bad(format!("time '{field}' is not an integer")))?
        }
        None => 1,
    };
    Ok(Series { first_time, values })
}
