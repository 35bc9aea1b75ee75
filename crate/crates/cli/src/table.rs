//! Comma-separated tables with a header row.

use std::path::Path;

use crate::error::{CliError, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }
}

/// A one-dimensional signal from a CSV file: the `value` column when there
/// is one, otherwise the last column. The first line is the header.
pub fn parse_signal(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::Data("empty CSV file".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = header
        .iter()
        .position(|h| *h == "value")
        .unwrap_or(header.len() - 1);
    let values = lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != header.len() {
                return Err(CliError::Data(format!(
                    "line {}: {} fields, header has {}",
                    i + 2,
                    fields.len(),
                    header.len()
                )));
            }
            fields[col]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    CliError::Data(format!(
                        "line {}: `{}` is not a finite number",
                        i + 2,
                        fields[col]
                    ))
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(CliError::Data("CSV file has no data rows".into()));
    }
    Ok(values)
}

pub fn read_signal(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_signal(&text).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// `index,<name>…` with one column per band.
pub fn signal_table(names: &[String], flat: &[f64]) -> Table {
    let n = flat.len() / names.len().max(1);
    let mut t = Table::new(std::iter::once("index".to_string()).chain(names.iter().cloned()));
    for i in 0..n {
        let mut row = vec![i.to_string()];
        row.extend((0..names.len()).map(|b| num(flat[b * n + i])));
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [
            0.1,
            -1.0 / 3.0,
            1e-300,
            123456789.123456789,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn signal_columns() {
        assert_eq!(parse_signal("x\n1\n2.5\n").unwrap(), [1.0, 2.5]);
        assert_eq!(parse_signal("value,t\n1,9\n2,8\n").unwrap(), [1.0, 2.0]);
        assert_eq!(parse_signal("t,y\n0,3\n1,4\n").unwrap(), [3.0, 4.0]);
        assert!(parse_signal("x\n1\nfoo\n").is_err());
        assert!(parse_signal("x,y\n1\n").is_err());
        assert!(parse_signal("x\n").is_err());
    }
}
