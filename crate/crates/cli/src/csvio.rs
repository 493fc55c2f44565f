//! CSV reading and writing. Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use spde_inverse::DataSeries;

use crate::error::{CliError, Result};

/// Formats a float so that parsing it back yields the same bits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// One CSV cell.
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::U(n) => n.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<Cell>>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(Cell::render))
            .map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// Header and numeric columns of a CSV file.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::csv(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| CliError::Format {
                    path: path.into(),
                    message: format!("row {}: '{cell}' is not a number", i + 2),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(CliError::Format {
                path: path.into(),
                message: format!(
                    "row {}: expected {} columns, got {}",
                    i + 2,
                    header.len(),
                    row.len()
                ),
            });
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Two-column `(x, value)` pairs from a CSV with a header row.
pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
    let table = read_table(path)?;
    if table.header.len() != 2 {
        return Err(CliError::Format {
            path: path.into(),
            message: format!("expected 2 columns, got {}", table.header.len()),
        });
    }
    Ok(table.rows.iter().map(|r| (r[0], r[1])).collect())
}

/// A uniformly sampled `t,value` series.
pub fn read_series(path: &Path) -> Result<DataSeries> {
    let pairs = read_pairs(path)?;
    DataSeries::from_points(&pairs).map_err(|e| CliError::Format {
        path: path.into(),
        message: e.to_string(),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
