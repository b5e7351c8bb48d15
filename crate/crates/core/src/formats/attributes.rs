//! Attribute tables: comma separated, header row, `.` as decimal point.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub ids: Vec<String>,
    pub raw_values: Vec<T>,
}

impl<T> Dataset<T> {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "null" | "NULL")
}

/// Reads `id_column` and `value_column` from a CSV file, in file order.
///
/// Row numbers in errors count the header as row 1.
pub fn read_attribute_csv<T: Scalar>(
    path: impl AsRef<Path>,
    id_column: &str,
    value_column: &str,
) -> Result<Dataset<T>> {
    parse_attribute_csv(std::fs::File::open(path)?, id_column, value_column)
}

pub fn parse_attribute_csv<T: Scalar, R: Read>(input: R, id_column: &str, value_column: &str) -> Result<Dataset<T>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let column =
        |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn(name.to_string()));
    let (id_idx, value_idx) = (column(id_column)?, column(value_column)?);

    let mut ids = Vec::new();
    let mut raw_values = Vec::new();
    let mut seen = HashSet::new();
    let mut missing = 0usize;
    let mut first_missing = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let id = record.get(id_idx).unwrap_or("");
        let cell = record.get(value_idx).unwrap_or("");
        if is_missing(cell) || id.is_empty() {
            if missing == 0 {
                first_missing = row;
            }
            missing += 1;
            continue;
        }
        let value: f64 = cell.parse().map_err(|_| Error::NonNumericValue {
            row,
            column: value_column.to_string(),
            value: cell.to_string(),
        })?;
        if !value.is_finite() {
            return Err(Error::NonNumericValue { row, column: value_column.to_string(), value: cell.to_string() });
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        ids.push(id.to_string());
        raw_values.push(T::of(value));
    }
    if missing > 0 {
        return Err(Error::MissingValues { count: missing, first_row: first_missing });
    }
    if ids.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset { ids, raw_values })
}
