//! CSV ingestion and export.
//!
//! Input files are comma-separated without quoting conventions beyond the
//! usual CSV rules. A first row containing a field that is neither numeric,
//! empty nor `NA` is taken as a header. Missing values are `NA` or empty.
//! Numbers are written with the shortest representation that parses back to
//! the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use stiefel_core::eigenmodel::{NodeCovariates, SymmetricBinaryNetwork};

use crate::error::{CliError, Result};

/// Rows of a CSV file with their 1-based line numbers, and the header if one
/// was detected.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub rows: Vec<(u64, Vec<String>)>,
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field == "NA"
}

fn looks_like_header(fields: &[String]) -> bool {
    fields.iter().any(|f| !is_missing(f) && f.parse::<f64>().is_err())
}

pub fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(file);
    let mut header = None;
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::parse(path, e.to_string()),
            _ => CliError::parse(path, format!("malformed CSV: {e}")),
        })?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_owned).collect();
        if k == 0 && looks_like_header(&fields) {
            header = Some(fields);
            continue;
        }
        rows.push((line, fields));
    }
    if let Some((line, row)) = rows.iter().find(|(_, r)| r.len() != rows[0].1.len()) {
        return Err(CliError::parse(
            path,
            format!("line {line}: expected {} fields, found {}", rows[0].1.len(), row.len()),
        ));
    }
    if let (Some(h), Some((line, first))) = (&header, rows.first()) {
        if h.len() != first.len() {
            return Err(CliError::parse(
                path,
                format!("line {line}: header has {} fields, rows have {}", h.len(), first.len()),
            ));
        }
    }
    Ok(Table { header, rows })
}

/// A fully numeric matrix; missing values are rejected.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let table = read_table(path)?;
    if table.rows.is_empty() {
        return Err(CliError::parse(path, "no data rows"));
    }
    let (m, n) = (table.rows.len(), table.rows[0].1.len());
    let mut out = DMatrix::zeros(m, n);
    for (i, (line, row)) in table.rows.iter().enumerate() {
        for (j, field) in row.iter().enumerate() {
            out[(i, j)] = field.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                CliError::parse(
                    path,
                    format!("line {line}, column {}: expected a finite number, found {field:?}", j + 1),
                )
            })?;
        }
    }
    Ok(out)
}

fn parse_binary(path: &Path, line: u64, col: usize, field: &str) -> Result<Option<bool>> {
    if is_missing(field) {
        return Ok(None);
    }
    match field.parse::<f64>() {
        Ok(0.0) => Ok(Some(false)),
        Ok(1.0) => Ok(Some(true)),
        _ => Err(CliError::parse(path, format!("line {line}, column {col}: expected 0, 1 or NA, found {field:?}"))),
    }
}

/// Square 0/1/NA adjacency matrix. Diagonal cells are ignored.
pub fn parse_adjacency(path: &Path) -> Result<SymmetricBinaryNetwork> {
    let table = read_table(path)?;
    let n = table.rows.len();
    if n == 0 {
        return Err(CliError::parse(path, "no data rows"));
    }
    if table.rows[0].1.len() != n {
        return Err(CliError::parse(path, format!("adjacency has {n} rows but {} columns", table.rows[0].1.len())));
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, (line, row)) in table.rows.iter().enumerate() {
        for (j, field) in row.iter().enumerate() {
            entries.push(if i == j { None } else { parse_binary(path, *line, j + 1, field)? });
        }
    }
    SymmetricBinaryNetwork::new(n, entries).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Binary node covariates, one row per node. Columns are named by the header
/// or `x1, x2, …`.
pub fn parse_covariates(path: &Path) -> Result<NodeCovariates> {
    let table = read_table(path)?;
    let p = table.header.as_ref().map_or_else(|| table.rows.first().map_or(0, |r| r.1.len()), Vec::len);
    let names = table.header.clone().unwrap_or_else(|| (1..=p).map(|k| format!("x{k}")).collect());
    let mut rows = Vec::with_capacity(table.rows.len());
    for (line, row) in &table.rows {
        let parsed =
            row.iter().enumerate().map(|(j, f)| parse_binary(path, *line, j + 1, f)).collect::<Result<Vec<_>>>()?;
        rows.push(parsed);
    }
    Ok(NodeCovariates::new(names, rows)?)
}

pub fn format_binary(x: Option<bool>) -> &'static str {
    match x {
        Some(true) => "1",
        Some(false) => "0",
        None => "NA",
    }
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::WriterBuilder::new().from_writer(BufWriter::new(file)))
}

fn finish(path: &Path, w: csv::Writer<BufWriter<File>>) -> Result<()> {
    let mut inner = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    inner.flush().map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

/// Writes string rows with an optional header.
pub fn write_rows<I>(path: &Path, header: Option<&[String]>, rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = create(path)?;
    if let Some(h) = header {
        w.write_record(h).map_err(|e| csv_err(path, e))?;
    }
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

/// Writes a matrix without a header.
pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let rows = m.row_iter().map(|r| r.iter().map(|x| x.to_string()).collect());
    write_rows(path, None, rows)
}
