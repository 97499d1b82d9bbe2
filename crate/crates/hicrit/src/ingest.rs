//! CSV ingestion with line-numbered validation errors.
//!
//! Four layouts are understood:
//!
//! * **pvalues** – one value per line (an optional non-numeric header line
//!   is skipped), or a named column of a CSV file;
//! * **labeled** – header row, class label in the first column, features after;
//! * **plain** – header row, numeric `n × p` matrix;
//! * **pairs** – header row, two numeric columns `x, y`.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use hicrit_core::hct::LabeledMatrix;
use nalgebra::DMatrix;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    PValues,
    Labeled,
    Plain,
    Pairs,
}

/// Shape information and warnings gathered during ingestion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub n: usize,
    pub p: usize,
    /// `(+1, −1)` counts for labelled data.
    pub class_counts: Option<(usize, usize)>,
    pub warnings: Vec<String>,
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn parse_cell(path: &Path, line: u64, column: &str, cell: &str) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| {
        Error::validation(display(path), format!("line {line}, column {column}: '{cell}' is not a number"))
    })?;
    if !v.is_finite() {
        return Err(Error::validation(
            display(path),
            format!("line {line}, column {column}: non-finite value '{cell}'"),
        ));
    }
    Ok(v)
}

fn check_pvalue(path: &Path, line: u64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::validation(display(path), format!("line {line}: P-value {v} outside [0, 1]")));
    }
    Ok(v)
}

struct Table {
    header: Vec<String>,
    /// `(line, cells)`
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(open(path)?);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::validation(display(path), format!("cannot read header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::validation(display(path), "file is empty"));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::validation(display(path), format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, record.iter().map(str::to_string).collect()));
    }
    if rows.is_empty() {
        return Err(Error::validation(display(path), "no data rows"));
    }
    Ok(Table { header, rows })
}

/// Reads P-values, unsorted, in file order.
///
/// With `column = None` the file holds one value per line; otherwise it is
/// a CSV file and the named column is used.
pub fn read_pvalues(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let values = match column {
        Some(name) => {
            let table = read_table(path)?;
            let idx = table
                .header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::validation(display(path), format!("no column named '{name}'")))?;
            table
                .rows
                .iter()
                .map(|(line, cells)| {
                    let v = parse_cell(path, *line, name, &cells[idx])?;
                    check_pvalue(path, *line, v)
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => {
            let mut out = Vec::new();
            for (k, line) in BufReader::new(open(path)?).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                let text = line.trim();
                let number = k as u64 + 1;
                if text.is_empty() {
                    continue;
                }
                // a leading label such as "pvalue" is a header
                if number == 1 && text.parse::<f64>().is_err() && text.chars().any(|c| c.is_alphabetic()) {
                    continue;
                }
                let v = parse_cell(path, number, "1", text)?;
                out.push(check_pvalue(path, number, v)?);
            }
            out
        }
    };
    if values.is_empty() {
        return Err(Error::validation(display(path), "file is empty"));
    }
    Ok(values)
}

fn parse_label(path: &Path, line: u64, cell: &str) -> Result<i8> {
    match cell.trim() {
        "1" | "+1" | "1.0" => Ok(1),
        "-1" | "-1.0" => Ok(-1),
        "2" | "2.0" => Ok(2),
        other => Err(Error::validation(
            display(path),
            format!("line {line}, column 1: label '{other}' is not one of +1/-1 (or 1/2)"),
        )),
    }
}

/// Reads a labelled matrix. Labels `{1, 2}` are remapped to `{+1, −1}`
/// with a warning; any other alphabet is rejected.
pub fn read_labeled(path: &Path) -> Result<(LabeledMatrix, IngestReport)> {
    let table = read_table(path)?;
    if table.header.len() < 2 {
        return Err(Error::validation(display(path), "need a label column and at least one feature"));
    }
    let p = table.header.len() - 1;
    let n = table.rows.len();
    let mut labels = Vec::with_capacity(n);
    let mut data = Vec::with_capacity(n * p);
    for (line, cells) in &table.rows {
        labels.push(parse_label(path, *line, &cells[0])?);
        for (j, cell) in cells[1..].iter().enumerate() {
            data.push(parse_cell(path, *line, &table.header[j + 1], cell)?);
        }
    }
    let mut warnings = Vec::new();
    let has_two = labels.contains(&2);
    if has_two {
        if labels.contains(&-1) {
            return Err(Error::validation(display(path), "labels mix the {+1,-1} and {1,2} alphabets"));
        }
        for l in labels.iter_mut() {
            *l = if *l == 2 { -1 } else { 1 };
        }
        warnings.push("labels {1,2} remapped to {+1,-1} (1 -> +1, 2 -> -1)".to_string());
    }
    let matrix = DMatrix::from_row_slice(n, p, &data);
    let names = table.header[1..].to_vec();
    let labeled = LabeledMatrix::new(matrix, labels, names)?;
    let report = IngestReport { n, p, class_counts: Some(labeled.class_counts()), warnings };
    Ok((labeled, report))
}

/// Reads a numeric matrix with a header row.
pub fn read_plain(path: &Path) -> Result<(DMatrix<f64>, Vec<String>, IngestReport)> {
    let table = read_table(path)?;
    let p = table.header.len();
    let n = table.rows.len();
    let mut data = Vec::with_capacity(n * p);
    for (line, cells) in &table.rows {
        for (j, cell) in cells.iter().enumerate() {
            data.push(parse_cell(path, *line, &table.header[j], cell)?);
        }
    }
    let report = IngestReport { n, p, ..Default::default() };
    Ok((DMatrix::from_row_slice(n, p, &data), table.header, report))
}

/// Reads two numeric columns.
pub fn read_pairs(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let table = read_table(path)?;
    if table.header.len() != 2 {
        return Err(Error::validation(display(path), format!("expected 2 columns, found {}", table.header.len())));
    }
    let mut x = Vec::with_capacity(table.rows.len());
    let mut y = Vec::with_capacity(table.rows.len());
    for (line, cells) in &table.rows {
        x.push(parse_cell(path, *line, &table.header[0], &cells[0])?);
        y.push(parse_cell(path, *line, &table.header[1], &cells[1])?);
    }
    Ok((x, y))
}

/// A validated input of any supported layout.
#[derive(Debug, Clone, PartialEq)]
pub enum Ingested {
    PValues(Vec<f64>),
    Labeled(LabeledMatrix),
    Plain { data: DMatrix<f64>, names: Vec<String> },
    Pairs { x: Vec<f64>, y: Vec<f64> },
}

/// Reads `path` according to `schema` and reports its shape.
pub fn ingest(path: &Path, schema: Schema) -> Result<(Ingested, IngestReport)> {
    Ok(match schema {
        Schema::PValues => {
            let v = read_pvalues(path, None)?;
            let report = IngestReport { n: v.len(), p: 1, ..Default::default() };
            (Ingested::PValues(v), report)
        }
        Schema::Labeled => {
            let (m, report) = read_labeled(path)?;
            (Ingested::Labeled(m), report)
        }
        Schema::Plain => {
            let (data, names, report) = read_plain(path)?;
            (Ingested::Plain { data, names }, report)
        }
        Schema::Pairs => {
            let (x, y) = read_pairs(path)?;
            let report = IngestReport { n: x.len(), p: 2, ..Default::default() };
            (Ingested::Pairs { x, y }, report)
        }
    })
}
