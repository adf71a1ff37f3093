//! Dense CSV and sparse LibSVM readers and writers.
//!
//! LibSVM lines look like `label idx:value idx:value ...` with 1-based,
//! strictly increasing indices. Labels become dense class ids in order of
//! first appearance, so the first label seen is class 0.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::binning::{discretize, discretize_sparse, is_discrete};
use super::config::Binning;
use super::CliError;
use crate::types::{RowDataset, SparseDataset, SparseRow, Value};

fn parse_number(cell: &str, line: usize, col: usize) -> Result<f64, CliError> {
    cell.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Data(format!("line {line}, column {col}: '{cell}' is not numeric")))
}

/// Class ids in order of first occurrence of each distinct label.
fn encode_labels(labels: &[f64]) -> Vec<Value> {
    let mut ids: HashMap<u64, Value> = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let key = if l == 0.0 { 0f64.to_bits() } else { l.to_bits() };
            let next = ids.len() as Value;
            *ids.entry(key).or_insert(next)
        })
        .collect()
}

fn columns_to_values(column: &[f64], binning: Binning, name: &str) -> Result<Vec<Value>, CliError> {
    match binning {
        Binning::EqualWidth(bins) => Ok(discretize(column, bins)),
        Binning::None if is_discrete(column) => Ok(column.iter().map(|&v| v as Value).collect()),
        Binning::None => Err(CliError::Data(format!(
            "{name} has non-integer or negative values; enable binning"
        ))),
    }
}

/// Reads a rectangular numeric CSV. A first row with any non-numeric cell
/// is treated as a header. Integer feature columns pass through; other
/// columns need binning. Non-negative integer labels are kept as is, any
/// other labels are encoded by first occurrence.
pub fn read_csv<R: Read>(reader: R, label_position: Option<usize>, binning: Binning) -> Result<RowDataset, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Data(format!("malformed CSV: {e}")))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec);
    }
    if records
        .first()
        .is_some_and(|r| r.iter().any(|c| c.parse::<f64>().is_err()))
    {
        records.remove(0);
    }
    let ncols = records
        .first()
        .map(csv::StringRecord::len)
        .ok_or_else(|| CliError::Data("CSV has no data rows".into()))?;
    let class_index = label_position.unwrap_or(ncols - 1);
    if class_index >= ncols {
        return Err(CliError::Config(format!(
            "label position {class_index} out of range for {ncols} columns"
        )));
    }

    let mut columns = vec![Vec::with_capacity(records.len()); ncols];
    for (r, rec) in records.iter().enumerate() {
        let line = rec.position().map_or(r + 1, |p| p.line() as usize);
        if rec.len() != ncols {
            return Err(CliError::Data(format!(
                "line {line}: {} cells, expected {ncols}",
                rec.len()
            )));
        }
        for (c, cell) in rec.iter().enumerate() {
            columns[c].push(parse_number(cell, line, c)?);
        }
    }

    let mut encoded = Vec::with_capacity(ncols);
    for (c, col) in columns.iter().enumerate() {
        if c == class_index {
            encoded.push(if is_discrete(col) {
                col.iter().map(|&v| v as Value).collect()
            } else {
                encode_labels(col)
            });
        } else {
            encoded.push(columns_to_values(col, binning, &format!("column {c}"))?);
        }
    }
    let m = records.len();
    let mut flat = Vec::with_capacity(m * ncols);
    for r in 0..m {
        flat.extend(encoded.iter().map(|c| c[r]));
    }
    RowDataset::from_flat(flat, ncols, class_index).map_err(CliError::from)
}

pub fn load_csv(path: &Path, label_position: Option<usize>, binning: Binning) -> Result<RowDataset, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_csv(BufReader::new(file), label_position, binning)
}

/// Reads LibSVM records. Explicit zeros are dropped and indices shifted to
/// 0-based; `n` is the largest index seen.
pub fn read_libsvm<R: BufRead>(reader: R, binning: Binning) -> Result<SparseDataset, CliError> {
    let mut labels = Vec::new();
    let mut raw_rows: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut n = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| CliError::Io(format!("line {lineno}: {e}")))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let label = tokens.next().unwrap_or_default();
        labels.push(
            label
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Data(format!("line {lineno}: bad label '{label}'")))?,
        );
        let mut entries = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| CliError::Data(format!("line {lineno}: token '{tok}' is not index:value")))?;
            let idx: usize = idx
                .parse()
                .ok()
                .filter(|&i| i >= 1 && i <= u32::MAX as usize)
                .ok_or_else(|| CliError::Data(format!("line {lineno}: bad index '{idx}'")))?;
            if idx <= last {
                return Err(CliError::Data(format!("line {lineno}: index {idx} is not increasing")));
            }
            last = idx;
            let val = parse_number(val, lineno, idx)?;
            n = n.max(idx);
            if val != 0.0 {
                entries.push(((idx - 1) as u32, val));
            }
        }
        raw_rows.push(entries);
    }
    if raw_rows.is_empty() {
        return Err(CliError::Data("LibSVM input has no records".into()));
    }
    let m = raw_rows.len();

    // Per-feature value lists, for validation or binning.
    let mut per_feature: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for (r, row) in raw_rows.iter().enumerate() {
        for (pos, &(f, v)) in row.iter().enumerate() {
            per_feature[f as usize].push((r, pos, v));
        }
    }
    let mut values: Vec<Vec<Value>> = raw_rows.iter().map(|r| vec![0; r.len()]).collect();
    for (f, cells) in per_feature.iter().enumerate() {
        let raw: Vec<f64> = cells.iter().map(|c| c.2).collect();
        let coded = match binning {
            Binning::EqualWidth(bins) => discretize_sparse(&raw, m - raw.len(), bins),
            Binning::None if is_discrete(&raw) => raw.iter().map(|&v| v as Value).collect(),
            Binning::None => {
                return Err(CliError::Data(format!(
                    "feature {} has non-integer or negative values; enable binning",
                    f + 1
                )))
            }
        };
        for (&(r, pos, _), v) in cells.iter().zip(coded) {
            values[r][pos] = v;
        }
    }

    let rows = raw_rows
        .iter()
        .zip(values)
        .enumerate()
        .map(|(index, (raw, coded))| SparseRow {
            index,
            entries: raw
                .iter()
                .zip(coded)
                .filter(|(_, v)| *v != 0)
                .map(|(&(f, _), v)| (f, v))
                .collect(),
        })
        .collect();
    Ok(SparseDataset {
        n,
        rows,
        class: encode_labels(&labels),
    })
}

pub fn load_libsvm(path: &Path, binning: Binning) -> Result<SparseDataset, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_libsvm(BufReader::new(file), binning)
}

/// Writes class ids as labels and 1-based indices.
pub fn write_libsvm<W: Write>(data: &SparseDataset, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    let mut by_instance: Vec<Option<&SparseRow>> = vec![None; data.m()];
    for row in &data.rows {
        by_instance[row.index] = Some(row);
    }
    for (i, class) in data.class.iter().enumerate() {
        write!(out, "{class}")?;
        if let Some(row) = by_instance[i] {
            for &(f, v) in &row.entries {
                write!(out, " {}:{v}", f + 1)?;
            }
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn write_csv<W: Write>(data: &RowDataset, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in data.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()
}
