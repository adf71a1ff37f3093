use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::config::{BenchConfig, Format, RunConfig};
use super::{io as formats, synth, CliError};
use crate::columnar::{columnar_transform, sparse_columnar_transform, ColumnStore};
use crate::engine::Engine;
use crate::selector::{select, SelectConfig, SelectionReport};
use crate::types::SparseDataset;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordTimings {
    pub transform_ms: f64,
    pub relevance_ms: f64,
    /// The redundancy pass that preceded this pick; zero for rank 1.
    pub redundancy_ms: f64,
}

/// One JSON line of `select` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectRecord {
    pub rank: usize,
    pub feature: u32,
    pub score: f64,
    pub unit: &'static str,
    pub criterion: &'static str,
    pub ns: usize,
    pub npart: usize,
    pub timings: RecordTimings,
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn build_store(config: &RunConfig, engine: &Engine) -> Result<ColumnStore, CliError> {
    let npart = config.npart_or_default();
    let row_parts = 2 * config.workers;
    match config.format {
        Format::Csv => {
            let data = formats::load_csv(&config.input, config.label_position, config.binning)?;
            Ok(columnar_transform(engine, &data, row_parts, npart)?)
        }
        Format::Libsvm => {
            if config.label_position.is_some() {
                return Err(CliError::Config("label-position only applies to CSV input".into()));
            }
            let data = formats::load_libsvm(&config.input, config.binning)?;
            Ok(sparse_columnar_transform(engine, &data, row_parts, npart)?)
        }
    }
}

/// Loads, transforms and selects; writes one JSON record per selected
/// feature to the configured output.
pub fn run_select(config: &RunConfig) -> Result<Vec<SelectRecord>, CliError> {
    config.validate()?;
    let engine = Engine::new(config.workers)?;
    let start = Instant::now();
    let store = build_store(config, &engine)?;
    let transform_ms = start.elapsed().as_secs_f64() * 1e3;

    let select_config = SelectConfig {
        kind: config.criterion,
        ns: config.ns,
        beta: config.beta,
        base: config.unit,
    };
    let SelectionReport { result, timings } = select(&engine, &store, &select_config)?;
    let records: Vec<SelectRecord> = result
        .selected
        .iter()
        .enumerate()
        .map(|(i, s)| SelectRecord {
            rank: i + 1,
            feature: s.feature,
            score: s.score,
            unit: config.unit.unit(),
            criterion: config.criterion.name(),
            ns: config.ns,
            npart: store.npart(),
            timings: RecordTimings {
                transform_ms,
                relevance_ms: timings.relevance_ms,
                redundancy_ms: if i == 0 { 0.0 } else { timings.redundancy_ms[i - 1] },
            },
        })
        .collect();

    let mut out = open_output(config.output.as_deref())?;
    let path = config.output.as_deref().unwrap_or(Path::new("<stdout>"));
    for r in &records {
        let line = serde_json::to_string(r).map_err(|e| CliError::Data(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    out.flush().map_err(|e| CliError::io(path, e))?;
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub m: usize,
    pub n: usize,
    pub ns: usize,
    pub npart: usize,
    pub workers: usize,
    pub phase: &'static str,
    pub milliseconds: f64,
}

pub const BENCH_PHASES: [&str; 4] = ["transform", "relevance", "redundancy", "total"];

fn bench_cell(
    config: &BenchConfig,
    data: &crate::types::RowDataset,
    sparse: Option<&SparseDataset>,
    workers: usize,
    ns: usize,
) -> Result<(usize, [f64; 4]), CliError> {
    let engine = Engine::new(workers)?;
    let npart = config.npart.unwrap_or(2 * workers);
    let start = Instant::now();
    let store = match sparse {
        Some(s) => sparse_columnar_transform(&engine, s, 2 * workers, npart)?,
        None => columnar_transform(&engine, data, 2 * workers, npart)?,
    };
    let transform = start.elapsed().as_secs_f64() * 1e3;
    let report = select(&engine, &store, &SelectConfig::new(config.criterion, ns))?;
    let total = start.elapsed().as_secs_f64() * 1e3;
    Ok((
        store.npart(),
        [
            transform,
            report.timings.relevance_ms,
            report.timings.redundancy_total_ms(),
            total,
        ],
    ))
}

/// Sweeps `m × workers × ns` over synthetic data. A failing cell is logged
/// and reported as a `failed` row; the sweep continues.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, CliError> {
    config.validate()?;
    let mut out = open_output(config.output.as_deref())?;
    let path = config.output.as_deref().unwrap_or(Path::new("<stdout>"));
    let werr = |e: io::Error| CliError::io(path, e);
    writeln!(out, "m,n,ns,npart,workers,phase,milliseconds").map_err(werr)?;

    let mut rows = Vec::new();
    let mut flushed = 0;
    for &m in &config.m {
        let data = synth::generate(config.seed, m, config.n, config.cardinality, config.density);
        let sparse = if config.sparse {
            Some(SparseDataset::from_dense(&data)?)
        } else {
            None
        };
        for &workers in &config.workers {
            for &ns in &config.ns {
                let cell = catch_unwind(AssertUnwindSafe(|| {
                    bench_cell(config, &data, sparse.as_ref(), workers, ns)
                }))
                .unwrap_or_else(|_| Err(CliError::Data("benchmark cell panicked".into())));
                let mut emit = |npart, phase, milliseconds| {
                    rows.push(BenchRow {
                        m,
                        n: config.n,
                        ns,
                        npart,
                        workers,
                        phase,
                        milliseconds,
                    })
                };
                match cell {
                    Ok((npart, times)) => {
                        for (phase, t) in BENCH_PHASES.iter().zip(times) {
                            emit(npart, phase, t);
                        }
                    }
                    Err(e) => {
                        log::error!("bench cell m={m} workers={workers} ns={ns} failed: {e}");
                        emit(config.npart.unwrap_or(2 * workers), "failed", f64::NAN);
                    }
                }
            }
        }
        for r in &rows[flushed..] {
            writeln!(
                out,
                "{},{},{},{},{},{},{:.3}",
                r.m, r.n, r.ns, r.npart, r.workers, r.phase, r.milliseconds
            )
            .map_err(werr)?;
        }
        flushed = rows.len();
        out.flush().map_err(werr)?;
    }
    Ok(rows)
}
