use std::path::PathBuf;
use std::str::FromStr;

use crate::criteria::CriterionKind;
use crate::infotheory::LogBase;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Libsvm,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "libsvm" | "svmlight" => Ok(Format::Libsvm),
            other => Err(CliError::Config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binning {
    None,
    EqualWidth(usize),
}

/// Settings for one `select` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: Format,
    pub criterion: CriterionKind,
    pub ns: usize,
    /// Column partitions; defaults to twice the worker count.
    pub npart: Option<usize>,
    pub beta: Option<f64>,
    /// CSV class column; `None` means last.
    pub label_position: Option<usize>,
    pub binning: Binning,
    pub workers: usize,
    /// Standard output when `None`.
    pub output: Option<PathBuf>,
    pub unit: LogBase,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, format: Format, criterion: CriterionKind, ns: usize) -> Self {
        Self {
            input: input.into(),
            format,
            criterion,
            ns,
            npart: None,
            beta: None,
            label_position: None,
            binning: Binning::None,
            workers: 1,
            output: None,
            unit: LogBase::Nats,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.ns < 1 {
            return Err(CliError::Config("ns must be at least 1".into()));
        }
        if let Binning::EqualWidth(b) = self.binning {
            if b < 2 {
                return Err(CliError::Config(format!("bin count must be at least 2, got {b}")));
            }
        }
        if self.npart == Some(0) {
            return Err(CliError::Config("npart must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if self.beta.is_some() && self.criterion != CriterionKind::Mifs {
            return Err(CliError::Config(format!(
                "beta is fixed for criterion {}",
                self.criterion
            )));
        }
        Ok(())
    }

    pub fn npart_or_default(&self) -> usize {
        self.npart.unwrap_or(2 * self.workers)
    }
}

/// Settings for a `bench` sweep over synthetic data.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub seed: u64,
    pub m: Vec<usize>,
    pub n: usize,
    pub cardinality: u32,
    /// Fraction of non-zero cells; `1.0` draws every cell uniformly.
    pub density: f64,
    pub ns: Vec<usize>,
    pub workers: Vec<usize>,
    pub npart: Option<usize>,
    pub criterion: CriterionKind,
    pub sparse: bool,
    pub output: Option<PathBuf>,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.m.is_empty() || self.ns.is_empty() || self.workers.is_empty() {
            return Err(CliError::Config("sweep lists must not be empty".into()));
        }
        if self.m.contains(&0) || self.ns.contains(&0) || self.workers.contains(&0) || self.n == 0 {
            return Err(CliError::Config("m, n, ns and workers must be positive".into()));
        }
        if self.cardinality < 2 {
            return Err(CliError::Config("cardinality must be at least 2".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(CliError::Config(format!(
                "density must be in (0, 1], got {}",
                self.density
            )));
        }
        if self.npart == Some(0) {
            return Err(CliError::Config("npart must be at least 1".into()));
        }
        Ok(())
    }
}
