//! Domain types shared by the transform, histogram and selection stages.
//!
//! Every type here is immutable once built and can be shared across worker
//! threads. Feature indices are column positions inside a record, so the
//! class occupies one of them (`class_index`).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Column position inside a record. Keys of every keyed collection.
pub type FeatureId = u32;

/// A discretized cell value.
pub type Value = u32;

/// Dense row-major table of discretized values. Each record holds `n` input
/// features plus the class at `class_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowDataset {
    values: Vec<Value>,
    m: usize,
    ncols: usize,
    class_index: usize,
}

impl RowDataset {
    pub fn from_rows(rows: &[Vec<Value>], class_index: usize) -> Result<Self> {
        let ncols = rows.first().map(Vec::len).ok_or(Error::EmptyDataset("no rows"))?;
        let mut values = Vec::with_capacity(ncols * rows.len());
        for (row, record) in rows.iter().enumerate() {
            if record.len() != ncols {
                return Err(Error::RaggedRow {
                    row,
                    expected: ncols,
                    found: record.len(),
                });
            }
            values.extend_from_slice(record);
        }
        Self::from_flat(values, ncols, class_index)
    }

    /// Builds a dataset from a row-major buffer of `m * ncols` cells.
    pub fn from_flat(values: Vec<Value>, ncols: usize, class_index: usize) -> Result<Self> {
        if ncols < 2 {
            return Err(Error::EmptyDataset("need at least one input feature and a class"));
        }
        if values.is_empty() {
            return Err(Error::EmptyDataset("no rows"));
        }
        if !values.len().is_multiple_of(ncols) {
            let m = values.len() / ncols;
            return Err(Error::RaggedRow {
                row: m,
                expected: ncols,
                found: values.len() - m * ncols,
            });
        }
        if class_index >= ncols {
            return Err(Error::ClassIndexOutOfRange {
                index: class_index,
                ncols,
            });
        }
        let m = values.len() / ncols;
        Ok(Self {
            values,
            m,
            ncols,
            class_index,
        })
    }

    /// Number of instances.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of input features (excluding the class).
    pub fn n(&self) -> usize {
        self.ncols - 1
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.values[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Value]> + '_ {
        self.values.chunks_exact(self.ncols)
    }

    pub fn value(&self, row: usize, col: usize) -> Value {
        self.values[row * self.ncols + col]
    }

    pub fn column(&self, col: usize) -> Vec<Value> {
        self.rows().map(|r| r[col]).collect()
    }

    pub fn class_column(&self) -> Vec<Value> {
        self.column(self.class_index)
    }

    /// Input feature ids in ascending order, skipping the class.
    pub fn input_features(&self) -> impl Iterator<Item = FeatureId> + '_ {
        (0..self.ncols)
            .filter(move |&k| k != self.class_index)
            .map(|k| k as FeatureId)
    }

    /// `1 + max` per column.
    pub fn cardinalities(&self) -> Vec<u32> {
        let mut card = vec![0u32; self.ncols];
        for row in self.rows() {
            for (c, &v) in card.iter_mut().zip(row) {
                *c = (*c).max(v + 1);
            }
        }
        card
    }

    pub(crate) fn flat(&self) -> &[Value] {
        &self.values
    }
}

/// One sparse instance: strictly increasing `(feature, value)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseRow {
    pub index: usize,
    pub entries: Vec<(FeatureId, Value)>,
}

/// Sparse row records with a dense class vector. The class acts as the
/// virtual column `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseDataset {
    pub n: usize,
    pub rows: Vec<SparseRow>,
    pub class: Vec<Value>,
}

impl SparseDataset {
    pub fn m(&self) -> usize {
        self.class.len()
    }

    pub fn class_index(&self) -> usize {
        self.n
    }

    /// Expands to a dense dataset with the class as the last column.
    pub fn densify(&self) -> Result<RowDataset> {
        let ncols = self.n + 1;
        let m = self.m();
        let mut values = vec![0; m * ncols];
        for row in &self.rows {
            if row.index >= m {
                return Err(Error::InstanceOutOfRange { instance: row.index, m });
            }
            for &(f, v) in &row.entries {
                if f as usize >= self.n {
                    return Err(Error::FeatureOutOfRange {
                        feature: f as usize,
                        n: self.n,
                    });
                }
                values[row.index * ncols + f as usize] = v;
            }
        }
        for (i, &c) in self.class.iter().enumerate() {
            values[i * ncols + self.n] = c;
        }
        RowDataset::from_flat(values, ncols, self.n)
    }

    /// Sparse view of a dense dataset; the class must be the last column.
    pub fn from_dense(data: &RowDataset) -> Result<Self> {
        if data.class_index() != data.n() {
            return Err(Error::ClassIndexOutOfRange {
                index: data.class_index(),
                ncols: data.ncols(),
            });
        }
        let n = data.n();
        let rows = data
            .rows()
            .enumerate()
            .map(|(index, r)| SparseRow {
                index,
                entries: r[..n]
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(f, &v)| (f as FeatureId, v))
                    .collect(),
            })
            .collect();
        Ok(Self {
            n,
            rows,
            class: data.class_column(),
        })
    }
}

/// A feature's values for one row partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureBlock {
    pub feature: FeatureId,
    pub block: usize,
    pub values: Vec<Value>,
}

/// Whole-feature sparse vector, sorted by instance, zeros omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseFeatureVector {
    pub feature: FeatureId,
    pub entries: Vec<(u32, Value)>,
}

impl SparseFeatureVector {
    pub fn densify(&self, m: usize) -> Vec<Value> {
        let mut out = vec![0; m];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
}

/// Count tensor indexed `[conditioning][candidate][paired]`.
#[derive(Clone, PartialEq, Eq)]
pub struct ContingencyCube {
    pub feature: FeatureId,
    shape: [usize; 3],
    counts: Vec<u64>,
}

impl ContingencyCube {
    pub fn zeros(feature: FeatureId, ysize: usize, isize: usize, jsize: usize) -> Self {
        Self {
            feature,
            shape: [ysize, isize, jsize],
            counts: vec![0; ysize * isize * jsize],
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn ysize(&self) -> usize {
        self.shape[0]
    }

    pub fn isize(&self) -> usize {
        self.shape[1]
    }

    pub fn jsize(&self) -> usize {
        self.shape[2]
    }

    #[inline]
    pub fn offset(&self, y: usize, i: usize, j: usize) -> usize {
        (y * self.shape[1] + i) * self.shape[2] + j
    }

    pub fn get(&self, y: usize, i: usize, j: usize) -> u64 {
        self.counts[self.offset(y, i, j)]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u64] {
        &mut self.counts
    }

    /// Adds one observation, checking bounds.
    pub fn increment(&mut self, y: usize, i: usize, j: usize) -> Result<()> {
        let [ys, is, js] = self.shape;
        if y >= ys || i >= is || j >= js {
            return Err(Error::CubeBounds {
                feature: self.feature,
                y,
                i,
                j,
                shape: self.shape,
            });
        }
        let off = self.offset(y, i, j);
        self.counts[off] += 1;
        Ok(())
    }

    /// Cell-wise sum.
    pub fn merge(mut self, other: &ContingencyCube) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                feature: self.feature,
                left: self.shape,
                right: other.shape,
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(self)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

impl fmt::Debug for ContingencyCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContingencyCube")
            .field("feature", &self.feature)
            .field("shape", &self.shape)
            .field("total", &self.total())
            .finish()
    }
}

/// Read-only full column replicated to every worker.
///
/// Addressed by flat instance index, or by `(block, offset)` where block
/// boundaries come from the row partitioning of the dense layout.
#[derive(Debug, Clone)]
pub struct BroadcastColumn {
    feature: FeatureId,
    values: Arc<[Value]>,
    block_starts: Arc<[usize]>,
}

impl BroadcastColumn {
    pub(crate) fn new(feature: FeatureId, values: Vec<Value>, block_lens: &[usize]) -> Self {
        let mut starts = Vec::with_capacity(block_lens.len());
        let mut acc = 0;
        for &len in block_lens {
            starts.push(acc);
            acc += len;
        }
        Self {
            feature,
            values: values.into(),
            block_starts: starts.into(),
        }
    }

    pub fn feature(&self) -> FeatureId {
        self.feature
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, instance: usize) -> Value {
        self.values[instance]
    }

    #[inline]
    pub fn at(&self, block: usize, offset: usize) -> Value {
        self.values[self.block_starts[block] + offset]
    }

    /// Slice covering one row partition.
    pub fn block(&self, block: usize, len: usize) -> &[Value] {
        let start = self.block_starts[block];
        &self.values[start..start + len]
    }

    pub fn as_slice(&self) -> &[Value] {
        &self.values
    }
}

/// Cached marginal and class-joint counts, exposed as probabilities
/// `count / m` at use time.
#[derive(Debug, Clone, Default)]
pub struct ProportionCache {
    m: u64,
    class_card: usize,
    marginal: HashMap<FeatureId, Vec<u64>>,
    /// `counts[value * class_card + class]`
    joint: HashMap<FeatureId, Vec<u64>>,
}

impl ProportionCache {
    pub fn new(m: usize, class_card: usize) -> Self {
        Self {
            m: m as u64,
            class_card,
            ..Default::default()
        }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn class_cardinality(&self) -> usize {
        self.class_card
    }

    pub fn insert_marginal(&mut self, feature: FeatureId, counts: Vec<u64>) {
        self.marginal.insert(feature, counts);
    }

    pub fn insert_joint(&mut self, feature: FeatureId, counts: Vec<u64>) {
        debug_assert_eq!(counts.len() % self.class_card.max(1), 0);
        self.joint.insert(feature, counts);
    }

    pub fn marginal_counts(&self, feature: FeatureId) -> Result<&[u64]> {
        self.marginal
            .get(&feature)
            .map(Vec::as_slice)
            .ok_or(Error::CacheMissing {
                table: "marginal",
                feature,
            })
    }

    pub fn joint_counts(&self, feature: FeatureId) -> Result<&[u64]> {
        self.joint.get(&feature).map(Vec::as_slice).ok_or(Error::CacheMissing {
            table: "joint",
            feature,
        })
    }

    pub fn marginal(&self, feature: FeatureId) -> Result<Vec<f64>> {
        let m = self.m as f64;
        Ok(self.marginal_counts(feature)?.iter().map(|&c| c as f64 / m).collect())
    }

    pub fn joint(&self, feature: FeatureId) -> Result<Vec<f64>> {
        let m = self.m as f64;
        Ok(self.joint_counts(feature)?.iter().map(|&c| c as f64 / m).collect())
    }

    pub fn has_marginal(&self, feature: FeatureId) -> bool {
        self.marginal.contains_key(&feature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectedFeature {
    pub feature: FeatureId,
    pub score: f64,
}

/// Ordered greedy selection output.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub criterion: crate::criteria::CriterionKind,
    pub beta: f64,
    pub selected: Vec<SelectedFeature>,
}

impl SelectionResult {
    pub fn features(&self) -> Vec<FeatureId> {
        self.selected.iter().map(|s| s.feature).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.selected.iter().map(|s| s.score).collect()
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}
