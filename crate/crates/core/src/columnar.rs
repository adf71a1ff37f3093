//! Row-major to columnar transforms and the resulting [`ColumnStore`].
//!
//! The dense transform transposes each row partition locally, emits one
//! [`FeatureBlock`] per `(feature, row partition)` and sorts the blocks by
//! feature into `npart` partitions. The sparse transform emits one tuple per
//! non-zero cell, groups by feature and builds one [`SparseFeatureVector`]
//! per feature. In both layouts the class travels with the data and is
//! retrieved later through [`ColumnStore::lookup`].

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crate::engine::{split_balanced, Engine, PartitionedCollection};
use crate::error::{Error, Result};
use crate::types::{FeatureBlock, FeatureId, RowDataset, SparseDataset, SparseFeatureVector, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Dense,
    Sparse,
}

#[derive(Debug)]
enum Columns {
    Dense(PartitionedCollection<FeatureBlock>),
    Sparse {
        vectors: PartitionedCollection<SparseFeatureVector>,
        class: Arc<[Value]>,
    },
}

/// Cached columnar representation of a dataset.
#[derive(Debug)]
pub struct ColumnStore {
    columns: Columns,
    key_ranges: Vec<Option<(FeatureId, FeatureId)>>,
    block_lens: Vec<usize>,
    cardinalities: Vec<u32>,
    m: usize,
    n: usize,
    class_index: usize,
    scanned: AtomicUsize,
}

impl ColumnStore {
    pub fn layout(&self) -> Layout {
        match self.columns {
            Columns::Dense(_) => Layout::Dense,
            Columns::Sparse { .. } => Layout::Sparse,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.n + 1
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn npart(&self) -> usize {
        match &self.columns {
            Columns::Dense(p) => p.npart(),
            Columns::Sparse { vectors, .. } => vectors.npart(),
        }
    }

    pub fn cardinality(&self, feature: FeatureId) -> u32 {
        self.cardinalities[feature as usize]
    }

    pub fn cardinalities(&self) -> &[u32] {
        &self.cardinalities
    }

    /// Row-partition lengths of the dense layout (`[m]` for sparse).
    pub fn block_lens(&self) -> &[usize] {
        &self.block_lens
    }

    pub fn dense_partitions(&self) -> Option<&PartitionedCollection<FeatureBlock>> {
        match &self.columns {
            Columns::Dense(p) => Some(p),
            Columns::Sparse { .. } => None,
        }
    }

    pub fn sparse_partitions(&self) -> Option<&PartitionedCollection<SparseFeatureVector>> {
        match &self.columns {
            Columns::Dense(_) => None,
            Columns::Sparse { vectors, .. } => Some(vectors),
        }
    }

    /// Smallest and largest key held by partition `p`.
    pub fn key_range(&self, p: usize) -> Option<(FeatureId, FeatureId)> {
        self.key_ranges[p]
    }

    /// Input feature ids in ascending order.
    pub fn input_features(&self) -> impl Iterator<Item = FeatureId> + '_ {
        (0..self.ncols())
            .filter(move |&k| k != self.class_index)
            .map(|k| k as FeatureId)
    }

    /// Number of partitions scanned by [`lookup`](Self::lookup) so far.
    pub fn partitions_scanned(&self) -> usize {
        self.scanned.load(Ordering::Relaxed)
    }

    pub fn reset_scan_counter(&self) {
        self.scanned.store(0, Ordering::Relaxed);
    }

    fn candidate_partitions(&self, feature: FeatureId) -> impl Iterator<Item = usize> + '_ {
        self.key_ranges
            .iter()
            .enumerate()
            .filter(move |(_, r)| matches!(r, Some((lo, hi)) if *lo <= feature && feature <= *hi))
            .map(|(p, _)| p)
    }

    /// Retrieves a whole column. Only partitions whose key range covers
    /// `feature` are scanned. The sparse class column is held densely and
    /// scans nothing.
    pub fn lookup(&self, feature: FeatureId) -> Result<Vec<Value>> {
        if feature as usize >= self.ncols() {
            return Err(Error::FeatureNotFound(feature));
        }
        match &self.columns {
            Columns::Dense(parts) => {
                let mut out = Vec::with_capacity(self.m);
                let mut found = false;
                for p in self.candidate_partitions(feature) {
                    self.scanned.fetch_add(1, Ordering::Relaxed);
                    for b in parts.partition(p).iter().filter(|b| b.feature == feature) {
                        debug_assert!(!found || b.block > 0);
                        out.extend_from_slice(&b.values);
                        found = true;
                    }
                }
                if !found {
                    return Err(Error::FeatureNotFound(feature));
                }
                Ok(out)
            }
            Columns::Sparse { vectors, class } => {
                if feature as usize == self.class_index {
                    return Ok(class.to_vec());
                }
                for p in self.candidate_partitions(feature) {
                    self.scanned.fetch_add(1, Ordering::Relaxed);
                    if let Some(v) = vectors.partition(p).iter().find(|v| v.feature == feature) {
                        return Ok(v.densify(self.m));
                    }
                }
                Err(Error::FeatureNotFound(feature))
            }
        }
    }

    /// All columns (class included) in column order, rebuilt from storage.
    pub fn reassemble_columns(&self) -> Vec<Vec<Value>> {
        let mut cols = vec![Vec::with_capacity(self.m); self.ncols()];
        match &self.columns {
            Columns::Dense(parts) => {
                for b in parts.iter() {
                    cols[b.feature as usize].extend_from_slice(&b.values);
                }
            }
            Columns::Sparse { vectors, class } => {
                for v in vectors.iter() {
                    cols[v.feature as usize] = v.densify(self.m);
                }
                cols[self.class_index] = class.to_vec();
            }
        }
        cols
    }

    /// Cells held by the store (non-zeros plus the class for sparse).
    pub fn stored_value_count(&self) -> usize {
        match &self.columns {
            Columns::Dense(parts) => parts.iter().map(|b| b.values.len()).sum(),
            Columns::Sparse { vectors, class } => vectors.iter().map(|v| v.nnz()).sum::<usize>() + class.len(),
        }
    }
}

fn key_ranges_of<T>(
    parts: &PartitionedCollection<T>,
    key: impl Fn(&T) -> FeatureId,
) -> Vec<Option<(FeatureId, FeatureId)>> {
    parts
        .partitions()
        .iter()
        .map(|p| Some((key(p.first()?), key(p.last()?))))
        .collect()
}

/// Caps `npart` at twice the column count.
pub fn clamp_npart(npart: usize, ncols: usize) -> Result<usize> {
    if npart == 0 {
        return Err(Error::InvalidPartitionCount);
    }
    let cap = (2 * ncols).max(1);
    if npart > cap {
        log::warn!("npart {npart} exceeds twice the column count; clamped to {cap}");
        return Ok(cap);
    }
    Ok(npart)
}

fn row_ranges(m: usize, row_partitions: usize) -> Result<PartitionedCollection<(usize, usize)>> {
    if row_partitions == 0 {
        return Err(Error::InvalidPartitionCount);
    }
    let rp = row_partitions.min(m).max(1);
    let ranges = split_balanced((0..m).collect::<Vec<_>>(), rp)
        .into_iter()
        .map(|rows| match (rows.first(), rows.last()) {
            (Some(&a), Some(&b)) => vec![(a, b + 1)],
            _ => vec![(0, 0)],
        })
        .collect();
    PartitionedCollection::new(ranges)
}

/// Dense columnar transform. Rows are split into `row_partitions`
/// contiguous partitions, each transposed into per-feature blocks, and the
/// blocks are sorted by feature into `npart` partitions.
pub fn columnar_transform(
    engine: &Engine,
    data: &RowDataset,
    row_partitions: usize,
    npart: usize,
) -> Result<ColumnStore> {
    let ncols = data.ncols();
    let npart = clamp_npart(npart, ncols)?;
    let rows = row_ranges(data.m(), row_partitions)?;
    let flat = data.flat();

    let emitted = engine.map_partitions(&rows, |block, ranges| {
        let (start, end) = ranges[0];
        let len = end - start;
        let mut matrix: Vec<Vec<Value>> = (0..ncols).map(|_| Vec::with_capacity(len)).collect();
        for row in flat[start * ncols..end * ncols].chunks_exact(ncols) {
            for (col, &v) in matrix.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Ok::<_, Error>(
            matrix
                .into_iter()
                .enumerate()
                .map(|(k, values)| {
                    let feature = k as FeatureId;
                    (feature, FeatureBlock { feature, block, values })
                })
                .collect(),
        )
    })?;
    let block_lens: Vec<usize> = rows.iter().map(|&(a, b)| b - a).collect();

    let sorted = engine.sort_by_key(emitted, npart)?;
    let parts = PartitionedCollection::new(
        sorted
            .into_partitions()
            .into_iter()
            .map(|p| p.into_iter().map(|(_, b)| b).collect())
            .collect(),
    )?;

    let maxima = engine.map_partitions(&parts, |_, blocks| {
        Ok::<_, Error>(
            blocks
                .iter()
                .map(|b| (b.feature, b.values.iter().copied().max().map_or(0, |v| v + 1)))
                .collect(),
        )
    })?;
    let maxima = engine.reduce_by_key(maxima, |a: u32, b: u32| Ok::<_, Error>(a.max(b)))?;
    let mut cardinalities = vec![1u32; ncols];
    for (k, c) in maxima {
        cardinalities[k as usize] = c.max(1);
    }

    Ok(ColumnStore {
        key_ranges: key_ranges_of(&parts, |b| b.feature),
        columns: Columns::Dense(parts),
        block_lens,
        cardinalities,
        m: data.m(),
        n: data.n(),
        class_index: data.class_index(),
        scanned: AtomicUsize::new(0),
    })
}

/// Sparse columnar transform. Zero values are dropped; a feature with no
/// entries yields an empty vector of cardinality 1.
pub fn sparse_columnar_transform(
    engine: &Engine,
    data: &SparseDataset,
    row_partitions: usize,
    npart: usize,
) -> Result<ColumnStore> {
    let m = data.m();
    let n = data.n;
    if m == 0 {
        return Err(Error::EmptyDataset("no instances"));
    }
    if n == 0 {
        return Err(Error::EmptyDataset("no input features"));
    }
    let npart = clamp_npart(npart, n + 1)?;
    if row_partitions == 0 {
        return Err(Error::InvalidPartitionCount);
    }
    let rows = if data.rows.is_empty() {
        PartitionedCollection::new(vec![vec![(0, 0)]])?
    } else {
        row_ranges(data.rows.len(), row_partitions)?
    };

    let emitted = engine.map_partitions(&rows, |_, ranges| {
        let (start, end) = ranges[0];
        let mut out = Vec::new();
        for row in &data.rows[start..end] {
            if row.index >= m {
                return Err(Error::InstanceOutOfRange { instance: row.index, m });
            }
            for &(f, v) in &row.entries {
                if f as usize >= n {
                    return Err(Error::FeatureOutOfRange { feature: f as usize, n });
                }
                if v != 0 {
                    out.push((f, (row.index as u32, v)));
                }
            }
        }
        Ok(out)
    })?;

    let groups = engine.group_by_key(emitted)?;
    let vectorized = engine.par_map(groups, |(feature, mut entries)| {
        entries.sort_unstable_by_key(|&(i, _)| i);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateEntry {
                instance: w[0].0 as usize,
                feature,
            });
        }
        Ok(SparseFeatureVector { feature, entries })
    });

    let mut all: Vec<SparseFeatureVector> = Vec::with_capacity(n);
    let mut next = 0u32;
    for v in vectorized {
        let v = v?;
        while next < v.feature {
            all.push(SparseFeatureVector {
                feature: next,
                entries: Vec::new(),
            });
            next += 1;
        }
        next = v.feature + 1;
        all.push(v);
    }
    while (next as usize) < n {
        all.push(SparseFeatureVector {
            feature: next,
            entries: Vec::new(),
        });
        next += 1;
    }

    let mut cardinalities: Vec<u32> = all
        .iter()
        .map(|v| v.entries.iter().map(|&(_, x)| x).max().unwrap_or(0) + 1)
        .collect();
    cardinalities.push(data.class.iter().copied().max().unwrap_or(0) + 1);

    let vectors = PartitionedCollection::from_vec(all, npart)?;
    Ok(ColumnStore {
        key_ranges: key_ranges_of(&vectors, |v| v.feature),
        columns: Columns::Sparse {
            vectors,
            class: data.class.clone().into(),
        },
        block_lens: vec![m],
        cardinalities,
        m,
        n,
        class_index: n,
        scanned: AtomicUsize::new(0),
    })
}
