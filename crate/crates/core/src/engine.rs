//! In-process partitioned runtime.
//!
//! Provides the handful of collection primitives the selection pipeline is
//! written against: `map_partitions`, `sort_by_key`, `group_by_key`,
//! `reduce_by_key` and `broadcast`. Partitions fan out to a rayon pool whose
//! size is independent of the partition count. All outputs are a function
//! of the input and `npart` only; the pool size never changes a result.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{BroadcastColumn, FeatureId, Value};

/// An ordered sequence of partitions. Element order within a partition is
/// preserved by every operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedCollection<T> {
    partitions: Vec<Vec<T>>,
}

impl<T> PartitionedCollection<T> {
    pub fn new(partitions: Vec<Vec<T>>) -> Result<Self> {
        if partitions.is_empty() {
            return Err(Error::InvalidPartitionCount);
        }
        Ok(Self { partitions })
    }

    /// Splits `items` into `npart` contiguous, balanced partitions.
    pub fn from_vec(items: Vec<T>, npart: usize) -> Result<Self> {
        if npart == 0 {
            return Err(Error::InvalidPartitionCount);
        }
        Ok(Self {
            partitions: split_balanced(items, npart),
        })
    }

    pub fn npart(&self) -> usize {
        self.partitions.len()
    }

    pub fn partitions(&self) -> &[Vec<T>] {
        &self.partitions
    }

    pub fn partition(&self, p: usize) -> &[T] {
        &self.partitions[p]
    }

    pub fn into_partitions(self) -> Vec<Vec<T>> {
        self.partitions
    }

    pub fn len(&self) -> usize {
        self.partitions.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.partitions.iter().flatten()
    }
}

/// Contiguous split; the first `len % npart` partitions get one extra item.
pub(crate) fn split_balanced<T>(items: Vec<T>, npart: usize) -> Vec<Vec<T>> {
    let len = items.len();
    let base = len / npart;
    let extra = len % npart;
    let mut out = Vec::with_capacity(npart);
    let mut iter = items.into_iter();
    for p in 0..npart {
        let take = base + usize::from(p < extra);
        out.push(iter.by_ref().take(take).collect());
    }
    out
}

/// Worker pool plus the collection primitives.
pub struct Engine {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine").field("workers", &self.workers).finish()
    }
}

impl Engine {
    pub fn new(workers: usize) -> Result<Self> {
        let workers = workers.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("itfs-worker-{i}"))
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        Ok(Self { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Default partition count: two per worker.
    pub fn default_npart(&self) -> usize {
        2 * self.workers
    }

    /// Runs `f(partition index, partition)` on every partition. On failure
    /// the error of the lowest-indexed failing partition is returned and no
    /// output is produced.
    pub fn map_partitions<T, U, E, F>(
        &self,
        coll: &PartitionedCollection<T>,
        f: F,
    ) -> std::result::Result<PartitionedCollection<U>, E>
    where
        T: Sync,
        U: Send,
        E: Send,
        F: Fn(usize, &[T]) -> std::result::Result<Vec<U>, E> + Sync,
    {
        let results: Vec<std::result::Result<Vec<U>, E>> = self.pool.install(|| {
            coll.partitions
                .par_iter()
                .enumerate()
                .map(|(p, part)| f(p, part))
                .collect()
        });
        let partitions = results.into_iter().collect::<std::result::Result<Vec<_>, E>>()?;
        Ok(PartitionedCollection { partitions })
    }

    /// Order-preserving parallel map over a flat list.
    pub fn par_map<T, U, F>(&self, items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync + Send,
    {
        self.pool.install(|| items.into_par_iter().map(f).collect())
    }

    /// Stable global sort by key, then a balanced contiguous split into
    /// exactly `npart` partitions. Equal keys keep their encounter order
    /// (partition order, then position).
    pub fn sort_by_key<K, V>(
        &self,
        coll: PartitionedCollection<(K, V)>,
        npart: usize,
    ) -> Result<PartitionedCollection<(K, V)>>
    where
        K: Ord + Send,
        V: Send,
    {
        if npart == 0 {
            return Err(Error::InvalidPartitionCount);
        }
        let mut flat: Vec<(K, V)> = coll.partitions.into_iter().flatten().collect();
        self.pool.install(|| flat.par_sort_by(|a, b| a.0.cmp(&b.0)));
        PartitionedCollection::from_vec(flat, npart)
    }

    /// `sort_by_key` followed by run-length grouping of equal keys. Values
    /// of a group keep their encounter order. Groups are returned in key
    /// order.
    pub fn group_by_key<K, V>(&self, coll: PartitionedCollection<(K, V)>) -> Result<Vec<(K, Vec<V>)>>
    where
        K: Ord + Send,
        V: Send,
    {
        let sorted = self.sort_by_key(coll, 1)?;
        let mut groups: Vec<(K, Vec<V>)> = Vec::new();
        for (k, v) in sorted.into_partitions().into_iter().flatten() {
            match groups.last_mut() {
                Some((last, vals)) if *last == k => vals.push(v),
                _ => groups.push((k, vec![v])),
            }
        }
        Ok(groups)
    }

    /// Folds every value of a key with `combine`. Values are visited in
    /// collection order, so for an associative and commutative `combine`
    /// the result does not depend on how the input was partitioned.
    pub fn reduce_by_key<K, V, E, F>(
        &self,
        coll: PartitionedCollection<(K, V)>,
        combine: F,
    ) -> std::result::Result<BTreeMap<K, V>, E>
    where
        K: Ord,
        F: Fn(V, V) -> std::result::Result<V, E>,
    {
        let mut out: BTreeMap<K, V> = BTreeMap::new();
        for (k, v) in coll.partitions.into_iter().flatten() {
            match out.remove(&k) {
                Some(acc) => {
                    out.insert(k, combine(acc, v)?);
                }
                None => {
                    out.insert(k, v);
                }
            }
        }
        Ok(out)
    }

    /// Wraps a full column as a shared read-only handle. `block_lens` gives
    /// the row-partition lengths used for `(block, offset)` addressing;
    /// pass `&[len]` when only flat addressing is needed.
    pub fn broadcast(&self, feature: FeatureId, values: Vec<Value>, block_lens: &[usize]) -> BroadcastColumn {
        BroadcastColumn::new(feature, values, block_lens)
    }
}
