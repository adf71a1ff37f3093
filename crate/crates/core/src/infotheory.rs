//! Contingency cubes and plug-in MI / CMI estimates.
//!
//! A cube `counts[y][i][j]` tallies, for one candidate feature `i`, the
//! joint occurrences with a paired variable `j` (the class during the
//! relevance pass, the last selected feature afterwards) and an optional
//! conditioning variable `y` (always the class). Cubes are built per
//! partition and merged by key, so they are exact integer counts that do
//! not depend on partitioning.

use std::collections::BTreeMap;

use crate::columnar::ColumnStore;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::types::{BroadcastColumn, ContingencyCube, FeatureId, ProportionCache, Value};

/// Logarithm base used for every information term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    #[inline]
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Nats => x.ln(),
            LogBase::Bits => x.log2(),
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Nats => "nats",
            LogBase::Bits => "bits",
        }
    }
}

/// MI and CMI of one candidate against the paired variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiCmiPair {
    pub feature: FeatureId,
    pub mi: f64,
    /// Conditioned on the class; zero in relevance mode.
    pub cmi: f64,
}

fn candidate_mask(store: &ColumnStore, skip: &[bool], paired: FeatureId, cond: Option<FeatureId>) -> Vec<bool> {
    let mut mask = vec![true; store.ncols()];
    for (k, keep) in mask.iter_mut().enumerate() {
        if skip.get(k).copied().unwrap_or(false) {
            *keep = false;
        }
    }
    mask[paired as usize] = false;
    if let Some(c) = cond {
        mask[c as usize] = false;
    }
    mask
}

fn check_len(col: &BroadcastColumn, m: usize) -> Result<()> {
    if col.len() != m {
        return Err(Error::LengthMismatch {
            left: col.len(),
            right: m,
        });
    }
    Ok(())
}

/// Dense-path histograms. Every feature not masked by `skip` and distinct
/// from the paired and conditioning variables gets one merged cube.
pub fn get_histograms(
    engine: &Engine,
    store: &ColumnStore,
    paired: &BroadcastColumn,
    cond: Option<&BroadcastColumn>,
    skip: &[bool],
) -> Result<BTreeMap<FeatureId, ContingencyCube>> {
    let parts = store
        .dense_partitions()
        .ok_or(Error::InvalidParameter("dense histograms need a dense store".into()))?;
    check_len(paired, store.m())?;
    if let Some(c) = cond {
        check_len(c, store.m())?;
    }
    let mask = candidate_mask(store, skip, paired.feature(), cond.map(BroadcastColumn::feature));
    let jsize = store.cardinality(paired.feature()) as usize;
    let ysize = cond.map_or(1, |c| store.cardinality(c.feature()) as usize);

    let local = engine.map_partitions(parts, |_, blocks| {
        let mut out = Vec::new();
        for b in blocks.iter().filter(|b| mask[b.feature as usize]) {
            let isize = store.cardinality(b.feature) as usize;
            let mut cube = ContingencyCube::zeros(b.feature, ysize, isize, jsize);
            let len = b.values.len();
            let jv = paired.block(b.block, len);
            let counts = cube.counts_mut();
            let bounds = |y: usize, i: usize, j: usize| Error::CubeBounds {
                feature: b.feature,
                y,
                i,
                j,
                shape: [ysize, isize, jsize],
            };
            match cond {
                Some(c) => {
                    let yv = c.block(b.block, len);
                    for ((&i, &j), &y) in b.values.iter().zip(jv).zip(yv) {
                        let (i, j, y) = (i as usize, j as usize, y as usize);
                        if i >= isize || j >= jsize || y >= ysize {
                            return Err(bounds(y, i, j));
                        }
                        counts[(y * isize + i) * jsize + j] += 1;
                    }
                }
                None => {
                    for (&i, &j) in b.values.iter().zip(jv) {
                        let (i, j) = (i as usize, j as usize);
                        if i >= isize || j >= jsize {
                            return Err(bounds(0, i, j));
                        }
                        counts[i * jsize + j] += 1;
                    }
                }
            }
            out.push((b.feature, cube));
        }
        Ok(out)
    })?;
    engine.reduce_by_key(local, |a, b| a.merge(&b))
}

/// Sparse-path histograms. Only non-zero candidate entries are visited;
/// the `i = 0` row is rebuilt from the paired/class histograms.
pub fn sparse_histograms(
    engine: &Engine,
    store: &ColumnStore,
    paired: &BroadcastColumn,
    cond: Option<&BroadcastColumn>,
    skip: &[bool],
) -> Result<BTreeMap<FeatureId, ContingencyCube>> {
    let parts = store
        .sparse_partitions()
        .ok_or(Error::InvalidParameter("sparse histograms need a sparse store".into()))?;
    check_len(paired, store.m())?;
    if let Some(c) = cond {
        check_len(c, store.m())?;
    }
    let mask = candidate_mask(store, skip, paired.feature(), cond.map(BroadcastColumn::feature));
    let jsize = store.cardinality(paired.feature()) as usize;
    let ysize = cond.map_or(1, |c| store.cardinality(c.feature()) as usize);

    // Accumulators over all m instances.
    let mut jyhist = vec![0u64; jsize * ysize];
    let mut yhist = vec![0u64; ysize];
    for e in 0..store.m() {
        let j = paired.get(e) as usize;
        let y = cond.map_or(0, |c| c.get(e) as usize);
        if j >= jsize || y >= ysize {
            return Err(Error::CubeBounds {
                feature: paired.feature(),
                y,
                i: 0,
                j,
                shape: [ysize, 0, jsize],
            });
        }
        if j != 0 {
            jyhist[j * ysize + y] += 1;
        }
        yhist[y] += 1;
    }

    let local = engine.map_partitions(parts, |_, vectors| {
        let mut out = Vec::new();
        for v in vectors.iter().filter(|v| mask[v.feature as usize]) {
            let feature = v.feature;
            let isize = store.cardinality(feature) as usize;
            let mut cube = ContingencyCube::zeros(feature, ysize, isize, jsize);
            let mut jy = jyhist.clone();
            for &(e, i) in &v.entries {
                let e = e as usize;
                let j = paired.get(e) as usize;
                let y = cond.map_or(0, |c| c.get(e) as usize);
                if j != 0 {
                    let slot = &mut jy[j * ysize + y];
                    *slot = slot.checked_sub(1).ok_or(Error::NegativeLeftover { feature })?;
                }
                cube.increment(y, i as usize, j)?;
            }
            let counts = cube.counts_mut();
            for j in 1..jsize {
                for y in 0..ysize {
                    counts[(y * isize) * jsize + j] += jy[j * ysize + y];
                }
            }
            for (y, &total) in yhist.iter().enumerate() {
                let row: u64 = counts[y * isize * jsize..(y + 1) * isize * jsize].iter().sum();
                let rest = total.checked_sub(row).ok_or(Error::NegativeLeftover { feature })?;
                counts[y * isize * jsize] += rest;
            }
            out.push((feature, cube));
        }
        Ok::<_, Error>(out)
    })?;
    Ok(local.into_partitions().into_iter().flatten().collect())
}

/// Pairwise summation.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn clamp_nonnegative(v: f64) -> f64 {
    debug_assert!(v > -1e-9, "information term {v} is clearly negative");
    v.max(0.0)
}

/// MI (and CMI when `cond` is set) for every cube.
///
/// `paired` must have a cached marginal. With a conditioning variable the
/// cache must also hold its marginal and the joint of `paired` with it.
/// Candidate-side marginals and joints are taken from each cube.
pub fn compute_mutual_info(
    engine: &Engine,
    cubes: BTreeMap<FeatureId, ContingencyCube>,
    cache: &ProportionCache,
    paired: FeatureId,
    cond: Option<FeatureId>,
    base: LogBase,
) -> Result<BTreeMap<FeatureId, MiCmiPair>> {
    let m = cache.m() as f64;
    let b_counts = cache.marginal_counts(paired)?;
    let cond_tables = match cond {
        Some(c) => Some((cache.marginal_counts(c)?, cache.joint_counts(paired)?)),
        None => None,
    };

    let results = engine.par_map(cubes.into_iter().collect::<Vec<_>>(), |(k, cube)| {
        let [ys, is, js] = cube.shape();
        if b_counts.len() < js {
            return Err(Error::CacheMissing {
                table: "marginal",
                feature: paired,
            });
        }
        let counts = cube.counts();
        let mut n_ab = vec![0u64; is * js];
        let mut n_ac = vec![0u64; ys * is];
        for y in 0..ys {
            for i in 0..is {
                let row = &counts[(y * is + i) * js..(y * is + i + 1) * js];
                n_ac[y * is + i] = row.iter().sum();
                for (acc, &c) in n_ab[i * js..(i + 1) * js].iter_mut().zip(row) {
                    *acc += c;
                }
            }
        }
        let n_a: Vec<u64> = (0..is).map(|i| n_ab[i * js..(i + 1) * js].iter().sum()).collect();

        let mut terms = Vec::with_capacity(is * js);
        for i in 0..is {
            for j in 0..js {
                let nab = n_ab[i * js + j];
                if nab == 0 {
                    continue;
                }
                let ratio = (nab as f64 * m) / (n_a[i] as f64 * b_counts[j] as f64);
                terms.push(nab as f64 / m * base.log(ratio));
            }
        }
        let mi = clamp_nonnegative(pairwise_sum(&terms));

        let cmi = match cond_tables {
            None => 0.0,
            Some((c_counts, bc_counts)) => {
                if c_counts.len() < ys || bc_counts.len() < js * c_counts.len() {
                    return Err(Error::CacheMissing {
                        table: "joint",
                        feature: paired,
                    });
                }
                let cc = c_counts.len();
                terms.clear();
                for y in 0..ys {
                    let nc = c_counts[y] as f64;
                    for i in 0..is {
                        let nac = n_ac[y * is + i];
                        if nac == 0 {
                            continue;
                        }
                        for j in 0..js {
                            let nabc = counts[(y * is + i) * js + j];
                            if nabc == 0 {
                                continue;
                            }
                            let nbc = bc_counts[j * cc + y] as f64;
                            let ratio = (nabc as f64 * nc) / (nac as f64 * nbc);
                            terms.push(nabc as f64 / m * base.log(ratio));
                        }
                    }
                }
                clamp_nonnegative(pairwise_sum(&terms))
            }
        };
        Ok((k, MiCmiPair { feature: k, mi, cmi }))
    });
    results.into_iter().collect()
}

/// Plug-in entropy in nats.
pub fn entropy(column: &[Value]) -> Result<f64> {
    entropy_in(column, LogBase::Nats)
}

pub fn entropy_in(column: &[Value], base: LogBase) -> Result<f64> {
    if column.is_empty() {
        return Err(Error::EmptyDataset("entropy of an empty column"));
    }
    let card = column.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut counts = vec![0u64; card];
    for &v in column {
        counts[v as usize] += 1;
    }
    let m = column.len() as f64;
    let terms: Vec<f64> = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / m;
            -p * base.log(p)
        })
        .collect();
    Ok(pairwise_sum(&terms).max(0.0))
}

/// Value histogram of a column over `card` symbols.
pub fn value_counts(column: &[Value], card: usize) -> Vec<u64> {
    let mut counts = vec![0u64; card];
    for &v in column {
        counts[v as usize] += 1;
    }
    counts
}

/// Joint counts laid out as `[value * class_card + class]`.
pub fn joint_counts(column: &[Value], card: usize, class: &[Value], class_card: usize) -> Vec<u64> {
    let mut counts = vec![0u64; card * class_card];
    for (&v, &c) in column.iter().zip(class) {
        counts[v as usize * class_card + c as usize] += 1;
    }
    counts
}
