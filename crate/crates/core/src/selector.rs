//! Greedy forward selection driver.
//!
//! One relevance pass against the class, then one redundancy pass per
//! selected feature: the last pick is looked up, broadcast, and paired with
//! every live candidate (conditioned on the class) to update the criterion.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::columnar::{ColumnStore, Layout};
use crate::criteria::{init_criteria, CriterionKind};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::infotheory::{compute_mutual_info, get_histograms, sparse_histograms, value_counts, LogBase, MiCmiPair};
use crate::types::{BroadcastColumn, ContingencyCube, FeatureId, ProportionCache, SelectedFeature, SelectionResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectConfig {
    pub kind: CriterionKind,
    pub ns: usize,
    /// MIFS only.
    pub beta: Option<f64>,
    pub base: LogBase,
}

impl SelectConfig {
    pub fn new(kind: CriterionKind, ns: usize) -> Self {
        Self {
            kind,
            ns,
            beta: None,
            base: LogBase::Nats,
        }
    }
}

/// Wall-clock milliseconds per phase.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseTimings {
    pub relevance_ms: f64,
    /// One entry per redundancy pass, in selection order.
    pub redundancy_ms: Vec<f64>,
}

impl PhaseTimings {
    pub fn redundancy_total_ms(&self) -> f64 {
        self.redundancy_ms.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct SelectionReport {
    pub result: SelectionResult,
    pub timings: PhaseTimings,
}

/// Output of the relevance pass, reused by every redundancy pass.
#[derive(Debug)]
pub struct Relevances {
    pub values: BTreeMap<FeatureId, f64>,
    pub cache: ProportionCache,
    pub class_column: BroadcastColumn,
}

fn histograms(
    engine: &Engine,
    store: &ColumnStore,
    paired: &BroadcastColumn,
    cond: Option<&BroadcastColumn>,
    skip: &[bool],
) -> Result<BTreeMap<FeatureId, ContingencyCube>> {
    match store.layout() {
        Layout::Dense => get_histograms(engine, store, paired, cond, skip),
        Layout::Sparse => sparse_histograms(engine, store, paired, cond, skip),
    }
}

/// `I(Xk;Y)` for every input feature, plus the proportion cache the
/// redundancy passes need.
pub fn compute_relevances(engine: &Engine, store: &ColumnStore, base: LogBase) -> Result<Relevances> {
    if store.n() == 0 || store.m() == 0 {
        return Err(Error::EmptyDataset("column store holds no features"));
    }
    let class = store.class_index() as FeatureId;
    let ycol = engine.broadcast(class, store.lookup(class)?, store.block_lens());
    let ycard = store.cardinality(class) as usize;
    if ycard < 2 {
        log::warn!("class column is constant; every relevance is zero");
    }

    let cubes = histograms(engine, store, &ycol, None, &[])?;
    let mut cache = ProportionCache::new(store.m(), ycard);
    cache.insert_marginal(class, value_counts(ycol.as_slice(), ycard));
    for (&k, cube) in &cubes {
        let joint = cube.counts().to_vec();
        let marginal = joint.chunks_exact(ycard).map(|r| r.iter().sum()).collect();
        cache.insert_joint(k, joint);
        cache.insert_marginal(k, marginal);
    }
    let mi = compute_mutual_info(engine, cubes, &cache, class, None, base)?;
    Ok(Relevances {
        values: mi.into_iter().map(|(k, p)| (k, p.mi)).collect(),
        cache,
        class_column: ycol,
    })
}

/// `I(Xj;Xi)` and `I(Xj;Xi|Y)` between `p_best` and every feature not
/// masked by `skip`.
pub fn compute_redundancies(
    engine: &Engine,
    store: &ColumnStore,
    relevances: &Relevances,
    p_best: FeatureId,
    skip: &[bool],
    base: LogBase,
) -> Result<BTreeMap<FeatureId, MiCmiPair>> {
    let class = store.class_index() as FeatureId;
    if p_best == class {
        return Err(Error::FeatureNotFound(p_best));
    }
    let jcol = engine.broadcast(p_best, store.lookup(p_best)?, store.block_lens());
    let cubes = histograms(engine, store, &jcol, Some(&relevances.class_column), skip)?;
    compute_mutual_info(engine, cubes, &relevances.cache, p_best, Some(class), base)
}

/// Runs the greedy loop until `min(ns, n)` features are selected.
pub fn select(engine: &Engine, store: &ColumnStore, config: &SelectConfig) -> Result<SelectionReport> {
    if config.ns < 1 {
        return Err(Error::InvalidParameter("ns must be at least 1".into()));
    }
    let target = if config.ns > store.n() {
        log::warn!(
            "ns = {} exceeds the {} available features; selecting all",
            config.ns,
            store.n()
        );
        store.n()
    } else {
        config.ns
    };

    let mut timings = PhaseTimings::default();
    let start = Instant::now();
    let relevances = compute_relevances(engine, store, config.base)?;
    let mut acc = init_criteria(&relevances.values, config.kind, config.beta)?;
    timings.relevance_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut skip = vec![false; store.ncols()];
    skip[store.class_index()] = true;
    let mut selected = Vec::with_capacity(target);

    let (mut p_best, _) = acc.best_candidate()?;
    let score = acc.mark_selected(p_best)?;
    skip[p_best as usize] = true;
    selected.push(SelectedFeature { feature: p_best, score });

    while selected.len() < target {
        let start = Instant::now();
        let red = compute_redundancies(engine, store, &relevances, p_best, &skip, config.base)?;
        acc.update(&red)?;
        timings.redundancy_ms.push(start.elapsed().as_secs_f64() * 1e3);
        p_best = acc.best_candidate()?.0;
        let score = acc.mark_selected(p_best)?;
        skip[p_best as usize] = true;
        selected.push(SelectedFeature { feature: p_best, score });
        log::debug!("selected feature {p_best} with score {score}");
    }

    Ok(SelectionReport {
        result: SelectionResult {
            criterion: config.kind,
            beta: acc.beta(),
            selected,
        },
        timings,
    })
}
