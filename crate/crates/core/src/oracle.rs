//! Sequential brute-force reference.
//!
//! Tallies joint frequencies straight from the raw columns and re-evaluates
//! each criterion's closed form over the whole selected set on every step.
//! Shares nothing with the partitioned path beyond the domain types, so it
//! can serve as ground truth in equivalence tests.

use std::collections::{BTreeMap, HashMap};

use crate::criteria::{CriterionKind, DEFAULT_MIFS_BETA, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::types::{FeatureId, RowDataset, SelectedFeature, SelectionResult, Value};

const SOFT_MAX_FEATURES: usize = 200;
const SOFT_MAX_INSTANCES: usize = 10_000;

fn tally<K: Ord>(keys: impl Iterator<Item = K>) -> BTreeMap<K, f64> {
    let mut t = BTreeMap::new();
    for k in keys {
        *t.entry(k).or_insert(0.0) += 1.0;
    }
    t
}

/// `sum p(a,b) ln(p(a,b) / (p(a) p(b)))`
pub fn oracle_mi(a: &[Value], b: &[Value]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyDataset("oracle_mi of empty columns"));
    }
    let m = a.len() as f64;
    let pa = tally(a.iter());
    let pb = tally(b.iter());
    let pab = tally(a.iter().zip(b));
    let mut mi = 0.0;
    for ((x, y), n) in &pab {
        let p = n / m;
        mi += p * (p / ((pa[x] / m) * (pb[y] / m))).ln();
    }
    Ok(mi.max(0.0))
}

/// `sum p(a,b,c) ln(p(a,b,c) p(c) / (p(a,c) p(b,c)))`
pub fn oracle_cmi(a: &[Value], b: &[Value], c: &[Value]) -> Result<f64> {
    if a.len() != b.len() || a.len() != c.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: if a.len() != b.len() { b.len() } else { c.len() },
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyDataset("oracle_cmi of empty columns"));
    }
    let m = a.len() as f64;
    let pc = tally(c.iter());
    let pac = tally(a.iter().zip(c));
    let pbc = tally(b.iter().zip(c));
    let pabc = tally(a.iter().zip(b).zip(c).map(|((x, y), z)| (x, y, z)));
    let mut cmi = 0.0;
    for ((x, y, z), n) in &pabc {
        let p = n / m;
        let ratio = (p * (pc[z] / m)) / ((pac[&(*x, *z)] / m) * (pbc[&(*y, *z)] / m));
        cmi += p * ratio.ln();
    }
    Ok(cmi.max(0.0))
}

/// A criterion's closed form for one candidate. `terms` holds
/// `(I(Xj;Xi), I(Xj;Xi|Y))` for each selected `Xj`.
pub fn oracle_score(kind: CriterionKind, beta: f64, relevance: f64, terms: &[(f64, f64)]) -> f64 {
    let s = terms.len() as f64;
    let sum_mi: f64 = terms.iter().map(|t| t.0).sum();
    let sum_cmi: f64 = terms.iter().map(|t| t.1).sum();
    if terms.is_empty() {
        return relevance;
    }
    match kind {
        CriterionKind::Mim => relevance,
        CriterionKind::Mifs => relevance - beta * sum_mi,
        CriterionKind::Jmi => relevance - sum_mi / s + sum_cmi / s,
        CriterionKind::Cmi => relevance - sum_mi + sum_cmi,
        CriterionKind::Mrmr => relevance - sum_mi / s,
        CriterionKind::Cmim | CriterionKind::If => {
            relevance - terms.iter().map(|t| t.0 - t.1).fold(f64::NEG_INFINITY, f64::max)
        }
        CriterionKind::Icap => relevance - terms.iter().map(|t| (t.0 - t.1).max(0.0)).sum::<f64>(),
    }
}

/// Naive greedy selection over a row dataset.
pub fn oracle_select(data: &RowDataset, kind: CriterionKind, ns: usize, beta: Option<f64>) -> Result<SelectionResult> {
    if ns < 1 {
        return Err(Error::InvalidParameter("ns must be at least 1".into()));
    }
    let beta = match (kind, beta) {
        (CriterionKind::Mifs, b) => b.unwrap_or(DEFAULT_MIFS_BETA),
        (_, Some(_)) => {
            return Err(Error::FixedParameter {
                param: "beta",
                criterion: kind.name(),
            })
        }
        (_, None) => 0.0,
    };
    if data.n() > SOFT_MAX_FEATURES || data.m() > SOFT_MAX_INSTANCES {
        log::warn!(
            "oracle run on {} features x {} instances exceeds its intended size",
            data.n(),
            data.m()
        );
    }
    let y = data.class_column();
    let columns: Vec<Vec<Value>> = (0..data.ncols()).map(|k| data.column(k)).collect();
    let features: Vec<usize> = (0..data.ncols()).filter(|&k| k != data.class_index()).collect();
    let relevance: HashMap<usize, f64> = features
        .iter()
        .map(|&k| Ok((k, oracle_mi(&columns[k], &y)?)))
        .collect::<Result<_>>()?;

    let mut pair_terms: HashMap<(usize, usize), (f64, f64)> = HashMap::new();
    let mut selected: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    let target = ns.min(features.len());
    while out.len() < target {
        let mut scored: Vec<(usize, f64)> = Vec::new();
        for &k in features.iter().filter(|k| !selected.contains(k)) {
            let mut terms = Vec::with_capacity(selected.len());
            for &j in &selected {
                let t = match pair_terms.get(&(j, k)) {
                    Some(&t) => t,
                    None => {
                        let t = (
                            oracle_mi(&columns[j], &columns[k])?,
                            oracle_cmi(&columns[j], &columns[k], &y)?,
                        );
                        pair_terms.insert((j, k), t);
                        t
                    }
                };
                terms.push(t);
            }
            scored.push((k, oracle_score(kind, beta, relevance[&k], &terms)));
        }
        let top = scored.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        let (k, score) = scored
            .into_iter()
            .filter(|t| t.1 >= top - TIE_TOLERANCE)
            .min_by_key(|t| t.0)
            .ok_or(Error::NoCandidates)?;
        selected.push(k);
        out.push(SelectedFeature {
            feature: k as FeatureId,
            score,
        });
    }
    Ok(SelectionResult {
        criterion: kind,
        beta,
        selected: out,
    })
}
