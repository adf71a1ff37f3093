//! The relevance / redundancy / conditional-redundancy family of scores.
//!
//! Every criterion is an instance of
//!
//! ```text
//! J(Xi) = I(Xi;Y) - beta * sum_{j in S} I(Xj;Xi) + gamma * sum_{j in S} I(Xj;Xi|Y)
//! ```
//!
//! with `beta` and `gamma` fixed by the criterion, plus two non-linear
//! members (CMIM/IF take a max over `S`, ICAP caps each term at zero).
//! [`CriterionAccumulator`] keeps per-candidate running sums so each greedy
//! step only folds in the terms of the newly selected feature.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::infotheory::MiCmiPair;
use crate::types::FeatureId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionKind {
    Mim,
    Mifs,
    Jmi,
    Cmi,
    Mrmr,
    Cmim,
    If,
    Icap,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 8] = [
        CriterionKind::Mim,
        CriterionKind::Mifs,
        CriterionKind::Jmi,
        CriterionKind::Cmi,
        CriterionKind::Mrmr,
        CriterionKind::Cmim,
        CriterionKind::If,
        CriterionKind::Icap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Mim => "mim",
            CriterionKind::Mifs => "mifs",
            CriterionKind::Jmi => "jmi",
            CriterionKind::Cmi => "cmi",
            CriterionKind::Mrmr => "mrmr",
            CriterionKind::Cmim => "cmim",
            CriterionKind::If => "if",
            CriterionKind::Icap => "icap",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        CriterionKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::UnknownCriterion(s.to_string()))
    }
}

/// MIFS redundancy weight when none is given.
pub const DEFAULT_MIFS_BETA: f64 = 1.0;

/// Absolute score gap below which two candidates count as tied. Equal
/// scores reached through different summation orders differ by a few ulps.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    feature: FeatureId,
    relevance: f64,
    red_sum: f64,
    cond_sum: f64,
    max_term: f64,
    icap_sum: f64,
    selected: bool,
    score: f64,
}

/// Per-candidate cached relevance plus incrementally updated redundancy
/// terms. Owned by a single selection driver.
#[derive(Debug, Clone)]
pub struct CriterionAccumulator {
    kind: CriterionKind,
    beta: f64,
    candidates: Vec<Candidate>,
    /// `positions[feature] = index into candidates`
    positions: BTreeMap<FeatureId, usize>,
    nselected: usize,
}

/// Sets up the accumulator from per-feature relevances. Only MIFS accepts
/// a `beta`.
pub fn init_criteria(
    relevances: &BTreeMap<FeatureId, f64>,
    kind: CriterionKind,
    beta: Option<f64>,
) -> Result<CriterionAccumulator> {
    let beta = match (kind, beta) {
        (CriterionKind::Mifs, Some(b)) if b.is_finite() => b,
        (CriterionKind::Mifs, Some(b)) => {
            return Err(Error::InvalidParameter(format!("beta must be finite, got {b}")));
        }
        (CriterionKind::Mifs, None) => DEFAULT_MIFS_BETA,
        (_, Some(_)) => {
            return Err(Error::FixedParameter {
                param: "beta",
                criterion: kind.name(),
            });
        }
        (_, None) => 0.0,
    };
    let mut candidates = Vec::with_capacity(relevances.len());
    let mut positions = BTreeMap::new();
    for (&feature, &relevance) in relevances {
        if relevance.is_nan() || relevance < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "relevance of feature {feature} is {relevance}"
            )));
        }
        positions.insert(feature, candidates.len());
        candidates.push(Candidate {
            feature,
            relevance,
            red_sum: 0.0,
            cond_sum: 0.0,
            max_term: f64::NEG_INFINITY,
            icap_sum: 0.0,
            selected: false,
            score: relevance,
        });
    }
    Ok(CriterionAccumulator {
        kind,
        beta,
        candidates,
        positions,
        nselected: 0,
    })
}

impl CriterionAccumulator {
    pub fn kind(&self) -> CriterionKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Number of features whose redundancy terms have been folded in.
    pub fn selected_count(&self) -> usize {
        self.nselected
    }

    pub fn live_count(&self) -> usize {
        self.candidates.iter().filter(|c| !c.selected).count()
    }

    pub fn is_live(&self, feature: FeatureId) -> bool {
        self.positions
            .get(&feature)
            .is_some_and(|&p| !self.candidates[p].selected)
    }

    pub fn relevance(&self, feature: FeatureId) -> Option<f64> {
        self.positions.get(&feature).map(|&p| self.candidates[p].relevance)
    }

    /// Current score; frozen at selection time for selected features.
    pub fn score(&self, feature: FeatureId) -> Option<f64> {
        self.positions.get(&feature).map(|&p| self.candidates[p].score)
    }

    /// Accumulated `sum I(Xj;Xi)` over the selected set.
    pub fn redundancy_sum(&self, feature: FeatureId) -> Option<f64> {
        self.positions.get(&feature).map(|&p| self.candidates[p].red_sum)
    }

    /// Live candidates and their scores, by ascending feature id.
    pub fn live_scores(&self) -> Vec<(FeatureId, f64)> {
        self.candidates
            .iter()
            .filter(|c| !c.selected)
            .map(|c| (c.feature, c.score))
            .collect()
    }

    /// Maximum-score live candidate. Scores within [`TIE_TOLERANCE`] of the
    /// maximum tie, and ties go to the smallest feature id.
    pub fn best_candidate(&self) -> Result<(FeatureId, f64)> {
        let live = || self.candidates.iter().filter(|c| !c.selected);
        let max = live().map(|c| c.score).fold(f64::NEG_INFINITY, f64::max);
        live()
            .find(|c| c.score >= max - TIE_TOLERANCE)
            .map(|c| (c.feature, c.score))
            .ok_or(Error::NoCandidates)
    }

    /// Removes `feature` from the live set and returns its frozen score.
    pub fn mark_selected(&mut self, feature: FeatureId) -> Result<f64> {
        let pos = *self.positions.get(&feature).ok_or(Error::FeatureNotFound(feature))?;
        let c = &mut self.candidates[pos];
        if c.selected {
            return Err(Error::InvalidParameter(format!("feature {feature} already selected")));
        }
        c.selected = true;
        Ok(c.score)
    }

    /// Folds in the MI/CMI of the newly selected feature against every
    /// live candidate and rescores them.
    pub fn update(&mut self, red: &BTreeMap<FeatureId, MiCmiPair>) -> Result<()> {
        if self.live_count() == 0 {
            return Err(Error::NoCandidates);
        }
        if let Some(c) = self
            .candidates
            .iter()
            .find(|c| !c.selected && !red.contains_key(&c.feature))
        {
            return Err(Error::MissingCandidate(c.feature));
        }
        self.nselected += 1;
        let (kind, beta, s) = (self.kind, self.beta, self.nselected as f64);
        for c in self.candidates.iter_mut().filter(|c| !c.selected) {
            let pair = red[&c.feature];
            let diff = pair.mi - pair.cmi;
            c.red_sum += pair.mi;
            c.cond_sum += pair.cmi;
            c.max_term = c.max_term.max(diff);
            c.icap_sum += diff.max(0.0);
            c.score = match kind {
                CriterionKind::Mim => c.relevance,
                CriterionKind::Mifs => c.relevance - beta * c.red_sum,
                CriterionKind::Jmi => c.relevance - c.red_sum / s + c.cond_sum / s,
                CriterionKind::Cmi => c.relevance - c.red_sum + c.cond_sum,
                CriterionKind::Mrmr => c.relevance - c.red_sum / s,
                CriterionKind::Cmim | CriterionKind::If => c.relevance - c.max_term,
                CriterionKind::Icap => c.relevance - c.icap_sum,
            };
        }
        Ok(())
    }
}
