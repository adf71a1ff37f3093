use thiserror::Error;

use crate::types::FeatureId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dataset is empty: {0}")]
    EmptyDataset(&'static str),

    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("class index {index} out of range for {ncols} columns")]
    ClassIndexOutOfRange { index: usize, ncols: usize },

    #[error("partition count must be at least 1")]
    InvalidPartitionCount,

    #[error("instance index {instance} out of range (m = {m})")]
    InstanceOutOfRange { instance: usize, m: usize },

    #[error("feature index {feature} out of range (n = {n})")]
    FeatureOutOfRange { feature: usize, n: usize },

    #[error("duplicate entry for instance {instance} feature {feature}")]
    DuplicateEntry { instance: usize, feature: FeatureId },

    #[error("instances in sparse row are not strictly increasing at feature {feature}")]
    UnsortedEntries { feature: FeatureId },

    #[error("class vector has length {found}, expected {expected}")]
    ClassLength { expected: usize, found: usize },

    #[error("cube shape mismatch for feature {feature}: {left:?} vs {right:?}")]
    ShapeMismatch {
        feature: FeatureId,
        left: [usize; 3],
        right: [usize; 3],
    },

    #[error("value out of cube bounds for feature {feature}: ({y}, {i}, {j}) in {shape:?}")]
    CubeBounds {
        feature: FeatureId,
        y: usize,
        i: usize,
        j: usize,
        shape: [usize; 3],
    },

    #[error("negative leftover count while filling zero cells of feature {feature}")]
    NegativeLeftover { feature: FeatureId },

    #[error("proportion cache has no {table} table for feature {feature}")]
    CacheMissing { table: &'static str, feature: FeatureId },

    #[error("column length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("feature {0} not found in column store")]
    FeatureNotFound(FeatureId),

    #[error("unknown criterion '{0}'")]
    UnknownCriterion(String),

    #[error("parameter {param} cannot be set for criterion {criterion}")]
    FixedParameter {
        param: &'static str,
        criterion: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("redundancies are missing live candidate {0}")]
    MissingCandidate(FeatureId),

    #[error("no live candidates remain")]
    NoCandidates,

    #[error("worker pool: {0}")]
    Pool(String),
}
