//! Information-theoretic filter feature selection.
//!
//! Data flows row-major [`RowDataset`] (or [`SparseDataset`]) →
//! [`columnar_transform`] → [`ColumnStore`] → [`select`], which runs a greedy
//! relevance/redundancy search under one of eight criteria. All heavy
//! phases execute on an [`Engine`], an in-process partitioned runtime whose
//! results do not depend on worker or partition counts. [`oracle`] holds a
//! sequential brute-force reference used for verification.

pub mod cli;
pub mod columnar;
pub mod criteria;
pub mod engine;
pub mod error;
pub mod infotheory;
pub mod oracle;
pub mod selector;
pub mod types;

pub use columnar::{columnar_transform, sparse_columnar_transform, ColumnStore, Layout};
pub use criteria::{init_criteria, CriterionAccumulator, CriterionKind};
pub use engine::{Engine, PartitionedCollection};
pub use error::{Error, Result};
pub use infotheory::{compute_mutual_info, entropy, get_histograms, sparse_histograms, LogBase, MiCmiPair};
pub use selector::{compute_redundancies, compute_relevances, select, SelectConfig, SelectionReport};
pub use types::{
    BroadcastColumn, ContingencyCube, FeatureBlock, FeatureId, ProportionCache, RowDataset, SelectedFeature,
    SelectionResult, SparseDataset, SparseFeatureVector, SparseRow, Value,
};
