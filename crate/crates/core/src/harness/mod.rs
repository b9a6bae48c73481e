//! Experiment plumbing: CSV ingestion, training runs, potential tables,
//! degree maps and fixture reports, all written as TSV.

pub mod data;
pub mod emit;
pub mod equivalence;
pub mod experiment;
pub mod fixtures;
pub mod tsv;

pub use data::{load_csv, load_split_files, random_split, Loaded, Schema};
pub use emit::{emit_degree_map, emit_potential_table};
pub use equivalence::{compare_runs, emit_equivalence, random_instance, run_equivalence, EquivalenceReport};
pub use experiment::{
    check_invariants, evaluate, run_experiment, Algo, DataSource, EvalReport, ExperimentConfig, ExperimentSummary,
    LearnerKind, LossKind, Model,
};
pub use fixtures::{emit_fixture, FixtureKind, FixtureParams};

use thiserror::Error;

use crate::boosters::BoostError;
use crate::conditions::ConditionError;
use crate::domain::DomainError;
use crate::potentials::PotentialError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: line {line}: {message}")]
    Csv { path: String, line: u64, message: String },
    #[error("label column {name:?} not found; columns are {available:?}")]
    MissingLabelColumn { name: String, available: Vec<String> },
    #[error("only one class ({0:?}) present; need at least two")]
    SingleClass(String),
    #[error("no data rows")]
    EmptyData,
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("round {t}: invariant violated: {what}")]
    Invariant { t: usize, what: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Boost(#[from] BoostError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
}
