//! Multiclass boosting through cost matrices.
//!
//! * [`domain`]: datasets, classifiers, cost matrices, baselines, states and
//!   scoring functions.
//! * [`conditions`]: weak-learning conditions, edges, game solving and the
//!   counterexample fixtures.
//! * [`potentials`]: drifting-game potentials for fixed edge-over-random
//!   conditions and for the minimal condition.
//! * [`boosters`]: the OS booster, AdaBoost.MM and binary AdaBoost over
//!   mislabel triples.
//! * [`weaklearners`]: exhaustive best response and greedy trees.
//! * [`harness`]: CSV loading, experiment runs and TSV artifacts.

pub mod boosters;
pub mod conditions;
pub mod domain;
pub mod harness;
pub mod potentials;
pub mod weaklearners;
