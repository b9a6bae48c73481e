//! Boosting loops: the OS strategy for a fixed edge-over-random condition,
//! AdaBoost.MM with both step rules, and binary AdaBoost over mislabel
//! triples.

mod binary;
mod mm;
mod os;

pub use binary::{adaboost_binary, transform_mislabel, BinaryExhaustive, BinaryLearner, BinaryRun, MislabelDataset};
pub use mm::{adaboost_mm, drop_factor_exact, edge_minimal, StepRule};
pub use os::os_boost_fixed;

use ndarray::Array2;
use thiserror::Error;

use crate::conditions::ConditionError;
use crate::domain::{training_error, ScoringFunction};
use crate::potentials::PotentialError;

/// Weight given to a round whose classifier separates the training set.
pub const ALPHA_MAX: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoostError {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error("drop factor inputs out of range: A+ = {a_plus}, A- = {a_minus}, Z = {z_prev}, delta = {delta}")]
    DropFactorDomain { a_plus: f64, a_minus: f64, z_prev: f64, delta: f64 },
    #[error("state matrix is {found:?}, expected {expected:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
}

/// One boosting round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round number.
    pub t: usize,
    /// Index of the classifier in a finite space, if the learner has one.
    pub index: Option<usize>,
    pub cost_digest: u64,
    pub edge: f64,
    pub alpha: f64,
    /// Total loss after the round: `Z_t` for AdaBoost.MM, average potential
    /// for OS, normalized exponential risk for binary AdaBoost.
    pub loss: f64,
    /// `ln` of the loss, finite even when `loss` underflows.
    pub log_loss: f64,
    /// Loss after the round divided by loss before it.
    pub drop: f64,
    /// `(A_+ + A_−) / Z_{t−1}` (AdaBoost.MM only).
    pub c: f64,
    /// `A_+ / Z_{t−1}` and `A_− / Z_{t−1}` (AdaBoost.MM only).
    pub a_plus: f64,
    pub a_minus: f64,
    /// Learner failed the condition this round (non-positive edge).
    pub flagged: bool,
    /// The weight was capped at [`ALPHA_MAX`].
    pub clamped: bool,
    pub train_error: f64,
}

/// A complete run.
#[derive(Debug, Clone)]
pub struct BoostRun {
    pub rounds: Vec<RoundRecord>,
    pub scoring: ScoringFunction,
    /// `f_T` on the training set.
    pub scores: Array2<f64>,
    pub labels: Vec<usize>,
    /// Loss before the first round.
    pub initial_loss: f64,
    /// Stopped early because a classifier was perfect on the training set.
    pub separated: bool,
}

impl BoostRun {
    pub fn training_error(&self) -> f64 {
        training_error(&self.scores, &self.labels)
    }

    /// `(k − 1) Π_t g_t` where `g_t = √(1 − δ_t²)` for ordinary rounds, 1 for
    /// zero-weight rounds and the actual drop for clamped rounds.
    pub fn error_bound(&self, upto: usize) -> f64 {
        let k = self.scores.ncols() as f64;
        self.rounds[..upto].iter().fold(k - 1.0, |acc, r| acc * round_factor_bound(r))
    }
}

/// The per-round factor used by [`BoostRun::error_bound`].
pub fn round_factor_bound(r: &RoundRecord) -> f64 {
    if r.clamped {
        r.drop
    } else if r.alpha == 0.0 {
        1.0
    } else {
        (1.0 - r.edge * r.edge).max(0.0).sqrt()
    }
}

/// FNV-1a hash of the matrix entries' bit patterns.
pub fn digest(c: &Array2<f64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for v in c.iter() {
        for byte in v.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}
