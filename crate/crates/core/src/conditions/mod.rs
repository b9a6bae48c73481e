//! Weak-learning conditions as (cost family, baseline) pairs, edges, the
//! zero-sum games behind them, and the counterexample fixtures.

mod fixtures;
mod game;

pub use fixtures::{figure1_fixture, mh_overdemand_fixture, window_fixture, window_fixture_with, WrongLabelRule};
pub use game::{is_boostable, margin, solve_game, Boostability, GameValueReport, Verdict};

use ndarray::Array2;
use thiserror::Error;

use crate::domain::{indicator, Baseline, BaselineKind, CostMatrix, Dataset, DomainError, Family, STRUCT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConditionError {
    #[error("gamma must lie in [0, 1), got {0}")]
    Gamma(f64),
    #[error("the EOR-fixed condition needs an explicit baseline")]
    MissingBaseline,
    #[error("baseline row {row} is not an edge-over-random distribution")]
    BaselineRow { row: usize },
    #[error("baseline has shape {found:?}, expected {expected:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("classifier space is empty")]
    EmptySpace,
    #[error("classifier {index} does not predict a label in 0..k on every example")]
    BadClassifier { index: usize },
    #[error("window fixture needs m * gamma' > 1, got m = {m}, gamma' = {gamma_prime}")]
    WindowTooShort { m: usize, gamma_prime: f64 },
    #[error("(1/k + gamma) * m = {0} is not an integer")]
    NonIntegralSubset(f64),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionName {
    Samme,
    M1,
    Mh,
    Mr,
    EorFixed,
    Minimal,
}

/// A weak-learning condition (C, B) on a fixed training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: ConditionName,
    pub family: Family,
    /// `None` for the minimal condition, which ranges over all of `B^eor_γ`.
    pub baseline: Option<Baseline>,
    pub gamma: f64,
    pub labels: Vec<usize>,
    pub k: usize,
}

/// Checks that every row of `b` lies in `Δ_γ^k` around its true label.
pub fn validate_eor_baseline(b: &Array2<f64>, labels: &[usize], gamma: f64) -> Result<(), ConditionError> {
    for (row, &y) in labels.iter().enumerate() {
        let r = b.row(row);
        let best_wrong = r.iter().enumerate().filter(|&(l, _)| l != y).map(|(_, &v)| v).fold(f64::NEG_INFINITY, f64::max);
        let ok = r.iter().all(|&v| v >= -STRUCT_TOL)
            && (r.sum() - 1.0).abs() <= STRUCT_TOL
            && (r[y] - gamma - best_wrong).abs() <= STRUCT_TOL;
        if !ok {
            return Err(ConditionError::BaselineRow { row });
        }
    }
    Ok(())
}

/// Builds a named condition with its standard baseline. For SAMME the caller
/// passes the already mapped edge `γ = (1 − 1/k) γ'`.
pub fn make_condition(name: ConditionName, gamma: f64, d: &Dataset, b: Option<Baseline>) -> Result<Condition, ConditionError> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(ConditionError::Gamma(gamma));
    }
    let (labels, k) = (d.labels(), d.k());
    let (family, baseline) = match name {
        ConditionName::Samme => (Family::Sam, Some(Baseline::uniform(labels, k, gamma))),
        ConditionName::M1 => (Family::M1, Some(Baseline::m1(labels, k, gamma))),
        ConditionName::Mh => (Family::Mh, Some(Baseline::mh(labels, k, gamma))),
        ConditionName::Mr => (Family::Mr, Some(Baseline::mr(labels, k, gamma))),
        ConditionName::EorFixed => {
            let b = b.ok_or(ConditionError::MissingBaseline)?;
            if b.entries().dim() != (d.m(), k) {
                return Err(ConditionError::Shape { expected: (d.m(), k), found: b.entries().dim() });
            }
            validate_eor_baseline(b.entries(), labels, gamma)?;
            let b = Baseline::from_entries(b.entries().clone(), BaselineKind::Eor(gamma));
            (Family::Eor, Some(b))
        }
        ConditionName::Minimal => (Family::Eor, None),
    };
    Ok(Condition { name, family, baseline, gamma, labels: labels.to_vec(), k })
}

/// `C • B − C • 1_h`: non-negative exactly when `h` meets the constraint
/// that `C` imposes.
pub fn edge(cost: &CostMatrix, predictions: &[usize], b: &Baseline) -> f64 {
    let k = cost.entries().ncols();
    cost.dot(b.entries()) - cost.dot(&indicator(predictions, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn two_examples() -> Dataset {
        Dataset::indexed(vec![0, 1], 3).unwrap()
    }

    #[test]
    fn m1_baseline_entries() {
        let c = make_condition(ConditionName::M1, 0.1, &two_examples(), None).unwrap();
        let b = c.baseline.unwrap();
        assert_eq!(b.entries(), &array![[0.1, 0.0, 0.0], [0.0, 0.1, 0.0]]);
    }

    #[test]
    fn mh_at_zero_gamma_is_one_half() {
        let c = make_condition(ConditionName::Mh, 0.0, &two_examples(), None).unwrap();
        assert!(c.baseline.unwrap().entries().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn eor_fixed_baseline_validation() {
        let d = Dataset::indexed(vec![0], 3).unwrap();
        let good = Baseline::from_entries(array![[7.0 / 15.0, 4.0 / 15.0, 4.0 / 15.0]], BaselineKind::Eor(0.2));
        assert!(make_condition(ConditionName::EorFixed, 0.2, &d, Some(good)).is_ok());
        // 0.5 − max(0.3, 0.2) = 0.2, so this row is edge-over-random
        let edge_row = Baseline::from_entries(array![[0.5, 0.3, 0.2]], BaselineKind::Eor(0.2));
        assert!(make_condition(ConditionName::EorFixed, 0.2, &d, Some(edge_row)).is_ok());
        let bad = Baseline::from_entries(array![[0.5, 0.35, 0.15]], BaselineKind::Eor(0.2));
        assert_eq!(
            make_condition(ConditionName::EorFixed, 0.2, &d, Some(bad)),
            Err(ConditionError::BaselineRow { row: 0 })
        );
        assert_eq!(make_condition(ConditionName::EorFixed, 0.2, &d, None), Err(ConditionError::MissingBaseline));
    }

    #[test]
    fn gamma_must_be_below_one() {
        assert_eq!(make_condition(ConditionName::Mr, 1.0, &two_examples(), None), Err(ConditionError::Gamma(1.0)));
    }

    #[test]
    fn figure_one_edges_are_negative() {
        let labels = [0, 1];
        let c = CostMatrix::new(array![[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0]], Family::Eor, &labels).unwrap();
        let u = Baseline::uniform(&labels, 3, 0.1);
        for h in [[0, 0], [1, 1]] {
            assert!((edge(&c, &h, &u) + 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_cost_gives_zero_edge() {
        let labels = [0, 1, 2];
        let c = CostMatrix::unconstrained(Array2::zeros((3, 3)));
        let u = Baseline::uniform(&labels, 3, 0.3);
        assert_eq!(edge(&c, &[2, 2, 0], &u), 0.0);
    }
}
