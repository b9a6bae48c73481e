//! Weak learners queried by the boosters: exhaustive best response over a
//! finite space, and size-capped greedy decision trees.

mod tree;

pub use tree::{greedy_tree, stump, SplitCriterion, SplitTest, TreeNode};

use ndarray::Array2;

use crate::domain::{Dataset, WeakClassifier};

/// Two costs count as tied when they differ by at most this fraction of
/// the cost matrix's ℓ1 norm.
pub const TIE_TOL: f64 = 1e-9;

/// What a learner hands back to a booster.
#[derive(Debug, Clone, PartialEq)]
pub struct Learned {
    pub classifier: WeakClassifier,
    pub predictions: Vec<usize>,
    /// Position in the learner's finite space, when it has one.
    pub index: Option<usize>,
}

/// A weak learning algorithm: given a cost matrix, return a classifier.
pub trait WeakLearner {
    fn learn(&mut self, cost: &Array2<f64>) -> Learned;
}

/// `Σ_i C(i, h(i))`.
pub fn cost_of(cost: &Array2<f64>, predictions: &[usize]) -> f64 {
    predictions.iter().enumerate().map(|(i, &p)| cost[(i, p)]).sum()
}

/// Index of the cheapest classifier in `space`; ties go to the lowest index.
///
/// # Panics
/// If `space` is empty.
pub fn best_response(space: &[Vec<usize>], cost: &Array2<f64>) -> usize {
    assert!(!space.is_empty(), "best_response needs a non-empty space");
    let costs: Vec<f64> = space.iter().map(|h| cost_of(cost, h)).collect();
    let min = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale: f64 = cost.iter().map(|v| v.abs()).sum();
    let slack = TIE_TOL * scale.max(f64::MIN_POSITIVE);
    costs.iter().position(|&c| c <= min + slack).unwrap_or(0)
}

/// Best response over an explicit finite space of prediction tables.
#[derive(Debug, Clone)]
pub struct Exhaustive {
    space: Vec<Vec<usize>>,
}

impl Exhaustive {
    pub fn new(space: Vec<Vec<usize>>) -> Self {
        Exhaustive { space }
    }

    pub fn space(&self) -> &[Vec<usize>] {
        &self.space
    }
}

impl WeakLearner for Exhaustive {
    fn learn(&mut self, cost: &Array2<f64>) -> Learned {
        let index = best_response(&self.space, cost);
        let predictions = self.space[index].clone();
        Learned {
            classifier: WeakClassifier::Table(predictions.clone()),
            predictions,
            index: Some(index),
        }
    }
}

/// Greedy tree learner over a dataset's features.
#[derive(Debug, Clone)]
pub struct TreeLearner<'a> {
    data: &'a Dataset,
    max_size: usize,
    criterion: SplitCriterion,
}

impl<'a> TreeLearner<'a> {
    pub fn new(data: &'a Dataset, max_size: usize, criterion: SplitCriterion) -> Self {
        TreeLearner { data, max_size, criterion }
    }

    pub fn stump(data: &'a Dataset) -> Self {
        Self::new(data, 3, SplitCriterion::Cost)
    }
}

impl WeakLearner for TreeLearner<'_> {
    fn learn(&mut self, cost: &Array2<f64>) -> Learned {
        let tree = greedy_tree(self.data, cost, self.max_size, self.criterion);
        let predictions = self.data.rows().iter().map(|r| tree.predict(r)).collect();
        Learned { classifier: WeakClassifier::Tree(tree), predictions, index: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_cost_picks_first() {
        let space = vec![vec![1, 1], vec![0, 0]];
        assert_eq!(best_response(&space, &Array2::zeros((2, 3))), 0);
    }

    #[test]
    fn tied_constant_classifiers() {
        let space = vec![vec![0, 0], vec![1, 1]];
        let c = array![[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0]];
        assert_eq!(best_response(&space, &c), 0);
    }

    #[test]
    fn true_label_classifier_wins_under_eor_costs() {
        let labels = vec![2, 0, 1];
        let space = vec![vec![0, 0, 0], vec![1, 2, 0], labels.clone(), vec![2, 2, 2]];
        let c = array![[0.5, 0.7, 0.1], [-1.0, 0.0, 3.0], [0.2, 0.2, 0.2]];
        assert_eq!(best_response(&space, &c), 2);
    }

    #[test]
    fn exhaustive_learner_reports_index() {
        let mut learner = Exhaustive::new(vec![vec![0, 0], vec![1, 0]]);
        let c = array![[1.0, 0.0], [0.0, 1.0]];
        let got = learner.learn(&c);
        assert_eq!(got.index, Some(1));
        assert_eq!(got.predictions, vec![1, 0]);
    }
}
