//! Domain types shared by every module: datasets, weak classifiers, cost
//! matrices, baselines, vote states and scoring functions.
//!
//! Labels are 0-based class indices `0..k`. Formulas are always indexed by
//! the example's own label `y_i`; columns are never permuted.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weaklearners::TreeNode;

/// Absolute tolerance used when validating structural invariants of
/// floating-point matrices.
pub const STRUCT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("dataset must contain at least one example")]
    Empty,
    #[error("need at least two classes, got k = {0}")]
    TooFewClasses(usize),
    #[error("label {label} of example {index} is outside 0..{k}")]
    LabelOutOfRange { index: usize, label: usize, k: usize },
    #[error("example {index} has {found} features, expected {expected}")]
    Arity { index: usize, found: usize, expected: usize },
    #[error("feature {column} of example {index} does not match the column kind")]
    FeatureKind { index: usize, column: usize },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("row {row} violates the {family:?} cost family")]
    CostFamily { row: usize, family: Family },
}

/// A single feature value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Feature {
    Num(f64),
    Cat(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

impl Feature {
    pub fn kind(&self) -> ColumnKind {
        match self {
            Feature::Num(_) => ColumnKind::Numeric,
            Feature::Cat(_) => ColumnKind::Categorical,
        }
    }
}

/// A labeled training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Vec<Feature>>,
    labels: Vec<usize>,
    kinds: Vec<ColumnKind>,
    k: usize,
}

impl Dataset {
    /// Builds a dataset, checking arity, column kinds and label range.
    pub fn new(rows: Vec<Vec<Feature>>, labels: Vec<usize>, k: usize) -> Result<Self, DomainError> {
        if labels.is_empty() {
            return Err(DomainError::Empty);
        }
        if k < 2 {
            return Err(DomainError::TooFewClasses(k));
        }
        if rows.len() != labels.len() {
            return Err(DomainError::Shape {
                expected: (labels.len(), 0),
                found: (rows.len(), 0),
            });
        }
        for (index, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(DomainError::LabelOutOfRange { index, label, k });
            }
        }
        let kinds: Vec<ColumnKind> = rows[0].iter().map(Feature::kind).collect();
        for (index, row) in rows.iter().enumerate() {
            if row.len() != kinds.len() {
                return Err(DomainError::Arity {
                    index,
                    found: row.len(),
                    expected: kinds.len(),
                });
            }
            for (column, f) in row.iter().enumerate() {
                if f.kind() != kinds[column] {
                    return Err(DomainError::FeatureKind { index, column });
                }
            }
        }
        Ok(Dataset { rows, labels, kinds, k })
    }

    /// A dataset whose only feature is the example index, for fixtures
    /// where classifiers are given as prediction tables.
    pub fn indexed(labels: Vec<usize>, k: usize) -> Result<Self, DomainError> {
        let rows = (0..labels.len()).map(|i| vec![Feature::Num(i as f64)]).collect();
        Dataset::new(rows, labels, k)
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<Feature>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Feature] {
        &self.rows[i]
    }

    pub fn kinds(&self) -> &[ColumnKind] {
        &self.kinds
    }

    /// Restricts the dataset to the given example indices (in order).
    pub fn subset(&self, indices: &[usize]) -> Result<Self, DomainError> {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Dataset::new(rows, labels, self.k)
    }
}

/// A weak classifier `h : X -> {0..k-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeakClassifier {
    /// Predictions listed per example index of the dataset it was built for.
    Table(Vec<usize>),
    Constant(usize),
    Tree(TreeNode),
}

impl WeakClassifier {
    pub fn predict(&self, d: &Dataset, i: usize) -> usize {
        match self {
            WeakClassifier::Table(t) => t[i],
            WeakClassifier::Constant(l) => *l,
            WeakClassifier::Tree(tree) => tree.predict(d.row(i)),
        }
    }

    pub fn predictions(&self, d: &Dataset) -> Vec<usize> {
        (0..d.m()).map(|i| self.predict(d, i)).collect()
    }
}

/// The m×k indicator matrix `1_h` with entry 1 at `(i, h(i))`.
pub fn indicator(predictions: &[usize], k: usize) -> Array2<f64> {
    let mut out = Array2::zeros((predictions.len(), k));
    for (i, &p) in predictions.iter().enumerate() {
        out[(i, p)] = 1.0;
    }
    out
}

/// Cost-matrix families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Eor,
    Sam,
    M1,
    Mh,
    Mr,
    Unconstrained,
}

impl Family {
    /// Whether a single row with true label `y` belongs to the family.
    pub fn admits_row(&self, row: ArrayView1<f64>, y: usize) -> bool {
        let scale = row.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let tol = STRUCT_TOL * scale;
        let cy = row[y];
        let others = row.iter().enumerate().filter(|&(l, _)| l != y).map(|(_, &v)| v);
        match self {
            Family::Unconstrained => true,
            Family::Eor => row.iter().all(|&v| cy <= v + tol),
            Family::Sam => {
                let first = row[if y == 0 { 1 } else { 0 }];
                cy.abs() <= tol && first >= -tol && others.clone().all(|v| (v - first).abs() <= tol)
            }
            Family::M1 => {
                let d = -cy;
                d >= -tol && others.clone().all(|v| (v - d).abs() <= tol)
            }
            Family::Mh => cy <= tol && others.clone().all(|v| v >= -tol),
            Family::Mr => others.clone().all(|v| v >= -tol) && row.sum().abs() <= tol,
        }
    }
}

/// An m×k matrix of misclassification costs tagged with its family.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    entries: Array2<f64>,
    family: Family,
}

impl CostMatrix {
    /// Builds a cost matrix after checking every row against `family`.
    pub fn new(entries: Array2<f64>, family: Family, labels: &[usize]) -> Result<Self, DomainError> {
        if entries.nrows() != labels.len() {
            return Err(DomainError::Shape {
                expected: (labels.len(), entries.ncols()),
                found: entries.dim(),
            });
        }
        for (row, &y) in labels.iter().enumerate() {
            if !family.admits_row(entries.row(row), y) {
                return Err(DomainError::CostFamily { row, family });
            }
        }
        Ok(CostMatrix { entries, family })
    }

    pub fn unconstrained(entries: Array2<f64>) -> Self {
        CostMatrix { entries, family: Family::Unconstrained }
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `C • 1_h`.
    pub fn cost_of(&self, predictions: &[usize]) -> f64 {
        predictions.iter().enumerate().map(|(i, &p)| self.entries[(i, p)]).sum()
    }

    /// Frobenius inner product with another matrix.
    pub fn dot(&self, other: &Array2<f64>) -> f64 {
        (&self.entries * other).sum()
    }
}

/// The kind of a baseline together with its edge parameter γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BaselineKind {
    Eor(f64),
    Uniform(f64),
    M1(f64),
    Mh(f64),
    Mr(f64),
}

impl BaselineKind {
    pub fn gamma(&self) -> f64 {
        match *self {
            BaselineKind::Eor(g)
            | BaselineKind::Uniform(g)
            | BaselineKind::M1(g)
            | BaselineKind::Mh(g)
            | BaselineKind::Mr(g) => g,
        }
    }
}

/// The m×k baseline matrix B of a condition (C, B).
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    entries: Array2<f64>,
    kind: BaselineKind,
}

impl Baseline {
    fn fill(labels: &[usize], k: usize, kind: BaselineKind, on: f64, off: f64) -> Self {
        let mut entries = Array2::from_elem((labels.len(), k), off);
        for (i, &y) in labels.iter().enumerate() {
            entries[(i, y)] = on;
        }
        Baseline { entries, kind }
    }

    /// `U_γ`: `(1-γ)/k + γ` on the true label, `(1-γ)/k` elsewhere.
    pub fn uniform(labels: &[usize], k: usize, gamma: f64) -> Self {
        let base = (1.0 - gamma) / k as f64;
        Self::fill(labels, k, BaselineKind::Uniform(gamma), base + gamma, base)
    }

    pub fn m1(labels: &[usize], k: usize, gamma: f64) -> Self {
        Self::fill(labels, k, BaselineKind::M1(gamma), gamma, 0.0)
    }

    pub fn mh(labels: &[usize], k: usize, gamma: f64) -> Self {
        Self::fill(labels, k, BaselineKind::Mh(gamma), 0.5 + gamma / 2.0, 0.5 - gamma / 2.0)
    }

    pub fn mr(labels: &[usize], k: usize, gamma: f64) -> Self {
        Self::fill(labels, k, BaselineKind::Mr(gamma), gamma / 2.0, -gamma / 2.0)
    }

    /// Wraps an explicit matrix; callers are responsible for validating it.
    pub fn from_entries(entries: Array2<f64>, kind: BaselineKind) -> Self {
        Baseline { entries, kind }
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.kind.gamma()
    }
}

/// Per-example vote counts `s_t(i)` and the weighted counterpart `f_t(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    pub votes: Array2<u32>,
    pub weighted: Array2<f64>,
    pub t: usize,
}

impl StateMatrix {
    pub fn new(m: usize, k: usize) -> Self {
        StateMatrix {
            votes: Array2::zeros((m, k)),
            weighted: Array2::zeros((m, k)),
            t: 0,
        }
    }

    /// Records one round: classifier predictions with weight `alpha`.
    pub fn record(&mut self, predictions: &[usize], alpha: f64) {
        for (i, &p) in predictions.iter().enumerate() {
            self.votes[(i, p)] += 1;
            self.weighted[(i, p)] += alpha;
        }
        self.t += 1;
    }

    /// Vote vector of example `i` as signed integers.
    pub fn votes_of(&self, i: usize) -> Vec<i64> {
        self.votes.row(i).iter().map(|&v| v as i64).collect()
    }
}

/// `F(x, l) = Σ α_t 1[h_t(x) = l]`, kept as its list of weighted terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoringFunction {
    pub k: usize,
    pub terms: Vec<(WeakClassifier, f64)>,
}

impl ScoringFunction {
    pub fn new(k: usize) -> Self {
        ScoringFunction { k, terms: Vec::new() }
    }

    pub fn push(&mut self, h: WeakClassifier, alpha: f64) {
        self.terms.push((h, alpha));
    }

    /// The m×k score matrix on a dataset.
    pub fn scores(&self, d: &Dataset) -> Array2<f64> {
        let mut out = Array2::zeros((d.m(), self.k));
        for (h, alpha) in &self.terms {
            for i in 0..d.m() {
                out[(i, h.predict(d, i))] += alpha;
            }
        }
        out
    }

    pub fn predict(&self, d: &Dataset) -> Vec<usize> {
        let s = self.scores(d);
        s.rows().into_iter().map(plurality_predict).collect()
    }

    pub fn training_error(&self, d: &Dataset) -> f64 {
        training_error(&self.scores(d), d.labels())
    }

    pub fn exp_risk(&self, d: &Dataset) -> f64 {
        exp_risk(&self.scores(d), d.labels())
    }
}

/// `argmax_l F(x, l)`, ties broken towards the lowest label.
pub fn plurality_predict(scores: ArrayView1<f64>) -> usize {
    let mut best = 0;
    for l in 1..scores.len() {
        if scores[l] > scores[best] {
            best = l;
        }
    }
    best
}

/// Whether example `i` counts as an error: `F(y) <= max_{l≠y} F(l)`.
pub fn is_error(scores: ArrayView1<f64>, y: usize) -> bool {
    scores.iter().enumerate().any(|(l, &v)| l != y && v >= scores[y])
}

/// Fraction of examples whose true-label score does not strictly beat
/// every other label's score.
pub fn training_error(scores: &Array2<f64>, labels: &[usize]) -> f64 {
    let wrong = labels
        .iter()
        .enumerate()
        .filter(|&(i, &y)| is_error(scores.row(i), y))
        .count();
    wrong as f64 / labels.len() as f64
}

/// `Σ_{l≠y} exp(F(l) − F(y))` for one example, shifted by the largest
/// exponent when it exceeds 700.
pub fn example_exp_loss(scores: ArrayView1<f64>, y: usize) -> f64 {
    let exps: Vec<f64> = scores
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != y)
        .map(|(_, &v)| v - scores[y])
        .collect();
    let top = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top.abs() > 700.0 {
        let shifted: f64 = exps.iter().map(|e| (e - top).exp()).sum();
        (top + shifted.ln()).exp()
    } else {
        exps.iter().map(|e| e.exp()).sum()
    }
}

/// `(1/m) Σ_i Σ_{l≠y_i} exp(F(x_i, l) − F(x_i, y_i))`.
pub fn exp_risk(scores: &Array2<f64>, labels: &[usize]) -> f64 {
    let total: f64 = labels
        .iter()
        .enumerate()
        .map(|(i, &y)| example_exp_loss(scores.row(i), y))
        .sum();
    total / labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn plurality_ties_go_to_lowest_label() {
        assert_eq!(plurality_predict(array![0.0, 0.0, 0.0].view()), 0);
        assert_eq!(plurality_predict(array![0.2, 0.9, 0.1].view()), 1);
    }

    #[test]
    fn two_constant_classifiers_tie() {
        let d = Dataset::indexed(vec![0, 1], 3).unwrap();
        let mut f = ScoringFunction::new(3);
        f.push(WeakClassifier::Constant(0), 1.0);
        f.push(WeakClassifier::Constant(1), 1.0);
        assert_eq!(f.predict(&d), vec![0, 0]);
        assert_eq!(f.training_error(&d), 1.0);
    }

    #[test]
    fn training_error_counts_ties() {
        let labels = [0, 1];
        assert_eq!(training_error(&Array2::zeros((2, 3)), &labels), 1.0);
        let sep = array![[1.0, 0.0, 0.0], [0.0, 2.0, 1.0]];
        assert_eq!(training_error(&sep, &labels), 0.0);
    }

    #[test]
    fn exp_risk_examples() {
        assert_eq!(exp_risk(&Array2::zeros((2, 3)), &[0, 1]), 2.0);
        let one = array![[1.0, 0.0]];
        assert!((exp_risk(&one, &[0]) - (-1.0f64).exp()).abs() < 1e-15);
        let f = array![[0.0, 1.0, 2.0]];
        let want = 1.0f64.exp() + 2.0f64.exp();
        assert!((exp_risk(&f, &[0]) - want).abs() < 1e-12);
    }

    #[test]
    fn exp_risk_survives_large_exponents() {
        let f = array![[0.0, 705.0, 705.0]];
        let got = exp_risk(&f, &[0]);
        let want = (705.0 + 2.0f64.ln()).exp();
        assert!(got.is_finite());
        assert!((got / want - 1.0).abs() < 1e-12);
        let g = array![[0.0, -800.0, -800.0]];
        assert_eq!(exp_risk(&g, &[0]), 0.0);
    }

    #[test]
    fn dataset_rejects_bad_input() {
        assert_eq!(Dataset::indexed(vec![], 2), Err(DomainError::Empty));
        assert_eq!(Dataset::indexed(vec![0], 1), Err(DomainError::TooFewClasses(1)));
        assert!(matches!(
            Dataset::indexed(vec![0, 3], 3),
            Err(DomainError::LabelOutOfRange { index: 1, .. })
        ));
        let rows = vec![vec![Feature::Num(0.0)], vec![Feature::Cat(1)]];
        assert!(matches!(
            Dataset::new(rows, vec![0, 1], 2),
            Err(DomainError::FeatureKind { index: 1, column: 0 })
        ));
    }

    #[test]
    fn cost_families_are_checked() {
        let labels = [0, 1];
        let c = array![[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0]];
        assert!(CostMatrix::new(c.clone(), Family::Eor, &labels).is_ok());
        assert!(CostMatrix::new(c.clone(), Family::Mh, &labels).is_ok());
        assert!(CostMatrix::new(c.clone(), Family::Mr, &labels).is_ok());
        let unbalanced = array![[-1.0, 2.0, 0.0], [1.0, -1.0, 0.0]];
        assert!(CostMatrix::new(unbalanced, Family::Mr, &labels).is_err());
        let sam = array![[0.0, 2.0, 2.0], [3.0, 0.0, 3.0]];
        assert!(CostMatrix::new(sam, Family::Sam, &labels).is_ok());
        let m1 = array![[-2.0, 2.0, 2.0], [1.0, -1.0, 1.0]];
        assert!(CostMatrix::new(m1.clone(), Family::M1, &labels).is_ok());
        assert!(CostMatrix::new(m1, Family::Sam, &labels).is_err());
        let mr = array![[-3.0, 1.0, 2.0], [0.5, -0.5, 0.0]];
        assert!(CostMatrix::new(mr, Family::Mr, &labels).is_ok());
    }

    #[test]
    fn baselines_match_their_definitions() {
        let labels = [0, 2];
        let u = Baseline::uniform(&labels, 3, 0.1);
        assert!((u.entries()[(0, 0)] - (0.3 + 0.1)).abs() < 1e-15);
        assert!((u.entries()[(1, 0)] - 0.3).abs() < 1e-15);
        let m1 = Baseline::m1(&labels, 3, 0.1);
        assert_eq!(m1.entries()[(1, 2)], 0.1);
        assert_eq!(m1.entries()[(1, 1)], 0.0);
        assert!(Baseline::mh(&labels, 3, 0.0).entries().iter().all(|&v| v == 0.5));
        let mr = Baseline::mr(&labels, 3, 0.2);
        assert_eq!(mr.entries()[(0, 0)], 0.1);
        assert_eq!(mr.entries()[(0, 2)], -0.1);
    }

    #[test]
    fn state_rows_sum_to_round_count() {
        let mut s = StateMatrix::new(3, 4);
        s.record(&[0, 1, 2], 0.5);
        s.record(&[3, 1, 0], 0.25);
        for i in 0..3 {
            assert_eq!(s.votes.row(i).sum(), 2);
        }
        assert_eq!(s.weighted[(1, 1)], 0.75);
    }
}
