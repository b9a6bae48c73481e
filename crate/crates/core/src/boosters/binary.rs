//! The mislabel-triple reduction and binary AdaBoost on its image.
//!
//! Each example `(x_i, y_i)` becomes `k − 1` negatively labeled triples
//! `(x_i, y_i, l)`, and a multiclass classifier `h` becomes
//! `h̃(x, y, l) = 1[h(x) = l] − 1[h(x) = y] ∈ {−1, 0, 1}`.

use ndarray::Array2;

use super::{RoundRecord, ALPHA_MAX};
use crate::domain::Dataset;

/// All `(example, true label, wrong label)` triples; every binary label is −1.
#[derive(Debug, Clone, PartialEq)]
pub struct MislabelDataset {
    pub triples: Vec<(usize, usize, usize)>,
}

impl MislabelDataset {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn labels(&self) -> Vec<i8> {
        vec![-1; self.triples.len()]
    }

    /// `F̃(x, y, l) = F(x, l) − F(x, y)` for a multiclass score matrix.
    pub fn transform_scores(&self, scores: &Array2<f64>) -> Vec<f64> {
        self.triples.iter().map(|&(i, y, l)| scores[(i, l)] - scores[(i, y)]).collect()
    }

    /// `(1 / |S̃|) Σ exp(−ξ F̃)` with `ξ = −1`.
    pub fn risk(&self, margins: &[f64]) -> f64 {
        log_mean_exp(margins).exp()
    }
}

fn log_mean_exp(v: &[f64]) -> f64 {
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = v.iter().map(|x| (x - top).exp()).sum();
    top + (s / v.len() as f64).ln()
}

/// Builds the binary training set and the transformed classifier space.
pub fn transform_mislabel(d: &Dataset, space: &[Vec<usize>]) -> (MislabelDataset, Vec<Vec<i8>>) {
    let triples: Vec<(usize, usize, usize)> = d
        .labels()
        .iter()
        .enumerate()
        .flat_map(|(i, &y)| (0..d.k()).filter(move |&l| l != y).map(move |l| (i, y, l)))
        .collect();
    let transformed = space
        .iter()
        .map(|h| triples.iter().map(|&(i, y, l)| i8::from(h[i] == l) - i8::from(h[i] == y)).collect())
        .collect();
    (MislabelDataset { triples }, transformed)
}

/// A learner over `{−1, 0, 1}`-valued hypotheses on the binary set.
pub trait BinaryLearner {
    /// Returns the chosen hypothesis index and its values.
    fn learn(&mut self, weights: &[f64]) -> (usize, Vec<i8>);
}

/// Maximum-edge hypothesis from a finite space; ties go to the lowest index.
#[derive(Debug, Clone)]
pub struct BinaryExhaustive {
    space: Vec<Vec<i8>>,
}

impl BinaryExhaustive {
    pub fn new(space: Vec<Vec<i8>>) -> Self {
        BinaryExhaustive { space }
    }
}

impl BinaryLearner for BinaryExhaustive {
    fn learn(&mut self, weights: &[f64]) -> (usize, Vec<i8>) {
        // every binary label is −1, so the edge is −Σ w h̃
        let edges: Vec<f64> =
            self.space.iter().map(|h| -h.iter().zip(weights).map(|(&v, w)| v as f64 * w).sum::<f64>()).collect();
        let best = edges.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // ℓ1 norm of the multiclass cost matrix these weights stand for
        let scale = 2.0 * weights.iter().map(|w| w.abs()).sum::<f64>();
        let slack = crate::weaklearners::TIE_TOL * scale;
        let index = edges.iter().position(|&e| e >= best - slack).unwrap_or(0);
        (index, self.space[index].clone())
    }
}

#[derive(Debug, Clone)]
pub struct BinaryRun {
    pub rounds: Vec<RoundRecord>,
    /// Final `F̃` on every triple.
    pub margins: Vec<f64>,
    pub separated: bool,
}

/// Confidence-rated binary AdaBoost with `α = ½ ln((1 + r) / (1 − r))`,
/// `r` the weighted correlation of the chosen hypothesis with the labels.
pub fn adaboost_binary(data: &MislabelDataset, rounds: usize, learner: &mut dyn BinaryLearner) -> BinaryRun {
    let n = data.len();
    let xi = data.labels();
    let mut margins = vec![0.0; n];
    let mut records = Vec::with_capacity(rounds);
    let mut log_risk = 0.0;
    let mut separated = false;
    for t in 1..=rounds {
        // D(p) ∝ exp(−ξ_p F̃_p)
        let expo: Vec<f64> = margins.iter().zip(&xi).map(|(f, &x)| -(x as f64) * f).collect();
        let top = expo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> = expo.iter().map(|e| (e - top).exp()).collect();
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= z);

        let (index, h) = learner.learn(&w);
        let r: f64 = w.iter().zip(&h).zip(&xi).map(|((wp, &hp), &x)| wp * (x as f64) * (hp as f64)).sum::<f64>();
        let r = r.clamp(-1.0, 1.0);
        let perfect = h.iter().zip(&xi).all(|(&hp, &x)| hp == x);
        let (mut alpha, mut flagged, mut clamped) = (0.0, false, false);
        if perfect {
            alpha = ALPHA_MAX;
            clamped = true;
        } else if r <= 0.0 {
            flagged = true;
        } else {
            alpha = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
            if alpha > ALPHA_MAX || alpha.is_nan() {
                alpha = ALPHA_MAX;
                clamped = true;
            }
        }
        for (f, &hp) in margins.iter_mut().zip(&h) {
            *f += alpha * hp as f64;
        }
        let new_log_risk = log_mean_exp(&margins);
        records.push(RoundRecord {
            t,
            index: Some(index),
            cost_digest: 0,
            edge: r,
            alpha,
            loss: new_log_risk.exp(),
            log_loss: new_log_risk,
            drop: (new_log_risk - log_risk).exp(),
            c: f64::NAN,
            a_plus: f64::NAN,
            a_minus: f64::NAN,
            flagged,
            clamped,
            train_error: margins.iter().filter(|&&f| f >= 0.0).count() as f64 / n as f64,
        });
        log_risk = new_log_risk;
        if perfect {
            separated = true;
            break;
        }
    }
    BinaryRun { rounds: records, margins, separated }
}
